use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use super::{PsiChoice, Scheme, StepContext};
use crate::error::{Error, Result};
use crate::spectral::{square_dealiased, Multiplier, SpectralField};

/// Symbol of `e^{s∂³}` at `k`, i.e. `e^{-isk³}`.
fn backward_phase(s: f64, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, -s * (k * k * k) as f64)
}

/// Quadrature evaluation of `e^{-τ∂³}[u + Π_τ Ψ_τ(Π_τ u)]` with nodes precomputed.
#[derive(Debug, Clone)]
pub struct OracleStepper {
    ctx: StepContext,
    /// `ψ₂(s_i)` per node; `None` when it is the identity.
    inner: Vec<Option<Multiplier>>,
    /// `-(1/2) w_i ψ₁(s_i) Π_τ ∂_x` per node.
    outer: Vec<Multiplier>,
}

impl OracleStepper {
    pub fn new(ctx: &StepContext, scheme: Scheme) -> Result<Self> {
        let Scheme::QuadratureOracle { psi, n_quad } = scheme else {
            return Err(Error::InvalidParameter {
                name: "scheme",
                reason: format!("{scheme} is not a quadrature oracle"),
            });
        };
        let n = NonZeroUsize::new(n_quad).filter(|n| n.get() >= 4).ok_or(
            Error::InvalidParameter {
                name: "n_quad",
                reason: format!("needs at least 4 nodes, got {n_quad}"),
            },
        )?;
        let grid = ctx.grid();
        let tau = ctx.tau();
        let rule = GaussLegendre::new(n);
        let pi_dx = ctx.filter().then(&Multiplier::dx(grid));
        let mut inner = Vec::with_capacity(n_quad);
        let mut outer = Vec::with_capacity(n_quad);
        for &(x, w) in rule.as_node_weight_pairs() {
            let s = 0.5 * tau * (x + 1.0);
            let weight = -0.25 * tau * w;
            inner.push(match psi {
                PsiChoice::Resonance => Some(Multiplier::from_symbol(grid, "psi2", |k| {
                    backward_phase(-s, k)
                })),
                _ => None,
            });
            let psi1 = match psi {
                PsiChoice::LieSplitting => Multiplier::identity(grid),
                _ => Multiplier::from_symbol(grid, "psi1", |k| backward_phase(s, k)),
            };
            outer.push(psi1.then(&pi_dx).scaled(weight));
        }
        Ok(Self {
            ctx: ctx.clone(),
            inner,
            outer,
        })
    }

    pub fn step(&self, u: &SpectralField) -> Result<SpectralField> {
        self.ctx.grid().check_same(&u.grid())?;
        u.ensure_mean_zero()?;
        let free = self.ctx.free_flow();
        if !self.ctx.is_nonlinear() {
            return free.apply(u);
        }
        let v = self.ctx.filter().apply(u)?;
        let mut acc = u.clone();
        for (inner, outer) in self.inner.iter().zip(&self.outer) {
            let factor = match inner {
                Some(m) => m.apply(&v)?,
                None => v.clone(),
            };
            acc = &acc + &outer.apply(&square_dealiased(&factor))?;
        }
        free.apply(&acc)
    }
}

/// One quadrature-oracle step; builds the node table on every call.
pub fn step_quadrature_oracle(
    ctx: &StepContext,
    scheme: Scheme,
    u: &SpectralField,
) -> Result<SpectralField> {
    OracleStepper::new(ctx, scheme)?.step(u)
}
