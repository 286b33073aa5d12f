//! The three filtered one-step methods, the quadrature form of the common
//! increment `Ψ_τ`, and multi-step evolution.
//!
//! All schemes share the shape `u⁺ = e^{-τ∂³}[u + Π_τ Ψ_τ(Π_τ u)]` with
//! `Ψ_τ(v) = -(1/2) ∫_0^τ ψ₁(s) ∂_x (ψ₂(s) v)² ds`. The closed forms below
//! evaluate that integral exactly; [`Scheme::QuadratureOracle`] evaluates it
//! by Gauss-Legendre quadrature and serves as an independent check.

mod context;
mod oracle;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{square_dealiased, SpectralField};

pub use context::{phi1, FilterPolicy, StepContext};
pub use oracle::{step_quadrature_oracle, OracleStepper};

/// Default Gauss-Legendre node count for the quadrature oracle.
pub const DEFAULT_N_QUAD: usize = 64;

/// The `(ψ₁, ψ₂)` pair selecting a scheme inside `Ψ_τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiChoice {
    /// `ψ₁ = e^{s∂³}`, `ψ₂ = 1`.
    ExpIntegrator,
    /// `ψ₁ = ψ₂ = 1`.
    LieSplitting,
    /// `ψ₁ = e^{s∂³}`, `ψ₂ = e^{-s∂³}`.
    Resonance,
}

/// A one-step method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    ExpIntegrator,
    LieSplitting,
    Resonance,
    QuadratureOracle { psi: PsiChoice, n_quad: usize },
}

impl Scheme {
    /// The three closed-form schemes.
    pub const CLOSED_FORMS: [Scheme; 3] =
        [Scheme::ExpIntegrator, Scheme::LieSplitting, Scheme::Resonance];

    pub fn oracle(psi: PsiChoice, n_quad: usize) -> Result<Self> {
        if n_quad < 4 {
            return Err(Error::InvalidParameter {
                name: "n_quad",
                reason: format!("needs at least 4 nodes, got {n_quad}"),
            });
        }
        Ok(Scheme::QuadratureOracle { psi, n_quad })
    }

    /// The closed form matching a ψ-choice.
    pub fn closed_form(psi: PsiChoice) -> Self {
        match psi {
            PsiChoice::ExpIntegrator => Scheme::ExpIntegrator,
            PsiChoice::LieSplitting => Scheme::LieSplitting,
            PsiChoice::Resonance => Scheme::Resonance,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::ExpIntegrator => "exp_integrator",
            Scheme::LieSplitting => "lie_splitting",
            Scheme::Resonance => "resonance",
            Scheme::QuadratureOracle { psi, .. } => match psi {
                PsiChoice::ExpIntegrator => "oracle_exp_integrator",
                PsiChoice::LieSplitting => "oracle_lie_splitting",
                PsiChoice::Resonance => "oracle_resonance",
            },
        }
    }

    /// Parses the names produced by [`Scheme::name`]; oracles get [`DEFAULT_N_QUAD`] nodes.
    pub fn from_name(name: &str) -> Option<Self> {
        let psi = match name {
            "exp_integrator" => return Some(Scheme::ExpIntegrator),
            "lie_splitting" => return Some(Scheme::LieSplitting),
            "resonance" => return Some(Scheme::Resonance),
            "oracle_exp_integrator" => PsiChoice::ExpIntegrator,
            "oracle_lie_splitting" => PsiChoice::LieSplitting,
            "oracle_resonance" => PsiChoice::Resonance,
            _ => return None,
        };
        Some(Scheme::QuadratureOracle {
            psi,
            n_quad: DEFAULT_N_QUAD,
        })
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_input(ctx: &StepContext, u: &SpectralField) -> Result<()> {
    ctx.grid().check_same(&u.grid())?;
    u.ensure_mean_zero()
}

fn apply(m: &crate::spectral::Multiplier, u: &SpectralField) -> SpectralField {
    m.apply(u).expect("context multipliers share the field grid")
}

/// `u⁺ = e^{-τ∂³}[u - (τ/2) φ₁(τ∂³) Π_τ ∂_x (Π_τ u)²]`.
pub fn step_exp_integrator(ctx: &StepContext, u: &SpectralField) -> Result<SpectralField> {
    check_input(ctx, u)?;
    if !ctx.is_nonlinear() {
        return Ok(apply(&ctx.free, u));
    }
    let sq = square_dealiased(&apply(&ctx.pi, u));
    let increment = apply(&ctx.exp_kernel, &sq);
    Ok(apply(&ctx.free, &(u - &increment)))
}

/// `u⁺ = e^{-τ∂³}[u - (τ/2) Π_τ ∂_x (Π_τ u)²]`.
pub fn step_lie_splitting(ctx: &StepContext, u: &SpectralField) -> Result<SpectralField> {
    check_input(ctx, u)?;
    if !ctx.is_nonlinear() {
        return Ok(apply(&ctx.free, u));
    }
    let sq = square_dealiased(&apply(&ctx.pi, u));
    let increment = apply(&ctx.lie_kernel, &sq);
    Ok(apply(&ctx.free, &(u - &increment)))
}

/// `u⁺ = e^{-τ∂³}u - (1/6) Π_τ (e^{-τ∂³} ∂_x⁻¹ Π_τ u)² + (1/6) Π_τ e^{-τ∂³} (∂_x⁻¹ Π_τ u)²`.
///
/// The zero modes of the two squares coincide (`k³ + (-k)³ = 0`), so the
/// output stays mean-zero up to round-off.
pub fn step_resonance(ctx: &StepContext, u: &SpectralField) -> Result<SpectralField> {
    check_input(ctx, u)?;
    let linear = apply(&ctx.free, u);
    if !ctx.is_nonlinear() {
        return Ok(linear);
    }
    let w = apply(&ctx.dx_inv, &apply(&ctx.pi, u));
    let twisted = square_dealiased(&apply(&ctx.free, &w));
    let plain = square_dealiased(&w);
    let gain = apply(&ctx.res_outer, &plain);
    let loss = apply(&ctx.res_inner, &twisted);
    Ok(&(&linear - &loss) + &gain)
}

/// One step of any scheme.
pub fn step(ctx: &StepContext, scheme: Scheme, u: &SpectralField) -> Result<SpectralField> {
    match scheme {
        Scheme::ExpIntegrator => step_exp_integrator(ctx, u),
        Scheme::LieSplitting => step_lie_splitting(ctx, u),
        Scheme::Resonance => step_resonance(ctx, u),
        Scheme::QuadratureOracle { .. } => step_quadrature_oracle(ctx, scheme, u),
    }
}

/// Callback receiving `(n, u^n)` after each step.
pub type Observer<'a> = &'a mut dyn FnMut(usize, &SpectralField);

/// Applies `n_steps` steps of `scheme` to `u0`.
///
/// Observers see `(n, u^n)` for `n = 1..=n_steps`. A non-finite coefficient
/// aborts with [`Error::BlowUp`] naming the offending step.
pub fn evolve(
    ctx: &StepContext,
    scheme: Scheme,
    u0: &SpectralField,
    n_steps: usize,
    observers: &mut [Observer<'_>],
) -> Result<SpectralField> {
    let oracle = match scheme {
        Scheme::QuadratureOracle { .. } => Some(OracleStepper::new(ctx, scheme)?),
        _ => None,
    };
    let mut u = u0.clone();
    for n in 1..=n_steps {
        u = match &oracle {
            Some(stepper) => stepper.step(&u)?,
            None => step(ctx, scheme, &u)?,
        };
        if !u.is_finite() {
            return Err(Error::BlowUp { step: n });
        }
        for obs in observers.iter_mut() {
            obs(n, &u);
        }
    }
    Ok(u)
}
