use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{make_pi_tau, pi_cutoff, GridSpec, Multiplier};

/// Below this `|δ|` the first φ-function is summed as a Taylor series.
const PHI1_TAYLOR_RADIUS: f64 = 1e-4;

/// `φ₁(δ) = (e^δ - 1)/δ`, with `φ₁(0) = 1`.
pub fn phi1(delta: Complex64) -> Complex64 {
    if delta.norm() < PHI1_TAYLOR_RADIUS {
        // 1 + δ/2 + δ²/6 + δ³/24 + δ⁴/120 + δ⁵/720
        let mut term = Complex64::new(1.0, 0.0);
        let mut acc = term;
        for j in 2..=6 {
            term = term * delta / j as f64;
            acc += term;
        }
        acc
    } else {
        // e^δ - 1 without cancellation: e^x cos y - 1 = expm1(x) cos y - 2 sin²(y/2)
        let (x, y) = (delta.re, delta.im);
        let half = (0.5 * y).sin();
        let num = Complex64::new(
            x.exp_m1() * y.cos() - 2.0 * half * half,
            x.exp() * y.sin(),
        );
        num / delta
    }
}

/// Which filter the nonlinearity sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterPolicy {
    /// `Π_τ` tied to the step size.
    StepSize,
    /// `Π_θ` for a fixed `θ`, independent of the step (fine solves of the projected equation).
    Tau(f64),
    /// All retained grid modes: the Galerkin-truncated, unfiltered equation.
    Open,
}

/// Step size, grid and every multiplier a step needs.
#[derive(Debug, Clone, PartialEq)]
pub struct StepContext {
    tau: f64,
    grid: GridSpec,
    policy: FilterPolicy,
    cutoff: usize,
    nonlinear: bool,
    pub(crate) free: Multiplier,
    pub(crate) pi: Multiplier,
    pub(crate) phi1: Multiplier,
    pub(crate) dx: Multiplier,
    pub(crate) dx_inv: Multiplier,
    /// `(τ/2) Π_τ ∂_x`
    pub(crate) lie_kernel: Multiplier,
    /// `(τ/2) φ₁(τ∂_x³) Π_τ ∂_x`
    pub(crate) exp_kernel: Multiplier,
    /// `Π_τ / 6`
    pub(crate) res_inner: Multiplier,
    /// `Π_τ e^{-τ∂_x³} / 6`
    pub(crate) res_outer: Multiplier,
}

impl StepContext {
    pub fn new(tau: f64, grid: GridSpec) -> Result<Self> {
        Self::with_filter(tau, grid, FilterPolicy::StepSize)
    }

    pub fn with_filter(tau: f64, grid: GridSpec, policy: FilterPolicy) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: format!("must be positive and finite, got {tau}"),
            });
        }
        let (pi, cutoff) = match policy {
            FilterPolicy::StepSize => (make_pi_tau(tau, grid)?, pi_cutoff(tau)),
            FilterPolicy::Tau(theta) => (make_pi_tau(theta, grid)?, pi_cutoff(theta)),
            FilterPolicy::Open => (Multiplier::identity(grid), grid.nyquist()),
        };
        let free = Multiplier::free_flow(tau, grid);
        // τ∂_x³ has symbol τ(ik)³ = -iτk³
        let phi1 = Multiplier::from_symbol(grid, "phi1(tau*dx^3)", |k| {
            phi1(Complex64::new(0.0, -tau * (k * k * k) as f64))
        });
        let dx = Multiplier::dx(grid);
        let dx_inv = Multiplier::dx_inv(grid);
        let lie_kernel = pi.then(&dx).scaled(0.5 * tau);
        let exp_kernel = lie_kernel.then(&phi1);
        let res_inner = pi.scaled(1.0 / 6.0);
        let res_outer = free.then(&pi).scaled(1.0 / 6.0);
        Ok(Self {
            tau,
            grid,
            policy,
            cutoff,
            nonlinear: true,
            free,
            pi,
            phi1,
            dx,
            dx_inv,
            lie_kernel,
            exp_kernel,
            res_inner,
            res_outer,
        })
    }

    /// The same context with the quadratic term switched off (free flow only).
    pub fn without_nonlinearity(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn policy(&self) -> FilterPolicy {
        self.policy
    }

    /// Largest `|k|` the filter keeps.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn is_nonlinear(&self) -> bool {
        self.nonlinear
    }

    pub fn free_flow(&self) -> &Multiplier {
        &self.free
    }

    pub fn filter(&self) -> &Multiplier {
        &self.pi
    }

    pub fn phi1(&self) -> &Multiplier {
        &self.phi1
    }
}
