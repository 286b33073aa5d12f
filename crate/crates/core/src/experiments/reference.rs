//! Fine resonance solves standing in for the exact flow.
//!
//! A reference is the Richardson value `2u(h/2) - u(h)` built from three
//! resonance runs at `h = τ_ref, τ_ref/2, τ_ref/4`. The two extrapolants
//! `R(τ_ref)` and `R(τ_ref/2)` form the validation pair; the finer one is
//! returned. Plain first-order pairs cannot certify the smooth studies at
//! desk scale, the extrapolated pair can.

use serde::{Deserialize, Serialize};

use super::config::exact_ratio;
use crate::error::{Error, Result};
use crate::schemes::{evolve, FilterPolicy, Observer, Scheme, StepContext};
use crate::spectral::{make_pi_tau, pi_cutoff, GridSpec, Multiplier, SpectralField};

/// Which equation the reference integrates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceFlow {
    /// `Open` for the truncated KdV flow, `Tau(θ)` for the projected equation.
    pub filter: FilterPolicy,
    pub nonlinear: bool,
}

impl ReferenceFlow {
    pub const FULL: ReferenceFlow = ReferenceFlow {
        filter: FilterPolicy::Open,
        nonlinear: true,
    };

    pub fn projected(theta: f64) -> Self {
        Self {
            filter: FilterPolicy::Tau(theta),
            nonlinear: true,
        }
    }
}

/// A validated-or-not reference trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRun {
    /// States at `t_j = j T / samples`, `j = 1..=samples`.
    pub states: Vec<SpectralField>,
    /// Largest `L^2` distance between the two extrapolants over the samples.
    pub pair_difference: f64,
}

impl ReferenceRun {
    pub fn last(&self) -> &SpectralField {
        self.states.last().expect("at least one sample")
    }
}

/// Outcome of holding a reference against the errors it is used to measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCheck {
    pub seed: u64,
    pub pair_difference: f64,
    pub threshold: f64,
    pub accepted: bool,
}

impl ReferenceCheck {
    /// Accepts when the pair difference is within `tolerance` times the
    /// smallest positive measured error. With no positive error to compare
    /// against, only an exactly reproducible reference is accepted.
    pub fn new(seed: u64, pair_difference: f64, tolerance: f64, errors: &[f64]) -> Self {
        let smallest = errors
            .iter()
            .copied()
            .filter(|e| *e > 0.0 && e.is_finite())
            .fold(f64::INFINITY, f64::min);
        let threshold = if smallest.is_finite() {
            tolerance * smallest
        } else {
            0.0
        };
        Self {
            seed,
            pair_difference,
            threshold,
            accepted: pair_difference <= threshold,
        }
    }

    pub fn into_result(self) -> Result<()> {
        if self.accepted {
            Ok(())
        } else {
            Err(Error::ReferenceValidation {
                difference: self.pair_difference,
                threshold: self.threshold,
            })
        }
    }
}

fn make_pi_tau_for(filter: FilterPolicy, grid: GridSpec) -> Result<Multiplier> {
    match filter {
        FilterPolicy::Tau(theta) => make_pi_tau(theta, grid),
        _ => Ok(Multiplier::identity(grid)),
    }
}

/// One plain resonance run, recording `samples` equispaced states.
///
/// Projected flows (`FilterPolicy::Tau(θ)`) start from `Π_θ u0`.
pub fn resonance_trajectory(
    u0: &SpectralField,
    horizon: f64,
    h: f64,
    flow: ReferenceFlow,
    samples: usize,
) -> Result<Vec<SpectralField>> {
    if samples == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "must be positive".into(),
        });
    }
    if horizon == 0.0 {
        return Ok(vec![u0.clone(); samples]);
    }
    let n = exact_ratio(horizon, h).ok_or_else(|| Error::InvalidParameter {
        name: "tau_ref",
        reason: format!("horizon {horizon} is not an integer multiple of {h}"),
    })?;
    if n % samples != 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: format!("{samples} samples do not divide {n} steps"),
        });
    }
    // The projected flow never leaves |k| <= K: integrate on the smallest grid holding that band.
    let full = u0.grid();
    let grid = match flow.filter {
        FilterPolicy::Tau(theta) => {
            let n = (2 * pi_cutoff(theta) + 2).max(8);
            let n = n + n % 2;
            if n < full.n_modes() {
                GridSpec::new(n)?
            } else {
                full
            }
        }
        _ => full,
    };
    let start = make_pi_tau_for(flow.filter, full)?.apply(u0)?.resized(grid);
    let mut ctx = StepContext::with_filter(h, grid, flow.filter)?;
    if !flow.nonlinear {
        ctx = ctx.without_nonlinearity();
    }
    let every = n / samples;
    let mut states = Vec::with_capacity(samples);
    let mut record = |m: usize, u: &SpectralField| {
        if m % every == 0 {
            states.push(u.resized(full));
        }
    };
    let mut observers: [Observer<'_>; 1] = [&mut record];
    evolve(&ctx, Scheme::Resonance, &start, n, &mut observers)?;
    Ok(states)
}

/// Combines the three plain runs at `h, h/2, h/4` into the returned reference.
pub fn richardson(levels: [&[SpectralField]; 3]) -> ReferenceRun {
    let [coarse, mid, fine] = levels;
    let mut states = Vec::with_capacity(fine.len());
    let mut pair_difference = 0.0f64;
    for ((a, b), c) in coarse.iter().zip(mid).zip(fine) {
        let r1 = &b.scaled(2.0) - a;
        let r2 = &c.scaled(2.0) - b;
        pair_difference = pair_difference.max((&r1 - &r2).l2_norm());
        states.push(r2);
    }
    ReferenceRun {
        states,
        pair_difference,
    }
}

/// Reference trajectory of `flow` from `u0`, unvalidated.
pub fn reference_trajectory(
    u0: &SpectralField,
    horizon: f64,
    tau_ref: f64,
    flow: ReferenceFlow,
    samples: usize,
) -> Result<ReferenceRun> {
    let runs = [tau_ref, tau_ref / 2.0, tau_ref / 4.0]
        .map(|h| resonance_trajectory(u0, horizon, h, flow, samples));
    let [a, b, c] = runs;
    let (a, b, c) = (a?, b?, c?);
    Ok(richardson([&a, &b, &c]))
}

/// `u(T)` of the truncated unfiltered flow, checked against `smallest_error`.
///
/// The pair must agree to `tolerance * smallest_error`, otherwise the
/// reference is rejected with [`Error::ReferenceValidation`].
pub fn reference_solve(
    u0: &SpectralField,
    horizon: f64,
    tau_ref: f64,
    tolerance: f64,
    smallest_error: f64,
) -> Result<SpectralField> {
    let run = reference_trajectory(u0, horizon, tau_ref, ReferenceFlow::FULL, 1)?;
    ReferenceCheck::new(0, run.pair_difference, tolerance, &[smallest_error]).into_result()?;
    Ok(run.states.into_iter().next().expect("one sample"))
}
