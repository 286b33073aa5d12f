//! Filtered time integrators for the periodic Korteweg-de Vries equation
//! `u_t + u_xxx = -(1/2)(u^2)_x` at low regularity.
//!
//! * [`spectral`]: Fourier fields on the torus, multipliers, the filter `Π_τ`,
//!   alias-free products and Sobolev norms.
//! * [`schemes`]: the filtered exponential integrator, Lie splitting and
//!   resonance scheme, plus a quadrature evaluation of their common increment.
//! * [`initial_data`]: smooth profiles and rough power-law samples.
//! * [`experiments`]: reference solves, rate studies and report writers.
//! * [`bourgain`]: discrete space-time norms and estimate probes.

pub mod bourgain;
pub mod error;
pub mod experiments;
pub mod initial_data;
pub mod schemes;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex;
pub use initial_data::{rough_sample, smooth_profile, RoughDataSpec, SmoothProfile};
pub use schemes::{evolve, step, FilterPolicy, PsiChoice, Scheme, StepContext};
pub use spectral::{GridSpec, Multiplier, SpectralField};
