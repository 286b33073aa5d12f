//! Benchmark-only crate; see `benches/`.

use kdvlab::{rough_sample, GridSpec, RoughDataSpec, SpectralField};

/// Rough datum used by every benchmark.
pub fn bench_field(n_modes: usize, seed: u64) -> SpectralField {
    let grid = GridSpec::new(n_modes).expect("even grid");
    rough_sample(&RoughDataSpec::new(1.0, seed, grid)).expect("valid spec")
}
