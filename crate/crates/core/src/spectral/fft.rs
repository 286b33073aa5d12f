//! Thread-local real FFT plans.
//!
//! Plans are cached per thread so transforms stay pure from the caller's
//! point of view and can run on any number of worker threads.

use std::cell::RefCell;

use num_complex::Complex64;
use realfft::RealFftPlanner;

thread_local! {
    static PLANNER: RefCell<RealFftPlanner<f64>> = RefCell::new(RealFftPlanner::new());
}

/// Unnormalized forward transform: `X_k = sum_j x_j e^{-2 pi i jk/n}` for `k = 0..=n/2`.
pub(crate) fn forward(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    let mut input = samples.to_vec();
    let mut output = plan.make_output_vec();
    plan.process(&mut input, &mut output)
        .expect("buffer sizes come from the plan");
    output
}

/// Unnormalized inverse transform of a half spectrum of length `n/2 + 1`.
///
/// The imaginary parts of the self-conjugate entries (0 and n/2) are ignored.
pub(crate) fn inverse(half: &[Complex64], n: usize) -> Vec<f64> {
    debug_assert_eq!(half.len(), n / 2 + 1);
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    let mut input = half.to_vec();
    input[0].im = 0.0;
    input[n / 2].im = 0.0;
    let mut output = plan.make_output_vec();
    plan.process(&mut input, &mut output)
        .expect("self-conjugate entries are real");
    output
}

/// Smallest even 5-smooth integer `>= n`.
pub(crate) fn fast_len(n: usize) -> usize {
    let mut m = n.max(2);
    loop {
        if m % 2 == 0 {
            let mut r = m;
            for p in [2, 3, 5] {
                while r % p == 0 {
                    r /= p;
                }
            }
            if r == 1 {
                return m;
            }
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_len_picks_smooth_sizes() {
        assert_eq!(fast_len(1), 2);
        assert_eq!(fast_len(7), 8);
        assert_eq!(fast_len(383), 384);
        assert_eq!(fast_len(3 * 1024), 3072);
        assert_eq!(fast_len(1537), 1600);
    }
}
