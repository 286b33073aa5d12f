use super::*;
use crate::spectral::test_support::random_field;
use proptest::prelude::*;

fn random_st(grid: GridSpec, tau: f64, len: usize, seed: u64) -> SpaceTimeField {
    let samples = (0..len)
        .map(|m| random_field(grid, grid.nyquist() - 1, seed * 1000 + m as u64))
        .collect();
    SpaceTimeField::new(tau, samples).unwrap()
}

fn cos_field(grid: GridSpec) -> SpectralField {
    crate::initial_data::smooth_profile(crate::initial_data::SmoothProfile::Cosine, grid)
}

#[test]
fn d_tau_special_values() {
    let tau = 0.01;
    assert_eq!(d_tau(tau, 0.0), Complex64::new(0.0, 0.0));
    let z = d_tau(tau, PI / tau);
    assert!((z - Complex64::new(-2.0 / tau, 0.0)).norm() < 1e-12 / tau);
}

#[test]
fn d_tau_comparable_to_sigma() {
    for &tau in &[1.0, 1e-2, 2f64.powi(-12)] {
        for i in 1..=2000 {
            let sigma = PI / tau * i as f64 / 2000.0;
            for sg in [sigma, -sigma] {
                let r = d_tau(tau, sg).norm() / sg.abs();
                assert!(r >= 2.0 / PI - 1e-12 && r <= 1.0 + 1e-12, "{tau} {sg} {r}");
            }
        }
    }
}

proptest! {
    #[test]
    fn d_tau_bounded_and_periodic(tau in 1e-4f64..1.0, x in -50.0f64..50.0) {
        let sigma = x / tau;
        prop_assert!(d_tau(tau, sigma).norm() <= 2.0 / tau * (1.0 + 1e-14));
        let shifted = d_tau(tau, sigma + 2.0 * PI / tau);
        prop_assert!((shifted - d_tau(tau, sigma)).norm() * tau <= 1e-12);
    }

    #[test]
    fn shifted_symbol_matches_direct(tau in 1e-3f64..0.5, x in -3.0f64..3.0, k in -20i64..20) {
        let sigma = x / tau;
        let direct = d_tau(tau, sigma + (k * k * k) as f64);
        prop_assert!((d_tau_shifted(tau, sigma, k) - direct).norm() * tau <= 1e-10);
    }
}

#[test]
fn window_shape() {
    let len = 64;
    assert_eq!(window(0, len), 0.0);
    assert_eq!(window(len - 1, len), 0.0);
    assert_eq!(window(len / 2, len), 1.0);
    for m in 0..len {
        assert!((window(m, len) - window(len - 1 - m, len)).abs() < 1e-15);
        assert!((0.0..=1.0).contains(&window(m, len)));
    }
}

#[test]
fn parseval_is_exact() {
    let grid = GridSpec::new(32).unwrap();
    for (i, &len) in [16usize, 64, 256].iter().enumerate() {
        let u = random_st(grid, 0.01, len, i as u64);
        let lhs = xsb_norm(&u, 0.0, 0.0);
        let rhs = u.l2_norm();
        assert!((lhs - rhs).abs() <= 1e-10 * rhs, "{len}: {lhs} {rhs}");
    }
}

#[test]
fn single_sample_spectrum_is_flat() {
    let grid = GridSpec::new(16).unwrap();
    let f = random_field(grid, 7, 9);
    let mut samples = vec![SpectralField::zeros(grid); 8];
    samples[0] = f.clone();
    let u = SpaceTimeField::new(0.1, samples).unwrap();
    let spec = st_fourier(&u);
    for kidx in 0..=grid.nyquist() {
        for j in 0..spec.len() {
            assert!((spec.get(j, kidx) - f.modes()[kidx] * 0.1).norm() < 1e-15);
        }
    }
}

#[test]
fn free_flow_peaks_at_dispersion_relation() {
    let grid = GridSpec::new(16).unwrap();
    let tau = 0.01;
    let f = SpectralField::from_fn(grid, |k| {
        Complex64::new(if k == 3 { 1.0 } else { 0.0 }, 0.0)
    })
    .unwrap();
    let samples: Vec<_> = (0..128)
        .map(|m| crate::spectral::free_flow(m as f64 * tau, &f))
        .collect();
    let spec = st_fourier(&SpaceTimeField::new(tau, samples).unwrap());
    let col = spec.column(3);
    let peak = (0..col.len())
        .max_by(|&a, &b| col[a].norm().total_cmp(&col[b].norm()))
        .unwrap();
    // û^m(3) = e^{i m τ 27}: the sum peaks where σ ≡ -27 modulo 2π/τ
    let period = 2.0 * PI / tau;
    let target = (-27.0 + PI / tau).rem_euclid(period) - PI / tau;
    assert!((spec.sigma(peak) - target).abs() <= spec.weight() / 2.0 + 1e-9);
}

#[test]
fn norms_monotone_in_s_and_b() {
    let grid = GridSpec::new(32).unwrap();
    let u = random_st(grid, 0.05, 32, 4);
    let mut last = 0.0;
    for &b in &[0.0, 0.25, 1.0 / 3.0, 0.5, 1.0] {
        let v = xsb_norm(&u, 0.0, b);
        assert!(v >= last - 1e-12 * v);
        last = v;
    }
    let mut last = 0.0;
    for &s in &[0.0, 0.5, 1.0, 2.0] {
        let v = xsb_norm(&u, s, 0.5);
        assert!(v >= last - 1e-12 * v);
        last = v;
    }
}

#[test]
fn b_embedding_costs_at_most_a_power_of_tau() {
    // ⟨d_τ⟩ ≤ (1 + 4/τ²)^{1/2}, so raising b by δ costs at most that to the δ
    let grid = GridSpec::new(32).unwrap();
    for &tau in &[0.1, 0.01] {
        let u = random_st(grid, tau, 32, 11);
        let c = (1.0 + 4.0 / (tau * tau)).sqrt();
        for &(b, bp) in &[(0.5, 0.0), (0.5, 1.0 / 3.0), (1.0, 0.5)] {
            assert!(xsb_norm(&u, 0.0, b) <= c.powf(b - bp) * xsb_norm(&u, 0.0, bp) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn xs_and_ys_basics() {
    let grid = GridSpec::new(32).unwrap();
    let zero = SpaceTimeField::new(0.1, vec![SpectralField::zeros(grid); 8]).unwrap();
    assert_eq!(xs_norm(&zero, 0.0).unwrap(), 0.0);
    assert_eq!(ys_norm(&zero, 0.0).unwrap(), 0.0);
    let u = random_st(grid, 0.02, 64, 2);
    for &s in &[0.0, 1.0] {
        assert!(xs_norm(&u, s).unwrap() >= xsb_norm(&u, s, 0.5));
        assert!(ys_norm(&u, s).unwrap() >= xsb_norm(&u, s, -0.5));
    }
    let mut samples = u.samples().to_vec();
    let mut modes = samples[3].modes().to_vec();
    modes[0] = Complex64::new(0.5, 0.0);
    samples[3] = SpectralField::from_modes(grid, modes).unwrap();
    let shifted = SpaceTimeField::new(0.02, samples).unwrap();
    assert!(matches!(xs_norm(&shifted, 0.0), Err(Error::MeanNotZero { .. })));
    assert!(matches!(ys_norm(&shifted, 0.0), Err(Error::MeanNotZero { .. })));
}

#[test]
fn sup_norm_embeds_into_xs() {
    let grid = GridSpec::new(32).unwrap();
    for seed in 0..10 {
        let u = random_st(grid, 0.03, 40, seed);
        for &s in &[0.0, 0.5, 1.5] {
            let lhs = u.sup_sobolev(s);
            let rhs = xs_norm(&u, s).unwrap() / (2.0 * PI).sqrt();
            assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} {rhs}");
        }
    }
}

#[test]
fn windowed_free_flow_bounded_by_data() {
    let grid = GridSpec::new(64).unwrap();
    let f = random_field(grid, 31, 3);
    let mut ratios = Vec::new();
    for p in 6..=10 {
        let tau = 2f64.powi(-p);
        let u = SpaceTimeField::windowed_free_flow(&f, tau, (1.0 / tau) as usize).unwrap();
        ratios.push(xsb_norm(&u, 1.0, 0.5) / f.sobolev_norm(1.0));
    }
    for w in ratios.windows(2) {
        assert!(w[1] / w[0] < 1.2 && w[0] / w[1] < 1.2, "{ratios:?}");
    }
}

#[test]
fn ratios_handle_degenerate_input() {
    let grid = GridSpec::new(32).unwrap();
    let zero = SpaceTimeField::new(0.05, vec![SpectralField::zeros(grid); 16]).unwrap();
    assert_eq!(strichartz_ratio(&zero), Err(Error::ZeroDenominator));
    let u = SpaceTimeField::windowed_free_flow(&cos_field(grid), 0.05, 16).unwrap();
    assert_eq!(bilinear_ratio(&u, &zero, 0.0), Err(Error::ZeroDenominator));
    let r = bilinear_ratio(&u, &u, 0.0).unwrap();
    assert!(r.is_finite() && r > 0.0);
}

#[test]
fn strichartz_single_mode_is_stable() {
    let grid = GridSpec::new(64).unwrap();
    let f = cos_field(grid);
    let mut ratios = Vec::new();
    for p in 6..=12 {
        let tau = 2f64.powi(-p);
        let u = SpaceTimeField::windowed_free_flow(&f, tau, (1.0 / tau) as usize).unwrap();
        ratios.push(strichartz_ratio(&u).unwrap());
    }
    for w in ratios.windows(2) {
        assert!(w[1] / w[0] < 2.0 && w[0] / w[1] < 2.0, "{ratios:?}");
    }
}

#[test]
fn l4_quadrature_is_exact_for_cosine() {
    // ∫ cos⁴ = 3π/4 on the torus
    let grid = GridSpec::new(16).unwrap();
    let u = SpaceTimeField::new(1.0, vec![cos_field(grid); 8]).unwrap();
    let expect = (8.0 * 0.75 * PI).powf(0.25);
    assert!((l4_norm_filtered(&u).unwrap() - expect).abs() < 1e-14);
}

#[test]
fn rejects_short_or_mixed_fields() {
    let a = GridSpec::new(16).unwrap();
    let b = GridSpec::new(32).unwrap();
    assert!(SpaceTimeField::new(0.1, vec![SpectralField::zeros(a); 7]).is_err());
    let mut mixed = vec![SpectralField::zeros(a); 8];
    mixed[5] = SpectralField::zeros(b);
    assert!(SpaceTimeField::new(0.1, mixed).is_err());
}

#[test]
fn probe_is_deterministic_and_reports_growth() {
    let mut cfg = ProbeConfig::new(32, vec![2f64.powi(-5), 2f64.powi(-6), 2f64.powi(-7)]);
    cfg.strichartz_fields = 4;
    cfg.bilinear_pairs = 2;
    let a = uniformity_probe(&cfg).unwrap();
    cfg.jobs = 3;
    let b = uniformity_probe(&cfg).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.growth.len(), 4);
    assert!(a.max_growth("strichartz").unwrap() > 0.0);
    let mut buf = Vec::new();
    write_probe_csv(&a, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with(PROBE_CSV_HEADER));
    assert!(text.contains("strichartz_max_window2,"));
}
