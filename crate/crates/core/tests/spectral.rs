use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use nlskdv_core::spectral::*;
use nlskdv_core::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Direct O(N²) DFT with the same normalization as `forward_transform`.
fn naive_forward(grid: TorusGrid, samples: &[Complex64]) -> Vec<(i64, Complex64)> {
    let n = grid.num_modes();
    (grid.min_mode()..=grid.max_mode())
        .map(|m| {
            let s: Complex64 = (0..n)
                .map(|j| samples[j] * Complex64::from_polar(1.0, -(m as f64) * grid.point(j)))
                .sum();
            (m, s / n as f64)
        })
        .collect()
}

fn naive_inverse(field: &SpectralField) -> Vec<Complex64> {
    let g = field.grid();
    (0..g.num_modes())
        .map(|j| field.modes().map(|(m, a)| a * Complex64::from_polar(1.0, m as f64 * g.point(j))).sum())
        .collect()
}

fn lcg_samples(n: usize, seed: u64) -> Vec<Complex64> {
    let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = move || {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((x >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    (0..n).map(|_| c(next(), next())).collect()
}

#[test]
fn constant_samples_give_mean_mode() {
    let g = TorusGrid::new(16).unwrap();
    let f = forward_transform(g, &vec![c(1.0, 0.0); 16]).unwrap();
    for (n, a) in f.modes() {
        let want = if n == 0 { 1.0 } else { 0.0 };
        assert_abs_diff_eq!(a.re, want, epsilon = 1e-15);
        assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-15);
    }
}

#[test]
fn pure_mode_and_cosine() {
    let g = TorusGrid::new(16).unwrap();
    let s: Vec<_> = g.points().iter().map(|&x| Complex64::from_polar(1.0, 3.0 * x)).collect();
    let f = forward_transform(g, &s).unwrap();
    for (n, a) in f.modes() {
        assert!((a - c(if n == 3 { 1.0 } else { 0.0 }, 0.0)).norm() < 1e-12);
    }

    let g = TorusGrid::new(8).unwrap();
    let s: Vec<f64> = g.points().iter().map(|x| x.cos()).collect();
    let f = forward_transform_real(g, &s).unwrap();
    assert!(f.is_real());
    assert!((f.coeff(1) - c(0.5, 0.0)).norm() < 1e-15);
    assert!((f.coeff(-1) - c(0.5, 0.0)).norm() < 1e-15);
}

#[test]
fn inverse_examples() {
    let g = TorusGrid::new(8).unwrap();
    let one = SpectralField::from_modes(g, &[(0, c(1.0, 0.0))], true).unwrap();
    assert!(inverse_transform(&one).iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-15));
    let cos = SpectralField::from_modes(g, &[(1, c(0.5, 0.0)), (-1, c(0.5, 0.0))], true).unwrap();
    for (z, x) in inverse_transform(&cos).iter().zip(g.points()) {
        assert!((z - c(x.cos(), 0.0)).norm() < 1e-15);
    }
}

#[test]
fn transforms_match_direct_summation() {
    let g = TorusGrid::new(32).unwrap();
    let s = lcg_samples(32, 7);
    let f = forward_transform(g, &s).unwrap();
    for (m, want) in naive_forward(g, &s) {
        assert!((f.coeff(m) - want).norm() < 1e-13, "mode {m}");
    }
    let back = naive_inverse(&f);
    let fast = inverse_transform(&f);
    for j in 0..32 {
        assert!((back[j] - s[j]).norm() < 1e-12);
        assert!((fast[j] - s[j]).norm() < 1e-12);
    }
}

#[test]
fn round_trip_across_sizes() {
    for e in 3..=8 {
        let n = 1usize << e;
        let g = TorusGrid::new(n).unwrap();
        let s = lcg_samples(n, e as u64);
        let back = inverse_transform(&forward_transform(g, &s).unwrap());
        let err = s.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "N = {n}: {err}");
    }
}

#[test]
fn grid_rejects_odd_and_tiny() {
    assert!(TorusGrid::new(7).is_err());
    assert!(TorusGrid::new(2).is_err());
    assert!(TorusGrid::new(10).is_ok());
}

#[test]
fn derivative_examples() {
    let g = TorusGrid::new(16).unwrap();
    let cos = SpectralField::from_modes(g, &[(1, c(0.5, 0.0)), (-1, c(0.5, 0.0))], true).unwrap();
    let d = spectral_derivative(&cos, 1).unwrap();
    for (z, x) in inverse_transform(&d).iter().zip(g.points()) {
        assert!((z.re + x.sin()).abs() < 1e-14 && z.im.abs() < 1e-14);
    }

    let e2 = SpectralField::from_modes(g, &[(2, c(1.0, 0.0))], false).unwrap();
    let d3 = spectral_derivative(&e2, 3).unwrap();
    assert!((d3.coeff(2) - c(0.0, -8.0)).norm() < 1e-14);

    let k = SpectralField::from_modes(g, &[(0, c(3.0, 0.0))], true).unwrap();
    assert!(spectral_derivative(&k, 2).unwrap().coeffs().iter().all(|z| z.norm() == 0.0));
    assert!(spectral_derivative(&k, 0).is_err());
}

#[test]
fn odd_derivatives_clear_nyquist() {
    let g = TorusGrid::new(8).unwrap();
    let f = SpectralField::from_modes(g, &[(-4, c(1.0, 0.0)), (1, c(1.0, 0.0))], false).unwrap();
    assert_eq!(spectral_derivative(&f, 1).unwrap().coeff(-4), c(0.0, 0.0));
    assert_eq!(spectral_derivative(&f, 2).unwrap().coeff(-4), c(-16.0, 0.0));
}

#[test]
fn dealias_examples() {
    let g = TorusGrid::new(12).unwrap();
    let f5 = SpectralField::from_modes(g, &[(5, c(1.0, 0.0))], false).unwrap();
    assert_eq!(dealias(&f5).coeff(5), c(0.0, 0.0));
    let f3 = SpectralField::from_modes(g, &[(3, c(1.0, 0.0))], false).unwrap();
    assert_eq!(dealias(&f3), f3);
}

#[test]
fn hermitian_check_on_real_fields() {
    let g = TorusGrid::new(8).unwrap();
    assert!(SpectralField::from_modes(g, &[(1, c(1.0, 0.0))], true).is_err());
    assert!(SpectralField::from_modes(g, &[(1, c(1.0, 2.0)), (-1, c(1.0, -2.0))], true).is_ok());
}

#[test]
fn sobolev_norm_of_single_mode() {
    let g = TorusGrid::new(16).unwrap();
    let f = SpectralField::from_modes(g, &[(3, c(1.0, 0.0))], false).unwrap();
    // (2π · 4²)^{1/2}
    assert_abs_diff_eq!(f.sobolev_norm(1.0), (2.0 * PI * 16.0).sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(f.sobolev_norm(0.0).powi(2), f.l2_norm_sq(), epsilon = 1e-12);
}

#[test]
fn uv1_pair_convolves_to_one_mode() {
    use nlskdv_core::estimates::{build_counterexample, CounterexampleFamily, CounterexampleSpec};
    let spec = CounterexampleSpec::new(CounterexampleFamily::Uv1, 8, 1.0, 0.0).unwrap();
    let (u, v) = build_counterexample(&spec);
    let w = convolve_spacetime(&u, &v).unwrap();
    assert_eq!(w.active_modes().collect::<Vec<_>>(), vec![-28]);
}

#[test]
fn plancherel_for_l2() {
    let g = SpaceTimeGrid::default();
    let mut f = SpaceTimeSpectrum::new(g);
    f.add_chi1(0, 0.3, c(1.0, 0.5));
    f.add_chi1(2, -4.0, c(-0.4, 0.2));
    f.add_chi1(-3, 9.0, c(0.1, -0.7));
    let want = (2.0 * PI * f.l2_sq()).sqrt();
    let got = lebesgue_norm(&f, 2, false).unwrap();
    assert!((got / want - 1.0).abs() < 1e-10, "{got} vs {want}");
}

/// `‖f‖₄⁴ = ‖f²‖₂²`, with `f²` computed by a discrete convolution of the
/// coefficient lattice and its L² norm by Plancherel over one t-period.
fn l4_oracle(f: &SpaceTimeSpectrum) -> f64 {
    use std::collections::HashMap;
    let g = f.grid();
    let d = g.spacing();
    let scale = d / (2.0 * PI).sqrt();
    let mut pts: Vec<(i64, i64, Complex64)> = Vec::new();
    for (n, w) in f.iter() {
        for (i, v) in w.values.iter().enumerate() {
            pts.push((n, w.first + i as i64, v * scale));
        }
    }
    let mut sq: HashMap<(i64, i64), Complex64> = HashMap::new();
    for a in &pts {
        for b in &pts {
            *sq.entry((a.0 + b.0, a.1 + b.1)).or_default() += a.2 * b.2;
        }
    }
    // period 2π/Δτ in t, 2π in x
    let total: f64 = sq.values().map(|z| z.norm_sqr()).sum::<f64>() * (2.0 * PI / d) * 2.0 * PI;
    total.powf(0.25)
}

#[test]
fn l4_without_cutoff_matches_convolution_oracle() {
    let g = SpaceTimeGrid::default();
    let mut f = SpaceTimeSpectrum::new(g);
    f.add_chi1(1, -1.0, c(1.0, 0.0));
    f.add_chi1(-2, -4.0, c(0.3, 0.6));
    let got = lebesgue_norm(&f, 4, false).unwrap();
    let want = l4_oracle(&f);
    assert!((got / want - 1.0).abs() < 1e-10, "{got} vs {want}");
}

#[test]
fn l4_with_cutoff_matches_dense_quadrature() {
    // single free wave: |f(x,t)| = (2π)^{-1/2} |Σ_m Δτ e^{itτ_m}| does not depend on x
    let g = SpaceTimeGrid::default();
    let f = SpaceTimeSpectrum::chi1(g, 1, -1.0);
    let w = f.window(1).unwrap().clone();
    let d = g.spacing();
    let amp = |t: f64| -> f64 {
        let s: Complex64 = (0..w.values.len())
            .map(|i| Complex64::from_polar(1.0, t * g.tau(w.first + i as i64)))
            .sum();
        (s * d).norm() / (2.0 * PI).sqrt()
    };
    let dense = |steps: usize| -> f64 {
        let h = 4.0 / steps as f64;
        let mut acc = 0.0;
        for i in 0..=steps {
            let t = -2.0 + i as f64 * h;
            let wgt = if i == 0 || i == steps { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += wgt * (bump(t) * amp(t)).powi(4);
        }
        (2.0 * PI * acc * h / 3.0).powf(0.25)
    };
    let (coarse, fine) = (dense(20_000), dense(40_000));
    assert!((coarse / fine - 1.0).abs() < 1e-6);
    let got = lebesgue_norm(&f, 4, true).unwrap();
    assert!((got / fine - 1.0).abs() < 0.05, "{got} vs {fine}");
}

fn field_strategy(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b)), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn parseval_identity(samples in field_strategy(32)) {
        let g = TorusGrid::new(32).unwrap();
        let f = forward_transform(g, &samples).unwrap();
        let physical: f64 = samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * 2.0 * PI / 32.0;
        prop_assert!((physical - f.l2_norm_sq()).abs() < 1e-10);
    }

    #[test]
    fn dealias_is_norm_reducing_projection(samples in field_strategy(24)) {
        let g = TorusGrid::new(24).unwrap();
        let f = forward_transform(g, &samples).unwrap();
        let once = dealias(&f);
        prop_assert_eq!(dealias(&once), once.clone());
        prop_assert!(once.l2_norm_sq() <= f.l2_norm_sq() + 1e-15);
    }

    #[test]
    fn convolution_is_commutative_and_bilinear(
        a in (-1.0f64..1.0, -1.0f64..1.0),
        centers in (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0),
        modes in (-4i64..4, -4i64..4, -4i64..4),
    ) {
        let g = SpaceTimeGrid::default();
        let f = SpaceTimeSpectrum::chi1(g, modes.0, centers.0);
        let h = SpaceTimeSpectrum::chi1(g, modes.1, centers.1);
        let k = SpaceTimeSpectrum::chi1(g, modes.2, centers.2);
        let fh = convolve_spacetime(&f, &h).unwrap();
        let hf = convolve_spacetime(&h, &f).unwrap();
        let mut diff = 0.0f64;
        fh.add_scaled(&hf, c(-1.0, 0.0)).unwrap().for_each_sample(|_, _, v| diff = diff.max(v.norm()));
        prop_assert!(diff < 1e-12);

        let amp = c(a.0, a.1);
        let lhs = convolve_spacetime(&f.add_scaled(&k, amp).unwrap(), &h).unwrap();
        let rhs = fh.add_scaled(&convolve_spacetime(&k, &h).unwrap(), amp).unwrap();
        let mut diff = 0.0f64;
        lhs.add_scaled(&rhs, c(-1.0, 0.0)).unwrap().for_each_sample(|_, _, v| diff = diff.max(v.norm()));
        prop_assert!(diff < 1e-12);
    }
}
