use nlskdv_core::dynamics::{linear_symbols, Couplings};
use nlskdv_core::norms::WeightFamily;
use nlskdv_core::picard::*;
use nlskdv_core::spectral::{SpectralField, TorusGrid};
use nlskdv_core::{Complex64, Error};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn full() -> Couplings {
    Couplings::new(1.0, 1.0, 1.0)
}

/// Low-mode data with amplitude `amp`.
fn data(g: TorusGrid, amp: f64) -> (SpectralField, SpectralField) {
    let u = SpectralField::from_modes(g, &[(1, c(amp, 0.0)), (-2, c(0.0, 0.5 * amp))], false).unwrap();
    let v = SpectralField::from_modes(
        g,
        &[(1, c(0.5 * amp, 0.2 * amp)), (-1, c(0.5 * amp, -0.2 * amp))],
        true,
    )
    .unwrap();
    (u, v)
}

fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn propagator_identity_and_group() {
    let g = TorusGrid::new(32).unwrap();
    let (u, v) = data(g, 1.0);
    for fam in [WeightFamily::Schrodinger, WeightFamily::Airy] {
        assert_eq!(free_propagator(&u, 0.0, fam), u);
        let back = free_propagator(&free_propagator(&v, 0.37, fam), -0.37, fam);
        assert!(max_diff(&back, &v) < 1e-12);
    }
}

fn random_field() -> impl Strategy<Value = SpectralField> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 32).prop_map(|v| {
        let g = TorusGrid::new(32).unwrap();
        let modes: Vec<_> = v.iter().enumerate().map(|(i, (a, b))| (i as i64 - 16, c(*a, *b))).collect();
        SpectralField::from_modes(g, &modes, false).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn propagators_are_unitary(f in random_field(), t in -2.0f64..2.0) {
        for fam in [WeightFamily::Schrodinger, WeightFamily::Airy] {
            let g = free_propagator(&f, t, fam);
            for sigma in [0.0, 0.25, 1.0] {
                let (a, b) = (f.sobolev_norm(sigma), g.sobolev_norm(sigma));
                prop_assert!((a - b).abs() <= 1e-12 * a);
            }
        }
    }
}

#[test]
fn zero_forcing_gives_free_evolution() {
    let g = TorusGrid::new(32).unwrap();
    let (u0, v0) = data(g, 0.3);
    let cfg = PicardConfig::new(0.2, 16);
    let free = Trajectory::free(&u0, &v0, &cfg.times());
    let out = duhamel_apply(&free, &u0, &v0, &cfg, Couplings::linear()).unwrap();
    assert_eq!(out.distance(&free, 1.0, 1.0).unwrap(), 0.0);

    // with the couplings on, the zero trajectory has zero forcing
    let zero = Trajectory::zeros(g, &cfg.times());
    let out = duhamel_apply(&zero, &u0, &v0, &cfg, full()).unwrap();
    assert_eq!(out.distance(&free, 1.0, 1.0).unwrap(), 0.0);
}

#[test]
fn duhamel_rejects_mismatched_input() {
    let g = TorusGrid::new(32).unwrap();
    let (u0, v0) = data(g, 0.3);
    let cfg = PicardConfig::new(0.2, 16);
    let other = TorusGrid::new(16).unwrap();
    let bad = Trajectory::zeros(other, &cfg.times());
    assert!(duhamel_apply(&bad, &u0, &v0, &cfg, full()).is_err());
    let short = Trajectory::zeros(g, &cfg.times()[..10]);
    assert!(duhamel_apply(&short, &u0, &v0, &cfg, full()).is_err());
}

#[test]
fn trapezoid_is_second_order_on_manufactured_forcing() {
    // pulled-back forcing cos(3t) at mode 2 integrates to sin(3t)/3
    let g = TorusGrid::new(16).unwrap();
    let (lu, lv) = linear_symbols(g);
    let k = g.index_of(2).unwrap();
    let t_end = 1.0;
    let defect = |m: usize| {
        let times: Vec<f64> = (0..=m).map(|j| t_end * j as f64 / m as f64).collect();
        let mut fu = Vec::new();
        let mut fv = Vec::new();
        for &t in &times {
            let mut a = vec![c(0.0, 0.0); 16];
            a[k] = (lu[k] * t).exp() * (3.0 * t).cos();
            fu.push(a);
            let mut b = vec![c(0.0, 0.0); 16];
            b[k] = (lv[k] * t).exp() * (3.0 * t).cos();
            b[g.index_of(-2).unwrap()] = b[k].conj();
            fv.push(b);
        }
        let zero_u = SpectralField::zeros(g, false);
        let zero_v = SpectralField::zeros(g, true);
        let tr = duhamel_forced(&zero_u, &zero_v, &times, &fu, &fv).unwrap();
        let want = (lu[k] * t_end).exp() * ((3.0 * t_end).sin() / 3.0);
        (tr.u[m].coeff(2) - want).norm()
    };
    let (d1, d2) = (defect(16), defect(32));
    let r = d1 / d2;
    assert!((3.5..=4.5).contains(&r), "{r}");
}

#[test]
fn zero_data_converges_at_once() {
    let g = TorusGrid::new(16).unwrap();
    let out = iterate(
        &SpectralField::zeros(g, false),
        &SpectralField::zeros(g, true),
        &PicardConfig::new(0.1, 16),
        full(),
    )
    .unwrap();
    assert!(out.report.converged);
    assert_eq!(out.report.iterations_used, 1);
    assert!(out.fixed_point.u.iter().all(|f| f.coeffs().iter().all(|z| z.norm() == 0.0)));
}

#[test]
fn tiny_data_contracts_fast() {
    let g = TorusGrid::new(64).unwrap();
    let (u0, v0) = data(g, 1e-3);
    let cfg = PicardConfig::new(0.1, 32);
    let out = iterate(&u0, &v0, &cfg, full()).unwrap();
    assert!(out.report.converged);
    assert!(out.report.iterations_used <= 5);
    assert!(out.report.contraction_ratios.iter().all(|&r| r < 0.1), "{:?}", out.report.contraction_ratios);
    for (i, r) in out.report.contraction_ratios.iter().enumerate() {
        assert_eq!(*r, out.report.distances[i + 1] / out.report.distances[i]);
    }

    // tightening tol does not move the fixed point beyond the old tolerance
    let tight = iterate(&u0, &v0, &PicardConfig { tol: 1e-14, ..cfg }, full()).unwrap();
    assert!(tight.fixed_point.distance(&out.fixed_point, 1.0, 1.0).unwrap() < 2.0 * cfg.tol);

    let again = duhamel_apply(&out.fixed_point, &u0, &v0, &cfg, full()).unwrap();
    assert!(again.distance(&out.fixed_point, 1.0, 1.0).unwrap() < 2.0 * cfg.tol);
}

#[test]
fn cross_solver_agreement() {
    let g = TorusGrid::new(64).unwrap();
    let (u0, v0) = data(g, 1e-3);
    let cfg = PicardConfig::new(0.1, 32);
    let out = iterate(&u0, &v0, &cfg, full()).unwrap();
    assert!(compare_with_dynamics(&out.fixed_point, &cfg, full()).unwrap() < 1e-6);

    let lin = iterate(&u0, &v0, &cfg, Couplings::linear()).unwrap();
    assert!(compare_with_dynamics(&lin.fixed_point, &cfg, Couplings::linear()).unwrap() < 1e-10);
}

#[test]
fn cross_solver_gap_is_second_order_in_time_step() {
    let g = TorusGrid::new(64).unwrap();
    let (u0, v0) = data(g, 0.1);
    let gap = |m| {
        let cfg = PicardConfig::new(0.1, m);
        let out = iterate(&u0, &v0, &cfg, full()).unwrap();
        compare_with_dynamics(&out.fixed_point, &cfg, full()).unwrap()
    };
    let r = gap(32) / gap(64);
    assert!((3.5..=4.5).contains(&r), "{r}");
}

#[test]
fn contraction_fails_earlier_for_larger_data() {
    let g = TorusGrid::new(32).unwrap();
    let cfg = PicardConfig {
        max_iters: 60,
        ..PicardConfig::new(0.1, 32)
    };
    let t_of = |amp| {
        let (u0, v0) = data(g, amp);
        first_failing_time(&u0, &v0, &cfg, full(), 8).unwrap()
    };
    let small = t_of(0.1).expect("fails within 8 doublings");
    let large = t_of(0.5).expect("fails within 8 doublings");
    assert!(large < small, "{large} vs {small}");
}

#[test]
fn divergence_is_reported_with_the_report() {
    let g = TorusGrid::new(32).unwrap();
    let (u0, v0) = data(g, 5.0);
    let cfg = PicardConfig {
        max_iters: 200,
        ..PicardConfig::new(6.4, 32)
    };
    match iterate(&u0, &v0, &cfg, full()) {
        Err(Error::NoContraction { report }) => {
            assert!(!report.converged);
            assert!(!report.distances.is_empty());
        }
        other => panic!("expected no contraction, got {:?}", other.map(|o| o.report)),
    }
}
