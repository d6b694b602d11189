//! Dispatch of a [`RunConfig`] to its module, with verdicts and output files.
//!
//! Each run writes into its output directory:
//!
//! * `manifest.toml`, the resolved config plus provenance,
//! * `results.csv`, with fixed columns per subcommand,
//! * `summary.csv`, one verdict per row.
//!
//! | subcommand  | results.csv columns |
//! |-------------|---------------------|
//! | simulate    | t,M,Q,E,v_mean |
//! | scaling     | family,N,k,s,lhs,rhs,ratio |
//! | lemmas      | check,n,x,value,bound |
//! | multipliers | kind,k,s,truncation,sup,outer_mode,modulation,dominant_inner,region_terms |
//! | picard      | iteration,distance,contraction_ratio |
//! | norms       | family,mode_range,dilation,member,ratio |
//!
//! A verdict either compares a measurement with an expected value up to a
//! tolerance, or checks it against an upper limit (then `tolerance` is 0 and
//! `residual = measured - expected`).

use std::path::PathBuf;

use nlskdv_core::dynamics::{evolve, ConservedSeries, Couplings, SimConfig};
use nlskdv_core::estimates::{
    bilinear_ratio, calculus_integral, dyadic_envelope, dyadic_profile, fit_scaling, multiplier_sup,
    polynomial_series, predicted_exponent, CounterexampleFamily, CounterexampleSpec, InteractionKind, MultiplierKind,
    MultiplierParams, MultiplierSup, ScalingQuantity, SeriesPolynomial,
};
use nlskdv_core::norms::{strichartz_ensemble, EnsembleSpec, WeightFamily};
use nlskdv_core::picard::{compare_with_dynamics, duhamel_apply, iterate, IterationReport, PicardConfig};
use nlskdv_core::spectral::{forward_transform, forward_transform_real, SpectralField, TorusGrid};
use nlskdv_core::{Complex64, Error};
use rayon::prelude::*;

use crate::config::*;
use crate::error::{HarnessError, Result};
use crate::manifest::{write_manifest, Provenance, RunStatus};
use crate::table::{write_results, Cell, ResultTable};

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub residual: f64,
    pub pass: bool,
    pub reference: String,
}

impl Verdict {
    /// `|measured - expected| <= tolerance`.
    pub fn near(name: &str, measured: f64, expected: f64, tolerance: f64, reference: &str) -> Self {
        let residual = measured - expected;
        Self {
            name: name.into(),
            measured,
            expected,
            tolerance,
            residual,
            pass: residual.abs() <= tolerance,
            reference: reference.into(),
        }
    }

    /// `measured <= limit`.
    pub fn at_most(name: &str, measured: f64, limit: f64, reference: &str) -> Self {
        Self {
            name: name.into(),
            measured,
            expected: limit,
            tolerance: 0.0,
            residual: measured - limit,
            pass: measured <= limit,
            reference: reference.into(),
        }
    }
}

pub const SUMMARY_COLUMNS: [&str; 7] = ["name", "measured", "expected", "tolerance", "residual", "verdict", "reference"];

pub fn summary_table(verdicts: &[Verdict]) -> Result<ResultTable> {
    let mut t = ResultTable::new(&SUMMARY_COLUMNS);
    for v in verdicts {
        let cells = vec![
            v.name.as_str().into(),
            v.measured.into(),
            v.expected.into(),
            v.tolerance.into(),
            v.residual.into(),
            if v.pass { "PASS" } else { "FAIL" }.into(),
            v.reference.as_str().into(),
        ];
        // a non-finite measurement still deserves a row
        if v.measured.is_finite() && v.residual.is_finite() {
            t.push(cells)?;
        } else {
            t.push_flagged(cells)?;
        }
    }
    Ok(t)
}

/// What a module produced. `error` is set when the module failed after
/// producing partial results.
#[derive(Debug)]
pub struct Outcome {
    pub results: ResultTable,
    pub verdicts: Vec<Verdict>,
    pub error: Option<HarnessError>,
}

impl Outcome {
    fn done(results: ResultTable, verdicts: Vec<Verdict>) -> Self {
        Self {
            results,
            verdicts,
            error: None,
        }
    }

    pub fn status(&self) -> RunStatus {
        if self.error.is_some() {
            RunStatus::Error
        } else if self.verdicts.iter().all(|v| v.pass) {
            RunStatus::Pass
        } else {
            RunStatus::Fail
        }
    }
}

/// Runs the module without touching the file system.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    validate(cfg)?;
    match &cfg.parameters {
        Parameters::Simulate(p) => simulate(p),
        Parameters::Scaling(p) => scaling(p),
        Parameters::Lemmas(p) => lemmas(p),
        Parameters::Multipliers(p) => multipliers(p),
        Parameters::Picard(p) => picard(p),
        Parameters::Norms(p) => norms(p, cfg.seed),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub status: RunStatus,
    pub output_dir: PathBuf,
    pub verdicts: Vec<Verdict>,
    pub error: Option<String>,
}

/// Runs `cfg` and writes its files into `cfg.output_dir`. Module errors end up
/// in the manifest and the report; only I/O problems are returned as errors.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let (status, verdicts, error) = match execute(cfg) {
        Ok(out) => {
            let mut status = out.status();
            let mut error = out.error.as_ref().map(|e| e.to_string());
            let written = write_results(&out.results, &dir.join("results.csv"))
                .and_then(|_| write_results(&summary_table(&out.verdicts)?, &dir.join("summary.csv")));
            if let Err(e) = written {
                if matches!(e, HarnessError::Io { .. }) {
                    return Err(e);
                }
                status = RunStatus::Error;
                error = Some(error.map_or(e.to_string(), |prev| format!("{prev}; {e}")));
            }
            (status, out.verdicts, error)
        }
        Err(e) => (RunStatus::Error, Vec::new(), Some(e.to_string())),
    };
    write_manifest(cfg, &Provenance::new(cfg, status, error.clone()), &dir.join("manifest.toml"))?;
    Ok(RunReport {
        status,
        output_dir: dir.clone(),
        verdicts,
        error,
    })
}

/// Smooth initial data with every mode populated, scaled by `amp`.
pub fn smooth_data(grid: TorusGrid, amp: f64) -> (SpectralField, SpectralField) {
    let pts = grid.points();
    let u: Vec<_> = pts
        .iter()
        .map(|&x| Complex64::new(0.5 * x.cos(), 0.3 * (2.0 * x).sin()) * amp / (1.2 - 0.4 * x.sin()))
        .collect();
    let v: Vec<_> = pts
        .iter()
        .map(|&x| amp * (0.4 * (x + 0.3).cos() + 0.2 / (1.5 + x.cos())))
        .collect();
    (
        forward_transform(grid, &u).expect("sizes match"),
        forward_transform_real(grid, &v).expect("sizes match"),
    )
}

/// Low-mode data used for the Picard runs.
pub fn low_mode_data(grid: TorusGrid, amp: f64) -> Result<(SpectralField, SpectralField)> {
    let c = Complex64::new;
    let u = SpectralField::from_modes(grid, &[(1, c(amp, 0.0)), (-2, c(0.0, 0.5 * amp))], false)?;
    let v = SpectralField::from_modes(
        grid,
        &[(1, c(0.5 * amp, 0.2 * amp)), (-1, c(0.5 * amp, -0.2 * amp))],
        true,
    )?;
    Ok((u, v))
}

fn series_table(series: &ConservedSeries) -> Result<ResultTable> {
    let mut t = ResultTable::new(&["t", "M", "Q", "E", "v_mean"]);
    for i in 0..series.len() {
        t.push(vec![
            series.times[i].into(),
            series.mass[i].into(),
            series.momentum[i].into(),
            series.energy[i].into(),
            series.v_mean[i].into(),
        ])?;
    }
    Ok(t)
}

fn simulate(p: &SimulateParams) -> Result<Outcome> {
    let sim = SimConfig {
        alpha: p.alpha,
        beta: p.beta,
        gamma: p.gamma,
        num_modes: p.num_modes as usize,
        dt: p.dt,
        t_final: p.t_final,
        dealias: p.dealias,
        record_every: p.record_every as usize,
        linear: p.linear,
    };
    sim.validate()?;
    let (u0, v0) = smooth_data(sim.grid()?, p.amplitude);
    let series = match evolve(&u0, &v0, &sim) {
        Ok(run) => run.series,
        Err(Error::BlowUp { time, partial }) => {
            let mut t = series_table(&partial)?;
            t.push_flagged(vec![time.into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into()])?;
            return Ok(Outcome {
                results: t,
                verdicts: Vec::new(),
                error: Some(Error::BlowUp { time, partial }.into()),
            });
        }
        Err(e) => return Err(e.into()),
    };
    let drift = ConservedSeries::relative_drift;
    let m0 = series.v_mean[0];
    let mean_drift = series.v_mean.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max);
    let verdicts = vec![
        Verdict::at_most("mass_drift", drift(&series.mass), p.drift_tol, "M = ∫|u|² is conserved"),
        Verdict::at_most(
            "momentum_drift",
            drift(&series.momentum),
            p.drift_tol,
            "Q = ∫ αv² + 2γ Im(u ∂ₓū) is conserved",
        ),
        Verdict::at_most("energy_drift", drift(&series.energy), p.drift_tol, "E is conserved"),
        Verdict::at_most("v_mean_drift", mean_drift, 1e-12, "∫v is conserved"),
    ];
    Ok(Outcome::done(series_table(&series)?, verdicts))
}

fn scaling(p: &ScalingParams) -> Result<Outcome> {
    let family: CounterexampleFamily = p.family.parse()?;
    let measured = p
        .sizes
        .par_iter()
        .map(|&n| bilinear_ratio(&CounterexampleSpec::new(family, n, p.k, p.s)?, p.b))
        .collect::<nlskdv_core::Result<Vec<_>>>()?;
    let mut t = ResultTable::new(&["family", "N", "k", "s", "lhs", "rhs", "ratio"]);
    for (&n, r) in p.sizes.iter().zip(&measured) {
        t.push(vec![
            family.name().into(),
            n.into(),
            p.k.into(),
            p.s.into(),
            r.lhs.into(),
            r.rhs.into(),
            r.ratio.into(),
        ])?;
    }
    let mut verdicts = Vec::new();
    for q in ScalingQuantity::ALL {
        let samples: Vec<(f64, f64)> = p.sizes.iter().zip(&measured).map(|(&n, r)| (n as f64, q.pick(r))).collect();
        let fit = fit_scaling(&samples)?;
        let (expected, formula) = predicted_exponent(family, q, p.k, p.s);
        verdicts.push(Verdict::near(
            &format!("{}_exponent", q.name()),
            fit.exponent,
            expected,
            p.tolerance,
            &format!("{} ~ N^({formula}) at b = 1/2; fit residual {:.3e}", q.name(), fit.residual),
        ));
    }
    Ok(Outcome::done(t, verdicts))
}

const LEMMA_COLUMNS: [&str; 5] = ["check", "n", "x", "value", "bound"];

fn lemmas(p: &LemmasParams) -> Result<Outcome> {
    let mut t = ResultTable::new(&LEMMA_COLUMNS);
    let mut verdicts = Vec::new();

    let shifts: Vec<f64> = (p.a_min_exp..=p.a_max_exp).map(|e| 2f64.powi(e as i32)).collect();
    let integrals = shifts
        .par_iter()
        .map(|&a| calculus_integral(p.theta, p.theta_tilde, a))
        .collect::<nlskdv_core::Result<Vec<_>>>()?;
    let mut ratios = Vec::new();
    for (&a, c) in shifts.iter().zip(&integrals) {
        t.push(vec!["calculus".into(), Cell::Empty, a.into(), c.integral.into(), c.bound.into()])?;
        ratios.push((a, c.ratio));
    }
    let fit = fit_scaling(&ratios)?;
    verdicts.push(Verdict::near(
        "calculus_ratio_slope",
        fit.exponent,
        0.0,
        p.tolerance,
        "∫ ⟨κ⟩^-θ ⟨κ-a⟩^-θ̃ dκ ≲ ln(1+⟨a⟩)/⟨a⟩^(θ+θ̃-1)",
    ));
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &(_, r)| (lo.min(r), hi.max(r)));
    verdicts.push(Verdict::at_most("calculus_ratio_spread", hi / lo, 2.0, "ratio stays within a factor 2"));

    let cubic = polynomial_series(
        SeriesPolynomial::Cubic {
            e: p.cubic_e,
            f: p.cubic_f,
            g: p.cubic_g,
        },
        p.cubic_theta,
        p.cubic_range as u64,
    )?;
    t.push(vec![
        "cubic".into(),
        Cell::Empty,
        (p.cubic_range as f64).into(),
        cubic.partial_sum.into(),
        cubic.tail_bound.into(),
    ])?;
    verdicts.push(Verdict::at_most(
        "cubic_tail",
        cubic.tail_bound,
        1e-2,
        "Σ ⟨x³+ex²+fx+g⟩^-θ < ∞ for θ > 1/3",
    ));

    let linear = p
        .linear_n1
        .par_iter()
        .map(|&n1| polynomial_series(SeriesPolynomial::Linear { n1, r: 0.0 }, p.linear_theta, 0))
        .collect::<nlskdv_core::Result<Vec<_>>>()?;
    let mut sums = Vec::new();
    for (&n1, s) in p.linear_n1.iter().zip(&linear) {
        t.push(vec!["linear".into(), n1.into(), Cell::Empty, s.partial_sum.into(), s.tail_bound.into()])?;
        sums.push((n1.unsigned_abs() as f64, s.partial_sum));
    }
    sums.sort_by(|a, b| a.0.total_cmp(&b.0));
    let fit = fit_scaling(&sums)?;
    verdicts.push(Verdict::near(
        "linear_sum_slope",
        fit.exponent,
        0.0,
        p.tolerance,
        "Σ_{|n₁|/2≤|x|≤2|n₁|} ⟨2n₁x - n₁² + r⟩^-θ ≲ 1 uniformly in n₁",
    ));

    let ladder = 0.95;
    let profiles = p
        .dyadic_n
        .par_iter()
        .map(|&n| dyadic_profile(InteractionKind::Uv, n, p.epsilon))
        .collect::<nlskdv_core::Result<Vec<_>>>()?;
    for (&n, prof) in p.dyadic_n.iter().zip(&profiles) {
        for &(m, meas) in prof {
            t.push(vec!["dyadic_uv".into(), n.into(), m.into(), meas.into(), Cell::Empty])?;
        }
        let fit = fit_scaling(prof)?;
        verdicts.push(Verdict::at_most(
            &format!("dyadic_uv_slope_n{n}"),
            fit.exponent,
            ladder,
            "|{|μ| ~ M} ∩ resonant set| ≲ M^(1-ε)",
        ));
    }
    let env = dyadic_envelope(InteractionKind::Du2, &p.dyadic_n, p.epsilon)?;
    for (&n, &(m, meas)) in p.dyadic_n.iter().zip(&env) {
        t.push(vec!["dyadic_du2_envelope".into(), n.into(), m.into(), meas.into(), Cell::Empty])?;
    }
    let fit = fit_scaling(&env)?;
    verdicts.push(Verdict::at_most(
        "dyadic_du2_envelope_slope",
        fit.exponent,
        ladder,
        "|{|μ| ~ M} ∩ resonant set| ≲ M^(1-ε)",
    ));
    Ok(Outcome::done(t, verdicts))
}

const MULTIPLIER_COLUMNS: [&str; 9] = [
    "kind",
    "k",
    "s",
    "truncation",
    "sup",
    "outer_mode",
    "modulation",
    "dominant_inner",
    "region_terms",
];

fn multipliers(p: &MultipliersParams) -> Result<Outcome> {
    let kinds = p
        .kinds
        .iter()
        .map(|k| k.parse::<MultiplierKind>())
        .collect::<nlskdv_core::Result<Vec<_>>>()?;
    let jobs: Vec<(MultiplierKind, i64)> = kinds
        .iter()
        .flat_map(|&k| [(k, p.truncation), (k, 2 * p.truncation)])
        .collect();
    let sups: Vec<MultiplierSup> = jobs
        .par_iter()
        .map(|&(kind, trunc)| {
            let params = MultiplierParams {
                small_threshold: p.small_threshold,
                ..MultiplierParams::new(p.k, p.s, p.one_minus, trunc)
            };
            multiplier_sup(kind, &params)
        })
        .collect::<nlskdv_core::Result<Vec<_>>>()?;
    let mut t = ResultTable::new(&MULTIPLIER_COLUMNS);
    for (&(kind, trunc), m) in jobs.iter().zip(&sups) {
        t.push(vec![
            kind.name().into(),
            p.k.into(),
            p.s.into(),
            trunc.into(),
            m.sup_value.into(),
            m.argmax.outer_mode.into(),
            m.argmax.modulation.into(),
            m.argmax.dominant_inner.into(),
            m.argmax.region_terms.into(),
        ])?;
    }
    let verdicts = kinds
        .iter()
        .zip(sups.chunks(2))
        .map(|(kind, pair)| {
            let (a, b) = (pair[0].sup_value, pair[1].sup_value);
            Verdict::at_most(
                &format!("{}_truncation_change", kind.name()),
                a.max(b) / a.min(b),
                2.0,
                "reduced multiplier sum is bounded: doubling the truncation changes the sup by at most 2x",
            )
        })
        .collect();
    Ok(Outcome::done(t, verdicts))
}

fn report_table(report: &IterationReport) -> Result<ResultTable> {
    let mut t = ResultTable::new(&["iteration", "distance", "contraction_ratio"]);
    for (i, &d) in report.distances.iter().enumerate() {
        let ratio = if i == 0 {
            Cell::Empty
        } else {
            report.contraction_ratios[i - 1].into()
        };
        let cells = vec![(i + 1).into(), d.into(), ratio];
        if d.is_finite() && report.contraction_ratios.get(i.wrapping_sub(1)).is_none_or(|r| r.is_finite()) {
            t.push(cells)?;
        } else {
            t.push_flagged(cells)?;
        }
    }
    Ok(t)
}

fn picard(p: &PicardParams) -> Result<Outcome> {
    let grid = TorusGrid::new(p.num_modes as usize)?;
    let (u0, v0) = low_mode_data(grid, p.amplitude)?;
    let cfg = PicardConfig {
        k: p.k,
        s: p.s,
        max_iters: p.max_iters as usize,
        tol: p.tol,
        dealias: p.dealias,
        ..PicardConfig::new(p.t_final, p.num_time_samples as usize)
    };
    let couplings = Couplings::new(p.alpha, p.beta, p.gamma);
    let out = match iterate(&u0, &v0, &cfg, couplings) {
        Ok(out) => out,
        Err(Error::NoContraction { report }) => {
            return Ok(Outcome {
                results: report_table(&report)?,
                verdicts: Vec::new(),
                error: Some(Error::NoContraction { report }.into()),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let again = duhamel_apply(&out.fixed_point, &u0, &v0, &cfg, couplings)?;
    let defect = again.distance(&out.fixed_point, p.k, p.s)?;
    let cross = compare_with_dynamics(&out.fixed_point, &cfg, couplings)?;
    let verdicts = vec![
        Verdict::at_most(
            "converged",
            if out.report.converged { 0.0 } else { 1.0 },
            0.0,
            "Picard iteration converges within max_iters",
        ),
        Verdict::at_most(
            "max_contraction_ratio",
            out.report.max_ratio(),
            0.5,
            "the Duhamel map is a contraction for small data and short time",
        ),
        Verdict::at_most(
            "iterations_used",
            out.report.iterations_used as f64,
            10.0,
            "small data converge in at most 10 iterations",
        ),
        Verdict::at_most("reapplication_defect", defect, 2.0 * p.tol, "fixed point solves the integral equation"),
        Verdict::at_most(
            "cross_solver_distance",
            cross,
            p.cross_tol,
            "sup-in-time H^k x H^s gap to the ETDRK4 solution",
        ),
    ];
    Ok(Outcome::done(report_table(&out.report)?, verdicts))
}

fn norms(p: &NormsParams, seed: u64) -> Result<Outcome> {
    let mut t = ResultTable::new(&["family", "mode_range", "dilation", "member", "ratio"]);
    let mut verdicts = Vec::new();
    for (family, name, exponent) in [
        (WeightFamily::Schrodinger, "schrodinger", "L⁴ ≲ X^(0,3/8)"),
        (WeightFamily::Airy, "airy", "L⁴ ≲ Y^(0,1/3)"),
    ] {
        let mut maxima = Vec::new();
        for &range in &p.mode_ranges {
            for &dil in &p.dilations {
                let spec = EnsembleSpec {
                    members: p.members as usize,
                    modes_per_member: p.modes_per_member as usize,
                    mode_range: range,
                    max_offset: p.max_offset,
                    seed,
                };
                let ratios = strichartz_ensemble(&spec, family, dil)?;
                for (i, &r) in ratios.iter().enumerate() {
                    t.push(vec![name.into(), range.into(), dil.into(), i.into(), r.into()])?;
                }
                maxima.push(ratios.iter().copied().fold(0.0, f64::max));
            }
        }
        let (lo, hi) = maxima.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &m| (lo.min(m), hi.max(m)));
        verdicts.push(Verdict::at_most(
            &format!("{name}_max_spread"),
            hi / lo,
            p.spread_tol,
            &format!("{exponent}: ensemble maxima stay within the accepted factor"),
        ));
    }
    Ok(Outcome::done(t, verdicts))
}
