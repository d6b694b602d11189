//! Fixed-point iteration for the Duhamel form of the coupled system.
//!
//! With `U(t)` multiplying `û(n)` by `e^{-in²t}` and `V(t)` multiplying `v̂(n)` by
//! `e^{in³t}`, the map is
//!
//! ```text
//! Φ₁(u,v)(t) = U(t) u₀ + ∫₀ᵗ U(t-t') N_u(t') dt'
//! Φ₂(u,v)(t) = V(t) v₀ + ∫₀ᵗ V(t-t') N_v(t') dt'
//! ```
//!
//! with `N_u`, `N_v` the tendencies of [`crate::dynamics::nonlinearity`]. The
//! integrals are evaluated in the interaction picture, `U(t)∫₀ᵗ U(-t')N_u dt'`,
//! by the cumulative trapezoid rule on a uniform time grid. No time cutoffs are
//! applied: on the fixed window `[0,T]` they are identically one.

use num_complex::Complex64;

use crate::dynamics::{linear_symbols, tendencies, Couplings, State, Stepper};
use crate::norms::WeightFamily;
use crate::spectral::{SpectralField, TorusGrid};
use crate::{Error, Result};

/// Multiplies `û(n)` by `e^{-in²t}` (Schrödinger) or `e^{in³t}` (Airy).
pub fn free_propagator(field: &SpectralField, t: f64, family: WeightFamily) -> SpectralField {
    field.map_symbol(|n| {
        let n = n as f64;
        let phase = match family {
            WeightFamily::Schrodinger => -n * n * t,
            WeightFamily::Airy => n * n * n * t,
        };
        Complex64::from_polar(1.0, phase)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    pub t_final: f64,
    /// Number of time steps; the trajectories carry `num_time_samples + 1` samples.
    pub num_time_samples: usize,
    pub k: f64,
    pub s: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub dealias: bool,
}

impl PicardConfig {
    pub fn new(t_final: f64, num_time_samples: usize) -> Self {
        Self {
            t_final,
            num_time_samples,
            k: 1.0,
            s: 1.0,
            max_iters: 50,
            tol: 1e-12,
            dealias: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!("t_final must be positive, got {}", self.t_final)));
        }
        if self.num_time_samples < 16 {
            return Err(Error::InvalidArgument(format!(
                "num_time_samples must be at least 16, got {}",
                self.num_time_samples
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if !(self.k.is_finite() && self.s.is_finite()) {
            return Err(Error::InvalidArgument("k and s must be finite".into()));
        }
        Ok(())
    }

    pub fn time_step(&self) -> f64 {
        self.t_final / self.num_time_samples as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let h = self.time_step();
        (0..=self.num_time_samples).map(|j| j as f64 * h).collect()
    }
}

/// Time-sampled pair `(u(t_j), v(t_j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub u: Vec<SpectralField>,
    pub v: Vec<SpectralField>,
}

impl Trajectory {
    /// `(U(t_j)u₀, V(t_j)v₀)`.
    pub fn free(u0: &SpectralField, v0: &SpectralField, times: &[f64]) -> Self {
        Self {
            times: times.to_vec(),
            u: times.iter().map(|&t| free_propagator(u0, t, WeightFamily::Schrodinger)).collect(),
            v: times.iter().map(|&t| free_propagator(v0, t, WeightFamily::Airy)).collect(),
        }
    }

    pub fn zeros(grid: TorusGrid, times: &[f64]) -> Self {
        Self {
            times: times.to_vec(),
            u: vec![SpectralField::zeros(grid, false); times.len()],
            v: vec![SpectralField::zeros(grid, true); times.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `sup_j ‖Δu(t_j)‖_{H^k} + ‖Δv(t_j)‖_{H^s}`.
    pub fn distance(&self, other: &Self, k: f64, s: f64) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let mut sup = 0.0f64;
        for j in 0..self.len() {
            let du = difference(&self.u[j], &other.u[j])?;
            let dv = difference(&self.v[j], &other.v[j])?;
            let d = du.sobolev_norm(k) + dv.sobolev_norm(s);
            if d.is_nan() {
                return Ok(f64::NAN);
            }
            sup = sup.max(d);
        }
        Ok(sup)
    }
}

fn difference(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    if a.grid() != b.grid() {
        return Err(Error::InvalidArgument("fields live on different grids".into()));
    }
    let c = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x - y).collect();
    Ok(SpectralField::from_coeffs_unchecked(a.grid(), c, a.is_real() && b.is_real()))
}

/// Duhamel trajectories for prescribed forcing samples `(F_u(t_j), F_v(t_j))`:
/// `u(t_j) = U(t_j)[u₀ + T_j(U(-·)F_u)]`, `T_j` the cumulative trapezoid rule.
pub fn duhamel_forced(
    u0: &SpectralField,
    v0: &SpectralField,
    times: &[f64],
    forcing_u: &[Vec<Complex64>],
    forcing_v: &[Vec<Complex64>],
) -> Result<Trajectory> {
    let grid = u0.grid();
    if v0.grid() != grid {
        return Err(Error::InvalidArgument("u0 and v0 live on different grids".into()));
    }
    if forcing_u.len() != times.len() || forcing_v.len() != times.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            got: forcing_u.len().min(forcing_v.len()),
        });
    }
    let n = grid.num_modes();
    if forcing_u.iter().chain(forcing_v).any(|f| f.len() != n) {
        return Err(Error::InvalidArgument("forcing arrays do not match the grid".into()));
    }
    let (lu, lv) = linear_symbols(grid);
    let zero = Complex64::new(0.0, 0.0);
    let pull = |l: &[Complex64], f: &[Complex64], t: f64| -> Vec<Complex64> {
        l.iter().zip(f).map(|(l, f)| (-l * t).exp() * f).collect()
    };

    let mut acc_u = u0.coeffs().to_vec();
    let mut acc_v = v0.coeffs().to_vec();
    let mut prev_u = vec![zero; n];
    let mut prev_v = vec![zero; n];
    let mut out = Trajectory {
        times: times.to_vec(),
        u: Vec::with_capacity(times.len()),
        v: Vec::with_capacity(times.len()),
    };
    for (j, &t) in times.iter().enumerate() {
        let gu = pull(&lu, &forcing_u[j], t);
        let gv = pull(&lv, &forcing_v[j], t);
        if j > 0 {
            let half = 0.5 * (t - times[j - 1]);
            for k in 0..n {
                acc_u[k] += (gu[k] + prev_u[k]) * half;
                acc_v[k] += (gv[k] + prev_v[k]) * half;
            }
        }
        let push = |l: &[Complex64], a: &[Complex64]| -> Vec<Complex64> {
            l.iter().zip(a).map(|(l, a)| (l * t).exp() * a).collect()
        };
        out.u.push(SpectralField::from_coeffs_unchecked(grid, push(&lu, &acc_u), false));
        let mut v = SpectralField::from_coeffs_unchecked(grid, push(&lv, &acc_v), true);
        v.symmetrize();
        out.v.push(v);
        prev_u = gu;
        prev_v = gv;
    }
    Ok(out)
}

/// One application of the Duhamel map to a sampled trajectory.
pub fn duhamel_apply(
    traj: &Trajectory,
    u0: &SpectralField,
    v0: &SpectralField,
    config: &PicardConfig,
    couplings: Couplings,
) -> Result<Trajectory> {
    config.validate()?;
    let grid = u0.grid();
    if traj.len() != config.num_time_samples + 1 {
        return Err(Error::LengthMismatch {
            expected: config.num_time_samples + 1,
            got: traj.len(),
        });
    }
    if traj.u.iter().chain(&traj.v).chain([v0]).any(|f| f.grid() != grid) {
        return Err(Error::InvalidArgument("trajectory grid does not match the data".into()));
    }
    let (fu, fv): (Vec<_>, Vec<_>) = traj
        .u
        .iter()
        .zip(&traj.v)
        .map(|(u, v)| tendencies(grid, u.coeffs(), v.coeffs(), couplings, config.dealias))
        .unzip();
    duhamel_forced(u0, v0, &traj.times, &fu, &fv)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationReport {
    /// `distances[i]` is the sup-in-time `H^k × H^s` gap between iterates `i+1` and `i`.
    pub distances: Vec<f64>,
    /// `distances[i+1] / distances[i]` for every `i` with `distances[i] > 0`.
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
    pub iterations_used: usize,
}

impl IterationReport {
    pub fn max_ratio(&self) -> f64 {
        self.contraction_ratios.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub report: IterationReport,
    pub fixed_point: Trajectory,
}

/// Iterates the Duhamel map from the free evolution until successive iterates
/// are within `tol`. Three consecutive growing distances (or a non-finite one)
/// abort with [`Error::NoContraction`].
pub fn iterate(
    u0: &SpectralField,
    v0: &SpectralField,
    config: &PicardConfig,
    couplings: Couplings,
) -> Result<PicardOutcome> {
    config.validate()?;
    if u0.grid() != v0.grid() {
        return Err(Error::InvalidArgument("u0 and v0 live on different grids".into()));
    }
    if !v0.is_real() {
        return Err(Error::InvalidArgument("v0 must carry the reality flag".into()));
    }
    let mut report = IterationReport::default();
    let mut current = Trajectory::free(u0, v0, &config.times());
    let mut growth = 0;
    for it in 1..=config.max_iters {
        let next = duhamel_apply(&current, u0, v0, config, couplings)?;
        let d = next.distance(&current, config.k, config.s)?;
        if let Some(&prev) = report.distances.last() {
            if prev > 0.0 {
                report.contraction_ratios.push(d / prev);
            }
            growth = if d > prev { growth + 1 } else { 0 };
        }
        report.distances.push(d);
        report.iterations_used = it;
        current = next;
        if !d.is_finite() || growth >= 3 {
            return Err(Error::NoContraction {
                report: Box::new(report),
            });
        }
        if d < config.tol {
            report.converged = true;
            break;
        }
    }
    Ok(PicardOutcome {
        report,
        fixed_point: current,
    })
}

/// Sup over the sample times of the `H^k × H^s` distance between the fixed point
/// and an ETDRK4 run with step `(T/num_time_samples)/10`.
pub fn compare_with_dynamics(fixed_point: &Trajectory, config: &PicardConfig, couplings: Couplings) -> Result<f64> {
    config.validate()?;
    if fixed_point.len() != config.num_time_samples + 1 {
        return Err(Error::LengthMismatch {
            expected: config.num_time_samples + 1,
            got: fixed_point.len(),
        });
    }
    let grid = fixed_point.u[0].grid();
    let stepper = Stepper::with_step(grid, config.time_step() / 10.0, couplings, config.dealias)?;
    let mut state = State::new(fixed_point.u[0].clone(), fixed_point.v[0].clone(), 0.0)?;
    let mut sup = 0.0f64;
    for j in 1..fixed_point.len() {
        for _ in 0..10 {
            state = stepper.step(&state)?;
        }
        let d = difference(&state.u, &fixed_point.u[j])?.sobolev_norm(config.k)
            + difference(&state.v, &fixed_point.v[j])?.sobolev_norm(config.s);
        sup = sup.max(d);
    }
    Ok(sup)
}

/// Doubles `T` from `config.t_final` until the iteration stops contracting
/// (error or no convergence within `max_iters`). Returns the first failing `T`,
/// or `None` after `max_doublings` successes.
pub fn first_failing_time(
    u0: &SpectralField,
    v0: &SpectralField,
    config: &PicardConfig,
    couplings: Couplings,
    max_doublings: usize,
) -> Result<Option<f64>> {
    let mut cfg = *config;
    for _ in 0..=max_doublings {
        match iterate(u0, v0, &cfg, couplings) {
            Ok(out) if out.report.converged && out.report.max_ratio() < 1.0 => cfg.t_final *= 2.0,
            Ok(_) | Err(Error::NoContraction { .. }) => return Ok(Some(cfg.t_final)),
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn propagator_phases() {
        let g = TorusGrid::new(16).unwrap();
        let u = SpectralField::from_modes(g, &[(2, c(1.0, 0.0))], false).unwrap();
        let out = free_propagator(&u, 0.3, WeightFamily::Schrodinger);
        assert!((out.coeff(2) - Complex64::from_polar(1.0, -1.2)).norm() < 1e-15);
        let out = free_propagator(&u, 0.3, WeightFamily::Airy);
        assert!((out.coeff(2) - Complex64::from_polar(1.0, 2.4)).norm() < 1e-15);
    }

    #[test]
    fn zero_data_is_a_fixed_point() {
        let g = TorusGrid::new(16).unwrap();
        let cfg = PicardConfig::new(0.1, 16);
        let out = iterate(
            &SpectralField::zeros(g, false),
            &SpectralField::zeros(g, true),
            &cfg,
            Couplings::new(1.0, 1.0, 1.0),
        )
        .unwrap();
        assert!(out.report.converged);
        assert_eq!(out.report.iterations_used, 1);
        assert_eq!(out.report.distances, vec![0.0]);
    }

    #[test]
    fn config_checks() {
        assert!(PicardConfig::new(0.1, 15).validate().is_err());
        assert!(PicardConfig::new(0.0, 16).validate().is_err());
        assert!(PicardConfig { tol: 0.0, ..PicardConfig::new(0.1, 16) }.validate().is_err());
    }
}
