//! Pseudo-spectral ETDRK4 solver for the coupled system with conservation monitors.
//!
//! In Fourier variables the system reads `û' = L_u û + N_u`, `v̂' = L_v v̂ + N_v`
//! with `L_u(n) = -in²`, `L_v(n) = in³` and
//!
//! ```text
//! N_u = -i F[α u v + β |u|² u],    N_v = i n (γ F[|u|²] - F[v²]/2).
//! ```
//!
//! Conserved quantities, with the sign of the momentum term fixed so that
//! `Q` is constant along the flow:
//!
//! ```text
//! M = ∫ |u|²
//! Q = ∫ α v² + 2γ Im(u ∂ₓū)               = 2π(α Σ|v̂|² - 2γ Σ n|û|²)
//! E = ∫ αγ v|u|² - (α/6) v³ + (βγ/2)|u|⁴ + (α/2)|∂ₓv|² + γ|∂ₓu|²
//! ```

mod etdrk4;

pub use etdrk4::{phi123, EtdCoefficients};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::spectral::{dealias_in_place, forward_transform, inverse_transform, SpectralField, TorusGrid};
use crate::{Error, Result};

/// Coefficient magnitude treated as blow-up.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Coefficient of the uncoupled `½∂ₓ(v²)` term; 1 for the coupled system.
    pub self_interaction: f64,
}

impl Couplings {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            self_interaction: 1.0,
        }
    }

    /// No nonlinear term at all: both fields evolve by their free groups.
    pub fn linear() -> Self {
        Self {
            self_interaction: 0.0,
            ..Self::new(0.0, 0.0, 0.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub num_modes: usize,
    pub dt: f64,
    pub t_final: f64,
    pub dealias: bool,
    pub record_every: usize,
    /// Drops every nonlinear term, the `½∂ₓ(v²)` self-interaction included.
    /// With `alpha = beta = gamma = 0` alone, `v` still follows KdV.
    pub linear: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_modes < 16 || self.num_modes % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "num_modes must be even and at least 16, got {}",
                self.num_modes
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= self.dt && self.t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "t_final = {} must be at least dt = {}",
                self.t_final, self.dt
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument("record_every must be at least 1".into()));
        }
        for (name, x) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !x.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    /// Couplings of the tendency; all zero for a linear run.
    pub fn couplings(&self) -> Couplings {
        if self.linear {
            Couplings::linear()
        } else {
            Couplings::new(self.alpha, self.beta, self.gamma)
        }
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.num_modes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: SpectralField,
    pub v: SpectralField,
    pub t: f64,
}

impl State {
    pub fn new(u: SpectralField, v: SpectralField, t: f64) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::InvalidArgument("u and v live on different grids".into()));
        }
        if !v.is_real() {
            return Err(Error::InvalidArgument("v must carry the reality flag".into()));
        }
        Ok(Self { u, v, t })
    }

    pub fn grid(&self) -> TorusGrid {
        self.u.grid()
    }

    /// Largest imaginary part of `v` in physical space.
    pub fn v_imag_max(&self) -> f64 {
        inverse_transform(&self.v).iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }
}

/// `(L_u, L_v)` symbols in FFT order.
pub fn linear_symbols(grid: TorusGrid) -> (Vec<Complex64>, Vec<Complex64>) {
    (0..grid.num_modes())
        .map(|k| {
            let n = grid.mode_of(k) as f64;
            (Complex64::new(0.0, -n * n), Complex64::new(0.0, n * n * n))
        })
        .unzip()
}

/// Tendencies `(N_u, N_v)` from raw coefficient arrays.
pub(crate) fn tendencies(
    grid: TorusGrid,
    u: &[Complex64],
    v: &[Complex64],
    c: Couplings,
    dealias: bool,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = grid.num_modes();
    let zero = Complex64::new(0.0, 0.0);
    let (mut uc, mut vc) = (u.to_vec(), v.to_vec());
    if dealias {
        dealias_in_place(grid, &mut uc);
        dealias_in_place(grid, &mut vc);
    }
    let up = inverse_transform(&SpectralField::from_coeffs_unchecked(grid, uc, false));
    let vp: Vec<f64> = inverse_transform(&SpectralField::from_coeffs_unchecked(grid, vc, true))
        .iter()
        .map(|z| z.re)
        .collect();

    let mut fu = vec![zero; n];
    let mut g = vec![zero; n];
    for j in 0..n {
        let m2 = up[j].norm_sqr();
        fu[j] = up[j] * (c.alpha * vp[j] + c.beta * m2);
        g[j] = Complex64::new(c.gamma * m2 - 0.5 * c.self_interaction * vp[j] * vp[j], 0.0);
    }
    let mut nu = forward_transform(grid, &fu).expect("length matches").into_coeffs();
    let mut nv = forward_transform(grid, &g).expect("length matches").into_coeffs();
    let nyq = grid.index_of(grid.min_mode()).unwrap();
    for k in 0..n {
        nu[k] *= Complex64::new(0.0, -1.0);
        nv[k] *= Complex64::new(0.0, grid.mode_of(k) as f64);
    }
    nv[nyq] = zero;
    if dealias {
        dealias_in_place(grid, &mut nu);
        dealias_in_place(grid, &mut nv);
    }
    (nu, nv)
}

/// `(N_u, N_v)`; `N_v` carries the reality flag.
pub fn nonlinearity(state: &State, config: &SimConfig) -> (SpectralField, SpectralField) {
    let grid = state.grid();
    let (nu, nv) = tendencies(grid, state.u.coeffs(), state.v.coeffs(), config.couplings(), config.dealias);
    let mut nv = SpectralField::from_coeffs_unchecked(grid, nv, true);
    nv.symmetrize();
    (SpectralField::from_coeffs_unchecked(grid, nu, false), nv)
}

/// Precomputed ETDRK4 stepper for a fixed grid, step and coupling set.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: TorusGrid,
    h: f64,
    couplings: Couplings,
    dealias: bool,
    cu: EtdCoefficients,
    cv: EtdCoefficients,
}

impl Stepper {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        Self::with_step(config.grid()?, config.dt, config.couplings(), config.dealias)
    }

    /// Stepper with an arbitrary nonzero step (negative steps run backwards).
    pub fn with_step(grid: TorusGrid, h: f64, couplings: Couplings, dealias: bool) -> Result<Self> {
        if h == 0.0 || !h.is_finite() {
            return Err(Error::InvalidArgument(format!("step must be finite and nonzero, got {h}")));
        }
        let (lu, lv) = linear_symbols(grid);
        Ok(Self {
            grid,
            h,
            couplings,
            dealias,
            cu: EtdCoefficients::new(&lu, h),
            cv: EtdCoefficients::new(&lv, h),
        })
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    pub fn step(&self, state: &State) -> Result<State> {
        if state.grid() != self.grid {
            return Err(Error::InvalidArgument("state grid does not match stepper".into()));
        }
        let g = self.grid;
        let n = g.num_modes();
        let (cu, cv) = (&self.cu, &self.cv);
        let nl = |u: &[Complex64], v: &[Complex64]| tendencies(g, u, v, self.couplings, self.dealias);
        let (u, v) = (state.u.coeffs(), state.v.coeffs());

        let (nu0, nv0) = nl(u, v);
        let a_u: Vec<_> = (0..n).map(|k| cu.e_half[k] * u[k] + cu.q[k] * nu0[k]).collect();
        let a_v: Vec<_> = (0..n).map(|k| cv.e_half[k] * v[k] + cv.q[k] * nv0[k]).collect();
        let (nua, nva) = nl(&a_u, &a_v);
        let b_u: Vec<_> = (0..n).map(|k| cu.e_half[k] * u[k] + cu.q[k] * nua[k]).collect();
        let b_v: Vec<_> = (0..n).map(|k| cv.e_half[k] * v[k] + cv.q[k] * nva[k]).collect();
        let (nub, nvb) = nl(&b_u, &b_v);
        let c_u: Vec<_> = (0..n)
            .map(|k| cu.e_half[k] * a_u[k] + cu.q[k] * (nub[k] * 2.0 - nu0[k]))
            .collect();
        let c_v: Vec<_> = (0..n)
            .map(|k| cv.e_half[k] * a_v[k] + cv.q[k] * (nvb[k] * 2.0 - nv0[k]))
            .collect();
        let (nuc, nvc) = nl(&c_u, &c_v);

        let new_u: Vec<_> = (0..n)
            .map(|k| cu.e[k] * u[k] + cu.f1[k] * nu0[k] + cu.f2[k] * (nua[k] + nub[k]) * 2.0 + cu.f3[k] * nuc[k])
            .collect();
        let new_v: Vec<_> = (0..n)
            .map(|k| cv.e[k] * v[k] + cv.f1[k] * nv0[k] + cv.f2[k] * (nva[k] + nvb[k]) * 2.0 + cv.f3[k] * nvc[k])
            .collect();

        let t = state.t + self.h;
        let bad = |c: &Complex64| !c.re.is_finite() || !c.im.is_finite() || c.norm() > BLOWUP_THRESHOLD;
        if new_u.iter().any(bad) || new_v.iter().any(bad) {
            return Err(Error::BlowUp {
                time: t,
                partial: Box::default(),
            });
        }
        let mut v = SpectralField::from_coeffs_unchecked(g, new_v, true);
        v.coeffs_mut()[g.index_of(g.min_mode()).unwrap()] = Complex64::new(0.0, 0.0);
        v.symmetrize();
        Ok(State {
            u: SpectralField::from_coeffs_unchecked(g, new_u, false),
            v,
            t,
        })
    }
}

/// One ETDRK4 step of size `config.dt`.
pub fn step(state: &State, config: &SimConfig) -> Result<State> {
    Stepper::new(config)?.step(state)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conserved {
    /// `M`
    pub mass: f64,
    /// `Q`
    pub momentum: f64,
    /// `E`
    pub energy: f64,
    pub v_mean: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConservedSeries {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub momentum: Vec<f64>,
    pub energy: Vec<f64>,
    pub v_mean: Vec<f64>,
}

impl ConservedSeries {
    pub fn push(&mut self, t: f64, c: Conserved) {
        self.times.push(t);
        self.mass.push(c.mass);
        self.momentum.push(c.momentum);
        self.energy.push(c.energy);
        self.v_mean.push(c.v_mean);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max_t |x(t) - x(0)| / |x(0)|`, absolute when `x(0) = 0`.
    pub fn relative_drift(values: &[f64]) -> f64 {
        let Some(&x0) = values.first() else {
            return 0.0;
        };
        let scale = if x0 == 0.0 { 1.0 } else { x0.abs() };
        values.iter().map(|x| (x - x0).abs() / scale).fold(0.0, f64::max)
    }

    /// Largest relative drift of `M`, `Q` and `E`.
    pub fn max_relative_drift(&self) -> f64 {
        Self::relative_drift(&self.mass)
            .max(Self::relative_drift(&self.momentum))
            .max(Self::relative_drift(&self.energy))
    }
}

/// Samples of `field` on the `factor·N` grid (zero-padded spectrum).
fn padded_samples(field: &SpectralField, factor: usize) -> Vec<Complex64> {
    let g = field.grid();
    let big = TorusGrid::new(g.num_modes() * factor).expect("padded grid is valid");
    let mut coeffs = vec![Complex64::new(0.0, 0.0); big.num_modes()];
    for (n, c) in field.modes() {
        coeffs[big.index_of(n).unwrap()] = c;
    }
    inverse_transform(&SpectralField::from_coeffs_unchecked(big, coeffs, field.is_real()))
}

pub fn conserved(state: &State, config: &SimConfig) -> Conserved {
    let c = Couplings::new(config.alpha, config.beta, config.gamma);
    let (mut su2, mut sv2, mut snu2, mut sn2u2, mut sn2v2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((n, u), (_, v)) in state.u.modes().zip(state.v.modes()) {
        let nf = n as f64;
        su2 += u.norm_sqr();
        sv2 += v.norm_sqr();
        snu2 += nf * u.norm_sqr();
        sn2u2 += nf * nf * u.norm_sqr();
        sn2v2 += nf * nf * v.norm_sqr();
    }
    let two_pi = 2.0 * PI;
    let mass = two_pi * su2;
    let momentum = two_pi * (c.alpha * sv2 - 2.0 * c.gamma * snu2);

    let up = padded_samples(&state.u, 2);
    let vp = padded_samples(&state.v, 2);
    let hx = two_pi / up.len() as f64;
    let mut higher = 0.0;
    for (u, v) in up.iter().zip(&vp) {
        let m2 = u.norm_sqr();
        let v = v.re;
        higher += c.alpha * c.gamma * v * m2 - c.alpha / 6.0 * v * v * v + 0.5 * c.beta * c.gamma * m2 * m2;
    }
    let energy = higher * hx + two_pi * (0.5 * c.alpha * sn2v2 + c.gamma * sn2u2);
    Conserved {
        mass,
        momentum,
        energy,
        v_mean: state.v.coeff(0).re,
    }
}

#[derive(Debug, Clone)]
pub struct Evolution {
    /// States at the recorded times (the initial state first).
    pub snapshots: Vec<State>,
    pub series: ConservedSeries,
    pub final_state: State,
}

/// Integrates to `t_final` with `ceil(t_final/dt)` equal steps of size at most
/// `dt`, recording every `record_every` steps and at the final time.
pub fn evolve(u0: &SpectralField, v0: &SpectralField, config: &SimConfig) -> Result<Evolution> {
    config.validate()?;
    let grid = config.grid()?;
    if u0.grid() != grid {
        return Err(Error::InvalidArgument("initial data grid does not match num_modes".into()));
    }
    let steps = (config.t_final / config.dt - 1e-9).ceil().max(1.0) as usize;
    let h = config.t_final / steps as f64;
    let stepper = Stepper::with_step(grid, h, config.couplings(), config.dealias)?;

    let mut state = State::new(u0.clone(), v0.clone(), 0.0)?;
    let mut series = ConservedSeries::default();
    let mut snapshots = vec![state.clone()];
    series.push(0.0, conserved(&state, config));
    for i in 1..=steps {
        state = match stepper.step(&state) {
            Ok(s) => s,
            Err(Error::BlowUp { time, .. }) => {
                return Err(Error::BlowUp {
                    time,
                    partial: Box::new(series),
                })
            }
            Err(e) => return Err(e),
        };
        if i == steps {
            state.t = config.t_final;
        }
        if i % config.record_every == 0 || i == steps {
            series.push(state.t, conserved(&state, config));
            snapshots.push(state.clone());
        }
    }
    Ok(Evolution {
        snapshots,
        series,
        final_state: state,
    })
}
