//! Sparse space-time spectra `f̂(n, τ)`.
//!
//! Each active mode carries a window of samples on the global lattice
//! `τ_m = (m + φ)Δτ`. With `φ = 1/2` the samples are midpoints of the cells
//! `[mΔτ, (m+1)Δτ]`, and every τ integral in the crate is the midpoint rule
//! `Σ_m g(τ_m) Δτ`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

const PHASE_TOL: f64 = 1e-12;
/// Largest `(x samples) × (t samples)` grid `lebesgue_norm` will build.
const MAX_SAMPLING_POINTS: usize = 60_000_000;
/// Extra frequency headroom for the bump `ψ` when choosing the t step.
const BUMP_BAND: f64 = 120.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeGrid {
    spacing: f64,
    phase: f64,
}

impl SpaceTimeGrid {
    /// Lattice `τ_m = (m + phase) spacing`; requires `0 < spacing ≤ 1/4` and
    /// `phase ∈ [0, 1)`.
    pub fn new(spacing: f64, phase: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing <= 0.25) {
            return Err(Error::InvalidArgument(format!(
                "tau spacing must lie in (0, 1/4], got {spacing}"
            )));
        }
        if !(0.0..1.0).contains(&phase) {
            return Err(Error::InvalidArgument(format!("phase must lie in [0, 1), got {phase}")));
        }
        Ok(Self { spacing, phase })
    }

    /// Midpoint lattice with the given spacing.
    pub fn midpoint(spacing: f64) -> Result<Self> {
        Self::new(spacing, 0.5)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn tau(&self, m: i64) -> f64 {
        (m as f64 + self.phase) * self.spacing
    }

    fn same_lattice(&self, other: &Self) -> bool {
        self.spacing == other.spacing && (self.phase - other.phase).abs() < PHASE_TOL
    }
}

impl Default for SpaceTimeGrid {
    fn default() -> Self {
        Self {
            spacing: 0.125,
            phase: 0.5,
        }
    }
}

/// Contiguous run of lattice samples starting at index `first`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeWindow {
    pub first: i64,
    pub values: Vec<Complex64>,
}

impl ModeWindow {
    pub fn last(&self) -> i64 {
        self.first + self.values.len() as i64 - 1
    }

    fn add_scaled(&mut self, other: &ModeWindow, c: Complex64) {
        if other.values.is_empty() {
            return;
        }
        if self.values.is_empty() {
            self.first = other.first;
            self.values = other.values.iter().map(|v| v * c).collect();
            return;
        }
        let lo = self.first.min(other.first);
        let hi = self.last().max(other.last());
        if lo < self.first || hi > self.last() {
            let mut grown = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
            let off = (self.first - lo) as usize;
            grown[off..off + self.values.len()].copy_from_slice(&self.values);
            self.first = lo;
            self.values = grown;
        }
        let off = (other.first - self.first) as usize;
        for (dst, src) in self.values[off..].iter_mut().zip(&other.values) {
            *dst += src * c;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeSpectrum {
    grid: SpaceTimeGrid,
    modes: BTreeMap<i64, ModeWindow>,
}

impl SpaceTimeSpectrum {
    pub fn new(grid: SpaceTimeGrid) -> Self {
        Self {
            grid,
            modes: BTreeMap::new(),
        }
    }

    /// Single mode carrying `χ₁(τ - center)`: ones on every lattice point with
    /// `|τ - center| ≤ 1`.
    pub fn chi1(grid: SpaceTimeGrid, n: i64, center: f64) -> Self {
        let mut s = Self::new(grid);
        s.add_chi1(n, center, Complex64::new(1.0, 0.0));
        s
    }

    /// Adds `amp · χ₁(τ - center)` at mode `n`.
    pub fn add_chi1(&mut self, n: i64, center: f64, amp: Complex64) {
        let d = self.grid.spacing;
        let first = ((center - 1.0) / d - self.grid.phase).ceil() as i64;
        let last = ((center + 1.0) / d - self.grid.phase).floor() as i64;
        let mut first = first;
        let mut last = last;
        // guard the ceil/floor against roundoff at the endpoints
        while (self.grid.tau(first - 1) - center).abs() <= 1.0 {
            first -= 1;
        }
        while (self.grid.tau(first) - center).abs() > 1.0 && first <= last {
            first += 1;
        }
        while (self.grid.tau(last + 1) - center).abs() <= 1.0 {
            last += 1;
        }
        while last >= first && (self.grid.tau(last) - center).abs() > 1.0 {
            last -= 1;
        }
        if last < first {
            return;
        }
        let w = ModeWindow {
            first,
            values: vec![amp; (last - first + 1) as usize],
        };
        self.insert_window(n, &w);
    }

    /// Samples `profile(τ - center)` at mode `n` on a window of half-width 8,
    /// doubling the half-width until both boundary samples fall below `1e-10`
    /// of the peak (at most `max_half_width`).
    pub fn from_profile(
        grid: SpaceTimeGrid,
        n: i64,
        center: f64,
        profile: impl Fn(f64) -> Complex64,
        max_half_width: f64,
    ) -> Self {
        let d = grid.spacing;
        let mut half = 8.0f64;
        loop {
            let first = ((center - half) / d - grid.phase).ceil() as i64;
            let last = ((center + half) / d - grid.phase).floor() as i64;
            let values: Vec<Complex64> = (first..=last).map(|m| profile(grid.tau(m) - center)).collect();
            let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let edge = values[0].norm().max(values[values.len() - 1].norm());
            if edge <= 1e-10 * peak || half * 2.0 > max_half_width {
                let mut s = Self::new(grid);
                s.insert_window(n, &ModeWindow { first, values });
                return s;
            }
            half *= 2.0;
        }
    }

    /// Adds `window` to mode `n`, extending the stored window if needed.
    pub fn insert_window(&mut self, n: i64, window: &ModeWindow) {
        self.modes
            .entry(n)
            .or_insert_with(|| ModeWindow {
                first: window.first,
                values: Vec::new(),
            })
            .add_scaled(window, Complex64::new(1.0, 0.0));
    }

    pub fn grid(&self) -> SpaceTimeGrid {
        self.grid
    }

    pub fn window(&self, n: i64) -> Option<&ModeWindow> {
        self.modes.get(&n)
    }

    pub fn active_modes(&self) -> impl Iterator<Item = i64> + '_ {
        self.modes.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &ModeWindow)> {
        self.modes.iter().map(|(&n, w)| (n, w))
    }

    pub fn is_empty(&self) -> bool {
        self.modes.values().all(|w| w.values.iter().all(|v| v.norm() == 0.0))
    }

    /// Calls `f(n, τ, value)` for every stored sample.
    pub fn for_each_sample(&self, mut f: impl FnMut(i64, f64, Complex64)) {
        for (&n, w) in &self.modes {
            for (i, &v) in w.values.iter().enumerate() {
                f(n, self.grid.tau(w.first + i as i64), v);
            }
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_modes(|_| c)
    }

    /// Multiplies mode `n` by `symbol(n)`; `∂ₓ` is `map_modes(|n| i n)`.
    pub fn map_modes(&self, symbol: impl Fn(i64) -> Complex64) -> Self {
        let modes = self
            .modes
            .iter()
            .map(|(&n, w)| {
                let c = symbol(n);
                (
                    n,
                    ModeWindow {
                        first: w.first,
                        values: w.values.iter().map(|v| v * c).collect(),
                    },
                )
            })
            .collect();
        Self { grid: self.grid, modes }
    }

    /// `f + c·g` on a common lattice.
    pub fn add_scaled(&self, other: &Self, c: Complex64) -> Result<Self> {
        if !self.grid.same_lattice(&other.grid) {
            return Err(Error::InvalidArgument("spectra live on different tau lattices".into()));
        }
        let mut out = self.clone();
        for (&n, w) in &other.modes {
            out.modes
                .entry(n)
                .or_insert_with(|| ModeWindow {
                    first: w.first,
                    values: Vec::new(),
                })
                .add_scaled(w, c);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, Complex64::new(1.0, 0.0))
    }

    /// Spectrum of the complex conjugate: `conj f̂(-n, -τ)`.
    pub fn conj_flip(&self) -> Self {
        let phase = if self.grid.phase == 0.0 { 0.0 } else { 1.0 - self.grid.phase };
        let shift = if self.grid.phase == 0.0 { 0 } else { 1 };
        let modes = self
            .modes
            .iter()
            .map(|(&n, w)| {
                (
                    -n,
                    ModeWindow {
                        first: -w.last() - shift,
                        values: w.values.iter().rev().map(|v| v.conj()).collect(),
                    },
                )
            })
            .collect();
        Self {
            grid: SpaceTimeGrid {
                spacing: self.grid.spacing,
                phase,
            },
            modes,
        }
    }

    /// `Σ_n Σ_m |f̂(n,τ_m)|² Δτ`.
    pub fn l2_sq(&self) -> f64 {
        let d = self.grid.spacing;
        self.modes
            .values()
            .flat_map(|w| w.values.iter())
            .map(|v| v.norm_sqr() * d)
            .sum()
    }

    fn lattice_span(&self) -> Option<(i64, i64)> {
        let lo = self.modes.values().filter(|w| !w.values.is_empty()).map(|w| w.first).min()?;
        let hi = self.modes.values().filter(|w| !w.values.is_empty()).map(|w| w.last()).max()?;
        Some((lo, hi))
    }
}

/// `(f*g)(n,τ) = Σ_{n₁} ∫ f(n-n₁, τ-τ₁) g(n₁, τ₁) dτ₁`, midpoint rule in τ₁.
///
/// The output lattice has phase `φ_f + φ_g` (mod 1); each output window is the
/// Minkowski sum of the contributing input windows.
pub fn convolve_spacetime(f: &SpaceTimeSpectrum, g: &SpaceTimeSpectrum) -> Result<SpaceTimeSpectrum> {
    if f.grid.spacing != g.grid.spacing {
        return Err(Error::InvalidArgument(format!(
            "tau spacings differ: {} vs {}",
            f.grid.spacing, g.grid.spacing
        )));
    }
    let d = f.grid.spacing;
    let mut phase = f.grid.phase + g.grid.phase;
    let mut carry = 0i64;
    if phase >= 1.0 - PHASE_TOL {
        phase = (phase - 1.0).max(0.0);
        carry = 1;
    }
    let mut out = SpaceTimeSpectrum::new(SpaceTimeGrid { spacing: d, phase });
    for (&nf, wf) in &f.modes {
        for (&ng, wg) in &g.modes {
            if wf.values.is_empty() || wg.values.is_empty() {
                continue;
            }
            let len = wf.values.len() + wg.values.len() - 1;
            let mut values = vec![Complex64::new(0.0, 0.0); len];
            for (i, a) in wf.values.iter().enumerate() {
                for (j, b) in wg.values.iter().enumerate() {
                    values[i + j] += a * b;
                }
            }
            values.iter_mut().for_each(|v| *v *= d);
            out.insert_window(
                nf + ng,
                &ModeWindow {
                    first: wf.first + wg.first + carry,
                    values,
                },
            );
        }
    }
    Ok(out)
}

/// Smooth cutoff: 1 on `[-1, 1]`, 0 outside `(-2, 2)`.
pub fn bump(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        return 1.0;
    }
    if a >= 2.0 {
        return 0.0;
    }
    let h = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let up = h(2.0 - a);
    up / (up + h(a - 1.0))
}

/// Discrete `L^p_{xt}` norm (`p ∈ {2, 4}`) of the function with spectrum `f`.
///
/// Without the bump the t integral runs over one period `2π/Δτ` of the
/// lattice, on which the discrete spectrum is exactly periodic, and the
/// trapezoid rule is exact for `p = 2` and `p = 4`. With the bump the
/// integrand `ψ(t) f` is supported in `[-2, 2]` and the t step resolves the
/// full τ bandwidth plus a margin for `ψ`.
pub fn lebesgue_norm(f: &SpaceTimeSpectrum, p: u32, bump_cutoff: bool) -> Result<f64> {
    if p != 2 && p != 4 {
        return Err(Error::Unsupported(format!("L^{p} norm; only p = 2 and p = 4 are implemented")));
    }
    let active: Vec<(i64, &ModeWindow)> = f
        .modes
        .iter()
        .filter(|(_, w)| w.values.iter().any(|v| v.norm() > 0.0))
        .map(|(&n, w)| (n, w))
        .collect();
    let Some((lo, hi)) = f.lattice_span() else {
        return Ok(0.0);
    };
    if active.is_empty() {
        return Ok(0.0);
    }
    let half_p = (p / 2) as usize;
    let nmin = active.iter().map(|(n, _)| *n).min().unwrap();
    let nmax = active.iter().map(|(n, _)| *n).max().unwrap();
    let nx = (half_p * (nmax - nmin) as usize + 1).max(4);

    let d = f.grid.spacing;
    let (times, ht): (Vec<f64>, f64) = if bump_cutoff {
        let band = half_p as f64 * (hi - lo) as f64 * d + BUMP_BAND;
        let steps = (4.0 * band / (2.0 * PI)).ceil().max(64.0) as usize;
        let h = 4.0 / steps as f64;
        ((0..=steps).map(|i| -2.0 + i as f64 * h).collect(), h)
    } else {
        let period = 2.0 * PI / d;
        let nt = half_p * (hi - lo) as usize + 1;
        let h = period / nt as f64;
        ((0..nt).map(|i| i as f64 * h).collect(), h)
    };
    if nx.saturating_mul(times.len()) > MAX_SAMPLING_POINTS {
        return Err(Error::Unsupported(format!(
            "sampling grid {nx} x {} exceeds {MAX_SAMPLING_POINTS} points",
            times.len()
        )));
    }

    let hx = 2.0 * PI / nx as f64;
    let phases: Vec<Vec<Complex64>> = active
        .iter()
        .map(|(n, _)| {
            (0..nx)
                .map(|j| Complex64::from_polar(1.0, *n as f64 * j as f64 * hx))
                .collect()
        })
        .collect();
    let norm = (2.0 * PI).powf(-0.5);
    let mut amps = vec![Complex64::new(0.0, 0.0); active.len()];
    let mut total = 0.0;
    for &t in &times {
        let cut = if bump_cutoff { bump(t) } else { 1.0 };
        if cut == 0.0 {
            continue;
        }
        for (a, (_, w)) in amps.iter_mut().zip(&active) {
            let mut rot = Complex64::from_polar(1.0, t * f.grid.tau(w.first));
            let step = Complex64::from_polar(1.0, t * d);
            let mut acc = Complex64::new(0.0, 0.0);
            for v in &w.values {
                acc += v * rot;
                rot *= step;
            }
            *a = acc * d * norm * cut;
        }
        let mut slice = 0.0;
        for j in 0..nx {
            let val: Complex64 = amps.iter().zip(&phases).map(|(a, ph)| a * ph[j]).sum();
            let m2 = val.norm_sqr();
            slice += if p == 2 { m2 } else { m2 * m2 };
        }
        total += slice;
    }
    Ok((total * hx * ht).powf(1.0 / p as f64))
}
