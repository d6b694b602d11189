//! Torus grids, the discrete Fourier convention, and space-time spectra.

mod spacetime;

pub use spacetime::{
    bump, convolve_spacetime, lebesgue_norm, ModeWindow, SpaceTimeGrid, SpaceTimeSpectrum,
};

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(len)
        } else {
            p.plan_fft_inverse(len)
        }
    })
}

/// Uniform grid `x_j = 2πj/N` on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    num_modes: usize,
}

impl TorusGrid {
    pub fn new(num_modes: usize) -> Result<Self> {
        if num_modes < 4 || num_modes % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "grid size must be even and at least 4, got {num_modes}"
            )));
        }
        Ok(Self { num_modes })
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn point(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.num_modes as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.num_modes).map(|j| self.point(j)).collect()
    }

    /// Smallest representable mode, `-N/2`.
    pub fn min_mode(&self) -> i64 {
        -(self.num_modes as i64) / 2
    }

    /// Largest representable mode, `N/2 - 1`.
    pub fn max_mode(&self) -> i64 {
        self.num_modes as i64 / 2 - 1
    }

    /// Mode carried by storage slot `k` (FFT ordering).
    pub fn mode_of(&self, k: usize) -> i64 {
        let n = self.num_modes as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Storage slot of mode `n`, if representable.
    pub fn index_of(&self, n: i64) -> Option<usize> {
        if n < self.min_mode() || n > self.max_mode() {
            return None;
        }
        let len = self.num_modes as i64;
        Some(n.rem_euclid(len) as usize)
    }
}

/// Fourier coefficients `û(n)`, `n ∈ [-N/2, N/2)`, stored in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
    real: bool,
}

const REALITY_TOL: f64 = 1e-12;

impl SpectralField {
    pub fn zeros(grid: TorusGrid, real: bool) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.num_modes()],
            real,
        }
    }

    /// Builds a field from coefficients in FFT order.
    ///
    /// With `real = true` the Hermitian symmetry `û(-n) = conj û(n)` is checked
    /// to `1e-12` relative to the largest coefficient. The Nyquist coefficient
    /// has no partner and must itself be real.
    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        if coeffs.len() != grid.num_modes() {
            return Err(Error::LengthMismatch {
                expected: grid.num_modes(),
                got: coeffs.len(),
            });
        }
        let field = Self { grid, coeffs, real };
        if real {
            let scale = field.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let tol = REALITY_TOL * scale.max(f64::MIN_POSITIVE);
            for n in field.grid.min_mode()..=field.grid.max_mode() {
                let partner = if n == field.grid.min_mode() { n } else { -n };
                if (field.coeff(n) - field.coeff(partner).conj()).norm() > tol {
                    return Err(Error::InvalidArgument(format!(
                        "real field is not Hermitian at mode {n}"
                    )));
                }
            }
        }
        Ok(field)
    }

    /// Builds a field from `(mode, coefficient)` pairs; unspecified modes are zero.
    pub fn from_modes(grid: TorusGrid, modes: &[(i64, Complex64)], real: bool) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.num_modes()];
        for &(n, c) in modes {
            let k = grid
                .index_of(n)
                .ok_or_else(|| Error::InvalidArgument(format!("mode {n} not on grid")))?;
            coeffs[k] += c;
        }
        Self::from_coeffs(grid, coeffs, real)
    }

    pub(crate) fn from_coeffs_unchecked(grid: TorusGrid, coeffs: Vec<Complex64>, real: bool) -> Self {
        debug_assert_eq!(coeffs.len(), grid.num_modes());
        Self { grid, coeffs, real }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Coefficients in FFT order (slot `k` holds mode `grid.mode_of(k)`).
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// `û(n)`, zero for modes outside the grid.
    pub fn coeff(&self, n: i64) -> Complex64 {
        self.grid
            .index_of(n)
            .map_or(Complex64::new(0.0, 0.0), |k| self.coeffs[k])
    }

    /// Iterates `(n, û(n))` in FFT order.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| (self.grid.mode_of(k), c))
    }

    /// Multiplies every coefficient by `symbol(n)`.
    pub fn map_symbol(&self, symbol: impl Fn(i64) -> Complex64) -> Self {
        let coeffs = self.modes().map(|(n, c)| c * symbol(n)).collect();
        Self::from_coeffs_unchecked(self.grid, coeffs, self.real)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_symbol(|_| Complex64::new(c, 0.0))
    }

    /// `2π Σ_n |û(n)|²`, the squared L² norm on the torus.
    pub fn l2_norm_sq(&self) -> f64 {
        2.0 * PI * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Sobolev norm `(2π Σ ⟨n⟩^{2σ} |û(n)|²)^{1/2}`.
    pub fn sobolev_norm(&self, sigma: f64) -> f64 {
        let sum: f64 = self
            .modes()
            .map(|(n, c)| (1.0 + n.abs() as f64).powf(2.0 * sigma) * c.norm_sqr())
            .sum();
        (2.0 * PI * sum).sqrt()
    }

    /// Restores exact Hermitian symmetry by averaging each pair and dropping
    /// the imaginary part of the self-conjugate modes.
    pub fn symmetrize(&mut self) {
        let g = self.grid;
        for n in 1..=g.max_mode() {
            let a = self.coeff(n);
            let b = self.coeff(-n);
            let avg = 0.5 * (a + b.conj());
            self.coeffs[g.index_of(n).unwrap()] = avg;
            self.coeffs[g.index_of(-n).unwrap()] = avg.conj();
        }
        self.coeffs[0].im = 0.0;
        let nyq = g.index_of(g.min_mode()).unwrap();
        self.coeffs[nyq].im = 0.0;
    }
}

/// `û(n) = (1/N) Σ_j f_j e^{-i n x_j}`.
pub fn forward_transform(grid: TorusGrid, samples: &[Complex64]) -> Result<SpectralField> {
    let n = grid.num_modes();
    if samples.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: samples.len(),
        });
    }
    let mut buf = samples.to_vec();
    plan(n, true).process(&mut buf);
    let inv = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= inv);
    Ok(SpectralField::from_coeffs_unchecked(grid, buf, false))
}

/// Forward transform of real samples; the result carries the reality flag.
pub fn forward_transform_real(grid: TorusGrid, samples: &[f64]) -> Result<SpectralField> {
    let cs: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut f = forward_transform(grid, &cs)?;
    f.real = true;
    f.symmetrize();
    Ok(f)
}

/// `f_j = Σ_n û(n) e^{i n x_j}`.
pub fn inverse_transform(field: &SpectralField) -> Vec<Complex64> {
    let mut buf = field.coeffs.clone();
    plan(buf.len(), false).process(&mut buf);
    buf
}

/// Multiplies by `(in)^order`. Odd orders zero the Nyquist mode `-N/2`, whose
/// derivative has no consistent sign.
pub fn spectral_derivative(field: &SpectralField, order: u32) -> Result<SpectralField> {
    if order == 0 {
        return Err(Error::InvalidArgument("derivative order must be at least 1".into()));
    }
    let nyq = field.grid.min_mode();
    let i = Complex64::new(0.0, 1.0);
    Ok(field.map_symbol(|n| {
        if order % 2 == 1 && n == nyq {
            Complex64::new(0.0, 0.0)
        } else {
            (i * n as f64).powu(order)
        }
    }))
}

/// Two-thirds rule: zeroes every mode with `3|n| > N`.
pub fn dealias(field: &SpectralField) -> SpectralField {
    let mut out = field.clone();
    dealias_in_place(out.grid, &mut out.coeffs);
    out
}

pub(crate) fn dealias_in_place(grid: TorusGrid, coeffs: &mut [Complex64]) {
    let n = grid.num_modes() as i64;
    for (k, c) in coeffs.iter_mut().enumerate() {
        if 3 * grid.mode_of(k).abs() > n {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}
