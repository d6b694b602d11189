//! The four single-mode counterexample families for the bilinear estimates.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::norms::{spacetime_norm, NormSpec, WeightFamily};
use crate::spectral::{convolve_spacetime, SpaceTimeGrid, SpaceTimeSpectrum};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CounterexampleFamily {
    /// Resonant `u·v` pair: `u` at `(-N²-N)/2`, `v` at `N`.
    Uv1,
    /// High-modulation `u·v` pair: `u` at `0`, `v` at `N`.
    Uv2,
    /// Resonant `∂ₓ(u₁ū₂)` pair: `u₁` at `(-N²+N)/2`, `u₂` at `(-N²-N)/2`.
    Du2First,
    /// High-modulation `∂ₓ(u₁ū₂)` pair: `u₁` at `0`, `u₂` at `-N`.
    Du2Second,
}

impl CounterexampleFamily {
    pub const ALL: [CounterexampleFamily; 4] = [Self::Uv1, Self::Uv2, Self::Du2First, Self::Du2Second];

    pub fn name(self) -> &'static str {
        match self {
            Self::Uv1 => "UV1",
            Self::Uv2 => "UV2",
            Self::Du2First => "DU2_1",
            Self::Du2Second => "DU2_2",
        }
    }

    /// Active modes `(a, b)` of the two inputs.
    pub fn modes(self, big_n: i64) -> (i64, i64) {
        match self {
            Self::Uv1 => ((-big_n * big_n - big_n) / 2, big_n),
            Self::Uv2 => (0, big_n),
            Self::Du2First => ((-big_n * big_n + big_n) / 2, (-big_n * big_n - big_n) / 2),
            Self::Du2Second => (0, -big_n),
        }
    }

    /// Weight family of the second input.
    pub fn second_family(self) -> WeightFamily {
        match self {
            Self::Uv1 | Self::Uv2 => WeightFamily::Airy,
            Self::Du2First | Self::Du2Second => WeightFamily::Schrodinger,
        }
    }

    /// Weight family the product is measured in.
    pub fn output_family(self) -> WeightFamily {
        match self {
            Self::Uv1 | Self::Uv2 => WeightFamily::Schrodinger,
            Self::Du2First | Self::Du2Second => WeightFamily::Airy,
        }
    }
}

impl fmt::Display for CounterexampleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CounterexampleFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family {s:?}; expected UV1, UV2, DU2_1 or DU2_2")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleSpec {
    pub family: CounterexampleFamily,
    pub big_n: i64,
    pub k: f64,
    pub s: f64,
}

impl CounterexampleSpec {
    pub fn new(family: CounterexampleFamily, big_n: i64, k: f64, s: f64) -> Result<Self> {
        if big_n < 8 || big_n % 2 != 0 {
            return Err(Error::InvalidArgument(format!("N must be even and at least 8, got {big_n}")));
        }
        if big_n > 1 << 20 {
            return Err(Error::InvalidArgument(format!("N = {big_n} is too large for exact modulations")));
        }
        Ok(Self { family, big_n, k, s })
    }

    /// Sobolev indices of the two inputs and the output.
    fn indices(&self) -> (f64, f64, f64) {
        match self.family {
            CounterexampleFamily::Uv1 | CounterexampleFamily::Uv2 => (self.k, self.s, self.k),
            CounterexampleFamily::Du2First | CounterexampleFamily::Du2Second => (self.k, self.k, self.s),
        }
    }
}

/// The two input spectra, each a `χ₁` box on its characteristic surface.
pub fn build_counterexample(spec: &CounterexampleSpec) -> (SpaceTimeSpectrum, SpaceTimeSpectrum) {
    build_on_grid(spec, SpaceTimeGrid::default())
}

/// As [`build_counterexample`] on a chosen τ lattice.
pub fn build_on_grid(spec: &CounterexampleSpec, grid: SpaceTimeGrid) -> (SpaceTimeSpectrum, SpaceTimeSpectrum) {
    let (a, b) = spec.family.modes(spec.big_n);
    let first = SpaceTimeSpectrum::chi1(grid, a, WeightFamily::Schrodinger.surface(a));
    let fam = spec.family.second_family();
    let second = SpaceTimeSpectrum::chi1(grid, b, fam.surface(b));
    (first, second)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearRatio {
    /// Norm of the product at modulation exponent `b - 1`.
    pub lhs: f64,
    /// Product of the input norms at exponent `b`.
    pub rhs: f64,
    pub ratio: f64,
    pub first_norm: f64,
    pub second_norm: f64,
}

/// The product spectrum: `û * v̂` for the UV families, and the spectrum of
/// `∂ₓ(u₁ ū₂)` for the DU2 families.
pub fn product_spectrum(
    family: CounterexampleFamily,
    first: &SpaceTimeSpectrum,
    second: &SpaceTimeSpectrum,
) -> Result<SpaceTimeSpectrum> {
    match family {
        CounterexampleFamily::Uv1 | CounterexampleFamily::Uv2 => convolve_spacetime(first, second),
        CounterexampleFamily::Du2First | CounterexampleFamily::Du2Second => {
            let prod = convolve_spacetime(first, &second.conj_flip())?;
            Ok(prod.map_modes(|n| Complex64::new(0.0, n as f64)))
        }
    }
}

pub fn bilinear_ratio(spec: &CounterexampleSpec, b: f64) -> Result<BilinearRatio> {
    bilinear_ratio_on_grid(spec, b, SpaceTimeGrid::default())
}

pub fn bilinear_ratio_on_grid(spec: &CounterexampleSpec, b: f64, grid: SpaceTimeGrid) -> Result<BilinearRatio> {
    let (first, second) = build_on_grid(spec, grid);
    let (k1, k2, k_out) = spec.indices();
    let first_norm = spacetime_norm(&first, NormSpec::new(WeightFamily::Schrodinger, k1, b));
    let second_norm = spacetime_norm(&second, NormSpec::new(spec.family.second_family(), k2, b));
    let prod = product_spectrum(spec.family, &first, &second)?;
    let lhs = spacetime_norm(&prod, NormSpec::new(spec.family.output_family(), k_out, b - 1.0));
    let rhs = first_norm * second_norm;
    if rhs == 0.0 {
        return Err(Error::Degenerate("input norms vanish".into()));
    }
    Ok(BilinearRatio {
        lhs,
        rhs,
        ratio: lhs / rhs,
        first_norm,
        second_norm,
    })
}

/// Which measured quantity a predicted exponent refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalingQuantity {
    Lhs,
    FirstNorm,
    SecondNorm,
    Ratio,
}

impl ScalingQuantity {
    pub const ALL: [ScalingQuantity; 4] = [Self::Lhs, Self::FirstNorm, Self::SecondNorm, Self::Ratio];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lhs => "lhs",
            Self::FirstNorm => "first_norm",
            Self::SecondNorm => "second_norm",
            Self::Ratio => "ratio",
        }
    }

    pub fn pick(self, r: &BilinearRatio) -> f64 {
        match self {
            Self::Lhs => r.lhs,
            Self::FirstNorm => r.first_norm,
            Self::SecondNorm => r.second_norm,
            Self::Ratio => r.ratio,
        }
    }
}

/// Predicted growth exponent in `N` at `b = 1/2`, with its formula.
///
/// | family | lhs     | first | second | ratio     |
/// |--------|---------|-------|--------|-----------|
/// | UV1    | 2k      | 2k    | s      | -s        |
/// | UV2    | k-3/2   | 0     | s      | k-s-3/2   |
/// | DU2_1  | 1+s     | 2k    | 2k     | 1+s-4k    |
/// | DU2_2  | s-1/2   | 0     | k      | s-k-1/2   |
pub fn predicted_exponent(family: CounterexampleFamily, q: ScalingQuantity, k: f64, s: f64) -> (f64, &'static str) {
    use CounterexampleFamily::*;
    use ScalingQuantity::*;
    match (family, q) {
        (Uv1, Lhs) => (2.0 * k, "2k"),
        (Uv1, FirstNorm) => (2.0 * k, "2k"),
        (Uv1, SecondNorm) => (s, "s"),
        (Uv1, Ratio) => (-s, "-s"),
        (Uv2, Lhs) => (k - 1.5, "k-3/2"),
        (Uv2, FirstNorm) => (0.0, "0"),
        (Uv2, SecondNorm) => (s, "s"),
        (Uv2, Ratio) => (k - s - 1.5, "k-s-3/2"),
        (Du2First, Lhs) => (1.0 + s, "1+s"),
        (Du2First, FirstNorm) => (2.0 * k, "2k"),
        (Du2First, SecondNorm) => (2.0 * k, "2k"),
        (Du2First, Ratio) => (1.0 + s - 4.0 * k, "1+s-4k"),
        (Du2Second, Lhs) => (s - 0.5, "s-1/2"),
        (Du2Second, FirstNorm) => (0.0, "0"),
        (Du2Second, SecondNorm) => (k, "k"),
        (Du2Second, Ratio) => (s - k - 0.5, "s-k-1/2"),
    }
}
