//! Weighted space-time norms of Bourgain type.
//!
//! For a spectrum `f̂(n, τ)` and weight family `W`:
//!
//! ```text
//! ‖f‖_{k,b} = ( Σ_n ⟨n⟩^{2k} ∫ W(n,τ)^{2b} |f̂(n,τ)|² dτ )^{1/2}
//! ```
//!
//! with `W = ⟨τ + n²⟩` (Schrödinger, the `X^{k,b}` scale) or `W = ⟨τ - n³⟩`
//! (Airy, the `Y^{s,b}` scale), and `⟨x⟩ = 1 + |x|`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::spectral::{lebesgue_norm, SpaceTimeGrid, SpaceTimeSpectrum};
use crate::{Error, Result};

/// Default stand-in for the exponent "1/2-".
pub const HALF_MINUS: f64 = 0.45;
/// Default stand-in for the exponent "1-".
pub const ONE_MINUS: f64 = 0.9;

/// `⟨x⟩ = 1 + |x|`.
pub fn bracket(x: f64) -> f64 {
    1.0 + x.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightFamily {
    Schrodinger,
    Airy,
}

impl WeightFamily {
    /// Signed distance to the characteristic surface: `τ + n²` or `τ - n³`.
    pub fn modulation(self, n: i64, tau: f64) -> f64 {
        let n = n as f64;
        match self {
            WeightFamily::Schrodinger => tau + n * n,
            WeightFamily::Airy => tau - n * n * n,
        }
    }

    /// τ on the characteristic surface above mode `n`.
    pub fn surface(self, n: i64) -> f64 {
        let n = n as f64;
        match self {
            WeightFamily::Schrodinger => -n * n,
            WeightFamily::Airy => n * n * n,
        }
    }

    /// Modulation exponent of the embedding into `L⁴_{xt}`.
    pub fn strichartz_exponent(self) -> f64 {
        match self {
            WeightFamily::Schrodinger => 3.0 / 8.0,
            WeightFamily::Airy => 1.0 / 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    pub family: WeightFamily,
    pub sobolev_index: f64,
    pub modulation_exponent: f64,
}

impl NormSpec {
    pub fn new(family: WeightFamily, sobolev_index: f64, modulation_exponent: f64) -> Self {
        Self {
            family,
            sobolev_index,
            modulation_exponent,
        }
    }

    fn with_b(self, b: f64) -> Self {
        Self {
            modulation_exponent: b,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub value: f64,
    pub l2l2_part: f64,
    pub l2l1_part: f64,
}

pub fn spacetime_norm(f: &SpaceTimeSpectrum, spec: NormSpec) -> f64 {
    let d = f.grid().spacing();
    let two_b = 2.0 * spec.modulation_exponent;
    let mut total = 0.0;
    for (n, w) in f.iter() {
        let mut inner = 0.0;
        for (i, v) in w.values.iter().enumerate() {
            let tau = f.grid().tau(w.first + i as i64);
            inner += bracket(spec.family.modulation(n, tau)).powf(two_b) * v.norm_sqr();
        }
        total += bracket(n as f64).powf(2.0 * spec.sobolev_index) * inner * d;
    }
    total.sqrt()
}

/// `(Σ_n (⟨n⟩^k ∫ |f̂| W^{-power} dτ)²)^{1/2}`.
fn l2l1(f: &SpaceTimeSpectrum, spec: NormSpec, power: f64) -> f64 {
    let d = f.grid().spacing();
    let mut total = 0.0;
    for (n, w) in f.iter() {
        let mut inner = 0.0;
        for (i, v) in w.values.iter().enumerate() {
            let tau = f.grid().tau(w.first + i as i64);
            inner += v.norm() / bracket(spec.family.modulation(n, tau)).powf(power);
        }
        let row = bracket(n as f64).powf(spec.sobolev_index) * inner * d;
        total += row * row;
    }
    total.sqrt()
}

/// `Z^k` / `W^s` norm: the `b = -1/2` norm plus `‖⟨n⟩^k f̂ / W‖_{L²_n L¹_τ}`.
/// The exponent in `spec` is ignored.
pub fn companion_norm(f: &SpaceTimeSpectrum, spec: NormSpec) -> NormReport {
    let l2l2_part = spacetime_norm(f, spec.with_b(-0.5));
    let l2l1_part = l2l1(f, spec, 1.0);
    NormReport {
        value: l2l2_part + l2l1_part,
        l2l2_part,
        l2l1_part,
    }
}

/// `X̃^k` / `Ỹ^s` norm: the `b = 1/2` norm plus `‖⟨n⟩^k f̂‖_{L²_n L¹_τ}`.
/// The exponent in `spec` is ignored.
pub fn tilde_norm(f: &SpaceTimeSpectrum, spec: NormSpec) -> NormReport {
    let l2l2_part = spacetime_norm(f, spec.with_b(0.5));
    let l2l1_part = l2l1(f, spec, 0.0);
    NormReport {
        value: l2l2_part + l2l1_part,
        l2l2_part,
        l2l1_part,
    }
}

/// `‖ψ(t) f‖_{L⁴_{xt}} / ‖f‖_{0,b}` with `b = 3/8` (Schrödinger) or `1/3` (Airy).
pub fn strichartz_ratio(f: &SpaceTimeSpectrum, family: WeightFamily) -> Result<f64> {
    let den = spacetime_norm(f, NormSpec::new(family, 0.0, family.strichartz_exponent()));
    if den == 0.0 {
        return Err(Error::Degenerate("zero spectrum has no Strichartz ratio".into()));
    }
    Ok(lebesgue_norm(f, 4, true)? / den)
}

/// Random ensemble for the Strichartz sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub members: usize,
    pub modes_per_member: usize,
    /// Modes are drawn from `[-mode_range, mode_range]`.
    pub mode_range: i64,
    /// Modulation offsets are integers in `[-max_offset, max_offset]`.
    pub max_offset: i64,
    pub seed: u64,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self {
            members: 50,
            modes_per_member: 8,
            mode_range: 8,
            max_offset: 2,
            seed: 0,
        }
    }
}

/// One ensemble member: `modes_per_member` distinct modes, each carrying a
/// complex amplitude times `χ₁` centred at the characteristic surface plus an
/// integer offset. `dilation` rescales the drawn modes `n → dilation·n`.
pub fn ensemble_member(spec: &EnsembleSpec, family: WeightFamily, index: usize, dilation: i64) -> SpaceTimeSpectrum {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let pool = (2 * spec.mode_range + 1) as usize;
    let count = spec.modes_per_member.min(pool);
    let picks = rand::seq::index::sample(&mut rng, pool, count);
    let mut s = SpaceTimeSpectrum::new(SpaceTimeGrid::default());
    for p in picks.iter() {
        let n = (p as i64 - spec.mode_range) * dilation;
        let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let offset = rng.gen_range(-spec.max_offset..=spec.max_offset) as f64;
        s.add_chi1(n, family.surface(n) + offset, amp);
    }
    s
}

/// Strichartz ratios of every member, in member order.
pub fn strichartz_ensemble(spec: &EnsembleSpec, family: WeightFamily, dilation: i64) -> Result<Vec<f64>> {
    (0..spec.members)
        .into_par_iter()
        .map(|i| strichartz_ratio(&ensemble_member(spec, family, i, dilation), family))
        .collect()
}
