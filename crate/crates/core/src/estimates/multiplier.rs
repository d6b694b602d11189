//! Reduced multiplier sums and their heuristic suprema.
//!
//! Each kind fixes an outer frequency and modulation, integrates the inner
//! modulation out with the convolution integral bound, and is left with a
//! lattice sum of
//!
//! ```text
//! weight(outer, inner) · ln(1 + ⟨P⟩) / ⟨P⟩^e
//! ```
//!
//! over the inner frequency, restricted to the kind's region. `P` is the
//! distance between the two kinks of the integrated product and `e` the
//! exponent the integral bound leaves: `2θ - 1` when both factors carry the
//! exponent `θ = one_minus`, and `θ` when one of them carries exponent 1.
//!
//! Region tests follow the frequency split of the two bilinear estimates:
//! "`|a| ∼ |b|`" means `|b|/2 ≤ |a| ≤ 2|b|`, "`|r| ≪ |n|²`" means `|r| ≤ n²/16`,
//! and the small-frequency threshold defaults to 100. Whether the fixed outer
//! modulation is the largest of the three is decided with the resonance
//! identity: the largest modulation is at least `|resonance|/3`, so the outer
//! one can be largest only if `⟨λ⟩ ≥ |resonance|/3`. Terms passing this test
//! are kept, which can only enlarge the sums.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::resonance::{resonance, InteractionKind};
use crate::norms::bracket;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MultiplierKind {
    UvW0,
    UvW1,
    UvW2,
    Du2V0,
    Du2V1,
    Du2V2,
}

impl MultiplierKind {
    pub const ALL: [MultiplierKind; 6] = [
        Self::UvW0,
        Self::UvW1,
        Self::UvW2,
        Self::Du2V0,
        Self::Du2V1,
        Self::Du2V2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::UvW0 => "UV_w0",
            Self::UvW1 => "UV_w1",
            Self::UvW2 => "UV_w2",
            Self::Du2V0 => "DU2_v0",
            Self::Du2V1 => "DU2_v1",
            Self::Du2V2 => "DU2_v2",
        }
    }

    pub fn interaction(self) -> InteractionKind {
        match self {
            Self::UvW0 | Self::UvW1 | Self::UvW2 => InteractionKind::Uv,
            _ => InteractionKind::Du2,
        }
    }

    /// Where the bilinear estimate behind this kind is claimed.
    pub fn in_validity_region(self, k: f64, s: f64) -> bool {
        const EPS: f64 = 1e-12;
        match self.interaction() {
            InteractionKind::Uv => s >= -EPS && k - s <= 1.5 + EPS,
            InteractionKind::Du2 => k > 0.0 && 1.0 + s <= 4.0 * k + EPS && k - s >= -0.5 - EPS,
        }
    }
}

impl fmt::Display for MultiplierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MultiplierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown multiplier kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierParams {
    pub k: f64,
    pub s: f64,
    /// Stand-in for the exponent "1-".
    pub one_minus: f64,
    /// Largest outer and inner frequency scanned.
    pub truncation: i64,
    /// Frequencies at or below this are "small".
    pub small_threshold: i64,
}

impl MultiplierParams {
    pub fn new(k: f64, s: f64, one_minus: f64, truncation: i64) -> Self {
        Self {
            k,
            s,
            one_minus,
            truncation,
            small_threshold: 100,
        }
    }
}

/// Where a supremum was attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub outer_mode: i64,
    /// Modulation of the outer wave (distance to its characteristic surface).
    pub modulation: f64,
    /// Inner frequency of the largest single term.
    pub dominant_inner: i64,
    /// Number of inner lattice points inside the region.
    pub region_terms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierSup {
    pub sup_value: f64,
    pub argmax: ScanPoint,
}

/// Outer frequencies `0, ±1, ±2^i, ±3·2^{i-1}` up to `truncation`.
pub fn outer_modes(truncation: i64) -> Vec<i64> {
    let mut v = vec![0, 1, -1];
    let mut p = 2i64;
    while p <= truncation {
        v.extend([p, -p]);
        let q = 3 * p / 2;
        if q <= truncation && q > 2 {
            v.extend([q, -q]);
        }
        p *= 2;
    }
    v.sort_unstable();
    v.dedup();
    v
}

/// Modulations `m·2^j`, `m ∈ [-64, 64]`, `0 ≤ j ≤ 3 log₂ truncation`, deduplicated.
pub fn modulation_offsets(truncation: i64) -> Vec<f64> {
    let jmax = 3 * (truncation as f64).log2().ceil() as i32;
    let mut v: Vec<i128> = Vec::new();
    for j in 0..=jmax {
        for m in -64i128..=64 {
            v.push(m << j);
        }
    }
    v.sort_unstable();
    v.dedup();
    v.into_iter().map(|x| x as f64).collect()
}

fn log_decay(p: f64, e: f64) -> f64 {
    let b = bracket(p);
    (1.0 + b).ln() / b.powf(e)
}

fn comparable(a: i64, b: i64) -> bool {
    let (a, b) = (a.unsigned_abs(), b.unsigned_abs());
    2 * a >= b && a <= 2 * b
}

fn res(kind: InteractionKind, n: i64, n1: i64) -> f64 {
    // all frequencies here are far below the overflow limit
    resonance(kind, n, n1).map(|r| r as f64).unwrap_or(f64::INFINITY)
}

struct Eval {
    value: f64,
    dominant: i64,
    terms: usize,
}

impl Eval {
    fn new() -> Self {
        Self {
            value: 0.0,
            dominant: 0,
            terms: 0,
        }
    }

    fn push(&mut self, inner: i64, term: f64, best: &mut f64) {
        self.value += term;
        self.terms += 1;
        if term > *best {
            *best = term;
            self.dominant = inner;
        }
    }
}

/// Value of the reduced sum of `kind` at one outer point.
pub fn reduced_sum(kind: MultiplierKind, p: &MultiplierParams, outer: i64, lam: f64) -> (f64, i64, usize) {
    let e = evaluate(kind, p, outer, lam);
    (e.value, e.dominant, e.terms)
}

fn evaluate(kind: MultiplierKind, p: &MultiplierParams, outer: i64, lam: f64) -> Eval {
    let (k, s, om, t, thr) = (p.k, p.s, p.one_minus, p.truncation, p.small_threshold);
    let both = 2.0 * om - 1.0;
    let bl = bracket(lam);
    let br = |x: i64| bracket(x as f64);
    let mut ev = Eval::new();
    let mut best = 0.0;
    match kind {
        MultiplierKind::UvW0 => {
            let n = outer;
            let nf = n as f64;
            let pre = br(n).powf(2.0 * k) / bl;
            for n1 in -t..=t {
                let inside = n1.abs() <= thr
                    || !comparable(n1, n)
                    || bl >= res(InteractionKind::Uv, n, n1).abs() / 3.0;
                if !inside {
                    continue;
                }
                let x = n1 as f64;
                let poly = x * x * x - x * x + 2.0 * nf * x - lam;
                let w = pre / (br(n1).powf(2.0 * s) * br(n - n1).powf(2.0 * k));
                ev.push(n1, w * log_decay(poly, both), &mut best);
            }
        }
        MultiplierKind::UvW1 => {
            let n1 = outer;
            if n1.abs() <= thr {
                return ev;
            }
            let x1 = n1 as f64;
            let tau1 = lam + x1 * x1 * x1;
            let pre = 1.0 / (br(n1).powf(2.0 * s) * bl);
            let a = n1.abs();
            for m in (a + 1) / 2..=2 * a {
                for n in [m, -m] {
                    if bl < res(InteractionKind::Uv, n, n1).abs() / 3.0 {
                        continue;
                    }
                    let q = tau1 - x1 * x1 + 2.0 * x1 * n as f64;
                    let w = pre * br(n).powf(2.0 * k) / br(n - n1).powf(2.0 * k);
                    ev.push(n, w * log_decay(q, om), &mut best);
                }
            }
        }
        MultiplierKind::UvW2 => {
            let n2 = outer;
            let x2 = n2 as f64;
            let pre = 1.0 / (br(n2).powf(2.0 * k) * bl);
            for n1 in -t..=t {
                let n = n1 - n2;
                if n1.abs() <= thr || !comparable(n1, n) || bl < res(InteractionKind::Uv, n, n1).abs() / 3.0 {
                    continue;
                }
                let x = n1 as f64;
                let r = x * x * x + x * x - 2.0 * x2 * x - lam;
                let w = pre * br(n).powf(2.0 * k) / br(n1).powf(2.0 * s);
                ev.push(n1, w * log_decay(r, om), &mut best);
            }
        }
        MultiplierKind::Du2V0 => {
            let n = outer;
            if n == 0 {
                return ev;
            }
            let nf = n as f64;
            let pre = nf * nf * br(n).powf(2.0 * s) / bl;
            let p_cut = (n as i128 * n as i128) as f64 / 16.0;
            for n1 in -t..=t {
                let inside = n.abs() <= thr
                    || (n1.abs() as f64) > p_cut
                    || bl >= res(InteractionKind::Du2, n, n1).abs() / 3.0;
                if !inside {
                    continue;
                }
                let a = lam + nf * nf * nf + nf * nf - 2.0 * nf * n1 as f64;
                let w = pre / (br(n1).powf(2.0 * k) * br(n - n1).powf(2.0 * k));
                ev.push(n1, w * log_decay(a, both), &mut best);
            }
        }
        MultiplierKind::Du2V1 => {
            let n1 = outer;
            let x1 = n1 as f64;
            let tau1 = x1 * x1 - lam;
            let pre = 1.0 / (br(n1).powf(2.0 * k) * bl);
            for n in -t..=t {
                if !du2_large_pair(n, n1, thr) || bl < res(InteractionKind::Du2, n, n1).abs() / 3.0 {
                    continue;
                }
                let nf = n as f64;
                let d = nf - x1;
                let a = nf * nf * nf + d * d - tau1;
                let w = pre * nf * nf * br(n).powf(2.0 * s) / br(n1 - n).powf(2.0 * k);
                ev.push(n, w * log_decay(a, om), &mut best);
            }
        }
        MultiplierKind::Du2V2 => {
            let n2 = outer;
            let x2 = n2 as f64;
            let tau2 = x2 * x2 - lam;
            let pre = 1.0 / (br(n2).powf(2.0 * k) * bl);
            for n in -t..=t {
                let n1 = n + n2;
                if !du2_large_pair(n, n1, thr) || bl < res(InteractionKind::Du2, n, n1).abs() / 3.0 {
                    continue;
                }
                let nf = n as f64;
                let c = nf + x2;
                let a = tau2 - c * c + nf * nf * nf;
                let w = pre * nf * nf * br(n).powf(2.0 * s) / br(n1).powf(2.0 * k);
                ev.push(n, w * log_decay(a, om), &mut best);
            }
        }
    }
    ev
}

/// `|n|` above the threshold and `|n₁| ≤ n²/16`.
fn du2_large_pair(n: i64, n1: i64, thr: i64) -> bool {
    n.abs() > thr && (n1.unsigned_abs() as u128) * 16 <= (n as i128 * n as i128) as u128
}

/// Heuristic supremum of the reduced sum over the outer scan set.
///
/// The scan covers the outer frequencies of [`outer_modes`] and outer
/// modulations of [`modulation_offsets`]; the result is a lower bound for the
/// true supremum at this truncation.
pub fn multiplier_sup(kind: MultiplierKind, params: &MultiplierParams) -> Result<MultiplierSup> {
    if !kind.in_validity_region(params.k, params.s) {
        return Err(Error::Precondition(format!(
            "{kind} bound is not claimed at k = {}, s = {}",
            params.k, params.s
        )));
    }
    if params.truncation < 64 {
        return Err(Error::InvalidArgument(format!(
            "truncation must be at least 64, got {}",
            params.truncation
        )));
    }
    if params.truncation > 1 << 16 {
        return Err(Error::InvalidArgument(format!("truncation {} is too large", params.truncation)));
    }
    if !(params.one_minus > 2.0 / 3.0 && params.one_minus <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "one_minus must lie in (2/3, 1], got {}",
            params.one_minus
        )));
    }
    let lams = modulation_offsets(params.truncation);
    let best = outer_modes(params.truncation)
        .into_par_iter()
        .map(|outer| {
            let mut best = MultiplierSup {
                sup_value: 0.0,
                argmax: ScanPoint {
                    outer_mode: outer,
                    modulation: 0.0,
                    dominant_inner: 0,
                    region_terms: 0,
                },
            };
            for &lam in &lams {
                let ev = evaluate(kind, params, outer, lam);
                if ev.value > best.sup_value {
                    best = MultiplierSup {
                        sup_value: ev.value,
                        argmax: ScanPoint {
                            outer_mode: outer,
                            modulation: lam,
                            dominant_inner: ev.dominant,
                            region_terms: ev.terms,
                        },
                    };
                }
            }
            best
        })
        .reduce_with(|a, b| {
            // ties resolved towards the smaller outer mode for determinism
            if b.sup_value > a.sup_value
                || (b.sup_value == a.sup_value && b.argmax.outer_mode < a.argmax.outer_mode)
            {
                b
            } else {
                a
            }
        })
        .expect("scan set is nonempty");
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_sets() {
        let m = outer_modes(64);
        assert!(m.contains(&0) && m.contains(&-48) && m.contains(&64));
        assert!(!m.contains(&96));
        let l = modulation_offsets(64);
        assert!(l.contains(&0.0) && l.contains(&(64.0 * 2f64.powi(18))));
        assert!(l.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn preconditions() {
        let p = MultiplierParams::new(2.0, 0.0, 0.9, 64);
        assert!(matches!(multiplier_sup(MultiplierKind::UvW0, &p), Err(Error::Precondition(_))));
        let p = MultiplierParams::new(0.5, -0.1, 0.9, 64);
        assert!(matches!(multiplier_sup(MultiplierKind::UvW1, &p), Err(Error::Precondition(_))));
        let p = MultiplierParams::new(0.2, 0.0, 0.9, 64);
        assert!(matches!(multiplier_sup(MultiplierKind::Du2V0, &p), Err(Error::Precondition(_))));
        let p = MultiplierParams::new(1.0, 1.6, 0.9, 64);
        assert!(matches!(multiplier_sup(MultiplierKind::Du2V2, &p), Err(Error::Precondition(_))));
        let p = MultiplierParams::new(1.0, 1.0, 0.9, 32);
        assert!(matches!(multiplier_sup(MultiplierKind::UvW0, &p), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn names_roundtrip() {
        for k in MultiplierKind::ALL {
            assert_eq!(k.name().parse::<MultiplierKind>().unwrap(), k);
        }
    }
}
