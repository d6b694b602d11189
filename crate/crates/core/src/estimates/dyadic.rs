//! Measure of resonant modulation sets inside dyadic blocks.

use super::resonance::InteractionKind;
use crate::{Error, Result};

/// Lebesgue measure of `{μ : M ≤ |μ| < 2M} ∩ ⋃_r [c(r) - w(r), c(r) + w(r)]`.
///
/// * `Uv`: `c(r) = r³ - r² - 2nr`, `w(r) = |r|^{2-ε}`, over `|n|/2 ≤ |r| ≤ 2|n|`.
/// * `Du2`: `c(r) = n³ - n² - 2nr`, `w(r) = |n|^{1-ε}`, over `|r| ≤ n²/16`.
///
/// Requires `|n| > 100` and `M ≥ 1`.
pub fn dyadic_measure(kind: InteractionKind, n: i64, big_m: f64, epsilon: f64) -> Result<f64> {
    check(n, big_m)?;
    let mut pieces = Vec::new();
    let (lo, hi) = (big_m, 2.0 * big_m);
    for_each_interval(kind, n, epsilon, |a, b| {
        // positive block [M, 2M) and its mirror (-2M, -M]
        let (pa, pb) = (a.max(lo), b.min(hi));
        if pa < pb {
            pieces.push((pa, pb));
        }
        let (na, nb) = (a.max(-hi), b.min(-lo));
        if na < nb {
            pieces.push((na, nb));
        }
    });
    Ok(merged_length(pieces))
}

fn check(n: i64, big_m: f64) -> Result<()> {
    if n.unsigned_abs() <= 100 {
        return Err(Error::Precondition(format!("|n| must exceed 100, got {n}")));
    }
    if !(big_m >= 1.0) {
        return Err(Error::InvalidArgument(format!("M must be at least 1, got {big_m}")));
    }
    Ok(())
}

fn for_each_interval(kind: InteractionKind, n: i64, epsilon: f64, mut f: impl FnMut(f64, f64)) {
    let nf = n as f64;
    match kind {
        InteractionKind::Uv => {
            let a = n.unsigned_abs() as i64;
            for m in (a + 1) / 2..=2 * a {
                for r in [m, -m] {
                    let rf = r as f64;
                    let c = rf * rf * rf - rf * rf - 2.0 * nf * rf;
                    let w = rf.abs().powf(2.0 - epsilon);
                    f(c - w, c + w);
                }
            }
        }
        InteractionKind::Du2 => {
            let bound = (n as i128 * n as i128 / 16) as i64;
            let w = nf.abs().powf(1.0 - epsilon);
            let base = nf * nf * nf - nf * nf;
            for r in -bound..=bound {
                let c = base - 2.0 * nf * r as f64;
                f(c - w, c + w);
            }
        }
    }
}

fn merged_length(mut pieces: Vec<(f64, f64)>) -> f64 {
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (a, b) in pieces {
        match cur {
            Some((ca, cb)) if a <= cb => cur = Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                total += cb - ca;
                cur = Some((a, b));
            }
            None => cur = Some((a, b)),
        }
    }
    if let Some((a, b)) = cur {
        total += b - a;
    }
    total
}

/// Smallest and largest `|μ|` reached by the resonant intervals.
pub fn resonant_range(kind: InteractionKind, n: i64, epsilon: f64) -> Result<(f64, f64)> {
    check(n, 1.0)?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for_each_interval(kind, n, epsilon, |a, b| {
        let near = if a <= 0.0 && b >= 0.0 { 0.0 } else { a.abs().min(b.abs()) };
        lo = lo.min(near);
        hi = hi.max(a.abs().max(b.abs()));
    });
    Ok((lo, hi))
}

/// `(M, measure)` for every dyadic block `[M, 2M)` lying inside the resonant range.
pub fn dyadic_profile(kind: InteractionKind, n: i64, epsilon: f64) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = resonant_range(kind, n, epsilon)?;
    let mut out = Vec::new();
    let mut m = 1.0f64;
    while 2.0 * m <= hi {
        if m >= lo {
            out.push((m, dyadic_measure(kind, n, m, epsilon)?));
        }
        m *= 2.0;
    }
    Ok(out)
}

/// For each `n`, the dyadic block of largest resonant measure, as `(M, measure)`.
pub fn dyadic_envelope(kind: InteractionKind, ns: &[i64], epsilon: f64) -> Result<Vec<(f64, f64)>> {
    ns.iter()
        .map(|&n| {
            let (lo, hi) = resonant_range(kind, n, epsilon)?;
            let mut best = (1.0, 0.0);
            let mut m = 2f64.powi(lo.max(1.0).log2().floor() as i32);
            while m <= hi {
                let meas = dyadic_measure(kind, n, m, epsilon)?;
                if meas > best.1 {
                    best = (m, meas);
                }
                m *= 2.0;
            }
            Ok(best)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preconditions() {
        assert!(matches!(dyadic_measure(InteractionKind::Uv, 100, 4.0, 0.3), Err(Error::Precondition(_))));
        assert!(dyadic_measure(InteractionKind::Uv, 101, 0.5, 0.3).is_err());
    }

    #[test]
    fn block_outside_range_is_empty() {
        assert_eq!(dyadic_measure(InteractionKind::Du2, 128, 1.0, 0.3).unwrap(), 0.0);
        assert_eq!(dyadic_measure(InteractionKind::Uv, 128, 2f64.powi(60), 0.3).unwrap(), 0.0);
    }

    #[test]
    fn merging_counts_overlaps_once() {
        assert_eq!(merged_length(vec![(0.0, 2.0), (1.0, 3.0), (5.0, 6.0)]), 4.0);
        assert_eq!(merged_length(vec![]), 0.0);
    }
}
