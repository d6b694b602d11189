//! Numerical checks of the convolution integral bound and the polynomial series bounds.

use crate::norms::bracket;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalculusIntegral {
    /// `∫_ℝ dκ / (⟨κ⟩^θ ⟨κ-a⟩^θ̃)`.
    pub integral: f64,
    /// `ln(1 + ⟨a⟩) / ⟨a⟩^{θ+θ̃-1}`.
    pub bound: f64,
    pub ratio: f64,
    /// Analytic upper bound on the part of the integral from `|κ| > R`,
    /// `R = max(10|a|, 1000)`.
    pub tail_bound: f64,
}

/// Integrates `g` over `[0, len]` after the substitution `x = e^u - 1`, which
/// flattens the algebraic decay away from the kink at `x = 0`.
fn integrate_from_kink(g: &dyn Fn(f64) -> f64, len: f64, tol: f64) -> f64 {
    let h = |u: f64| {
        let ex = u.exp();
        g(ex - 1.0) * ex
    };
    adaptive_simpson(&h, 0.0, len.ln_1p(), tol)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

pub fn calculus_integral(theta: f64, theta_tilde: f64, a: f64) -> Result<CalculusIntegral> {
    if !(theta > 0.0 && theta_tilde > 0.0) {
        return Err(Error::InvalidArgument("exponents must be positive".into()));
    }
    let excess = theta + theta_tilde - 1.0;
    if excess <= 0.0 {
        return Err(Error::Divergent(format!(
            "theta + theta_tilde = {} must exceed 1",
            theta + theta_tilde
        )));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("shift must be finite".into()));
    }
    let g = |k: f64| bracket(k).powf(-theta) * bracket(k - a).powf(-theta_tilde);
    let (lo, hi) = (a.min(0.0), a.max(0.0));
    let r = (10.0 * a.abs()).max(1000.0);

    // Beyond |κ| = R both brackets are comparable: ⟨κ-a⟩ ≥ 0.9⟨κ⟩.
    let tail_one_side = 0.9f64.powf(-theta_tilde) * (1.0 + r).powf(-excess) / excess;
    let tail_bound = 2.0 * tail_one_side;
    // Ray integrals stop once the remaining decay is below 1e-15 of the bound.
    let ray = (1e15f64.ln() / excess).min(700.0).exp().max(10.0 * r);

    let tol = 1e-13;
    let mut total = 0.0;
    total += integrate_from_kink(&|x| g(hi + x), ray, tol);
    total += integrate_from_kink(&|x| g(lo - x), ray, tol);
    if hi > lo {
        let half = 0.5 * (hi - lo);
        total += integrate_from_kink(&|x| g(lo + x), half, tol);
        total += integrate_from_kink(&|x| g(hi - x), half, tol);
    }
    let ab = bracket(a);
    let bound = (1.0 + ab).ln() / ab.powf(excess);
    Ok(CalculusIntegral {
        integral: total,
        bound,
        ratio: total / bound,
        tail_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesPolynomial {
    /// `p(x) = x³ + e x² + f x + g`.
    Cubic { e: f64, f: f64, g: f64 },
    /// `q(x) = 2 n₁ x - n₁² + r`, summed over `|n₁|/2 ≤ |x| ≤ 2|n₁|`.
    Linear { n1: i64, r: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub partial_sum: f64,
    /// Bound on the omitted terms (zero when the sum is finite by definition).
    pub tail_bound: f64,
    pub terms: u64,
}

/// Default half-width of the summation windows for the cubic series.
pub const DEFAULT_CUBIC_RANGE: u64 = 100_000;

/// `Σ_m ⟨p(m)⟩^{-θ}`.
///
/// Cubic: sums every integer within `range` of the real part of some root of
/// `p` (overlapping windows merged) and bounds the rest by the integral test.
/// Outside the windows each factor of `p` is at least `range + D`, `D` being the
/// distance to the nearest window, which gives
/// `tail ≤ 2c·range^{1-3θ}/(3θ-1)` for `c` windows.
///
/// Linear: the band sum is finite; `range` is ignored.
pub fn polynomial_series(poly: SeriesPolynomial, theta: f64, range: u64) -> Result<SeriesResult> {
    match poly {
        SeriesPolynomial::Cubic { e, f, g } => cubic_series(e, f, g, theta, range),
        SeriesPolynomial::Linear { n1, r } => linear_series(n1, r, theta),
    }
}

fn cubic_series(e: f64, f: f64, g: f64, theta: f64, range: u64) -> Result<SeriesResult> {
    if theta <= 1.0 / 3.0 {
        return Err(Error::Divergent(format!("cubic series needs theta > 1/3, got {theta}")));
    }
    if range == 0 {
        return Err(Error::InvalidArgument("range must be positive".into()));
    }
    let w = range as f64;
    let mut centers = cubic_root_real_parts(e, f, g);
    centers.sort_by(f64::total_cmp);
    // merged windows [lo, hi] of integers
    let mut windows: Vec<(f64, f64)> = Vec::new();
    for c in centers {
        let (lo, hi) = ((c - w).ceil(), (c + w).floor());
        match windows.last_mut() {
            Some(last) if lo <= last.1 + 1.0 => last.1 = last.1.max(hi),
            _ => windows.push((lo, hi)),
        }
    }
    let mut sum = 0.0;
    let mut terms = 0u64;
    for &(lo, hi) in &windows {
        // expand p around an integer point of the window to keep cancellation small
        let c = (0.5 * (lo + hi)).round();
        let a2 = 3.0 * c + e;
        let a1 = (3.0 * c + 2.0 * e) * c + f;
        let a0 = ((c + e) * c + f) * c + g;
        let (ylo, yhi) = ((lo - c) as i64, (hi - c) as i64);
        for y in ylo..=yhi {
            let y = y as f64;
            let p = ((y + a2) * y + a1) * y + a0;
            sum += bracket(p).powf(-theta);
            terms += 1;
        }
    }
    let tail_bound = 2.0 * windows.len() as f64 * w.powf(1.0 - 3.0 * theta) / (3.0 * theta - 1.0);
    Ok(SeriesResult {
        partial_sum: sum,
        tail_bound,
        terms,
    })
}

fn linear_series(n1: i64, r: f64, theta: f64) -> Result<SeriesResult> {
    if theta <= 0.5 {
        return Err(Error::Divergent(format!("linear series needs theta > 1/2, got {theta}")));
    }
    if n1 == 0 {
        return Err(Error::InvalidArgument("n1 must be nonzero".into()));
    }
    let a = n1.unsigned_abs() as i64;
    let lo = (a + 1) / 2;
    let hi = 2 * a;
    let mut sum = 0.0;
    let mut terms = 0u64;
    for m in lo..=hi {
        for n in [m, -m] {
            let q = 2.0 * n1 as f64 * n as f64 - (n1 as f64) * (n1 as f64) + r;
            sum += bracket(q).powf(-theta);
            terms += 1;
        }
    }
    Ok(SeriesResult {
        partial_sum: sum,
        tail_bound: 0.0,
        terms,
    })
}

/// Real parts of the three roots of `x³ + e x² + f x + g`.
pub fn cubic_root_real_parts(e: f64, f: f64, g: f64) -> Vec<f64> {
    let shift = e / 3.0;
    let p = f - e * e / 3.0;
    let q = 2.0 * e * e * e / 27.0 - e * f / 3.0 + g;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    if disc > 0.0 {
        let sq = disc.sqrt();
        let t = (-q / 2.0 + sq).cbrt() + (-q / 2.0 - sq).cbrt();
        let real = t - shift;
        let pair = (-e - real) / 2.0;
        vec![real, pair, pair]
    } else if p == 0.0 {
        vec![-shift; 3]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|j| m * (phi - 2.0 * std::f64::consts::PI * j as f64 / 3.0).cos() - shift)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divergent_inputs() {
        assert!(matches!(calculus_integral(0.5, 0.4, 1.0), Err(Error::Divergent(_))));
        assert!(matches!(calculus_integral(0.5, 0.5, 1.0), Err(Error::Divergent(_))));
        assert!(matches!(
            polynomial_series(SeriesPolynomial::Cubic { e: 0.0, f: 0.0, g: 0.0 }, 1.0 / 3.0, 10),
            Err(Error::Divergent(_))
        ));
        assert!(matches!(
            polynomial_series(SeriesPolynomial::Linear { n1: 4, r: 0.0 }, 0.5, 0),
            Err(Error::Divergent(_))
        ));
        assert!(matches!(
            polynomial_series(SeriesPolynomial::Linear { n1: 0, r: 0.0 }, 0.6, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn roots_of_known_cubics() {
        let mut r = cubic_root_real_parts(-6.0, 11.0, -6.0);
        r.sort_by(f64::total_cmp);
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-9);
        }
        // x³ + x = x (x² + 1)
        let r = cubic_root_real_parts(0.0, 1.0, 0.0);
        assert!(r.iter().all(|x| x.abs() < 1e-12));
        let r = cubic_root_real_parts(0.0, 0.0, 0.0);
        assert_eq!(r, vec![0.0; 3]);
    }
}
