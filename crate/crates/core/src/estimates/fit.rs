//! Log-log power-law fits.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    /// Least-squares slope of `log₂ value` against `log₂ N`.
    pub exponent: f64,
    pub intercept: f64,
    /// RMS of the log₂ residuals.
    pub residual: f64,
    pub sample_points: Vec<(f64, f64)>,
}

/// Fits `value ≈ 2^intercept · N^exponent`.
pub fn fit_scaling(samples: &[(f64, f64)]) -> Result<ScalingFit> {
    if samples.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 samples, got {}",
            samples.len()
        )));
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::InvalidArgument("sample abscissae must be strictly increasing".into()));
        }
    }
    if let Some(&(n, v)) = samples.iter().find(|(n, v)| !(*n > 0.0 && *v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument(format!("nonpositive sample ({n}, {v})")));
    }
    let xs: Vec<f64> = samples.iter().map(|(n, _)| n.log2()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, v)| v.log2()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + exponent * x);
            r * r
        })
        .sum();
    Ok(ScalingFit {
        exponent,
        intercept,
        residual: (rss / m).sqrt(),
        sample_points: samples.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_square() {
        let s: Vec<_> = (4..10).map(|j| {
            let n = (1u32 << j) as f64;
            (n, n * n)
        }).collect();
        let f = fit_scaling(&s).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn constant_is_flat() {
        let s: Vec<_> = (1..6).map(|j| (j as f64, 3.0)).collect();
        assert!(fit_scaling(&s).unwrap().exponent.abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_scaling(&[(1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).is_err());
        assert!(fit_scaling(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)]).is_err());
        assert!(fit_scaling(&[(1.0, 1.0), (1.0, 1.0), (3.0, 1.0), (4.0, 1.0)]).is_err());
    }
}
