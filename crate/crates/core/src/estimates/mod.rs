//! Counterexample scaling, supporting lemmas and multiplier suprema.

mod counterexample;
mod dyadic;
mod fit;
mod lemmas;
mod multiplier;
mod resonance;

pub use counterexample::{
    bilinear_ratio, bilinear_ratio_on_grid, build_counterexample, build_on_grid, predicted_exponent,
    product_spectrum, BilinearRatio, CounterexampleFamily, CounterexampleSpec, ScalingQuantity,
};
pub use dyadic::{dyadic_envelope, dyadic_measure, dyadic_profile, resonant_range};
pub use fit::{fit_scaling, ScalingFit};
pub use lemmas::{
    calculus_integral, cubic_root_real_parts, polynomial_series, CalculusIntegral, SeriesPolynomial,
    SeriesResult, DEFAULT_CUBIC_RANGE,
};
pub use multiplier::{
    modulation_offsets, multiplier_sup, outer_modes, reduced_sum, MultiplierKind, MultiplierParams,
    MultiplierSup, ScanPoint,
};
pub use resonance::{resonance, InteractionKind};

/// Dyadic sweep `N = 2⁴, …, 2⁹` used for scaling fits.
pub const DYADIC_SWEEP: [i64; 6] = [16, 32, 64, 128, 256, 512];

/// Measures `quantity` of `family` over `ns` and fits its exponent.
pub fn scaling_fit(
    family: CounterexampleFamily,
    quantity: ScalingQuantity,
    k: f64,
    s: f64,
    b: f64,
    ns: &[i64],
) -> crate::Result<ScalingFit> {
    let samples = ns
        .iter()
        .map(|&n| {
            let spec = CounterexampleSpec::new(family, n, k, s)?;
            Ok((n as f64, quantity.pick(&bilinear_ratio(&spec, b)?)))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    fit_scaling(&samples)
}
