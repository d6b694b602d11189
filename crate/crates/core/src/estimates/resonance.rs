//! Exact resonance functions of the two coupling terms.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InteractionKind {
    /// `u·v` with `u` Schrödinger and `v` Airy, output measured on the Schrödinger surface.
    Uv,
    /// `∂ₓ(u₁ ū₂)`, both inputs Schrödinger, output on the Airy surface.
    Du2,
}

/// Resonance function, exactly in 128-bit integers.
///
/// * `Uv`: `-n₁³ + n₁² - 2 n n₁`, which equals
///   `(τ₁ - n₁³) + ((τ-τ₁) + (n-n₁)²) - (τ + n²)` for every `τ, τ₁`.
/// * `Du2`: `-n³ - n² + 2 n₁ n`, which equals
///   `(τ - n³) - ((τ-τ₁) + (n-n₁)²) + (-τ₁ + n₁²)`.
///
/// Results that do not fit in `i64` are reported as overflow.
pub fn resonance(kind: InteractionKind, n: i64, n1: i64) -> Result<i64> {
    let (n, n1) = (n as i128, n1 as i128);
    let ovf = || Error::Overflow("resonance");
    let cube = |x: i128| x.checked_mul(x).and_then(|y| y.checked_mul(x));
    let val = match kind {
        InteractionKind::Uv => {
            let c = cube(n1).ok_or_else(ovf)?;
            let sq = n1.checked_mul(n1).ok_or_else(ovf)?;
            let cross = n.checked_mul(n1).and_then(|x| x.checked_mul(2)).ok_or_else(ovf)?;
            sq.checked_sub(c).and_then(|x| x.checked_sub(cross))
        }
        InteractionKind::Du2 => {
            let c = cube(n).ok_or_else(ovf)?;
            let sq = n.checked_mul(n).ok_or_else(ovf)?;
            let cross = n.checked_mul(n1).and_then(|x| x.checked_mul(2)).ok_or_else(ovf)?;
            cross.checked_sub(c).and_then(|x| x.checked_sub(sq))
        }
    }
    .ok_or_else(ovf)?;
    i64::try_from(val).map_err(|_| ovf())
}
