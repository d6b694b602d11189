//! Fourth-order exponential time differencing (Cox-Matthews form).

use num_complex::Complex64;

/// `φ₁, φ₂, φ₃` at `z`: `φ_k(z) = Σ_j z^j / (j+k)!`.
///
/// Taylor series for `|z| < 0.5`, closed forms otherwise.
pub fn phi123(z: Complex64) -> [Complex64; 3] {
    if z.norm() < 0.5 {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (k, slot) in out.iter_mut().enumerate() {
            // 1/(k+1)! as the leading coefficient
            let mut coef = 1.0 / (1..=k + 1).map(|x| x as f64).product::<f64>();
            let mut zp = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..24 {
                acc += zp * coef;
                zp *= z;
                coef /= (j + k + 2) as f64;
            }
            *slot = acc;
        }
        out
    } else {
        let ez = z.exp();
        let one = Complex64::new(1.0, 0.0);
        let p1 = (ez - one) / z;
        let p2 = (ez - one - z) / (z * z);
        let p3 = (ez - one - z - z * z * 0.5) / (z * z * z);
        [p1, p2, p3]
    }
}

/// Per-mode coefficients of one ETDRK4 step of size `h` for `y' = L y + N(y)`.
#[derive(Debug, Clone)]
pub struct EtdCoefficients {
    pub e: Vec<Complex64>,
    pub e_half: Vec<Complex64>,
    /// `(e^{Lh/2} - 1)/L = (h/2) φ₁(Lh/2)`.
    pub q: Vec<Complex64>,
    /// `h (φ₁ - 3φ₂ + 4φ₃)(Lh)`.
    pub f1: Vec<Complex64>,
    /// `h (φ₂ - 2φ₃)(Lh)`.
    pub f2: Vec<Complex64>,
    /// `h (-φ₂ + 4φ₃)(Lh)`.
    pub f3: Vec<Complex64>,
}

impl EtdCoefficients {
    pub fn new(symbol: &[Complex64], h: f64) -> Self {
        let n = symbol.len();
        let mut c = Self {
            e: Vec::with_capacity(n),
            e_half: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        for &l in symbol {
            let z = l * h;
            let [p1, p2, p3] = phi123(z);
            let [h1, _, _] = phi123(z * 0.5);
            c.e.push(z.exp());
            c.e_half.push((z * 0.5).exp());
            c.q.push(h1 * (0.5 * h));
            c.f1.push((p1 - p2 * 3.0 + p3 * 4.0) * h);
            c.f2.push((p2 - p3 * 2.0) * h);
            c.f3.push((-p2 + p3 * 4.0) * h);
        }
        c
    }
}
