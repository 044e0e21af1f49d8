use num_complex::Complex64;

use super::solver::Regularizer;
use crate::wavelet::Haar2d;

/// `λ‖Φx‖₁` for an orthonormal Haar `Φ`; its prox soft-thresholds the
/// wavelet coefficients.
pub struct WaveletL1 {
    haar: Haar2d,
    lambda: f64,
    coeffs: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl WaveletL1 {
    pub fn new(haar: Haar2d, lambda: f64) -> Self {
        Self {
            haar,
            lambda,
            coeffs: Vec::new(),
            scratch: Vec::new(),
        }
    }
}

/// Complex soft threshold `z · max(0, 1 − τ/|z|)`.
pub(crate) fn soft_threshold(z: Complex64, tau: f64) -> Complex64 {
    let m = z.norm();
    if m <= tau {
        Complex64::new(0.0, 0.0)
    } else {
        z * ((m - tau) / m)
    }
}

impl Regularizer for WaveletL1 {
    fn value(&mut self, x: &[Complex64]) -> f64 {
        self.coeffs.clear();
        self.coeffs.extend_from_slice(x);
        self.haar.forward(&mut self.coeffs, &mut self.scratch);
        self.lambda * self.coeffs.iter().map(|z| z.norm()).sum::<f64>()
    }

    fn prox(&mut self, v: &mut [Complex64]) {
        self.haar.forward(v, &mut self.scratch);
        for z in v.iter_mut() {
            *z = soft_threshold(*z, self.lambda);
        }
        self.haar.inverse(v, &mut self.scratch);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_shrinks_modulus() {
        let z = Complex64::new(3.0, 4.0);
        let s = soft_threshold(z, 1.0);
        assert!((s.norm() - 4.0).abs() < 1e-15);
        assert!((s.arg() - z.arg()).abs() < 1e-15);
        assert_eq!(soft_threshold(z, 5.0), Complex64::new(0.0, 0.0));
    }
}
