//! Synthetic training signals.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ComplexImage;
use crate::error::{Error, Result};
use crate::seed;
use crate::wavelet::{check_pow2, Haar2d};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PhantomKind {
    /// Sum of axis-aligned rectangles with random positive intensity.
    PiecewiseConstant { rectangles: usize },
    /// Few nonzero Haar coefficients (default levels), complex Gaussian values.
    ///
    /// Coefficient positions are drawn without replacement with every
    /// wavelet band carrying equal total weight, so coarse scales are
    /// populated about as often as fine ones.
    WaveletSparse,
}

/// Generates a unit-norm phantom. Deterministic in `seed`.
///
/// `sparsity` is the fraction of nonzero wavelet coefficients for
/// [`PhantomKind::WaveletSparse`] and is validated but otherwise unused for
/// piecewise-constant phantoms.
pub fn make_phantom(
    kind: PhantomKind,
    rows: usize,
    cols: usize,
    sparsity: f64,
    seed: u64,
) -> Result<ComplexImage> {
    check_pow2(rows, cols)?;
    if !(sparsity > 0.0 && sparsity <= 1.0) {
        return Err(Error::param("sparsity", format!("{sparsity} not in (0, 1]")));
    }
    let mut rng = seed::rng(seed);
    let img = match kind {
        PhantomKind::PiecewiseConstant { rectangles } => {
            if rectangles == 0 {
                return Err(Error::param("rectangles", "need at least one rectangle"));
            }
            let mut data = vec![0.0f64; rows * cols];
            for _ in 0..rectangles {
                let h = rng.random_range(1..=rows.div_ceil(2).max(1));
                let w = rng.random_range(1..=cols.div_ceil(2).max(1));
                let top = rng.random_range(0..=rows - h);
                let left = rng.random_range(0..=cols - w);
                let level: f64 = rng.random_range(0.2..1.0);
                for r in top..top + h {
                    for v in &mut data[r * cols + left..r * cols + left + w] {
                        *v += level;
                    }
                }
            }
            ComplexImage::from_real(rows, cols, &data)?
        }
        PhantomKind::WaveletSparse => {
            let haar = Haar2d::with_default_levels(rows, cols)?;
            let p = rows * cols;
            let nnz = ((sparsity * p as f64).ceil() as usize).clamp(1, p);
            // Efraimidis-Spirakis keys: largest ln(u)/w wins.
            let mut keys: Vec<(f64, usize)> = (0..p)
                .map(|i| {
                    let level = haar.band_level(i / cols, i % cols);
                    let weight = if level == 0 {
                        4f64.powi(haar.levels() as i32)
                    } else {
                        4f64.powi(level as i32) / 3.0
                    };
                    let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                    (u.ln() / weight, i)
                })
                .collect();
            keys.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            let mut coeffs = vec![Complex64::new(0.0, 0.0); p];
            for &(_, i) in &keys[..nnz] {
                let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
                let mut z = Complex64::new(draw(), draw());
                // keep the support exact
                while z.norm() < 1e-3 {
                    z = Complex64::new(draw(), draw());
                }
                coeffs[i] = z;
            }
            let norm = crate::signal::norm2(&coeffs);
            for z in &mut coeffs {
                *z /= norm;
            }
            return haar.synthesize_image(&coeffs);
        }
    };
    img.normalized()
}
