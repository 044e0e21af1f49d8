//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use maskopt::seed::derive_seed;
use maskopt::*;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexImage {
    let data = (0..rows * cols)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexImage::new(rows, cols, data).unwrap()
}

/// `m` wavelet-sparse unit-norm phantoms on stream `stream` of `seed`.
pub fn phantom_suite(rows: usize, cols: usize, sparsity: f64, m: usize, seed: u64, stream: u64) -> Vec<ComplexImage> {
    (0..m)
        .map(|j| {
            make_phantom(PhantomKind::WaveletSparse, rows, cols, sparsity, derive_seed(seed, stream, j as u64))
                .unwrap()
        })
        .collect()
}

/// O(p²) unitary DFT straight from the definition.
pub fn naive_dft(x: &ComplexImage) -> Vec<Complex64> {
    let (n1, n2) = x.shape();
    let scale = 1.0 / ((n1 * n2) as f64).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); n1 * n2];
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..n1 {
                for b in 0..n2 {
                    let phase = -2.0
                        * std::f64::consts::PI
                        * ((k1 * a) as f64 / n1 as f64 + (k2 * b) as f64 / n2 as f64);
                    acc += x.get(a, b) * Complex64::from_polar(1.0, phase);
                }
            }
            out[k1 * n2 + k2] = acc * scale;
        }
    }
    out
}

pub fn psnr_ref(truth: &ComplexImage, recon: &ComplexImage) -> f64 {
    let peak = truth.magnitudes().into_iter().fold(0.0, f64::max);
    let mut sse = 0.0;
    for r in 0..truth.rows() {
        for c in 0..truth.cols() {
            sse += (truth.get(r, c) - recon.get(r, c)).norm_sqr();
        }
    }
    let mse = sse / truth.len() as f64;
    10.0 * (peak * peak / mse).log10()
}

/// SSIM with an explicit 2D loop per pixel: 11x11 Gaussian (σ = 1.5)
/// restricted to the image and renormalized.
pub fn ssim_ref(truth: &ComplexImage, recon: &ComplexImage) -> f64 {
    let (rows, cols) = truth.shape();
    let peak = truth.magnitudes().into_iter().fold(0.0, f64::max);
    let c1 = (0.01 * peak) * (0.01 * peak);
    let c2 = (0.03 * peak) * (0.03 * peak);
    let mut total = 0.0;
    for i in 0..rows as i64 {
        for j in 0..cols as i64 {
            let (mut w, mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            for di in -5i64..=5 {
                for dj in -5i64..=5 {
                    let (a, b) = (i + di, j + dj);
                    if a < 0 || b < 0 || a >= rows as i64 || b >= cols as i64 {
                        continue;
                    }
                    let g = (-((di * di + dj * dj) as f64) / (2.0 * 1.5 * 1.5)).exp();
                    let x = truth.get(a as usize, b as usize).norm();
                    let y = recon.get(a as usize, b as usize).norm();
                    w += g;
                    sx += g * x;
                    sy += g * y;
                    sxx += g * x * x;
                    syy += g * y * y;
                    sxy += g * x * y;
                }
            }
            let (mx, my) = (sx / w, sy / w);
            let vx = sxx / w - mx * mx;
            let vy = syy / w - my * my;
            let cxy = sxy / w - mx * my;
            total += (2.0 * mx * my + c1) * (2.0 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        }
    }
    total / (rows * cols) as f64
}

/// `1 − ¼‖x − x̂/max(1, ‖x̂‖)‖²` clamped to `[0, 1]`.
pub fn normalized_sq_ref(truth: &ComplexImage, recon: &ComplexImage) -> f64 {
    let norm = recon.data().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let s = 1.0 / norm.max(1.0);
    let err: f64 = truth
        .data()
        .iter()
        .zip(recon.data())
        .map(|(a, b)| (a - b * s).norm_sqr())
        .sum();
    (1.0 - err / 4.0).clamp(0.0, 1.0)
}

fn binomial(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Natural log of an exact integer, from its top 64 bits.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64_digits().first().copied().unwrap_or(0) as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64_digits()[0];
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `log Σ_{ℓ ≤ max} C(n, ℓ)` from exact big-integer arithmetic.
pub fn log_count_exact(n: u64, max: u64) -> f64 {
    let total = (0..=max.min(n)).fold(BigUint::from(0u32), |acc, l| acc + binomial(n, l));
    ln_biguint(&total)
}

/// Frozen sparse-recovery instance: 8 nonzero Haar coefficients on 32x32,
/// 614 of 1024 points drawn uniformly.
pub fn sparse_instance() -> (ComplexImage, SamplingPattern, DecoderConfig) {
    let x = make_phantom(PhantomKind::WaveletSparse, 32, 32, 8.0 / 1024.0, 7).unwrap();
    let fam = SubsetFamily::new(32, 32, FamilyKind::Points).unwrap();
    let p = generate_mask(&MaskGeneratorConfig::new(GeneratorKind::UniformRandom).with_seed(11), fam, 614)
        .unwrap();
    (x, p, DecoderConfig::bp().with_lambda(1e-5).with_tol(1e-12))
}

/// Frozen piecewise-constant instance: 3 rectangles on 32x32, 16 rows from a
/// variable-density draw with the 4 central rows forced.
pub fn piecewise_instance() -> (ComplexImage, SamplingPattern, DecoderConfig) {
    let x = make_phantom(PhantomKind::PiecewiseConstant { rectangles: 3 }, 32, 32, 1.0, 3).unwrap();
    let fam = SubsetFamily::new(32, 32, FamilyKind::Rows).unwrap();
    let cfg = MaskGeneratorConfig::new(GeneratorKind::CoherencePoly).with_center(0, 4).with_seed(3);
    let p = generate_mask(&cfg, fam, 512).unwrap();
    (x, p, DecoderConfig::tv().with_lambda(1e-6).with_max_iters(3000).with_tol(1e-12))
}
