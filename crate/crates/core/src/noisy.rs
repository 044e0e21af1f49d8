//! Noisy training data: Gaussian noise model, denoisers, and greedy
//! selection scored against denoised references.

use num_complex::Complex64;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::decoders::soft_threshold;
use crate::error::{Error, Result};
use crate::greedy::{self, GreedyConfig, GreedyTrace, Scorer};
use crate::sampling::SamplingPattern;
use crate::seed;
use crate::signal::ComplexImage;
use crate::wavelet::Haar2d;

/// Circularly symmetric complex Gaussian noise, `sigma` per component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::param("sigma", format!("{sigma} must be finite and >= 0")));
        }
        Ok(Self { sigma, seed })
    }

    /// Model for the `index`-th image of a dataset.
    pub fn for_index(&self, index: u64) -> Self {
        Self {
            sigma: self.sigma,
            seed: seed::derive_seed(self.seed, 0x6e_6f69_7365, index),
        }
    }
}

/// `z = x + v`. Deterministic in the model's seed; `sigma = 0` returns `x`
/// bit for bit.
pub fn add_noise(img: &ComplexImage, model: &NoiseModel) -> Result<ComplexImage> {
    NoiseModel::new(model.sigma, model.seed)?;
    if model.sigma == 0.0 {
        return Ok(img.clone());
    }
    let normal = Normal::new(0.0, model.sigma).map_err(|e| Error::param("sigma", e.to_string()))?;
    let mut rng = seed::rng(model.seed);
    let data = img
        .data()
        .iter()
        .map(|z| {
            let re = normal.sample(&mut rng);
            let im = normal.sample(&mut rng);
            z + Complex64::new(re, im)
        })
        .collect();
    ComplexImage::new(img.rows(), img.cols(), data)
}

/// Noisy copies of a dataset, image `j` using [`NoiseModel::for_index`].
pub fn add_noise_all(images: &[ComplexImage], model: &NoiseModel) -> Result<Vec<ComplexImage>> {
    images
        .iter()
        .enumerate()
        .map(|(j, x)| add_noise(x, &model.for_index(j as u64)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Denoiser {
    Identity,
    /// Soft-thresholds the Haar detail coefficients at `tau`; the coarse
    /// approximation band is left untouched.
    WaveletSoftThreshold { tau: f64, levels: Option<usize> },
}

impl Denoiser {
    /// Wavelet denoiser with the `3σ` threshold.
    pub fn wavelet_for_sigma(sigma: f64) -> Self {
        Denoiser::WaveletSoftThreshold {
            tau: 3.0 * sigma,
            levels: None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Denoiser::Identity => "identity",
            Denoiser::WaveletSoftThreshold { .. } => "wavelet",
        }
    }
}

/// `ξ(z)`.
pub fn denoise(z: &ComplexImage, d: &Denoiser) -> Result<ComplexImage> {
    match *d {
        Denoiser::Identity => Ok(z.clone()),
        Denoiser::WaveletSoftThreshold { tau, levels } => {
            if !(tau >= 0.0 && tau.is_finite()) {
                return Err(Error::param("tau", format!("{tau} must be finite and >= 0")));
            }
            let (rows, cols) = z.shape();
            let haar = match levels {
                Some(l) => Haar2d::new(rows, cols, l)?,
                None => Haar2d::with_default_levels(rows, cols)?,
            };
            let mut c = haar.analyze_image(z)?;
            for (i, v) in c.iter_mut().enumerate() {
                if haar.band_level(i / cols, i % cols) != 0 {
                    *v = soft_threshold(*v, tau);
                }
            }
            haar.synthesize_image(&c)
        }
    }
}

/// Greedy selection from noisy training signals `z_j`.
///
/// References `ξ(z_j)` are computed once up front; each candidate is scored
/// by `η(ξ(z_j), g(Ω, P_Ω Ψ z_j))`, i.e. measurements still come from the
/// noisy signals.
pub fn greedy_optimize_noisy(
    cfg: &GreedyConfig,
    noisy: &[ComplexImage],
    denoiser: &Denoiser,
) -> Result<(SamplingPattern, GreedyTrace)> {
    let references = noisy
        .iter()
        .map(|z| denoise(z, denoiser))
        .collect::<Result<Vec<_>>>()?;
    let scorer = Scorer::new(references, noisy, cfg.decoder, cfg.metric)?;
    greedy::run(cfg, &scorer)
}
