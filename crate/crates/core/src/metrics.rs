//! Performance measures `η(x, x̂)`: higher is better.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{ensure_shape, ComplexImage};

/// Value returned by [`psnr`] for an exact reconstruction.
pub const PSNR_CAP_DB: f64 = 1000.0;

/// Root-mean-square errors below this fraction of the peak are round-off
/// from the transforms and count as an exact reconstruction.
pub const EXACT_RMSE_FRACTION: f64 = 1e-12;

/// Peak (dynamic range) used by PSNR and SSIM.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakConvention {
    /// Largest magnitude of the ground truth.
    TruthMax,
    Fixed(f64),
}

impl PeakConvention {
    fn resolve(&self, truth: &ComplexImage) -> f64 {
        match *self {
            PeakConvention::TruthMax => truth.data().iter().map(|z| z.norm()).fold(0.0, f64::max),
            PeakConvention::Fixed(v) => v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SsimParams {
    /// Odd window side length, at least 3.
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: PeakConvention,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            window: 11,
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            dynamic_range: PeakConvention::TruthMax,
        }
    }
}

impl SsimParams {
    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window.is_multiple_of(2) {
            return Err(Error::param("window", format!("{} must be odd and >= 3", self.window)));
        }
        if !(self.sigma > 0.0) || !(self.k1 > 0.0) || !(self.k2 > 0.0) {
            return Err(Error::param("ssim", "sigma, k1 and k2 must be positive"));
        }
        if let PeakConvention::Fixed(v) = self.dynamic_range {
            if !(v > 0.0) {
                return Err(Error::param("dynamic_range", "must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PerformanceMeasure {
    Psnr { peak: PeakConvention },
    Ssim(SsimParams),
    NormalizedSq,
}

impl PerformanceMeasure {
    pub fn psnr() -> Self {
        PerformanceMeasure::Psnr {
            peak: PeakConvention::TruthMax,
        }
    }

    pub fn ssim() -> Self {
        PerformanceMeasure::Ssim(SsimParams::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            PerformanceMeasure::Psnr { .. } => "psnr",
            PerformanceMeasure::Ssim(_) => "ssim",
            PerformanceMeasure::NormalizedSq => "normalized_sq",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PerformanceMeasure::Psnr {
                peak: PeakConvention::Fixed(v),
            } if !(*v > 0.0) => Err(Error::param("peak", "must be positive")),
            PerformanceMeasure::Ssim(p) => p.validate(),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, truth: &ComplexImage, recon: &ComplexImage) -> Result<f64> {
        match self {
            PerformanceMeasure::Psnr { peak } => psnr_with_peak(truth, recon, *peak),
            PerformanceMeasure::Ssim(p) => ssim_with(truth, recon, p),
            PerformanceMeasure::NormalizedSq => normalized_sq(truth, recon),
        }
    }
}

impl std::str::FromStr for PerformanceMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psnr" => Ok(Self::psnr()),
            "ssim" => Ok(Self::ssim()),
            "normalized_sq" => Ok(PerformanceMeasure::NormalizedSq),
            _ => Err(Error::param("metric", format!("unknown metric `{s}` (psnr|ssim|normalized_sq)"))),
        }
    }
}

fn mse(truth: &ComplexImage, recon: &ComplexImage) -> f64 {
    truth
        .data()
        .iter()
        .zip(recon.data())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        / truth.len() as f64
}

/// PSNR in dB with the truth's peak magnitude. Reconstructions within
/// round-off of the truth (see [`EXACT_RMSE_FRACTION`]) score [`PSNR_CAP_DB`].
pub fn psnr(truth: &ComplexImage, recon: &ComplexImage) -> Result<f64> {
    psnr_with_peak(truth, recon, PeakConvention::TruthMax)
}

pub fn psnr_with_peak(truth: &ComplexImage, recon: &ComplexImage, peak: PeakConvention) -> Result<f64> {
    ensure_shape(truth.shape(), recon.shape())?;
    let peak = peak.resolve(truth);
    if peak == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let err = mse(truth, recon);
    if err <= (EXACT_RMSE_FRACTION * peak).powi(2) {
        return Ok(PSNR_CAP_DB);
    }
    Ok((10.0 * (peak * peak / err).log10()).min(PSNR_CAP_DB))
}

/// Mean SSIM of the magnitude images with the default Gaussian window.
pub fn ssim(truth: &ComplexImage, recon: &ComplexImage) -> Result<f64> {
    ssim_with(truth, recon, &SsimParams::default())
}

/// Normalized 1D Gaussian taps, centered.
fn gaussian_taps(window: usize, sigma: f64) -> Vec<f64> {
    let half = (window / 2) as f64;
    let taps: Vec<f64> = (0..window)
        .map(|i| {
            let d = i as f64 - half;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    taps
}

/// Separable weighted mean with the window truncated at the borders and the
/// remaining weights renormalized.
fn local_mean(values: &[f64], rows: usize, cols: usize, taps: &[f64]) -> Vec<f64> {
    let half = taps.len() / 2;
    let pass = |src: &[f64], n: usize, stride: usize, lines: usize, line_stride: usize| {
        let mut out = vec![0.0; src.len()];
        for l in 0..lines {
            let base = l * line_stride;
            for i in 0..n {
                let lo = i.saturating_sub(half);
                let hi = (i + half).min(n - 1);
                let (mut acc, mut wsum) = (0.0, 0.0);
                for j in lo..=hi {
                    let w = taps[j + half - i];
                    acc += w * src[base + j * stride];
                    wsum += w;
                }
                out[base + i * stride] = acc / wsum;
            }
        }
        out
    };
    let horizontal = pass(values, cols, 1, rows, cols);
    pass(&horizontal, rows, cols, cols, 1)
}

pub fn ssim_with(truth: &ComplexImage, recon: &ComplexImage, params: &SsimParams) -> Result<f64> {
    ensure_shape(truth.shape(), recon.shape())?;
    params.validate()?;
    let (rows, cols) = truth.shape();
    let x = truth.magnitudes();
    let y = recon.magnitudes();
    let range = params.dynamic_range.resolve(truth);
    let c1 = (params.k1 * range).powi(2);
    let c2 = (params.k2 * range).powi(2);
    let taps = gaussian_taps(params.window, params.sigma);

    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a * b).collect();
    let mx = local_mean(&x, rows, cols, &taps);
    let my = local_mean(&y, rows, cols, &taps);
    let exx = local_mean(&xx, rows, cols, &taps);
    let eyy = local_mean(&yy, rows, cols, &taps);
    let exy = local_mean(&xy, rows, cols, &taps);

    let mut total = 0.0;
    for i in 0..rows * cols {
        let (ux, uy) = (mx[i], my[i]);
        let vx = exx[i] - ux * ux;
        let vy = eyy[i] - uy * uy;
        let cxy = exy[i] - ux * uy;
        total += ((2.0 * ux * uy + c1) * (2.0 * cxy + c2))
            / ((ux * ux + uy * uy + c1) * (vx + vy + c2));
    }
    Ok(total / (rows * cols) as f64)
}

/// `1 − ¼‖x − x̂‖²` with `x̂` shrunk onto the unit ball; always in `[0, 1]`.
///
/// The truth must have unit norm (within 1e-9).
pub fn normalized_sq(truth: &ComplexImage, recon: &ComplexImage) -> Result<f64> {
    ensure_shape(truth.shape(), recon.shape())?;
    let n = truth.norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::param("truth", format!("normalized_sq needs a unit-norm truth, got norm {n}")));
    }
    let rn = recon.norm();
    let scale = if rn > 1.0 { 1.0 / rn } else { 1.0 };
    let err: f64 = truth
        .data()
        .iter()
        .zip(recon.data())
        .map(|(a, b)| (a - b * scale).norm_sqr())
        .sum();
    Ok((1.0 - 0.25 * err).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn img(values: &[f64], rows: usize) -> ComplexImage {
        ComplexImage::from_real(rows, values.len() / rows, values).unwrap()
    }

    #[test]
    fn psnr_cases() {
        let t = img(&[1.0, 0.0, 0.5, 0.25], 2);
        assert_eq!(psnr(&t, &t).unwrap(), PSNR_CAP_DB);
        let close = img(&[1.0 + 1e-14, 0.0, 0.5, 0.25], 2);
        assert_eq!(psnr(&t, &close).unwrap(), PSNR_CAP_DB);
        let near = img(&[1.0 + 1e-9, 0.0, 0.5, 0.25], 2);
        assert!((psnr(&t, &near).unwrap() - 186.02).abs() < 0.01);
        let r = img(&[2.0, 1.0, 1.5, 1.25], 2);
        assert!(psnr(&t, &r).unwrap().abs() < 1e-12);
        assert!(psnr(&ComplexImage::zeros(2, 2), &t).is_err());
        assert!(psnr(&t, &ComplexImage::zeros(4, 1)).is_err());
    }

    #[test]
    fn normalized_sq_cases() {
        let t = img(&[0.6, 0.8], 1);
        assert_eq!(normalized_sq(&t, &t).unwrap(), 1.0);
        assert!(normalized_sq(&t, &t.scaled(-1.0)).unwrap().abs() < 1e-15);
        assert!((normalized_sq(&t, &ComplexImage::zeros(1, 2)).unwrap() - 0.75).abs() < 1e-15);
        // scaled-up recon is shrunk back to the unit sphere
        assert!((normalized_sq(&t, &t.scaled(10.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!(normalized_sq(&t.scaled(2.0), &t).is_err());
    }

    #[test]
    fn ssim_identity_is_exactly_one() {
        let t = ComplexImage::new(
            5,
            7,
            (0..35).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect(),
        )
        .unwrap();
        assert_eq!(ssim(&t, &t).unwrap(), 1.0);
    }

    #[test]
    fn ssim_param_validation() {
        let t = img(&[1.0; 16], 4);
        let p = SsimParams {
            window: 4,
            ..SsimParams::default()
        };
        assert!(ssim_with(&t, &t, &p).is_err());
        let p = SsimParams {
            k1: 0.0,
            ..SsimParams::default()
        };
        assert!(ssim_with(&t, &t, &p).is_err());
    }

    #[test]
    fn parse_metric_names() {
        for name in ["psnr", "ssim", "normalized_sq"] {
            assert_eq!(name.parse::<PerformanceMeasure>().unwrap().name(), name);
        }
        assert!("mse".parse::<PerformanceMeasure>().is_err());
    }
}
