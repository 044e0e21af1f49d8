//! Reconstruction rules `x̂ = g(Ω, b)`.
//!
//! - zero-fill: `Ψ* P_Ω* b`
//! - bp: `min λ‖Φx‖₁ + ½‖P_Ω Ψ x − b‖²` with `Φ` an orthonormal Haar transform
//! - tv: `min λ TV(x) + ½‖P_Ω Ψ x − b‖²` with isotropic TV, Neumann boundary
//!
//! Both iterative decoders run accelerated proximal gradient with unit step
//! (`‖P_Ω Ψ‖ ≤ 1`) and a function-value restart that keeps the objective
//! monotone. With `epsilon > 0` iteration also stops as soon as the data
//! residual `‖P_Ω Ψ x − b‖₂` drops to `epsilon`.

mod bp;
mod solver;
mod tv;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::SamplingPattern;
use crate::signal::{adjoint_zero_fill, ComplexImage, Measurements};
use crate::wavelet::Haar2d;

pub use bp::WaveletL1;
pub(crate) use bp::soft_threshold;
pub use solver::Regularizer;
pub use tv::{tv_norm, TotalVariation};

use solver::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    ZeroFill,
    Bp,
    Tv,
}

impl std::str::FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero_fill" => Ok(DecoderKind::ZeroFill),
            "bp" => Ok(DecoderKind::Bp),
            "tv" => Ok(DecoderKind::Tv),
            _ => Err(Error::param("decoder", format!("unknown decoder `{s}` (zero_fill|bp|tv)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub kind: DecoderKind,
    pub max_iters: usize,
    pub lambda: f64,
    /// Data-residual target; `0` disables the early stop.
    pub epsilon: f64,
    /// Relative objective change that counts as converged.
    pub tol: f64,
    /// Haar levels for bp; `None` picks `log2(min dim) − 2`.
    pub wavelet_levels: Option<usize>,
    pub tv_inner_iters: usize,
}

impl DecoderConfig {
    pub const DEFAULT_MAX_ITERS: usize = 2000;
    pub const TEST_MAX_ITERS: usize = 300;

    pub fn new(kind: DecoderKind) -> Self {
        Self {
            kind,
            max_iters: Self::DEFAULT_MAX_ITERS,
            lambda: 1e-4,
            epsilon: 0.0,
            tol: 1e-6,
            wavelet_levels: None,
            tv_inner_iters: 20,
        }
    }

    pub fn zero_fill() -> Self {
        Self::new(DecoderKind::ZeroFill)
    }

    pub fn bp() -> Self {
        Self::new(DecoderKind::Bp)
    }

    pub fn tv() -> Self {
        Self::new(DecoderKind::Tv)
    }

    /// Short iteration budget for desk-scale runs.
    pub fn test_profile(mut self) -> Self {
        self.max_iters = Self::TEST_MAX_ITERS;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "must be at least 1"));
        }
        if self.kind != DecoderKind::ZeroFill && !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::param("lambda", format!("{} must be positive", self.lambda)));
        }
        if !(self.epsilon >= 0.0) || !(self.tol >= 0.0) {
            return Err(Error::param("epsilon/tol", "must be nonnegative"));
        }
        if self.kind == DecoderKind::Tv && self.tv_inner_iters == 0 {
            return Err(Error::param("tv_inner_iters", "must be at least 1"));
        }
        Ok(())
    }

    fn haar(&self, rows: usize, cols: usize) -> Result<Haar2d> {
        match self.wavelet_levels {
            Some(l) => Haar2d::new(rows, cols, l),
            None => Haar2d::with_default_levels(rows, cols),
        }
    }
}

/// Side report of an iterative decode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub iterations: usize,
    pub final_objective: f64,
    /// `‖P_Ω Ψ x̂ − b‖₂`.
    pub residual: f64,
    pub converged: bool,
}

fn check_measurements(pattern: &SamplingPattern, b: &Measurements) -> Result<()> {
    crate::signal::ensure_shape(pattern.shape(), b.shape())?;
    if b.indices() != pattern.indices().as_slice() {
        return Err(Error::Format("measurements were not taken with this pattern".into()));
    }
    Ok(())
}

pub fn decode(cfg: &DecoderConfig, pattern: &SamplingPattern, b: &Measurements) -> Result<ComplexImage> {
    decode_with_report(cfg, pattern, b).map(|(x, _)| x)
}

pub fn decode_with_report(
    cfg: &DecoderConfig,
    pattern: &SamplingPattern,
    b: &Measurements,
) -> Result<(ComplexImage, ConvergenceReport)> {
    run(cfg, pattern, b, None)
}

/// Like [`decode_with_report`], also returning the objective after every
/// iteration (index 0 is the initial point).
pub fn decode_traced(
    cfg: &DecoderConfig,
    pattern: &SamplingPattern,
    b: &Measurements,
) -> Result<(ComplexImage, ConvergenceReport, Vec<f64>)> {
    let mut trace = Vec::new();
    let (x, report) = run(cfg, pattern, b, Some(&mut trace))?;
    Ok((x, report, trace))
}

fn run(
    cfg: &DecoderConfig,
    pattern: &SamplingPattern,
    b: &Measurements,
    trace: Option<&mut Vec<f64>>,
) -> Result<(ComplexImage, ConvergenceReport)> {
    cfg.validate()?;
    check_measurements(pattern, b)?;
    let (rows, cols) = pattern.shape();
    let x0 = adjoint_zero_fill(b);
    let problem = Problem::new(b);
    match cfg.kind {
        DecoderKind::ZeroFill => {
            let mut scratch = Vec::new();
            let data = problem.data_term(x0.data(), &mut scratch);
            let report = ConvergenceReport {
                iterations: 0,
                final_objective: data,
                residual: (2.0 * data).sqrt(),
                converged: true,
            };
            if let Some(t) = trace {
                t.push(data);
            }
            Ok((x0, report))
        }
        DecoderKind::Bp => {
            let mut reg = WaveletL1::new(cfg.haar(rows, cols)?, cfg.lambda);
            let (x, report) = solver::solve(&problem, &mut reg, x0.into_data(), cfg, trace);
            Ok((ComplexImage::from_raw(rows, cols, x), report))
        }
        DecoderKind::Tv => {
            let mut reg = TotalVariation::new(rows, cols, cfg.lambda, cfg.tv_inner_iters);
            let (x, report) = solver::solve(&problem, &mut reg, x0.into_data(), cfg, trace);
            Ok((ComplexImage::from_raw(rows, cols, x), report))
        }
    }
}

/// Composite objective the decoder minimizes, evaluated at `x`. For
/// zero-fill this is the data term alone.
pub fn objective(
    cfg: &DecoderConfig,
    pattern: &SamplingPattern,
    b: &Measurements,
    x: &ComplexImage,
) -> Result<f64> {
    cfg.validate()?;
    check_measurements(pattern, b)?;
    crate::signal::ensure_shape(pattern.shape(), x.shape())?;
    let (rows, cols) = x.shape();
    let problem = Problem::new(b);
    let data = problem.data_term(x.data(), &mut Vec::new());
    let reg = match cfg.kind {
        DecoderKind::ZeroFill => 0.0,
        DecoderKind::Bp => WaveletL1::new(cfg.haar(rows, cols)?, cfg.lambda).value(x.data()),
        DecoderKind::Tv => cfg.lambda * tv_norm(x.data(), rows, cols),
    };
    Ok(reg + data)
}

pub(crate) fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}
