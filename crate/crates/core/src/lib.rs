//! Learning-based subsampling pattern design for compressive Fourier imaging.
//!
//! Given a set of training images, a reconstruction rule and a performance
//! measure, the crate learns a k-space sampling mask by greedily maximizing
//! the mean training performance per unit of acquisition cost. It also ships
//! the usual variable-density baselines, candidate-mask selection, a noisy
//! training variant with a pluggable denoiser, and calculators for the
//! uniform generalization bounds that justify empirical mask selection.
//!
//! Module map:
//!
//! - [`signal`]: images, k-space, the unitary Fourier operator, phantoms, file I/O
//! - [`wavelet`]: orthonormal multilevel 2D Haar transform
//! - [`metrics`]: PSNR, SSIM and the normalized squared-error score
//! - [`decoders`]: zero-fill, ℓ1-wavelet and total-variation reconstruction
//! - [`sampling`]: subset families, sampling patterns, baseline mask generators
//! - [`greedy`]: greedy mask optimization with nested traces
//! - [`selection`]: best-of-candidates selection and parametric sweeps
//! - [`noisy`]: noise model, denoisers and greedy selection on noisy data
//! - [`theory`]: feasible-set counting, bounds and Monte-Carlo validation

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decoders;
mod error;
pub mod greedy;
pub mod metrics;
pub mod noisy;
pub mod sampling;
pub mod seed;
pub mod selection;
pub mod signal;
pub mod theory;
pub mod wavelet;

pub use num_complex::Complex64;

pub use decoders::{decode, decode_with_report, objective, ConvergenceReport, DecoderConfig, DecoderKind};
pub use error::{Error, Result};
pub use greedy::{
    empirical_performance, greedy_optimize, truncate_to_budget, GreedyConfig, GreedyRecord,
    GreedyTrace,
};
pub use metrics::{normalized_sq, psnr, ssim, PeakConvention, PerformanceMeasure, SsimParams};
pub use noisy::{add_noise, add_noise_all, denoise, greedy_optimize_noisy, Denoiser, NoiseModel};
pub use sampling::{
    enumerate_candidates, generate_mask, Candidate, CostFunction, FamilyKind, GeneratorKind,
    MaskFile, MaskGeneratorConfig, SamplingPattern, Subset, SubsetFamily,
};
pub use selection::{parametric_sweep, select_best, Selection, SweepGrid, SweepReport};
pub use signal::{
    adjoint_zero_fill, fft2_unitary, ifft2_unitary, make_phantom, subsample, ComplexImage,
    KSpace, Measurements, PhantomKind,
};
pub use theory::{
    bound_noiseless, bound_noisy, count_feasible, estimate_residual, validate_bound_mc,
    FeasibleSetCount,
};
pub use wavelet::Haar2d;
