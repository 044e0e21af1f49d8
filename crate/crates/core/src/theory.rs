//! Uniform generalization bounds for empirical mask selection.
//!
//! For a performance measure in `[0, 1]`, Hoeffding's inequality plus a
//! union bound over the feasible set `A` give, with probability `1 − δ` over
//! `m` i.i.d. training signals,
//!
//! ```text
//! |empirical(Ω) − E[η_Ω]| ≤ sqrt( log(2|A|/δ) / (2m) )   for all Ω ∈ A
//! ```
//!
//! With noisy training signals and an `L`-Lipschitz measure the deviation
//! grows by `L · E‖ṽ‖₂`, where `ṽ` is the noise left after denoising.
//! [`validate_bound_mc`] checks the noiseless statement empirically.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::decoders::DecoderConfig;
use crate::error::{Error, Result};
use crate::greedy::Scorer;
use crate::metrics::PerformanceMeasure;
use crate::noisy::{add_noise, denoise, Denoiser, NoiseModel};
use crate::sampling::{CostFunction, SamplingPattern, SubsetFamily};
use crate::seed::derive_seed;
use crate::signal::{make_phantom, ComplexImage, PhantomKind};

/// `log |A|` for a family of masks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibleSetCount {
    /// Natural log of the number of feasible patterns.
    pub log_cardinality: f64,
    pub description: String,
}

impl FeasibleSetCount {
    /// An explicitly enumerated set of `n ≥ 1` candidate masks.
    pub fn explicit(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("candidate set"));
        }
        Ok(Self {
            log_cardinality: (n as f64).ln(),
            description: format!("{n} explicit candidates"),
        })
    }
}

/// `ln C(n, k)` via log-gamma.
pub fn log_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Counts unions of at most `L` family members, `L` being the largest number
/// of members whose sizes fit in `budget` (`Ω = ∅` included):
/// `log |A| = log Σ_{ℓ ≤ L} C(n, ℓ)`.
///
/// Exact for disjoint families (points, rows, cols); for rows and columns
/// together overlapping unions are counted once per subset choice, which
/// over-counts distinct patterns and so keeps the bound valid.
pub fn count_feasible(
    family: &SubsetFamily,
    cost: CostFunction,
    budget: i64,
) -> Result<FeasibleSetCount> {
    let CostFunction::Cardinality = cost;
    if budget < 0 {
        return Err(Error::param("budget", format!("{budget} is negative")));
    }
    let budget = budget as usize;
    let mut sizes: Vec<usize> = family.members().iter().map(|&s| family.size(s)).collect();
    sizes.sort_unstable();
    let n = sizes.len();
    let mut max_subsets = 0;
    let mut used = 0usize;
    for s in &sizes {
        if used + s > budget {
            break;
        }
        used += s;
        max_subsets += 1;
    }
    let log_cardinality = if max_subsets >= n {
        n as f64 * std::f64::consts::LN_2
    } else {
        let terms: Vec<f64> = (0..=max_subsets).map(|l| log_binomial(n, l)).collect();
        let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
    };
    Ok(FeasibleSetCount {
        log_cardinality,
        description: format!(
            "unions of at most {max_subsets} of {n} {} subsets (budget {budget})",
            family.kind()
        ),
    })
}

fn check_m_delta(m: usize, delta: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::param("m", "need at least one training signal"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("{delta} not in (0, 1)")));
    }
    Ok(())
}

/// `sqrt( (log 2 + log|A| − log δ) / (2m) )`.
pub fn bound_noiseless(m: usize, count: &FeasibleSetCount, delta: f64) -> Result<f64> {
    check_m_delta(m, delta)?;
    if !(count.log_cardinality >= 0.0) {
        return Err(Error::param("log_cardinality", "must be >= 0"));
    }
    Ok(((std::f64::consts::LN_2 + count.log_cardinality - delta.ln()) / (2.0 * m as f64)).sqrt())
}

/// `L · E‖ṽ‖₂ + bound_noiseless(m, count, δ)`.
pub fn bound_noisy(
    m: usize,
    count: &FeasibleSetCount,
    delta: f64,
    lipschitz: f64,
    expected_residual: f64,
) -> Result<f64> {
    if !(lipschitz >= 0.0) || !(expected_residual >= 0.0) {
        return Err(Error::param("lipschitz/residual", "must be nonnegative"));
    }
    Ok(lipschitz * expected_residual + bound_noiseless(m, count, delta)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Monte-Carlo estimate of `E‖ξ(x + v) − x‖₂` on a fixed reference `x`
/// (pass a zero image to measure the denoiser on pure noise). Trial `t`
/// uses `model.for_index(t)`.
pub fn estimate_residual(
    denoiser: &Denoiser,
    model: &NoiseModel,
    reference: &ComplexImage,
    trials: usize,
) -> Result<ResidualEstimate> {
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let samples = (0..trials)
        .map(|t| {
            let z = add_noise(reference, &model.for_index(t as u64))?;
            denoise(&z, denoiser)?.distance(reference)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = trials as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let std_error = if trials > 1 {
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(ResidualEstimate {
        mean,
        std_error,
        trials,
    })
}

/// Where training and held-out signals come from.
#[derive(Clone, Debug, PartialEq)]
pub enum SignalDistribution {
    Phantom {
        kind: PhantomKind,
        rows: usize,
        cols: usize,
        sparsity: f64,
    },
    /// Every draw returns the same signal.
    PointMass(ComplexImage),
}

impl SignalDistribution {
    pub fn sample(&self, seed: u64) -> Result<ComplexImage> {
        match self {
            SignalDistribution::Phantom {
                kind,
                rows,
                cols,
                sparsity,
            } => make_phantom(*kind, *rows, *cols, *sparsity, seed),
            SignalDistribution::PointMass(x) => Ok(x.clone()),
        }
    }

    fn shape(&self) -> (usize, usize) {
        match self {
            SignalDistribution::Phantom { rows, cols, .. } => (*rows, *cols),
            SignalDistribution::PointMass(x) => x.shape(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct McValidationConfig {
    pub distribution: SignalDistribution,
    /// The (restricted) feasible set `A`.
    pub candidates: Vec<SamplingPattern>,
    pub decoder: DecoderConfig,
    /// Must be [`PerformanceMeasure::NormalizedSq`].
    pub metric: PerformanceMeasure,
    pub m: usize,
    pub delta: f64,
    pub trials: usize,
    /// Held-out draws used to estimate the true means.
    pub holdout: usize,
    pub seed: u64,
    pub workers: usize,
}

impl McValidationConfig {
    pub const MAX_PIXELS: usize = 64 * 64;
    pub const MAX_DECODES: usize = 50_000_000;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub log_cardinality: f64,
    pub bound: f64,
    pub true_means: Vec<f64>,
    /// Per-trial `max_Ω |empirical − true|`.
    pub max_deviations: Vec<f64>,
    pub violations: usize,
    pub violation_fraction: f64,
    /// `δ + 3 sqrt(δ(1 − δ)/trials)`.
    pub threshold: f64,
    pub pass: bool,
}

/// Mean as `v₀ + Σ(vᵢ − v₀)/n`, exact when all values coincide.
fn shifted_mean(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let mut it = values.clone();
    let Some(v0) = it.next() else { return f64::NAN };
    let n = values.clone().count() as f64;
    v0 + values.map(|v| v - v0).sum::<f64>() / n
}

/// Draws `trials` training sets of size `m` and counts how often the largest
/// deviation between empirical and (held-out) true mean performance over the
/// candidate set exceeds [`bound_noiseless`].
pub fn validate_bound_mc(cfg: &McValidationConfig) -> Result<McReport> {
    if cfg.metric != PerformanceMeasure::NormalizedSq {
        return Err(Error::param("metric", "bound validation needs normalized_sq (values in [0, 1])"));
    }
    check_m_delta(cfg.m, cfg.delta)?;
    if cfg.trials == 0 || cfg.holdout == 0 {
        return Err(Error::param("trials/holdout", "must be at least 1"));
    }
    let count = FeasibleSetCount::explicit(cfg.candidates.len())?;
    let (rows, cols) = cfg.distribution.shape();
    let decodes = cfg.candidates.len() * (cfg.holdout + cfg.trials * cfg.m);
    if rows * cols > McValidationConfig::MAX_PIXELS || decodes > McValidationConfig::MAX_DECODES {
        return Err(Error::Infeasible(format!(
            "{rows}x{cols} images with {decodes} decodes exceed the Monte-Carlo size limits"
        )));
    }
    for c in &cfg.candidates {
        crate::signal::ensure_shape((rows, cols), c.shape())?;
    }
    let bound = bound_noiseless(cfg.m, &count, cfg.delta)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::param("workers", e.to_string()))?;

    // Scores of one signal under every candidate.
    let score = |seed: u64| -> Result<Vec<f64>> {
        let x = cfg.distribution.sample(seed)?;
        let scorer = Scorer::noiseless(std::slice::from_ref(&x), cfg.decoder, cfg.metric)?;
        cfg.candidates
            .iter()
            .map(|p| scorer.scores(p).map(|s| s[0]))
            .collect()
    };

    let holdout: Vec<Vec<f64>> = pool.install(|| {
        (0..cfg.holdout)
            .into_par_iter()
            .map(|j| score(derive_seed(cfg.seed, 0, j as u64)))
            .collect::<Result<Vec<_>>>()
    })?;
    let k = cfg.candidates.len();
    let true_means: Vec<f64> = (0..k)
        .map(|c| shifted_mean(holdout.iter().map(move |s| s[c])))
        .collect();

    let max_deviations: Vec<f64> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let sample = (0..cfg.m)
                    .map(|j| score(derive_seed(cfg.seed, 1 + t as u64, j as u64)))
                    .collect::<Result<Vec<_>>>()?;
                Ok((0..k)
                    .map(|c| (shifted_mean(sample.iter().map(|s| s[c])) - true_means[c]).abs())
                    .fold(0.0, f64::max))
            })
            .collect::<Result<Vec<f64>>>()
    })?;

    let violations = max_deviations.iter().filter(|&&d| d > bound).count();
    let violation_fraction = violations as f64 / cfg.trials as f64;
    let threshold = cfg.delta + 3.0 * (cfg.delta * (1.0 - cfg.delta) / cfg.trials as f64).sqrt();
    Ok(McReport {
        log_cardinality: count.log_cardinality,
        bound,
        true_means,
        max_deviations,
        violations,
        violation_fraction,
        threshold,
        pass: violation_fraction <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::FamilyKind;

    #[test]
    fn zero_budget_counts_only_the_empty_pattern() {
        let fam = SubsetFamily::new(16, 16, FamilyKind::Rows).unwrap();
        let c = count_feasible(&fam, CostFunction::Cardinality, 0).unwrap();
        assert_eq!(c.log_cardinality, 0.0);
        assert!(count_feasible(&fam, CostFunction::Cardinality, -1).is_err());
    }

    #[test]
    fn full_power_set() {
        let fam = SubsetFamily::new(2, 2, FamilyKind::Points).unwrap();
        let c = count_feasible(&fam, CostFunction::Cardinality, 4).unwrap();
        assert_eq!(c.log_cardinality, 16f64.ln());
        let fam = SubsetFamily::new(32, 32, FamilyKind::Points).unwrap();
        let c = count_feasible(&fam, CostFunction::Cardinality, 1024).unwrap();
        assert_eq!(c.log_cardinality, 1024.0 * std::f64::consts::LN_2);
    }

    #[test]
    fn small_counts_match_enumeration() {
        // rows family, 4 rows of 4 points, budget 9 -> at most 2 rows
        let fam = SubsetFamily::new(4, 4, FamilyKind::Rows).unwrap();
        let c = count_feasible(&fam, CostFunction::Cardinality, 9).unwrap();
        assert!((c.log_cardinality - 11f64.ln()).abs() < 1e-14);
        // non-square rows_and_cols: sizes are 2 (cols) x4, 4 (rows) x2; budget 7 fits 3 cols
        let fam = SubsetFamily::new(2, 4, FamilyKind::RowsAndCols).unwrap();
        let c = count_feasible(&fam, CostFunction::Cardinality, 7).unwrap();
        assert!((c.log_cardinality - (1.0f64 + 6.0 + 15.0 + 20.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn bound_algebra() {
        let one = FeasibleSetCount::explicit(1).unwrap();
        let delta = 2.0 * (-2.0f64).exp();
        assert!((bound_noiseless(1, &one, delta).unwrap() - 1.0).abs() < 1e-15);
        let c = FeasibleSetCount::explicit(37).unwrap();
        let a = bound_noiseless(10, &c, 0.05).unwrap();
        let b = bound_noiseless(40, &c, 0.05).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-15);
        assert!(bound_noiseless(0, &c, 0.05).is_err());
        assert!(bound_noiseless(1, &c, 1.0).is_err());
        assert!(bound_noiseless(1, &c, 0.0).is_err());
    }

    #[test]
    fn noisy_bound_reduces_to_noiseless() {
        let c = FeasibleSetCount::explicit(8).unwrap();
        let base = bound_noiseless(20, &c, 0.1).unwrap();
        assert_eq!(bound_noisy(20, &c, 0.1, 1.0, 0.0).unwrap(), base);
        assert_eq!(bound_noisy(20, &c, 0.1, 0.0, 3.0).unwrap(), base);
        assert!(bound_noisy(20, &c, 0.1, -1.0, 0.0).is_err());
    }

    #[test]
    fn zero_sigma_residual_is_zero() {
        let x = ComplexImage::zeros(8, 8);
        let r = estimate_residual(&Denoiser::Identity, &NoiseModel::new(0.0, 1).unwrap(), &x, 5).unwrap();
        assert_eq!(r.mean, 0.0);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn shifted_mean_is_exact_for_constants() {
        let v = 0.1f64 + 0.2;
        assert_eq!(shifted_mean(std::iter::repeat_n(v, 10_000)), v);
        assert!((shifted_mean([1.0, 2.0, 3.0].into_iter()) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn mc_rejects_non_normalized_metric() {
        let fam = SubsetFamily::new(8, 8, FamilyKind::Rows).unwrap();
        let cfg = McValidationConfig {
            distribution: SignalDistribution::Phantom {
                kind: PhantomKind::WaveletSparse,
                rows: 8,
                cols: 8,
                sparsity: 0.1,
            },
            candidates: vec![SamplingPattern::empty(fam)],
            decoder: DecoderConfig::zero_fill(),
            metric: PerformanceMeasure::psnr(),
            m: 5,
            delta: 0.1,
            trials: 2,
            holdout: 10,
            seed: 0,
            workers: 1,
        };
        assert!(validate_bound_mc(&cfg).is_err());
        let big = McValidationConfig {
            metric: PerformanceMeasure::NormalizedSq,
            holdout: 100_000_000,
            ..cfg
        };
        assert!(matches!(validate_bound_mc(&big), Err(Error::Infeasible(_))));
    }
}
