//! Greedy mask optimization.
//!
//! Starting from the empty pattern, every iteration scores each feasible
//! subset by the mean training performance of `Ω ∪ S`, and adds the subset
//! with the largest gain per unit of added cost. Ties go to the earliest
//! subset in canonical order and comparisons are exact, so the result does
//! not depend on the number of workers. The addition order is recorded,
//! which makes masks for any smaller budget available by truncation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoders::{decode, DecoderConfig};
use crate::error::{Error, Result};
use crate::metrics::PerformanceMeasure;
use crate::sampling::{enumerate_candidates, CostFunction, SamplingPattern, Subset, SubsetFamily};
use crate::signal::{ensure_shape, fft2_unitary, subsample, ComplexImage, KSpace};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyConfig {
    pub decoder: DecoderConfig,
    pub metric: PerformanceMeasure,
    pub family: SubsetFamily,
    #[serde(default)]
    pub cost: CostFunction,
    /// Maximum cost Γ in k-space points.
    pub budget: usize,
    pub workers: usize,
    /// Keep every candidate's score in the trace.
    #[serde(default)]
    pub record_candidates: bool,
}

impl GreedyConfig {
    pub fn new(
        decoder: DecoderConfig,
        metric: PerformanceMeasure,
        family: SubsetFamily,
        budget: usize,
    ) -> Self {
        Self {
            decoder,
            metric,
            family,
            cost: CostFunction::Cardinality,
            budget,
            workers: 1,
            record_candidates: false,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.decoder.validate()?;
        self.metric.validate()?;
        if self.workers == 0 {
            return Err(Error::param("workers", "must be at least 1"));
        }
        let smallest = self
            .family
            .members()
            .iter()
            .map(|&s| self.family.size(s))
            .min()
            .unwrap_or(0);
        if self.budget < smallest {
            return Err(Error::Infeasible(format!(
                "budget {} is below the smallest subset cost {smallest}",
                self.budget
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub subset: Subset,
    pub marginal_cost: usize,
    pub performance: f64,
    pub normalized_gain: f64,
}

/// One greedy iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyRecord {
    pub iteration: usize,
    pub subset: Subset,
    /// `η(Ω ∪ S*) − η(Ω)`.
    pub marginal_gain: f64,
    /// Marginal gain divided by marginal cost.
    pub normalized_gain: f64,
    /// Mean training performance after adding the subset.
    pub performance: f64,
    /// Pattern cost after adding the subset.
    pub cost: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<CandidateScore>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub family: SubsetFamily,
    pub budget: usize,
    /// Mean performance of the empty pattern.
    pub initial_performance: f64,
    pub records: Vec<GreedyRecord>,
}

impl GreedyTrace {
    pub fn subsets(&self) -> Vec<Subset> {
        self.records.iter().map(|r| r.subset).collect()
    }

    pub fn final_cost(&self) -> usize {
        self.records.last().map_or(0, |r| r.cost)
    }

    /// One JSON object per record, newline-terminated.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn records_from_jsonl(text: &str) -> Result<Vec<GreedyRecord>> {
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(Error::from))
            .collect()
    }
}

/// Reference signals and the k-space the measurements are taken from.
///
/// In the noiseless setting both come from the same `x_j`; with noisy data
/// the reference is the denoised signal and the k-space the noisy one.
pub(crate) struct Scorer {
    references: Vec<ComplexImage>,
    spectra: Vec<KSpace>,
    decoder: DecoderConfig,
    metric: PerformanceMeasure,
}

impl Scorer {
    pub(crate) fn new(
        references: Vec<ComplexImage>,
        sources: &[ComplexImage],
        decoder: DecoderConfig,
        metric: PerformanceMeasure,
    ) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::Empty("training set"));
        }
        let shape = sources[0].shape();
        for (r, s) in references.iter().zip(sources) {
            ensure_shape(shape, s.shape())?;
            ensure_shape(shape, r.shape())?;
        }
        decoder.validate()?;
        metric.validate()?;
        Ok(Self {
            references,
            spectra: sources.iter().map(fft2_unitary).collect(),
            decoder,
            metric,
        })
    }

    pub(crate) fn noiseless(
        training: &[ComplexImage],
        decoder: DecoderConfig,
        metric: PerformanceMeasure,
    ) -> Result<Self> {
        Self::new(training.to_vec(), training, decoder, metric)
    }

    pub(crate) fn shape(&self) -> (usize, usize) {
        self.spectra[0].shape()
    }

    /// Per-signal scores, in training order.
    pub(crate) fn scores(&self, pattern: &SamplingPattern) -> Result<Vec<f64>> {
        ensure_shape(self.shape(), pattern.shape())?;
        self.references
            .iter()
            .zip(&self.spectra)
            .map(|(x, k)| {
                let b = subsample(k, pattern)?;
                let recon = decode(&self.decoder, pattern, &b)?;
                self.metric.evaluate(x, &recon)
            })
            .collect()
    }

    pub(crate) fn mean(&self, pattern: &SamplingPattern) -> Result<f64> {
        let s = self.scores(pattern)?;
        Ok(s.iter().sum::<f64>() / s.len() as f64)
    }
}

/// Scores patterns on `workers` threads; output order matches input order.
pub(crate) fn evaluate_all(
    scorer: &Scorer,
    patterns: &[SamplingPattern],
    workers: usize,
) -> Result<Vec<f64>> {
    let results: Vec<Result<f64>> = if workers <= 1 || patterns.len() < 2 {
        patterns.iter().map(|p| scorer.mean(p)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::param("workers", e.to_string()))?;
        pool.install(|| patterns.par_iter().map(|p| scorer.mean(p)).collect())
    };
    results.into_iter().collect()
}

/// Mean performance `(1/m) Σ_j η(x_j, g(Ω, P_Ω Ψ x_j))`.
pub fn empirical_performance(
    pattern: &SamplingPattern,
    training: &[ComplexImage],
    decoder: &DecoderConfig,
    metric: &PerformanceMeasure,
) -> Result<f64> {
    Scorer::noiseless(training, *decoder, *metric)?.mean(pattern)
}

pub fn greedy_optimize(
    cfg: &GreedyConfig,
    training: &[ComplexImage],
) -> Result<(SamplingPattern, GreedyTrace)> {
    let scorer = Scorer::noiseless(training, cfg.decoder, cfg.metric)?;
    run(cfg, &scorer)
}

pub(crate) fn run(cfg: &GreedyConfig, scorer: &Scorer) -> Result<(SamplingPattern, GreedyTrace)> {
    cfg.validate()?;
    ensure_shape(cfg.family.shape(), scorer.shape())?;
    let mut pattern = SamplingPattern::empty(cfg.family);
    let initial_performance = scorer.mean(&pattern)?;
    let mut current = initial_performance;
    let mut records = Vec::new();

    loop {
        let candidates = enumerate_candidates(&pattern, cfg.cost, cfg.budget);
        if candidates.is_empty() {
            break;
        }
        let extended = candidates
            .iter()
            .map(|c| pattern.add_subset(c.subset))
            .collect::<Result<Vec<_>>>()?;
        let scores = evaluate_all(scorer, &extended, cfg.workers)?;

        let mut best: Option<(usize, f64)> = None;
        let mut table = Vec::with_capacity(candidates.len());
        for (i, (c, &perf)) in candidates.iter().zip(&scores).enumerate() {
            assert!(c.marginal_cost > 0, "candidate {} adds no points", c.subset);
            let gain = (perf - current) / c.marginal_cost as f64;
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((i, gain));
            }
            if cfg.record_candidates {
                table.push(CandidateScore {
                    subset: c.subset,
                    marginal_cost: c.marginal_cost,
                    performance: perf,
                    normalized_gain: gain,
                });
            }
        }
        let (i, normalized_gain) = best.expect("nonempty candidate list");
        let performance = scores[i];
        pattern = extended.into_iter().nth(i).expect("index in range");
        records.push(GreedyRecord {
            iteration: records.len() + 1,
            subset: candidates[i].subset,
            marginal_gain: performance - current,
            normalized_gain,
            performance,
            cost: pattern.cost(),
            candidates: cfg.record_candidates.then_some(table),
        });
        current = performance;
    }

    let trace = GreedyTrace {
        family: cfg.family,
        budget: cfg.budget,
        initial_performance,
        records,
    };
    Ok((pattern, trace))
}

/// The mask for a smaller budget: the longest trace prefix with cost at
/// most `budget`.
pub fn truncate_to_budget(trace: &GreedyTrace, budget: usize) -> Result<SamplingPattern> {
    let first = trace
        .records
        .first()
        .ok_or(Error::Empty("greedy trace"))?;
    if budget < first.cost {
        return Err(Error::Infeasible(format!(
            "budget {budget} is below the first recorded cost {}",
            first.cost
        )));
    }
    if budget > trace.final_cost() && budget > trace.budget {
        return Err(Error::param(
            "budget",
            format!("{budget} exceeds the traced budget {}", trace.budget),
        ));
    }
    let prefix: Vec<Subset> = trace
        .records
        .iter()
        .take_while(|r| r.cost <= budget)
        .map(|r| r.subset)
        .collect();
    SamplingPattern::from_trace(trace.family, &prefix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::FamilyKind;
    use crate::signal::{make_phantom, PhantomKind};

    fn training(n: usize, size: usize) -> Vec<ComplexImage> {
        (0..n)
            .map(|s| make_phantom(PhantomKind::WaveletSparse, size, size, 0.1, s as u64).unwrap())
            .collect()
    }

    #[test]
    fn empirical_performance_extremes() {
        let xs = training(3, 8);
        let fam = SubsetFamily::new(8, 8, FamilyKind::Rows).unwrap();
        let zf = DecoderConfig::zero_fill();
        let full = empirical_performance(&SamplingPattern::full(fam), &xs, &zf, &PerformanceMeasure::NormalizedSq).unwrap();
        assert!((full - 1.0).abs() < 1e-9);
        let empty = empirical_performance(&SamplingPattern::empty(fam), &xs, &zf, &PerformanceMeasure::NormalizedSq).unwrap();
        assert_eq!(empty, 0.75);
        assert!(matches!(
            empirical_performance(&SamplingPattern::empty(fam), &[], &zf, &PerformanceMeasure::NormalizedSq),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn mean_is_arithmetic_mean_of_individual_scores() {
        let xs = training(3, 8);
        let fam = SubsetFamily::new(8, 8, FamilyKind::Rows).unwrap();
        let p = SamplingPattern::from_trace(fam, &[Subset::Row(0), Subset::Row(3)]).unwrap();
        let dec = DecoderConfig::bp().test_profile();
        let m = PerformanceMeasure::psnr();
        let all = empirical_performance(&p, &xs, &dec, &m).unwrap();
        let each: Vec<f64> = xs
            .iter()
            .map(|x| empirical_performance(&p, std::slice::from_ref(x), &dec, &m).unwrap())
            .collect();
        assert!((all - each.iter().sum::<f64>() / 3.0).abs() < 1e-12);
    }

    #[test]
    fn budget_below_smallest_subset_is_infeasible() {
        let fam = SubsetFamily::new(8, 8, FamilyKind::Rows).unwrap();
        let cfg = GreedyConfig::new(DecoderConfig::zero_fill(), PerformanceMeasure::NormalizedSq, fam, 7);
        assert!(matches!(greedy_optimize(&cfg, &training(1, 8)), Err(Error::Infeasible(_))));
    }

    #[test]
    fn trace_costs_increase_and_candidates_are_recorded() {
        let fam = SubsetFamily::new(8, 8, FamilyKind::RowsAndCols).unwrap();
        let mut cfg = GreedyConfig::new(DecoderConfig::zero_fill(), PerformanceMeasure::psnr(), fam, 30);
        cfg.record_candidates = true;
        let (p, trace) = greedy_optimize(&cfg, &training(2, 8)).unwrap();
        assert!(p.cost() <= 30);
        assert_eq!(p.trace(), trace.subsets().as_slice());
        for w in trace.records.windows(2) {
            assert!(w[1].cost > w[0].cost);
        }
        for r in &trace.records {
            let table = r.candidates.as_ref().unwrap();
            let best = table
                .iter()
                .fold(f64::NEG_INFINITY, |m, c| m.max(c.normalized_gain));
            let winner = table.iter().find(|c| c.normalized_gain == best).unwrap();
            assert_eq!(winner.subset, r.subset);
        }
        let text = trace.to_jsonl().unwrap();
        assert_eq!(text.lines().count(), trace.records.len());
        assert_eq!(GreedyTrace::records_from_jsonl(&text).unwrap(), trace.records);
    }

    #[test]
    fn truncate_edges() {
        let fam = SubsetFamily::new(8, 8, FamilyKind::Rows).unwrap();
        let cfg = GreedyConfig::new(DecoderConfig::zero_fill(), PerformanceMeasure::psnr(), fam, 32);
        let (p, trace) = greedy_optimize(&cfg, &training(2, 8)).unwrap();
        assert_eq!(truncate_to_budget(&trace, 32).unwrap(), p);
        let one = truncate_to_budget(&trace, 8).unwrap();
        assert_eq!(one.trace(), &p.trace()[..1]);
        assert_eq!(truncate_to_budget(&trace, 15).unwrap(), one);
        assert!(truncate_to_budget(&trace, 7).is_err());
    }
}
