//! Choosing the best of a set of candidate masks by empirical performance,
//! and the parametric sweep that feeds it.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::decoders::DecoderConfig;
use crate::error::{Error, Result};
use crate::greedy::{evaluate_all, Scorer};
use crate::metrics::PerformanceMeasure;
use crate::sampling::{generate_mask, GeneratorKind, MaskGeneratorConfig, SamplingPattern, SubsetFamily};
use crate::signal::ComplexImage;

#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub winner: usize,
    /// Mean training score of every candidate, in input order.
    pub scores: Vec<f64>,
}

/// Index of the first candidate with the highest score.
fn argmax_first(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

pub fn select_best(
    candidates: &[SamplingPattern],
    training: &[ComplexImage],
    decoder: &DecoderConfig,
    metric: &PerformanceMeasure,
    workers: usize,
) -> Result<Selection> {
    let scorer = Scorer::noiseless(training, *decoder, *metric)?;
    select_with(&scorer, candidates, workers)
}

pub(crate) fn select_with(
    scorer: &Scorer,
    candidates: &[SamplingPattern],
    workers: usize,
) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate masks"));
    }
    let shape = candidates[0].shape();
    for c in candidates {
        crate::signal::ensure_shape(shape, c.shape())?;
    }
    let scores = evaluate_all(scorer, candidates, workers)?;
    Ok(Selection {
        winner: argmax_first(&scores),
        scores,
    })
}

/// Parameter grid for [`parametric_sweep`]: every `(center, degree)` cell is
/// drawn once per seed.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub generator: GeneratorKind,
    /// `(dx, dy)` central region sizes.
    pub centers: Vec<(usize, usize)>,
    pub degrees: Vec<u32>,
    pub seeds: Vec<u64>,
    pub reference: Option<ComplexImage>,
}

impl SweepGrid {
    /// Grid size including infeasible cells.
    pub fn len(&self) -> usize {
        self.centers.len() * self.degrees.len() * self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepParams {
    pub dx: usize,
    pub dy: usize,
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub candidate_id: usize,
    pub generator: GeneratorKind,
    pub params: SweepParams,
    pub seed: u64,
    pub mean_score: f64,
    /// 1 = best; ties ranked by candidate id.
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub params: SweepParams,
    pub draws: usize,
    pub mean_score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub params: SweepParams,
    pub seed: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub cells: Vec<CellSummary>,
    pub skipped: Vec<SkippedCell>,
    /// `candidate_id` of the winning mask.
    pub winner: usize,
}

impl SweepReport {
    /// CSV with columns `candidate_id,generator,params_json,seed,mean_score,rank`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["candidate_id", "generator", "params_json", "seed", "mean_score", "rank"])?;
        for r in &self.rows {
            w.write_record([
                r.candidate_id.to_string(),
                r.generator.as_str().to_string(),
                serde_json::to_string(&r.params)?,
                r.seed.to_string(),
                format!("{:?}", r.mean_score),
                r.rank.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Generates every feasible `(params, seed)` mask and picks the best one on
/// the training set. Infeasible cells are reported and skipped.
#[allow(clippy::too_many_arguments)]
pub fn parametric_sweep(
    grid: &SweepGrid,
    family: SubsetFamily,
    budget: usize,
    training: &[ComplexImage],
    decoder: &DecoderConfig,
    metric: &PerformanceMeasure,
    workers: usize,
) -> Result<(SamplingPattern, SweepReport)> {
    if grid.is_empty() {
        return Err(Error::Empty("sweep grid"));
    }
    let mut masks = Vec::new();
    let mut meta = Vec::new();
    let mut skipped = Vec::new();
    for &(dx, dy) in &grid.centers {
        for &degree in &grid.degrees {
            for &seed in &grid.seeds {
                let params = SweepParams { dx, dy, degree };
                let cfg = MaskGeneratorConfig {
                    kind: grid.generator,
                    center: (dx, dy),
                    degree,
                    seed,
                    reference: grid.reference.clone(),
                };
                match generate_mask(&cfg, family, budget) {
                    Ok(m) => {
                        masks.push(m);
                        meta.push((params, seed));
                    }
                    Err(e @ (Error::Infeasible(_) | Error::InvalidParameter { .. })) => {
                        skipped.push(SkippedCell {
                            params,
                            seed,
                            reason: e.to_string(),
                        })
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    if masks.is_empty() {
        return Err(Error::Infeasible("every sweep cell exceeds the budget".into()));
    }

    let scorer = Scorer::noiseless(training, *decoder, *metric)?;
    let selection = select_with(&scorer, &masks, workers)?;

    let mut order: Vec<usize> = (0..masks.len()).collect();
    order.sort_by(|&a, &b| selection.scores[b].total_cmp(&selection.scores[a]).then(a.cmp(&b)));
    let mut rank = vec![0; masks.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r + 1;
    }
    let rows: Vec<SweepRow> = meta
        .iter()
        .enumerate()
        .map(|(i, (params, seed))| SweepRow {
            candidate_id: i,
            generator: grid.generator,
            params: params.clone(),
            seed: *seed,
            mean_score: selection.scores[i],
            rank: rank[i],
        })
        .collect();

    let mut cells: Vec<CellSummary> = Vec::new();
    for r in &rows {
        match cells.iter_mut().find(|c| c.params == r.params) {
            Some(c) => {
                c.mean_score += r.mean_score;
                c.draws += 1;
            }
            None => cells.push(CellSummary {
                params: r.params.clone(),
                draws: 1,
                mean_score: r.mean_score,
            }),
        }
    }
    for c in &mut cells {
        c.mean_score /= c.draws as f64;
    }

    let winner = selection.winner;
    let report = SweepReport {
        rows,
        cells,
        skipped,
        winner,
    };
    Ok((masks.swap_remove(winner), report))
}
