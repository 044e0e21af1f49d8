//! Parametric baseline masks: low-pass, uniform random, polynomial
//! variable density and single-image energy sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{SamplingPattern, Subset, SubsetFamily};
use crate::error::{Error, Result};
use crate::signal::{centered_frequency, centered_index, fft2_unitary, ComplexImage};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    LowPass,
    UniformRandom,
    CoherencePoly,
    SingleImageEnergy,
}

impl GeneratorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GeneratorKind::LowPass => "low_pass",
            GeneratorKind::UniformRandom => "uniform_random",
            GeneratorKind::CoherencePoly => "coherence_poly",
            GeneratorKind::SingleImageEnergy => "single_image_energy",
        }
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low_pass" => Ok(GeneratorKind::LowPass),
            "uniform_random" => Ok(GeneratorKind::UniformRandom),
            "coherence_poly" => Ok(GeneratorKind::CoherencePoly),
            "single_image_energy" => Ok(GeneratorKind::SingleImageEnergy),
            _ => Err(Error::param("generator", format!("unknown generator `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaskGeneratorConfig {
    pub kind: GeneratorKind,
    /// Fully sampled central region `(dx, dy)`: `dx` central columns and `dy`
    /// central rows. Rows families use `dy`, column families `dx`, point
    /// families the `dy x dx` block.
    pub center: (usize, usize),
    /// Polynomial degree `D` of the `(1 - r)^D` density.
    pub degree: u32,
    pub seed: u64,
    /// Required for [`GeneratorKind::SingleImageEnergy`].
    pub reference: Option<ComplexImage>,
}

impl MaskGeneratorConfig {
    pub fn new(kind: GeneratorKind) -> Self {
        Self {
            kind,
            center: (0, 0),
            degree: 1,
            seed: 0,
            reference: None,
        }
    }

    pub fn with_center(mut self, dx: usize, dy: usize) -> Self {
        self.center = (dx, dy);
        self
    }

    pub fn with_degree(mut self, degree: u32) -> Self {
        self.degree = degree;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_reference(mut self, reference: ComplexImage) -> Self {
        self.reference = Some(reference);
        self
    }
}

/// Normalized distance of a member from DC, in `[0, 1]`.
fn radius(family: &SubsetFamily, s: Subset) -> f64 {
    let (rows, cols) = family.shape();
    let axis = |k: usize, n: usize| {
        if n < 2 {
            0.0
        } else {
            centered_frequency(k, n).unsigned_abs() as f64 / (n / 2) as f64
        }
    };
    match s {
        Subset::Row(r) => axis(r, rows),
        Subset::Col(c) => axis(c, cols),
        Subset::Point(i) => {
            let (u, v) = (axis(i / cols, rows), axis(i % cols, cols));
            ((u * u + v * v) / 2.0).sqrt()
        }
    }
}

/// Sort key for low-pass ordering: distance, then centered position, then
/// canonical order.
fn low_pass_key(family: &SubsetFamily, s: Subset) -> (f64, usize, usize, Subset) {
    let (rows, cols) = family.shape();
    let (a, b) = match s {
        Subset::Row(r) => (centered_index(r, rows), 0),
        Subset::Col(c) => (centered_index(c, cols), 0),
        Subset::Point(i) => (centered_index(i / cols, rows), centered_index(i % cols, cols)),
    };
    (radius(family, s), a, b, s)
}

fn in_center(k: usize, n: usize, d: usize) -> bool {
    let c = centered_index(k, n);
    let start = (n / 2).saturating_sub(d / 2);
    d > 0 && c >= start && c < start + d
}

/// Members forming the mandatory central region.
fn center_members(family: &SubsetFamily, (dx, dy): (usize, usize)) -> Result<Vec<Subset>> {
    let (rows, cols) = family.shape();
    if dy > rows || dx > cols {
        return Err(Error::param(
            "center",
            format!("central region {dx}x{dy} exceeds the {rows}x{cols} grid"),
        ));
    }
    Ok(family
        .members()
        .into_iter()
        .filter(|&s| match s {
            Subset::Row(r) => in_center(r, rows, dy),
            Subset::Col(c) => in_center(c, cols, dx),
            Subset::Point(i) => in_center(i / cols, rows, dy) && in_center(i % cols, cols, dx),
        })
        .collect())
}

/// Builds a baseline mask with cost at most `budget` (points).
pub fn generate_mask(
    cfg: &MaskGeneratorConfig,
    family: SubsetFamily,
    budget: usize,
) -> Result<SamplingPattern> {
    let mut pattern = SamplingPattern::empty(family);
    let members = family.members();

    if cfg.kind == GeneratorKind::LowPass {
        let mut order: Vec<_> = members.iter().map(|&s| low_pass_key(&family, s)).collect();
        order.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
                .then(a.3.cmp(&b.3))
        });
        for (.., s) in order {
            let fresh = pattern.new_points(s);
            if fresh > 0 && pattern.cost() + fresh <= budget {
                pattern.insert(s)?;
            }
        }
        return Ok(pattern);
    }

    let weights: Vec<f64> = match cfg.kind {
        GeneratorKind::UniformRandom => vec![1.0; members.len()],
        GeneratorKind::CoherencePoly => members
            .iter()
            .map(|&s| (1.0 - radius(&family, s)).max(0.0).powi(cfg.degree as i32))
            .collect(),
        GeneratorKind::SingleImageEnergy => {
            let reference = cfg.reference.as_ref().ok_or_else(|| {
                Error::param("reference", "single_image_energy needs a reference image")
            })?;
            crate::signal::ensure_shape(family.shape(), reference.shape())?;
            let k = fft2_unitary(reference);
            members
                .iter()
                .map(|&s| family.indices_of(s).map(|i| k.data()[i].norm_sqr()).sum())
                .collect()
        }
        GeneratorKind::LowPass => unreachable!(),
    };

    if cfg.kind != GeneratorKind::UniformRandom {
        for s in center_members(&family, cfg.center)? {
            pattern.insert(s)?;
        }
        if pattern.cost() > budget {
            return Err(Error::Infeasible(format!(
                "central region needs {} points, budget is {budget}",
                pattern.cost()
            )));
        }
    }

    // Weighted sampling without replacement via Efraimidis-Spirakis keys;
    // zero-weight members follow all positive ones in uniform random order.
    let mut rng = seed::rng(cfg.seed);
    let mut keys: Vec<(bool, f64, Subset)> = members
        .iter()
        .zip(&weights)
        .map(|(&s, &w)| {
            let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
            if w > 0.0 {
                (true, u.ln() / w, s)
            } else {
                (false, u.ln(), s)
            }
        })
        .collect();
    keys.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.total_cmp(&a.1)).then(a.2.cmp(&b.2)));
    for (_, _, s) in keys {
        if pattern.trace().contains(&s) {
            continue;
        }
        let fresh = pattern.new_points(s);
        if fresh > 0 && pattern.cost() + fresh <= budget {
            pattern.insert(s)?;
        }
    }
    Ok(pattern)
}
