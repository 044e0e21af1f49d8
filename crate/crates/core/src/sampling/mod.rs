//! Subset families, cardinality cost, sampling patterns and baseline masks.
//!
//! A pattern is a union of atomic subsets (full k-space rows, full columns or
//! single points) drawn from a [`SubsetFamily`]. Subset indices always refer
//! to k-space storage order (DC at index 0). The order in which subsets were
//! added is kept in the pattern's trace.

mod generators;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generators::{generate_mask, GeneratorKind, MaskGeneratorConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Points,
    Rows,
    Cols,
    RowsAndCols,
}

impl FamilyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyKind::Points => "points",
            FamilyKind::Rows => "rows",
            FamilyKind::Cols => "cols",
            FamilyKind::RowsAndCols => "rows_and_cols",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "points" => Ok(FamilyKind::Points),
            "rows" => Ok(FamilyKind::Rows),
            "cols" => Ok(FamilyKind::Cols),
            "rows_and_cols" => Ok(FamilyKind::RowsAndCols),
            _ => Err(Error::param(
                "family",
                format!("unknown family `{s}` (points|rows|cols|rows_and_cols)"),
            )),
        }
    }
}

/// An atomic k-space subset. The derived ordering is the canonical order:
/// rows ascending, then columns ascending, then points row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "lowercase")]
pub enum Subset {
    Row(usize),
    Col(usize),
    /// Flat row-major index.
    Point(usize),
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subset::Row(i) => write!(f, "row {i}"),
            Subset::Col(i) => write!(f, "col {i}"),
            Subset::Point(i) => write!(f, "point {i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsetFamily {
    rows: usize,
    cols: usize,
    kind: FamilyKind,
}

impl SubsetFamily {
    pub fn new(rows: usize, cols: usize, kind: FamilyKind) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimensions {
                rows,
                cols,
                reason: "dimensions must be positive",
            });
        }
        Ok(Self { rows, cols, kind })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        match self.kind {
            FamilyKind::Points => self.rows * self.cols,
            FamilyKind::Rows => self.rows,
            FamilyKind::Cols => self.cols,
            FamilyKind::RowsAndCols => self.rows + self.cols,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All members in canonical order.
    pub fn members(&self) -> Vec<Subset> {
        let rows = (0..self.rows).map(Subset::Row);
        let cols = (0..self.cols).map(Subset::Col);
        match self.kind {
            FamilyKind::Points => (0..self.rows * self.cols).map(Subset::Point).collect(),
            FamilyKind::Rows => rows.collect(),
            FamilyKind::Cols => cols.collect(),
            FamilyKind::RowsAndCols => rows.chain(cols).collect(),
        }
    }

    pub fn contains(&self, s: Subset) -> bool {
        match (self.kind, s) {
            (FamilyKind::Rows | FamilyKind::RowsAndCols, Subset::Row(i)) => i < self.rows,
            (FamilyKind::Cols | FamilyKind::RowsAndCols, Subset::Col(i)) => i < self.cols,
            (FamilyKind::Points, Subset::Point(i)) => i < self.rows * self.cols,
            _ => false,
        }
    }

    /// Number of k-space points the subset covers.
    pub fn size(&self, s: Subset) -> usize {
        match s {
            Subset::Row(_) => self.cols,
            Subset::Col(_) => self.rows,
            Subset::Point(_) => 1,
        }
    }

    /// Flat storage indices covered by `s`.
    pub fn indices_of(&self, s: Subset) -> impl Iterator<Item = usize> + '_ {
        let (rows, cols) = (self.rows, self.cols);
        let (start, step, count) = match s {
            Subset::Row(r) => (r * cols, 1, cols),
            Subset::Col(c) => (c, cols, rows),
            Subset::Point(i) => (i, 1, 1),
        };
        (0..count).map(move |k| start + k * step)
    }
}

/// Acquisition cost `c(Ω)`. Only the cardinality cost is implemented.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostFunction {
    /// Number of distinct k-space points covered.
    #[default]
    Cardinality,
}

impl CostFunction {
    pub fn cost(&self, pattern: &SamplingPattern) -> usize {
        match self {
            CostFunction::Cardinality => pattern.count,
        }
    }

    /// `c(Ω ∪ S) − c(Ω)`.
    pub fn marginal(&self, pattern: &SamplingPattern, s: Subset) -> usize {
        match self {
            CostFunction::Cardinality => pattern.new_points(s),
        }
    }
}

/// A sampling pattern Ω with its subset trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplingPattern {
    family: SubsetFamily,
    included: Vec<bool>,
    count: usize,
    trace: Vec<Subset>,
}

impl SamplingPattern {
    pub fn empty(family: SubsetFamily) -> Self {
        let (r, c) = family.shape();
        Self {
            family,
            included: vec![false; r * c],
            count: 0,
            trace: Vec::new(),
        }
    }

    /// Every member of the family, in canonical order.
    pub fn full(family: SubsetFamily) -> Self {
        let mut p = Self::empty(family);
        for s in family.members() {
            if p.new_points(s) > 0 {
                p.insert(s).expect("fresh member");
            }
        }
        p
    }

    pub fn from_trace(family: SubsetFamily, trace: &[Subset]) -> Result<Self> {
        let mut p = Self::empty(family);
        for &s in trace {
            p.insert(s)?;
        }
        Ok(p)
    }

    pub fn family(&self) -> &SubsetFamily {
        &self.family
    }

    pub fn shape(&self) -> (usize, usize) {
        self.family.shape()
    }

    pub fn trace(&self) -> &[Subset] {
        &self.trace
    }

    pub fn included(&self) -> &[bool] {
        &self.included
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.included[i]
    }

    /// `|Ω|`.
    pub fn cost(&self) -> usize {
        self.count
    }

    /// Flat indices of included points, row-major.
    pub fn indices(&self) -> Vec<usize> {
        self.included
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    /// Whether every point of `s` is already covered.
    pub fn covers(&self, s: Subset) -> bool {
        self.new_points(s) == 0
    }

    pub fn new_points(&self, s: Subset) -> usize {
        self.family
            .indices_of(s)
            .filter(|&i| !self.included[i])
            .count()
    }

    /// Adds `s` in place, appending it to the trace.
    pub fn insert(&mut self, s: Subset) -> Result<()> {
        if !self.family.contains(s) {
            return Err(Error::NotInFamily {
                subset: s,
                family: self.family.kind.to_string(),
            });
        }
        if self.trace.contains(&s) {
            return Err(Error::DuplicateSubset(s));
        }
        let family = self.family;
        for i in family.indices_of(s) {
            if !self.included[i] {
                self.included[i] = true;
                self.count += 1;
            }
        }
        self.trace.push(s);
        Ok(())
    }

    /// `Ω ∪ S` as a new pattern.
    pub fn add_subset(&self, s: Subset) -> Result<Self> {
        let mut p = self.clone();
        p.insert(s)?;
        Ok(p)
    }

    /// Same point set, ignoring the trace.
    pub fn same_support(&self, other: &Self) -> bool {
        self.included == other.included
    }
}

/// A feasible extension of a pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub subset: Subset,
    pub marginal_cost: usize,
}

/// Members not yet covered by `pattern` whose addition keeps the cost within
/// `budget`, in canonical order.
pub fn enumerate_candidates(
    pattern: &SamplingPattern,
    cost: CostFunction,
    budget: usize,
) -> Vec<Candidate> {
    let current = cost.cost(pattern);
    pattern
        .family
        .members()
        .into_iter()
        .filter_map(|subset| {
            let marginal_cost = cost.marginal(pattern, subset);
            (marginal_cost > 0 && current + marginal_cost <= budget).then_some(Candidate {
                subset,
                marginal_cost,
            })
        })
        .collect()
}

/// On-disk mask description. Round-trips losslessly, trace order included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskFile {
    pub shape: [usize; 2],
    pub family: FamilyKind,
    pub budget: usize,
    pub trace: Vec<Subset>,
}

impl MaskFile {
    pub fn from_pattern(pattern: &SamplingPattern, budget: usize) -> Self {
        let (r, c) = pattern.shape();
        Self {
            shape: [r, c],
            family: pattern.family.kind,
            budget,
            trace: pattern.trace.clone(),
        }
    }

    pub fn to_pattern(&self) -> Result<SamplingPattern> {
        let family = SubsetFamily::new(self.shape[0], self.shape[1], self.family)?;
        let p = SamplingPattern::from_trace(family, &self.trace)?;
        if p.cost() > self.budget {
            return Err(Error::Infeasible(format!(
                "mask covers {} points, budget is {}",
                p.cost(),
                self.budget
            )));
        }
        Ok(p)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fam(kind: FamilyKind) -> SubsetFamily {
        SubsetFamily::new(4, 4, kind).unwrap()
    }

    #[test]
    fn candidates_on_empty_rows_pattern() {
        let p = SamplingPattern::empty(fam(FamilyKind::Rows));
        let c = enumerate_candidates(&p, CostFunction::Cardinality, 16);
        let subsets: Vec<_> = c.iter().map(|c| c.subset).collect();
        assert_eq!(subsets, (0..4).map(Subset::Row).collect::<Vec<_>>());
    }

    #[test]
    fn candidates_respect_budget() {
        let p = SamplingPattern::from_trace(
            fam(FamilyKind::Rows),
            &[Subset::Row(0), Subset::Row(1), Subset::Row(2)],
        )
        .unwrap();
        assert!(enumerate_candidates(&p, CostFunction::Cardinality, 12).is_empty());
    }

    #[test]
    fn overlapping_marginal_costs() {
        // brute-force set-union count as the oracle
        let p = SamplingPattern::from_trace(fam(FamilyKind::RowsAndCols), &[Subset::Row(0)]).unwrap();
        let base: std::collections::BTreeSet<usize> = (0..4).collect();
        let c = enumerate_candidates(&p, CostFunction::Cardinality, 8);
        let got: Vec<(Subset, usize)> = c.iter().map(|c| (c.subset, c.marginal_cost)).collect();
        let mut expect = Vec::new();
        for r in 1..4 {
            let s: std::collections::BTreeSet<usize> = (r * 4..r * 4 + 4).collect();
            expect.push((Subset::Row(r), s.difference(&base).count()));
        }
        for col in 0..4 {
            let s: std::collections::BTreeSet<usize> = (0..4).map(|r| r * 4 + col).collect();
            expect.push((Subset::Col(col), s.difference(&base).count()));
        }
        assert_eq!(got, expect);
        let costs: Vec<usize> = got.iter().map(|g| g.1).collect();
        assert_eq!(costs, vec![4, 4, 4, 3, 3, 3, 3]);
    }

    #[test]
    fn add_subset_counts_union_once() {
        let p = SamplingPattern::empty(fam(FamilyKind::RowsAndCols));
        let p = p.add_subset(Subset::Row(2)).unwrap();
        assert_eq!(p.cost(), 4);
        assert_eq!(p.trace(), &[Subset::Row(2)]);
        let p = SamplingPattern::from_trace(fam(FamilyKind::RowsAndCols), &[Subset::Row(0)])
            .unwrap()
            .add_subset(Subset::Col(0))
            .unwrap();
        assert_eq!(p.cost(), 7);
    }

    #[test]
    fn add_subset_errors() {
        let p = SamplingPattern::from_trace(fam(FamilyKind::Rows), &[Subset::Row(1)]).unwrap();
        assert!(matches!(p.add_subset(Subset::Row(1)), Err(Error::DuplicateSubset(_))));
        assert!(matches!(p.add_subset(Subset::Col(1)), Err(Error::NotInFamily { .. })));
        assert!(matches!(p.add_subset(Subset::Row(4)), Err(Error::NotInFamily { .. })));
    }

    #[test]
    fn mask_json_schema() {
        let p = SamplingPattern::from_trace(fam(FamilyKind::RowsAndCols), &[Subset::Row(3), Subset::Col(1)]).unwrap();
        let json = MaskFile::from_pattern(&p, 8).to_json().unwrap();
        assert_eq!(
            json,
            r#"{"shape":[4,4],"family":"rows_and_cols","budget":8,"trace":[{"kind":"row","index":3},{"kind":"col","index":1}]}"#
        );
        let back = MaskFile::from_json(&json).unwrap().to_pattern().unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn over_budget_mask_file_is_rejected() {
        let p = SamplingPattern::from_trace(fam(FamilyKind::Rows), &[Subset::Row(3), Subset::Row(1)]).unwrap();
        assert!(matches!(MaskFile::from_pattern(&p, 4).to_pattern(), Err(Error::Infeasible(_))));
    }

    fn arb_trace() -> impl Strategy<Value = (FamilyKind, Vec<usize>)> {
        (
            prop_oneof![
                Just(FamilyKind::Points),
                Just(FamilyKind::Rows),
                Just(FamilyKind::Cols),
                Just(FamilyKind::RowsAndCols)
            ],
            proptest::collection::vec(0usize..64, 0..24),
        )
    }

    proptest! {
        #[test]
        fn trace_rebuild_and_cost_accounting((kind, picks) in arb_trace()) {
            let family = SubsetFamily::new(8, 8, kind).unwrap();
            let members = family.members();
            let mut p = SamplingPattern::empty(family);
            for k in picks {
                let s = members[k % members.len()];
                if p.trace().contains(&s) {
                    continue;
                }
                let before = p.cost();
                let fresh = p.new_points(s);
                p.insert(s).unwrap();
                prop_assert_eq!(p.cost(), before + fresh);
            }
            let rebuilt = SamplingPattern::from_trace(family, p.trace()).unwrap();
            prop_assert_eq!(&rebuilt, &p);
            prop_assert_eq!(p.cost(), p.indices().len());
            let file = MaskFile::from_pattern(&p, 64);
            let back = MaskFile::from_json(&file.to_json().unwrap()).unwrap();
            prop_assert_eq!(back.to_pattern().unwrap(), p);
        }
    }
}
