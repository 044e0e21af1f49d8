//! `--budget` values: `N` points, `Nrows` / `Ncols` full lines, or a rate
//! such as `0.25`.

use std::str::FromStr;

use maskopt::{FamilyKind, SubsetFamily};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Budget {
    Points(usize),
    Rows(usize),
    Cols(usize),
    Rate(f64),
}

impl FromStr for Budget {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("invalid budget `{s}` (expected N, Nrows, Ncols or a rate like 0.25)"));
        let s = s.trim();
        let count = |digits: &str| digits.parse::<usize>().map_err(|_| bad());
        if let Some(n) = s.strip_suffix("rows") {
            return Ok(Budget::Rows(count(n)?));
        }
        if let Some(n) = s.strip_suffix("cols") {
            return Ok(Budget::Cols(count(n)?));
        }
        if s.contains('.') {
            let rate: f64 = s.parse().map_err(|_| bad())?;
            if !(rate > 0.0 && rate <= 1.0) {
                return Err(CliError::Usage(format!("budget rate {rate} not in (0, 1]")));
            }
            return Ok(Budget::Rate(rate));
        }
        Ok(Budget::Points(count(s)?))
    }
}

impl Budget {
    /// Budget in k-space points. Rates are floored in units of the family's
    /// lines: `0.25` on a 32x32 rows family is 8 rows = 256 points.
    pub fn points(self, family: &SubsetFamily) -> usize {
        let (rows, cols) = family.shape();
        match self {
            Budget::Points(n) => n,
            Budget::Rows(n) => n * cols,
            Budget::Cols(n) => n * rows,
            Budget::Rate(r) => match family.kind() {
                FamilyKind::Rows => (r * rows as f64).floor() as usize * cols,
                FamilyKind::Cols => (r * cols as f64).floor() as usize * rows,
                FamilyKind::Points | FamilyKind::RowsAndCols => (r * (rows * cols) as f64).floor() as usize,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(kind: FamilyKind) -> SubsetFamily {
        SubsetFamily::new(32, 16, kind).unwrap()
    }

    #[test]
    fn parse_forms() {
        assert_eq!("256".parse::<Budget>().unwrap(), Budget::Points(256));
        assert_eq!("8rows".parse::<Budget>().unwrap(), Budget::Rows(8));
        assert_eq!("3cols".parse::<Budget>().unwrap(), Budget::Cols(3));
        assert_eq!("0.25".parse::<Budget>().unwrap(), Budget::Rate(0.25));
        for bad in ["", "rows", "-3", "1.5", "0.0", "x8"] {
            assert!(bad.parse::<Budget>().is_err(), "{bad}");
        }
    }

    #[test]
    fn conversion_to_points() {
        let rows = SubsetFamily::new(32, 32, FamilyKind::Rows).unwrap();
        assert_eq!(Budget::Rate(0.25).points(&rows), 256);
        assert_eq!(Budget::Rows(2).points(&fam(FamilyKind::Rows)), 32);
        assert_eq!(Budget::Cols(2).points(&fam(FamilyKind::Cols)), 64);
        assert_eq!(Budget::Rate(0.1).points(&fam(FamilyKind::Rows)), 3 * 16);
        assert_eq!(Budget::Rate(0.1).points(&fam(FamilyKind::Points)), 51);
    }
}
