//! Orthonormal multilevel 2D Haar transform on power-of-two grids.
//!
//! Coefficients use the Mallat layout: after `levels` decompositions the
//! coarse approximation occupies the top-left `(rows >> levels) x
//! (cols >> levels)` block and detail bands surround it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::ComplexImage;

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Haar2d {
    rows: usize,
    cols: usize,
    levels: usize,
}

pub(crate) fn check_pow2(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 || !rows.is_power_of_two() || !cols.is_power_of_two() {
        return Err(Error::InvalidDimensions {
            rows,
            cols,
            reason: "rows and cols must be powers of two",
        });
    }
    Ok(())
}

impl Haar2d {
    pub fn new(rows: usize, cols: usize, levels: usize) -> Result<Self> {
        check_pow2(rows, cols)?;
        let max = Self::max_levels(rows, cols);
        if levels > max {
            return Err(Error::param(
                "levels",
                format!("{levels} exceeds the {max} levels a {rows}x{cols} grid supports"),
            ));
        }
        Ok(Self { rows, cols, levels })
    }

    /// `log2(min(rows, cols)) - 2`, clamped to `[1, max_levels]`.
    pub fn with_default_levels(rows: usize, cols: usize) -> Result<Self> {
        check_pow2(rows, cols)?;
        Self::new(rows, cols, Self::default_levels(rows, cols))
    }

    pub fn default_levels(rows: usize, cols: usize) -> usize {
        let max = Self::max_levels(rows, cols);
        max.saturating_sub(2).max(1).min(max)
    }

    pub fn max_levels(rows: usize, cols: usize) -> usize {
        rows.min(cols).trailing_zeros() as usize
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Scale of a coefficient: `0` for the coarse approximation band, else the
    /// decomposition level of its detail band (`levels` = coarsest details,
    /// `1` = finest).
    pub fn band_level(&self, row: usize, col: usize) -> usize {
        if row < self.rows >> self.levels && col < self.cols >> self.levels {
            return 0;
        }
        let mut level = 1;
        while level < self.levels
            && row < self.rows >> level
            && col < self.cols >> level
        {
            level += 1;
        }
        level
    }

    /// In-place analysis `Φx`.
    pub fn forward(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        debug_assert_eq!(data.len(), self.rows * self.cols);
        scratch.resize(self.rows.max(self.cols), Complex64::new(0.0, 0.0));
        let (mut r, mut c) = (self.rows, self.cols);
        for _ in 0..self.levels {
            for i in 0..r {
                let line = &mut data[i * self.cols..i * self.cols + c];
                analyze(line, scratch);
            }
            for j in 0..c {
                for i in 0..r {
                    scratch[i] = data[i * self.cols + j];
                }
                let half = r / 2;
                for i in 0..half {
                    let (a, b) = (scratch[2 * i], scratch[2 * i + 1]);
                    data[i * self.cols + j] = (a + b) * INV_SQRT2;
                    data[(half + i) * self.cols + j] = (a - b) * INV_SQRT2;
                }
            }
            r /= 2;
            c /= 2;
        }
    }

    /// In-place synthesis `Φ*α`.
    pub fn inverse(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        debug_assert_eq!(data.len(), self.rows * self.cols);
        scratch.resize(self.rows.max(self.cols), Complex64::new(0.0, 0.0));
        for level in (0..self.levels).rev() {
            let (r, c) = (self.rows >> level, self.cols >> level);
            let half = r / 2;
            for j in 0..c {
                for i in 0..half {
                    let (a, d) = (data[i * self.cols + j], data[(half + i) * self.cols + j]);
                    scratch[2 * i] = (a + d) * INV_SQRT2;
                    scratch[2 * i + 1] = (a - d) * INV_SQRT2;
                }
                for i in 0..r {
                    data[i * self.cols + j] = scratch[i];
                }
            }
            for i in 0..r {
                let line = &mut data[i * self.cols..i * self.cols + c];
                synthesize(line, scratch);
            }
        }
    }

    pub fn analyze_image(&self, img: &ComplexImage) -> Result<Vec<Complex64>> {
        crate::signal::ensure_shape(self.shape(), img.shape())?;
        let mut data = img.data().to_vec();
        self.forward(&mut data, &mut Vec::new());
        Ok(data)
    }

    pub fn synthesize_image(&self, coeffs: &[Complex64]) -> Result<ComplexImage> {
        if coeffs.len() != self.rows * self.cols {
            return Err(Error::Format(format!(
                "{} coefficients for a {}x{} transform",
                coeffs.len(),
                self.rows,
                self.cols
            )));
        }
        let mut data = coeffs.to_vec();
        self.inverse(&mut data, &mut Vec::new());
        ComplexImage::new(self.rows, self.cols, data)
    }
}

fn analyze(line: &mut [Complex64], scratch: &mut [Complex64]) {
    let half = line.len() / 2;
    for i in 0..half {
        let (a, b) = (line[2 * i], line[2 * i + 1]);
        scratch[i] = (a + b) * INV_SQRT2;
        scratch[half + i] = (a - b) * INV_SQRT2;
    }
    line.copy_from_slice(&scratch[..line.len()]);
}

fn synthesize(line: &mut [Complex64], scratch: &mut [Complex64]) {
    let half = line.len() / 2;
    for i in 0..half {
        let (a, d) = (line[i], line[half + i]);
        scratch[2 * i] = (a + d) * INV_SQRT2;
        scratch[2 * i + 1] = (a - d) * INV_SQRT2;
    }
    line.copy_from_slice(&scratch[..line.len()]);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_buffer(n: usize, seed: u64) -> Vec<Complex64> {
        use rand::Rng;
        let mut rng = crate::seed::rng(seed);
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn single_level_on_2x2_matches_hand_computation() {
        let h = Haar2d::new(2, 2, 1).unwrap();
        let mut d: Vec<Complex64> = [1.0, 2.0, 3.0, 4.0]
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        h.forward(&mut d, &mut Vec::new());
        let expect = [5.0, -1.0, -2.0, 0.0];
        for (z, e) in d.iter().zip(expect) {
            assert!((z.re - e).abs() < 1e-14 && z.im == 0.0);
        }
    }

    #[test]
    fn default_levels() {
        assert_eq!(Haar2d::default_levels(256, 256), 6);
        assert_eq!(Haar2d::default_levels(32, 32), 3);
        assert_eq!(Haar2d::default_levels(8, 8), 1);
        assert_eq!(Haar2d::default_levels(2, 16), 1);
        assert_eq!(Haar2d::default_levels(1, 16), 0);
    }

    #[test]
    fn band_levels_partition_the_grid() {
        let h = Haar2d::new(8, 16, 2).unwrap();
        let mut counts = [0usize; 3];
        for r in 0..8 {
            for c in 0..16 {
                counts[h.band_level(r, c)] += 1;
            }
        }
        assert_eq!(counts, [8, 3 * 32, 3 * 8]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Haar2d::new(6, 8, 1).is_err());
        assert!(Haar2d::new(8, 8, 4).is_err());
    }

    proptest! {
        #[test]
        fn orthonormal_and_invertible(lr in 0usize..6, lc in 0usize..6, seed in any::<u64>()) {
            let (rows, cols) = (1usize << lr, 1usize << lc);
            let h = Haar2d::new(rows, cols, Haar2d::max_levels(rows, cols)).unwrap();
            let x = random_buffer(rows * cols, seed);
            let mut y = x.clone();
            let mut s = Vec::new();
            h.forward(&mut y, &mut s);
            let nx = crate::signal::norm2(&x);
            prop_assert!((crate::signal::norm2(&y) - nx).abs() <= 1e-10 * nx.max(1.0));
            h.inverse(&mut y, &mut s);
            for (a, b) in x.iter().zip(&y) {
                prop_assert!((a - b).norm() <= 1e-10);
            }
        }
    }
}
