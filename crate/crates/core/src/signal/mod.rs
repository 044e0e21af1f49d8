//! Complex images, k-space arrays and the measurement operator.
//!
//! All arrays are stored row-major. The Fourier operator is the unitary 2D DFT
//! (scaled by `1/sqrt(rows*cols)` in both directions), with DC at storage
//! index `(0, 0)`. Distance-based mask generators map storage indices to the
//! centered convention themselves (see [`centered_frequency`]).

mod fft;
pub mod io;
mod phantom;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sampling::SamplingPattern;

pub use fft::{fft2_unitary, ifft2_unitary};
pub(crate) use fft::{fft2_in_place, ifft2_in_place};
pub use phantom::{make_phantom, PhantomKind};

/// A complex 2D signal, typically a ground-truth image or a reconstruction.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexImage {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Fourier coefficients of a [`ComplexImage`], DC at index `(0, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KSpace {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

fn check_buffer(rows: usize, cols: usize, data: &[Complex64]) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidDimensions {
            rows,
            cols,
            reason: "dimensions must be positive",
        });
    }
    if data.len() != rows * cols {
        return Err(Error::Format(format!(
            "buffer holds {} values, expected {}",
            data.len(),
            rows * cols
        )));
    }
    if let Some(i) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

macro_rules! grid_common {
    ($ty:ident) => {
        impl $ty {
            pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
                check_buffer(rows, cols, &data)?;
                Ok(Self { rows, cols, data })
            }

            pub fn zeros(rows: usize, cols: usize) -> Self {
                Self {
                    rows,
                    cols,
                    data: vec![Complex64::new(0.0, 0.0); rows * cols],
                }
            }

            /// Skips validation; callers guarantee shape and finiteness.
            pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
                debug_assert_eq!(data.len(), rows * cols);
                Self { rows, cols, data }
            }

            pub fn rows(&self) -> usize {
                self.rows
            }

            pub fn cols(&self) -> usize {
                self.cols
            }

            pub fn shape(&self) -> (usize, usize) {
                (self.rows, self.cols)
            }

            /// Number of entries, `rows * cols`.
            pub fn len(&self) -> usize {
                self.data.len()
            }

            pub fn is_empty(&self) -> bool {
                self.data.is_empty()
            }

            pub fn data(&self) -> &[Complex64] {
                &self.data
            }

            pub fn into_data(self) -> Vec<Complex64> {
                self.data
            }

            pub fn get(&self, row: usize, col: usize) -> Complex64 {
                self.data[row * self.cols + col]
            }

            pub fn norm(&self) -> f64 {
                norm2(&self.data)
            }

            /// Inner product `sum(conj(self) * other)`.
            pub fn dot(&self, other: &Self) -> Complex64 {
                self.data
                    .iter()
                    .zip(&other.data)
                    .map(|(a, b)| a.conj() * b)
                    .sum()
            }
        }
    };
}

grid_common!(ComplexImage);
grid_common!(KSpace);

impl ComplexImage {
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm()).collect()
    }

    /// Returns a copy scaled to unit ℓ2 norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroSignal);
        }
        Ok(self.scaled(1.0 / n))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|z| z * factor).collect(),
        )
    }

    /// Elementwise `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_shape(self.shape(), other.shape())?;
        Ok(Self::from_raw(
            self.rows,
            self.cols,
            self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        ))
    }

    /// `‖self − other‖₂`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        ensure_shape(self.shape(), other.shape())?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

pub(crate) fn norm2(data: &[Complex64]) -> f64 {
    data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn ensure_shape(expected: (usize, usize), found: (usize, usize)) -> Result<()> {
    if expected != found {
        return Err(Error::ShapeMismatch { expected, found });
    }
    Ok(())
}

/// Subsampled Fourier measurements `b = P_Ω Ψ x`.
///
/// `indices` are the flat storage indices of the pattern in row-major order;
/// `values[i]` is the coefficient at `indices[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurements {
    rows: usize,
    cols: usize,
    indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl Measurements {
    pub fn new(pattern: &SamplingPattern, values: Vec<Complex64>) -> Result<Self> {
        let indices = pattern.indices();
        if indices.len() != values.len() {
            return Err(Error::Format(format!(
                "{} measurement values for a pattern of {} points",
                values.len(),
                indices.len()
            )));
        }
        let (rows, cols) = pattern.shape();
        Ok(Self {
            rows,
            cols,
            indices,
            values,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.values)
    }

    /// Measurements embedded into a full-size k-space buffer, zeros elsewhere.
    pub fn zero_filled(&self) -> KSpace {
        let mut data = vec![Complex64::new(0.0, 0.0); self.rows * self.cols];
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            data[i] = v;
        }
        KSpace::from_raw(self.rows, self.cols, data)
    }

    /// Adds `other` entrywise; both must come from the same pattern.
    pub fn add_noise_values(&self, noise: &[Complex64]) -> Result<Self> {
        if noise.len() != self.values.len() {
            return Err(Error::Format("noise length differs from measurement count".into()));
        }
        Ok(Self {
            values: self.values.iter().zip(noise).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }
}

/// `P_Ω k`: picks the pattern's coefficients in row-major order.
pub fn subsample(k: &KSpace, pattern: &SamplingPattern) -> Result<Measurements> {
    ensure_shape(pattern.shape(), k.shape())?;
    let indices = pattern.indices();
    let values = indices.iter().map(|&i| k.data[i]).collect();
    Ok(Measurements {
        rows: k.rows,
        cols: k.cols,
        indices,
        values,
    })
}

/// `Ψ* P_Ω* b`: zero-filled inverse transform of the measurements.
pub fn adjoint_zero_fill(m: &Measurements) -> ComplexImage {
    ifft2_unitary(&m.zero_filled())
}

/// Signed frequency of storage index `k` along an axis of length `n`, in
/// `[-n/2, n/2)`.
pub fn centered_frequency(k: usize, n: usize) -> i64 {
    let half = (n / 2) as i64;
    let c = ((k + n / 2) % n) as i64;
    c - half
}

/// Storage index → position in the fftshifted (DC-at-center) ordering.
pub fn centered_index(k: usize, n: usize) -> usize {
    (k + n / 2) % n
}

/// Inverse of [`centered_index`].
pub fn storage_index(c: usize, n: usize) -> usize {
    (c + n - n / 2) % n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_buffers() {
        assert!(matches!(
            ComplexImage::new(2, 2, vec![Complex64::new(0.0, 0.0); 3]),
            Err(Error::Format(_))
        ));
        let mut data = vec![Complex64::new(0.0, 0.0); 4];
        data[2].im = f64::NAN;
        assert!(matches!(ComplexImage::new(2, 2, data), Err(Error::NonFinite(2))));
        assert!(ComplexImage::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn centered_mapping_round_trips() {
        for n in [1usize, 2, 4, 8, 32] {
            for k in 0..n {
                assert_eq!(storage_index(centered_index(k, n), n), k);
            }
        }
        assert_eq!(centered_frequency(0, 4), 0);
        assert_eq!(centered_frequency(3, 4), -1);
        assert_eq!(centered_frequency(2, 4), -2);
        assert_eq!(centered_index(0, 4), 2);
    }

    #[test]
    fn zero_image_does_not_normalize() {
        assert!(matches!(ComplexImage::zeros(2, 2).normalized(), Err(Error::ZeroSignal)));
    }
}
