use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::{ComplexImage, KSpace};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    static SCRATCH: RefCell<(Vec<Complex64>, Vec<Complex64>)> = const { RefCell::new((Vec::new(), Vec::new())) };
}

fn transform(data: &mut [Complex64], rows: usize, cols: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), rows * cols);
    let (row_fft, col_fft) = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft(cols, direction), p.plan_fft(rows, direction))
    });
    SCRATCH.with(|s| {
        let (transposed, scratch) = &mut *s.borrow_mut();
        let need = row_fft
            .get_inplace_scratch_len()
            .max(col_fft.get_inplace_scratch_len());
        scratch.resize(need, Complex64::new(0.0, 0.0));

        row_fft.process_with_scratch(data, scratch);

        transposed.resize(rows * cols, Complex64::new(0.0, 0.0));
        for r in 0..rows {
            for c in 0..cols {
                transposed[c * rows + r] = data[r * cols + c];
            }
        }
        col_fft.process_with_scratch(transposed, scratch);
        let scale = 1.0 / ((rows * cols) as f64).sqrt();
        for c in 0..cols {
            for r in 0..rows {
                data[r * cols + c] = transposed[c * rows + r] * scale;
            }
        }
    });
}

/// Unitary forward 2D DFT in place.
pub(crate) fn fft2_in_place(data: &mut [Complex64], rows: usize, cols: usize) {
    transform(data, rows, cols, FftDirection::Forward);
}

/// Unitary inverse 2D DFT in place.
pub(crate) fn ifft2_in_place(data: &mut [Complex64], rows: usize, cols: usize) {
    transform(data, rows, cols, FftDirection::Inverse);
}

/// Unitary 2D DFT, `Ψx`.
pub fn fft2_unitary(img: &ComplexImage) -> KSpace {
    let mut data = img.data().to_vec();
    fft2_in_place(&mut data, img.rows(), img.cols());
    KSpace::from_raw(img.rows(), img.cols(), data)
}

/// Inverse of [`fft2_unitary`], `Ψ*k`.
pub fn ifft2_unitary(k: &KSpace) -> ComplexImage {
    let mut data = k.data().to_vec();
    ifft2_in_place(&mut data, k.rows(), k.cols());
    ComplexImage::from_raw(k.rows(), k.cols(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_maps_to_constant() {
        let mut data = vec![Complex64::new(0.0, 0.0); 16];
        data[0] = Complex64::new(1.0, 0.0);
        let k = fft2_unitary(&ComplexImage::new(4, 4, data).unwrap());
        for z in k.data() {
            assert!((z - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn non_square_dc_is_scaled_sum() {
        let img = ComplexImage::from_real(2, 8, &[1.0; 16]).unwrap();
        let k = fft2_unitary(&img);
        assert!((k.get(0, 0).re - 4.0).abs() < 1e-12);
        assert!(k.data()[1..].iter().all(|z| z.norm() < 1e-12));
    }
}
