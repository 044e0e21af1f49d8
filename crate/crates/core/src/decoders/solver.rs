use num_complex::Complex64;

use super::{zero, ConvergenceReport, DecoderConfig};
use crate::signal::{fft2_in_place, ifft2_in_place, Measurements};

/// Nonsmooth term `h(x)` with a proximal operator.
pub trait Regularizer {
    fn value(&mut self, x: &[Complex64]) -> f64;

    /// Replaces `v` with `argmin_z h(z) + ½‖z − v‖²`.
    fn prox(&mut self, v: &mut [Complex64]);
}

/// Smooth data term `½‖M ⊙ Ψx − b‖²` with `b` zero-filled to full size.
pub(super) struct Problem {
    rows: usize,
    cols: usize,
    mask: Vec<bool>,
    target: Vec<Complex64>,
}

impl Problem {
    pub(super) fn new(b: &Measurements) -> Self {
        let (rows, cols) = b.shape();
        let mut mask = vec![false; rows * cols];
        for &i in b.indices() {
            mask[i] = true;
        }
        Self {
            rows,
            cols,
            mask,
            target: b.zero_filled().into_data(),
        }
    }

    /// Writes the masked residual `M ⊙ Ψx − b` into `buf`, returns `½‖·‖²`.
    fn residual(&self, x: &[Complex64], buf: &mut Vec<Complex64>) -> f64 {
        buf.clear();
        buf.extend_from_slice(x);
        fft2_in_place(buf, self.rows, self.cols);
        let mut acc = 0.0;
        for ((r, &m), t) in buf.iter_mut().zip(&self.mask).zip(&self.target) {
            *r = if m { *r - t } else { zero() };
            acc += r.norm_sqr();
        }
        0.5 * acc
    }

    pub(super) fn data_term(&self, x: &[Complex64], buf: &mut Vec<Complex64>) -> f64 {
        self.residual(x, buf)
    }

    /// `Ψ*(M ⊙ Ψx − b)` into `buf`.
    fn gradient(&self, x: &[Complex64], buf: &mut Vec<Complex64>) {
        self.residual(x, buf);
        ifft2_in_place(buf, self.rows, self.cols);
    }
}

/// Accelerated proximal gradient with unit step and function-value restart:
/// a step that would raise the objective is rejected and the momentum reset,
/// so the recorded objective sequence is non-increasing.
pub(super) fn solve<R: Regularizer>(
    problem: &Problem,
    reg: &mut R,
    x0: Vec<Complex64>,
    cfg: &DecoderConfig,
    mut trace: Option<&mut Vec<f64>>,
) -> (Vec<Complex64>, ConvergenceReport) {
    let n = x0.len();
    let mut buf = Vec::with_capacity(n);
    let mut x = x0;
    let mut data_x = problem.residual(&x, &mut buf);
    let mut f_x = data_x + reg.value(&x);
    if let Some(t) = trace.as_deref_mut() {
        t.push(f_x);
    }
    let mut y = x.clone();
    let mut z = vec![zero(); n];
    let mut t = 1.0f64;
    let mut converged = false;
    let mut iterations = 0;

    let eps_reached = |data: f64| cfg.epsilon > 0.0 && (2.0 * data).sqrt() <= cfg.epsilon;
    if eps_reached(data_x) {
        converged = true;
    }

    while !converged && iterations < cfg.max_iters {
        iterations += 1;
        problem.gradient(&y, &mut buf);
        for ((zi, yi), gi) in z.iter_mut().zip(&y).zip(&buf) {
            *zi = yi - gi;
        }
        reg.prox(&mut z);
        let data_z = problem.residual(&z, &mut buf);
        let f_z = data_z + reg.value(&z);

        if f_z <= f_x {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / t_next;
            for ((yi, zi), xi) in y.iter_mut().zip(&z).zip(&x) {
                *yi = zi + (zi - xi) * beta;
            }
            let decrease = f_x - f_z;
            std::mem::swap(&mut x, &mut z);
            f_x = f_z;
            data_x = data_z;
            t = t_next;
            if decrease <= cfg.tol * f_x.abs() || eps_reached(data_x) {
                converged = true;
            }
        } else {
            // restart from the current iterate
            y.copy_from_slice(&x);
            t = 1.0;
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(f_x);
        }
    }

    let report = ConvergenceReport {
        iterations,
        final_objective: f_x,
        residual: (2.0 * data_x).sqrt(),
        converged,
    };
    (x, report)
}
