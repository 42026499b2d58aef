//! Banded LU factorization without pivoting.
//!
//! Every matrix factored here is a nonsingular M-matrix (the Laplacian,
//! possibly shifted by a diagonal that keeps it one). For those, Gaussian
//! elimination without pivoting keeps `L` and `U` in M-matrix sign pattern,
//! so both triangular solves map nonnegative data to nonnegative results in
//! floating point as well. The monotone iteration depends on that.

use crate::error::{Error, Result};

use super::sparse::CsrMatrix;

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    bw: usize,
    // row-major band: entry (i, j) at i * (2bw + 1) + (j + bw - i)
    band: Vec<f64>,
}

impl BandedLu {
    /// Factors `A - diag(shift)`.
    pub fn factor(a: &CsrMatrix, shift: Option<&[f64]>) -> Result<Self> {
        let n = a.dim();
        let bw = a.bandwidth();
        let width = 2 * bw + 1;
        let mut band = vec![0.0; n * width];
        for i in 0..n {
            for (j, v) in a.row(i) {
                band[i * width + j + bw - i] += v;
            }
            if let Some(s) = shift {
                band[i * width + bw] -= s[i];
            }
        }

        for k in 0..n {
            let pivot = band[k * width + bw];
            if !(pivot > 0.0) || !pivot.is_finite() {
                return Err(Error::Breakdown { row: k, pivot });
            }
            let last = (k + bw).min(n - 1);
            for i in k + 1..=last {
                let ik = i * width + k + bw - i;
                let l = band[ik];
                if l == 0.0 {
                    continue;
                }
                let l = l / pivot;
                band[ik] = l;
                for j in k + 1..=last {
                    let u = band[k * width + j + bw - k];
                    if u != 0.0 {
                        band[i * width + j + bw - i] -= l * u;
                    }
                }
            }
        }
        Ok(Self { n, bw, band })
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw, width) = (self.n, self.bw, 2 * self.bw + 1);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row = &self.band[i * width..];
            let mut s = x[i];
            for j in lo..i {
                s -= row[j + bw - i] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let row = &self.band[i * width..];
            let mut s = x[i];
            for j in i + 1..=hi {
                s -= row[j + bw - i] * x[j];
            }
            x[i] = s / row[bw];
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
