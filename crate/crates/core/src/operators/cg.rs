//! Conjugate gradients for symmetric positive definite operators.

use crate::error::{Error, Result};

use super::sparse::CsrMatrix;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `(A - diag(shift)) x = b` to relative residual `rel_tol`.
pub fn solve(a: &CsrMatrix, shift: Option<&[f64]>, b: &[f64], rel_tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = b.len();
    let apply = |x: &[f64], out: &mut [f64]| {
        a.mul_vec(x, out);
        if let Some(s) = shift {
            for i in 0..n {
                out[i] -= s[i] * x[i];
            }
        }
    };

    let b_norm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    for _ in 0..max_iter {
        if rr.sqrt() <= rel_tol * b_norm {
            return Ok(x);
        }
        apply(&p, &mut ap);
        let alpha = rr / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    if rr.sqrt() <= rel_tol * b_norm {
        Ok(x)
    } else {
        Err(Error::SolverDiverged { iterations: max_iter, residual: rr.sqrt() / b_norm })
    }
}
