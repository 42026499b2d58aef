//! Smallest eigenvalue of `A - diag(w)` by shift-and-invert power iteration.
//!
//! `A - diag(w)` is a Z-matrix, so for any shift `σ` below its smallest
//! eigenvalue `B = A - diag(w) - σI` is a nonsingular M-matrix with a
//! positive inverse. Power iteration on `B^{-1}` from a positive vector then
//! stays positive and converges to the Perron vector, and the
//! Collatz–Wielandt quotients `min_i y_i/x_i`, `max_i y_i/x_i` of each step
//! bracket `1/(μ - σ)`. The lower end of that bracket is a rigorous lower
//! bound on `μ`, which lets the shift move up towards `μ` without crossing
//! it. The same argument holds for the nonsymmetric cut-cell operator.

use crate::error::{Error, Result};
use crate::geometry::ScalarField;

use super::LaplaceOperator;

pub const DEFAULT_EIGEN_TOL: f64 = 1e-8;

const MAX_ITER: usize = 5_000;

/// Smallest eigenpair of `A - diag(weight)`.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub mu: f64,
    /// Positive eigenfield with unit discrete L² norm.
    pub phi: ScalarField,
    pub iterations: usize,
    /// `‖(A - diag(w))φ - μφ‖` in the discrete L² norm.
    pub residual: f64,
    pub tol: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(super) fn smallest_eigenvalue(op: &LaplaceOperator, weight: &[f64], tol: f64) -> Result<EigenResult> {
    let grid = op.grid();
    let n = grid.len();
    if weight.len() != n {
        return Err(Error::FieldLength { expected: n, got: weight.len() });
    }
    if let Some(node) = weight.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { node });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("eigen tolerance {tol} must be positive")));
    }
    let a = op.matrix();

    // every eigenvalue of a Z-matrix sits above its smallest row sum
    let lower = (0..n).map(|i| a.row_sum(i) - weight[i]).fold(f64::INFINITY, f64::min);
    let shifted = |sigma: f64| weight.iter().map(|w| w + sigma).collect::<Vec<_>>();

    let mut sigma = lower - 1.0;
    let mut solver = op.shifted_solver(&shifted(sigma))?;
    let mut can_move = true;

    let norm = |v: &[f64]| grid.l2_norm(v);
    let mut x = vec![1.0; n];
    let s = norm(&x);
    x.iter_mut().for_each(|v| *v /= s);

    let mut mu_prev = f64::NAN;
    let mut residual = f64::INFINITY;
    let mut r = vec![0.0; n];
    for iteration in 1..=MAX_ITER {
        let mut y = solver.solve(&x)?;
        let theta = dot(&x, &y) / dot(&y, &y);
        let mu = sigma + theta;

        // Collatz–Wielandt bracket for 1/(μ1 - σ)
        let mut bounds = Some((f64::INFINITY, 0.0f64));
        for (xi, yi) in x.iter().zip(&y) {
            if *xi <= 0.0 || *yi <= 0.0 {
                bounds = None;
                break;
            }
            if let Some((lo, hi)) = bounds.as_mut() {
                let q = yi / xi;
                *lo = lo.min(q);
                *hi = hi.max(q);
            }
        }

        let s = norm(&y);
        y.iter_mut().for_each(|v| *v /= s);
        a.mul_vec(&y, &mut r);
        for i in 0..n {
            r[i] -= (weight[i] + mu) * y[i];
        }
        residual = norm(&r);

        let scale = 1.0 + mu.abs();
        if (mu - mu_prev).abs() < tol * scale && residual < tol * scale {
            return Ok(EigenResult {
                mu,
                phi: ScalarField::from_vec_unchecked(y),
                iterations: iteration,
                residual,
                tol,
            });
        }
        mu_prev = mu;
        x = y;

        if let (true, Some((qmin, qmax))) = (can_move, bounds) {
            let mu_lo = sigma + 1.0 / qmax;
            let mu_hi = sigma + 1.0 / qmin;
            let gap = (mu_hi - mu_lo).max(1e-4 * (1.0 + mu_lo.abs()));
            let target = mu_lo - gap;
            if target > sigma && mu_lo - sigma > 2.0 * gap {
                match op.shifted_solver(&shifted(target)) {
                    Ok(next) => {
                        solver = next;
                        sigma = target;
                    }
                    Err(Error::Breakdown { .. }) => can_move = false,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Err(Error::EigenDiverged { iterations: MAX_ITER, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, Domain};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn op(domain: Domain, n: usize) -> LaplaceOperator {
        LaplaceOperator::assemble(Arc::new(build_grid(domain, n).unwrap()))
    }

    #[test]
    fn dirichlet_eigenvalue_of_unit_interval() {
        let a = op(Domain::unit_interval(), 128);
        let e = a.smallest_eigenvalue(&vec![0.0; 127], 1e-10).unwrap();
        // discrete value (4/h²) sin²(πh/2)
        let h = 1.0 / 128.0;
        let exact = 4.0 / (h * h) * (std::f64::consts::PI * h / 2.0).sin().powi(2);
        assert_relative_eq!(e.mu, exact, max_relative = 1e-9);
        assert!((e.mu - std::f64::consts::PI.powi(2)).abs() < 1e-3);
        assert_relative_eq!(a.grid().l2_norm(&e.phi), 1.0, epsilon = 1e-12);
        assert!(e.phi.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn constant_weight_shifts_spectrum() {
        let a = op(Domain::unit_interval(), 64);
        let base = a.smallest_eigenvalue(&vec![0.0; 63], 1e-10).unwrap().mu;
        for c in [-3.0, 2.5, 9.0, 20.0] {
            let mu = a.smallest_eigenvalue(&vec![c; 63], 1e-10).unwrap().mu;
            assert_relative_eq!(mu, base - c, epsilon = 1e-7 * (1.0 + base.abs()));
        }
    }

    #[test]
    fn disk_eigenvalue_approaches_bessel_zero() {
        // j_{0,1}² for the unit disk
        let j01_sq = 2.404_825_557_695_773f64.powi(2);
        let mut errs = Vec::new();
        for n in [32, 64] {
            let a = op(Domain::Disk { radius: 1.0 }, n);
            let e = a.smallest_eigenvalue(&vec![0.0; a.grid().len()], 1e-9).unwrap();
            assert!(e.residual < 1e-8 * (1.0 + e.mu));
            errs.push((e.mu - j01_sq).abs());
        }
        assert!(errs[1] < errs[0] && errs[1] < 0.02, "{errs:?}");
    }

    #[test]
    fn rejects_mismatched_weight() {
        let a = op(Domain::unit_interval(), 16);
        assert!(a.smallest_eigenvalue(&[0.0; 3], 1e-8).is_err());
        assert!(a.smallest_eigenvalue(&[0.0; 15], 0.0).is_err());
    }
}
