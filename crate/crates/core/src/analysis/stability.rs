//! Linearized stability of a minimal solution.

use crate::error::{Error, Result};
use crate::geometry::ScalarField;
use crate::membrane::Profile;
use crate::operators::LaplaceOperator;

/// First eigenvalue of `-Δ - pλ (a - u)^{-(p+1)}`.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub mu1: f64,
    pub phi: ScalarField,
    /// `μ1 > margin`.
    pub stable: bool,
    /// Ten times the eigen tolerance.
    pub margin: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// `pλ (a - u)^{-(p+1)}` at the interior nodes.
pub fn linearized_weight(prof: &Profile, p: f64, lambda: f64, u: &[f64]) -> Result<Vec<f64>> {
    let a = prof.values();
    if u.len() != a.len() {
        return Err(Error::FieldLength { expected: a.len(), got: u.len() });
    }
    a.iter()
        .zip(u)
        .enumerate()
        .map(|(node, (&a, &u))| {
            let gap = a - u;
            if gap > 0.0 {
                Ok(p * lambda * gap.powf(-(p + 1.0)))
            } else {
                Err(Error::NonpositiveGap { node, gap })
            }
        })
        .collect()
}

pub fn stability(
    op: &LaplaceOperator,
    prof: &Profile,
    p: f64,
    lambda: f64,
    u: &[f64],
    eig_tol: f64,
) -> Result<StabilityReport> {
    let weight = linearized_weight(prof, p, lambda, u)?;
    let e = op.smallest_eigenvalue(&weight, eig_tol)?;
    let margin = 10.0 * eig_tol;
    Ok(StabilityReport {
        mu1: e.mu,
        phi: e.phi,
        stable: e.mu > margin,
        margin,
        iterations: e.iterations,
        residual: e.residual,
    })
}
