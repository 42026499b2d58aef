//! Independent solves over a list of voltages.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::membrane::{solve_minimal, Profile, SolveOptions, SolveStatus};
use crate::operators::LaplaceOperator;

use super::decay::{decay_window, fit_boundary_decay};
use super::stability::stability;

/// Threshold on the normalized gap `inf (a - u) ρ^{-γ}` used by
/// [`lambda_star_diagnostic`].
pub const NORMALIZED_GAP_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub lambda: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub sup_norm_u: f64,
    /// `min (a + ε - u)` over all interior nodes.
    pub min_gap: f64,
    pub mu1: Option<f64>,
    pub decay_exponent: Option<f64>,
    /// `inf (a - u) ρ^{-γ}` over the decay window.
    pub normalized_gap: Option<f64>,
    pub u: Vec<f64>,
}

/// Solves at every voltage in `lambdas` (positive, sorted ascending), each
/// from zero. Converged records also carry `μ1` and, when the grid allows,
/// a decay fit.
pub fn sweep_lambda(
    op: &LaplaceOperator,
    prof: &Profile,
    p: f64,
    lambdas: &[f64],
    opts: &SolveOptions,
    eig_tol: f64,
) -> Result<Vec<SweepRecord>> {
    if lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidParameter("sweep voltages must be positive".into()));
    }
    if lambdas.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("sweep voltages must be sorted".into()));
    }
    let window = decay_window(op.grid());
    lambdas
        .par_iter()
        .map(|&lambda| {
            let r = solve_minimal(op, prof, p, lambda, opts)?;
            let sup_norm_u = r.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let mut rec = SweepRecord {
                lambda,
                status: r.status,
                iterations: r.iterations,
                sup_norm_u,
                min_gap: r.min_gap(),
                mu1: None,
                decay_exponent: None,
                normalized_gap: None,
                u: Vec::new(),
            };
            if r.is_converged() && opts.epsilon == 0.0 {
                rec.mu1 = Some(stability(op, prof, p, lambda, &r.u, eig_tol)?.mu1);
                rec.decay_exponent = fit_boundary_decay(op.grid(), &r.u, prof.gamma(), p).ok().map(|f| f.exponent);
                let (a, rho) = (prof.values(), prof.rho());
                rec.normalized_gap =
                    window.iter().map(|&i| (a[i] - r.u[i]) / rho[i].powf(prof.gamma())).reduce(f64::min);
            }
            rec.u = r.u.into_vec();
            Ok(rec)
        })
        .collect()
}

/// First swept voltage whose normalized gap drops below
/// [`NORMALIZED_GAP_FLOOR`]. A diagnostic only.
pub fn lambda_star_diagnostic(records: &[SweepRecord]) -> Option<f64> {
    records.iter().find(|r| r.normalized_gap.is_some_and(|g| g < NORMALIZED_GAP_FLOOR)).map(|r| r.lambda)
}

/// `sup |u - v|`.
pub fn sup_distance(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}
