//! Analytic bracket for the pull-in voltage: a constructive lower bound at
//! which the iteration provably converges, and an integral upper bound above
//! which no solution exists.

use crate::error::{Error, Result};
use crate::membrane::Profile;
use crate::operators::LaplaceOperator;

use super::regime::in_existence_range;

/// `∫ a / ∫ G[1] a^{-p}` with the nodal quadrature, without the
/// integrability check. Always finite on a grid.
pub fn lambda_upper_bound_discrete(op: &LaplaceOperator, prof: &Profile, p: f64) -> Result<f64> {
    let a = prof.values();
    let g1 = op.green_apply(&vec![1.0; a.len()])?;
    let num: f64 = a.iter().sum();
    let den: f64 = g1.iter().zip(a.iter()).map(|(g, a)| g * a.powf(-p)).sum();
    Ok(num / den)
}

/// Integral upper bound on the pull-in voltage, for `p < 2/γ` where
/// `G[1] a^{-p}` is integrable.
pub fn lambda_upper_bound(op: &LaplaceOperator, prof: &Profile, p: f64) -> Result<f64> {
    let limit = 2.0 / prof.gamma();
    if !(p > 0.0) || p >= limit {
        return Err(Error::Precondition(format!(
            "upper bound needs 0 < p < 2/gamma = {limit}: G[1] a^(-p) is not integrable at p = {p}"
        )));
    }
    lambda_upper_bound_discrete(op, prof, p)
}

/// `μ* = κ^{-1} / (p + 1)`.
pub fn mu_star(kappa: f64, p: f64) -> f64 {
    1.0 / (kappa * (p + 1.0))
}

/// `max_i G[ρ^{-pγ}]_i / ρ_i^γ`, the discrete constant that turns the
/// induction `v_n ≤ μ* ρ^γ` into an exact statement on the grid.
pub fn green_decay_constant(op: &LaplaceOperator, prof: &Profile, p: f64) -> Result<f64> {
    let gamma = prof.gamma();
    let rho = prof.rho();
    let f: Vec<f64> = rho.iter().map(|r| r.powf(-p * gamma)).collect();
    let g = op.green_apply(&f)?;
    Ok(g.iter().zip(rho.iter()).map(|(g, r)| g / r.powf(gamma)).fold(0.0, f64::max))
}

/// Guaranteed-solvable voltage `λ# = p^p (κ^{-1}/(p+1))^{p+1} / c4`.
pub fn lambda_hash(op: &LaplaceOperator, prof: &Profile, p: f64) -> Result<f64> {
    if !in_existence_range(prof.gamma(), p) {
        return Err(Error::Precondition(format!(
            "p = {p} is outside the existence range for gamma = {}",
            prof.gamma()
        )));
    }
    let c4 = green_decay_constant(op, prof, p)?;
    Ok(p.powf(p) * mu_star(prof.kappa(), p).powf(p + 1.0) / c4)
}
