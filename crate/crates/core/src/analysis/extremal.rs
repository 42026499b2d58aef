//! Probes of the minimal branch as `λ` approaches the pull-in voltage.

use crate::error::{Error, Result};
use crate::membrane::{solve_minimal, Profile, SolveOptions, SolveStatus};
use crate::operators::LaplaceOperator;

use super::regime::f0;

/// Ratio of last to first value above which a sequence counts as unbounded.
pub const BOUNDED_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalEntry {
    pub lambda: f64,
    pub status: SolveStatus,
    /// `∫ ρ^{1-β} (a - u)^{-p}`.
    pub i_beta: Option<f64>,
    /// `∫_{ρ > 2r} (a - u)^{-pq}`.
    pub j_q: Option<f64>,
    /// `min_{ρ > 3r} (a - u)`.
    pub core_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalProbe {
    pub beta: f64,
    pub q: f64,
    pub r: f64,
    pub entries: Vec<ExtremalEntry>,
    pub i_beta_bounded: bool,
    pub j_q_bounded: bool,
    /// Smallest core gap over all converged entries.
    pub core_gap_floor: Option<f64>,
    /// Set when `q ≥ f0(p)`, where no bound on `J_q` is known.
    pub warning: Option<String>,
}

fn bounded(values: &[Option<f64>]) -> bool {
    match (values.first(), values.last()) {
        (Some(Some(first)), Some(Some(last))) => values.iter().all(Option::is_some) && last / first <= BOUNDED_RATIO,
        _ => false,
    }
}

#[allow(clippy::too_many_arguments)]
pub fn extremal_probe(
    op: &LaplaceOperator,
    prof: &Profile,
    p: f64,
    lambdas: &[f64],
    beta: f64,
    q: f64,
    r: f64,
    opts: &SolveOptions,
) -> Result<ExtremalProbe> {
    let gamma = prof.gamma();
    if !(beta > 0.0 && beta < gamma) {
        return Err(Error::InvalidParameter(format!("beta = {beta} must lie in (0, gamma = {gamma})")));
    }
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("q = {q} must be at least 1")));
    }
    let rho = prof.rho();
    if !(r > 0.0) || !rho.iter().any(|&x| x > 3.0 * r) {
        return Err(Error::InvalidParameter(format!("r = {r} leaves no nodes with rho > 3r")));
    }
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("no voltages to probe".into()));
    }
    let warning = (q >= f0(p)).then(|| format!("q = {q} >= f0(p) = {}: no bound on J_q is asserted", f0(p)));

    let grid = op.grid();
    let a = prof.values();
    let mut entries = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let res = solve_minimal(op, prof, p, lambda, opts)?;
        let mut e = ExtremalEntry { lambda, status: res.status, i_beta: None, j_q: None, core_gap: None };
        if res.is_converged() {
            let u = &res.u;
            let gap = |i: usize| a[i] - u[i];
            let i_vals: Vec<f64> = (0..u.len()).map(|i| rho[i].powf(1.0 - beta) * gap(i).powf(-p)).collect();
            let j_vals: Vec<f64> =
                (0..u.len()).map(|i| if rho[i] > 2.0 * r { gap(i).powf(-p * q) } else { 0.0 }).collect();
            e.i_beta = Some(grid.integrate(&i_vals));
            e.j_q = Some(grid.integrate(&j_vals));
            e.core_gap = (0..u.len()).filter(|&i| rho[i] > 3.0 * r).map(gap).reduce(f64::min);
        }
        entries.push(e);
    }
    let i_beta: Vec<_> = entries.iter().map(|e| e.i_beta).collect();
    let j_q: Vec<_> = entries.iter().map(|e| e.j_q).collect();
    let core_gap_floor = entries.iter().filter_map(|e| e.core_gap).reduce(f64::min);
    Ok(ExtremalProbe {
        beta,
        q,
        r,
        i_beta_bounded: bounded(&i_beta),
        j_q_bounded: bounded(&j_q),
        core_gap_floor,
        warning,
        entries,
    })
}
