//! Log-log fit of the boundary decay of a solution.

use crate::error::{Error, Result};
use crate::geometry::{boundary_distance, Grid};
use crate::membrane::is_log_case;

/// Upper end of the fit window in `ρ`.
pub const WINDOW_MAX: f64 = 0.1;
/// Node layers next to the boundary left out of the fit.
pub const SKIPPED_LAYERS: usize = 4;
pub const MIN_SAMPLES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    pub intercept: f64,
    /// `[ρ_min, ρ_max]` actually spanned by the samples.
    pub window: (f64, f64),
    pub r2: f64,
    /// The fit used `u / ln(1/ρ)` (case `pγ = 1`).
    pub log_corrected: bool,
    pub samples: usize,
}

/// Nodes of the midline (the whole grid in 1D) with
/// `(SKIPPED_LAYERS + 1) h ≤ ρ ≤ WINDOW_MAX`.
pub fn decay_window(grid: &Grid) -> Vec<usize> {
    let rho = boundary_distance(grid);
    let lo = (SKIPPED_LAYERS + 1) as f64 * grid.min_spacing() * (1.0 - 1e-9);
    grid.midline_nodes().into_iter().filter(|&i| rho[i] >= lo && rho[i] <= WINDOW_MAX).collect()
}

/// Weighted least squares of `log u` against `log ρ` over the window.
///
/// Samples are weighted by `h/ρ`, their spacing in `log ρ`.
pub fn fit_boundary_decay(grid: &Grid, u: &[f64], gamma: f64, p: f64) -> Result<DecayFit> {
    if u.len() != grid.len() {
        return Err(Error::FieldLength { expected: grid.len(), got: u.len() });
    }
    let nodes = decay_window(grid);
    if nodes.len() < MIN_SAMPLES {
        return Err(Error::Precondition(format!(
            "decay window holds {} nodes, need at least {MIN_SAMPLES}; refine the grid",
            nodes.len()
        )));
    }
    let rho = boundary_distance(grid);
    let log_corrected = is_log_case(p, gamma);
    let h = grid.min_spacing();

    let mut pts = Vec::with_capacity(nodes.len());
    for &i in &nodes {
        let r = rho[i];
        if !(u[i] > 0.0) {
            return Err(Error::Precondition(format!("u = {} is not positive at node {i}", u[i])));
        }
        let y = if log_corrected { u[i] / (1.0 / r).ln() } else { u[i] };
        pts.push((r.ln(), y.ln(), h / r));
    }

    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| p.2 * (p.1 - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Precondition("decay window spans a single distance".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| p.2 * (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };

    let (lo, hi) = nodes.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &i| (lo.min(rho[i]), hi.max(rho[i])));
    Ok(DecayFit { exponent: slope, intercept, window: (lo, hi), r2, log_corrected, samples: nodes.len() })
}
