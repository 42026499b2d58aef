//! Ground-plate profiles and the monotone iteration for the minimal solution.
//!
//! The minimal solution is the limit of
//!
//! ```text
//!     v_0 = 0,    v_n = λ G[(a + ε - v_{n-1})^{-p}],
//! ```
//!
//! which is nondecreasing because `G` preserves order. The iterate is
//! advanced in increment form, `v_n = v_{n-1} + λ G[f(v_{n-1}) - f(v_{n-2})]`,
//! so that every step adds the solution of an M-matrix system with
//! nonnegative data. With a direct factorization that increment is
//! nonnegative in floating point too, which makes the monotonicity exact.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{boundary_distance, varrho, Grid, ScalarField};
use crate::operators::LaplaceOperator;

/// Shape of the ground plate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileShape {
    /// `a = ρ^γ`.
    PurePower,
    /// `a = ρ^γ (1 + ½ sin θ(x))`, with `θ` a single angular or axial wave.
    /// Needs `κ ≥ 2`.
    Modulated,
}

/// Ground-plate profile `a` with `κ^{-1} ρ^γ ≤ a ≤ κ ρ^γ` and `0 < a ≤ 1`.
#[derive(Debug, Clone)]
pub struct Profile {
    grid: Arc<Grid>,
    a: ScalarField,
    rho: ScalarField,
    gamma: f64,
    kappa: f64,
    shape: Option<ProfileShape>,
}

fn modulation(grid: &Grid, x: [f64; 2]) -> f64 {
    use crate::geometry::Domain;
    use std::f64::consts::TAU;
    let theta = match *grid.domain() {
        Domain::Interval { length } => TAU * x[0] / length,
        Domain::Rectangle { lx, ly } => TAU * (x[0] / lx + x[1] / ly),
        Domain::Disk { .. } => 3.0 * x[1].atan2(x[0]),
    };
    1.0 + 0.5 * theta.sin()
}

/// Builds and verifies a profile on `grid`.
pub fn make_profile(grid: Arc<Grid>, gamma: f64, kappa: f64, shape: ProfileShape) -> Result<Profile> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be positive")));
    }
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!("kappa = {kappa} must be at least 1")));
    }
    if shape == ProfileShape::PurePower && kappa != 1.0 {
        return Err(Error::InvalidParameter("a pure power profile has kappa = 1".into()));
    }
    let rho = boundary_distance(&grid);
    let a = grid
        .coords()
        .iter()
        .zip(rho.iter())
        .map(|(&x, &r)| match shape {
            ProfileShape::PurePower => r.powf(gamma),
            ProfileShape::Modulated => r.powf(gamma) * modulation(&grid, x),
        })
        .collect();
    Profile::custom(grid, a, gamma, kappa).map(|p| Profile { shape: Some(shape), ..p })
}

impl Profile {
    /// Profile from explicit nodal values; the two-sided bound and `0 < a ≤ 1`
    /// are checked at every node.
    pub fn custom(grid: Arc<Grid>, a: Vec<f64>, gamma: f64, kappa: f64) -> Result<Self> {
        let profile = Self::unchecked(grid, a, gamma, kappa)?;
        for (node, (&a, &r)) in profile.a.iter().zip(profile.rho.iter()).enumerate() {
            let base = r.powf(gamma);
            let reason = if !(a > 0.0) {
                Some(format!("a = {a} is not positive"))
            } else if a > 1.0 {
                Some(format!("a = {a} exceeds 1"))
            } else if a < base / kappa * (1.0 - 1e-14) {
                Some(format!("a = {a} is below rho^gamma / kappa = {}", base / kappa))
            } else if a > kappa * base * (1.0 + 1e-14) {
                Some(format!("a = {a} is above kappa rho^gamma = {}", kappa * base))
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(Error::ProfileBound { node, reason });
            }
        }
        Ok(profile)
    }

    /// Profile from nodal values without the bound verification; for
    /// synthetic inputs such as a constant plate.
    pub fn unchecked(grid: Arc<Grid>, a: Vec<f64>, gamma: f64, kappa: f64) -> Result<Self> {
        let a = ScalarField::new(&grid, a)?;
        let rho = boundary_distance(&grid);
        Ok(Self { grid, a, rho, gamma, kappa, shape: None })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &ScalarField {
        &self.a
    }

    pub fn rho(&self) -> &ScalarField {
        &self.rho
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn shape(&self) -> Option<ProfileShape> {
        self.shape
    }
}

/// Options of [`solve_minimal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Sup-norm increment tolerance; `None` means `1e-10 · max a`.
    pub tol: Option<f64>,
    pub max_iter: usize,
    /// Touchdown threshold on the gap `a + ε - v`.
    pub touch_eps: f64,
    /// Regularization `ε ≥ 0` of the plate.
    pub epsilon: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: None, max_iter: 10_000, touch_eps: 1e-12, epsilon: 0.0 }
    }
}

impl SolveOptions {
    pub fn with_epsilon(self, epsilon: f64) -> Self {
        Self { epsilon, ..self }
    }

    pub fn with_max_iter(self, max_iter: usize) -> Self {
        Self { max_iter, ..self }
    }

    pub fn resolved_tol(&self, profile: &Profile) -> f64 {
        self.tol.unwrap_or(1e-10 * profile.values().max())
    }

    fn validate(&self) -> Result<()> {
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter(format!("tol = {t} must be positive")));
            }
        }
        if !(self.touch_eps > 0.0) {
            return Err(Error::InvalidParameter(format!("touch_eps = {} must be positive", self.touch_eps)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon = {} must be nonnegative", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    Touchdown,
    IterBudget,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::Touchdown => "Touchdown",
            SolveStatus::IterBudget => "IterBudget",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    /// `sup |v_n - v_{n-1}|`.
    pub increment: f64,
    /// `min (a + ε - v_n)`.
    pub min_gap: f64,
}

/// Outcome of the monotone iteration.
#[derive(Debug, Clone)]
pub struct MinimalSolveResult {
    pub status: SolveStatus,
    /// Last iterate.
    pub u: ScalarField,
    pub lambda: f64,
    pub p: f64,
    pub epsilon: f64,
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
    /// Relative residual (see [`residual_norm`]); infinite after touchdown.
    pub residual: f64,
    /// Steps at which some node decreased. Zero whenever the Green solve is
    /// sign-exact.
    pub monotone_violations: usize,
    pub tol: f64,
}

impl MinimalSolveResult {
    pub fn is_converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn min_gap(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |t| t.min_gap)
    }

    /// True if the increments were still shrinking when the budget ran out.
    pub fn still_shrinking(&self) -> bool {
        let n = self.trace.len();
        n >= 2 && self.trace[n - 1].increment < self.trace[n - 2].increment
    }
}

fn nonlinearity(a: &[f64], eps: f64, v: &[f64], p: f64) -> (Vec<f64>, f64, bool) {
    let mut min_gap = f64::INFINITY;
    let mut finite = true;
    let f = a
        .iter()
        .zip(v)
        .map(|(&a, &v)| {
            let gap = a + eps - v;
            min_gap = min_gap.min(gap);
            let f = gap.powf(-p);
            finite &= f.is_finite() && gap > 0.0;
            f
        })
        .collect();
    (f, min_gap, finite)
}

/// Runs the monotone iteration from `v_0 = 0`.
///
/// Touchdown and an exhausted budget are ordinary outcomes; only a failing
/// linear solve is an error.
pub fn solve_minimal(
    op: &LaplaceOperator,
    prof: &Profile,
    p: f64,
    lambda: f64,
    opts: &SolveOptions,
) -> Result<MinimalSolveResult> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p = {p} must be positive")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be nonnegative")));
    }
    opts.validate()?;
    if op.grid().len() != prof.grid().len() {
        return Err(Error::FieldLength { expected: op.grid().len(), got: prof.grid().len() });
    }
    let tol = opts.resolved_tol(prof);
    let eps = opts.epsilon;
    let a = prof.values();
    let n = a.len();

    let mut v = vec![0.0; n];
    let (mut f_prev, _, _) = nonlinearity(a, eps, &v, p);
    let mut df = f_prev.clone();
    let mut trace = Vec::new();
    let mut violations = 0;
    let mut status = SolveStatus::IterBudget;

    for iteration in 1..=opts.max_iter {
        let dv = op.green_apply(&df)?;
        let mut increment = 0.0f64;
        let mut decreased = false;
        for (vi, &d) in v.iter_mut().zip(dv.iter()) {
            let step = lambda * d;
            decreased |= step < 0.0;
            increment = increment.max(step.abs());
            *vi += step;
        }
        violations += decreased as usize;

        let (f, min_gap, finite) = nonlinearity(a, eps, &v, p);
        trace.push(TraceEntry { iteration, increment, min_gap });
        if min_gap <= opts.touch_eps || !finite {
            status = SolveStatus::Touchdown;
            break;
        }
        if increment <= tol {
            status = SolveStatus::Converged;
            break;
        }
        for ((d, fi), fp) in df.iter_mut().zip(&f).zip(&f_prev) {
            *d = (fi - fp).max(0.0);
        }
        f_prev = f;
    }

    let iterations = trace.len();
    let residual = match status {
        SolveStatus::Touchdown => f64::INFINITY,
        _ => residual_norm(op, prof, p, lambda, &v, eps)?,
    };
    Ok(MinimalSolveResult {
        status,
        u: ScalarField::from_vec_unchecked(v),
        lambda,
        p,
        epsilon: eps,
        iterations,
        trace,
        residual,
        monotone_violations: violations,
        tol,
    })
}

/// `‖A u - λ (a + ε - u)^{-p}‖ / ‖λ (a + ε - u)^{-p}‖` in the discrete L² norm.
///
/// Returns the unscaled numerator when `λ = 0`.
pub fn residual_norm(
    op: &LaplaceOperator,
    prof: &Profile,
    p: f64,
    lambda: f64,
    u: &[f64],
    epsilon: f64,
) -> Result<f64> {
    let a = prof.values();
    if u.len() != a.len() {
        return Err(Error::FieldLength { expected: a.len(), got: u.len() });
    }
    let mut rhs = Vec::with_capacity(u.len());
    for (node, (&a, &u)) in a.iter().zip(u).enumerate() {
        let gap = a + epsilon - u;
        if !(gap > 0.0) {
            return Err(Error::NonpositiveGap { node, gap });
        }
        rhs.push(lambda * gap.powf(-p));
    }
    let au = op.apply(u);
    let grid = op.grid();
    let diff: Vec<f64> = au.iter().zip(&rhs).map(|(x, y)| x - y).collect();
    let num = grid.l2_norm(&diff);
    let den = grid.l2_norm(&rhs);
    Ok(if den > 0.0 { num / den } else { num })
}

/// Measured constants of the two-sided boundary bound
/// `λ w / c ≤ u ≤ c λ ρ^γ`, with `w = ρ^{min{1, 2-pγ}}` or `ρ ln(1/ρ)`
/// when `pγ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    /// `max u / (λ ρ^γ)`.
    pub c_up: f64,
    /// `max λ w / u`.
    pub c_low: f64,
    /// Nodes skipped because `u` underflowed.
    pub excluded: usize,
    pub log_branch: bool,
}

impl BoundReport {
    pub fn is_finite(&self) -> bool {
        self.c_up.is_finite() && self.c_low.is_finite() && self.c_up > 0.0 && self.c_low > 0.0
    }

    /// Both constants finite here and on `finer`, and within a factor 2 of
    /// each other.
    pub fn stable_under_refinement(&self, finer: &BoundReport) -> bool {
        let within = |a: f64, b: f64| a / b <= 2.0 && b / a <= 2.0;
        self.is_finite() && finer.is_finite() && within(self.c_up, finer.c_up) && within(self.c_low, finer.c_low)
    }
}

/// `pγ = 1`, the case with the logarithmic lower weight.
pub fn is_log_case(p: f64, gamma: f64) -> bool {
    (p * gamma - 1.0).abs() <= 1e-12
}

pub fn check_minimal_bounds(result: &MinimalSolveResult, prof: &Profile) -> Result<BoundReport> {
    if !result.is_converged() {
        return Err(Error::Precondition(format!("bound report needs a converged solve, got {}", result.status)));
    }
    if result.epsilon != 0.0 {
        return Err(Error::Precondition("bound report needs epsilon = 0".into()));
    }
    if !(result.lambda > 0.0) {
        return Err(Error::Precondition("bound report needs lambda > 0".into()));
    }
    let (gamma, p, lambda) = (prof.gamma(), result.p, result.lambda);
    let log_branch = is_log_case(p, gamma);
    let tau = if log_branch { 1.0 } else { 2.0 - p * gamma };
    let lower_weight = |r: f64| if log_branch { varrho(r, 1.0) } else { r.powf(tau.min(1.0)) };

    let mut c_up = 0.0f64;
    let mut c_low = 0.0f64;
    let mut excluded = 0;
    for (&u, &r) in result.u.iter().zip(prof.rho().iter()) {
        if !(u > 1e-300) {
            excluded += 1;
            continue;
        }
        c_up = c_up.max(u / (lambda * r.powf(gamma)));
        c_low = c_low.max(lambda * lower_weight(r) / u);
    }
    Ok(BoundReport { c_up, c_low, excluded, log_branch })
}
