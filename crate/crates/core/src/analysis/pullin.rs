//! Bisection for the pull-in voltage between the analytic bounds.

use crate::error::{Error, Result};
use crate::membrane::{solve_minimal, Profile, SolveOptions, SolveStatus};
use crate::operators::LaplaceOperator;

use super::bounds::{lambda_hash, lambda_upper_bound};

pub const DEFAULT_REL_TOL: f64 = 1e-3;

/// Bracket `[lambda_lo, lambda_hi]` around the discrete pull-in voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullInResult {
    /// Largest voltage with a converged solve.
    pub lambda_lo: f64,
    /// Smallest voltage classified as not solvable.
    pub lambda_hi: f64,
    pub lambda_upper: f64,
    pub lambda_hash: f64,
    /// Solves that exhausted the (enlarged) budget and were treated as not
    /// solvable.
    pub undecided_count: usize,
    /// `(hi - lo) / hi` at termination.
    pub rel_width: f64,
    pub solves: usize,
}

impl PullInResult {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lambda_lo + self.lambda_hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Solvable,
    Unsolvable,
    Undecided,
}

struct Classifier<'a> {
    op: &'a LaplaceOperator,
    prof: &'a Profile,
    p: f64,
    opts: SolveOptions,
    solves: usize,
}

impl Classifier<'_> {
    fn classify(&mut self, lambda: f64) -> Result<Outcome> {
        let mut opts = self.opts;
        for attempt in 0..2 {
            self.solves += 1;
            let r = solve_minimal(self.op, self.prof, self.p, lambda, &opts)?;
            match r.status {
                SolveStatus::Converged => return Ok(Outcome::Solvable),
                SolveStatus::Touchdown => return Ok(Outcome::Unsolvable),
                SolveStatus::IterBudget if attempt == 0 => opts.max_iter *= 4,
                SolveStatus::IterBudget => {}
            }
        }
        Ok(Outcome::Undecided)
    }
}

/// Bisects on `λ` over `[λ#, λ_upper]` until `(hi - lo)/hi ≤ rel_tol`.
///
/// Undecided solves count as not solvable, which keeps `lambda_lo` a
/// verified solvable voltage.
pub fn find_pullin(
    op: &LaplaceOperator,
    prof: &Profile,
    p: f64,
    rel_tol: f64,
    opts: &SolveOptions,
) -> Result<PullInResult> {
    if !(1e-4..=1e-2).contains(&rel_tol) {
        return Err(Error::InvalidParameter(format!("rel_tol = {rel_tol} must lie in [1e-4, 1e-2]")));
    }
    let hash = lambda_hash(op, prof, p)?;
    let upper = lambda_upper_bound(op, prof, p)?;
    if !(hash < upper) {
        return Err(Error::InvalidBracket(format!("lambda_hash = {hash} is not below lambda_upper = {upper}")));
    }

    let mut c = Classifier { op, prof, p, opts: *opts, solves: 0 };
    if c.classify(hash)? != Outcome::Solvable {
        return Err(Error::InvalidBracket(format!(
            "no converged solve at lambda_hash = {hash}; the grid is too coarse or the iteration budget too small"
        )));
    }
    if c.classify(upper)? == Outcome::Solvable {
        return Err(Error::InvalidBracket(format!("converged solve at lambda_upper = {upper}")));
    }

    let (mut lo, mut hi) = (hash, upper);
    let mut undecided = 0;
    while (hi - lo) / hi > rel_tol {
        let mid = 0.5 * (lo + hi);
        match c.classify(mid)? {
            Outcome::Solvable => lo = mid,
            Outcome::Unsolvable => hi = mid,
            Outcome::Undecided => {
                undecided += 1;
                hi = mid;
            }
        }
    }
    Ok(PullInResult {
        lambda_lo: lo,
        lambda_hi: hi,
        lambda_upper: upper,
        lambda_hash: hash,
        undecided_count: undecided,
        rel_width: (hi - lo) / hi,
        solves: c.solves,
    })
}
