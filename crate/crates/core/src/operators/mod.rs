//! Discrete Dirichlet Laplacian, its Green operator, and the smallest
//! eigenvalue of the linearized operator `-Δ - diag(w)`.

mod banded;
mod cg;
mod eigen;
mod sparse;

use std::sync::Arc;

pub use banded::BandedLu;
pub use eigen::{EigenResult, DEFAULT_EIGEN_TOL};
pub use sparse::CsrMatrix;

use crate::error::{Error, Result};
use crate::geometry::{Grid, LegTarget, ScalarField};

/// Above this many unknowns a symmetric operator switches to conjugate
/// gradients by default.
pub const DIRECT_LIMIT: usize = 40_000;

/// Relative residual of the iterative Green solve.
pub const CG_REL_TOL: f64 = 1e-10;

/// How [`LaplaceOperator::green_apply`] solves `A u = f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverKind {
    Direct,
    ConjugateGradient { rel_tol: f64, max_iter: usize },
}

#[derive(Debug, Clone)]
enum Backend {
    Direct(BandedLu),
    Cg { rel_tol: f64, max_iter: usize },
}

/// Assembled `-Δ_h` over the interior nodes of a grid, together with its
/// factorization.
#[derive(Debug, Clone)]
pub struct LaplaceOperator {
    grid: Arc<Grid>,
    matrix: CsrMatrix,
    backend: Backend,
}

/// Row of `-Δ_h` at `node`: three points per axis, with the nonuniform
/// (Shortley–Weller) weights when a leg is cut by the boundary.
fn stencil_row(grid: &Grid, node: usize) -> Vec<(usize, f64)> {
    let h = grid.spacing();
    let mut row = vec![(node, 0.0)];
    for (axis, &h) in h.iter().enumerate().take(grid.dimension()) {
        let legs: Vec<_> = grid.legs(node).iter().filter(|l| l.axis == axis).collect();
        let (back, fwd) = match (legs[0].direction < 0, legs[0], legs[1]) {
            (true, b, f) => (b, f),
            (false, f, b) => (b, f),
        };
        let (sb, sf) = (back.fraction(), fwd.fraction());
        let h2 = h * h;
        row[0].1 += 2.0 / (h2 * sb * sf);
        for (leg, s) in [(back, sb), (fwd, sf)] {
            if let LegTarget::Node(j) = leg.target {
                row.push((j, -2.0 / (h2 * s * (sb + sf))));
            }
        }
    }
    row
}

/// Checks the M-matrix sign pattern and (weak) diagonal dominance, strict on
/// rows that touch the boundary.
fn check_m_matrix(grid: &Grid, a: &CsrMatrix) -> std::result::Result<(), String> {
    for i in 0..a.dim() {
        let mut diag = 0.0;
        let mut off = 0.0;
        for (j, v) in a.row(i) {
            if i == j {
                diag = v;
            } else if v > 0.0 {
                return Err(format!("positive off-diagonal entry ({i}, {j}) = {v}"));
            } else {
                off -= v;
            }
        }
        if !(diag > 0.0) {
            return Err(format!("nonpositive diagonal at row {i}"));
        }
        let slack = diag - off;
        let tol = 1e-12 * diag;
        if slack < -tol {
            return Err(format!("row {i} is not diagonally dominant"));
        }
        if grid.is_boundary_adjacent(i) && slack <= tol {
            return Err(format!("boundary row {i} is not strictly dominant"));
        }
    }
    Ok(())
}

impl LaplaceOperator {
    /// Assembles the operator and picks a direct factorization, unless the
    /// grid is symmetric and larger than [`DIRECT_LIMIT`].
    ///
    /// Panics if the assembled matrix is not an M-matrix; the discrete
    /// maximum principle is load-bearing for everything downstream.
    pub fn assemble(grid: Arc<Grid>) -> Self {
        let kind = if grid.len() > DIRECT_LIMIT && !grid.has_cut_legs() {
            SolverKind::ConjugateGradient { rel_tol: CG_REL_TOL, max_iter: 20 * grid.len() }
        } else {
            SolverKind::Direct
        };
        Self::assemble_with(grid, kind).expect("operator assembly")
    }

    pub fn assemble_with(grid: Arc<Grid>, kind: SolverKind) -> Result<Self> {
        let rows = (0..grid.len()).map(|i| stencil_row(&grid, i)).collect();
        let matrix = CsrMatrix::from_rows(rows);
        if let Err(msg) = check_m_matrix(&grid, &matrix) {
            panic!("assembled Laplacian is not an M-matrix: {msg}");
        }
        let backend = match kind {
            SolverKind::Direct => Backend::Direct(BandedLu::factor(&matrix, None)?),
            SolverKind::ConjugateGradient { rel_tol, max_iter } => {
                if !matrix.is_symmetric() {
                    return Err(Error::InvalidParameter(
                        "conjugate gradients need a symmetric operator; cut-cell grids are not".into(),
                    ));
                }
                Backend::Cg { rel_tol, max_iter }
            }
        };
        Ok(Self { grid, matrix, backend })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn solver_kind(&self) -> SolverKind {
        match self.backend {
            Backend::Direct(_) => SolverKind::Direct,
            Backend::Cg { rel_tol, max_iter } => SolverKind::ConjugateGradient { rel_tol, max_iter },
        }
    }

    /// True when nonnegative data is guaranteed to give a nonnegative
    /// solution in floating point (direct M-matrix factorization).
    pub fn is_sign_exact(&self) -> bool {
        matches!(self.backend, Backend::Direct(_))
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.apply(x)
    }

    /// Discrete Green operator: solves `A u = f`.
    pub fn green_apply(&self, f: &[f64]) -> Result<ScalarField> {
        if f.len() != self.grid.len() {
            return Err(Error::FieldLength { expected: self.grid.len(), got: f.len() });
        }
        if let Some(node) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { node });
        }
        let u = match &self.backend {
            Backend::Direct(lu) => lu.solve(f),
            Backend::Cg { rel_tol, max_iter } => cg::solve(&self.matrix, None, f, *rel_tol, *max_iter)?,
        };
        Ok(ScalarField::from_vec_unchecked(u))
    }

    /// Smallest eigenvalue of `A - diag(weight)` by shift-and-invert power
    /// iteration. See [`EigenResult`].
    pub fn smallest_eigenvalue(&self, weight: &[f64], tol: f64) -> Result<EigenResult> {
        eigen::smallest_eigenvalue(self, weight, tol)
    }

    /// Solves `(A - diag(shift)) x = b` with the same strategy as the Green
    /// solve; used by the eigen iteration.
    pub(crate) fn shifted_solver(&self, shift: &[f64]) -> Result<ShiftedSolver<'_>> {
        Ok(match &self.backend {
            Backend::Direct(_) => ShiftedSolver::Direct(BandedLu::factor(&self.matrix, Some(shift))?),
            Backend::Cg { rel_tol, max_iter } => ShiftedSolver::Cg {
                matrix: &self.matrix,
                shift: shift.to_vec(),
                rel_tol: *rel_tol,
                max_iter: *max_iter,
            },
        })
    }
}

pub(crate) enum ShiftedSolver<'a> {
    Direct(BandedLu),
    Cg { matrix: &'a CsrMatrix, shift: Vec<f64>, rel_tol: f64, max_iter: usize },
}

impl ShiftedSolver<'_> {
    pub(crate) fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self {
            ShiftedSolver::Direct(lu) => Ok(lu.solve(b)),
            ShiftedSolver::Cg { matrix, shift, rel_tol, max_iter } => {
                cg::solve(matrix, Some(shift), b, *rel_tol, *max_iter)
            }
        }
    }
}
