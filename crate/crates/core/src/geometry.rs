//! Domains, uniform grids, the capped boundary distance `ρ` and the weights
//! `ϱ_τ` that describe the boundary behaviour of `G_Ω[ρ^{τ-2}]`.

use std::ops::Deref;

use crate::error::{Error, Result};

/// Smallest accepted number of cells per axis.
pub const MIN_RESOLUTION: usize = 4;

/// Cap applied to the boundary distance.
pub const RHO_CAP: f64 = 0.5;

/// Bounded domain. Intervals and rectangles have their lower-left corner at
/// the origin; the disk is centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval { length: f64 },
    Rectangle { lx: f64, ly: f64 },
    Disk { radius: f64 },
}

impl Domain {
    pub fn unit_interval() -> Self {
        Domain::Interval { length: 1.0 }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } | Domain::Disk { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        let valid = match *self {
            Domain::Interval { length } => ok(length),
            Domain::Rectangle { lx, ly } => ok(lx) && ok(ly),
            Domain::Disk { radius } => ok(radius),
        };
        if valid {
            Ok(())
        } else {
            Err(Error::InvalidDomain(format!("extents must be finite and positive: {self:?}")))
        }
    }

    /// Exact distance from `x` to the boundary (no cap).
    pub fn distance_to_boundary(&self, x: [f64; 2]) -> f64 {
        match *self {
            Domain::Interval { length } => x[0].min(length - x[0]),
            Domain::Rectangle { lx, ly } => x[0].min(lx - x[0]).min(x[1]).min(ly - x[1]),
            Domain::Disk { radius } => radius - x[0].hypot(x[1]),
        }
    }

    /// Centre of the domain; used for midline sampling.
    pub fn center(&self) -> [f64; 2] {
        match *self {
            Domain::Interval { length } => [0.5 * length, 0.0],
            Domain::Rectangle { lx, ly } => [0.5 * lx, 0.5 * ly],
            Domain::Disk { .. } => [0.0, 0.0],
        }
    }
}

/// What lies at the far end of a stencil leg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LegTarget {
    Node(usize),
    /// The leg crosses `∂Ω` after `fraction · h`, with `fraction ∈ (0, 1]`.
    Boundary {
        fraction: f64,
    },
}

/// One arm of the 3- or 5-point stencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leg {
    pub axis: usize,
    /// `-1` for the backward neighbour, `+1` for the forward one.
    pub direction: i8,
    pub target: LegTarget,
}

impl Leg {
    /// Leg length in units of the axis spacing.
    pub fn fraction(&self) -> f64 {
        match self.target {
            LegTarget::Node(_) => 1.0,
            LegTarget::Boundary { fraction } => fraction,
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self.target, LegTarget::Boundary { .. })
    }
}

/// Uniform grid restricted to the interior of a [`Domain`].
#[derive(Debug, Clone)]
pub struct Grid {
    domain: Domain,
    n: usize,
    spacing: [f64; 2],
    coords: Vec<[f64; 2]>,
    legs: Vec<Vec<Leg>>,
}

impl Grid {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Cells per axis.
    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }

    /// Mesh spacing per axis (the second entry is unused in 1D).
    pub fn spacing(&self) -> [f64; 2] {
        self.spacing
    }

    pub fn min_spacing(&self) -> f64 {
        match self.dimension() {
            1 => self.spacing[0],
            _ => self.spacing[0].min(self.spacing[1]),
        }
    }

    /// Volume attached to each node by the nodal quadrature.
    pub fn cell_volume(&self) -> f64 {
        match self.dimension() {
            1 => self.spacing[0],
            _ => self.spacing[0] * self.spacing[1],
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn legs(&self, node: usize) -> &[Leg] {
        &self.legs[node]
    }

    pub fn is_boundary_adjacent(&self, node: usize) -> bool {
        self.legs[node].iter().any(Leg::is_boundary)
    }

    /// True when some leg is shortened by the curved boundary, which makes
    /// the assembled operator nonsymmetric.
    pub fn has_cut_legs(&self) -> bool {
        self.legs.iter().flatten().any(|l| l.fraction() < 1.0)
    }

    /// Nodal quadrature `Σ f_i · cell_volume`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.cell_volume()
    }

    /// Discrete L² norm `sqrt(cell_volume · Σ f_i²)`.
    pub fn l2_norm(&self, values: &[f64]) -> f64 {
        (values.iter().map(|v| v * v).sum::<f64>() * self.cell_volume()).sqrt()
    }

    /// Nodes on the ray from the domain centre along `+x` (for the interval,
    /// every node), sorted by increasing `x`.
    pub fn midline_nodes(&self) -> Vec<usize> {
        if self.dimension() == 1 {
            return (0..self.len()).collect();
        }
        let c = self.domain.center();
        let row_y = self
            .coords
            .iter()
            .map(|x| x[1])
            .min_by(|a, b| (a - c[1]).abs().total_cmp(&(b - c[1]).abs()))
            .unwrap_or(c[1]);
        let mut nodes: Vec<usize> =
            (0..self.len()).filter(|&i| self.coords[i][1] == row_y && self.coords[i][0] >= c[0]).collect();
        nodes.sort_by(|&a, &b| self.coords[a][0].total_cmp(&self.coords[b][0]));
        nodes
    }
}

/// A nodal field over the interior nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::FieldLength { expected: grid.len(), got: values.len() });
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { node });
        }
        Ok(Self { values })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        Self::new(grid, grid.coords().iter().map(|&x| f(x)).collect())
    }

    pub fn constant(grid: &Grid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.len()])
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl Deref for ScalarField {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

/// Builds the uniform grid with `n` cells per axis.
///
/// Interval and rectangle grids use `h = L / n` per axis and keep the
/// `(n-1)^d` interior lattice points. The disk grid covers `[-R, R]²` with
/// `h = 2R / n`; lattice points strictly inside the circle are kept and every
/// leg that leaves the disk is cut at the circle (Shortley–Weller).
pub fn build_grid(domain: Domain, n: usize) -> Result<Grid> {
    domain.validate()?;
    if n < MIN_RESOLUTION {
        return Err(Error::GridTooCoarse { n, min: MIN_RESOLUTION });
    }
    let grid = match domain {
        Domain::Interval { length } => interval_grid(domain, length, n),
        Domain::Rectangle { lx, ly } => rectangle_grid(domain, lx, ly, n),
        Domain::Disk { radius } => disk_grid(domain, radius, n),
    };
    if grid.is_empty() {
        return Err(Error::InvalidDomain("grid has no interior nodes".into()));
    }
    Ok(grid)
}

fn interval_grid(domain: Domain, length: f64, n: usize) -> Grid {
    let h = length / n as f64;
    let m = n - 1;
    let coords = (1..n).map(|i| [i as f64 * h, 0.0]).collect();
    let legs = (0..m)
        .map(|i| {
            let back = if i == 0 { LegTarget::Boundary { fraction: 1.0 } } else { LegTarget::Node(i - 1) };
            let fwd = if i + 1 == m { LegTarget::Boundary { fraction: 1.0 } } else { LegTarget::Node(i + 1) };
            vec![Leg { axis: 0, direction: -1, target: back }, Leg { axis: 0, direction: 1, target: fwd }]
        })
        .collect();
    Grid { domain, n, spacing: [h, h], coords, legs }
}

fn rectangle_grid(domain: Domain, lx: f64, ly: f64, n: usize) -> Grid {
    let (hx, hy) = (lx / n as f64, ly / n as f64);
    let m = n - 1;
    let idx = |i: usize, j: usize| j * m + i;
    let mut coords = Vec::with_capacity(m * m);
    let mut legs = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            coords.push([(i + 1) as f64 * hx, (j + 1) as f64 * hy]);
            let edge = LegTarget::Boundary { fraction: 1.0 };
            legs.push(vec![
                Leg { axis: 0, direction: -1, target: if i == 0 { edge } else { LegTarget::Node(idx(i - 1, j)) } },
                Leg { axis: 0, direction: 1, target: if i + 1 == m { edge } else { LegTarget::Node(idx(i + 1, j)) } },
                Leg { axis: 1, direction: -1, target: if j == 0 { edge } else { LegTarget::Node(idx(i, j - 1)) } },
                Leg { axis: 1, direction: 1, target: if j + 1 == m { edge } else { LegTarget::Node(idx(i, j + 1)) } },
            ]);
        }
    }
    Grid { domain, n, spacing: [hx, hy], coords, legs }
}

fn disk_grid(domain: Domain, radius: f64, n: usize) -> Grid {
    let h = 2.0 * radius / n as f64;
    let r2 = radius * radius;
    let lattice = |k: usize| -radius + k as f64 * h;
    let inside = |x: f64, y: f64| x * x + y * y < r2;

    let mut index = vec![None; (n + 1) * (n + 1)];
    let mut coords = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            let (x, y) = (lattice(i), lattice(j));
            if inside(x, y) {
                index[j * (n + 1) + i] = Some(coords.len());
                coords.push([x, y]);
            }
        }
    }

    let mut legs = Vec::with_capacity(coords.len());
    for j in 0..=n {
        for i in 0..=n {
            if index[j * (n + 1) + i].is_none() {
                continue;
            }
            let (x, y) = (lattice(i), lattice(j));
            let mut node_legs = Vec::with_capacity(4);
            for (axis, direction) in [(0usize, -1i8), (0, 1), (1, -1), (1, 1)] {
                let (di, dj) = if axis == 0 { (direction as i64, 0) } else { (0, direction as i64) };
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                let neighbour = if (0..=n as i64).contains(&ni) && (0..=n as i64).contains(&nj) {
                    index[nj as usize * (n + 1) + ni as usize]
                } else {
                    None
                };
                let target = match neighbour {
                    Some(k) => LegTarget::Node(k),
                    None => {
                        // distance along the axis from (x, y) to the circle
                        let (along, across) = if axis == 0 { (x, y) } else { (y, x) };
                        let reach = (r2 - across * across).max(0.0).sqrt();
                        let dist = if direction > 0 { reach - along } else { along + reach };
                        LegTarget::Boundary { fraction: (dist / h).clamp(f64::MIN_POSITIVE, 1.0) }
                    }
                };
                node_legs.push(Leg { axis, direction, target });
            }
            legs.push(node_legs);
        }
    }
    Grid { domain, n, spacing: [h, h], coords, legs }
}

/// `ρ(x) = min{1/2, dist(x, ∂Ω)}` at every interior node.
pub fn boundary_distance(grid: &Grid) -> ScalarField {
    let d = grid.domain();
    ScalarField::from_vec_unchecked(grid.coords().iter().map(|&x| d.distance_to_boundary(x).min(RHO_CAP)).collect())
}

/// Pointwise `ϱ_τ(ρ)`: `ρ^{min{1,τ}}` for `τ ≠ 1` and `ρ ln(1/ρ)` for `τ = 1`.
pub fn varrho(rho: f64, tau: f64) -> f64 {
    if tau == 1.0 {
        rho * (1.0 / rho).ln()
    } else {
        rho.powf(tau.min(1.0))
    }
}

/// `ϱ_τ` evaluated at every interior node, for `τ ∈ (0, 2)`.
pub fn varrho_tau(grid: &Grid, tau: f64) -> Result<ScalarField> {
    if !(tau > 0.0 && tau < 2.0) {
        return Err(Error::InvalidParameter(format!("tau = {tau} must lie in (0, 2)")));
    }
    let rho = boundary_distance(grid);
    Ok(ScalarField::from_vec_unchecked(rho.iter().map(|&r| varrho(r, tau)).collect()))
}
