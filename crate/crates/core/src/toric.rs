//! The toric model: convex potentials on a box, their Legendre duals on a
//! bounded grid of log coordinates, and geodesics as affine interpolation of
//! the convex side.
//!
//! A potential is stored through its symplectic potential `û`, sampled on the
//! `(m+1)^dim` nodes of a box `P`. Every node carries mass `1 / (m+1)^dim`,
//! so the total mass is 1. The space-side function is
//! `u(x) = max_y ⟨x, y⟩ − û(y)` over the nodes; larger `û` means smaller `u`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hull;
use crate::rearrange::WeightedSample;

/// Convexity slack, relative to the magnitude of the values.
pub const CONVEXITY_TOL: f64 = 1e-9;
/// Total mass of every potential.
pub const MODEL_MASS: f64 = 1.0;

/// An axis-aligned box with a uniform grid of `m` intervals per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polytope {
    dim: usize,
    bounds: [(f64, f64); 2],
    m: usize,
}

impl Polytope {
    pub fn new(dim: usize, bounds: &[(f64, f64)], m: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidParameter("dimension must be 1 or 2"));
        }
        if bounds.len() != dim {
            return Err(Error::LengthMismatch { expected: dim, found: bounds.len() });
        }
        if m < 8 {
            return Err(Error::InvalidParameter("grid resolution must be at least 8"));
        }
        let mut b = [(0.0, 1.0); 2];
        for (axis, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidParameter("degenerate polytope bounds"));
            }
            b[axis] = (lo, hi);
        }
        Ok(Polytope { dim, bounds: b, m })
    }

    /// The unit box `[0,1]^dim`.
    pub fn unit(dim: usize, m: usize) -> Result<Self> {
        Self::new(dim, &[(0.0, 1.0); 2][..dim.min(2)], m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds[..self.dim]
    }

    /// Nodes per axis.
    pub fn side(&self) -> usize {
        self.m + 1
    }

    pub fn node_count(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let (lo, hi) = self.bounds[axis];
        (hi - lo) / self.m as f64
    }

    /// Largest grid spacing.
    pub fn h(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let sq: f64 = self.bounds().iter().map(|(lo, hi)| (hi - lo) * (hi - lo)).sum();
        libm::sqrt(sq)
    }

    /// Per-axis indices of node `k` (first axis slowest).
    pub fn multi_index(&self, k: usize) -> [usize; 2] {
        match self.dim {
            1 => [k, 0],
            _ => [k / self.side(), k % self.side()],
        }
    }

    pub fn flat_index(&self, idx: [usize; 2]) -> usize {
        match self.dim {
            1 => idx[0],
            _ => idx[0] * self.side() + idx[1],
        }
    }

    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        let (lo, hi) = self.bounds[axis];
        if i == self.m {
            hi
        } else {
            lo + (hi - lo) * i as f64 / self.m as f64
        }
    }

    /// Coordinates of node `k`; unused axes are zero.
    pub fn node(&self, k: usize) -> [f64; 2] {
        let idx = self.multi_index(k);
        let mut y = [0.0; 2];
        for (axis, slot) in y.iter_mut().enumerate().take(self.dim) {
            *slot = self.coordinate(axis, idx[axis]);
        }
        y
    }

    pub fn nodes(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.node_count()).map(move |k| self.node(k))
    }

    /// Mass of a single node.
    pub fn node_mass(&self) -> f64 {
        MODEL_MASS / self.node_count() as f64
    }

    /// Samples `f` at every node.
    pub fn sample(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        self.nodes().map(f).collect()
    }
}

fn dot(dim: usize, x: [f64; 2], y: [f64; 2]) -> f64 {
    let mut s = x[0] * y[0];
    if dim == 2 {
        s += x[1] * y[1];
    }
    s
}

fn check_values(expected: usize, values: &[f64]) -> Result<()> {
    if values.len() != expected {
        return Err(Error::LengthMismatch { expected, found: values.len() });
    }
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn magnitude(values: &[f64]) -> f64 {
    1.0 + values.iter().fold(0.0f64, |a, v| a.max(libm::fabs(*v)))
}

/// Lower convex envelope of grid values on a polytope's grid.
pub fn convexify(polytope: &Polytope, values: &[f64]) -> Result<Vec<f64>> {
    check_values(polytope.node_count(), values)?;
    Ok(hull::lower_hull(polytope.dim(), polytope.side(), values))
}

/// A discretely convex function `û` on the grid of a polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPotential {
    polytope: Polytope,
    values: Vec<f64>,
}

impl ConvexPotential {
    /// Validates that the values coincide with their lower convex envelope.
    pub fn new(polytope: Polytope, values: Vec<f64>) -> Result<Self> {
        check_values(polytope.node_count(), &values)?;
        let gap = hull::convexity_gap(polytope.dim(), polytope.side(), &values);
        if gap > CONVEXITY_TOL * magnitude(&values) {
            return Err(Error::NotConvex { max_gap: gap });
        }
        Ok(ConvexPotential { polytope, values })
    }

    /// Samples `f` on the grid and validates convexity.
    pub fn from_fn(polytope: Polytope, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        Self::new(polytope, polytope.sample(f))
    }

    /// The lower convex envelope of arbitrary grid values.
    pub fn convex_envelope(polytope: Polytope, values: &[f64]) -> Result<Self> {
        let values = convexify(&polytope, values)?;
        Ok(ConvexPotential { polytope, values })
    }

    /// For values that are convex by construction (maxima and nonnegative
    /// combinations of potentials).
    pub(crate) fn from_convex(polytope: Polytope, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), polytope.node_count());
        ConvexPotential { polytope, values }
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `û − c`, the dual of adding `c` on the space side.
    pub fn lowered(&self, c: f64) -> Self {
        Self::from_convex(self.polytope, self.values.iter().map(|v| v - c).collect())
    }

    /// `û + ℓ` for an affine `ℓ(y) = c + ⟨g, y⟩`.
    pub fn plus_affine(&self, c: f64, g: [f64; 2]) -> Self {
        let p = self.polytope;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| v + c + dot(p.dim(), g, p.node(k)))
            .collect();
        Self::from_convex(p, values)
    }

    /// True if `self ≥ other` at every node, i.e. `u ≤ v` on the space side.
    pub fn dominates(&self, other: &ConvexPotential) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a >= b)
    }

    pub fn same_grid(&self, other: &ConvexPotential) -> bool {
        self.polytope == other.polytope
    }

    fn require_same_grid(&self, other: &ConvexPotential) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn neighbour_value(&self, idx: [usize; 2], axis: usize, delta: isize) -> Option<f64> {
        let i = idx[axis] as isize + delta;
        if i < 0 || i > self.polytope.m() as isize {
            return None;
        }
        let mut j = idx;
        j[axis] = i as usize;
        Some(self.values[self.polytope.flat_index(j)])
    }

    /// Gradient at node `k`: centred differences inside, one-sided on the
    /// boundary.
    pub fn gradient(&self, k: usize) -> [f64; 2] {
        let p = &self.polytope;
        let idx = p.multi_index(k);
        let here = self.values[k];
        let mut g = [0.0; 2];
        for (axis, slot) in g.iter_mut().enumerate().take(p.dim()) {
            let h = p.spacing(axis);
            *slot = match (self.neighbour_value(idx, axis, -1), self.neighbour_value(idx, axis, 1)) {
                (Some(a), Some(b)) => (b - a) / (2.0 * h),
                (None, Some(b)) => (b - here) / h,
                (Some(a), None) => (here - a) / h,
                (None, None) => 0.0,
            };
        }
        g
    }

    /// A supporting slope at node `k`: `û(y) ≥ û(y_k) + ⟨g, y − y_k⟩` at
    /// every node.
    pub fn supporting_slope(&self, k: usize) -> [f64; 2] {
        let p = &self.polytope;
        match p.dim() {
            1 => [hull::supporting_slope_1d(&self.values, k) / p.spacing(0), 0.0],
            _ => {
                let s = hull::support_2d(p.side(), &self.values, k);
                [s.slope[0] / p.spacing(0), s.slope[1] / p.spacing(1)]
            }
        }
    }

    /// Largest absolute one-sided difference quotient along any axis.
    ///
    /// For a convex grid function every subgradient, and hence every slope
    /// the Legendre transform needs, is bounded by this per coordinate.
    pub fn slope_bound(&self) -> f64 {
        let p = &self.polytope;
        let mut bound: f64 = 0.0;
        for k in 0..p.node_count() {
            let idx = p.multi_index(k);
            for axis in 0..p.dim() {
                if let Some(b) = self.neighbour_value(idx, axis, 1) {
                    bound = bound.max(libm::fabs(b - self.values[k]) / p.spacing(axis));
                }
            }
        }
        bound
    }

    /// Node masses, all equal, carrying `values` as a function on the nodes.
    pub fn sample_of(&self, values: Vec<f64>) -> Result<WeightedSample> {
        check_values(self.polytope.node_count(), &values)?;
        WeightedSample::uniform(values, MODEL_MASS)
    }

    /// `û_self − û_other` at the nodes.
    pub fn difference(&self, other: &ConvexPotential) -> Result<Vec<f64>> {
        self.require_same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect())
    }
}

/// `û_{u∧v} = max(û_u, û_v)`: the largest potential below both.
pub fn meet(a: &ConvexPotential, b: &ConvexPotential) -> Result<ConvexPotential> {
    a.require_same_grid(b)?;
    let values = a.values.iter().zip(&b.values).map(|(x, y)| x.max(*y)).collect();
    Ok(ConvexPotential::from_convex(a.polytope, values))
}

/// `û_{u∨v} = convexify(min(û_u, û_v))`: the space-side maximum.
pub fn join(a: &ConvexPotential, b: &ConvexPotential) -> Result<ConvexPotential> {
    a.require_same_grid(b)?;
    let mins: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x.min(*y)).collect();
    ConvexPotential::convex_envelope(a.polytope, &mins)
}

/// A uniform grid on `[−R, R]^dim` with `n` intervals per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XGrid {
    dim: usize,
    r: f64,
    n: usize,
}

impl XGrid {
    pub fn new(dim: usize, r: f64, n: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidParameter("dimension must be 1 or 2"));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::OutOfDomain { what: "R", value: r });
        }
        if n < 2 {
            return Err(Error::InvalidParameter("x grid needs at least two intervals"));
        }
        Ok(XGrid { dim, r, n })
    }

    /// A grid whose box contains every slope of the given potentials with a
    /// margin of 1, and whose spacing is at most the polytope spacing.
    pub fn covering(potentials: &[&ConvexPotential]) -> Result<Self> {
        let first = potentials.first().ok_or(Error::Empty)?;
        let p = first.polytope();
        if potentials.iter().any(|q| q.polytope() != p) {
            return Err(Error::GridMismatch);
        }
        let slope = potentials.iter().map(|q| q.slope_bound()).fold(0.0, f64::max);
        let r = slope + 1.0;
        let n = libm::ceil(2.0 * r / p.h()) as usize;
        Self::new(p.dim(), r, n.max(2))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Intervals per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        self.n + 1
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.r / self.n as f64
    }

    pub fn node_count(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        if i == self.n {
            self.r
        } else {
            -self.r + 2.0 * self.r * i as f64 / self.n as f64
        }
    }

    pub fn node(&self, k: usize) -> [f64; 2] {
        match self.dim {
            1 => [self.coordinate(k), 0.0],
            _ => [self.coordinate(k / self.side()), self.coordinate(k % self.side())],
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.node_count()).map(move |k| self.node(k))
    }

    /// Cell index and fractional offset along one axis.
    fn locate(&self, x: f64) -> Result<(usize, f64)> {
        let slack = 1e-12 * (1.0 + self.r);
        if !(x >= -self.r - slack && x <= self.r + slack) {
            return Err(Error::RangeTooSmall { needed: libm::fabs(x), available: self.r });
        }
        let pos = ((x + self.r) / self.spacing()).clamp(0.0, self.n as f64);
        let cell = (libm::floor(pos) as usize).min(self.n - 1);
        Ok((cell, pos - cell as f64))
    }
}

/// A function sampled on an [`XGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceFunction {
    grid: XGrid,
    values: Vec<f64>,
}

impl SpaceFunction {
    pub fn new(grid: XGrid, values: Vec<f64>) -> Result<Self> {
        check_values(grid.node_count(), &values)?;
        Ok(SpaceFunction { grid, values })
    }

    pub fn from_fn(grid: XGrid, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    pub fn grid(&self) -> &XGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Multilinear interpolation at `x`.
    pub fn eval(&self, x: [f64; 2]) -> Result<f64> {
        let g = &self.grid;
        match g.dim {
            1 => {
                let (i, t) = g.locate(x[0])?;
                Ok((1.0 - t) * self.values[i] + t * self.values[i + 1])
            }
            _ => {
                let (i, s) = g.locate(x[0])?;
                let (j, t) = g.locate(x[1])?;
                let side = g.side();
                let at = |a: usize, b: usize| self.values[a * side + b];
                Ok((1.0 - s) * ((1.0 - t) * at(i, j) + t * at(i, j + 1))
                    + s * ((1.0 - t) * at(i + 1, j) + t * at(i + 1, j + 1)))
            }
        }
    }

    /// Pointwise combination on the same grid.
    pub fn zip_with(&self, other: &SpaceFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Self::new(self.grid, values)
    }

    /// `other − self`.
    pub fn difference_to(&self, other: &SpaceFunction) -> Result<Self> {
        self.zip_with(other, |a, b| b - a)
    }
}

/// The space-side function `u(x) = max_y ⟨x, y⟩ − û(y)` on an x grid.
pub fn legendre(potential: &ConvexPotential, grid: &XGrid) -> Result<SpaceFunction> {
    let p = potential.polytope();
    if grid.dim() != p.dim() {
        return Err(Error::GridMismatch);
    }
    let needed = potential.slope_bound();
    if needed > grid.r() {
        return Err(Error::RangeTooSmall { needed, available: grid.r() });
    }
    let uh = potential.values();
    let values = match p.dim() {
        1 => (0..grid.node_count())
            .map(|a| {
                let x = grid.coordinate(a);
                (0..p.node_count())
                    .map(|i| x * p.coordinate(0, i) - uh[i])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect(),
        _ => {
            // maximise over the second axis first, then the first
            let side = p.side();
            let gs = grid.side();
            let mut partial = alloc::vec![f64::NEG_INFINITY; side * gs];
            for i in 0..side {
                for b in 0..gs {
                    let x1 = grid.coordinate(b);
                    partial[i * gs + b] = (0..side)
                        .map(|j| x1 * p.coordinate(1, j) - uh[i * side + j])
                        .fold(f64::NEG_INFINITY, f64::max);
                }
            }
            let mut out = Vec::with_capacity(gs * gs);
            for a in 0..gs {
                let x0 = grid.coordinate(a);
                for b in 0..gs {
                    out.push(
                        (0..side)
                            .map(|i| x0 * p.coordinate(0, i) + partial[i * gs + b])
                            .fold(f64::NEG_INFINITY, f64::max),
                    );
                }
            }
            out
        }
    };
    SpaceFunction::new(*grid, values)
}

/// Restricts a space-side function to the model:
/// `û(y) = max_x ⟨x, y⟩ − f(x)` over the x nodes, then convexified.
pub fn project_space_function(f: &SpaceFunction, polytope: &Polytope) -> Result<ConvexPotential> {
    let grid = f.grid();
    if grid.dim() != polytope.dim() {
        return Err(Error::GridMismatch);
    }
    let raw: Vec<f64> = polytope
        .nodes()
        .map(|y| {
            grid.nodes()
                .zip(f.values())
                .map(|(x, fx)| dot(polytope.dim(), x, y) - fx)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    ConvexPotential::convex_envelope(*polytope, &raw)
}

/// The geodesic between two potentials: `û_t = (1 − t) û_u + t û_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    start: ConvexPotential,
    end: ConvexPotential,
}

impl GeodesicPath {
    pub fn new(start: ConvexPotential, end: ConvexPotential) -> Result<Self> {
        start.require_same_grid(&end)?;
        Ok(GeodesicPath { start, end })
    }

    pub fn start(&self) -> &ConvexPotential {
        &self.start
    }

    pub fn end(&self) -> &ConvexPotential {
        &self.end
    }

    pub fn polytope(&self) -> &Polytope {
        self.start.polytope()
    }

    /// The potential at time `t ∈ [0, 1]`.
    pub fn at(&self, t: f64) -> Result<ConvexPotential> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfDomain { what: "t", value: t });
        }
        if t == 0.0 {
            return Ok(self.start.clone());
        }
        if t == 1.0 {
            return Ok(self.end.clone());
        }
        let values = self
            .start
            .values
            .iter()
            .zip(&self.end.values)
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect();
        Ok(ConvexPotential::from_convex(self.start.polytope, values))
    }

    /// Centred difference `(ψ_{t+dt} − ψ_{t−dt}) / 2dt` of the space-side
    /// geodesic on an x grid.
    pub fn velocity_finite_difference(&self, t: f64, dt: f64, grid: &XGrid) -> Result<SpaceFunction> {
        if !(dt > 0.0) || !(t - dt >= 0.0) || !(t + dt <= 1.0) {
            return Err(Error::OutOfDomain { what: "dt", value: dt });
        }
        let ahead = legendre(&self.at(t + dt)?, grid)?;
        let behind = legendre(&self.at(t - dt)?, grid)?;
        behind.zip_with(&ahead, |b, a| (a - b) / (2.0 * dt))
    }
}

/// Free-function form of [`GeodesicPath::at`].
pub fn geodesic_at(path: &GeodesicPath, t: f64) -> Result<ConvexPotential> {
    path.at(t)
}

/// Free-function form of [`GeodesicPath::velocity_finite_difference`].
pub fn velocity_finite_difference(
    path: &GeodesicPath,
    t: f64,
    dt: f64,
    grid: &XGrid,
) -> Result<SpaceFunction> {
    path.velocity_finite_difference(t, dt, grid)
}

/// The geodesic as the upper envelope of affine-in-time subgeodesics.
///
/// Works from the space-side boundary data only: for each slope `y` on the
/// polytope grid, the best intercepts `a_u(y) = min_x u(x) − ⟨x, y⟩` and
/// `a_v(y)` are read off the x grid, and
/// `Ψ(t, x) = max_y ⟨x, y⟩ + (1 − t) a_u(y) + t a_v(y)`.
#[derive(Debug, Clone)]
pub struct EnvelopeOracle {
    dim: usize,
    slopes: Vec<[f64; 2]>,
    start_intercepts: Vec<f64>,
    end_intercepts: Vec<f64>,
}

impl EnvelopeOracle {
    pub fn new(u: &SpaceFunction, v: &SpaceFunction, polytope: &Polytope) -> Result<Self> {
        if u.grid() != v.grid() || u.grid().dim() != polytope.dim() {
            return Err(Error::GridMismatch);
        }
        let dim = polytope.dim();
        let slopes: Vec<[f64; 2]> = polytope.nodes().collect();
        let intercepts = |f: &SpaceFunction| -> Vec<f64> {
            slopes
                .iter()
                .map(|&y| {
                    f.grid()
                        .nodes()
                        .zip(f.values())
                        .map(|(x, fx)| fx - dot(dim, x, y))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect()
        };
        let start_intercepts = intercepts(u);
        let end_intercepts = intercepts(v);
        Ok(EnvelopeOracle { dim, slopes, start_intercepts, end_intercepts })
    }

    /// `Ψ(t, x)`.
    pub fn value(&self, t: f64, x: [f64; 2]) -> f64 {
        self.slopes
            .iter()
            .zip(self.start_intercepts.iter().zip(&self.end_intercepts))
            .map(|(&y, (a, b))| dot(self.dim, x, y) + (1.0 - t) * a + t * b)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `Ψ(t, x)` for the geodesic between two potentials, from their Legendre
/// transforms on `grid`.
pub fn envelope_oracle(
    start: &ConvexPotential,
    end: &ConvexPotential,
    t: f64,
    x: [f64; 2],
    grid: &XGrid,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfDomain { what: "t", value: t });
    }
    let oracle = EnvelopeOracle::new(&legendre(start, grid)?, &legendre(end, grid)?, start.polytope())?;
    Ok(oracle.value(t, x))
}

/// The sample `g(∇û(y))` over the polytope nodes with equal masses summing
/// to 1: `g` under the Monge–Ampère measure of the potential.
pub fn pushforward_measure(potential: &ConvexPotential, g: &SpaceFunction) -> Result<WeightedSample> {
    let p = potential.polytope();
    if g.grid().dim() != p.dim() {
        return Err(Error::GridMismatch);
    }
    let values = (0..p.node_count())
        .map(|k| g.eval(potential.gradient(k)))
        .collect::<Result<Vec<f64>>>()?;
    potential.sample_of(values)
}
