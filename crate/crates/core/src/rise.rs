//! The rise `ρ[u, v]` of the geodesic between two potentials, and checks of
//! its algebra.
//!
//! In the model the velocity of the geodesic at `x = ∇û_t(y)` is
//! `û_u(y) − û_v(y)` for every `t`, so the rise is the decreasing
//! rearrangement of `û_u − û_v` under the uniform node measure. Velocities
//! are only used to cross-check this formula.

use alloc::vec::Vec;

use crate::check::{Check, IDENTITY_TOL};
use crate::error::{Error, Result};
use crate::rearrange::{probe_points, rearrange, StepFunction};
use crate::toric::{
    legendre, meet, pushforward_measure, ConvexPotential, GeodesicPath, Polytope, XGrid,
};

/// The rise: a decreasing, left-continuous step function on `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rise(StepFunction);

impl Rise {
    pub fn new(f: StepFunction) -> Self {
        Rise(f)
    }

    pub fn as_step(&self) -> &StepFunction {
        &self.0
    }

    pub fn into_step(self) -> StepFunction {
        self.0
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        self.0.eval(s)
    }
}

impl From<Rise> for StepFunction {
    fn from(r: Rise) -> StepFunction {
        r.0
    }
}

impl AsRef<StepFunction> for Rise {
    fn as_ref(&self) -> &StepFunction {
        &self.0
    }
}

/// `ρ[u, v]`, the rearrangement of `û_u − û_v`.
pub fn rise(u: &ConvexPotential, v: &ConvexPotential) -> Result<Rise> {
    let sample = u.sample_of(u.difference(v)?)?;
    Ok(Rise(rearrange(&sample)))
}

/// The rise of a whole geodesic.
pub fn rise_of_path(path: &GeodesicPath) -> Result<Rise> {
    rise(path.start(), path.end())
}

/// `ρ[φ(a), φ(b)]`, which equals `(b − a) ρ_φ`.
pub fn rise_of_segment(path: &GeodesicPath, a: f64, b: f64) -> Result<Rise> {
    if !(a < b) {
        return Err(Error::OutOfDomain { what: "segment start", value: a });
    }
    rise(&path.at(a)?, &path.at(b)?)
}

/// `λ ↦ −r(V − λ)`, the rise of the reversed geodesic.
pub fn rise_reversed(r: &Rise) -> Rise {
    Rise(r.0.neg_reversed())
}

fn probes(fs: &[&StepFunction]) -> Vec<f64> {
    probe_points(fs)
}

/// `ρ[u, u∧v] = min(0, ρ[u, v])`, `ρ[u∧v, v] = max(0, ρ[u, v])` and their
/// sum, at every common plateau midpoint.
pub fn pythagoras_check(u: &ConvexPotential, v: &ConvexPotential, tol: f64) -> Result<Check> {
    let m = meet(u, v)?;
    let full = rise(u, v)?;
    let down = rise(u, &m)?;
    let up = rise(&m, v)?;
    let mut check = Check::new("pythagoras", tol);
    for s in probes(&[&full.0, &down.0, &up.0]) {
        let (r, a, b) = (full.eval(s)?, down.eval(s)?, up.eval(s)?);
        check.equal(a, r.min(0.0));
        check.equal(b, r.max(0.0));
        check.equal(a + b, r);
    }
    Ok(check)
}

/// `ρ[u∧w, v∧w] ≤ ρ[u, v]` for `u ≤ v`.
pub fn contraction_check(
    u: &ConvexPotential,
    v: &ConvexPotential,
    w: &ConvexPotential,
    tol: f64,
) -> Result<Check> {
    if !u.dominates(v) {
        return Err(Error::Precondition("contraction needs u ≤ v"));
    }
    let lhs = rise(&meet(u, w)?, &meet(v, w)?)?;
    let rhs = rise(u, v)?;
    let mut check = Check::new("contraction", tol);
    for s in probes(&[&lhs.0, &rhs.0]) {
        check.le(lhs.eval(s)?, rhs.eval(s)?);
    }
    Ok(check)
}

/// `∫₀^λ ρ[u,v] + ∫₀^λ ρ[v,w] ≥ ∫₀^λ ρ[u,w]` at every merged breakpoint.
pub fn triangle_hlp_check(
    u: &ConvexPotential,
    v: &ConvexPotential,
    w: &ConvexPotential,
    tol: f64,
) -> Result<Check> {
    let (uv, vw, uw) = (rise(u, v)?, rise(v, w)?, rise(u, w)?);
    let mut check = Check::new("triangle", tol);
    let lambdas = crate::rearrange::merged_breakpoints(&[&uv.0, &vw.0, &uw.0]);
    for lambda in lambdas {
        let lhs = uv.0.partial_integral(lambda)? + vw.0.partial_integral(lambda)?;
        check.le(uw.0.partial_integral(lambda)?, lhs);
    }
    Ok(check)
}

/// `(v − u)` rearranged under the measures of `u` and of `v`, around the rise.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatComparison {
    pub lower: StepFunction,
    pub rise: Rise,
    pub upper: StepFunction,
}

impl FlatComparison {
    /// `lower ≤ rise ≤ upper` at every common plateau midpoint.
    pub fn check(&self, tol: f64) -> Result<Check> {
        let mut check = Check::new("flat-compare", tol);
        for s in probes(&[&self.lower, &self.rise.0, &self.upper]) {
            let r = self.rise.eval(s)?;
            check.le(self.lower.eval(s)?, r);
            check.le(r, self.upper.eval(s)?);
        }
        Ok(check)
    }

    /// All three profiles divided by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<FlatComparison> {
        let k = 1.0 / c;
        Ok(FlatComparison {
            lower: self.lower.scale(k)?,
            rise: Rise(self.rise.0.scale(k)?),
            upper: self.upper.scale(k)?,
        })
    }
}

/// `(v−u)^{*v}`, `ρ[u,v]` and `(v−u)^{*u}`, with `v − u` formed on `grid`.
pub fn flat_compare(u: &ConvexPotential, v: &ConvexPotential, grid: &XGrid) -> Result<FlatComparison> {
    let gap = legendre(u, grid)?.difference_to(&legendre(v, grid)?)?;
    let lower = rearrange(&pushforward_measure(v, &gap)?);
    let upper = rearrange(&pushforward_measure(u, &gap)?);
    Ok(FlatComparison { lower, rise: rise(u, v)?, upper })
}

/// `(v−u)^{*u}(s) / (n+1) ≤ ρ[u,v](s/e)` for `u ≤ v`, `n` the dimension.
///
/// Probed at the plateau midpoints of the refinement of `(v−u)^{*u}` by the
/// breakpoints of `s ↦ ρ(s/e)`.
pub fn flat_compare_strong(
    u: &ConvexPotential,
    v: &ConvexPotential,
    grid: &XGrid,
    tol: f64,
) -> Result<Check> {
    if !u.dominates(v) {
        return Err(Error::Precondition("strong comparison needs u ≤ v"));
    }
    let cmp = flat_compare(u, v, grid)?;
    let n = u.polytope().dim() as f64;
    let e = core::f64::consts::E;
    let stretched: Vec<f64> = cmp
        .rise
        .0
        .breakpoints()
        .iter()
        .map(|b| b * e)
        .filter(|b| *b < 1.0)
        .collect();
    let mut cuts: Vec<f64> = cmp.upper.breakpoints().iter().copied().chain(stretched).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| *a - *b <= 1e-15);
    let mut check = Check::new("flat-compare-strong", tol);
    for w in cuts.windows(2) {
        let s = 0.5 * (w[0] + w[1]);
        check.le(cmp.upper.eval(s)? / (n + 1.0), cmp.rise.eval(s / e)?);
    }
    Ok(check)
}

/// The three profiles entering `ρ[u∧v, w](s) ≤ max((w−u)^{*u}(σ), (w−v)^{*v}(s−σ))`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeetBound {
    pub rise: Rise,
    pub first: StepFunction,
    pub second: StepFunction,
}

impl MeetBound {
    pub fn new(
        u: &ConvexPotential,
        v: &ConvexPotential,
        w: &ConvexPotential,
        grid: &XGrid,
    ) -> Result<Self> {
        let wx = legendre(w, grid)?;
        let first = rearrange(&pushforward_measure(u, &legendre(u, grid)?.difference_to(&wx)?)?);
        let second = rearrange(&pushforward_measure(v, &legendre(v, grid)?.difference_to(&wx)?)?);
        Ok(MeetBound { rise: rise(&meet(u, v)?, w)?, first, second })
    }

    /// The inequality at each probe `(σ, s)` with `0 < σ < s < 1`.
    pub fn check(&self, probes: &[(f64, f64)], tol: f64) -> Result<Check> {
        let mut check = Check::new("meet-bound", tol);
        for &(sigma, s) in probes {
            if !(sigma > 0.0 && sigma < s && s < self.rise.0.mass()) {
                return Err(Error::OutOfDomain { what: "sigma", value: sigma });
            }
            let bound = self.first.eval(sigma)?.max(self.second.eval(s - sigma)?);
            check.le(self.rise.eval(s)?, bound);
        }
        Ok(check)
    }
}

/// Single-probe form of [`MeetBound::check`].
pub fn meet_distance_bound_check(
    u: &ConvexPotential,
    v: &ConvexPotential,
    w: &ConvexPotential,
    sigma: f64,
    s: f64,
    grid: &XGrid,
    tol: f64,
) -> Result<Check> {
    MeetBound::new(u, v, w, grid)?.check(&[(sigma, s)], tol)
}

/// Sup deviations between rearranged finite-difference velocities and the
/// rise, one per time.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    pub times: Vec<f64>,
    pub deviations: Vec<f64>,
}

impl ConservationReport {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }

    pub fn check(&self, tol: f64) -> Check {
        let mut check = Check::new("conservation", tol);
        check.record(self.max_deviation());
        check
    }
}

/// Compares `(∂_t ψ)*` under `μ_{ψ_t}` with the rise at each time.
pub fn conservation_check(
    path: &GeodesicPath,
    times: &[f64],
    dt: f64,
    grid: &XGrid,
) -> Result<ConservationReport> {
    let target = rise_of_path(path)?;
    let mut deviations = Vec::with_capacity(times.len());
    for &t in times {
        let velocity = path.velocity_finite_difference(t, dt, grid)?;
        let observed = rearrange(&pushforward_measure(&path.at(t)?, &velocity)?);
        deviations.push(crate::rearrange::sup_distance(&observed, &target.0)?);
    }
    Ok(ConservationReport { times: times.to_vec(), deviations })
}

/// Chord slopes of a geodesic rearranged under both endpoint measures
/// sandwich the rise of the geodesic.
pub fn chord_sandwich_check(
    path: &GeodesicPath,
    sigma: f64,
    tau: f64,
    grid: &XGrid,
    tol: f64,
) -> Result<Check> {
    if !(sigma < tau) {
        return Err(Error::OutOfDomain { what: "chord start", value: sigma });
    }
    let chord = flat_compare(&path.at(sigma)?, &path.at(tau)?, grid)?.scaled(tau - sigma)?;
    let whole = rise_of_path(path)?;
    let mut check = Check::new("chord-sandwich", tol);
    for s in probes(&[&chord.lower, &whole.0, &chord.upper]) {
        let r = whole.eval(s)?;
        check.le(chord.lower.eval(s)?, r);
        check.le(r, chord.upper.eval(s)?);
    }
    Ok(check)
}

fn refinement_key(i: usize) -> u32 {
    if i == 0 {
        u32::MAX
    } else {
        i.trailing_zeros()
    }
}

/// Polytope nodes from coarse to fine: corners first, then successively
/// finer dyadic levels, ties in index order.
pub fn refinement_order(p: &Polytope) -> Vec<usize> {
    let key = |k: usize| {
        let idx = p.multi_index(k);
        (0..p.dim()).map(|a| refinement_key(idx[a])).min().unwrap_or(0)
    };
    let mut order: Vec<usize> = (0..p.node_count()).collect();
    order.sort_by(|&a, &b| key(b).cmp(&key(a)).then(a.cmp(&b)));
    order
}

/// Prefix lengths of [`refinement_order`] at which a dyadic level completes.
pub fn refinement_levels(p: &Polytope) -> Vec<usize> {
    let order = refinement_order(p);
    let key = |k: usize| {
        let idx = p.multi_index(k);
        (0..p.dim()).map(|a| refinement_key(idx[a])).min().unwrap_or(0)
    };
    let mut levels = Vec::new();
    for j in 1..order.len() {
        if key(order[j]) != key(order[j - 1]) {
            levels.push(j);
        }
    }
    levels.push(order.len());
    levels
}

/// The maximum of the first `j` supporting affine functions of `û`, taken in
/// [`refinement_order`]. Increases with `j` and equals `û` once every node is
/// used.
pub fn support_truncation(u: &ConvexPotential, j: usize) -> Result<ConvexPotential> {
    let order = refinement_order(u.polytope());
    support_truncation_in(u, &order[..j.min(order.len())])
}

fn support_truncation_in(u: &ConvexPotential, nodes: &[usize]) -> Result<ConvexPotential> {
    if nodes.is_empty() {
        return Err(Error::InvalidParameter("at least one supporting plane"));
    }
    let p = *u.polytope();
    let planes: Vec<(f64, [f64; 2], [f64; 2])> = nodes
        .iter()
        .map(|&k| (u.values()[k], u.supporting_slope(k), p.node(k)))
        .collect();
    let values: Vec<f64> = p
        .nodes()
        .enumerate()
        .map(|(k, y)| {
            let best = planes
                .iter()
                .map(|(c, g, yk)| c + g[0] * (y[0] - yk[0]) + g[1] * (y[1] - yk[1]))
                .fold(f64::NEG_INFINITY, f64::max);
            // a supporting plane never exceeds the potential at the nodes
            best.min(u.values()[k])
        })
        .collect();
    Ok(ConvexPotential::from_convex(p, values))
}

/// Deviations of rises along support-truncation sequences.
///
/// `first_side[i]` is the deviation of `ρ[u_j, v]`, `second_side[i]` of
/// `ρ[u, v_j]` and `joint[i]` of `ρ[u_j, v_j]` from `ρ[u, v]`, with
/// `j = planes[i]`, measured as a sup over the plateau midpoints of `ρ[u, v]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneApproxReport {
    pub planes: Vec<usize>,
    pub first_side: Vec<f64>,
    pub second_side: Vec<f64>,
    pub joint: Vec<f64>,
}

fn largest_increase(xs: &[f64]) -> f64 {
    xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

impl MonotoneApproxReport {
    /// One-sided truncations move the rise monotonically toward its limit,
    /// so their deviations must never grow.
    pub fn decay_check(&self, tol: f64) -> Check {
        let mut check = Check::new("monotone-approx/decay", tol);
        check.record(largest_increase(&self.first_side));
        check.record(largest_increase(&self.second_side));
        check
    }

    /// Largest increase along the joint sequence; informational.
    pub fn joint_increase(&self) -> f64 {
        largest_increase(&self.joint)
    }

    /// The joint sequence ends within `tol` of the rise.
    pub fn final_check(&self, tol: f64) -> Check {
        let mut check = Check::new("monotone-approx/final", tol);
        check.record(self.joint.last().copied().unwrap_or(f64::INFINITY));
        check
    }
}

/// Runs the three truncation sequences over the dyadic levels up to `k`
/// planes (always including `k` itself).
pub fn monotone_approx(u: &ConvexPotential, v: &ConvexPotential, k: usize) -> Result<MonotoneApproxReport> {
    if k < 2 {
        return Err(Error::InvalidParameter("at least two supporting planes"));
    }
    let target = rise(u, v)?;
    let mids = target.0.plateau_midpoints();
    let order = refinement_order(u.polytope());
    let k = k.min(order.len());
    let mut planes: Vec<usize> =
        refinement_levels(u.polytope()).into_iter().filter(|&j| j >= 2 && j < k).collect();
    planes.push(k);
    let deviation = |r: &Rise| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &s in &mids {
            worst = worst.max(libm::fabs(r.eval(s)? - target.eval(s)?));
        }
        Ok(worst)
    };
    let mut report = MonotoneApproxReport {
        planes: planes.clone(),
        first_side: Vec::new(),
        second_side: Vec::new(),
        joint: Vec::new(),
    };
    for &j in &planes {
        let uj = support_truncation_in(u, &order[..j])?;
        let vj = support_truncation_in(v, &order[..j])?;
        report.first_side.push(deviation(&rise(&uj, v)?)?);
        report.second_side.push(deviation(&rise(u, &vj)?)?);
        report.joint.push(deviation(&rise(&uj, &vj)?)?);
    }
    Ok(report)
}

/// Decay along one-sided sequences (exact up to rounding) and a final joint
/// deviation within `tol`.
pub fn monotone_approx_check(
    u: &ConvexPotential,
    v: &ConvexPotential,
    k: usize,
    tol: f64,
) -> Result<[Check; 2]> {
    let report = monotone_approx(u, v, k)?;
    Ok([report.decay_check(IDENTITY_TOL), report.final_check(tol)])
}
