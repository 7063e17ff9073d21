//! Rearrangement invariant Lagrangians, the induced functional on decreasing
//! functions, distances built from the rise, and actions of paths.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::check::Check;
use crate::error::{Error, Result};
use crate::rearrange::{rearrange, StepFunction, WeightedSample};
use crate::rise::{rise, Rise};
use crate::toric::{legendre, meet, project_space_function, ConvexPotential, GeodesicPath, XGrid};

/// Atom limit for exhaustive permutation checks.
pub const MAX_PERMUTATION_ATOMS: usize = 7;
/// Where the Huber profile switches from quadratic to linear growth.
const HUBER_KNEE: f64 = 5.0;
const NORM_MAX_ITERATIONS: usize = 200;

/// Convex, even functions `χ` with `χ(0) = 0`, used for Orlicz Lagrangians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Young {
    /// `|t|^p` for `p ∈ [1, 4]`.
    Power(f64),
    /// `t² / (1 + |t|)`.
    SoftQuadratic,
    /// `t²` up to `|t| = 5`, continued by its tangent `10|t| − 25`.
    Huber,
}

impl Young {
    pub fn validate(self) -> Result<Self> {
        match self {
            Young::Power(p) if !(1.0..=4.0).contains(&p) => {
                Err(Error::InvalidParameter("power must lie in [1, 4]"))
            }
            other => Ok(other),
        }
    }

    pub fn apply(self, t: f64) -> f64 {
        let a = libm::fabs(t);
        match self {
            Young::Power(p) => libm::pow(a, p),
            Young::SoftQuadratic => a * a / (1.0 + a),
            Young::Huber if a <= HUBER_KNEE => a * a,
            Young::Huber => 2.0 * HUBER_KNEE * a - HUBER_KNEE * HUBER_KNEE,
        }
    }

    /// `χ(ct) = c^p χ(t)` for some `p`.
    pub fn homogeneity(self) -> Option<f64> {
        match self {
            Young::Power(p) => Some(p),
            _ => None,
        }
    }

    pub fn name(self) -> String {
        match self {
            Young::Power(p) => format!("pow{p}"),
            Young::SoftQuadratic => String::from("soft-quadratic"),
            Young::Huber => String::from("huber"),
        }
    }

    /// The catalogue used in sweeps.
    pub fn catalogue() -> [Young; 7] {
        [
            Young::Power(1.0),
            Young::Power(1.5),
            Young::Power(2.0),
            Young::Power(3.0),
            Young::Power(4.0),
            Young::SoftQuadratic,
            Young::Huber,
        ]
    }
}

/// Increasing concave weights `χ` on `[0, ∞)` with `χ(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConcaveWeight {
    /// `ln(1 + t)`.
    Log1p,
    /// `t^p` for `p ∈ (0, 1]`.
    Power(f64),
}

impl ConcaveWeight {
    pub fn validate(self) -> Result<Self> {
        match self {
            ConcaveWeight::Power(p) if !(p > 0.0 && p <= 1.0) => {
                Err(Error::InvalidParameter("concave power must lie in (0, 1]"))
            }
            other => Ok(other),
        }
    }

    pub fn apply(self, t: f64) -> f64 {
        let a = libm::fabs(t);
        match self {
            ConcaveWeight::Log1p => libm::log1p(a),
            ConcaveWeight::Power(p) => libm::pow(a, p),
        }
    }

    pub fn name(self) -> String {
        match self {
            ConcaveWeight::Log1p => String::from("log1p"),
            ConcaveWeight::Power(p) => format!("concave-pow{p}"),
        }
    }
}

/// The weight `χ` in `d_χ(u, v) = ∫ χ(|ρ[u, v]|)`, either convex or concave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialWeight {
    Young(Young),
    Concave(ConcaveWeight),
}

impl RadialWeight {
    pub fn apply(self, t: f64) -> f64 {
        match self {
            RadialWeight::Young(y) => y.apply(t),
            RadialWeight::Concave(c) => c.apply(t),
        }
    }

    pub fn name(self) -> String {
        match self {
            RadialWeight::Young(y) => y.name(),
            RadialWeight::Concave(c) => c.name(),
        }
    }
}

/// How a Fenchel family pairs a velocity with its profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// `a + ∫₀^V ξ* f*`: the supremum of `a + ∫ ξγ` over rearrangements `γ` of `f`.
    Signed,
    /// `a + ∫₀^V |ξ|* |f|*`: the supremum of `a + ∫ |ξγ|`.
    Absolute,
}

/// One affine minorant `ξ ↦ a + ∫ ξ f` of a Fenchel family.
#[derive(Debug, Clone, PartialEq)]
pub struct FenchelMember {
    pub a: f64,
    pub profile: WeightedSample,
}

/// A finite family of affine minorants; the Lagrangian is their supremum
/// over all rearrangements of the profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct FenchelFamily {
    members: Vec<FenchelMember>,
    pairing: Pairing,
}

impl FenchelFamily {
    pub fn new(members: Vec<FenchelMember>) -> Result<Self> {
        Self::with_pairing(members, Pairing::Signed)
    }

    pub fn with_pairing(members: Vec<FenchelMember>, pairing: Pairing) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Empty);
        }
        if members.iter().any(|m| !m.a.is_finite()) {
            return Err(Error::InvalidParameter("family offsets must be finite"));
        }
        Ok(FenchelFamily { members, pairing })
    }

    pub fn members(&self) -> &[FenchelMember] {
        &self.members
    }

    pub fn pairing(&self) -> Pairing {
        self.pairing
    }

    fn map_profiles(&self, pairing: Pairing, f: impl Fn(f64) -> f64) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|m| Ok(FenchelMember { a: m.a, profile: m.profile.map(&f)? }))
            .collect::<Result<Vec<_>>>()?;
        Self::with_pairing(members, pairing)
    }

    /// `L(0) = max a`.
    pub fn offset(&self) -> f64 {
        self.members.iter().map(|m| m.a).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The Lagrangians the crate can evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum LagrangianSpec {
    /// `∫₀^V ξ* f` for a decreasing `f`.
    Weight(StepFunction),
    /// `∫ χ(ξ) dμ`.
    OrliczIntegral(Young),
    /// `inf { r > 0 : ∫ χ(ξ / r) dμ ≤ χ(1) }`.
    OrliczNorm(Young),
    /// The supremum of a finite family of affine minorants.
    Fenchel(FenchelFamily),
}

impl LagrangianSpec {
    /// Short label used in reports.
    pub fn name(&self) -> String {
        match self {
            LagrangianSpec::Weight(f) => format!("weight[{}]", f.plateau_count()),
            LagrangianSpec::OrliczIntegral(chi) => format!("orlicz-integral:{}", chi.name()),
            LagrangianSpec::OrliczNorm(chi) => format!("orlicz-norm:{}", chi.name()),
            LagrangianSpec::Fenchel(fam) => {
                let tag = match fam.pairing {
                    Pairing::Signed => "fenchel",
                    Pairing::Absolute => "fenchel-abs",
                };
                format!("{tag}[{}]", fam.members.len())
            }
        }
    }

    /// `L(ξ)`.
    pub fn evaluate(&self, xi: &WeightedSample) -> Result<f64> {
        evaluate(self, xi)
    }

    /// `L(c)` for the constant `c` on a space of total mass `mass`.
    pub fn evaluate_constant(&self, c: f64, mass: f64) -> Result<f64> {
        evaluate(self, &WeightedSample::uniform(alloc::vec![c], mass)?)
    }
}

fn paired_integral(xi: &StepFunction, profile: &WeightedSample) -> Result<f64> {
    xi.integral_product(&rearrange(profile))
}

fn orlicz_norm(chi: Young, xi: &WeightedSample) -> f64 {
    let peak = xi.values().iter().fold(0.0f64, |a, v| a.max(libm::fabs(*v)));
    if peak == 0.0 {
        return 0.0;
    }
    let target = chi.apply(1.0);
    let modular = |r: f64| -> f64 {
        xi.values().iter().zip(xi.weights()).map(|(v, w)| w * chi.apply(v / r)).sum()
    };
    let mut lo = 1e-12;
    let mut hi = peak * xi.total_mass().max(1.0);
    if modular(lo) <= target {
        return lo;
    }
    for _ in 0..NORM_MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if modular(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `L(ξ)` for any Lagrangian in the catalogue.
pub fn evaluate(spec: &LagrangianSpec, xi: &WeightedSample) -> Result<f64> {
    match spec {
        LagrangianSpec::Weight(f) => rearrange(xi).integral_product(f),
        LagrangianSpec::OrliczIntegral(chi) => {
            Ok(xi.values().iter().zip(xi.weights()).map(|(v, w)| w * chi.apply(*v)).sum())
        }
        LagrangianSpec::OrliczNorm(chi) => Ok(orlicz_norm(*chi, xi)),
        LagrangianSpec::Fenchel(fam) => {
            let base = match fam.pairing {
                Pairing::Signed => rearrange(xi),
                Pairing::Absolute => rearrange(&xi.map(libm::fabs)?),
            };
            let mut best = f64::NEG_INFINITY;
            for m in &fam.members {
                let value = match fam.pairing {
                    Pairing::Signed => m.a + paired_integral(&base, &m.profile)?,
                    Pairing::Absolute => m.a + paired_integral(&base, &m.profile.map(libm::fabs)?)?,
                };
                best = best.max(value);
            }
            Ok(best)
        }
    }
}

/// Visits every permutation of `0..n` (Heap's algorithm).
fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = alloc::vec![0usize; n];
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Compares `∫₀^V ξ* f*` with the largest `∫ ξ γ` over all rearrangements
/// `γ` of `f` on the atoms of `ξ`. Both samples must carry equal weights.
pub fn hardy_littlewood_sup_check(xi: &WeightedSample, f: &WeightedSample, tol: f64) -> Result<Check> {
    if xi.len() > MAX_PERMUTATION_ATOMS {
        return Err(Error::TooManyAtoms { atoms: xi.len(), max: MAX_PERMUTATION_ATOMS });
    }
    if !xi.same_space(f) {
        return Err(Error::GridMismatch);
    }
    let w0 = xi.weights()[0];
    if xi.weights().iter().any(|w| libm::fabs(w - w0) > 1e-12 * w0) {
        return Err(Error::Precondition("permutation check needs equal atom weights"));
    }
    let formula = rearrange(xi).integral_product(&rearrange(f))?;
    let mut best = f64::NEG_INFINITY;
    for_each_permutation(xi.len(), |perm| {
        let s: f64 = perm.iter().enumerate().map(|(i, &j)| xi.values()[i] * f.values()[j] * w0).sum();
        best = best.max(s);
    });
    let mut check = Check::new("hardy-littlewood-sup", tol);
    check.equal(formula, best);
    Ok(check)
}

/// `(L⁺, L⁻, L^{| |})` of a signed Fenchel family: profiles replaced by
/// `f₊`, `f₋ = max(−f, 0)` and `|f|` (the last paired absolutely).
pub fn derived_lagrangians(spec: &LagrangianSpec) -> Result<(LagrangianSpec, LagrangianSpec, LagrangianSpec)> {
    let LagrangianSpec::Fenchel(fam) = spec else {
        return Err(Error::Precondition("derived Lagrangians need a Fenchel family"));
    };
    if fam.pairing != Pairing::Signed {
        return Err(Error::Precondition("derived Lagrangians need a signed family"));
    }
    Ok((
        LagrangianSpec::Fenchel(fam.map_profiles(Pairing::Signed, |v| v.max(0.0))?),
        LagrangianSpec::Fenchel(fam.map_profiles(Pairing::Signed, |v| (-v).max(0.0))?),
        LagrangianSpec::Fenchel(fam.map_profiles(Pairing::Absolute, libm::fabs)?),
    ))
}

/// The four comparisons between `L`, `L⁺`, `L⁻` and `L^{| |}`:
///
/// * `2L⁺(ξ) ≤ L(2ξ) + L⁻(2⨍ξ)`
/// * `2L⁻(ξ) ≤ L(−2ξ) + L⁺(2⨍ξ)`
/// * `2L^{| |}(ξ) ≤ max(L(8ξ), L(−8ξ)) + L^{| |}(6⨍|ξ|)`
/// * `|L(ξ) − L(0)| ≤ L^{| |}(ξ) − L^{| |}(0)`
///
/// The second is the first applied to the family with negated profiles,
/// whose `L`, `L⁺`, `L⁻` are `ξ ↦ L(−ξ)`, `L⁻`, `L⁺`; the mean keeps its
/// sign. With `−2⨍ξ` in place of `2⨍ξ` it fails already for
/// `ξ = (2, 0)`, `f = (1, −1)` on two atoms of mass ½.
pub fn comparison_check(spec: &LagrangianSpec, xi: &WeightedSample, tol: f64) -> Result<Check> {
    let (plus, minus, abs) = derived_lagrangians(spec)?;
    let mass = xi.total_mass();
    let mean = xi.mean();
    let abs_mean = xi.map(libm::fabs)?.mean();
    let scaled = |c: f64| xi.map(|v| c * v);
    let constant = |l: &LagrangianSpec, c: f64| l.evaluate_constant(c, mass);
    let l = |x: &WeightedSample| evaluate(spec, x);

    let mut check = Check::new("lagrangian-comparison", tol);
    check.le(2.0 * plus.evaluate(xi)?, l(&scaled(2.0)?)? + constant(&minus, 2.0 * mean)?);
    check.le(2.0 * minus.evaluate(xi)?, l(&scaled(-2.0)?)? + constant(&plus, 2.0 * mean)?);
    check.le(
        2.0 * abs.evaluate(xi)?,
        l(&scaled(8.0)?)?.max(l(&scaled(-8.0)?)?) + constant(&abs, 6.0 * abs_mean)?,
    );
    let zero = xi.constant_like(0.0);
    check.le(
        libm::fabs(l(xi)? - l(&zero)?),
        abs.evaluate(xi)? - abs.evaluate(&zero)?,
    );
    Ok(check)
}

/// `L_*(ζ)`: `L` evaluated on a sample equidistributed with `ζ`.
pub fn l_star(spec: &LagrangianSpec, zeta: &StepFunction) -> Result<f64> {
    evaluate(spec, &zeta.as_sample())
}

/// `d_χ(u, v) = ∫₀^V χ(|ρ[u, v]|)`.
pub fn d_chi(u: &ConvexPotential, v: &ConvexPotential, chi: RadialWeight) -> Result<f64> {
    Ok(rise_distance(&rise(u, v)?, chi))
}

/// `∫₀^V χ(|ρ|)` for a given rise.
pub fn rise_distance(r: &Rise, chi: RadialWeight) -> f64 {
    r.as_step().integral_of(|t| chi.apply(libm::fabs(t)))
}

/// `d_p(u, v) = (∫₀^V |ρ[u, v]|^p)^{1/p}`.
pub fn d_p(u: &ConvexPotential, v: &ConvexPotential, p: f64) -> Result<f64> {
    rise_lp_norm(&rise(u, v)?, p)
}

/// `(∫₀^V |ρ|^p)^{1/p}` for `p ≥ 1`.
pub fn rise_lp_norm(r: &Rise, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::OutOfDomain { what: "p", value: p });
    }
    let integral = r.as_step().integral_of(|t| libm::pow(libm::fabs(t), p));
    Ok(libm::pow(integral, 1.0 / p))
}

/// An action value `ℒ_T` together with its time span `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionValue {
    pub value: f64,
    pub t: f64,
}

/// `T · L_*(r / T)` for a rise `r`.
pub fn action_of_rise(spec: &LagrangianSpec, r: &Rise, t: f64) -> Result<ActionValue> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::OutOfDomain { what: "T", value: t });
    }
    let value = t * l_star(spec, &r.as_step().scale(1.0 / t)?)?;
    if !value.is_finite() {
        return Err(Error::NonFinite { index: 0 });
    }
    Ok(ActionValue { value, t })
}

/// `ℒ_T(u, v) = T · L_*(ρ[u, v] / T)`.
pub fn action(spec: &LagrangianSpec, u: &ConvexPotential, v: &ConvexPotential, t: f64) -> Result<ActionValue> {
    action_of_rise(spec, &rise(u, v)?, t)
}

/// Potentials at increasing times, read as a discretely sampled path.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    times: Vec<f64>,
    potentials: Vec<ConvexPotential>,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, potentials: Vec<ConvexPotential>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidParameter("a path needs at least two samples"));
        }
        if times.len() != potentials.len() {
            return Err(Error::LengthMismatch { expected: times.len(), found: potentials.len() });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("path times must increase"));
        }
        if potentials.iter().any(|p| !p.same_grid(&potentials[0])) {
            return Err(Error::GridMismatch);
        }
        Ok(SampledPath { times, potentials })
    }

    /// The geodesic sampled at the given times.
    pub fn geodesic(path: &GeodesicPath, times: &[f64]) -> Result<Self> {
        let potentials = times.iter().map(|&t| path.at(t)).collect::<Result<Vec<_>>>()?;
        Self::new(times.to_vec(), potentials)
    }

    /// `u + t(v − u)` on the space side, projected into the model at each of
    /// `pieces + 1` equally spaced times; the ends are `u` and `v` themselves.
    pub fn rectilinear(u: &ConvexPotential, v: &ConvexPotential, grid: &XGrid, pieces: usize) -> Result<Self> {
        if pieces == 0 {
            return Err(Error::InvalidParameter("at least one piece"));
        }
        let (ux, vx) = (legendre(u, grid)?, legendre(v, grid)?);
        let mut times = Vec::with_capacity(pieces + 1);
        let mut potentials = Vec::with_capacity(pieces + 1);
        for k in 0..=pieces {
            let t = k as f64 / pieces as f64;
            times.push(t);
            potentials.push(if k == 0 {
                u.clone()
            } else if k == pieces {
                v.clone()
            } else {
                let mix = ux.zip_with(&vx, |a, b| (1.0 - t) * a + t * b)?;
                project_space_function(&mix, u.polytope())?
            });
        }
        Self::new(times, potentials)
    }

    /// `u → w → v` in two equal halves.
    pub fn detour(u: &ConvexPotential, w: &ConvexPotential, v: &ConvexPotential) -> Result<Self> {
        Self::new(alloc::vec![0.0, 0.5, 1.0], alloc::vec![u.clone(), w.clone(), v.clone()])
    }

    /// `u → u∧v → v`.
    pub fn meet_detour(u: &ConvexPotential, v: &ConvexPotential) -> Result<Self> {
        Self::detour(u, &meet(u, v)?, v)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn potentials(&self) -> &[ConvexPotential] {
        &self.potentials
    }
}

/// `Σ ℒ_{t_i − t_{i−1}}(φ(t_{i−1}), φ(t_i))` over the given samples.
pub fn path_action(spec: &LagrangianSpec, path: &SampledPath) -> Result<f64> {
    let mut total = 0.0;
    for (w, p) in path.times.windows(2).zip(path.potentials.windows(2)) {
        total += action(spec, &p[0], &p[1], w[1] - w[0])?.value;
    }
    Ok(total)
}

/// Each comparison path costs at least as much as the geodesic between the
/// same ends.
pub fn least_action_check(
    spec: &LagrangianSpec,
    u: &ConvexPotential,
    v: &ConvexPotential,
    comparisons: &[SampledPath],
    tol: f64,
) -> Result<Check> {
    let mut check = Check::new("least-action", tol);
    for path in comparisons {
        let span = path.times.last().unwrap() - path.times[0];
        let geodesic = action(spec, u, v, span)?.value;
        check.le(geodesic, path_action(spec, path)?);
    }
    Ok(check)
}

/// `ℒ_S(u, v) + ℒ_T(v, w) ≥ ℒ_{S+T}(u, w)`.
pub fn triangle_action_check(
    spec: &LagrangianSpec,
    u: &ConvexPotential,
    v: &ConvexPotential,
    w: &ConvexPotential,
    s: f64,
    t: f64,
    tol: f64,
) -> Result<Check> {
    let lhs = action(spec, u, v, s)?.value + action(spec, v, w, t)?.value;
    let rhs = action(spec, u, w, s + t)?.value;
    let mut check = Check::new("triangle-action", tol);
    check.le(rhs, lhs);
    Ok(check)
}

fn fenchel_family(spec: &LagrangianSpec) -> Result<&FenchelFamily> {
    match spec {
        LagrangianSpec::Fenchel(fam) => Ok(fam),
        _ => Err(Error::Precondition("needs a Fenchel family")),
    }
}

/// `max_k a_k + λ ∫ |f_k| dμ`.
pub fn finiteness_bound(spec: &LagrangianSpec, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::OutOfDomain { what: "lambda", value: lambda });
    }
    let fam = fenchel_family(spec)?;
    let mut best = f64::NEG_INFINITY;
    for m in &fam.members {
        let mass: f64 = m.profile.values().iter().zip(m.profile.weights()).map(|(v, w)| libm::fabs(*v) * w).sum();
        best = best.max(m.a + lambda * mass);
    }
    Ok(best)
}

/// `C(λ, δ) = max_k a_k + λ ∫₀^δ |f_k|*`.
pub fn ac_modulus(spec: &LagrangianSpec, lambda: f64, delta: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::OutOfDomain { what: "lambda", value: lambda });
    }
    let fam = fenchel_family(spec)?;
    let mut best = f64::NEG_INFINITY;
    for m in &fam.members {
        let profile = rearrange(&m.profile.map(libm::fabs)?);
        if !(delta > 0.0 && delta <= profile.mass() * (1.0 + 1e-12)) {
            return Err(Error::OutOfDomain { what: "delta", value: delta });
        }
        best = best.max(m.a + lambda * profile.partial_integral(delta.min(profile.mass()))?);
    }
    Ok(best)
}
