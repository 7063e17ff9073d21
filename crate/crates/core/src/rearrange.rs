//! Finite measure spaces and decreasing rearrangements.
//!
//! A [`WeightedSample`] is a function on a finite set of atoms together with
//! the atom masses. Its decreasing rearrangement is a [`StepFunction`] on
//! `(0, V]`: left-continuous (hence upper semicontinuous), decreasing, with
//! one plateau per distinct value whose length is the mass carried by that
//! value.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::check::{Check, INEQUALITY_SLACK};
use crate::error::{Error, Result};

/// Relative tolerance for agreement of total masses.
const MASS_REL_TOL: f64 = 1e-12;

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn masses_agree(a: f64, b: f64, tol: f64) -> bool {
    libm::fabs(a - b) <= tol * (1.0 + libm::fmax(libm::fabs(a), libm::fabs(b)))
}

/// Real values on finitely many atoms of positive mass.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    values: Vec<f64>,
    weights: Vec<f64>,
    total_mass: f64,
}

impl WeightedSample {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if values.len() != weights.len() {
            return Err(Error::LengthMismatch { expected: values.len(), found: weights.len() });
        }
        check_finite(&values)?;
        if let Some(index) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::NonPositiveWeight { index });
        }
        let total_mass = weights.iter().sum();
        Ok(WeightedSample { values, weights, total_mass })
    }

    /// Atoms of equal mass `total_mass / values.len()`.
    pub fn uniform(values: Vec<f64>, total_mass: f64) -> Result<Self> {
        if !(total_mass.is_finite() && total_mass > 0.0) {
            return Err(Error::OutOfDomain { what: "total mass", value: total_mass });
        }
        let n = values.len().max(1);
        let w = total_mass / n as f64;
        let weights = alloc::vec![w; values.len()];
        let mut sample = Self::new(values, weights)?;
        sample.total_mass = total_mass;
        Ok(sample)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// `∫ ξ dμ`.
    pub fn integral(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// `⨍ ξ dμ`.
    pub fn mean(&self) -> f64 {
        self.integral() / self.total_mass
    }

    /// Applies `f` atomwise, keeping the weights.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        check_finite(&values)?;
        Ok(WeightedSample { values, weights: self.weights.clone(), total_mass: self.total_mass })
    }

    /// Combines two functions on the same atoms.
    pub fn zip_with(&self, other: &WeightedSample, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !self.same_space(other) {
            return Err(Error::GridMismatch);
        }
        let values: Vec<f64> =
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        check_finite(&values)?;
        Ok(WeightedSample { values, weights: self.weights.clone(), total_mass: self.total_mass })
    }

    /// True if both samples have the same atom masses in the same order.
    pub fn same_space(&self, other: &WeightedSample) -> bool {
        self.weights.len() == other.weights.len()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| masses_agree(*a, *b, MASS_REL_TOL))
    }

    /// The same values with the same (constant) function value everywhere.
    pub fn constant_like(&self, c: f64) -> Self {
        WeightedSample {
            values: alloc::vec![c; self.values.len()],
            weights: self.weights.clone(),
            total_mass: self.total_mass,
        }
    }

    /// Measure of `{ξ > t}`.
    pub fn mass_above(&self, t: f64) -> f64 {
        self.values.iter().zip(&self.weights).filter(|(v, _)| **v > t).map(|(_, w)| w).sum()
    }

    /// Measure of `{ξ >= t}`.
    pub fn mass_at_least(&self, t: f64) -> f64 {
        self.values.iter().zip(&self.weights).filter(|(v, _)| **v >= t).map(|(_, w)| w).sum()
    }
}

/// A decreasing, left-continuous step function on `(0, V]`.
///
/// Plateau `k` covers `(breakpoints[k], breakpoints[k + 1]]` and carries
/// `values[k]`. The representation is canonical: adjacent plateaus never
/// share a value.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    /// Builds a step function from breakpoints `0 = s_0 < … < s_m = V` and
    /// `m` non-increasing plateau values. Equal adjacent plateaus are merged.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::LengthMismatch { expected: values.len() + 1, found: breakpoints.len() });
        }
        check_finite(&values)?;
        if breakpoints[0] != 0.0
            || breakpoints.iter().any(|b| !b.is_finite())
            || breakpoints.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::BadBreakpoints);
        }
        if let Some(k) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::NotDecreasing { index: k + 1 });
        }
        Ok(Self::canonical(breakpoints, values))
    }

    /// The constant `c` on `(0, mass]`.
    pub fn constant(c: f64, mass: f64) -> Result<Self> {
        Self::new(alloc::vec![0.0, mass], alloc::vec![c])
    }

    /// Builds from plateau lengths instead of breakpoints.
    pub fn from_plateaus(lengths: &[f64], values: Vec<f64>) -> Result<Self> {
        let mut breakpoints = Vec::with_capacity(lengths.len() + 1);
        let mut acc = 0.0;
        breakpoints.push(0.0);
        for &len in lengths {
            acc += len;
            breakpoints.push(acc);
        }
        Self::new(breakpoints, values)
    }

    /// Merges equal neighbours; inputs are assumed valid.
    fn canonical(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        let mut bps = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        bps.push(breakpoints[0]);
        for (k, &v) in values.iter().enumerate() {
            if vals.last() == Some(&v) {
                *bps.last_mut().unwrap() = breakpoints[k + 1];
            } else {
                vals.push(v);
                bps.push(breakpoints[k + 1]);
            }
        }
        StepFunction { breakpoints: bps, values: vals }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Total mass `V` of the domain.
    pub fn mass(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn plateau_count(&self) -> usize {
        self.values.len()
    }

    pub fn plateau_lengths(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn plateau_midpoints(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Index of the plateau containing `s`, for `s` in `(0, V]`.
    fn plateau_of(&self, s: f64) -> usize {
        // first k >= 1 with s <= breakpoints[k]
        let k = self.breakpoints[1..].partition_point(|&b| b < s);
        k.min(self.values.len() - 1)
    }

    /// Value at `s ∈ (0, V]`, taking the left limit at breakpoints.
    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s <= self.mass()) {
            return Err(Error::OutOfDomain { what: "s", value: s });
        }
        Ok(self.values[self.plateau_of(s)])
    }

    /// `∫_0^λ f` for `λ ∈ [0, V]`.
    pub fn partial_integral(&self, lambda: f64) -> Result<f64> {
        if !(lambda >= 0.0 && lambda <= self.mass()) {
            return Err(Error::OutOfDomain { what: "lambda", value: lambda });
        }
        let mut acc = 0.0;
        for (k, &v) in self.values.iter().enumerate() {
            let (a, b) = (self.breakpoints[k], self.breakpoints[k + 1]);
            if lambda <= a {
                break;
            }
            acc += v * (b.min(lambda) - a);
        }
        Ok(acc)
    }

    /// `∫_0^V f`.
    pub fn integral(&self) -> f64 {
        self.values.iter().zip(self.plateau_lengths()).map(|(v, l)| v * l).sum()
    }

    /// `∫_0^V g(f(s)) ds` for an arbitrary scalar map `g`.
    pub fn integral_of(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.values.iter().zip(self.plateau_lengths()).map(|(&v, l)| g(v) * l).sum()
    }

    /// The plateaus viewed as atoms: values with their lengths as masses.
    pub fn as_sample(&self) -> WeightedSample {
        WeightedSample {
            values: self.values.clone(),
            weights: self.plateau_lengths(),
            total_mass: self.mass(),
        }
    }

    /// Applies a non-decreasing map to every plateau.
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        Self::new(self.breakpoints.clone(), values)
    }

    /// `c·f` for `c >= 0`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0) {
            return Err(Error::OutOfDomain { what: "scale", value: c });
        }
        if c == 0.0 {
            return Self::constant(0.0, self.mass());
        }
        self.map_monotone(|v| c * v)
    }

    /// `f + c`.
    pub fn shift(&self, c: f64) -> Result<Self> {
        self.map_monotone(|v| v + c)
    }

    /// The decreasing usc function `λ ↦ -f(V - λ)`.
    ///
    /// Equidistributed with `-f`; agrees with the pointwise formula away from
    /// the breakpoints.
    pub fn neg_reversed(&self) -> Self {
        let v = self.mass();
        let breakpoints: Vec<f64> = self.breakpoints.iter().rev().map(|b| v - b).collect();
        let values: Vec<f64> = self.values.iter().rev().map(|x| -x).collect();
        let mut breakpoints = breakpoints;
        breakpoints[0] = 0.0;
        *breakpoints.last_mut().unwrap() = v;
        Self::canonical(breakpoints, values)
    }

    /// `∫_0^V f g`, exact for step functions on the same mass.
    pub fn integral_product(&self, other: &StepFunction) -> Result<f64> {
        same_mass(self, other)?;
        let cuts = merged_breakpoints(&[self, other]);
        let mut acc = 0.0;
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            acc += self.values[self.plateau_of(mid)] * other.values[other.plateau_of(mid)] * (w[1] - w[0]);
        }
        Ok(acc)
    }
}

fn same_mass(f: &StepFunction, g: &StepFunction) -> Result<()> {
    if masses_agree(f.mass(), g.mass(), MASS_REL_TOL) {
        Ok(())
    } else {
        Err(Error::MassMismatch { left: f.mass(), right: g.mass() })
    }
}

/// Sorted union of the breakpoints of several step functions, with points
/// closer than `1e-14·V` identified.
pub fn merged_breakpoints(fs: &[&StepFunction]) -> Vec<f64> {
    let mut all: Vec<f64> = fs.iter().flat_map(|f| f.breakpoints.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    let v = fs.iter().map(|f| f.mass()).fold(0.0, f64::max);
    let eps = 1e-14 * v;
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for b in all {
        match out.last() {
            Some(&last) if b - last <= eps => {}
            _ => out.push(b),
        }
    }
    if let Some(last) = out.last_mut() {
        *last = v;
    }
    out
}

/// Midpoints of the common refinement of several step functions' plateaus.
///
/// These avoid every jump, which is where pointwise statements about
/// rearrangements hold only up to the choice of representative.
pub fn probe_points(fs: &[&StepFunction]) -> Vec<f64> {
    merged_breakpoints(fs).windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Largest `|f - g|` over the common plateau midpoints.
pub fn sup_distance(f: &StepFunction, g: &StepFunction) -> Result<f64> {
    same_mass(f, g)?;
    let mut worst: f64 = 0.0;
    for s in probe_points(&[f, g]) {
        worst = worst.max(libm::fabs(f.eval(s)? - g.eval(s)?));
    }
    Ok(worst)
}

/// Decreasing rearrangement of a weighted sample.
///
/// Values are stably sorted in decreasing order and masses accumulated; equal
/// values form a single plateau.
pub fn rearrange(sample: &WeightedSample) -> StepFunction {
    let mut order: Vec<usize> = (0..sample.len()).collect();
    order.sort_by(|&a, &b| sample.values[b].partial_cmp(&sample.values[a]).unwrap_or(Ordering::Equal));
    let mut breakpoints = Vec::with_capacity(order.len() + 1);
    let mut values = Vec::with_capacity(order.len());
    breakpoints.push(0.0);
    let mut acc = 0.0;
    for &i in &order {
        acc += sample.weights[i];
        let v = sample.values[i];
        if values.last() == Some(&v) {
            *breakpoints.last_mut().unwrap() = acc;
        } else {
            values.push(v);
            breakpoints.push(acc);
        }
    }
    // The last breakpoint is the total mass itself, not a re-summed copy.
    *breakpoints.last_mut().unwrap() = sample.total_mass;
    // Guard against rounding making a tiny final plateau non-increasing.
    let mut k = breakpoints.len() - 1;
    while k > 1 && breakpoints[k - 1] >= breakpoints[k] {
        breakpoints.remove(k - 1);
        values.remove(k - 1);
        k -= 1;
    }
    StepFunction { breakpoints, values }
}

/// `∫_0^λ f ≥ ∫_0^λ g - tol` for every `λ` (Hardy–Littlewood–Pólya order).
///
/// Both partial integrals are piecewise linear in `λ`, so it is enough to
/// test at the merged breakpoints.
pub fn hlp_geq(f: &StepFunction, g: &StepFunction, tol: f64) -> Result<bool> {
    Ok(hlp_check(f, g, tol)?.passed())
}

/// The same comparison as [`hlp_geq`], reporting the largest shortfall.
pub fn hlp_check(f: &StepFunction, g: &StepFunction, tol: f64) -> Result<Check> {
    same_mass(f, g)?;
    let mut check = Check::new("hlp", tol);
    for lambda in merged_breakpoints(&[f, g]) {
        let lambda = lambda.min(f.mass()).min(g.mass());
        check.le(g.partial_integral(lambda)?, f.partial_integral(lambda)?);
    }
    Ok(check)
}

/// Checks `μ(ξ > ξ*(s)) ≤ s ≤ μ(ξ ≥ ξ*(s))` at every plateau midpoint and
/// every positive breakpoint of the rearrangement.
pub fn distribution_bounds_check(sample: &WeightedSample) -> bool {
    let r = rearrange(sample);
    let slack = MASS_REL_TOL * sample.total_mass();
    let mut probes = r.plateau_midpoints();
    probes.extend(r.breakpoints()[1..].iter().copied());
    probes.iter().all(|&s| {
        let Ok(value) = r.eval(s) else { return false };
        sample.mass_above(value) <= s + slack && s <= sample.mass_at_least(value) + slack
    })
}

/// True if the two samples have the same distribution up to `tol`.
pub fn equidistributed(a: &WeightedSample, b: &WeightedSample, tol: f64) -> Result<bool> {
    if libm::fabs(a.total_mass() - b.total_mass()) > tol {
        return Err(Error::MassMismatch { left: a.total_mass(), right: b.total_mass() });
    }
    let (ra, rb) = (rearrange(a), rearrange(b));
    let cuts = {
        let mut all: Vec<f64> = ra.breakpoints().iter().chain(rb.breakpoints()).copied().collect();
        all.sort_by(f64::total_cmp);
        all
    };
    let v = ra.mass().min(rb.mass());
    for w in cuts.windows(2) {
        if w[1] - w[0] <= tol || w[1] > v {
            continue;
        }
        let s = 0.5 * (w[0] + w[1]);
        if libm::fabs(ra.eval(s)? - rb.eval(s)?) > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The `(α, β)`-rescaling `s ↦ (αf)*(βs)` of a decreasing function.
///
/// For `α < 0` the rearrangement of `αf` is `|α|` times the negated reversal
/// of `f`. Since `βs ≤ βV ≤ V`, the result is defined on all of `(0, V]`.
pub fn rescale_allied(f: &StepFunction, alpha: f64, beta: f64) -> Result<StepFunction> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::OutOfDomain { what: "beta", value: beta });
    }
    if !alpha.is_finite() {
        return Err(Error::OutOfDomain { what: "alpha", value: alpha });
    }
    let scaled = if alpha >= 0.0 { f.scale(alpha)? } else { f.neg_reversed().scale(-alpha)? };
    if beta == 1.0 {
        return Ok(scaled);
    }
    let v = scaled.mass();
    let mut breakpoints = alloc::vec![0.0];
    let mut values = Vec::new();
    for (k, &val) in scaled.values.iter().enumerate() {
        let end = scaled.breakpoints[k + 1] / beta;
        values.push(val);
        if end >= v {
            breakpoints.push(v);
            break;
        }
        breakpoints.push(end);
    }
    *breakpoints.last_mut().unwrap() = v;
    StepFunction::new(breakpoints, values)
}

/// Convex functions of two variables, increasing in both, used to probe the
/// rearrangement inequality `F(ξ,η)*(s) ≤ F(ξ*(σ), η*(s−σ))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bivariate {
    Sum,
    Max,
}

impl Bivariate {
    pub fn apply(self, x: f64, y: f64) -> f64 {
        match self {
            Bivariate::Sum => x + y,
            Bivariate::Max => x.max(y),
        }
    }
}

/// Checks `F(ξ,η)*(s) ≤ F(ξ*(σ), η*(s−σ))` at one `(σ, s)` with `0 < σ < s < V`.
pub fn sum_rearrangement_bound_check(
    xi: &WeightedSample,
    eta: &WeightedSample,
    f: Bivariate,
    sigma: f64,
    s: f64,
) -> Result<bool> {
    let v = xi.total_mass();
    if !(sigma > 0.0 && sigma < s) {
        return Err(Error::OutOfDomain { what: "sigma", value: sigma });
    }
    if !(s < v) {
        return Err(Error::OutOfDomain { what: "s", value: s });
    }
    let combined = xi.zip_with(eta, |a, b| f.apply(a, b))?;
    let lhs = rearrange(&combined).eval(s)?;
    let rhs = f.apply(rearrange(xi).eval(sigma)?, rearrange(eta).eval(s - sigma)?);
    Ok(lhs <= rhs + INEQUALITY_SLACK)
}
