#![allow(dead_code)]

use proptest::prelude::*;
use riselab_core::{ConvexPotential, Polytope, WeightedSample};

/// Pieces of `y ↦ max_k (⟨s_k, y⟩ + b_k) + ε|y|²`.
#[derive(Debug, Clone)]
pub struct Pieces {
    pub slopes: Vec<[f64; 2]>,
    pub intercepts: Vec<f64>,
    pub epsilon: f64,
}

impl Pieces {
    pub fn value(&self, y: [f64; 2]) -> f64 {
        let affine = self
            .slopes
            .iter()
            .zip(&self.intercepts)
            .map(|(s, b)| s[0] * y[0] + s[1] * y[1] + b)
            .fold(f64::NEG_INFINITY, f64::max);
        affine + self.epsilon * (y[0] * y[0] + y[1] * y[1])
    }

    pub fn on(&self, polytope: Polytope) -> ConvexPotential {
        ConvexPotential::from_fn(polytope, |y| self.value(y)).unwrap()
    }
}

pub fn pieces(dim: usize) -> impl Strategy<Value = Pieces> {
    let slope = move || {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(move |(a, b)| if dim == 1 { [a, 0.0] } else { [a, b] })
    };
    (
        prop::collection::vec((slope(), -1.0..1.0f64), 2..6),
        prop_oneof![Just(0.0), Just(0.1)],
    )
        .prop_map(|(pairs, epsilon)| Pieces {
            slopes: pairs.iter().map(|p| p.0).collect(),
            intercepts: pairs.iter().map(|p| p.1).collect(),
            epsilon,
        })
}

pub fn potential(dim: usize, m: usize) -> impl Strategy<Value = ConvexPotential> {
    pieces(dim).prop_map(move |p| p.on(Polytope::unit(dim, m).unwrap()))
}

pub fn pair(dim: usize, m: usize) -> impl Strategy<Value = (ConvexPotential, ConvexPotential)> {
    (potential(dim, m), potential(dim, m))
}

pub fn triple(dim: usize, m: usize) -> impl Strategy<Value = (ConvexPotential, ConvexPotential, ConvexPotential)> {
    (potential(dim, m), potential(dim, m), potential(dim, m))
}

/// `(u, v)` with `û_u ≥ û_v`: `v̂ = û − c` minus a nonnegative convex bump.
pub fn ordered_pair(dim: usize, m: usize) -> impl Strategy<Value = (ConvexPotential, ConvexPotential)> {
    (pieces(dim), 0.0..0.5f64, 0.2..0.8f64, pieces(dim)).prop_map(move |(a, c, lambda, b)| {
        let poly = Polytope::unit(dim, m).unwrap();
        let gap = poly.nodes().map(|y| b.value(y) - a.value(y)).fold(0.0f64, f64::max);
        let shift = (1.0 - lambda) * gap + c;
        let u = a.on(poly);
        let v = ConvexPotential::from_fn(poly, |y| lambda * a.value(y) + (1.0 - lambda) * b.value(y) - shift)
            .unwrap();
        (u, v)
    })
}

/// Samples with 1 to `max` atoms of positive weight.
pub fn sample(max: usize) -> impl Strategy<Value = WeightedSample> {
    prop::collection::vec((-5.0..5.0f64, 0.01..1.0f64), 1..=max).prop_map(|atoms| {
        let (values, weights) = atoms.into_iter().unzip();
        WeightedSample::new(values, weights).unwrap()
    })
}

/// Two samples on the same atoms.
pub fn sample_pair(max: usize) -> impl Strategy<Value = (WeightedSample, WeightedSample)> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64, 0.01..1.0f64), 1..=max).prop_map(|atoms| {
        let xs = atoms.iter().map(|a| a.0).collect();
        let ys = atoms.iter().map(|a| a.1).collect();
        let ws: Vec<f64> = atoms.iter().map(|a| a.2).collect();
        (WeightedSample::new(xs, ws.clone()).unwrap(), WeightedSample::new(ys, ws).unwrap())
    })
}

/// Values taken from a small set so that ties are common.
pub fn tied_sample(max: usize) -> impl Strategy<Value = WeightedSample> {
    prop::collection::vec((-3i32..3, 1u32..4), 1..=max).prop_map(|atoms| {
        let values = atoms.iter().map(|a| a.0 as f64).collect();
        let weights = atoms.iter().map(|a| a.1 as f64 * 0.25).collect();
        WeightedSample::new(values, weights).unwrap()
    })
}

/// Distribution-function oracle: `ξ*(s) = inf { t : μ(ξ > t) < s }`, read
/// off the sorted distinct values.
pub fn rearranged_value(sample: &WeightedSample, s: f64) -> f64 {
    let mut values: Vec<f64> = sample.values().to_vec();
    values.sort_by(|a, b| b.total_cmp(a));
    values.dedup();
    for &t in &values {
        let above: f64 =
            sample.values().iter().zip(sample.weights()).filter(|(v, _)| **v > t).map(|(_, w)| w).sum();
        let at_least: f64 =
            sample.values().iter().zip(sample.weights()).filter(|(v, _)| **v >= t).map(|(_, w)| w).sum();
        if above < s && s <= at_least {
            return t;
        }
    }
    *values.last().unwrap()
}
