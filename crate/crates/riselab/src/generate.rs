//! Seeded random potentials.
//!
//! A potential is `û(y) = max_k (⟨s_k, y⟩ + b_k) + ε|y|²` with 3 to 8 affine
//! pieces, slopes in `[−2, 2]^dim`, intercepts in `[−1, 1]`, and `ε = 0`
//! (kinky) or `ε = 0.1` (smooth). The pieces are drawn once per seed, so the
//! same seed at two resolutions samples the same continuous potential.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riselab_core::{ConvexPotential, Polytope, Result};
use serde::{Deserialize, Serialize};

pub const SMOOTH_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    /// Two piecewise-affine potentials.
    Kinky,
    /// Two potentials with a quadratic term.
    Smooth,
    /// Two potentials with `û_u ≥ û_v`, i.e. `u ≤ v`.
    MonotonePair,
    /// Three distinct potentials.
    Triple,
}

/// The continuous description of one random potential.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxAffine {
    pub dim: usize,
    pub slopes: Vec<[f64; 2]>,
    pub intercepts: Vec<f64>,
    pub epsilon: f64,
}

impl MaxAffine {
    pub fn draw(rng: &mut impl Rng, dim: usize, epsilon: f64) -> Self {
        let n = rng.gen_range(3..=8);
        let mut slopes = Vec::with_capacity(n);
        let mut intercepts = Vec::with_capacity(n);
        for _ in 0..n {
            let mut s = [0.0; 2];
            for slot in s.iter_mut().take(dim) {
                *slot = rng.gen_range(-2.0..=2.0);
            }
            slopes.push(s);
            intercepts.push(rng.gen_range(-1.0..=1.0));
        }
        MaxAffine { dim, slopes, intercepts, epsilon }
    }

    pub fn value(&self, y: [f64; 2]) -> f64 {
        let affine = self
            .slopes
            .iter()
            .zip(&self.intercepts)
            .map(|(s, b)| s[0] * y[0] + s[1] * y[1] + b)
            .fold(f64::NEG_INFINITY, f64::max);
        affine + self.epsilon * (y[0] * y[0] + y[1] * y[1])
    }

    pub fn sample(&self, polytope: Polytope) -> Result<ConvexPotential> {
        ConvexPotential::from_fn(polytope, |y| self.value(y))
    }
}

/// A monotone pair in continuous form: `v̂ = λû + (1−λ)ŵ − c`.
#[derive(Debug, Clone, PartialEq)]
struct Blend {
    u: MaxAffine,
    w: MaxAffine,
    lambda: f64,
    extra: f64,
}

impl Blend {
    fn sample(&self, polytope: Polytope) -> Result<[ConvexPotential; 2]> {
        let u = self.u.sample(polytope)?;
        // the gap is measured on the grid so the order holds node by node
        let gap = polytope
            .nodes()
            .map(|y| self.w.value(y) - self.u.value(y))
            .fold(0.0f64, f64::max);
        let c = (1.0 - self.lambda) * gap + self.extra;
        let v = ConvexPotential::from_fn(polytope, |y| {
            self.lambda * self.u.value(y) + (1.0 - self.lambda) * self.w.value(y) - c
        })?;
        Ok([u, v])
    }
}

fn epsilon_for(kind: InstanceKind, rng: &mut impl Rng) -> f64 {
    match kind {
        InstanceKind::Kinky => 0.0,
        InstanceKind::Smooth => SMOOTH_EPSILON,
        InstanceKind::MonotonePair | InstanceKind::Triple => {
            if rng.gen_bool(0.5) {
                SMOOTH_EPSILON
            } else {
                0.0
            }
        }
    }
}

/// Reproducible potentials on `[0,1]^dim` with `m` intervals per axis:
/// two for pair kinds, three for [`InstanceKind::Triple`].
pub fn generate_instance(seed: u64, dim: usize, m: usize, kind: InstanceKind) -> Result<Vec<ConvexPotential>> {
    let polytope = Polytope::unit(dim, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        InstanceKind::Kinky | InstanceKind::Smooth => {
            let eps = epsilon_for(kind, &mut rng);
            let a = MaxAffine::draw(&mut rng, dim, eps);
            let b = MaxAffine::draw(&mut rng, dim, eps);
            Ok(vec![a.sample(polytope)?, b.sample(polytope)?])
        }
        InstanceKind::MonotonePair => {
            let eu = epsilon_for(kind, &mut rng);
            let u = MaxAffine::draw(&mut rng, dim, eu);
            let ew = epsilon_for(kind, &mut rng);
            let w = MaxAffine::draw(&mut rng, dim, ew);
            let lambda = rng.gen_range(0.2..=0.8);
            let extra = rng.gen_range(0.0..=0.3);
            Ok(Blend { u, w, lambda, extra }.sample(polytope)?.into())
        }
        InstanceKind::Triple => {
            let mut out = Vec::with_capacity(3);
            while out.len() < 3 {
                let eps = epsilon_for(kind, &mut rng);
                let p = MaxAffine::draw(&mut rng, dim, eps).sample(polytope)?;
                if out.iter().all(|q: &ConvexPotential| q != &p) {
                    out.push(p);
                }
            }
            Ok(out)
        }
    }
}

/// Seed for an auxiliary draw tied to a primary seed.
pub fn companion_seed(seed: u64, salt: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt.wrapping_mul(0xD1B5_4A32_D192_ED03) | 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_arrays() {
        for kind in [InstanceKind::Kinky, InstanceKind::Smooth, InstanceKind::MonotonePair, InstanceKind::Triple] {
            let a = generate_instance(7, 1, 16, kind).unwrap();
            let b = generate_instance(7, 1, 16, kind).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn monotone_pairs_are_ordered() {
        for seed in 0..40 {
            for dim in [1, 2] {
                let p = generate_instance(seed, dim, 8, InstanceKind::MonotonePair).unwrap();
                assert!(p[0].dominates(&p[1]), "seed {seed} dim {dim}");
            }
        }
    }

    #[test]
    fn triples_are_distinct() {
        for seed in 0..20 {
            let t = generate_instance(seed, 2, 8, InstanceKind::Triple).unwrap();
            assert_eq!(t.len(), 3);
            assert!(t[0] != t[1] && t[1] != t[2] && t[0] != t[2]);
        }
    }

    #[test]
    fn resolutions_sample_one_function() {
        let coarse = generate_instance(3, 1, 16, InstanceKind::Smooth).unwrap();
        let fine = generate_instance(3, 1, 32, InstanceKind::Smooth).unwrap();
        for k in 0..=16 {
            assert_eq!(coarse[0].values()[k], fine[0].values()[2 * k]);
        }
    }
}
