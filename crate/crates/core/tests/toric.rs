mod common;

use common::{ordered_pair, pair, pieces, potential};
use proptest::prelude::*;
use riselab_core::rearrange::probe_points;
use riselab_core::toric::{
    envelope_oracle, join, legendre, meet, project_space_function, pushforward_measure, EnvelopeOracle,
};
use riselab_core::{rearrange, ConvexPotential, GeodesicPath, Polytope, SpaceFunction, XGrid};

fn brute_legendre(u: &ConvexPotential, x: [f64; 2]) -> f64 {
    let p = u.polytope();
    p.nodes()
        .zip(u.values())
        .map(|(y, uh)| x[0] * y[0] + if p.dim() == 2 { x[1] * y[1] } else { 0.0 } - uh)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn sup_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn separable_legendre_matches_direct_maximum(u in potential(2, 10)) {
        let grid = XGrid::covering(&[&u]).unwrap();
        let fast = legendre(&u, &grid).unwrap();
        for (x, v) in grid.nodes().zip(fast.values()) {
            prop_assert!((v - brute_legendre(&u, x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn legendre_reverses_order((u, v) in ordered_pair(1, 24)) {
        let grid = XGrid::covering(&[&u, &v]).unwrap();
        let (ux, vx) = (legendre(&u, &grid).unwrap(), legendre(&v, &grid).unwrap());
        for (a, b) in ux.values().iter().zip(vx.values()) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn lattice_laws((a, b) in pair(1, 24), c in potential(1, 24)) {
        prop_assert_eq!(meet(&a, &b).unwrap(), meet(&b, &a).unwrap());
        prop_assert_eq!(join(&a, &b).unwrap(), join(&b, &a).unwrap());
        prop_assert_eq!(meet(&a, &a).unwrap(), a.clone());
        prop_assert_eq!(meet(&a, &join(&a, &b).unwrap()).unwrap(), a.clone());
        prop_assert!(sup_gap(join(&a, &a).unwrap().values(), a.values()) <= 1e-12);
        prop_assert!(sup_gap(join(&a, &meet(&a, &b).unwrap()).unwrap().values(), a.values()) <= 1e-12);
        let left = meet(&meet(&a, &b).unwrap(), &c).unwrap();
        let right = meet(&a, &meet(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        // the meet lies below both, the join above both
        let m = meet(&a, &b).unwrap();
        let j = join(&a, &b).unwrap();
        prop_assert!(m.dominates(&a) && m.dominates(&b));
        prop_assert!(a.dominates(&j) && b.dominates(&j));
    }

    #[test]
    fn lattice_laws_in_two_dimensions((a, b) in pair(2, 8)) {
        prop_assert_eq!(meet(&a, &join(&a, &b).unwrap()).unwrap(), a.clone());
        prop_assert!(sup_gap(join(&a, &meet(&a, &b).unwrap()).unwrap().values(), a.values()) <= 1e-12);
        prop_assert_eq!(join(&a, &b).unwrap(), join(&b, &a).unwrap());
    }

    #[test]
    fn envelope_matches_dual_interpolation_1d((u, v) in pair(1, 32), t in 0.0..1.0f64) {
        let grid = XGrid::covering(&[&u, &v]).unwrap();
        let path = GeodesicPath::new(u.clone(), v.clone()).unwrap();
        let oracle = EnvelopeOracle::new(&legendre(&u, &grid).unwrap(), &legendre(&v, &grid).unwrap(), u.polytope()).unwrap();
        let psi = legendre(&path.at(t).unwrap(), &grid).unwrap();
        let tol = 2.0 * u.polytope().h() * u.polytope().diameter();
        for (x, val) in grid.nodes().zip(psi.values()) {
            prop_assert!((oracle.value(t, x) - val).abs() <= tol);
        }
    }

    #[test]
    fn space_side_geodesic_is_convex_in_time((u, v) in pair(1, 24)) {
        let grid = XGrid::covering(&[&u, &v]).unwrap();
        let path = GeodesicPath::new(u, v).unwrap();
        let slices: Vec<SpaceFunction> =
            (0..=16).map(|k| legendre(&path.at(k as f64 / 16.0).unwrap(), &grid).unwrap()).collect();
        for w in slices.windows(3) {
            for k in 0..grid.node_count() {
                let second = w[0].values()[k] - 2.0 * w[1].values()[k] + w[2].values()[k];
                prop_assert!(second >= -1e-9);
            }
        }
    }

    #[test]
    fn projection_inverts_legendre(u in potential(1, 24)) {
        let grid = XGrid::covering(&[&u]).unwrap();
        let back = project_space_function(&legendre(&u, &grid).unwrap(), u.polytope()).unwrap();
        prop_assert!(sup_gap(back.values(), u.values()) <= 2.0 * grid.spacing());
        let again = project_space_function(&legendre(&back, &grid).unwrap(), u.polytope()).unwrap();
        prop_assert!(sup_gap(again.values(), back.values()) <= 1e-12);
    }

    #[test]
    fn pushforward_has_unit_mass(u in potential(2, 8), c in -2.0..2.0f64) {
        let grid = XGrid::covering(&[&u]).unwrap();
        let g = SpaceFunction::from_fn(grid, |_| c).unwrap();
        let s = pushforward_measure(&u, &g).unwrap();
        prop_assert!((s.total_mass() - 1.0).abs() <= 1e-12);
        prop_assert!(s.values().iter().all(|v| (v - c).abs() <= 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn envelope_matches_dual_interpolation_2d(a in pieces(2), b in pieces(2), t in 0.0..1.0f64) {
        let poly = Polytope::unit(2, 8).unwrap();
        let (u, v) = (a.on(poly), b.on(poly));
        let grid = XGrid::covering(&[&u, &v]).unwrap();
        let path = GeodesicPath::new(u.clone(), v.clone()).unwrap();
        let psi = legendre(&path.at(t).unwrap(), &grid).unwrap();
        let tol = 2.0 * poly.h() * poly.diameter();
        for (x, val) in grid.nodes().zip(psi.values()).step_by(7) {
            prop_assert!((envelope_oracle(&u, &v, t, x, &grid).unwrap() - val).abs() <= tol);
        }
    }
}

#[test]
fn geodesic_endpoints_and_constant_shift() {
    let poly = Polytope::unit(1, 16).unwrap();
    let u = ConvexPotential::from_fn(poly, |y| (y[0] - 0.3).abs() + y[0] * y[0]).unwrap();
    let c = 0.75;
    let v = u.lowered(c);
    let path = GeodesicPath::new(u.clone(), v.clone()).unwrap();
    assert_eq!(path.at(0.0).unwrap(), u);
    assert_eq!(path.at(1.0).unwrap(), v);
    let grid = XGrid::covering(&[&u, &v]).unwrap();
    let ux = legendre(&u, &grid).unwrap();
    for t in [0.2, 0.5, 0.8] {
        let ut = path.at(t).unwrap();
        assert!(sup_gap(ut.values(), u.lowered(t * c).values()) <= 1e-12);
        let psi = legendre(&ut, &grid).unwrap();
        for (k, x) in grid.nodes().enumerate() {
            assert!((psi.values()[k] - ux.values()[k] - t * c).abs() <= 1e-12);
            assert!((envelope_oracle(&u, &v, t, x, &grid).unwrap() - ux.values()[k] - t * c).abs() <= 1e-12);
        }
        let vel = path.velocity_finite_difference(t, 0.05, &grid).unwrap();
        assert!(vel.values().iter().all(|w| (w - c).abs() <= 1e-9));
    }
    for (k, x) in grid.nodes().enumerate() {
        assert!((envelope_oracle(&u, &v, 0.0, x, &grid).unwrap() - ux.values()[k]).abs() <= 1e-9);
    }
    assert!(path.velocity_finite_difference(0.02, 0.05, &grid).is_err());
    assert!(path.at(1.5).is_err());
}

#[test]
fn velocity_is_odd_for_reflected_ends() {
    let poly = Polytope::unit(1, 32).unwrap();
    let f = |y: f64| (2.0 * y - 0.4).max(-y + 0.1) + 0.1 * y * y;
    let u = ConvexPotential::from_fn(poly, |y| f(y[0])).unwrap();
    let v = ConvexPotential::from_fn(poly, |y| f(1.0 - y[0])).unwrap();
    let grid = XGrid::covering(&[&u, &v]).unwrap();
    let path = GeodesicPath::new(u, v).unwrap();
    let vel = path.velocity_finite_difference(0.5, 1.0 / 64.0, &grid).unwrap();
    let n = grid.node_count();
    for k in 0..n {
        assert!((vel.values()[k] + vel.values()[n - 1 - k]).abs() <= 1e-9, "node {k}");
    }
}

#[test]
fn velocity_differences_shrink_with_time_step() {
    let poly = Polytope::unit(1, 32).unwrap();
    let u = ConvexPotential::from_fn(poly, |y| (1.5 * y[0] - 0.2).max(-y[0]) + 0.1 * y[0] * y[0]).unwrap();
    let v = ConvexPotential::from_fn(poly, |y| 0.6 * y[0] * y[0] - 0.3 * y[0]).unwrap();
    let grid = XGrid::covering(&[&u, &v]).unwrap();
    let path = GeodesicPath::new(u, v).unwrap();
    let vel = |dt: f64| path.velocity_finite_difference(0.5, dt, &grid).unwrap();
    let mean_gap = |a: &SpaceFunction, b: &SpaceFunction| {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.values().len() as f64
    };
    let steps: Vec<SpaceFunction> = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0].map(vel).into();
    let gaps: Vec<f64> = steps.windows(2).map(|w| mean_gap(&w[0], &w[1])).collect();
    assert!(gaps.last().unwrap() * 4.0 <= gaps[0], "{gaps:?}");
}

#[test]
fn pushforward_of_identity_under_half_square() {
    let m = 64;
    let poly = Polytope::unit(1, m).unwrap();
    let u = ConvexPotential::from_fn(poly, |y| 0.5 * y[0] * y[0]).unwrap();
    let grid = XGrid::covering(&[&u]).unwrap();
    let g = SpaceFunction::from_fn(grid, |x| x[0]).unwrap();
    let r = rearrange(&pushforward_measure(&u, &g).unwrap());
    // ∇û(y) = y, uniform in y, so the rearrangement is close to 1 − s
    for s in probe_points(&[&r]) {
        assert!((r.eval(s).unwrap() - (1.0 - s)).abs() <= 2.0 * poly.h());
    }
}

#[test]
fn projection_of_shifted_ramp_is_constant() {
    let poly = Polytope::unit(1, 16).unwrap();
    let grid = XGrid::new(1, 3.0, 60).unwrap();
    let c = 0.4;
    let f = SpaceFunction::from_fn(grid, |x| x[0].max(0.0) + c).unwrap();
    let u = project_space_function(&f, &poly).unwrap();
    assert!(u.values().iter().all(|v| (v + c).abs() <= 1e-12));
}

#[test]
fn pushforward_of_difference_under_shift_is_constant() {
    let poly = Polytope::unit(2, 8).unwrap();
    let u = ConvexPotential::from_fn(poly, |y| (y[0] - y[1]).abs() + 0.1 * (y[0] * y[0] + y[1] * y[1])).unwrap();
    let v = u.lowered(0.3);
    let grid = XGrid::covering(&[&u, &v]).unwrap();
    let gap = legendre(&u, &grid).unwrap().difference_to(&legendre(&v, &grid).unwrap()).unwrap();
    let s = pushforward_measure(&u, &gap).unwrap();
    assert!(s.values().iter().all(|x| (x - 0.3).abs() <= 1e-12));
}

#[test]
fn legendre_needs_room_for_all_slopes() {
    let poly = Polytope::unit(1, 8).unwrap();
    let u = ConvexPotential::from_fn(poly, |y| 3.0 * y[0]).unwrap();
    assert!(legendre(&u, &XGrid::new(1, 2.0, 16).unwrap()).is_err());
    let g = SpaceFunction::from_fn(XGrid::new(1, 2.0, 16).unwrap(), |x| x[0]).unwrap();
    assert!(pushforward_measure(&u, &g).is_err());
}
