mod common;

use common::{ordered_pair, pair, pieces, potential, triple, Pieces};
use proptest::prelude::*;
use riselab_core::rearrange::probe_points;
use riselab_core::rise::{
    chord_sandwich_check, conservation_check, contraction_check, flat_compare, flat_compare_strong,
    monotone_approx, monotone_approx_check, pythagoras_check, refinement_levels, rise, rise_of_path,
    rise_of_segment, rise_reversed, support_truncation, triangle_hlp_check, MeetBound,
};
use riselab_core::toric::pushforward_measure;
use riselab_core::{rearrange, ConvexPotential, GeodesicPath, Polytope, SpaceFunction, XGrid};

const SLACK: f64 = 1e-9;
const EXACT: f64 = 1e-12;
/// Conservation deviation in units of `h + dt`.
const CONSERVATION_C: f64 = 6.0;

fn smooth(dim: usize, m: usize) -> impl Strategy<Value = ConvexPotential> {
    pieces(dim).prop_map(move |p| Pieces { epsilon: 0.1, ..p }.on(Polytope::unit(dim, m).unwrap()))
}

/// Flat-comparison tolerance: polytope diameter times x spacing.
fn flat_tol(u: &ConvexPotential, grid: &XGrid) -> f64 {
    u.polytope().diameter() * grid.spacing()
}

fn meet_probes() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for j in 0..5 {
        let s = 0.14 + 0.17 * j as f64;
        for i in 0..5 {
            out.push((s * (0.1 + 0.2 * i as f64), s));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn segments_scale_the_whole_rise((u, v) in pair(1, 24), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(b - a > 1e-3);
        let path = GeodesicPath::new(u, v).unwrap();
        let whole = rise_of_path(&path).unwrap();
        let part = rise_of_segment(&path, a, b).unwrap().as_step().scale(1.0 / (b - a)).unwrap();
        for s in probe_points(&[whole.as_step(), &part]) {
            prop_assert!((whole.eval(s).unwrap() - part.eval(s).unwrap()).abs() <= EXACT);
        }
    }

    #[test]
    fn reversal_is_negated_reflection((u, v) in pair(2, 8)) {
        let forward = rise(&u, &v).unwrap();
        let back = rise(&v, &u).unwrap();
        let flipped = rise_reversed(&forward);
        for s in probe_points(&[back.as_step(), flipped.as_step()]) {
            prop_assert!((back.eval(s).unwrap() - flipped.eval(s).unwrap()).abs() <= EXACT);
        }
    }

    #[test]
    fn rise_grows_with_the_target(u in potential(1, 24), (v, w) in ordered_pair(1, 24)) {
        let (low, high) = (rise(&u, &v).unwrap(), rise(&u, &w).unwrap());
        for s in probe_points(&[low.as_step(), high.as_step()]) {
            prop_assert!(low.eval(s).unwrap() <= high.eval(s).unwrap() + SLACK);
        }
    }

    #[test]
    fn translation_shifts_the_rise((u, v) in pair(2, 8), c in -2.0..2.0f64) {
        let base = rise(&u, &v).unwrap();
        let shifted = rise(&u, &v.lowered(c)).unwrap();
        for s in probe_points(&[base.as_step(), shifted.as_step()]) {
            prop_assert!((shifted.eval(s).unwrap() - base.eval(s).unwrap() - c).abs() <= EXACT);
        }
    }

    #[test]
    fn order_is_read_off_the_rise((u, v) in pair(1, 24)) {
        let r = rise(&u, &v).unwrap();
        let smallest = *r.as_step().values().last().unwrap();
        prop_assert_eq!(u.dominates(&v), smallest >= -SLACK);
    }

    #[test]
    fn pythagoras_holds((u, v) in pair(1, 24)) {
        prop_assert!(pythagoras_check(&u, &v, EXACT).unwrap().passed());
    }

    #[test]
    fn pythagoras_holds_in_two_dimensions((u, v) in pair(2, 8)) {
        prop_assert!(pythagoras_check(&u, &v, EXACT).unwrap().passed());
    }

    #[test]
    fn meeting_contracts((u, v) in ordered_pair(1, 24), w in potential(1, 24)) {
        prop_assert!(contraction_check(&u, &v, &w, SLACK).unwrap().passed());
    }

    #[test]
    fn partial_integrals_satisfy_triangle((u, v, w) in triple(1, 24)) {
        prop_assert!(triangle_hlp_check(&u, &v, &w, SLACK).unwrap().passed());
    }

    #[test]
    fn partial_integrals_satisfy_triangle_in_two_dimensions((u, v, w) in triple(2, 8)) {
        prop_assert!(triangle_hlp_check(&u, &v, &w, SLACK).unwrap().passed());
    }

    #[test]
    fn flat_comparison_chain((u, v) in pair(1, 32)) {
        let grid = XGrid::covering(&[&u, &v]).unwrap();
        let cmp = flat_compare(&u, &v, &grid).unwrap();
        prop_assert!(cmp.check(flat_tol(&u, &grid)).unwrap().passed());
    }

    #[test]
    fn strong_flat_comparison((u, v) in ordered_pair(1, 32)) {
        let grid = XGrid::covering(&[&u, &v]).unwrap();
        prop_assert!(flat_compare_strong(&u, &v, &grid, SLACK).unwrap().passed());
    }

    #[test]
    fn meet_rise_bound((u, v, w) in triple(1, 32)) {
        let grid = XGrid::covering(&[&u, &v, &w]).unwrap();
        let bound = MeetBound::new(&u, &v, &w, &grid).unwrap();
        prop_assert!(bound.check(&meet_probes(), flat_tol(&u, &grid)).unwrap().passed());
    }

    #[test]
    fn chords_sandwich_the_rise((u, v) in pair(1, 32), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(b - a > 0.05);
        let grid = XGrid::covering(&[&u, &v]).unwrap();
        let tol = flat_tol(&u, &grid) / (b - a);
        let path = GeodesicPath::new(u, v).unwrap();
        prop_assert!(chord_sandwich_check(&path, a, b, &grid, tol).unwrap().passed());
    }

    #[test]
    fn one_sided_truncations_decay((u, v) in pair(1, 32)) {
        let levels = refinement_levels(u.polytope());
        let report = monotone_approx(&u, &v, *levels.last().unwrap()).unwrap();
        prop_assert!(report.decay_check(EXACT).passed());
        // with every plane the truncation is the potential itself
        prop_assert!(*report.joint.last().unwrap() <= EXACT);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn conservation_matches_velocities((u, v) in (smooth(1, 64), smooth(1, 64))) {
        let dt = 1.0 / 256.0;
        let base = XGrid::covering(&[&u, &v]).unwrap();
        let grid = XGrid::new(1, base.r(), 2 * base.n()).unwrap();
        let h = u.polytope().h();
        let path = GeodesicPath::new(u, v).unwrap();
        let report = conservation_check(&path, &[0.25, 0.5, 0.75], dt, &grid).unwrap();
        prop_assert!(report.check(CONSERVATION_C * (h + dt)).passed(), "{:?}", report.deviations);
    }

    #[test]
    fn strong_flat_comparison_in_two_dimensions((u, v) in ordered_pair(2, 8)) {
        let grid = XGrid::covering(&[&u, &v]).unwrap();
        prop_assert!(flat_compare_strong(&u, &v, &grid, SLACK).unwrap().passed());
    }

    #[test]
    fn truncation_final_deviation_in_two_dimensions((u, v) in (smooth(2, 8), smooth(2, 8))) {
        let levels = refinement_levels(u.polytope());
        let k = levels[levels.len() - 2];
        let tol = u.slope_bound().max(v.slope_bound()) * u.polytope().h();
        let [decay, last] = monotone_approx_check(&u, &v, k, tol).unwrap();
        prop_assert!(decay.passed());
        prop_assert!(last.passed());
    }
}

#[test]
fn flipped_velocity_sign_breaks_conservation() {
    let poly = Polytope::unit(1, 64).unwrap();
    let u = ConvexPotential::from_fn(poly, |y| (1.5 * y[0] - 0.4).max(-0.5 * y[0]) + 0.1 * y[0] * y[0]).unwrap();
    let v = ConvexPotential::from_fn(poly, |y| 0.8 * y[0] * y[0] - 0.6 * y[0] + 0.2).unwrap();
    let base = XGrid::covering(&[&u, &v]).unwrap();
    let grid = XGrid::new(1, base.r(), 2 * base.n()).unwrap();
    let path = GeodesicPath::new(u, v).unwrap();
    let dt = 1.0 / 256.0;
    let tol = CONSERVATION_C * (poly.h() + dt);
    assert!(conservation_check(&path, &[0.5], dt, &grid).unwrap().check(tol).passed());

    let target = rise_of_path(&path).unwrap();
    let velocity = path.velocity_finite_difference(0.5, dt, &grid).unwrap();
    let negated = SpaceFunction::new(grid, velocity.values().iter().map(|x| -x).collect()).unwrap();
    let flipped = rearrange(&pushforward_measure(&path.at(0.5).unwrap(), &negated).unwrap());
    let deviation = riselab_core::rearrange::sup_distance(&flipped, target.as_step()).unwrap();
    assert!(deviation > 2.0 * tol, "{deviation}");
}

#[test]
fn conservation_improves_when_the_grid_and_step_shrink() {
    let mut previous = f64::INFINITY;
    for m in [32, 64, 128] {
        let poly = Polytope::unit(1, m).unwrap();
        let u = ConvexPotential::from_fn(poly, |y| (1.5 * y[0] - 0.4).max(-0.5 * y[0]) + 0.1 * y[0] * y[0]).unwrap();
        let v = ConvexPotential::from_fn(poly, |y| (0.7 - 2.0 * y[0]).max(y[0] - 0.5) + 0.1 * y[0] * y[0]).unwrap();
        let base = XGrid::covering(&[&u, &v]).unwrap();
        let grid = XGrid::new(1, base.r(), 2 * base.n()).unwrap();
        let path = GeodesicPath::new(u, v).unwrap();
        let dev = conservation_check(&path, &[0.25, 0.5, 0.75], poly.h() / 8.0, &grid).unwrap().max_deviation();
        assert!(dev < previous, "m={m}: {dev} after {previous}");
        previous = dev;
    }
}

#[test]
fn truncating_an_affine_potential_is_exact() {
    let poly = Polytope::unit(2, 8).unwrap();
    let u = ConvexPotential::from_fn(poly, |y| 0.3 - y[0] + 2.0 * y[1]).unwrap();
    let t = support_truncation(&u, 1).unwrap();
    assert!(t.values().iter().zip(u.values()).all(|(a, b)| (a - b).abs() <= EXACT));
}

#[test]
fn truncations_of_a_parabola_approach_the_rise() {
    let poly = Polytope::unit(1, 64).unwrap();
    let u = ConvexPotential::from_fn(poly, |y| y[0] * y[0]).unwrap();
    let v = ConvexPotential::from_fn(poly, |y| 0.5 * (y[0] - 0.5).abs()).unwrap();
    let report = monotone_approx(&u, &v, 16).unwrap();
    assert!(report.decay_check(EXACT).passed());
    assert!(report.first_side.windows(2).all(|w| w[1] <= w[0]));
    assert!(report.first_side.last().unwrap() < report.first_side.first().unwrap());
    assert!(monotone_approx(&u, &v, 1).is_err());
}

#[test]
fn contraction_needs_ordered_ends() {
    let poly = Polytope::unit(1, 8).unwrap();
    let u = ConvexPotential::from_fn(poly, |y| y[0]).unwrap();
    let v = ConvexPotential::from_fn(poly, |y| 1.0 - y[0]).unwrap();
    assert!(contraction_check(&u, &v, &u, SLACK).is_err());
    let grid = XGrid::covering(&[&u, &v]).unwrap();
    assert!(flat_compare_strong(&u, &v, &grid, SLACK).is_err());
}
