//! Grid-level invariants of the classifiers and the verification reports.

use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;
use semidyn_core::classify::{
    backward_orbit_sample, classify_fatou_julia, escaping_grid, escaping_grid_with, fatou_julia_grid,
    fatou_julia_grid_with, julia_grid_union, ClassifyParams, GridRegion, Label,
};
use semidyn_core::exec::Exec;
use semidyn_core::map::{HolomorphicMap, Sign};
use semidyn_core::semigroup::Semigroup;
use semidyn_core::verify::{verify_containments, verify_known_example, CONTAINMENT_SLACK};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn annulus() -> Semigroup {
    Semigroup::new(
        "annulus",
        vec![
            HolomorphicMap::monomial(c(1.0, 0.0), 2).unwrap(),
            HolomorphicMap::monomial(c(0.5, 0.0), 2).unwrap(),
        ],
    )
    .unwrap()
}

fn exp_pair(lambda: f64) -> Semigroup {
    let zero = c(0.0, 0.0);
    let shift = c(0.0, std::f64::consts::TAU / lambda);
    Semigroup::new(
        "exp pair",
        vec![
            HolomorphicMap::exp(c(lambda, 0.0)).unwrap(),
            HolomorphicMap::exp_affine(Sign::Plus, c(lambda, 0.0), zero, shift).unwrap(),
        ],
    )
    .unwrap()
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn grids_do_not_depend_on_worker_count() {
    let p = ClassifyParams::default();
    let s = annulus();
    let region = GridRegion::square(3.0, 48).unwrap();
    let reference = fatou_julia_grid_with(&s, &region, &p, Exec::Sequential).unwrap();
    for threads in [1, 2, 4] {
        let g = in_pool(threads, || fatou_julia_grid_with(&s, &region, &p, Exec::Parallel).unwrap());
        assert_eq!(g, reference, "{threads} threads");
    }
    let e = exp_pair(0.3);
    let region = GridRegion::new(c(0.0, -12.0), c(24.0, 12.0), 48, 48).unwrap();
    let reference = escaping_grid_with(&e, &region, &p, Exec::Sequential).unwrap();
    for threads in [1, 3] {
        let g = in_pool(threads, || escaping_grid_with(&e, &region, &p, Exec::Parallel).unwrap());
        assert_eq!(g, reference, "{threads} threads");
    }
}

/// Doubling the escape radius barely moves the annulus verdicts.
#[test]
fn escape_radius_stability() {
    let s = annulus();
    let region = GridRegion::square(3.0, 512).unwrap();
    let p = ClassifyParams::default();
    let doubled = ClassifyParams {
        escape_radius: 2.0 * p.escape_radius,
        ..p
    };
    let a = fatou_julia_grid(&s, &region, &p).unwrap();
    let b = fatou_julia_grid(&s, &region, &doubled).unwrap();
    let changed = a.verdicts.iter().zip(&b.verdicts).filter(|(x, y)| x != y).count();
    let rate = changed as f64 / region.len() as f64;
    assert!(rate < 0.001, "{changed} verdicts changed ({rate})");
}

/// Every backward-orbit point lies in the closed annulus `1 ≤ |z| ≤ 2`
/// inflated by one pixel of the 512² example grid.
#[test]
fn annulus_backward_orbit_stays_in_the_julia_set() {
    let s = annulus();
    let pixel = GridRegion::square(3.0, 512).unwrap().pixel_size();
    let cloud = backward_orbit_sample(&s, c(1.5, 0.5), 20_000, 30, &ClassifyParams::default()).unwrap();
    assert_eq!(cloud.points.len(), 20_000);
    for z in &cloud.points {
        let r = z.norm();
        assert!((1.0 - pixel..=2.0 + pixel).contains(&r), "|{z}| = {r}");
    }
    // The walk reaches both boundary circles, not just one of them.
    assert!(cloud.points.iter().any(|z| z.norm() < 1.05));
    assert!(cloud.points.iter().any(|z| z.norm() > 1.95));
}

/// The cyclic semigroup of `z²` behaves like the map itself: the unit disc
/// and its exterior are Fatou, the unit circle is Julia.
#[test]
fn cyclic_square_reduces_to_the_map() {
    let s = Semigroup::cyclic("z^2", HolomorphicMap::monomial(c(1.0, 0.0), 2).unwrap()).unwrap();
    let p = ClassifyParams::default();
    for z in [c(0.0, 0.0), c(0.5, 0.3), c(-0.2, -0.7), c(1.5, 0.0), c(0.0, -3.0)] {
        assert_eq!(classify_fatou_julia(&s, z, &p).unwrap().label, Label::FatouLike, "{z}");
    }
    for t in [0.0, 0.7, 2.0, 4.1] {
        let z = Complex64::from_polar(1.0, t);
        assert_eq!(classify_fatou_julia(&s, z, &p).unwrap().label, Label::JuliaLike, "{z}");
    }
}

#[test]
fn union_estimator_grows_with_word_length() {
    let s = annulus();
    let region = GridRegion::square(3.0, 64).unwrap();
    let mut previous = vec![false; region.len()];
    for len in 1..=4 {
        let p = ClassifyParams {
            max_word_len: len,
            ..Default::default()
        };
        let mask = julia_grid_union(&s, &region, &p).unwrap().mask(Label::JuliaLike);
        assert!(previous.iter().zip(&mask).all(|(a, b)| !*a || *b), "length {len} lost pixels");
        previous = mask;
    }
}

#[test]
fn reports_are_reproducible() {
    let overrides: BTreeMap<String, String> = [("size".to_string(), "64".to_string())].into();
    for id in ["annulus", "perfectness-proxy", "empty-escaping", "circle-radii"] {
        let o = if id == "annulus" || id == "perfectness-proxy" {
            overrides.clone()
        } else {
            BTreeMap::new()
        };
        let a = verify_known_example(id, &o).unwrap();
        let b = verify_known_example(id, &o).unwrap();
        assert_eq!(a, b, "{id}");
        assert_eq!(a.to_string(), b.to_string());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.passed, a.evaluate());
    }
}

fn exp_generator() -> impl Strategy<Value = HolomorphicMap> {
    (0.1..1.0f64, -0.5..0.5f64, -1.0..1.0f64, -3.0..3.0f64, any::<bool>()).prop_map(|(l, li, g, k, plus)| {
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        HolomorphicMap::exp_affine(sign, c(l, li), c(g, 0.0), c(0.0, k)).unwrap()
    })
}

fn quadratic() -> impl Strategy<Value = HolomorphicMap> {
    (0.3..1.5f64, -0.5..0.5f64, -0.5..0.5f64).prop_map(|(a, cr, ci)| {
        HolomorphicMap::polynomial(vec![c(cr, ci), c(0.0, 0.0), c(a, 0.0)]).unwrap()
    })
}

fn generators() -> impl Strategy<Value = Vec<HolomorphicMap>> {
    prop_oneof![
        proptest::collection::vec(quadratic(), 1..=2),
        proptest::collection::vec(exp_generator(), 1..=2),
    ]
}

fn mask_violations(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).filter(|(x, y)| **x && !**y).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Containments hold on random semigroups, and each report agrees with
    /// violations recounted from independently computed grids.
    #[test]
    fn containment_reports_are_consistent(gens in generators()) {
        let s = Semigroup::new("S", gens).unwrap();
        let region = GridRegion::square(2.5, 16).unwrap();
        let p = ClassifyParams { max_word_len: 3, n_sequences: 8, depth: 40, ..Default::default() };
        let r = verify_containments(&s, &region, &p).unwrap();
        let n = region.len() as f64;
        let fj = fatou_julia_grid(&s, &region, &p).unwrap();
        let esc = escaping_grid(&s, &region, &p).ok();
        let mut within = true;
        for (i, f) in s.cyclic_subsemigroups().iter().enumerate() {
            let g = fatou_julia_grid(f, &region, &p).unwrap();
            let fatou = mask_violations(&fj.mask(Label::FatouLike), &g.mask(Label::FatouLike));
            let julia = mask_violations(&g.mask(Label::JuliaLike), &fj.mask(Label::JuliaLike));
            prop_assert_eq!(r.metrics[&format!("fatou_violations_{i}")], fatou as f64);
            prop_assert_eq!(r.metrics[&format!("julia_violations_{i}")], julia as f64);
            within &= fatou as f64 / n <= CONTAINMENT_SLACK && julia as f64 / n <= CONTAINMENT_SLACK;
            if let Some(esc) = &esc {
                let e = escaping_grid(f, &region, &p).unwrap();
                let v = mask_violations(&esc.mask(Label::Escaping), &e.mask(Label::Escaping));
                prop_assert_eq!(r.metrics[&format!("escaping_violations_{i}")], v as f64);
                within &= v as f64 / n <= CONTAINMENT_SLACK;
            }
        }
        prop_assert_eq!(r.passed, within);
        prop_assert!(r.passed, "{}", r);
    }
}
