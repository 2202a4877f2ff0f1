mod common;

use common::*;
use equiaffine::umbilics::*;
use equiaffine::{parse_with, Execution, Result, SurfaceScene, XiSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn search() -> SearchOptions {
    SearchOptions {
        grid: 48,
        tol: 1e-9,
        exec: Execution::Parallel,
    }
}

#[test]
fn model_fields_have_exact_winding() {
    let cases: [(&dyn Fn(f64, f64) -> Result<[f64; 2]>, i32); 3] = [
        (&|u, v| Ok([u, v]), 1),
        (&|u, v| Ok([u * u - v * v, 2.0 * u * v]), 2),
        (&|u, v| Ok([u, -v]), -1),
    ];
    for (field, expected) in cases {
        for r in [1e-3, 0.1, 1.0] {
            assert_eq!(winding_index(&|u, v| field(u, v), [0.0, 0.0], r, 0.0).unwrap(), expected);
        }
    }
}

#[test]
fn ellipsoid_chart_umbilics_match_closed_form() {
    let scene = ellipsoid(XiSpec::EuclideanNormal);
    let found = find_umbilics(&scene, &search()).unwrap();
    assert!(!found.all_umbilic);
    assert!(found.regions.is_empty() && found.unresolved.is_empty());
    let oracle = ellipsoid_umbilics();
    assert_eq!(found.points.len(), oracle.len(), "{:?}", found.points);
    for o in &oracle {
        let best = found
            .points
            .iter()
            .map(|p| param_distance(&scene.domain, p.location, *o))
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-9, "{o:?}: {best}");
    }
}

#[test]
fn ellipsoid_census_satisfies_poincare_hopf() {
    let census = umbilic_census(&ellipsoid_atlas(), &search(), &ClassifyOptions::default()).unwrap();
    assert_eq!(census.count, 4);
    assert_eq!(census.index_sum, Some(2.0));
    for u in &census.umbilics {
        assert_eq!(u.report.foliation_index, Some(0.5));
        assert_eq!(u.report.b_index, Some(1));
    }
}

#[test]
fn ellipsoid_indices_are_stable_under_radius_halving() {
    let scene = ellipsoid(XiSpec::EuclideanNormal);
    let field = |u, v| b_field(&scene, u, v);
    for c in ellipsoid_umbilics() {
        let mut r = 0.1;
        for _ in 0..6 {
            assert_eq!(winding_number(&field, c, r, 0.0).unwrap(), 1, "{c:?} r = {r}");
            r *= 0.5;
        }
    }
}

/// Random smooth frame rotation `θ(u, v)`: a few low-frequency modes.
fn random_rotation(rng: &mut ChaCha8Rng) -> impl Fn(f64, f64) -> f64 {
    let c: Vec<[f64; 3]> = (0..4)
        .map(|_| [rng.gen_range(-1.5..1.5), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)])
        .collect();
    move |u, v| c.iter().map(|[a, p, q]| a * (p * u + q * v).sin()).sum()
}

#[test]
fn indices_survive_random_frame_rotations() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let cases: Vec<(SurfaceScene, Vec<[f64; 2]>, i32)> = vec![
        (ellipsoid(XiSpec::EuclideanNormal), ellipsoid_umbilics(), 1),
        (deviator_graph(3, 0.1), vec![[0.0, 0.0]], -1),
        (deviator_graph(4, 0.1), vec![[0.0, 0.0]], -2),
    ];
    for (scene, centers, expected) in &cases {
        for _ in 0..5 {
            let theta = random_rotation(&mut rng);
            let rotated = |u: f64, v: f64| -> Result<[f64; 2]> {
                let (direct, predicted) = rotated_b_field(scene, u, v, theta(u, v))?;
                let size = direct[0].hypot(direct[1]).max(predicted[0].hypot(predicted[1]));
                let err = (direct[0] - predicted[0]).hypot(direct[1] - predicted[1]);
                assert!(err <= 1e-8 * size.max(1e-12), "{err} at ({u}, {v})");
                Ok(direct)
            };
            for c in centers {
                assert_eq!(winding_index(&rotated, *c, 0.05, 0.0).unwrap(), *expected);
            }
        }
    }
}

#[test]
fn jet_identities_at_corpus_umbilics() {
    let mut cases: Vec<(SurfaceScene, [f64; 2], usize)> = ellipsoid_umbilics()
        .into_iter()
        .map(|c| (ellipsoid(XiSpec::EuclideanNormal), c, 1))
        .collect();
    cases.push((deviator_graph(3, 0.1), [0.0, 0.0], 1));
    cases.push((deviator_graph(4, 0.1), [0.0, 0.0], 2));
    for (scene, [u, v], order) in &cases {
        assert_eq!(umbilic_order(scene, *u, *v, 3, LOCATED_ORDER_TOL).unwrap().0, *order);
        assert_eq!(characterized_order(scene, *u, *v, 3, LOCATED_ORDER_TOL).unwrap(), *order);
        for k in 1..=*order {
            let id = jet_identity_check(scene, *u, *v, k, 1e-8).unwrap();
            assert!(id.residual < 1e-8, "k = {k}: {}", id.residual);
            assert!(id.p_at_umbilic < 1e-10, "{}", id.p_at_umbilic);
        }
    }
}

#[test]
fn semi_homogeneous_equiaffine_umbilics_have_index_at_most_one() {
    let cases = [
        (ellipsoid(XiSpec::EuclideanNormal), ellipsoid_umbilics()),
        (deviator_graph(3, 0.1), vec![[0.0, 0.0]]),
        (deviator_graph(4, 0.1), vec![[0.0, 0.0]]),
    ];
    let mut checked = 0;
    for (scene, centers) in &cases {
        for [u, v] in centers {
            let r = classify_umbilic(scene, *u, *v, &ClassifyOptions::default()).unwrap();
            assert!(r.tau < 1e-8);
            if r.semi_homogeneous == Some(true) {
                assert!(r.foliation_index.unwrap() <= 1.0, "{r:?}");
                assert_eq!(r.jet_index, r.b_index);
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 6);
}

#[test]
fn hessian_deviator_indices_are_at_most_two() {
    // (w, index): harmonic Re/Im z^m give 2 - m
    let cases = [
        ("u^3 - 3*u*v^2", Some(-1)),
        ("3*u^2*v - v^3", Some(-1)),
        ("u^4 - 6*u^2*v^2 + v^4", Some(-2)),
        ("u^5 - 10*u^3*v^2 + 5*u*v^4", Some(-3)),
        ("(u^2 + v^2)^2", Some(2)),
        ("u^2*v^2", Some(-2)),
        ("(u^2 + v^2)^2 + 0.3*(u^4 - 6*u^2*v^2 + v^4)", None),
        ("exp(u)*cos(v)", None),
    ];
    for (src, expected) in cases {
        let w = parse_with(src, &["u", "v"]).unwrap();
        let index = hessian_deviator_index(&w, [0.0, 0.0], 0.1).unwrap();
        assert!(index <= 2, "{src}: {index}");
        if let Some(e) = expected {
            assert_eq!(index, e, "{src}");
        }
    }
}
