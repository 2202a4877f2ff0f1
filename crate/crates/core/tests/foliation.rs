mod common;

use common::*;
use equiaffine::congruence::developability_residual;
use equiaffine::foliation::*;
use equiaffine::umbilics::{b_field, winding_number};
use equiaffine::{Error, Execution, SurfaceScene, XiSpec};
use std::f64::consts::{FRAC_PI_2, PI};

fn b_winding(scene: &SurfaceScene, c: [f64; 2], r: f64) -> i32 {
    winding_number(&|u, v| b_field(scene, u, v), c, r, 0.0).unwrap()
}

fn blaschke_axis_graph() -> SurfaceScene {
    SurfaceScene::new(
        uv(["u", "v", "(u^2+v^2)/2 + (u^2+v^2)^2/24"]),
        XiSpec::BlaschkeNormal,
        equiaffine::Domain::new([-0.5, 0.5], [-0.5, 0.5]),
    )
}

#[test]
fn sphere_has_no_direction_field() {
    let s = sphere(XiSpec::BlaschkeNormal);
    assert!(matches!(DirectionField::new(&s, 1e-9), Err(Error::AllUmbilic)));
}

#[test]
fn rotation_around_deviator_umbilics_is_half_the_winding() {
    for (m, expected) in [(3, -0.5), (4, -1.0)] {
        let s = deviator_graph(m, 0.1);
        let field = DirectionField::new(&s, 1e-12).unwrap();
        let rot = loop_rotation(&field, [0.0, 0.0], 0.1).unwrap();
        assert_eq!(rot, expected, "m = {m}");
        assert_eq!(2.0 * rot, b_winding(&s, [0.0, 0.0], 0.1) as f64);
    }
}

#[test]
fn rotation_around_ellipsoid_umbilics_is_one_half() {
    let s = ellipsoid(XiSpec::EuclideanNormal);
    let field = DirectionField::new(&s, 1e-12).unwrap();
    for c in ellipsoid_umbilics() {
        let rot = loop_rotation(&field, c, 0.05).unwrap();
        assert_eq!(rot, 0.5, "{c:?}");
        assert_eq!(2.0 * rot, b_winding(&s, c, 0.05) as f64);
    }
    assert_eq!(loop_rotation(&field, [FRAC_PI_2, 0.3], 0.1).unwrap(), 0.0);
}

#[test]
fn blaschke_axis_umbilic_rotation_within_bound() {
    let s = blaschke_axis_graph();
    let field = DirectionField::new(&s, 1e-12).unwrap();
    let rot = loop_rotation(&field, [0.0, 0.0], 0.1).unwrap();
    assert_eq!(2.0 * rot, b_winding(&s, [0.0, 0.0], 0.1) as f64);
    assert!(rot <= 1.0);
    assert_eq!(rot, 1.0);
}

#[test]
fn ellipsoid_lines_close_and_are_developable() {
    let s = ellipsoid(XiSpec::EuclideanNormal);
    let field = DirectionField::new(&s, 1e-12).unwrap();
    let diag = (2.0f64 * 2.0 + 4.0 * 4.0 + 6.0 * 6.0).sqrt();
    let opts = LineOptions {
        closure_tol: 1e-4 * diag,
        max_length: 40.0,
        umbilics: ellipsoid_umbilics(),
        ..LineOptions::default()
    };
    let mut closed = 0;
    for seed in [[FRAC_PI_2, 0.0], [FRAC_PI_2, 0.4], [-FRAC_PI_2, -0.5], [1.0, 0.2]] {
        for family in 0..2 {
            let line = integrate_line(&field, seed, &LineOptions { family, ..opts.clone() }).unwrap();
            if let Termination::Closed { gap } = line.termination {
                assert!(gap < 1e-3 * diag, "{seed:?} {family}: gap {gap}");
                closed += 1;
            }
            let dev = developability_residual(&s, &line.points).unwrap();
            assert!(dev < 1e-6, "{seed:?} {family}: developability {dev}");
        }
    }
    assert!(closed >= 4, "only {closed} closed lines");
}

#[test]
fn families_are_h_orthogonal() {
    for s in [ellipsoid(XiSpec::EuclideanNormal), blaschke_axis_graph(), deviator_graph(3, 0.1)] {
        let field = DirectionField::new(&s, 1e-12).unwrap();
        for (u, v) in s.domain.grid(7) {
            if let Some(c) = h_orthogonality(&field, u, v).unwrap() {
                assert!(c < 1e-8, "({u}, {v}): {c}");
            }
        }
    }
}

#[test]
fn line_stops_near_known_umbilic() {
    let s = deviator_graph(3, 0.1);
    let field = DirectionField::new(&s, 1e-12).unwrap();
    // the separatrix of the u axis runs into the origin
    let opts = LineOptions {
        umbilics: vec![[0.0, 0.0]],
        stop_radius: 0.02,
        ..LineOptions::default()
    };
    let hits = (0..2)
        .flat_map(|family| {
            [false, true].map(|backward| {
                integrate_line(&field, [0.3, 0.0], &LineOptions { family, backward, ..opts.clone() })
                    .unwrap()
                    .termination
            })
        })
        .filter(|t| *t == Termination::NearUmbilic)
        .count();
    assert!(hits >= 1);
    assert!(integrate_line(&field, [0.01, 0.0], &opts).is_err());
}

#[test]
fn csv_has_header_and_one_row_per_node() {
    let s = ellipsoid(XiSpec::EuclideanNormal);
    let csv = dump_csv(&s, 50, Execution::default()).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "u,v,B1,B2");
    assert_eq!(lines.len(), 2501);
    assert!(!csv.contains('\r'));
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 4 && l.split(',').all(|x| x.parse::<f64>().is_ok())));
}

#[test]
fn portrait_is_deterministic() {
    let s = ellipsoid(XiSpec::EuclideanNormal);
    let field = DirectionField::new(&s, 1e-12).unwrap();
    let markers: Vec<UmbilicMarker> = ellipsoid_umbilics()
        .into_iter()
        .map(|location| UmbilicMarker { location, index: Some(0.5) })
        .collect();
    let render = |exec| {
        let opts = PortraitOptions {
            seeds: 3,
            line: LineOptions { max_length: 10.0, ..LineOptions::default() },
            exec,
        };
        render_svg(&portrait(&field, &markers, &opts).unwrap())
    };
    let a = render(Execution::Parallel);
    let b = render(Execution::Parallel);
    let c = render(Execution::Sequential);
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(a.contains(r#"class="family0""#) && a.contains(r#"class="family1""#));
    assert_eq!(a.matches("<circle").count(), 4);
    assert_eq!(a.matches(">+1/2</text>").count(), 4);
    let _ = PI;
}
