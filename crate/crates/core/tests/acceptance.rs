//! Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed
//! below. Exits non-zero when any criterion fails.

mod common;

use common::*;
use equiaffine::congruence::*;
use equiaffine::foliation::*;
use equiaffine::rotational::*;
use equiaffine::umbilics::*;
use equiaffine::geometry::{blaschke_volume_residual, verify_iso_identities};
use equiaffine::{parse, parse_with, Domain, Execution, Jet2, Result, SurfaceScene, Var, XiSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

const EXEC: Execution = Execution::Parallel;

const TOL_RECONSTRUCTION: f64 = 1e-10;
const TOL_ISO: f64 = 1e-9;
const TOL_BLASCHKE_VOLUME: f64 = 1e-7;
const TOL_JET_IDENTITY: f64 = 1e-8;
const TOL_P_AT_UMBILIC: f64 = 1e-10;
const TOL_DIRECTIONS: f64 = 1e-8;
const TOL_MU: f64 = 1e-8;
const TOL_RESCALED_TAU: f64 = 1e-8;
const TOL_DEVELOPABILITY: f64 = 1e-6;
const TOL_YPRIME: f64 = 1e-8;
const TOL_CERTIFICATE: f64 = 1e-8;
const TOL_EQUATOR: f64 = 1e-10;
const TOL_FD: f64 = 1e-5;

/// `Ok((passed, detail))`; errors and panics count as failures.
type Outcome = Result<(bool, String)>;

struct Suite {
    failures: usize,
}

impl Suite {
    fn check(&mut self, name: &str, f: impl FnOnce() -> Outcome) {
        let (pass, detail) = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(p) => {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panic: {msg}"))
            }
        };
        if !pass {
            self.failures += 1;
        }
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn mercator_sphere() -> SurfaceScene {
    // 1/cosh v and tanh v
    let f = [
        "2*cos(u)/(exp(v)+exp(-v))",
        "2*sin(u)/(exp(v)+exp(-v))",
        "(exp(v)-exp(-v))/(exp(v)+exp(-v))",
    ];
    let xi = [
        "-2*cos(u)/(exp(v)+exp(-v))",
        "-2*sin(u)/(exp(v)+exp(-v))",
        "-(exp(v)-exp(-v))/(exp(v)+exp(-v))",
    ];
    SurfaceScene::new(uv(f), user(xi), Domain::new([-PI, PI], [-1.5, 1.5]).with_periodic(true, false))
}

fn blaschke_graph() -> SurfaceScene {
    SurfaceScene::new(
        uv(["u", "v", "(u^2+v^2)/2 + 0.1*(u^3-3*u*v^2)"]),
        XiSpec::BlaschkeNormal,
        Domain::new([-0.5, 0.5], [-0.5, 0.5]),
    )
}

fn prolate() -> ProfileCurve {
    profile("sin(s)", "-2*cos(s)", [0.0, PI])
}

fn decomposition_corpus() -> Vec<(&'static str, SurfaceScene)> {
    let perturbed = random_convex_profiles(99, 1).remove(0);
    vec![
        ("sphere/centroaffine", sphere_centro()),
        ("sphere/euclidean", sphere(XiSpec::EuclideanNormal)),
        ("stereographic", stereographic()),
        ("paraboloid", deviator_graph(3, 0.0)),
        ("deviator3", deviator_graph(3, 0.1)),
        ("deviator4", deviator_graph(4, 0.1)),
        ("ellipsoid/euclidean", ellipsoid(XiSpec::EuclideanNormal)),
        ("ellipsoid/blaschke", ellipsoid(XiSpec::BlaschkeNormal)),
        ("prolate/blaschke", prolate().revolution_scene(XiSpec::BlaschkeNormal, 0.1)),
        ("perturbed/blaschke", perturbed.revolution_scene(XiSpec::BlaschkeNormal, 0.1)),
    ]
}

fn interior_points(d: &Domain, n: usize, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            let a: f64 = rng.gen_range(0.02..0.98);
            let b: f64 = rng.gen_range(0.02..0.98);
            (d.u[0] + a * d.width(), d.v[0] + b * d.height())
        })
        .collect()
}

fn decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let corpus = decomposition_corpus();
    let mut worst: (f64, &str) = (0.0, "");
    let mut points = 0;
    for (name, scene) in &corpus {
        for (u, v) in interior_points(&scene.domain, 100, &mut rng) {
            let r = scene.decompose(u, v)?.reconstruction_residual;
            points += 1;
            if !(r <= worst.0) {
                worst = (r, name);
            }
        }
    }
    Ok((
        worst.0 < TOL_RECONSTRUCTION,
        format!("{} scenes, {points} points, max residual {:e} ({}) < {TOL_RECONSTRUCTION:e}", corpus.len(), worst.0, worst.1),
    ))
}

fn iso_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for scene in [stereographic(), mercator_sphere()] {
        for (u, v) in scene.domain.grid(9) {
            worst = worst.max(verify_iso_identities(&scene, u, v)?.max_identity_residual());
            points += 1;
        }
    }
    Ok((worst < TOL_ISO, format!("{points} points, max residual {worst:e} < {TOL_ISO:e}")))
}

fn blaschke_volume() -> Outcome {
    let scenes = [
        ellipsoid(XiSpec::BlaschkeNormal),
        blaschke_graph(),
        prolate().revolution_scene(XiSpec::BlaschkeNormal, 0.1),
        random_convex_profiles(99, 1).remove(0).revolution_scene(XiSpec::BlaschkeNormal, 0.1),
    ];
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for scene in &scenes {
        for (u, v) in scene.domain.grid(9) {
            worst = worst.max(blaschke_volume_residual(scene, u, v)?);
            points += 1;
        }
    }
    Ok((
        worst < TOL_BLASCHKE_VOLUME,
        format!("{points} points, max residual {worst:e} < {TOL_BLASCHKE_VOLUME:e}"),
    ))
}

fn model_winding() -> Outcome {
    let cases: [(&dyn Fn(f64, f64) -> Result<[f64; 2]>, i32); 3] = [
        (&|u, v| Ok([u, v]), 1),
        (&|u, v| Ok([u * u - v * v, 2.0 * u * v]), 2),
        (&|u, v| Ok([u, -v]), -1),
    ];
    let mut got = Vec::new();
    let mut ok = true;
    for (field, expected) in cases {
        for r in [1e-3, 0.1, 1.0] {
            let w = winding_index(&|u, v| field(u, v), [0.0, 0.0], r, 0.0)?;
            ok &= w == expected;
            got.push(w);
        }
    }
    Ok((ok, format!("indices {got:?}, expected +1, +2, -1 at three radii")))
}

fn search() -> SearchOptions {
    SearchOptions { grid: 48, tol: 1e-9, exec: EXEC }
}

fn ellipsoid_census() -> Outcome {
    let census = umbilic_census(&ellipsoid_atlas(), &search(), &ClassifyOptions::default())?;
    let halves = census.umbilics.iter().filter(|u| u.report.foliation_index == Some(0.5)).count();
    Ok((
        census.count == 4 && halves == 4 && census.index_sum == Some(2.0),
        format!("{} umbilics, {halves} of index 1/2, index sum {:?} (expected 4, 4, 2)", census.count, census.index_sum),
    ))
}

fn radius_halving() -> Outcome {
    let scene = ellipsoid(XiSpec::EuclideanNormal);
    let field = |u, v| b_field(&scene, u, v);
    let mut ok = true;
    let mut smallest = 0.1;
    for c in ellipsoid_umbilics() {
        let mut r = 0.1;
        for _ in 0..6 {
            ok &= winding_number(&field, c, r, 0.0)? == 1;
            smallest = r;
            r *= 0.5;
        }
    }
    Ok((ok, format!("B winding +1 at 4 umbilics, radii 0.1 down to {smallest:e}")))
}

fn random_rotation(rng: &mut ChaCha8Rng) -> impl Fn(f64, f64) -> f64 {
    let c: Vec<[f64; 3]> = (0..4)
        .map(|_| [rng.gen_range(-1.5..1.5), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)])
        .collect();
    move |u, v| c.iter().map(|[a, p, q]| a * (p * u + q * v).sin()).sum()
}

fn frame_rotation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let cases: Vec<(SurfaceScene, Vec<[f64; 2]>, i32)> = vec![
        (ellipsoid(XiSpec::EuclideanNormal), ellipsoid_umbilics(), 1),
        (deviator_graph(3, 0.1), vec![[0.0, 0.0]], -1),
        (deviator_graph(4, 0.1), vec![[0.0, 0.0]], -2),
    ];
    let mut ok = true;
    let worst = Cell::new(0.0f64);
    let mut loops = 0;
    for (scene, centers, expected) in &cases {
        for _ in 0..5 {
            let theta = random_rotation(&mut rng);
            let rotated = |u: f64, v: f64| -> Result<[f64; 2]> {
                let (direct, predicted) = rotated_b_field(scene, u, v, theta(u, v))?;
                let size = direct[0].hypot(direct[1]).max(predicted[0].hypot(predicted[1])).max(1e-12);
                let err = (direct[0] - predicted[0]).hypot(direct[1] - predicted[1]) / size;
                worst.set(worst.get().max(err));
                Ok(direct)
            };
            for c in centers {
                ok &= winding_index(&rotated, *c, 0.05, 0.0)? == *expected;
                loops += 1;
            }
        }
    }
    let worst = worst.get();
    ok &= worst <= 1e-8;
    Ok((ok, format!("{loops} loops, indices kept, max rotation law error {worst:e} <= 1e-8")))
}

fn semi_homogeneous_bound() -> Outcome {
    let cases = [
        (ellipsoid(XiSpec::EuclideanNormal), ellipsoid_umbilics()),
        (deviator_graph(3, 0.1), vec![[0.0, 0.0]]),
        (deviator_graph(4, 0.1), vec![[0.0, 0.0]]),
    ];
    let mut checked = 0;
    let mut ok = true;
    let mut largest = f64::NEG_INFINITY;
    for (scene, centers) in &cases {
        for [u, v] in centers {
            let r = classify_umbilic(scene, *u, *v, &ClassifyOptions::default())?;
            if r.tau < 1e-8 && r.semi_homogeneous == Some(true) {
                let index = r.foliation_index.unwrap_or(f64::INFINITY);
                largest = largest.max(index);
                ok &= index <= 1.0 && r.jet_index == r.b_index;
                checked += 1;
            }
        }
    }
    ok &= checked >= 6;
    Ok((ok, format!("{checked} semi-homogeneous umbilics, largest index {largest} <= 1")))
}

fn hessian_bound() -> Outcome {
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
    let mut ok = true;
    let mut got = Vec::new();
    for (src, expected) in cases {
        let w = parse_with(src, &["u", "v"])?;
        let index = hessian_deviator_index(&w, [0.0, 0.0], 0.1)?;
        ok &= index <= 2 && expected.map_or(true, |e| e == index);
        got.push(index);
    }
    Ok((ok, format!("{} functions, indices {got:?} <= 2", cases.len())))
}

fn jet_identities() -> Outcome {
    let mut cases: Vec<(SurfaceScene, [f64; 2], usize)> = ellipsoid_umbilics()
        .into_iter()
        .map(|c| (ellipsoid(XiSpec::EuclideanNormal), c, 1))
        .collect();
    cases.push((deviator_graph(3, 0.1), [0.0, 0.0], 1));
    cases.push((deviator_graph(4, 0.1), [0.0, 0.0], 2));
    let mut ok = true;
    let (mut residual, mut p): (f64, f64) = (0.0, 0.0);
    let mut ks = [0usize; 2];
    for (scene, [u, v], order) in &cases {
        ok &= umbilic_order(scene, *u, *v, 3, LOCATED_ORDER_TOL)?.0 == *order;
        ok &= characterized_order(scene, *u, *v, 3, LOCATED_ORDER_TOL)? == *order;
        for k in 1..=*order {
            let id = jet_identity_check(scene, *u, *v, k, TOL_JET_IDENTITY)?;
            residual = residual.max(id.residual);
            p = p.max(id.p_at_umbilic);
            ks[k - 1] += 1;
        }
    }
    ok &= residual < TOL_JET_IDENTITY && p < TOL_P_AT_UMBILIC && ks[0] > 0 && ks[1] > 0;
    Ok((
        ok,
        format!(
            "k=1 x{}, k=2 x{}, orders agree, residual {residual:e} < {TOL_JET_IDENTITY:e}, P {p:e} < {TOL_P_AT_UMBILIC:e}",
            ks[0], ks[1]
        ),
    ))
}

fn pqr_vs_b() -> Outcome {
    let scenes = [
        ellipsoid(XiSpec::EuclideanNormal),
        ellipsoid(user(["-cos(u)*cos(v)", "-sin(u)*cos(v)/2", "-sin(v)/3"])),
        deviator_graph(3, 0.1),
        deviator_graph(4, 0.1),
        sphere(user(["-cos(u)*cos(v)", "-sin(u)*cos(v)", "-sin(v) + 0.3*cos(u)*cos(v)"])),
    ];
    let mut compared = 0;
    let mut worst: f64 = 0.0;
    for scene in &scenes {
        for (u, v) in scene.domain.grid(12) {
            let c = pqr(scene, u, v)?;
            let b = scene.structure(u, v, 0)?.b_values();
            if let (Some(a), Some(b)) = (pqr_directions(&c, 1e-3), shape_directions(b, 1e-3)) {
                compared += 1;
                worst = worst.max(direction_pair_mismatch(a, b));
            }
        }
    }
    Ok((
        worst < TOL_DIRECTIONS && compared > 200,
        format!("{compared} points, max angle {worst:e} < {TOL_DIRECTIONS:e}"),
    ))
}

fn exponential_rescale() -> Outcome {
    let xi: Vec<String> = NEG_SPHERE.iter().map(|c| format!("exp(u*v)*({c})")).collect();
    let scene = SurfaceScene::new(uv(SPHERE), user([&xi[0], &xi[1], &xi[2]]), Domain::new([-1.0, 1.0], [-1.0, 1.0]));
    let t = tau_exactness(&scene, 12, 1e-8, EXEC)?;
    let b = t.base;
    let dev = t
        .mu
        .iter()
        .map(|[u, v, m]| (m - (u * v - b[0] * b[1])).abs())
        .fold(0.0, f64::max);
    let ok = t.exact && t.max_tau > 0.1 && dev < TOL_MU;
    Ok((ok, format!("exact = {}, mu deviation from uv {dev:e} < {TOL_MU:e}", t.exact)))
}

fn rescaled_tau() -> Outcome {
    let xi: Vec<String> = NEG_SPHERE.iter().map(|c| format!("exp(u*v)*({c})")).collect();
    let scene = SurfaceScene::new(uv(SPHERE), user([&xi[0], &xi[1], &xi[2]]), Domain::new([-1.0, 1.0], [-1.0, 1.0]));
    let t = tau_exactness(&scene, 12, 1e-8, EXEC)?;
    let recovered = Mu::Potential(TauPotential { scene: scene.clone(), base: t.base });
    let r = equiaffine_rescale(&scene, &recovered, 8, EXEC)?;
    let given = equiaffine_rescale(&scene, &Mu::Expr(parse("u*v")?), 8, EXEC)?;
    let worst = r.max_tau.max(given.max_tau);
    Ok((
        worst < TOL_RESCALED_TAU,
        format!("max tau after rescale {worst:e} < {TOL_RESCALED_TAU:e} (integrated and closed-form potential)"),
    ))
}

fn developability() -> Outcome {
    let cases: Vec<(SurfaceScene, Vec<[f64; 2]>, Vec<[f64; 2]>)> = vec![
        (
            ellipsoid(XiSpec::EuclideanNormal),
            ellipsoid_umbilics(),
            vec![[FRAC_PI_2, 0.0], [FRAC_PI_2, 0.4], [-FRAC_PI_2, -0.5], [1.0, 0.2]],
        ),
        (deviator_graph(3, 0.1), vec![[0.0, 0.0]], vec![[0.3, 0.1], [-0.2, 0.25], [0.1, -0.3]]),
        (deviator_graph(4, 0.1), vec![[0.0, 0.0]], vec![[0.3, 0.1], [-0.2, 0.25]]),
    ];
    let mut worst: f64 = 0.0;
    let mut lines = 0;
    for (scene, umbilics, seeds) in &cases {
        let field = DirectionField::new(scene, 1e-12)?;
        let opts = LineOptions {
            max_length: 20.0,
            umbilics: umbilics.clone(),
            ..LineOptions::default()
        };
        for seed in seeds {
            for family in 0..2 {
                let line = integrate_line(&field, *seed, &LineOptions { family, ..opts.clone() })?;
                worst = worst.max(developability_residual(scene, &line.points)?);
                lines += 1;
            }
        }
    }
    Ok((
        worst < TOL_DEVELOPABILITY,
        format!("{lines} curvature lines, max developability residual {worst:e} < {TOL_DEVELOPABILITY:e}"),
    ))
}

fn random_profiles() -> Outcome {
    let profiles = random_convex_profiles(20240611, 24);
    let mut ok = true;
    let (mut yprime, mut cert): (f64, f64) = (0.0, 0.0);
    let mut min_roots = usize::MAX;
    for p in &profiles {
        let r = reparameterize_yprime_eq_x(p)?;
        yprime = yprime.max(r.verify(60)?);
        let rep = umbilical_parallels(&r, 400, 1e-8)?;
        ok &= rep.convex;
        min_roots = min_roots.min(rep.ypp_roots.len());
        for root in &rep.ypp_roots {
            cert = cert.max(root.certificate);
        }
    }
    ok &= yprime < TOL_YPRIME && cert < TOL_CERTIFICATE && min_roots >= 1;
    Ok((
        ok,
        format!(
            "{} profiles, |y'-x| {yprime:e} < {TOL_YPRIME:e}, >= {min_roots} certified roots each, certificate {cert:e} < {TOL_CERTIFICATE:e}",
            profiles.len()
        ),
    ))
}

fn prolate_equator() -> Outcome {
    let r = reparameterize_yprime_eq_x(&prolate())?;
    let rep = umbilical_parallels(&r, 400, 1e-8)?;
    if rep.ypp_roots.len() != 1 {
        return Ok((false, format!("{} roots, expected 1", rep.ypp_roots.len())));
    }
    let root = &rep.ypp_roots[0];
    let dt = (root.t - r.t_of_s(FRAC_PI_2)?).abs();
    let ds = (root.s - FRAC_PI_2).abs();
    Ok((
        dt < TOL_EQUATOR && ds < TOL_EQUATOR,
        format!("single root, |t - t(pi/2)| {dt:e}, |s - pi/2| {ds:e} < {TOL_EQUATOR:e}"),
    ))
}

fn degenerate_profiles() -> Outcome {
    let mut ok = true;
    for p in [profile("sin(s)", "-cos(s)", [0.0, PI]), profile("s", "s^2/2", [0.0, 1.5])] {
        let r = reparameterize_yprime_eq_x(&p)?;
        ok &= umbilical_parallels(&r, 400, 1e-9)?.all_umbilic;
        ok &= umbilic_defect_scan(&p, Normalization::Blaschke, 400, 1e-9)?.all_umbilic;
    }
    Ok((ok, "sphere and paraboloid reported all-umbilic under both normalizations".into()))
}

fn blaschke_parallels_info() {
    let counts: Vec<usize> = random_convex_profiles(20240611, 24)
        .iter()
        .filter_map(|p| umbilic_defect_scan(p, Normalization::Blaschke, 400, 1e-8).ok())
        .map(|s| s.roots.len())
        .collect();
    println!("INFO Blaschke umbilical parallels per random profile: {counts:?}");
}

fn jets_vs_finite_differences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfd);
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for _ in 0..100 {
        let src = random_expr(&mut rng, 4);
        let (u, v): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let e = parse_with(&src, &["u", "v"])?;
        let jet = e.eval_jet(&Jet2::variable(Var::U, u, 3), &Jet2::variable(Var::V, v, 3))?;
        let plain = |a: f64, b: f64| e.eval(&[a, b]).unwrap();
        for d in 0..=3 {
            for j in 0..=d {
                let i = d - j;
                let (fd, _) = fd_partial(&plain, u, v, i, j);
                let exact = jet.coeff(i, j);
                let scale = exact.abs().max(1e-3 * jet.max_abs()).max(1e-10);
                worst = worst.max((exact - fd).abs() / scale);
                compared += 1;
            }
        }
    }
    Ok((worst <= TOL_FD, format!("100 expressions, {compared} partials, max relative error {worst:e} <= {TOL_FD:e}")))
}

fn deterministic_output() -> Outcome {
    let s = ellipsoid(XiSpec::EuclideanNormal);
    let field = DirectionField::new(&s, 1e-12)?;
    let markers: Vec<UmbilicMarker> = ellipsoid_umbilics()
        .into_iter()
        .map(|location| UmbilicMarker { location, index: Some(0.5) })
        .collect();
    let render = |exec| -> Result<String> {
        let opts = PortraitOptions {
            seeds: 3,
            line: LineOptions { max_length: 10.0, ..LineOptions::default() },
            exec,
        };
        Ok(render_svg(&portrait(&field, &markers, &opts)?))
    };
    let svg = [render(EXEC)?, render(EXEC)?, render(Execution::Sequential)?];
    let csv = [dump_csv(&s, 40, EXEC)?, dump_csv(&s, 40, EXEC)?, dump_csv(&s, 40, Execution::Sequential)?];
    let ok = svg.iter().all(|x| *x == svg[0]) && csv.iter().all(|x| *x == csv[0]);
    Ok((
        ok,
        format!("SVG ({} bytes) and CSV ({} bytes) identical across 3 runs", svg[0].len(), csv[0].len()),
    ))
}

fn main() -> ExitCode {
    // panics are reported on the criterion's line
    std::panic::set_hook(Box::new(|_| {}));
    let mut s = Suite { failures: 0 };
    s.check("decomposition reconstruction", decomposition);
    s.check("isothermal identities", iso_identities);
    s.check("Blaschke volume normalization", blaschke_volume);
    s.check("model field winding numbers", model_winding);
    s.check("ellipsoid umbilic census", ellipsoid_census);
    s.check("index stable under radius halving", radius_halving);
    s.check("index invariant under frame rotation", frame_rotation);
    s.check("semi-homogeneous equiaffine index bound", semi_homogeneous_bound);
    s.check("Hessian deviator index bound", hessian_bound);
    s.check("jet identities at umbilics", jet_identities);
    s.check("PQR roots match shape operator", pqr_vs_b);
    s.check("exponential rescale is exact", exponential_rescale);
    s.check("equiaffine rescale removes tau", rescaled_tau);
    s.check("curvature lines are developable", developability);
    s.check("random profiles have certified parallels", random_profiles);
    s.check("prolate spheroid parallel at equator", prolate_equator);
    s.check("degenerate profiles", degenerate_profiles);
    blaschke_parallels_info();
    s.check("jets match finite differences", jets_vs_finite_differences);
    s.check("deterministic SVG and CSV", deterministic_output);
    if s.failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", s.failures);
        ExitCode::FAILURE
    }
}
