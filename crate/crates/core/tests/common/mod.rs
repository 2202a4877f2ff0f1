#![allow(dead_code)]

use equiaffine::rotational::ProfileCurve;
use equiaffine::{parse_with, Domain, SurfaceScene, VectorExpr, XiSpec};
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

pub fn uv(srcs: [&str; 3]) -> VectorExpr {
    VectorExpr::parse(srcs, &["u", "v"]).unwrap()
}

pub fn user(srcs: [&str; 3]) -> XiSpec {
    XiSpec::User(uv(srcs))
}

pub const SPHERE: [&str; 3] = ["cos(u)*cos(v)", "sin(u)*cos(v)", "sin(v)"];
pub const NEG_SPHERE: [&str; 3] = ["-cos(u)*cos(v)", "-sin(u)*cos(v)", "-sin(v)"];

pub fn sphere(xi: XiSpec) -> SurfaceScene {
    SurfaceScene::new(uv(SPHERE), xi, Domain::new([-PI, PI], [-1.2, 1.2]).with_periodic(true, false))
}

pub fn sphere_centro() -> SurfaceScene {
    sphere(user(NEG_SPHERE))
}

pub fn stereographic() -> SurfaceScene {
    let f = [
        "2*u/(u^2+v^2+1)",
        "2*v/(u^2+v^2+1)",
        "(u^2+v^2-1)/(u^2+v^2+1)",
    ];
    let xi = [
        "-2*u/(u^2+v^2+1)",
        "-2*v/(u^2+v^2+1)",
        "-(u^2+v^2-1)/(u^2+v^2+1)",
    ];
    SurfaceScene::new(uv(f), user(xi), Domain::new([-1.5, 1.5], [-1.5, 1.5]))
}

/// Graph `z = (u²+v²)/2 + c Re((u+iv)^m)` with the Euclidean normal.
pub fn deviator_graph(m: u32, c: f64) -> SurfaceScene {
    let re = match m {
        3 => "(u^3-3*u*v^2)",
        4 => "(u^4-6*u^2*v^2+v^4)",
        _ => panic!("unsupported"),
    };
    let z = format!("(u^2+v^2)/2+{c}*{re}");
    SurfaceScene::new(
        uv(["u", "v", &z]),
        XiSpec::EuclideanNormal,
        Domain::new([-0.5, 0.5], [-0.5, 0.5]),
    )
}

pub fn ellipsoid(xi: XiSpec) -> SurfaceScene {
    SurfaceScene::new(
        uv(["cos(u)*cos(v)", "2*sin(u)*cos(v)", "3*sin(v)"]),
        xi,
        Domain::new([-PI, PI], [-1.2, 1.2]).with_periodic(true, false),
    )
}

pub fn ellipsoid_cap(sign: f64) -> SurfaceScene {
    let z = format!("{sign}*3*sqrt(1-u^2-v^2/4)");
    SurfaceScene::new(
        uv(["u", "v", &z]),
        XiSpec::EuclideanNormal,
        Domain::new([-0.5, 0.5], [-1.0, 1.0]),
    )
}

pub fn ellipsoid_atlas() -> Vec<SurfaceScene> {
    vec![ellipsoid(XiSpec::EuclideanNormal), ellipsoid_cap(1.0), ellipsoid_cap(-1.0)]
}

/// Closed-form oracle for the umbilics of the ellipsoid (1, 2, 3) in the
/// geographic chart: `u ∈ {0, π}`, `sin v = ±sqrt(5/8)`.
pub fn ellipsoid_umbilics() -> Vec<[f64; 2]> {
    let v = (5.0f64 / 8.0).sqrt().asin();
    vec![[0.0, -v], [PI, -v], [0.0, v], [PI, v]]
}

/// Random smooth expression in `u, v`, well defined on all of `R²`.
/// Denominators and logarithm arguments are bounded away from zero, and
/// `ln` never sees `1 + tiny` (the plain `f64` value would lose its digits).
pub fn random_expr<R: Rng>(rng: &mut R, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..3) {
            0 => "u".into(),
            1 => "v".into(),
            _ => format!("{:.3}", rng.gen_range(0.1..2.0)),
        };
    }
    let mut sub = || random_expr(rng, depth - 1);
    let (a, b) = (sub(), sub());
    match rng.gen_range(0..11) {
        0 => format!("({a} + {b})"),
        1 => format!("({a} - {b})"),
        2 => format!("({a} * {b})"),
        3 => format!("({a} / (1.5 + cos({b})))"),
        4 => format!("sin({a})"),
        5 => format!("cos({a})"),
        6 => format!("exp(sin({a}))"),
        7 => format!("ln(2 + ({a})^2)"),
        8 => format!("sqrt(1 + ({a})^2)"),
        9 => format!("tan(0.5*sin({a}))"),
        _ => format!("(({a})^2 / (1 + ({b})^2))"),
    }
}

/// Second-order central stencil `(offset, weight)` for the `k`-th derivative
/// with unit spacing.
fn stencil(k: usize) -> &'static [(f64, f64)] {
    match k {
        0 => &[(0.0, 1.0)],
        1 => &[(1.0, 0.5), (-1.0, -0.5)],
        2 => &[(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)],
        3 => &[(2.0, 0.5), (1.0, -1.0), (-1.0, 1.0), (-2.0, -0.5)],
        _ => panic!("order {k}"),
    }
}

/// `∂^{i+j} f / ∂u^i ∂v^j` by finite differences of plain `f64`
/// evaluations: the product stencil at spacing `h` has an error expansion
/// in even powers of `h`, extrapolated to `h → 0` with Ridders' tableau.
/// Returns the estimate and its error estimate.
pub fn fd_partial(f: &dyn Fn(f64, f64) -> f64, u: f64, v: f64, i: usize, j: usize) -> (f64, f64) {
    let quotient = |h: f64| {
        let mut sum = 0.0;
        for &(a, wa) in stencil(i) {
            for &(b, wb) in stencil(j) {
                sum += wa * wb * f(u + a * h, v + b * h);
            }
        }
        sum / h.powi((i + j) as i32)
    };
    if i + j == 0 {
        return (f(u, v), 0.0);
    }
    // several starting steps; keep the best-converged tableau
    [0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625]
        .into_iter()
        .map(|h0| ridders(&quotient, h0))
        .fold((f64::NAN, f64::INFINITY), |best, r| if r.1 < best.1 { r } else { best })
}

fn ridders(quotient: &dyn Fn(f64) -> f64, h0: f64) -> (f64, f64) {
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const N: usize = 12;
    let mut h = h0;
    let mut table = vec![vec![0.0; N]; N];
    table[0][0] = quotient(h);
    let (mut best, mut err) = (table[0][0], f64::INFINITY);
    for n in 1..N {
        h /= CON;
        table[0][n] = quotient(h);
        let mut fac = CON2;
        for m in 1..=n {
            table[m][n] = (table[m - 1][n] * fac - table[m - 1][n - 1]) / (fac - 1.0);
            fac *= CON2;
            let e = (table[m][n] - table[m - 1][n]).abs().max((table[m][n] - table[m - 1][n - 1]).abs());
            if e <= err {
                err = e;
                best = table[m][n];
            }
        }
        if (table[n][n] - table[n - 1][n - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    (best, err)
}

pub fn profile(x: &str, y: &str, range: [f64; 2]) -> ProfileCurve {
    ProfileCurve::new(parse_with(x, &["s"]).unwrap(), parse_with(y, &["s"]).unwrap(), range)
}

/// Perturbed sphere generators, kept only when `x > 0`, `y' > 0` and
/// `[γ', γ''] > 0` on the interior.
pub fn random_convex_profiles(seed: u64, n: usize) -> Vec<ProfileCurve> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let a1: f64 = rng.gen_range(-0.3..0.3);
        let a2: f64 = rng.gen_range(-0.3..0.3);
        let b1: f64 = rng.gen_range(-0.3..0.3);
        let p = profile(
            &format!("sin(s) * (1 + {a1}*cos(s) + {a2}*cos(s)^2)"),
            &format!("-cos(s) + {b1}*sin(s)^2"),
            [0.0, PI],
        );
        if p.convexity(400).unwrap().iter().all(|&w| w > 0.0) {
            out.push(p);
        }
    }
    out
}
