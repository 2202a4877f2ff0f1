//! Surfaces of revolution `ψ(t, θ) = (x(t) cos θ, x(t) sin θ, y(t))` with a
//! rotationally symmetric equiaffine normal.
//!
//! The co-normal is `ν = (x/φ)(-y' cos θ, -y' sin θ, x')` and the normal is
//! `ξ = (a cos θ, a sin θ, b)`, where
//!
//! ```text
//! -a y'  + b x'  = φ/x
//! -a y'' + b x'' = -(φ/x)² (x/φ)'
//! ```
//!
//! Parallels and meridians are curvature lines, and a parallel is umbilical
//! iff `a/x = b'/y'`.
//!
//! Two choices of `φ` are supported. [`Normalization::Blaschke`] takes
//! `φ⁴ = x³ y' [γ', γ'']` and gives the Blaschke normal in any
//! parameterization. [`Normalization::UnitCurvature`] takes `φ⁴ = x³ y'`,
//! which coincides with the Blaschke normal only where `[γ', γ''] = 1`. In
//! the `y' = x` parameterization the latter has `φ/x = 1`,
//! `ξ = (x'', y'')/Δ` with `Δ = (y'')² - y' y'''`, and umbilic condition
//! `Δ' y'' = 0`, so every root of `y''` is an umbilical parallel of that
//! field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{BinOp, Expr, VectorExpr};
use crate::geometry::{Domain, SurfaceScene, XiSpec};
use crate::jets::{ElementaryFn, Jet1};
use crate::quadrature;
use crate::umbilics::{b_field_sample, umbilic_order, ORDER_TOL};

/// Generator arc `(x(t), y(t))`, `t ∈ range`, as expressions in one
/// parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub x: Expr,
    pub y: Expr,
    pub range: [f64; 2],
}

/// Anything that yields jets of `(x, y)` in its own parameter.
pub trait ProfileJets {
    fn jets(&self, t: f64, order: usize) -> Result<(Jet1, Jet1)>;
    fn range(&self) -> [f64; 2];
}

impl ProfileJets for ProfileCurve {
    fn jets(&self, t: f64, order: usize) -> Result<(Jet1, Jet1)> {
        let var = [Jet1::variable(t, order)];
        Ok((self.x.eval(&var)?, self.y.eval(&var)?))
    }

    fn range(&self) -> [f64; 2] {
        self.range
    }
}

fn interior(range: [f64; 2], margin: f64, n: usize) -> Vec<f64> {
    let [t0, t1] = range;
    let m = margin * (t1 - t0);
    (0..n)
        .map(|k| t0 + m + (t1 - t0 - 2.0 * m) * k as f64 / (n - 1) as f64)
        .collect()
}

impl ProfileCurve {
    pub fn new(x: Expr, y: Expr, range: [f64; 2]) -> Self {
        ProfileCurve { x, y, range }
    }

    /// Smallest values of `x`, `y'` and `[γ', γ'']` over `samples` interior
    /// points (a relative margin of `1e-3` is excluded at each end). All
    /// three must be positive for a valid convex profile.
    pub fn convexity(&self, samples: usize) -> Result<[f64; 3]> {
        let mut worst = [f64::INFINITY; 3];
        for t in interior(self.range, 1e-3, samples) {
            let (x, y) = self.jets(t, 2)?;
            worst[0] = worst[0].min(x.value());
            worst[1] = worst[1].min(y.deriv(1));
            worst[2] = worst[2].min(x.deriv(1) * y.deriv(2) - x.deriv(2) * y.deriv(1));
        }
        Ok(worst)
    }

    /// The surface of revolution as a scene in `(u, v) = (θ, t)`, with the
    /// given margin removed from both ends of the profile range.
    pub fn revolution_scene(&self, xi: XiSpec, margin: f64) -> SurfaceScene {
        let theta = Expr::var(0, "u");
        let t = Expr::var(1, "v");
        let x = self.x.substitute(std::slice::from_ref(&t));
        let y = self.y.substitute(&[t]);
        let f = VectorExpr {
            components: [
                Expr::binary(BinOp::Mul, x.clone(), Expr::call(ElementaryFn::Cos, theta.clone())),
                Expr::binary(BinOp::Mul, x, Expr::call(ElementaryFn::Sin, theta)),
                y,
            ],
            params: vec!["u".into(), "v".into()],
        };
        let d = Domain::new(
            [-std::f64::consts::PI, std::f64::consts::PI],
            [self.range[0] + margin, self.range[1] - margin],
        )
        .with_periodic(true, false);
        SurfaceScene::new(f, xi, d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `φ⁴ = x³ y' [γ', γ'']`.
    #[default]
    Blaschke,
    /// `φ⁴ = x³ y'`.
    UnitCurvature,
}

/// Normal data of a surface of revolution along the meridian `θ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationalBlaschke {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub phi: f64,
    /// `[γ', γ''] = x' y'' - x'' y'`.
    pub curvature: f64,
    /// Induced metric `ν · ψ_tt = x [γ', γ''] / φ`.
    pub h11: f64,
    /// Induced metric `ν · ψ_θθ = x² y' / φ`.
    pub h22: f64,
    pub nu: [f64; 3],
    pub a: f64,
    pub b: f64,
    /// `b'(t)` by jet differentiation of the solved system.
    pub b_prime: f64,
    /// `a/x - b'/y'`; zero exactly on umbilical parallels.
    pub umbilic_defect: f64,
}

impl RotationalBlaschke {
    /// Transversal vector at `(t, θ)`.
    pub fn xi(&self, theta: f64) -> [f64; 3] {
        [self.a * theta.cos(), self.a * theta.sin(), self.b]
    }
}

pub fn rotational_blaschke<P: ProfileJets + ?Sized>(
    profile: &P,
    t: f64,
    normalization: Normalization,
) -> Result<RotationalBlaschke> {
    let (x, y) = profile.jets(t, 4)?;
    let xp = x.derivative();
    let yp = y.derivative();
    let xpp = xp.derivative();
    let ypp = yp.derivative();
    let det = &(&xp * &ypp) - &(&xpp * &yp);
    let scale = xp.value().abs() * ypp.value().abs() + yp.value().abs() * xpp.value().abs();
    if !(det.value().abs() > 1e-14 * scale.max(1e-300)) {
        return Err(Error::SingularSystem { t });
    }
    let base = &(&(&x * &x) * &x) * &yp;
    let phi4 = match normalization {
        Normalization::Blaschke => &base * &det,
        Normalization::UnitCurvature => base,
    };
    if !(phi4.value() > 0.0) {
        return Err(Error::PreconditionFailed(format!(
            "φ⁴ = {} is not positive at t = {t}",
            phi4.value()
        )));
    }
    let phi = phi4.pow_const(0.25)?;
    let g = phi.checked_div(&x)?;
    let inv_g = x.checked_div(&phi)?;
    let rhs2 = -(&(&g * &g) * &inv_g.derivative());
    // [[-y', x'], [-y'', x'']] (a, b) = (g, rhs2)
    let a = (&(&g * &xpp) - &(&xp * &rhs2)).checked_div(&det)?;
    let b = (&(&ypp * &g) - &(&yp * &rhs2)).checked_div(&det)?;
    let k = x.value() / phi.value();
    Ok(RotationalBlaschke {
        t,
        x: x.value(),
        y: y.value(),
        phi: phi.value(),
        curvature: det.value(),
        h11: k * det.value(),
        h22: x.value() * x.value() * yp.value() / phi.value(),
        nu: [-k * yp.value(), 0.0, k * xp.value()],
        a: a.value(),
        b: b.value(),
        b_prime: b.deriv(1),
        umbilic_defect: a.value() / x.value() - b.deriv(1) / yp.value(),
    })
}

/// A profile reparameterized by `t(s) = ∫ y'(s)/x(s) ds` so that
/// `dy/dt = x`.
#[derive(Debug, Clone)]
pub struct Reparameterized {
    pub original: ProfileCurve,
    /// Nodes `(s_i, t_i)` of the cumulative integral.
    nodes: Vec<(f64, f64)>,
}

const REPARAM_NODES: usize = 128;
const REPARAM_TOL: f64 = 1e-12;

fn integrate_checked<F: Fn(f64) -> Result<f64>>(f: F, a: f64, b: f64) -> Result<f64> {
    let mut err = None;
    let v = quadrature::integrate(
        |r| {
            f(r).unwrap_or_else(|e| {
                err.get_or_insert(e);
                f64::NAN
            })
        },
        a,
        b,
        REPARAM_TOL,
    );
    match err {
        Some(e) => Err(e),
        None => v,
    }
}

impl Reparameterized {
    fn speed(&self, s: f64) -> Result<f64> {
        let (x, y) = self.original.jets(s, 1)?;
        Ok(y.deriv(1) / x.value())
    }

    /// `t(s)`.
    pub fn t_of_s(&self, s: f64) -> Result<f64> {
        let i = match self.nodes.binary_search_by(|n| n.0.total_cmp(&s)) {
            Ok(i) => return Ok(self.nodes[i].1),
            Err(i) => i.clamp(1, self.nodes.len() - 1) - 1,
        };
        let (si, ti) = self.nodes[i];
        Ok(ti + integrate_checked(|r| self.speed(r), si, s)?)
    }

    /// `s(t)` by safeguarded Newton on `t(s)`.
    pub fn s_of_t(&self, t: f64) -> Result<f64> {
        let k = self.nodes.partition_point(|n| n.1 < t).clamp(1, self.nodes.len() - 1);
        let (mut lo, mut hi) = (self.nodes[k - 1].0, self.nodes[k].0);
        let mut s = 0.5 * (lo + hi);
        for _ in 0..100 {
            let r = self.t_of_s(s)? - t;
            if r.abs() < 1e-15 * (1.0 + t.abs()) {
                break;
            }
            if r > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let next = s - r / self.speed(s)?;
            s = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-15 * (1.0 + s.abs()) {
                break;
            }
        }
        Ok(s)
    }

    /// Jet of `s(t)` by Picard iteration on `s' = x(s) / y_s(s)`; each pass
    /// fixes one more derivative.
    pub fn s_jet(&self, t: f64, order: usize) -> Result<Jet1> {
        let s0 = self.s_of_t(t)?;
        let ys = self.original.y.eval(&[Jet1::variable(s0, order + 1)])?.derivative();
        let mut s = Jet1::constant(s0, 0);
        for _ in 0..order {
            let x = self.original.x.eval(std::slice::from_ref(&s))?;
            s = x.checked_div(&s.compose(&ys))?.integral(s0);
        }
        Ok(s)
    }

    /// `max |dy/dt - x|` over `samples` interior points, with `dy/dt` from
    /// five-point differences of `y(s(t))` (independent of the jets).
    pub fn verify(&self, samples: usize) -> Result<f64> {
        let [t0, t1] = self.range();
        let h = 1e-3 * (t1 - t0);
        let y_at = |t: f64| -> Result<f64> { Ok(self.original.y.eval(&[self.s_of_t(t)?])?) };
        let mut worst: f64 = 0.0;
        for t in interior([t0, t1], 1e-2, samples) {
            let d = (-y_at(t + 2.0 * h)? + 8.0 * y_at(t + h)? - 8.0 * y_at(t - h)? + y_at(t - 2.0 * h)?)
                / (12.0 * h);
            let x = self.original.x.eval(&[self.s_of_t(t)?])?;
            worst = worst.max((d - x).abs());
        }
        Ok(worst)
    }
}

impl ProfileJets for Reparameterized {
    fn jets(&self, t: f64, order: usize) -> Result<(Jet1, Jet1)> {
        let s = self.s_jet(t, order)?;
        Ok((self.original.x.eval(std::slice::from_ref(&s))?, self.original.y.eval(&[s])?))
    }

    fn range(&self) -> [f64; 2] {
        [self.nodes[0].1, self.nodes[self.nodes.len() - 1].1]
    }
}

/// Builds the `y' = x` parameterization, with `t = 0` at the start of the
/// profile range.
pub fn reparameterize_yprime_eq_x(profile: &ProfileCurve) -> Result<Reparameterized> {
    let [s0, s1] = profile.range;
    let mut r = Reparameterized {
        original: profile.clone(),
        nodes: vec![(s0, 0.0)],
    };
    let mut t = 0.0;
    for k in 1..=REPARAM_NODES {
        let (a, b) = (r.nodes[k - 1].0, s0 + (s1 - s0) * k as f64 / REPARAM_NODES as f64);
        t += integrate_checked(|s| r.speed(s), a, b)?;
        r.nodes.push((b, t));
    }
    Ok(r)
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a)?;
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Sign changes of `f` on the sample points, each bisected to `tol`.
fn sign_change_roots<F: Fn(f64) -> Result<f64>>(f: &F, ts: &[f64], values: &[f64], tol: f64) -> Result<Vec<f64>> {
    let mut roots = Vec::new();
    for k in 1..ts.len() {
        if (values[k - 1] > 0.0) != (values[k] > 0.0) {
            roots.push(bisect(f, ts[k - 1], ts[k], tol)?);
        }
    }
    Ok(roots)
}

/// Zeros of the umbilic defect `a/x - b'/y'` along a profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectScan {
    pub normalization: Normalization,
    /// `|a/x - b'/y'| <= tol · scale` at every sample, where the scale is
    /// `max |a/x|` floored by `max |(a, b)|` over the extent of the arc.
    pub all_umbilic: bool,
    /// Parameter values of the umbilical parallels (sign changes of the
    /// defect, bisected to `1e-12`).
    pub roots: Vec<f64>,
    pub max_defect: f64,
}

/// Scans `a/x - b'/y'` on `scan` interior points of any profile. The zero
/// set does not depend on the parameterization.
pub fn umbilic_defect_scan<P: ProfileJets + ?Sized>(
    profile: &P,
    normalization: Normalization,
    scan: usize,
    tol: f64,
) -> Result<DefectScan> {
    let ts = interior(profile.range(), 1e-3, scan);
    let f = |t: f64| Ok(rotational_blaschke(profile, t, normalization)?.umbilic_defect);
    let mut values = Vec::with_capacity(scan);
    let mut scale: f64 = 0.0;
    let mut xi_max: f64 = 0.0;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for &t in &ts {
        let r = rotational_blaschke(profile, t, normalization)?;
        scale = scale.max((r.a / r.x).abs());
        xi_max = xi_max.max(r.a.hypot(r.b));
        for (k, c) in [r.x, r.y].into_iter().enumerate() {
            lo[k] = lo[k].min(c);
            hi[k] = hi[k].max(c);
        }
        values.push(r.umbilic_defect);
    }
    // a constant field (a = 0, b' = 0) still needs a round-off scale
    let extent = (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
    if extent > 0.0 {
        scale = scale.max(xi_max / extent);
    }
    let max_defect = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let all_umbilic = max_defect <= tol * scale;
    let roots = if all_umbilic {
        Vec::new()
    } else {
        sign_change_roots(&f, &ts, &values, 1e-12)?
    };
    Ok(DefectScan {
        normalization,
        all_umbilic,
        roots,
        max_defect,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParallelRoot {
    pub t: f64,
    /// Original profile parameter.
    pub s: f64,
    /// `|a/x - b'/y'|` from the general system with `φ⁴ = x³ y'`.
    pub certificate: f64,
    /// `|a - b'|` from the closed form `ξ = (x'', y'')/Δ`.
    pub closed_form_defect: f64,
    /// `|a/x - b'/y'|` for the Blaschke normal at the same parallel.
    pub blaschke_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParallelReport {
    /// `Δ > 0` at every scan point.
    pub convex: bool,
    /// `Δ' y''` vanishes on the whole profile: every parallel is umbilical.
    pub all_umbilic: bool,
    /// Roots of `y''` (umbilical for `φ⁴ = x³ y'`).
    pub ypp_roots: Vec<ParallelRoot>,
    /// Roots of `Δ'` (the other factor of the umbilic condition).
    pub delta_prime_roots: Vec<f64>,
    /// Largest difference between the closed form `(x'', y'')/Δ` and the
    /// general solve, over the scan.
    pub closed_form_residual: f64,
    /// Largest `|φ/x - 1|` over the scan.
    pub g_residual: f64,
    /// Umbilical parallels of the Blaschke normal, in `t` (convex profiles
    /// only).
    pub blaschke: Option<DefectScan>,
}

struct ClosedForm {
    ypp: f64,
    delta: f64,
    delta_prime: f64,
    a: f64,
    b: f64,
    b_prime: f64,
}

fn closed_form(profile: &Reparameterized, t: f64) -> Result<ClosedForm> {
    let (x, y) = profile.jets(t, 4)?;
    let y1 = y.derivative();
    let y2 = y1.derivative();
    let y3 = y2.derivative();
    let delta = &(&y2 * &y2) - &(&y1 * &y3);
    let (a, b) = if delta.value() != 0.0 {
        let a = x.derivative().derivative().checked_div(&delta)?;
        let b = y2.checked_div(&delta)?;
        (a.value(), (b.value(), b.deriv(1)))
    } else {
        (f64::NAN, (f64::NAN, f64::NAN))
    };
    Ok(ClosedForm {
        ypp: y2.value(),
        delta: delta.value(),
        delta_prime: delta.deriv(1),
        a,
        b: b.0,
        b_prime: b.1,
    })
}

/// Umbilical parallels of a `y' = x` profile. Roots of `y''` and of `Δ'`
/// are located by sign changes on `scan` points and bisection to `1e-12`
/// in `t`; each `y''` root is certified by `a/x = b'/y'` from the general
/// system. A margin of `1e-3` of the range is excluded at both ends.
///
/// Non-convex arcs are accepted as long as `Δ ≠ 0` at the roots; the
/// closed-form comparison skips points where `|Δ|` is below `1e-6` of its
/// maximum, and the Blaschke scan is omitted.
pub fn umbilical_parallels(profile: &Reparameterized, scan: usize, tol: f64) -> Result<ParallelReport> {
    let ts = interior(profile.range(), 1e-3, scan);
    let forms = ts
        .iter()
        .map(|&t| closed_form(profile, t))
        .collect::<Result<Vec<_>>>()?;
    let delta_max = forms.iter().fold(0.0f64, |m, c| m.max(c.delta.abs()));
    let convex = forms.iter().all(|c| c.delta > 0.0);
    let mut closed_form_residual: f64 = 0.0;
    let mut g_residual: f64 = 0.0;
    for (&t, c) in ts.iter().zip(&forms) {
        if c.delta.abs() < 1e-6 * delta_max {
            continue;
        }
        let general = rotational_blaschke(profile, t, Normalization::UnitCurvature)?;
        closed_form_residual = closed_form_residual.max((general.a - c.a).abs().max((general.b - c.b).abs()));
        g_residual = g_residual.max((general.phi / general.x - 1.0).abs());
    }
    let all_umbilic = forms
        .iter()
        .all(|c| (c.delta_prime * c.ypp).abs() <= tol * delta_max * delta_max);

    let ypp = |t: f64| -> Result<f64> { Ok(profile.jets(t, 2)?.1.deriv(2)) };
    let ypp_values: Vec<f64> = forms.iter().map(|c| c.ypp).collect();
    let mut ypp_roots = Vec::new();
    for t in sign_change_roots(&ypp, &ts, &ypp_values, 1e-12)? {
        let cert = rotational_blaschke(profile, t, Normalization::UnitCurvature)?;
        let blaschke_defect = match rotational_blaschke(profile, t, Normalization::Blaschke) {
            Ok(b) => b.umbilic_defect.abs(),
            Err(_) => f64::NAN,
        };
        let c = closed_form(profile, t)?;
        ypp_roots.push(ParallelRoot {
            t,
            s: profile.s_of_t(t)?,
            certificate: cert.umbilic_defect.abs(),
            closed_form_defect: (c.a - c.b_prime).abs(),
            blaschke_defect,
        });
    }
    let delta_prime_roots = if all_umbilic {
        Vec::new()
    } else {
        let dprime = |t: f64| -> Result<f64> { Ok(closed_form(profile, t)?.delta_prime) };
        let values: Vec<f64> = forms.iter().map(|c| c.delta_prime).collect();
        sign_change_roots(&dprime, &ts, &values, 1e-12)?
    };
    if ypp_roots.is_empty() && !all_umbilic {
        return Err(Error::NoSignChange);
    }
    let blaschke = if convex {
        Some(umbilic_defect_scan(profile, Normalization::Blaschke, scan, tol)?)
    } else {
        None
    };
    Ok(ParallelReport {
        convex,
        all_umbilic,
        ypp_roots,
        delta_prime_roots,
        closed_form_residual,
        g_residual,
        blaschke,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisReport {
    /// Coefficient in the unimodular normal form `z = ½ r² + (α/24) r⁴ + O(6)`.
    pub alpha: f64,
    /// `|𝓑(0, 0)|` for the Blaschke normal.
    pub b_at_axis: f64,
    /// Frobenius norm of the orthonormal shape operator at the axis.
    pub shape_norm: f64,
    /// Order of the axis umbilic (`None` when flat up to the jet limit).
    pub order: Option<usize>,
}

/// Axis point of the rotational graph `z = F(x² + y²)`, with `F` an
/// expression in one variable.
///
/// Under the unimodular scaling `(x, y, z) ↦ (kx, ky, z/k²)` with
/// `k⁴ = 2F'(0)`, the 4-jet becomes `½ r² + (α/24) r⁴` with
/// `α = 12 F''(0) / (2F'(0))^{3/2}`.
pub fn axis_umbilic_check(profile_fn: &Expr, half_width: f64) -> Result<AxisReport> {
    let j = profile_fn.eval(&[Jet1::variable(0.0, 2)])?;
    let (a, c2) = (j.deriv(1), j.deriv(2));
    if !(a > 0.0) {
        return Err(Error::NotConvexAtAxis);
    }
    let alpha = 12.0 * c2 / (2.0 * a).powf(1.5);
    let (u, v) = (Expr::var(0, "u"), Expr::var(1, "v"));
    let r2 = Expr::binary(
        BinOp::Add,
        Expr::binary(BinOp::Mul, u.clone(), u.clone()),
        Expr::binary(BinOp::Mul, v.clone(), v.clone()),
    );
    let f = VectorExpr {
        components: [u, v, profile_fn.substitute(&[r2])],
        params: vec!["u".into(), "v".into()],
    };
    let w = half_width;
    let scene = SurfaceScene::new(f, XiSpec::BlaschkeNormal, Domain::new([-w, w], [-w, w]));
    let (b, shape) = b_field_sample(&scene, 0.0, 0.0)?;
    let order = match umbilic_order(&scene, 0.0, 0.0, 3, ORDER_TOL) {
        Ok((k, _)) => Some(k),
        Err(Error::OrderExceedsMax { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(AxisReport {
        alpha,
        b_at_axis: b[0].hypot(b[1]),
        shape_norm: shape,
        order,
    })
}
