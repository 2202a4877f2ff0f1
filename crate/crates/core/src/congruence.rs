//! Line congruences `(u, v) ↦ line through f(u, v) with direction ξ(u, v)`.
//!
//! A congruence is represented by a [`SurfaceScene`]: `f` is the reference
//! surface and the transversal field is the line direction. The curvature
//! lines of the congruence are the directions `(du, dv)` along which the
//! ruled strip is developable, `[ξ, f_t, ξ_t] = 0`, i.e. the roots of
//! `P du² + 2Q du dv + R dv² = 0` with
//!
//! ```text
//! P = [ξ, f_u, ξ_u],  2Q = [ξ, f_v, ξ_u] + [ξ, f_u, ξ_v],  R = [ξ, f_v, ξ_v]
//! ```
//!
//! The quadratic is homogeneous in the sign of the shape operator, so the
//! roots coincide with the eigen-directions of B from [`crate::geometry`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{FrameJets, StructureJets, SurfaceScene, XiSpec};
use crate::jets::{Jet2, Var};
use crate::linalg as la;
use crate::par::{self, Execution};
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pqr {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

pub fn pqr(scene: &SurfaceScene, u: f64, v: f64) -> Result<Pqr> {
    let frame = scene.frame_jets(u, v, 1 + scene.xi.order_loss())?;
    let (fu, fv) = (la::du(&frame.f), la::dv(&frame.f));
    let (xu, xv) = (la::du(&frame.xi), la::dv(&frame.xi));
    let x = la::truncate(&frame.xi, 0);
    let d = |a: &[Jet2; 3], b: &[Jet2; 3]| la::det3(&x, a, b).value();
    Ok(Pqr {
        p: d(&fu, &xu),
        q: 0.5 * (d(&fv, &xu) + d(&fu, &xv)),
        r: d(&fv, &xv),
    })
}

/// Unit directions `(du, dv)` solving `P du² + 2Q du dv + R dv² = 0`.
/// `None` when the quadratic vanishes identically (every direction is a
/// root) or has no real roots.
pub fn pqr_directions(c: &Pqr, tol: f64) -> Option<[[f64; 2]; 2]> {
    let a = 0.5 * (c.p + c.r);
    let b = 0.5 * (c.p - c.r);
    let amp = b.hypot(c.q);
    let size = a.abs().max(amp);
    if size == 0.0 || amp <= tol * size || a.abs() > amp {
        return None;
    }
    // P cos²φ + 2Q cosφ sinφ + R sin²φ = a + b cos 2φ + Q sin 2φ
    let psi = c.q.atan2(b);
    let w = (-a / amp).clamp(-1.0, 1.0).acos();
    let dir = |phi: f64| [phi.cos(), phi.sin()];
    Some([dir(0.5 * (psi + w)), dir(0.5 * (psi - w))])
}

/// Eigen-directions of the coordinate matrix of B, as unit `(du, dv)`.
/// `None` at umbilics (within `tol` relative to the eigenvalue size).
pub fn shape_directions(b: [[f64; 2]; 2], tol: f64) -> Option<[[f64; 2]; 2]> {
    let tr = b[0][0] + b[1][1];
    let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    let disc = 0.25 * tr * tr - det;
    let size = b.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(disc > (tol * size).powi(2)) {
        return None;
    }
    let s = disc.sqrt();
    let vec_for = |l: f64| {
        // rows of (B - l I); pick the better-conditioned null vector
        let r1 = [b[0][0] - l, b[0][1]];
        let r2 = [b[1][0], b[1][1] - l];
        let r = if r1[0].hypot(r1[1]) >= r2[0].hypot(r2[1]) { r1 } else { r2 };
        let n = r[0].hypot(r[1]);
        [-r[1] / n, r[0] / n]
    };
    Some([vec_for(0.5 * tr + s), vec_for(0.5 * tr - s)])
}

/// Angle between two unoriented lines, in `[0, π/2]`.
pub fn line_angle(a: [f64; 2], b: [f64; 2]) -> f64 {
    let c = (a[0] * b[0] + a[1] * b[1]).abs() / (a[0].hypot(a[1]) * b[0].hypot(b[1]));
    let s = (a[0] * b[1] - a[1] * b[0]).abs() / (a[0].hypot(a[1]) * b[0].hypot(b[1]));
    s.atan2(c)
}

/// Largest angle mismatch between two unordered pairs of lines.
pub fn direction_pair_mismatch(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> f64 {
    let straight = line_angle(a[0], b[0]).max(line_angle(a[1], b[1]));
    let crossed = line_angle(a[0], b[1]).max(line_angle(a[1], b[0]));
    straight.min(crossed)
}

/// Normalized developability determinant `[ξ, f_t, ξ_t] / (|ξ| |f_t| |ξ_t|)`
/// at a point with tangent `(du, dv)`.
pub fn developability(scene: &SurfaceScene, u: f64, v: f64, t: [f64; 2]) -> Result<f64> {
    let frame = scene.frame_jets(u, v, 1 + scene.xi.order_loss())?;
    let comb = |a: &[Jet2; 3]| {
        la::axpy3(t[0], la::values(&la::du(a)), la::values(&la::dv(a)).map(|x| t[1] * x))
    };
    let ft = comb(&frame.f);
    let xt = comb(&frame.xi);
    let x = la::values(&frame.xi);
    let scale = la::norm3(x) * la::norm3(ft) * la::norm3(xt);
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(la::det33(x, ft, xt).abs() / scale)
}

/// Derivative at the middle of five samples by Lagrange interpolation in
/// cumulative chord length.
fn five_point_tangent(p: &[[f64; 2]]) -> [f64; 2] {
    let mut s = [0.0; 5];
    for k in 1..5 {
        s[k] = s[k - 1] + (p[k][0] - p[k - 1][0]).hypot(p[k][1] - p[k - 1][1]);
    }
    let x = s[2];
    let mut out = [0.0; 2];
    for j in 0..5 {
        // derivative of the j-th Lagrange basis polynomial at x
        let mut dl = 0.0;
        for m in 0..5 {
            if m == j {
                continue;
            }
            let mut term = 1.0 / (s[j] - s[m]);
            for k in 0..5 {
                if k != j && k != m {
                    term *= (x - s[k]) / (s[j] - s[k]);
                }
            }
            dl += term;
        }
        // relative to the middle point, so the weights' zero sum cancels exactly
        out[0] += dl * (p[j][0] - p[2][0]);
        out[1] += dl * (p[j][1] - p[2][1]);
    }
    out
}

/// Maximum normalized `|[ξ, f_t, ξ_t]|` along a polyline in the parameter
/// plane, with tangents from five-point differentiation.
pub fn developability_residual(scene: &SurfaceScene, polyline: &[[f64; 2]]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for w in polyline.windows(5) {
        let t = five_point_tangent(w);
        worst = worst.max(developability(scene, w[2][0], w[2][1], t)?);
    }
    Ok(worst)
}

/// Samples a parameterized curve into a polyline.
pub fn sample_curve(curve: impl Fn(f64) -> [f64; 2], t0: f64, t1: f64, samples: usize) -> Vec<[f64; 2]> {
    (0..samples)
        .map(|k| curve(t0 + (t1 - t0) * k as f64 / (samples - 1) as f64))
        .collect()
}

fn tau_at(scene: &SurfaceScene, u: f64, v: f64) -> Result<[f64; 2]> {
    let s = scene.structure(u, v, 0)?;
    Ok([s.tau[0].value(), s.tau[1].value()])
}

/// `∫ τ_k` along a coordinate segment; `k = 0` integrates `τ1` in `u` at
/// fixed `v = other`, `k = 1` integrates `τ2` in `v` at fixed `u = other`.
fn tau_line_integral(scene: &SurfaceScene, k: usize, other: f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let mut err = None;
    let value = quadrature::integrate(
        |s| {
            let (u, v) = if k == 0 { (s, other) } else { (other, s) };
            tau_at(scene, u, v).map(|t| t[k]).unwrap_or_else(|e| {
                err.get_or_insert(e);
                f64::NAN
            })
        },
        a,
        b,
        rel_tol,
    );
    match err {
        Some(e) => Err(e),
        None => value,
    }
}

/// `μ(u, v) = ∫ τ` along the axis path `(u0, v0) → (u, v0) → (u, v)`.
pub fn integrate_tau(scene: &SurfaceScene, base: [f64; 2], u: f64, v: f64, rel_tol: f64) -> Result<f64> {
    Ok(tau_line_integral(scene, 0, base[1], base[0], u, rel_tol)?
        + tau_line_integral(scene, 1, u, base[1], v, rel_tol)?)
}

/// A potential `μ` with `dμ = τ`: the value from path integration, higher
/// derivatives from the jets of τ.
#[derive(Debug, Clone)]
pub struct TauPotential {
    pub scene: SurfaceScene,
    pub base: [f64; 2],
}

impl TauPotential {
    pub fn jet(&self, u: f64, v: f64, order: usize) -> Result<Jet2> {
        let value = integrate_tau(&self.scene, self.base, u, v, 1e-12)?;
        if order == 0 {
            return Ok(Jet2::constant(value, 0));
        }
        let s = self.scene.structure(u, v, order - 1)?;
        let (t1, t2) = (&s.tau[0], &s.tau[1]);
        Ok(Jet2::from_fn(order, |i, j| {
            if i + j == 0 {
                value
            } else if i >= 1 {
                t1.coeff(i - 1, j)
            } else {
                t2.coeff(0, j - 1)
            }
        }))
    }
}

/// A rescaling exponent: either an expression or the integrated potential
/// of τ.
#[derive(Debug, Clone)]
pub enum Mu {
    Expr(Expr),
    Potential(TauPotential),
}

impl Mu {
    pub fn jet(&self, u: f64, v: f64, order: usize) -> Result<Jet2> {
        match self {
            Mu::Expr(e) => Ok(e.eval_jet(&Jet2::variable(Var::U, u, order), &Jet2::variable(Var::V, v, order))?),
            Mu::Potential(p) => p.jet(u, v, order),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TauExactness {
    pub exact: bool,
    /// `max |∂τ1/∂v - ∂τ2/∂u|` on the grid.
    pub curl_residual: f64,
    pub max_tau: f64,
    pub base: [f64; 2],
    /// Grid samples `(u, v, μ)` of the potential, `μ(base) = 0`.
    pub mu: Vec<[f64; 3]>,
}

/// Closedness (hence exactness, on a rectangle) of τ, with the potential
/// sampled on an `n × n` grid. Periodic domains are rejected, reporting the
/// holonomy of τ along the periods through the domain centre.
pub fn tau_exactness(scene: &SurfaceScene, n: usize, tol: f64, exec: Execution) -> Result<TauExactness> {
    let d = &scene.domain;
    let centre = [0.5 * (d.u[0] + d.u[1]), 0.5 * (d.v[0] + d.v[1])];
    if d.periodic[0] || d.periodic[1] {
        let mut holonomy = [0.0; 2];
        if d.periodic[0] {
            holonomy[0] = tau_line_integral(scene, 0, centre[1], d.u[0], d.u[1], 1e-10)?;
        }
        if d.periodic[1] {
            holonomy[1] = tau_line_integral(scene, 1, centre[0], d.v[0], d.v[1], 1e-10)?;
        }
        return Err(Error::NonSimplyConnectedDomain { holonomy });
    }
    let nodes = d.grid(n);
    let curls = par::map(exec, &nodes, |&(u, v)| {
        let s = scene.structure(u, v, 1)?;
        let curl = (s.tau[0].coeff(0, 1) - s.tau[1].coeff(1, 0)).abs();
        Ok::<_, Error>((curl, s.tau[0].value().abs() + s.tau[1].value().abs()))
    });
    let mut curl_residual: f64 = 0.0;
    let mut max_tau: f64 = 0.0;
    for c in curls {
        let (c, t) = c?;
        curl_residual = curl_residual.max(c);
        max_tau = max_tau.max(t);
    }
    let exact = curl_residual < tol;
    let mu = if exact {
        par::map(exec, &nodes, |&(u, v)| integrate_tau(scene, centre, u, v, 1e-12).map(|m| [u, v, m]))
            .into_iter()
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![]
    };
    Ok(TauExactness {
        exact,
        curl_residual,
        max_tau,
        base: centre,
        mu,
    })
}

/// Frame jets of the rescaled field `ξ̃ = exp(-μ) ξ` at `(u, v)`.
pub fn rescaled_frame(scene: &SurfaceScene, mu: &Mu, u: f64, v: f64, order: usize) -> Result<FrameJets> {
    let frame = scene.frame_jets(u, v, order)?;
    let m = mu.jet(u, v, frame.xi[0].order())?;
    let xi = la::scale(&(-&m).exp(), &frame.xi);
    Ok(FrameJets { f: frame.f, xi })
}

#[derive(Debug, Clone, Serialize)]
pub struct RescaleReport {
    /// `sup |τ̃1| + |τ̃2|` on the grid.
    pub max_tau: f64,
    pub curl_residual: f64,
}

/// Rescales ξ by `exp(-μ)` and measures τ̃ and its curl on an `n × n` grid.
pub fn equiaffine_rescale(scene: &SurfaceScene, mu: &Mu, n: usize, exec: Execution) -> Result<RescaleReport> {
    let nodes = scene.domain.grid(n);
    let order = scene.base_order(1)?;
    let vals = par::map(exec, &nodes, |&(u, v)| {
        let s = StructureJets::from_frame(&rescaled_frame(scene, mu, u, v, order)?, u, v)?;
        Ok::<_, Error>((
            s.tau[0].value().abs() + s.tau[1].value().abs(),
            (s.tau[0].coeff(0, 1) - s.tau[1].coeff(1, 0)).abs(),
        ))
    });
    let mut out = RescaleReport {
        max_tau: 0.0,
        curl_residual: 0.0,
    };
    for r in vals {
        let (t, c) = r?;
        out.max_tau = out.max_tau.max(t);
        out.curl_residual = out.curl_residual.max(c);
    }
    Ok(out)
}

/// The scene with its transversal field replaced by `exp(-μ) ξ` for an
/// expression `μ`.
pub fn rescaled_scene(scene: &SurfaceScene, mu: &Expr) -> SurfaceScene {
    scene.with_xi(XiSpec::Rescaled {
        base: Box::new(scene.xi.clone()),
        mu: Expr::neg(mu.clone()),
    })
}

/// Moves the reference surface to `f + λ ξ` and re-runs the exactness test.
pub fn reference_shift(
    scene: &SurfaceScene,
    lambda: &Expr,
    n: usize,
    tol: f64,
    exec: Execution,
) -> Result<(SurfaceScene, TauExactness)> {
    let shifted = SurfaceScene {
        shift: Some(lambda.clone()),
        ..scene.clone()
    };
    let report = tau_exactness(&shifted, n, tol, exec)?;
    Ok((shifted, report))
}
