//! Affine structure of a pair (f, ξ): metric h, connection, shape operator B,
//! transversal 1-form τ, co-normal ν.
//!
//! Everything is computed on jets, so the structure quantities come with
//! their own partial derivatives. Derivatives are decomposed in the frame
//! `{f_u, f_v, ξ}`:
//!
//! ```text
//! f_ij = Γ¹_ij f_u + Γ²_ij f_v + h_ij ξ
//! ξ_u  = -b11 f_u - b21 f_v + τ1 ξ
//! ξ_v  = -b12 f_u - b22 f_v + τ2 ξ
//! ```
//!
//! and solved by Cramer's rule. The co-normal is `ν = (f_u × f_v) / [f_u, f_v, ξ]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, VectorExpr};
use crate::jets::{Jet2, Var, MAX_ORDER};
use crate::linalg::{self as la, JetVec};
use crate::par::{self, Execution};

/// Parameter rectangle with optional periodicity per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub u: [f64; 2],
    pub v: [f64; 2],
    pub periodic: [bool; 2],
}

impl Domain {
    pub fn new(u: [f64; 2], v: [f64; 2]) -> Self {
        Domain {
            u,
            v,
            periodic: [false, false],
        }
    }

    pub fn with_periodic(mut self, pu: bool, pv: bool) -> Self {
        self.periodic = [pu, pv];
        self
    }

    fn axis_nodes(range: [f64; 2], periodic: bool, n: usize) -> Vec<f64> {
        if periodic {
            let h = (range[1] - range[0]) / n as f64;
            (0..n).map(|i| range[0] + h * i as f64).collect()
        } else {
            let h = (range[1] - range[0]) / (n - 1) as f64;
            (0..n).map(|i| range[0] + h * i as f64).collect()
        }
    }

    /// Node coordinates along each axis for an `n`-per-axis grid.
    pub fn axes(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        assert!(n >= 2);
        (
            Self::axis_nodes(self.u, self.periodic[0], n),
            Self::axis_nodes(self.v, self.periodic[1], n),
        )
    }

    /// Row-major grid nodes (`v` outer, `u` inner).
    pub fn grid(&self, n: usize) -> Vec<(f64, f64)> {
        let (us, vs) = self.axes(n);
        vs.iter()
            .flat_map(|&v| us.iter().map(move |&u| (u, v)))
            .collect()
    }

    pub fn steps(&self, n: usize) -> (f64, f64) {
        let (us, vs) = self.axes(n);
        (us[1] - us[0], vs[1] - vs[0])
    }

    pub fn width(&self) -> f64 {
        self.u[1] - self.u[0]
    }

    pub fn height(&self) -> f64 {
        self.v[1] - self.v[0]
    }

    /// Maps periodic coordinates back into the rectangle.
    pub fn wrap(&self, u: f64, v: f64) -> (f64, f64) {
        let w = |x: f64, r: [f64; 2], p: bool| {
            if p {
                r[0] + (x - r[0]).rem_euclid(r[1] - r[0])
            } else {
                x
            }
        };
        (w(u, self.u, self.periodic[0]), w(v, self.v, self.periodic[1]))
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let (u, v) = self.wrap(u, v);
        let inside = |x: f64, r: [f64; 2]| x >= r[0] - 1e-12 && x <= r[1] + 1e-12;
        inside(u, self.u) && inside(v, self.v)
    }

    /// Distance to the nearest non-periodic edge.
    pub fn edge_distance(&self, u: f64, v: f64) -> f64 {
        let mut d = f64::INFINITY;
        if !self.periodic[0] {
            d = d.min(u - self.u[0]).min(self.u[1] - u);
        }
        if !self.periodic[1] {
            d = d.min(v - self.v[0]).min(self.v[1] - v);
        }
        d
    }
}

/// How the transversal field is obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum XiSpec {
    /// Explicit components in the surface parameters.
    User(VectorExpr),
    /// Euclidean unit normal, oriented toward the convex side.
    EuclideanNormal,
    /// Blaschke affine normal `½ Δ_g f` with the Blaschke metric `g`.
    BlaschkeNormal,
    /// `exp(μ) · base`.
    Rescaled { base: Box<XiSpec>, mu: Expr },
}

impl XiSpec {
    /// Orders lost between the jet of `f` and the jet of `ξ`.
    pub fn order_loss(&self) -> usize {
        match self {
            XiSpec::User(_) => 0,
            XiSpec::EuclideanNormal => 1,
            XiSpec::BlaschkeNormal => 3,
            XiSpec::Rescaled { base, .. } => base.order_loss(),
        }
    }

    pub fn is_blaschke(&self) -> bool {
        matches!(self, XiSpec::BlaschkeNormal)
    }
}

/// A parameterized surface with its transversal field.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceScene {
    pub f: VectorExpr,
    pub xi: XiSpec,
    pub domain: Domain,
    /// Reference shift `f̃ = f + λ ξ` (line congruences).
    pub shift: Option<Expr>,
}

/// Jets of the (possibly shifted) immersion and of the transversal field.
#[derive(Debug, Clone)]
pub struct FrameJets {
    pub f: JetVec,
    pub xi: JetVec,
}

/// Structure quantities as jets; see the module docs for the conventions.
#[derive(Debug, Clone)]
pub struct StructureJets {
    pub f: JetVec,
    pub fu: JetVec,
    pub fv: JetVec,
    pub fuu: JetVec,
    pub fuv: JetVec,
    pub fvv: JetVec,
    pub xi: JetVec,
    pub xi_u: JetVec,
    pub xi_v: JetVec,
    pub det: Jet2,
    pub h: [[Jet2; 2]; 2],
    /// `christoffel[k][i][j] = Γᵏ_ij`.
    pub christoffel: [[[Jet2; 2]; 2]; 2],
    /// `b[i][j]`: `B ∂_j = Σ_i b[i][j] ∂_i`.
    pub b: [[Jet2; 2]; 2],
    pub tau: [Jet2; 2],
    pub nu: JetVec,
}

/// Per-point affine data.
#[derive(Debug, Clone, Serialize)]
pub struct AffinePointData {
    pub point: [f64; 2],
    pub f_u: [f64; 3],
    pub f_v: [f64; 3],
    pub xi: [f64; 3],
    pub frame_det: f64,
    pub h: [[f64; 2]; 2],
    pub christoffel: [[[f64; 2]; 2]; 2],
    pub b: [[f64; 2]; 2],
    pub tau: [f64; 2],
    pub nu: [f64; 3],
    /// `[f_u, f_v, ξ] [ν, ν_u, ν_v] / sqrt(det h)`; NaN when `det h <= 0`.
    pub delta: f64,
    pub rho: Option<f64>,
    pub positive_definite: bool,
    /// Largest relative residual of the frame reconstruction of
    /// `f_uu, f_uv, f_vv, ξ_u, ξ_v`.
    pub reconstruction_residual: f64,
    /// `max(|ν·f_u|, |ν·f_v|, |ν·ξ - 1|)` (scaled by the frame norms).
    pub conormal_residual: f64,
}

fn det_check(d: &Jet2, a: &JetVec, b: &JetVec, c: &JetVec, u: f64, v: f64) -> Result<()> {
    let scale = la::norm3(la::values(a)) * la::norm3(la::values(b)) * la::norm3(la::values(c));
    if !(d.value().abs() > 1e-12 * scale) {
        return Err(Error::DegenerateFrame { u, v });
    }
    Ok(())
}

/// Euclidean unit normal oriented so that the second fundamental form has
/// positive trace relative to the first.
pub fn euclidean_normal(f: &JetVec) -> Result<JetVec> {
    let fu = la::du(f);
    let fv = la::dv(f);
    let c = la::cross(&fu, &fv);
    let len = la::dot(&c, &c).sqrt()?;
    let inv = len.recip()?;
    let mut n = la::scale(&inv, &c);
    let nv = la::values(&n);
    let (fu0, fv0) = (la::values(&fu), la::values(&fv));
    let fuu = la::values(&la::du(&fu));
    let fuv = la::values(&la::dv(&fu));
    let fvv = la::values(&la::dv(&fv));
    let (e, ff, g) = (la::dot3(fu0, fu0), la::dot3(fu0, fv0), la::dot3(fv0, fv0));
    let (l, m, nn) = (la::dot3(fuu, nv), la::dot3(fuv, nv), la::dot3(fvv, nv));
    if e * nn - 2.0 * ff * m + g * l < 0.0 {
        n = [-&n[0], -&n[1], -&n[2]];
    }
    Ok(n)
}

/// Blaschke affine normal `ξ = ½ Δ_g f`, where `g = II / (det II / det I)^{1/4}`.
/// Loses three orders relative to `f`.
pub fn blaschke_normal(f: &JetVec, u: f64, v: f64) -> Result<JetVec> {
    let n = euclidean_normal(f)?;
    let fu = la::du(f);
    let fv = la::dv(f);
    let fuu = la::du(&fu);
    let fuv = la::dv(&fu);
    let fvv = la::dv(&fv);
    let e = la::dot(&fu, &fu);
    let ff = la::dot(&fu, &fv);
    let g = la::dot(&fv, &fv);
    let l = la::dot(&fuu, &n);
    let m = la::dot(&fuv, &n);
    let nn = la::dot(&fvv, &n);
    let det_i = &(&e * &g) - &(&ff * &ff);
    let det_ii = &(&l * &nn) - &(&m * &m);
    if det_ii.value() <= 0.0 || l.value() <= 0.0 {
        return Err(Error::NotConvex { u, v });
    }
    let phi = det_ii.checked_div(&det_i)?.pow_const(0.25)?;
    let inv_phi = phi.recip()?;
    let g11 = &l * &inv_phi;
    let g12 = &m * &inv_phi;
    let g22 = &nn * &inv_phi;
    let det_g = &(&g11 * &g22) - &(&g12 * &g12);
    let sqrt_g = det_g.sqrt()?;
    // sqrt(det g) g^{ij} = adj(g)_{ij} / sqrt(det g)
    let inv_sqrt = sqrt_g.recip()?;
    let w11 = &g22 * &inv_sqrt;
    let w12 = -(&g12 * &inv_sqrt);
    let w22 = &g11 * &inv_sqrt;
    let mut xi: Vec<Jet2> = Vec::with_capacity(3);
    for k in 0..3 {
        let a1 = &(&w11 * &fu[k]) + &(&w12 * &fv[k]);
        let a2 = &(&w12 * &fu[k]) + &(&w22 * &fv[k]);
        let div = &a1.du() + &a2.dv();
        xi.push((&div * &inv_sqrt).scale(0.5));
    }
    Ok([xi[0].clone(), xi[1].clone(), xi[2].clone()])
}

impl SurfaceScene {
    pub fn new(f: VectorExpr, xi: XiSpec, domain: Domain) -> Self {
        SurfaceScene {
            f,
            xi,
            domain,
            shift: None,
        }
    }

    pub fn with_xi(&self, xi: XiSpec) -> Self {
        SurfaceScene {
            xi,
            ..self.clone()
        }
    }

    /// Order of the `f` jet needed so that every structure quantity is
    /// available to order `structure_order`.
    pub fn base_order(&self, structure_order: usize) -> Result<usize> {
        let n = structure_order + 2 + self.xi.order_loss();
        if n > MAX_ORDER {
            return Err(Error::OrderExceedsMax {
                requested: n,
                max: MAX_ORDER,
            });
        }
        Ok(n)
    }

    fn xi_jets(&self, spec: &XiSpec, f: &JetVec, vars: &[Jet2; 2], u: f64, v: f64) -> Result<JetVec> {
        Ok(match spec {
            XiSpec::User(e) => e.eval(vars)?,
            XiSpec::EuclideanNormal => euclidean_normal(f)?,
            XiSpec::BlaschkeNormal => blaschke_normal(f, u, v)?,
            XiSpec::Rescaled { base, mu } => {
                let b = self.xi_jets(base, f, vars, u, v)?;
                let s = mu.eval(vars)?.exp();
                la::scale(&s, &b)
            }
        })
    }

    /// Jets of `f` (shifted if a reference shift is set) and `ξ` with `f`
    /// evaluated at order `order`.
    pub fn frame_jets(&self, u: f64, v: f64, order: usize) -> Result<FrameJets> {
        let vars = [
            Jet2::variable(Var::U, u, order),
            Jet2::variable(Var::V, v, order),
        ];
        let f = self.f.eval(&vars)?;
        let xi = self.xi_jets(&self.xi, &f, &vars, u, v)?;
        let f = match &self.shift {
            Some(lambda) => {
                let l = lambda.eval(&vars)?;
                la::add(&f, &la::scale(&l, &xi))
            }
            None => f,
        };
        Ok(FrameJets { f, xi })
    }

    /// Structure jets valid to at least order `structure_order`.
    pub fn structure(&self, u: f64, v: f64, structure_order: usize) -> Result<StructureJets> {
        let frame = self.frame_jets(u, v, self.base_order(structure_order)?)?;
        StructureJets::from_frame(&frame, u, v).map_err(|e| match (e, &self.shift) {
            (Error::DegenerateFrame { u, v }, Some(_)) => Error::DegenerateShiftedFrame { u, v },
            (e, _) => e,
        })
    }

    pub fn decompose(&self, u: f64, v: f64) -> Result<AffinePointData> {
        Ok(self.structure(u, v, 1)?.point_data(u, v))
    }

    /// Value of `f` at a point.
    pub fn position(&self, u: f64, v: f64) -> Result<[f64; 3]> {
        let f = self.f.eval(&[u, v])?;
        Ok(match &self.shift {
            None => f,
            Some(_) => la::values(&self.frame_jets(u, v, self.base_order(0)?)?.f),
        })
    }
}

impl StructureJets {
    pub fn from_frame(frame: &FrameJets, u: f64, v: f64) -> Result<Self> {
        let f = frame.f.clone();
        let xi = frame.xi.clone();
        let fu = la::du(&f);
        let fv = la::dv(&f);
        let fuu = la::du(&fu);
        let fuv = la::dv(&fu);
        let fvv = la::dv(&fv);
        let xi_u = la::du(&xi);
        let xi_v = la::dv(&xi);
        let det = la::det3(&fu, &fv, &xi);
        det_check(&det, &fu, &fv, &xi, u, v)?;
        let inv = det.recip()?;
        let solve = |a: &Jet2| a * &inv;

        let second = [[&fuu, &fuv], [&fuv, &fvv]];
        let mut h: [[Jet2; 2]; 2] = Default::default();
        let mut christoffel: [[[Jet2; 2]; 2]; 2] = Default::default();
        for i in 0..2 {
            for j in 0..2 {
                let fij = second[i][j];
                h[i][j] = solve(&la::det3(&fu, &fv, fij));
                christoffel[0][i][j] = solve(&la::det3(fij, &fv, &xi));
                christoffel[1][i][j] = solve(&la::det3(&fu, fij, &xi));
            }
        }
        let mut b: [[Jet2; 2]; 2] = Default::default();
        let mut tau: [Jet2; 2] = Default::default();
        for (j, xj) in [&xi_u, &xi_v].into_iter().enumerate() {
            b[0][j] = -solve(&la::det3(xj, &fv, &xi));
            b[1][j] = -solve(&la::det3(&fu, xj, &xi));
            tau[j] = solve(&la::det3(&fu, &fv, xj));
        }
        let nu = la::scale(&inv, &la::cross(&fu, &fv));
        Ok(StructureJets {
            f,
            fu,
            fv,
            fuu,
            fuv,
            fvv,
            xi,
            xi_u,
            xi_v,
            det,
            h,
            christoffel,
            b,
            tau,
            nu,
        })
    }

    pub fn h_values(&self) -> [[f64; 2]; 2] {
        [
            [self.h[0][0].value(), self.h[0][1].value()],
            [self.h[1][0].value(), self.h[1][1].value()],
        ]
    }

    pub fn b_values(&self) -> [[f64; 2]; 2] {
        [
            [self.b[0][0].value(), self.b[0][1].value()],
            [self.b[1][0].value(), self.b[1][1].value()],
        ]
    }

    /// Shape operator in the h-orthonormal frame obtained by Gram–Schmidt on
    /// `{f_u, f_v}` (`X1 = f_u / sqrt(h11)`), i.e. `E⁻¹ B E`.
    pub fn orthonormal_shape(&self, u: f64, v: f64) -> Result<[[Jet2; 2]; 2]> {
        let [[h11, h12], [_, h22]] = &self.h;
        let det_h = &(h11 * h22) - &(h12 * h12);
        if h11.value() <= 0.0 || det_h.value() <= 0.0 {
            return Err(Error::NotConvex { u, v });
        }
        let r11 = h11.sqrt()?;
        let s = det_h.checked_div(h11)?.sqrt()?;
        let e11 = r11.recip()?;
        let e22 = s.recip()?;
        let e12 = -(h12.checked_div(&(h11 * &s))?);
        // E = [[e11, e12], [0, e22]], E⁻¹ = [[r11, h12 / r11], [0, s]]
        let i12 = h12.checked_div(&r11)?;
        let b = &self.b;
        let be = [
            [&b[0][0] * &e11, &(&b[0][0] * &e12) + &(&b[0][1] * &e22)],
            [&b[1][0] * &e11, &(&b[1][0] * &e12) + &(&b[1][1] * &e22)],
        ];
        Ok([
            [
                &(&r11 * &be[0][0]) + &(&i12 * &be[1][0]),
                &(&r11 * &be[0][1]) + &(&i12 * &be[1][1]),
            ],
            [&s * &be[1][0], &s * &be[1][1]],
        ])
    }

    /// Gram–Schmidt frame matrix `E` (columns are `X1`, `X2` in the
    /// coordinate basis), as values.
    pub fn orthonormal_frame_values(&self) -> [[f64; 2]; 2] {
        let [[h11, h12], [_, h22]] = self.h_values();
        let s = ((h11 * h22 - h12 * h12) / h11).sqrt();
        [[1.0 / h11.sqrt(), -h12 / (h11 * s)], [0.0, 1.0 / s]]
    }

    fn reconstruction_residual(&self) -> f64 {
        let v = |a: &JetVec| la::values(a);
        let (fu, fv, xi) = (v(&self.fu), v(&self.fv), v(&self.xi));
        let mut worst: f64 = 0.0;
        let second = [[&self.fuu, &self.fuv], [&self.fuv, &self.fvv]];
        for i in 0..2 {
            for j in 0..2 {
                let target = v(second[i][j]);
                let g1 = self.christoffel[0][i][j].value();
                let g2 = self.christoffel[1][i][j].value();
                let hij = self.h[i][j].value();
                let rebuilt = la::axpy3(g1, fu, la::axpy3(g2, fv, la::axpy3(hij, xi, [0.0; 3])));
                let scale = la::norm3(target)
                    + g1.abs() * la::norm3(fu)
                    + g2.abs() * la::norm3(fv)
                    + hij.abs() * la::norm3(xi);
                worst = worst.max(la::norm3(la::sub3(target, rebuilt)) / scale.max(1e-300));
            }
        }
        for (j, xj) in [&self.xi_u, &self.xi_v].into_iter().enumerate() {
            let target = v(xj);
            let (b1, b2, t) = (self.b[0][j].value(), self.b[1][j].value(), self.tau[j].value());
            let rebuilt = la::axpy3(-b1, fu, la::axpy3(-b2, fv, la::axpy3(t, xi, [0.0; 3])));
            let scale = la::norm3(target)
                + b1.abs() * la::norm3(fu)
                + b2.abs() * la::norm3(fv)
                + t.abs() * la::norm3(xi);
            worst = worst.max(la::norm3(la::sub3(target, rebuilt)) / scale.max(1e-300));
        }
        worst
    }

    /// Values at the base point. `delta` needs ν to first order.
    pub fn point_data(&self, u: f64, v: f64) -> AffinePointData {
        let h = self.h_values();
        let trace = h[0][0] + h[1][1];
        let det_h = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let positive_definite = h[0][0] > 1e-12 * trace.abs() && det_h > 1e-12 * trace * trace;
        let nu = la::values(&self.nu);
        let (fu, fv, xi) = (la::values(&self.fu), la::values(&self.fv), la::values(&self.xi));
        let delta = if det_h > 0.0 && self.nu[0].order() >= 1 {
            let nu_u = la::values(&la::du(&self.nu));
            let nu_v = la::values(&la::dv(&self.nu));
            self.det.value() * la::det33(nu, nu_u, nu_v) / det_h.sqrt()
        } else {
            f64::NAN
        };
        let nn = la::norm3(nu);
        let conormal_residual = (la::dot3(nu, fu).abs() / (nn * la::norm3(fu)))
            .max(la::dot3(nu, fv).abs() / (nn * la::norm3(fv)))
            .max((la::dot3(nu, xi) - 1.0).abs());
        let mut christoffel = [[[0.0; 2]; 2]; 2];
        for (k, ck) in christoffel.iter_mut().enumerate() {
            for (i, ci) in ck.iter_mut().enumerate() {
                for (j, c) in ci.iter_mut().enumerate() {
                    *c = self.christoffel[k][i][j].value();
                }
            }
        }
        let mut data = AffinePointData {
            point: [u, v],
            f_u: fu,
            f_v: fv,
            xi,
            frame_det: self.det.value(),
            h,
            christoffel,
            b: self.b_values(),
            tau: [self.tau[0].value(), self.tau[1].value()],
            nu,
            delta,
            rho: None,
            positive_definite,
            reconstruction_residual: self.reconstruction_residual(),
            conormal_residual,
        };
        data.rho = isothermal_check(&data);
        data
    }
}

/// `ρ = h11` when `|h11 - h22|` and `|h12|` are below `1e-9 |h11|`.
pub fn isothermal_check(data: &AffinePointData) -> Option<f64> {
    let h = data.h;
    let tol = 1e-9 * h[0][0].abs();
    ((h[0][0] - h[1][1]).abs() < tol && h[0][1].abs() < tol).then_some(h[0][0])
}

/// `sup |τ1| + |τ2|` over an `n × n` grid.
pub fn equiaffinity_report(scene: &SurfaceScene, n: usize, exec: Execution) -> Result<f64> {
    let nodes = scene.domain.grid(n);
    let taus = par::map(exec, &nodes, |&(u, v)| {
        let s = scene.structure(u, v, 0)?;
        Ok::<_, Error>(s.tau[0].value().abs() + s.tau[1].value().abs())
    });
    taus.into_iter()
        .try_fold(0.0f64, |m, t| Ok(m.max(t?)))
}

/// Residuals of the isothermal identities and of the co-normal formula for
/// the shape operator, each relative to the size of the compared quantity.
#[derive(Debug, Clone, Serialize)]
pub struct IsoReport {
    pub rho: f64,
    /// `ξ = (ν_u × ν_v) / [ν, ν_u, ν_v]`
    pub xi_from_conormal: f64,
    /// `ν_u·f_u = ν_v·f_v = -ρ`, `ν_u·f_v = ν_v·f_u = 0`
    pub conormal_pairings: f64,
    /// `f_u = ρ (ν × ν_v) / [ν, ν_u, ν_v]`, `f_v = -ρ (ν × ν_u) / [ν, ν_u, ν_v]`
    pub tangents_from_conormal: f64,
    /// `[f_u, f_v, ξ] = ρ² / [ν, ν_u, ν_v]`
    pub volume: f64,
    /// `B = -(1/δ) (ν_ij · ξ)` against the frame decomposition.
    pub shape_operator: f64,
    /// `δ = [f_u, f_v, ξ][ν, ν_u, ν_v] / ρ` against `ρ`.
    pub delta: f64,
    /// `[ν, ν_u, ν_v] = [f_u, f_v, ξ] = ρ`, only for Blaschke scenes.
    pub blaschke: Option<f64>,
}

impl IsoReport {
    pub fn max_identity_residual(&self) -> f64 {
        self.xi_from_conormal
            .max(self.conormal_pairings)
            .max(self.tangents_from_conormal)
            .max(self.volume)
            .max(self.shape_operator)
            .max(self.delta)
    }
}

fn rel3(a: [f64; 3], b: [f64; 3]) -> f64 {
    la::norm3(la::sub3(a, b)) / la::norm3(b).max(1e-300)
}

pub fn verify_iso_identities(scene: &SurfaceScene, u: f64, v: f64) -> Result<IsoReport> {
    let s = scene.structure(u, v, 1)?;
    let data = s.point_data(u, v);
    let rho = data
        .rho
        .ok_or_else(|| Error::PreconditionFailed(format!("({u}, {v}) is not isothermal")))?;
    let tau = data.tau[0].abs() + data.tau[1].abs();
    if tau >= 1e-8 {
        return Err(Error::PreconditionFailed(format!(
            "xi is not equiaffine at ({u}, {v}): |tau| = {tau:e}"
        )));
    }
    let nu = la::values(&s.nu);
    let nu_u_j = la::du(&s.nu);
    let nu_v_j = la::dv(&s.nu);
    let nu_u = la::values(&nu_u_j);
    let nu_v = la::values(&nu_v_j);
    let nu_uu = la::values(&la::du(&nu_u_j));
    let nu_uv = la::values(&la::dv(&nu_u_j));
    let nu_vv = la::values(&la::dv(&nu_v_j));
    let (fu, fv, xi) = (data.f_u, data.f_v, data.xi);
    let vol_nu = la::det33(nu, nu_u, nu_v);

    let xi_from = la::cross3(nu_u, nu_v).map(|c| c / vol_nu);
    let xi_from_conormal = rel3(xi_from, xi);

    let pairings = [
        la::dot3(nu_u, fu) + rho,
        la::dot3(nu_v, fv) + rho,
        la::dot3(nu_u, fv),
        la::dot3(nu_v, fu),
    ];
    let conormal_pairings = pairings.iter().fold(0.0f64, |m, p| m.max(p.abs())) / rho.abs();

    let fu_from = la::cross3(nu, nu_v).map(|c| rho * c / vol_nu);
    let fv_from = la::cross3(nu, nu_u).map(|c| -rho * c / vol_nu);
    let tangents_from_conormal = rel3(fu_from, fu).max(rel3(fv_from, fv));

    let det = data.frame_det;
    let volume = (det - rho * rho / vol_nu).abs() / det.abs();

    let delta = det * vol_nu / rho;
    let lemma = [
        [-la::dot3(nu_uu, xi) / delta, -la::dot3(nu_uv, xi) / delta],
        [-la::dot3(nu_uv, xi) / delta, -la::dot3(nu_vv, xi) / delta],
    ];
    let b = data.b;
    let b_scale = b.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let mut shape_operator: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            shape_operator = shape_operator.max((lemma[i][j] - b[i][j]).abs() / b_scale.max(1.0));
        }
    }
    let blaschke = scene.xi.is_blaschke().then(|| {
        ((vol_nu.abs() - rho).abs().max((det.abs() - rho).abs())) / rho.abs()
    });
    Ok(IsoReport {
        rho,
        xi_from_conormal,
        conormal_pairings,
        tangents_from_conormal,
        volume,
        shape_operator,
        delta: (delta - rho).abs() / rho.abs(),
        blaschke,
    })
}

/// Blaschke volume normalisation in arbitrary coordinates:
/// `|[f_u, f_v, ξ]| = |[ν, ν_u, ν_v]| = sqrt(det h)`, relative residual. Both
/// determinants carry the orientation sign of the chart.
pub fn blaschke_volume_residual(scene: &SurfaceScene, u: f64, v: f64) -> Result<f64> {
    let s = scene.structure(u, v, 1)?;
    let h = s.h_values();
    let root = (h[0][0] * h[1][1] - h[0][1] * h[1][0]).sqrt();
    let nu = la::values(&s.nu);
    let vol_nu = la::det33(nu, la::values(&la::du(&s.nu)), la::values(&la::dv(&s.nu)));
    Ok(((s.det.value().abs() - root).abs().max((vol_nu.abs() - root).abs())) / root)
}

/// Numeric Blaschke normal of the scene's immersion at a point.
pub fn blaschke_normal_at(scene: &SurfaceScene, u: f64, v: f64) -> Result<[f64; 3]> {
    let f = scene.f.jets_at(u, v, 3)?;
    Ok(la::values(&blaschke_normal(&f, u, v)?))
}
