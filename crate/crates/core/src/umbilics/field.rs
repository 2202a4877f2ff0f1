//! The fields 𝓑 (traceless shape operator) and 𝓟 (Hessian deviator of the
//! support function), both in the h-orthonormal Gram–Schmidt frame.

use crate::error::{Error, Result};
use crate::geometry::{FrameJets, StructureJets, SurfaceScene};
use crate::jets::Jet2;
use crate::linalg as la;

/// `(b̂11 - b̂22, b̂12 + b̂21)` for the shape operator `b̂` in an h-orthonormal
/// frame. `b̂` is symmetric when τ = 0, so the second entry is `2 b̂12`.
pub fn b_field_from(shape: &[[Jet2; 2]; 2]) -> [Jet2; 2] {
    [&shape[0][0] - &shape[1][1], &shape[0][1] + &shape[1][0]]
}

/// Jets of 𝓑 at `(u, v)`, valid to `order`.
pub fn b_field_jets(scene: &SurfaceScene, u: f64, v: f64, order: usize) -> Result<[Jet2; 2]> {
    let s = scene.structure(u, v, order)?;
    Ok(b_field_from(&s.orthonormal_shape(u, v)?))
}

/// Value of 𝓑 and the Frobenius norm of the orthonormal shape operator.
pub fn b_field_sample(scene: &SurfaceScene, u: f64, v: f64) -> Result<([f64; 2], f64)> {
    let s = scene.structure(u, v, 0)?;
    let shape = s.orthonormal_shape(u, v)?;
    let b = b_field_from(&shape);
    let norm = shape
        .iter()
        .flatten()
        .map(|x| x.value() * x.value())
        .sum::<f64>()
        .sqrt();
    Ok(([b[0].value(), b[1].value()], norm))
}

/// Curvature scale `max |ξ| / diameter` from a 5×5 sample of the chart.
/// Used as a floor for the shape-operator scale so that a vanishing shape
/// operator (constant ξ) still has a meaningful round-off threshold.
pub fn shape_floor(scene: &SurfaceScene) -> Result<f64> {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    let mut xi_max: f64 = 0.0;
    for (u, v) in scene.domain.grid(5) {
        let frame = scene.frame_jets(u, v, scene.base_order(0)?)?;
        let (f, xi) = (la::values(&frame.f), la::values(&frame.xi));
        for k in 0..3 {
            lo[k] = lo[k].min(f[k]);
            hi[k] = hi[k].max(f[k]);
        }
        xi_max = xi_max.max(la::norm3(xi));
    }
    let diam = la::norm3(la::sub3(hi, lo));
    Ok(if diam > 0.0 { xi_max / diam } else { 0.0 })
}

pub fn b_field(scene: &SurfaceScene, u: f64, v: f64) -> Result<[f64; 2]> {
    Ok(b_field_sample(scene, u, v)?.0)
}

/// 𝓑 recomputed in the frame rotated by `theta`, directly from the rotated
/// shape matrix, together with the value predicted by rotating the
/// components of 𝓑 by `-2θ`.
pub fn rotated_b_field(scene: &SurfaceScene, u: f64, v: f64, theta: f64) -> Result<([f64; 2], [f64; 2])> {
    let s = scene.structure(u, v, 0)?;
    let b = s.orthonormal_shape(u, v)?.map(|r| r.map(|x| x.value()));
    let (c, sn) = (theta.cos(), theta.sin());
    let r = [[c, -sn], [sn, c]];
    let mut rt_b_r = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    rt_b_r[i][j] += r[k][i] * b[k][l] * r[l][j];
                }
            }
        }
    }
    let direct = [rt_b_r[0][0] - rt_b_r[1][1], rt_b_r[0][1] + rt_b_r[1][0]];
    let f = [b[0][0] - b[1][1], b[0][1] + b[1][0]];
    let (c2, s2) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    let predicted = [c2 * f[0] + s2 * f[1], -s2 * f[0] + c2 * f[1]];
    Ok((direct, predicted))
}

/// Common eigenvalue at an umbilic: mean of the coordinate diagonal of B.
pub fn umbilic_eigenvalue(s: &StructureJets) -> f64 {
    0.5 * (s.b[0][0].value() + s.b[1][1].value())
}

/// Order of the `f` jet needed for 𝓟 to order `k`.
pub fn p_field_base_order(scene: &SurfaceScene, k: usize) -> usize {
    k + 2 + scene.xi.order_loss().max(1)
}

/// Support-function field anchored at an umbilic: `p = ν·(f - q0)` with
/// `q0 = f0 + ξ0/λ0`, and
/// `𝓟 = sqrt(det h) (p̂11 - p̂22, 2 p̂12)`, `p̂ = Eᵀ Hess(p) E`,
/// where `E` is the Gram–Schmidt frame. In isothermal coordinates this is
/// `(p_uu - p_vv, 2 p_uv)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PField {
    pub q0: [f64; 3],
    pub lambda0: f64,
    /// `δ` at the anchor.
    pub delta0: f64,
}

impl PField {
    pub fn anchored(scene: &SurfaceScene, u: f64, v: f64) -> Result<Self> {
        let s = scene.structure(u, v, 1)?;
        let lambda0 = umbilic_eigenvalue(&s);
        if lambda0 == 0.0 {
            return Err(Error::PreconditionFailed(format!(
                "umbilic at ({u}, {v}) has zero eigenvalue; q0 is at infinity"
            )));
        }
        let data = s.point_data(u, v);
        let q0 = la::axpy3(1.0 / lambda0, data.xi, la::values(&s.f));
        Ok(PField {
            q0,
            lambda0,
            delta0: data.delta,
        })
    }

    /// Jets of 𝓟 at `(u, v)` valid to `order`.
    pub fn jets(&self, scene: &SurfaceScene, u: f64, v: f64, order: usize) -> Result<[Jet2; 2]> {
        let n = p_field_base_order(scene, order);
        if n > crate::jets::MAX_ORDER {
            return Err(Error::OrderExceedsMax {
                requested: n,
                max: crate::jets::MAX_ORDER,
            });
        }
        let frame = scene.frame_jets(u, v, n)?;
        let s = StructureJets::from_frame(&frame, u, v)?;
        self.jets_from(&frame, &s, u, v)
    }

    fn jets_from(&self, frame: &FrameJets, s: &StructureJets, u: f64, v: f64) -> Result<[Jet2; 2]> {
        let q = self.q0.map(|c| Jet2::constant(c, frame.f[0].order()));
        let p = la::dot(&s.nu, &la::sub(&frame.f, &q));
        let pu = p.du();
        let pv = p.dv();
        let (h11, h12, h22) = (pu.du(), pu.dv(), pv.dv());
        let [[g11, g12], [_, g22]] = &s.h;
        let det_h = &(g11 * g22) - &(g12 * g12);
        if g11.value() <= 0.0 || det_h.value() <= 0.0 {
            return Err(Error::NotConvex { u, v });
        }
        let root = det_h.sqrt()?;
        let sg = det_h.checked_div(g11)?.sqrt()?;
        let e11 = g11.sqrt()?.recip()?;
        let e22 = sg.recip()?;
        let e12 = -(g12.checked_div(&(g11 * &sg))?);
        let p11 = &(&e11 * &e11) * &h11;
        let p12 = &e11 * &(&(&e12 * &h11) + &(&e22 * &h12));
        let p22 = &(&(&(&e12 * &e12) * &h11) + &(&(&e12 * &e22) * &h12).scale(2.0))
            + &(&(&e22 * &e22) * &h22);
        Ok([&root * &(&p11 - &p22), (&root * &p12).scale(2.0)])
    }
}

/// Jets of 𝓑 and 𝓟 at an umbilic from one evaluation, valid to `order`.
pub fn b_and_p_jets(
    scene: &SurfaceScene,
    u: f64,
    v: f64,
    order: usize,
) -> Result<(PField, [Jet2; 2], [Jet2; 2])> {
    let anchor = PField::anchored(scene, u, v)?;
    let n = p_field_base_order(scene, order);
    if n > crate::jets::MAX_ORDER {
        return Err(Error::OrderExceedsMax {
            requested: n,
            max: crate::jets::MAX_ORDER,
        });
    }
    let frame = scene.frame_jets(u, v, n)?;
    let s = StructureJets::from_frame(&frame, u, v)?;
    let b = b_field_from(&s.orthonormal_shape(u, v)?);
    let p = anchor.jets_from(&frame, &s, u, v)?;
    Ok((anchor, b, p))
}
