//! Order, semi-homogeneity, index and jet identities at a single umbilic.

use serde::Serialize;

use super::field::{b_and_p_jets, b_field_jets, b_field_sample, p_field_base_order, umbilic_eigenvalue};
use super::index::{semi_homogeneity, stable_index, HomogeneousField};
use crate::error::{Error, Result};
use crate::geometry::SurfaceScene;
use crate::jets::{Jet2, MAX_ORDER};
use crate::linalg as la;

/// Relative threshold for "zero" jet coefficients at exactly known points.
pub const ORDER_TOL: f64 = 1e-9;
/// Threshold at Newton-located points: an order-k zero is only located to
/// about `eps^(1/k)`, which leaks into the lower-degree coefficients.
pub const LOCATED_ORDER_TOL: f64 = 1e-7;

/// Highest structure order available for the scene's transversal field.
pub fn max_structure_order(scene: &SurfaceScene) -> usize {
    MAX_ORDER - 2 - scene.xi.order_loss()
}

fn coeff_scale(jets: &[Jet2; 2], max_deg: usize) -> f64 {
    let mut m: f64 = 0.0;
    for j in jets {
        for d in 0..=max_deg {
            for (_, _, c) in j.homogeneous(d) {
                m = m.max(c.abs());
            }
        }
    }
    m
}

fn degree_max(jets: &[Jet2; 2], d: usize) -> f64 {
    jets.iter()
        .flat_map(|j| j.homogeneous(d))
        .fold(0.0, |m, (_, _, c)| m.max(c.abs()))
}

/// Order of the umbilic at `(u, v)`: the smallest degree `m <= max_k` whose
/// homogeneous part of 𝓑 has a coefficient above `tol × scale`. The scale is
/// the largest coefficient of 𝓑 over degrees `<= max_k`, floored by the norm
/// of the orthonormal shape operator. Returns the order and the jets of 𝓑.
pub fn umbilic_order(
    scene: &SurfaceScene,
    u: f64,
    v: f64,
    max_k: usize,
    tol: f64,
) -> Result<(usize, [Jet2; 2])> {
    let cap = max_structure_order(scene);
    if max_k > cap {
        return Err(Error::OrderExceedsMax {
            requested: max_k,
            max: cap,
        });
    }
    let jets = b_field_jets(scene, u, v, max_k)?;
    let (_, shape) = b_field_sample(scene, u, v)?;
    let scale = coeff_scale(&jets, max_k).max(shape);
    let zero = degree_max(&jets, 0);
    if zero > tol * scale {
        return Err(Error::NotUmbilic { u, v, norm: zero });
    }
    for m in 1..=max_k {
        if degree_max(&jets, m) > tol * scale {
            return Ok((m, jets));
        }
    }
    Err(Error::OrderExceedsMax {
        requested: max_k + 1,
        max: max_k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JetIdentity {
    pub k: usize,
    /// `max |J_k 𝓟 - λ0⁻¹ δ0 J_k 𝓑|` over coefficients of degree `<= k`,
    /// relative to the largest such coefficient.
    pub residual: f64,
    /// `|𝓟|` at the umbilic relative to `sqrt(det h) |p̂|`.
    pub p_at_umbilic: f64,
    pub lambda0: f64,
    pub delta0: f64,
}

/// Compares the k-jets of 𝓟 and `λ0⁻¹ δ0 𝓑` at an umbilic of order `>= k`.
pub fn jet_identity_check(scene: &SurfaceScene, u: f64, v: f64, k: usize, tol: f64) -> Result<JetIdentity> {
    let cap = MAX_ORDER - 2 - scene.xi.order_loss().max(1);
    let probe = k.min(cap).min(max_structure_order(scene));
    match umbilic_order(scene, u, v, probe, tol) {
        Ok((order, _)) if order < k => return Err(Error::OrderTooLow { order, requested: k }),
        Ok(_) | Err(Error::OrderExceedsMax { .. }) => {}
        Err(e) => return Err(e),
    }
    if p_field_base_order(scene, k) > MAX_ORDER {
        return Err(Error::OrderExceedsMax {
            requested: p_field_base_order(scene, k),
            max: MAX_ORDER,
        });
    }
    let (anchor, b, p) = b_and_p_jets(scene, u, v, k)?;
    let factor = anchor.delta0 / anchor.lambda0;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for c in 0..2 {
        for d in 0..=k {
            for ((_, _, pc), (_, _, bc)) in p[c].homogeneous(d).into_iter().zip(b[c].homogeneous(d)) {
                worst = worst.max((pc - factor * bc).abs());
                scale = scale.max(pc.abs()).max((factor * bc).abs());
            }
        }
    }
    let p_norm = p[0].value().hypot(p[1].value());
    let p_ref = anchor.delta0.abs() / anchor.lambda0.abs();
    Ok(JetIdentity {
        k,
        residual: worst / scale.max(f64::MIN_POSITIVE),
        p_at_umbilic: p_norm / p_ref,
        lambda0: anchor.lambda0,
        delta0: anchor.delta0,
    })
}

/// Largest coefficient of degrees `1..=k` in the jet of `f + ξ/λ0`,
/// relative to the largest coefficient of `f` over the same degrees. It
/// vanishes exactly when the umbilic has order `>= k` (for equiaffine ξ).
pub fn order_characterization_check(scene: &SurfaceScene, u: f64, v: f64, k: usize) -> Result<f64> {
    let s = scene.structure(u, v, 0)?;
    let (b, _) = b_field_sample(scene, u, v)?;
    let lambda0 = umbilic_eigenvalue(&s);
    let shape = (s.b[0][0].value().abs() + s.b[1][1].value().abs()).max(1e-300);
    if b[0].hypot(b[1]) > LOCATED_ORDER_TOL * shape {
        return Err(Error::NotUmbilic {
            u,
            v,
            norm: b[0].hypot(b[1]),
        });
    }
    let n = (k + scene.xi.order_loss()).max(s.f[0].order());
    if n > MAX_ORDER {
        return Err(Error::OrderExceedsMax {
            requested: n,
            max: MAX_ORDER,
        });
    }
    let frame = scene.frame_jets(u, v, n)?;
    let g = la::add(&frame.f, &la::scale(&Jet2::constant(1.0 / lambda0, n), &frame.xi));
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for c in 0..3 {
        for d in 1..=k {
            for ((_, _, gc), (_, _, fc)) in g[c].homogeneous(d).into_iter().zip(frame.f[c].homogeneous(d)) {
                worst = worst.max(gc.abs());
                scale = scale.max(fc.abs());
            }
        }
    }
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}

/// Order implied by the characterization: the largest `m <= max_k` for
/// which degrees `1..=m` of `f + ξ/λ0` vanish.
pub fn characterized_order(scene: &SurfaceScene, u: f64, v: f64, max_k: usize, tol: f64) -> Result<usize> {
    let mut m = 0;
    for k in 1..=max_k {
        if order_characterization_check(scene, u, v, k)? < tol {
            m = k;
        } else {
            break;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub max_k: usize,
    pub order_tol: f64,
    pub semi_tol: f64,
    /// Starting radius for the index loops.
    pub radius: f64,
    /// Absolute norm below which 𝓑 counts as zero on a loop.
    pub floor: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            max_k: 3,
            order_tol: LOCATED_ORDER_TOL,
            semi_tol: 1e-6,
            radius: 0.05,
            floor: 0.0,
        }
    }
}

/// Everything known about one isolated umbilic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UmbilicReport {
    pub location: [f64; 2],
    pub position: [f64; 3],
    pub lambda0: f64,
    pub delta0: f64,
    /// `|τ1| + |τ2|` at the umbilic.
    pub tau: f64,
    pub order: Option<usize>,
    pub characterized_order: Option<usize>,
    pub semi_homogeneous: Option<bool>,
    pub semi_margin: Option<f64>,
    pub b_index: Option<i32>,
    pub foliation_index: Option<f64>,
    /// Index of the leading homogeneous part of 𝓑 around the origin.
    pub jet_index: Option<i32>,
    pub index_radius: Option<f64>,
    pub jet_identity_residual: Option<f64>,
    pub p_at_umbilic: Option<f64>,
    pub notes: Vec<String>,
}

pub fn classify_umbilic(scene: &SurfaceScene, u: f64, v: f64, opts: &ClassifyOptions) -> Result<UmbilicReport> {
    let s = scene.structure(u, v, 1)?;
    let data = s.point_data(u, v);
    let mut report = UmbilicReport {
        location: [u, v],
        position: la::values(&s.f),
        lambda0: umbilic_eigenvalue(&s),
        delta0: data.delta,
        tau: data.tau[0].abs() + data.tau[1].abs(),
        order: None,
        characterized_order: None,
        semi_homogeneous: None,
        semi_margin: None,
        b_index: None,
        foliation_index: None,
        jet_index: None,
        index_radius: None,
        jet_identity_residual: None,
        p_at_umbilic: None,
        notes: vec![],
    };
    let max_k = opts.max_k.min(max_structure_order(scene));
    match umbilic_order(scene, u, v, max_k, opts.order_tol) {
        Ok((k, jets)) => {
            report.order = Some(k);
            let lead = HomogeneousField::from_jets(&jets, k);
            let semi = semi_homogeneity(&lead, opts.semi_tol);
            report.semi_homogeneous = Some(semi.semi_homogeneous);
            report.semi_margin = Some(semi.margin);
            if semi.semi_homogeneous {
                match lead.index() {
                    Ok(i) => report.jet_index = Some(i),
                    Err(e) => report.notes.push(format!("jet index: {e}")),
                }
            }
            match jet_identity_check(scene, u, v, k, opts.order_tol) {
                Ok(j) => {
                    report.jet_identity_residual = Some(j.residual);
                    report.p_at_umbilic = Some(j.p_at_umbilic);
                }
                Err(e) => report.notes.push(format!("jet identity: {e}")),
            }
        }
        Err(e) => report.notes.push(format!("order: {e}")),
    }
    match characterized_order(scene, u, v, max_k, opts.order_tol) {
        Ok(m) => report.characterized_order = Some(m),
        Err(e) => report.notes.push(format!("characterization: {e}")),
    }
    let field = |a: f64, b: f64| b_field_sample(scene, a, b).map(|x| x.0);
    match stable_index(&field, [u, v], opts.radius, opts.floor) {
        Ok((i, r)) => {
            report.b_index = Some(i);
            report.foliation_index = Some(f64::from(i) / 2.0);
            report.index_radius = Some(r);
        }
        Err(e) => report.notes.push(format!("index: {e}")),
    }
    Ok(report)
}
