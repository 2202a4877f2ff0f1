//! Umbilic census of a closed surface covered by an atlas of charts.

use serde::Serialize;

use super::classify::{classify_umbilic, ClassifyOptions, UmbilicReport};
use super::search::{find_umbilics, SearchOptions, UmbilicRegion};
use crate::error::{Error, Result};
use crate::geometry::SurfaceScene;
use crate::linalg as la;
use crate::par;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusUmbilic {
    pub chart: usize,
    #[serde(flatten)]
    pub report: UmbilicReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusRegion {
    pub chart: usize,
    #[serde(flatten)]
    pub region: UmbilicRegion,
    pub positions: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub all_umbilic: bool,
    pub umbilics: Vec<CensusUmbilic>,
    pub regions: Vec<CensusRegion>,
    pub unresolved: Vec<(usize, [f64; 2])>,
    /// Sum of foliation indices when every umbilic is isolated, classified
    /// and semi-homogeneous.
    pub index_sum: Option<f64>,
    pub count: usize,
}

/// Preimage of `p` in a chart by Gauss–Newton from the nearest grid node.
fn locate(scene: &SurfaceScene, nodes: &[((f64, f64), [f64; 3])], p: [f64; 3], tol: f64) -> Option<[f64; 2]> {
    let start = nodes
        .iter()
        .min_by(|a, b| la::norm3(la::sub3(a.1, p)).total_cmp(&la::norm3(la::sub3(b.1, p))))?;
    let (mut u, mut v) = start.0;
    for _ in 0..30 {
        let f = scene.f.jets_at(u, v, 1).ok()?;
        let r = la::sub3(la::values(&f), p);
        if la::norm3(r) < tol {
            return Some([u, v]);
        }
        let fu = [f[0].coeff(1, 0), f[1].coeff(1, 0), f[2].coeff(1, 0)];
        let fv = [f[0].coeff(0, 1), f[1].coeff(0, 1), f[2].coeff(0, 1)];
        let (a, b, c) = (la::dot3(fu, fu), la::dot3(fu, fv), la::dot3(fv, fv));
        let (g0, g1) = (la::dot3(fu, r), la::dot3(fv, r));
        let det = a * c - b * b;
        if !(det > 0.0) {
            return None;
        }
        u -= (c * g0 - b * g1) / det;
        v -= (a * g1 - b * g0) / det;
        (u, v) = scene.domain.wrap(u, v);
    }
    None
}

/// Samples the non-periodic edges of every chart and requires each sample to
/// lie inside another chart, at least `margin_steps` grid steps from its
/// edges. Returns `ChartGap` with the first uncovered point.
pub fn check_coverage(atlas: &[SurfaceScene], grid: usize, margin_steps: f64) -> Result<()> {
    let samples = 64;
    let charts: Vec<_> = atlas
        .iter()
        .map(|s| {
            let nodes = s.domain.grid(40);
            let pts = nodes
                .iter()
                .map(|&(u, v)| Ok(((u, v), s.position(u, v)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(pts)
        })
        .collect::<Result<Vec<_>>>()?;
    let diam = charts
        .iter()
        .flatten()
        .flat_map(|a| charts.iter().flatten().map(move |b| la::norm3(la::sub3(a.1, b.1))))
        .fold(0.0f64, f64::max);
    for (ci, chart) in atlas.iter().enumerate() {
        let d = &chart.domain;
        let mut edge = Vec::new();
        for k in 0..samples {
            let t = (k as f64 + 0.5) / samples as f64;
            let (u, v) = (d.u[0] + t * d.width(), d.v[0] + t * d.height());
            if !d.periodic[1] {
                edge.push((u, d.v[0]));
                edge.push((u, d.v[1]));
            }
            if !d.periodic[0] {
                edge.push((d.u[0], v));
                edge.push((d.u[1], v));
            }
        }
        for (u, v) in edge {
            let p = chart.position(u, v)?;
            let covered = atlas.iter().enumerate().any(|(cj, other)| {
                if cj == ci {
                    return false;
                }
                let (hu, hv) = other.domain.steps(grid);
                match locate(other, &charts[cj], p, 1e-10 * diam.max(1.0)) {
                    Some(q) => {
                        other.domain.contains(q[0], q[1])
                            && other.domain.edge_distance(q[0], q[1]) >= margin_steps * hu.min(hv)
                    }
                    None => false,
                }
            });
            if !covered {
                return Err(Error::ChartGap { point: p });
            }
        }
    }
    Ok(())
}

/// Finds, classifies and deduplicates the umbilics of a closed surface.
///
/// Errors with `IndexSumMismatch` when all umbilics are isolated,
/// semi-homogeneous and indexed but their foliation indices do not sum to
/// the Euler characteristic 2.
pub fn umbilic_census(
    atlas: &[SurfaceScene],
    search: &SearchOptions,
    classify: &ClassifyOptions,
) -> Result<CensusReport> {
    check_coverage(atlas, search.grid, 2.0)?;
    let searches = atlas
        .iter()
        .map(|s| find_umbilics(s, search))
        .collect::<Result<Vec<_>>>()?;
    let all_umbilic = searches.iter().all(|s| s.all_umbilic);
    let mut umbilics: Vec<CensusUmbilic> = Vec::new();
    let mut regions: Vec<CensusRegion> = Vec::new();
    let mut unresolved = Vec::new();
    let mut diam: f64 = 0.0;
    for s in atlas {
        let (a, b) = (s.position(s.domain.u[0], s.domain.v[0])?, s.position(s.domain.u[1], s.domain.v[1])?);
        diam = diam.max(la::norm3(la::sub3(a, b)));
    }
    let merge = 1e-6 * diam.max(1.0);
    for (ci, (scene, found)) in atlas.iter().zip(&searches).enumerate() {
        let opts = ClassifyOptions {
            radius: 0.5 * found.step,
            floor: search.tol * found.scale,
            ..*classify
        };
        let interior: Vec<[f64; 2]> = found
            .points
            .iter()
            .map(|p| p.location)
            .filter(|x| scene.domain.edge_distance(x[0], x[1]) >= found.step)
            .collect();
        let reports = par::map(search.exec, &interior, |x| classify_umbilic(scene, x[0], x[1], &opts));
        for r in reports {
            let r = r?;
            if umbilics.iter().all(|u| la::norm3(la::sub3(u.report.position, r.position)) > merge) {
                umbilics.push(CensusUmbilic { chart: ci, report: r });
            }
        }
        for region in &found.regions {
            let positions = region
                .points
                .iter()
                .map(|x| scene.position(x[0], x[1]))
                .collect::<Result<Vec<_>>>()?;
            regions.push(CensusRegion {
                chart: ci,
                region: region.clone(),
                positions,
            });
        }
        unresolved.extend(found.unresolved.iter().map(|x| (ci, *x)));
    }
    let complete = regions.is_empty()
        && unresolved.is_empty()
        && !all_umbilic
        && umbilics
            .iter()
            .all(|u| u.report.semi_homogeneous == Some(true) && u.report.foliation_index.is_some());
    let index_sum = complete.then(|| umbilics.iter().filter_map(|u| u.report.foliation_index).sum::<f64>());
    if let Some(sum) = index_sum {
        if sum != 2.0 {
            return Err(Error::IndexSumMismatch { sum, expected: 2.0 });
        }
    }
    Ok(CensusReport {
        all_umbilic,
        count: umbilics.len(),
        umbilics,
        regions,
        unresolved,
        index_sum,
    })
}
