//! Grid scan for zeros of 𝓑 followed by Newton refinement.

use std::f64::consts::PI;

use serde::Serialize;

use super::field::{b_field_jets, b_field_sample, shape_floor};
use super::index::winding_number;
use crate::error::{Error, Result};
use crate::geometry::{Domain, SurfaceScene};
use crate::par::{self, Execution};

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Nodes per axis.
    pub grid: usize,
    /// Relative tolerance: 𝓑 counts as zero below `tol × scale`, where the
    /// scale is the largest norm of the orthonormal shape operator on the grid,
    /// floored by [`super::shape_floor`].
    pub tol: f64,
    pub exec: Execution,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            grid: 48,
            tol: 1e-9,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UmbilicCandidate {
    pub location: [f64; 2],
    /// `|𝓑| / scale` at the refined point.
    pub residual: f64,
}

/// A connected set of non-isolated umbilics (for instance an umbilical
/// parallel), sampled by refined points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UmbilicRegion {
    pub points: Vec<[f64; 2]>,
    pub u_range: [f64; 2],
    pub v_range: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UmbilicSearch {
    /// `|𝓑|` is below tolerance on the whole grid.
    pub all_umbilic: bool,
    pub scale: f64,
    /// Smaller of the two grid steps.
    pub step: f64,
    pub points: Vec<UmbilicCandidate>,
    pub regions: Vec<UmbilicRegion>,
    /// Cells with a nonzero winding certificate where refinement failed.
    pub unresolved: Vec<[f64; 2]>,
}

enum Refined {
    Converged([f64; 2], f64),
    Stalled,
    Diverged,
}

/// Offset from `a` to `b`, taking the shortest way around periodic axes.
pub fn param_offset(d: &Domain, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let mut out = [b[0] - a[0], b[1] - a[1]];
    let ranges = [d.u, d.v];
    for k in 0..2 {
        if d.periodic[k] {
            let p = ranges[k][1] - ranges[k][0];
            out[k] -= p * (out[k] / p).round();
        }
    }
    out
}

pub fn param_distance(d: &Domain, a: [f64; 2], b: [f64; 2]) -> f64 {
    let o = param_offset(d, a, b);
    o[0].hypot(o[1])
}

fn refine(scene: &SurfaceScene, seed: [f64; 2], tol_abs: f64, step: f64) -> Refined {
    let d = &scene.domain;
    let norm_at = |p: [f64; 2]| -> Option<f64> {
        let (u, v) = d.wrap(p[0], p[1]);
        if !d.contains(u, v) {
            return None;
        }
        b_field_sample(scene, u, v).ok().map(|(b, _)| b[0].hypot(b[1]))
    };
    let mut x = seed;
    // Once below tolerance, keep polishing while the norm still halves:
    // zeros of higher order are otherwise located only to about tol^(1/k).
    let mut accepted: Option<([f64; 2], f64)> = None;
    for _ in 0..200 {
        let (u, v) = d.wrap(x[0], x[1]);
        x = [u, v];
        let Ok(jets) = b_field_jets(scene, u, v, 1) else {
            return match accepted {
                Some((a, n)) => Refined::Converged(a, n),
                None => Refined::Diverged,
            };
        };
        let f = [jets[0].value(), jets[1].value()];
        let norm = f[0].hypot(f[1]);
        if let Some((a, n)) = accepted {
            if norm > 0.5 * n {
                return Refined::Converged(if norm < n { x } else { a }, norm.min(n));
            }
        }
        if norm < tol_abs {
            if norm == 0.0 {
                return Refined::Converged(x, norm);
            }
            accepted = Some((x, norm));
        }
        let j = [
            [jets[0].coeff(1, 0), jets[0].coeff(0, 1)],
            [jets[1].coeff(1, 0), jets[1].coeff(0, 1)],
        ];
        // Levenberg–Marquardt step with a tiny damping: Newton where J is
        // regular, least-norm step along degenerate zero sets.
        let a11 = j[0][0] * j[0][0] + j[1][0] * j[1][0];
        let a12 = j[0][0] * j[0][1] + j[1][0] * j[1][1];
        let a22 = j[0][1] * j[0][1] + j[1][1] * j[1][1];
        let mu = 1e-14 * (a11 + a22);
        let (a11, a22) = (a11 + mu, a22 + mu);
        let g = [
            j[0][0] * f[0] + j[1][0] * f[1],
            j[0][1] * f[0] + j[1][1] * f[1],
        ];
        let det = a11 * a22 - a12 * a12;
        let dx = [-(a22 * g[0] - a12 * g[1]) / det, -(a11 * g[1] - a12 * g[0]) / det];
        if !(det > 0.0) || dx[0].hypot(dx[1]) < 1e-15 * step {
            return finish(accepted);
        }
        // Multiples of the Newton step reach zeros of higher order in one
        // step (for a homogeneous field of degree k the step is -x/k).
        let mut best: Option<([f64; 2], f64)> = None;
        for m in [1.0, 2.0, 3.0, 4.0, 0.5, 0.25, 0.125, 1.0 / 16.0, 1.0 / 64.0, 1.0 / 256.0] {
            if m < 1.0 && best.is_some() {
                break;
            }
            let y = [x[0] + m * dx[0], x[1] + m * dx[1]];
            if let Some(n) = norm_at(y) {
                if n < best.map_or(norm, |b| b.1) {
                    best = Some((y, n));
                }
            }
        }
        let Some((y, _)) = best else {
            return finish(accepted);
        };
        if param_distance(d, seed, y) > 4.0 * step {
            return Refined::Diverged;
        }
        x = y;
    }
    finish(accepted)
}

fn finish(accepted: Option<([f64; 2], f64)>) -> Refined {
    match accepted {
        Some((a, n)) => Refined::Converged(a, n),
        None => Refined::Stalled,
    }
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Locates the zeros of 𝓑 on the scene's domain.
///
/// Seeds are grid nodes where `|𝓑|` is a local minimum, cells whose corner
/// values wind around the origin, and edges across which 𝓑 reverses. Each
/// seed is refined by Newton's method with the Jacobian taken from jets.
/// Refined points where a small loop meets a zero of 𝓑 belong to a
/// non-isolated umbilic set and are grouped into regions.
pub fn find_umbilics(scene: &SurfaceScene, opts: &SearchOptions) -> Result<UmbilicSearch> {
    let n = opts.grid;
    let d = &scene.domain;
    let (us, vs) = d.axes(n);
    let nodes = d.grid(n);
    let samples = par::map(opts.exec, &nodes, |&(u, v)| b_field_sample(scene, u, v));
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    let scale = samples.iter().fold(shape_floor(scene)?, |m, s| m.max(s.1));
    let (hu, hv) = d.steps(n);
    let step = hu.min(hv);
    let tol_abs = opts.tol * scale;
    let norms: Vec<f64> = samples.iter().map(|s| s.0[0].hypot(s.0[1])).collect();
    if norms.iter().all(|&x| x <= tol_abs) {
        return Ok(UmbilicSearch {
            all_umbilic: true,
            scale,
            step,
            points: vec![],
            regions: vec![],
            unresolved: vec![],
        });
    }

    let ni = n as isize;
    let at = |i: isize, j: isize| -> Option<usize> {
        let wrap = |k: isize, p: bool| {
            if p {
                Some(k.rem_euclid(ni))
            } else if (0..ni).contains(&k) {
                Some(k)
            } else {
                None
            }
        };
        let i = wrap(i, d.periodic[0])?;
        let j = wrap(j, d.periodic[1])?;
        Some((j * ni + i) as usize)
    };
    let angle = |k: usize| samples[k].0[1].atan2(samples[k].0[0]);

    let mut seeds: Vec<([f64; 2], bool)> = Vec::new();
    for j in 0..ni {
        for i in 0..ni {
            let k = at(i, j).unwrap();
            let here = [us[i as usize], vs[j as usize]];
            let is_min = (-1..=1)
                .flat_map(|a| (-1..=1).map(move |b| (a, b)))
                .filter(|&ab| ab != (0, 0))
                .filter_map(|(a, b)| at(i + a, j + b))
                .all(|m| norms[k] <= norms[m]);
            if is_min {
                seeds.push((here, false));
            }
            for (a, b) in [(1, 0), (0, 1)] {
                if let Some(m) = at(i + a, j + b) {
                    let dot = samples[k].0[0] * samples[m].0[0] + samples[k].0[1] * samples[m].0[1];
                    if dot < 0.0 {
                        seeds.push(([here[0] + 0.5 * a as f64 * hu, here[1] + 0.5 * b as f64 * hv], false));
                    }
                }
            }
            if let (Some(b), Some(c), Some(e)) = (at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)) {
                let ring = [k, b, c, e, k];
                let turn: f64 = ring.windows(2).map(|w| wrap_angle(angle(w[1]) - angle(w[0]))).sum();
                if (turn / (2.0 * PI)).round() != 0.0 {
                    seeds.push(([here[0] + 0.5 * hu, here[1] + 0.5 * hv], true));
                }
            }
        }
    }

    let refined = par::map(opts.exec, &seeds, |&(s, _)| refine(scene, s, tol_abs, step));
    let mut converged: Vec<([f64; 2], f64)> = Vec::new();
    let mut unresolved = Vec::new();
    for (r, (seed, certified)) in refined.into_iter().zip(&seeds) {
        match r {
            Refined::Converged(x, nrm) => converged.push((x, nrm)),
            Refined::Diverged | Refined::Stalled if *certified => unresolved.push(*seed),
            _ => {}
        }
    }
    converged.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0[1].total_cmp(&b.0[1])).then(a.0[0].total_cmp(&b.0[0])));
    let mut distinct: Vec<([f64; 2], f64)> = Vec::new();
    for (x, nrm) in converged {
        if distinct.iter().all(|(y, _)| param_distance(d, x, *y) > 0.25 * step) {
            distinct.push((x, nrm));
        }
    }

    let radius = 0.5 * step;
    let isolated = par::map(opts.exec, &distinct, |(x, _)| {
        let field = |u: f64, v: f64| b_field_sample(scene, u, v).map(|s| s.0);
        !matches!(winding_number(&field, *x, radius, tol_abs), Err(Error::ZeroOnLoop))
    });
    let mut points: Vec<UmbilicCandidate> = Vec::new();
    let mut degenerate: Vec<[f64; 2]> = Vec::new();
    for ((x, nrm), iso) in distinct.into_iter().zip(isolated) {
        if !iso {
            degenerate.push(x);
        } else if points.iter().all(|p| param_distance(d, x, p.location) > 2.0 * step) {
            points.push(UmbilicCandidate {
                location: x,
                residual: nrm / scale,
            });
        }
    }
    points.sort_by(|a, b| a.location[1].total_cmp(&b.location[1]).then(a.location[0].total_cmp(&b.location[0])));
    unresolved.retain(|c: &[f64; 2]| {
        points.iter().all(|p| param_distance(d, *c, p.location) > 2.0 * step)
            && degenerate.iter().all(|p| param_distance(d, *c, *p) > 2.0 * step)
    });
    unresolved.sort_by(|a, b| a[1].total_cmp(&b[1]).then(a[0].total_cmp(&b[0])));
    unresolved.dedup();

    Ok(UmbilicSearch {
        all_umbilic: false,
        scale,
        step,
        points,
        regions: cluster(d, degenerate, 3.0 * step),
        unresolved,
    })
}

fn cluster(d: &Domain, pts: Vec<[f64; 2]>, link: f64) -> Vec<UmbilicRegion> {
    let n = pts.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if param_distance(d, pts[i], pts[j]) <= link {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<[f64; 2]>)> = Vec::new();
    for i in 0..n {
        let r = root(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(pts[i]),
            None => groups.push((r, vec![pts[i]])),
        }
    }
    let mut regions: Vec<UmbilicRegion> = groups
        .into_iter()
        .map(|(_, mut points)| {
            points.sort_by(|a, b| a[1].total_cmp(&b[1]).then(a[0].total_cmp(&b[0])));
            let range = |k: usize| {
                points.iter().fold([f64::INFINITY, f64::NEG_INFINITY], |r, p| [r[0].min(p[k]), r[1].max(p[k])])
            };
            UmbilicRegion {
                u_range: range(0),
                v_range: range(1),
                points,
            }
        })
        .collect();
    regions.sort_by(|a, b| a.v_range[0].total_cmp(&b.v_range[0]).then(a.u_range[0].total_cmp(&b.u_range[0])));
    regions
}
