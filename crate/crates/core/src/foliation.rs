//! Curvature lines: integration of the two eigen-direction fields of `B`,
//! direction rotation around loops, SVG phase portraits and CSV samples of
//! `𝓑`.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};
use std::fmt::Write as _;

use serde::Serialize;

use crate::congruence::shape_directions;
use crate::error::{Error, Result};
use crate::geometry::{Domain, SurfaceScene};
use crate::linalg as la;
use crate::par::{self, Execution};
use crate::umbilics::{b_field_sample, shape_floor};

/// The two curvature-line fields of a scene, as unoriented coordinate
/// directions. Family 0 belongs to the larger eigenvalue of `B`.
#[derive(Debug, Clone, Copy)]
pub struct DirectionField<'a> {
    pub scene: &'a SurfaceScene,
    /// Relative eigenvalue gap below which the directions are undefined.
    pub tol: f64,
}

impl<'a> DirectionField<'a> {
    /// Fails with `AllUmbilic` when `𝓑` vanishes (relative to the shape
    /// operator, floored by [`shape_floor`]) on a 9×9 sample grid.
    pub fn new(scene: &'a SurfaceScene, tol: f64) -> Result<Self> {
        let mut b_max: f64 = 0.0;
        let mut scale = shape_floor(scene)?;
        for (u, v) in scene.domain.grid(9) {
            let (b, s) = b_field_sample(scene, u, v)?;
            b_max = b_max.max(b[0].hypot(b[1]));
            scale = scale.max(s);
        }
        if b_max <= 1e-9 * scale {
            return Err(Error::AllUmbilic);
        }
        Ok(DirectionField { scene, tol })
    }

    /// Unit coordinate directions of both families, or `None` where the
    /// eigenvalues (nearly) coincide.
    pub fn directions(&self, u: f64, v: f64) -> Result<Option<[[f64; 2]; 2]>> {
        let b = self.scene.structure(u, v, 0)?.b_values();
        Ok(shape_directions(b, self.tol))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Boundary,
    MaxLength,
    /// Within the stop radius of a known umbilic.
    NearUmbilic,
    /// The direction field became undefined before any known umbilic was
    /// reached.
    EnteredUmbilicRegion,
    /// The line came back to its seed; `gap` is the distance in space.
    Closed { gap: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub family: usize,
    /// Parameter points, not wrapped into a periodic domain (consecutive
    /// points stay close).
    pub points: Vec<[f64; 2]>,
    /// Length in space.
    pub length: f64,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineOptions {
    pub family: usize,
    /// Integrate against the initial orientation.
    pub backward: bool,
    /// Initial step, in space arclength.
    pub step: f64,
    /// Largest step, in space arclength.
    pub max_step: f64,
    /// Local error per step, in parameter units.
    pub tol: f64,
    pub max_length: f64,
    /// Parameter-space radius around `umbilics` where integration stops.
    pub stop_radius: f64,
    pub umbilics: Vec<[f64; 2]>,
    /// Distance in space below which a returning line counts as closed.
    pub closure_tol: f64,
    pub max_steps: usize,
}

impl Default for LineOptions {
    fn default() -> Self {
        LineOptions {
            family: 0,
            backward: false,
            step: 0.02,
            max_step: 0.01,
            tol: 1e-11,
            max_length: 50.0,
            stop_radius: 0.02,
            umbilics: Vec::new(),
            closure_tol: 1e-3,
            max_steps: 200_000,
        }
    }
}

enum Velocity {
    Defined([f64; 2]),
    Undefined,
}

struct Integrator<'f, 'a> {
    field: &'f DirectionField<'a>,
    family: usize,
}

impl Integrator<'_, '_> {
    /// Direction of the family at `p`, oriented along `reference`, scaled to
    /// unit speed in space.
    fn velocity(&self, p: [f64; 2], reference: [f64; 2]) -> Result<Velocity> {
        let (u, v) = self.field.scene.domain.wrap(p[0], p[1]);
        let p = [u, v];
        let d = match self.field.directions(p[0], p[1])? {
            Some(d) => d[self.family],
            None => return Ok(Velocity::Undefined),
        };
        let f = self.field.scene.f.jets_at(p[0], p[1], 1)?;
        let fu = [f[0].coeff(1, 0), f[1].coeff(1, 0), f[2].coeff(1, 0)];
        let fv = [f[0].coeff(0, 1), f[1].coeff(0, 1), f[2].coeff(0, 1)];
        let speed = la::norm3(la::axpy3(d[0], fu, la::axpy3(d[1], fv, [0.0; 3])));
        let sign = if d[0] * reference[0] + d[1] * reference[1] < 0.0 { -1.0 } else { 1.0 };
        Ok(Velocity::Defined([sign * d[0] / speed, sign * d[1] / speed]))
    }

    /// One RK4 step; `None` if the field is undefined at a stage.
    fn rk4(&self, p: [f64; 2], k1: [f64; 2], h: f64) -> Result<Option<[f64; 2]>> {
        let at = |q: [f64; 2], r: [f64; 2]| -> Result<Option<[f64; 2]>> {
            Ok(match self.velocity(q, r)? {
                Velocity::Defined(k) => Some(k),
                Velocity::Undefined => None,
            })
        };
        let Some(k2) = at([p[0] + 0.5 * h * k1[0], p[1] + 0.5 * h * k1[1]], k1)? else {
            return Ok(None);
        };
        let Some(k3) = at([p[0] + 0.5 * h * k2[0], p[1] + 0.5 * h * k2[1]], k2)? else {
            return Ok(None);
        };
        let Some(k4) = at([p[0] + h * k3[0], p[1] + h * k3[1]], k3)? else {
            return Ok(None);
        };
        Ok(Some([
            p[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            p[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]))
    }
}

fn angle_between(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]).abs()
}

/// Distance from `p` to the segment `[a, b]`, if the projection falls inside.
fn segment_distance(a: [f64; 3], b: [f64; 3], p: [f64; 3]) -> Option<f64> {
    let ab = la::sub3(b, a);
    let len2 = la::dot3(ab, ab);
    if len2 == 0.0 {
        return None;
    }
    let s = la::dot3(la::sub3(p, a), ab) / len2;
    (0.0..=1.0)
        .contains(&s)
        .then(|| la::norm3(la::sub3(la::axpy3(s, ab, a), p)))
}

/// Adaptive RK4 (step doubling) along one family from `seed`, choosing at
/// every stage the orientation closest to the previous direction and
/// halving steps that turn by more than 60°.
pub fn integrate_line(field: &DirectionField, seed: [f64; 2], opts: &LineOptions) -> Result<Polyline> {
    let scene = field.scene;
    let domain = &scene.domain;
    let near_umbilic = |p: [f64; 2]| {
        opts.umbilics
            .iter()
            .any(|q| crate::umbilics::param_distance(domain, *q, p) < opts.stop_radius)
    };
    if near_umbilic(seed) {
        return Err(Error::PreconditionFailed(format!("seed {seed:?} is within the stop radius of an umbilic")));
    }
    let integ = Integrator { field, family: opts.family };
    let initial = match field.directions(seed[0], seed[1])? {
        Some(d) => d[opts.family],
        None => return Err(Error::PreconditionFailed(format!("seed {seed:?} is an umbilic"))),
    };
    let sign = if opts.backward { -1.0 } else { 1.0 };
    let mut dir = [sign * initial[0], sign * initial[1]];
    let seed_pos = scene.position(seed[0], seed[1])?;
    let scale = domain.width().max(domain.height());
    let h_min = 1e-12 * scale;
    let mut p = seed;
    let mut pos = seed_pos;
    let mut points = vec![seed];
    let mut length = 0.0;
    let mut h = opts.step;
    let mut left_seed = false;
    for _ in 0..opts.max_steps {
        if length >= opts.max_length {
            return Ok(Polyline { family: opts.family, points, length, termination: Termination::MaxLength });
        }
        let k1 = match integ.velocity(p, dir)? {
            Velocity::Defined(k) => k,
            Velocity::Undefined => {
                return Ok(Polyline {
                    family: opts.family,
                    points,
                    length,
                    termination: Termination::EnteredUmbilicRegion,
                })
            }
        };
        h = h.min(opts.max_step).min(opts.max_length - length).max(h_min);
        let accepted = loop {
            let trial = match (integ.rk4(p, k1, h)?, integ.rk4(p, k1, 0.5 * h)?) {
                (Some(full), Some(mid)) => {
                    let k_mid = match integ.velocity(mid, k1)? {
                        Velocity::Defined(k) => k,
                        Velocity::Undefined => [f64::NAN; 2],
                    };
                    if k_mid[0].is_nan() {
                        None
                    } else {
                        integ.rk4(mid, k_mid, 0.5 * h)?.map(|two| {
                            let err = (two[0] - full[0]).hypot(two[1] - full[1]);
                            // Richardson extrapolation of the two half steps
                            let q = [two[0] + (two[0] - full[0]) / 15.0, two[1] + (two[1] - full[1]) / 15.0];
                            (q, err)
                        })
                    }
                }
                _ => None,
            };
            let ok = match trial {
                Some((q, err)) if err <= opts.tol => {
                    let (qu, qv) = domain.wrap(q[0], q[1]);
                    if !domain.contains(qu, qv) {
                        // one clipped step onto the edge, then stop
                        let (pu, pv) = domain.wrap(p[0], p[1]);
                        let to_edge = domain.edge_distance(pu, pv);
                        let speed = k1[0].hypot(k1[1]);
                        let hb = to_edge / speed;
                        if to_edge > 1e-9 * scale && hb < h {
                            if let Some(qb) = integ.rk4(p, k1, hb * (1.0 - 1e-9))? {
                                let pos_b = scene.position(qb[0], qb[1])?;
                                length += la::norm3(la::sub3(pos_b, pos));
                                points.push(qb);
                            }
                        }
                        return Ok(Polyline { family: opts.family, points, length, termination: Termination::Boundary });
                    } else {
                        match integ.velocity(q, k1)? {
                            Velocity::Defined(k) if angle_between(k1, k) <= FRAC_PI_3 => Some((q, k, err)),
                            _ => None,
                        }
                    }
                }
                _ => None,
            };
            if let Some(x) = ok {
                break Some(x);
            }
            if h <= h_min {
                break None;
            }
            h = (0.5 * h).max(h_min);
        };
        let Some((q, k, err)) = accepted else {
            // the last step could not be completed: find out why
            let (qu, qv) = domain.wrap(p[0] + h * k1[0], p[1] + h * k1[1]);
            let (pu, pv) = domain.wrap(p[0], p[1]);
            let termination = if !domain.contains(qu, qv) || domain.edge_distance(pu, pv) < 1e-9 * scale {
                Termination::Boundary
            } else if field.directions(qu, qv)?.is_none() || field.directions(pu, pv)?.is_none() {
                Termination::EnteredUmbilicRegion
            } else {
                return Err(Error::StepUnderflow { u: p[0], v: p[1] });
            };
            return Ok(Polyline { family: opts.family, points, length, termination });
        };
        let new_pos = scene.position(q[0], q[1])?;
        let chord = la::norm3(la::sub3(new_pos, pos));
        length += chord;
        if la::norm3(la::sub3(new_pos, seed_pos)) > 4.0 * opts.closure_tol.max(h) {
            left_seed = true;
        }
        if left_seed {
            if let Some(gap) = segment_distance(pos, new_pos, seed_pos) {
                if gap < opts.closure_tol {
                    points.push(q);
                    return Ok(Polyline {
                        family: opts.family,
                        points,
                        length,
                        termination: Termination::Closed { gap },
                    });
                }
            }
        }
        points.push(q);
        p = q;
        pos = new_pos;
        dir = k;
        if near_umbilic(p) {
            return Ok(Polyline { family: opts.family, points, length, termination: Termination::NearUmbilic });
        }
        let grow = if err > 0.0 { 0.9 * (opts.tol / err).powf(0.2) } else { 2.0 };
        h = (h * grow.clamp(0.5, 2.0)).min(opts.max_step);
    }
    Ok(Polyline { family: opts.family, points, length, termination: Termination::MaxLength })
}

/// Both half-lines through `seed`, joined into one polyline (backward part
/// reversed). The termination reported is that of the forward half unless
/// it closed.
pub fn integrate_full_line(field: &DirectionField, seed: [f64; 2], opts: &LineOptions) -> Result<Polyline> {
    let fwd = integrate_line(field, seed, &LineOptions { backward: false, ..opts.clone() })?;
    if matches!(fwd.termination, Termination::Closed { .. }) {
        return Ok(fwd);
    }
    let bwd = integrate_line(field, seed, &LineOptions { backward: true, ..opts.clone() })?;
    let mut points: Vec<[f64; 2]> = bwd.points.into_iter().rev().collect();
    points.extend_from_slice(&fwd.points[1..]);
    Ok(Polyline {
        family: opts.family,
        points,
        length: fwd.length + bwd.length,
        termination: fwd.termination,
    })
}

fn line_direction_angle(d: [f64; 2]) -> f64 {
    d[1].atan2(d[0])
}

/// Nearest representative of `a` modulo `π` to `reference`.
fn unwrap_line(a: f64, reference: f64) -> f64 {
    a - PI * ((a - reference) / PI).round()
}

/// Total rotation of the family-0 line field along the circle of the given
/// parameter radius, in turns; always a multiple of ½. Angle increments are
/// refined until each is below π/4.
pub fn loop_rotation(field: &DirectionField, center: [f64; 2], radius: f64) -> Result<f64> {
    let angle_at = |t: f64| -> Result<f64> {
        let (u, v) = field.scene.domain.wrap(center[0] + radius * t.cos(), center[1] + radius * t.sin());
        match field.directions(u, v)? {
            Some(d) => Ok(line_direction_angle(d[0])),
            None => Err(Error::ZeroOnLoop),
        }
    };
    fn refine<F: Fn(f64) -> Result<f64>>(angle_at: &F, t0: f64, a0: f64, t1: f64, a1: f64, depth: u32) -> Result<f64> {
        let d = unwrap_line(a1, a0) - a0;
        if d.abs() < FRAC_PI_4 {
            return Ok(d);
        }
        if depth == 0 || t1 - t0 < 1e-12 {
            return Err(Error::ZeroOnLoop);
        }
        let tm = 0.5 * (t0 + t1);
        let am = angle_at(tm)?;
        Ok(refine(angle_at, t0, a0, tm, am, depth - 1)? + refine(angle_at, tm, am, t1, a1, depth - 1)?)
    }
    let n = 128;
    let dt = 2.0 * PI / n as f64;
    let first = angle_at(0.0)?;
    let mut prev = first;
    let mut total = 0.0;
    for k in 1..=n {
        let a = if k == n { first } else { angle_at(dt * k as f64)? };
        total += refine(&angle_at, dt * (k - 1) as f64, prev, dt * k as f64, a, 40)?;
        prev = a;
    }
    Ok((total / PI).round() / 2.0)
}

/// `|h(d₀, d₁)| / (|d₀|_h |d₁|_h)` for the two families at a point.
pub fn h_orthogonality(field: &DirectionField, u: f64, v: f64) -> Result<Option<f64>> {
    let Some(d) = field.directions(u, v)? else {
        return Ok(None);
    };
    let h = field.scene.structure(u, v, 0)?.h_values();
    let ip = |a: [f64; 2], b: [f64; 2]| {
        a[0] * (h[0][0] * b[0] + h[0][1] * b[1]) + a[1] * (h[1][0] * b[0] + h[1][1] * b[1])
    };
    Ok(Some(ip(d[0], d[1]).abs() / (ip(d[0], d[0]).abs() * ip(d[1], d[1]).abs()).sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UmbilicMarker {
    pub location: [f64; 2],
    /// Foliation index, if known.
    pub index: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Portrait {
    pub domain: Domain,
    pub lines: Vec<Polyline>,
    pub umbilics: Vec<UmbilicMarker>,
}

#[derive(Debug, Clone)]
pub struct PortraitOptions {
    /// Seeds per axis, placed at the centers of an `n × n` grid of cells.
    pub seeds: usize,
    pub line: LineOptions,
    pub exec: Execution,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        PortraitOptions {
            seeds: 6,
            line: LineOptions::default(),
            exec: Execution::default(),
        }
    }
}

/// Curvature lines of both families through a fixed seed layout. Seeds on
/// an umbilic or within the stop radius of a marker are skipped.
pub fn portrait(field: &DirectionField, umbilics: &[UmbilicMarker], opts: &PortraitOptions) -> Result<Portrait> {
    let d = &field.scene.domain;
    let n = opts.seeds;
    let mut jobs = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let u = d.u[0] + d.width() * (i as f64 + 0.5) / n as f64;
            let v = d.v[0] + d.height() * (j as f64 + 0.5) / n as f64;
            for family in 0..2 {
                jobs.push(([u, v], family));
            }
        }
    }
    let mut line = opts.line.clone();
    line.umbilics.extend(umbilics.iter().map(|m| m.location));
    let results = par::map(opts.exec, &jobs, |(seed, family)| {
        let near = line
            .umbilics
            .iter()
            .any(|q| crate::umbilics::param_distance(d, *q, *seed) < line.stop_radius);
        if near || field.directions(seed[0], seed[1])?.is_none() {
            return Ok(None);
        }
        integrate_full_line(field, *seed, &LineOptions { family: *family, ..line.clone() }).map(Some)
    });
    let lines = results.into_iter().filter_map(|r| r.transpose()).collect::<Result<Vec<_>>>()?;
    Ok(Portrait {
        domain: d.clone(),
        lines,
        umbilics: umbilics.to_vec(),
    })
}

/// Formats with 9 significant digits, trailing zeros removed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (8 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn index_label(index: Option<f64>) -> String {
    match index {
        None => "?".into(),
        Some(i) => {
            let twice = (2.0 * i).round() as i64;
            let sign = if twice > 0 { "+" } else if twice < 0 { "-" } else { "" };
            if twice % 2 == 0 {
                format!("{sign}{}", (twice / 2).abs())
            } else {
                format!("{sign}{}/2", twice.abs())
            }
        }
    }
}

pub const SVG_WIDTH: f64 = 800.0;

/// SVG 1.1 document of a portrait in parameter space (`u` to the right, `v`
/// up). Lines crossing a periodic seam are split.
pub fn render_svg(p: &Portrait) -> String {
    let d = &p.domain;
    let w = SVG_WIDTH;
    let h = (w * d.height() / d.width()).clamp(100.0, 4.0 * w);
    let x = |u: f64| (u - d.u[0]) / d.width() * w;
    let y = |v: f64| (d.v[1] - v) / d.height() * h;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        fmt_sig(w),
        fmt_sig(h),
        fmt_sig(w),
        fmt_sig(h)
    );
    let _ = writeln!(
        s,
        "<style>.frame{{fill:none;stroke:#000;stroke-width:1}}.family0{{fill:none;stroke:#1f5fbf;stroke-width:0.8}}\
         .family1{{fill:none;stroke:#bf3f1f;stroke-width:0.8}}.umbilic{{fill:#000}}.label{{font:12px sans-serif}}</style>"
    );
    let _ = writeln!(s, r#"<rect class="frame" x="0" y="0" width="{}" height="{}"/>"#, fmt_sig(w), fmt_sig(h));
    for line in &p.lines {
        let mut pieces: Vec<Vec<[f64; 2]>> = vec![Vec::new()];
        let wrapped: Vec<[f64; 2]> = line.points.iter().map(|q| d.wrap(q[0], q[1]).into()).collect();
        for (k, q) in wrapped.iter().enumerate() {
            if k > 0 {
                let prev = wrapped[k - 1];
                if (q[0] - prev[0]).abs() > 0.5 * d.width() || (q[1] - prev[1]).abs() > 0.5 * d.height() {
                    pieces.push(Vec::new());
                }
            }
            pieces.last_mut().expect("non-empty").push(*q);
        }
        for piece in pieces.iter().filter(|p| p.len() > 1) {
            let pts: Vec<String> = piece
                .iter()
                .map(|q| format!("{},{}", fmt_sig(x(q[0])), fmt_sig(y(q[1]))))
                .collect();
            let _ = writeln!(s, r#"<polyline class="family{}" points="{}"/>"#, line.family, pts.join(" "));
        }
    }
    for m in &p.umbilics {
        let (cx, cy) = (fmt_sig(x(m.location[0])), fmt_sig(y(m.location[1])));
        let _ = writeln!(s, r#"<circle class="umbilic" cx="{cx}" cy="{cy}" r="4"/>"#);
        let _ = writeln!(
            s,
            r#"<text class="label" x="{}" y="{}">{}</text>"#,
            fmt_sig(x(m.location[0]) + 6.0),
            fmt_sig(y(m.location[1]) - 6.0),
            index_label(m.index)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// `𝓑` on an `n × n` grid (v outer), one row per node, header
/// `u,v,B1,B2`.
pub fn dump_csv(scene: &SurfaceScene, n: usize, exec: Execution) -> Result<String> {
    let nodes = scene.domain.grid(n);
    let rows = par::map(exec, &nodes, |&(u, v)| b_field_sample(scene, u, v).map(|(b, _)| (u, v, b)));
    let mut s = String::from("u,v,B1,B2\n");
    for r in rows {
        let (u, v, b) = r?;
        let _ = writeln!(s, "{},{},{},{}", fmt_sig(u), fmt_sig(v), fmt_sig(b[0]), fmt_sig(b[1]));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(std::f64::consts::PI), "3.14159265");
        assert_eq!(fmt_sig(-123456.789012), "-123456.789");
        assert_eq!(fmt_sig(1.5e-5), "0.000015");
        assert_eq!(fmt_sig(2.0 / 3.0 * 1e-3), "0.000666666667");
        assert_eq!(fmt_sig(1e12), "1000000000000");
    }

    #[test]
    fn index_labels() {
        assert_eq!(index_label(Some(0.5)), "+1/2");
        assert_eq!(index_label(Some(-0.5)), "-1/2");
        assert_eq!(index_label(Some(1.0)), "+1");
        assert_eq!(index_label(Some(0.0)), "0");
        assert_eq!(index_label(None), "?");
    }

    #[test]
    fn unwrap_line_angles() {
        assert!((unwrap_line(PI - 0.1, 0.0) + 0.1).abs() < 1e-15);
        assert!((unwrap_line(0.2, 3.0) - (0.2 + PI)).abs() < 1e-15);
    }

    #[test]
    fn empty_portrait_is_a_framed_document() {
        let p = Portrait {
            domain: Domain::new([0.0, 2.0], [0.0, 1.0]),
            lines: Vec::new(),
            umbilics: Vec::new(),
        };
        let svg = render_svg(&p);
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains(r#"<rect class="frame" x="0" y="0" width="800" height="400"/>"#));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("<polyline"));
    }
}
