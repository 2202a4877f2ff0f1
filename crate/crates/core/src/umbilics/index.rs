//! Winding numbers of planar fields around circles.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jets::{Jet2, Var};

fn wrap_angle(a: f64) -> f64 {
    let mut a = a.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

const INITIAL_SAMPLES: usize = 128;
const MIN_ARC: f64 = 1e-10;

/// Winding number of `field` around the circle of `radius` about `center`.
///
/// Consecutive samples are refined until every angular increment is below
/// `π/2`. The field counts as zero on the loop when its norm drops to `floor`
/// or when an increment cannot be resolved above an arc of `1e-10` rad.
pub fn winding_number<F>(field: &F, center: [f64; 2], radius: f64, floor: f64) -> Result<i32>
where
    F: Fn(f64, f64) -> Result<[f64; 2]>,
{
    let angle_at = |t: f64| -> Result<f64> {
        let w = field(center[0] + radius * t.cos(), center[1] + radius * t.sin())?;
        let n = w[0].hypot(w[1]);
        if !(n > floor) {
            return Err(Error::ZeroOnLoop);
        }
        Ok(w[1].atan2(w[0]))
    };
    let mut total = 0.0;
    let dt = 2.0 * PI / INITIAL_SAMPLES as f64;
    let first = angle_at(0.0)?;
    let mut prev = first;
    for k in 1..=INITIAL_SAMPLES {
        let t1 = dt * k as f64;
        let a1 = if k == INITIAL_SAMPLES { first } else { angle_at(t1)? };
        total += resolve(&angle_at, t1 - dt, prev, t1, a1)?;
        prev = a1;
    }
    Ok((total / (2.0 * PI)).round() as i32)
}

fn resolve<G>(angle_at: &G, t0: f64, a0: f64, t1: f64, a1: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let d = wrap_angle(a1 - a0);
    if d.abs() < 0.5 * PI {
        return Ok(d);
    }
    if t1 - t0 < MIN_ARC {
        return Err(Error::ZeroOnLoop);
    }
    let tm = 0.5 * (t0 + t1);
    let am = angle_at(tm)?;
    Ok(resolve(angle_at, t0, a0, tm, am)? + resolve(angle_at, tm, am, t1, a1)?)
}

/// Winding number at `radius` and `radius / 2`; `IndexUnstable` if they differ.
pub fn winding_index<F>(field: &F, center: [f64; 2], radius: f64, floor: f64) -> Result<i32>
where
    F: Fn(f64, f64) -> Result<[f64; 2]>,
{
    let a = winding_number(field, center, radius, floor)?;
    let b = winding_number(field, center, 0.5 * radius, floor)?;
    if a != b {
        return Err(Error::IndexUnstable { indices: vec![a, b] });
    }
    Ok(a)
}

/// Halves the radius from `r0` (at most six times) until the winding numbers
/// at `r` and `r/2` agree. Returns the index and the radius used.
pub fn stable_index<F>(field: &F, center: [f64; 2], r0: f64, floor: f64) -> Result<(i32, f64)>
where
    F: Fn(f64, f64) -> Result<[f64; 2]>,
{
    let mut indices = Vec::new();
    let mut zero_on_loop = false;
    let mut r = r0;
    for _ in 0..=6 {
        match winding_index(field, center, r, floor) {
            Ok(i) => return Ok((i, r)),
            Err(Error::IndexUnstable { indices: got }) => indices.extend(got),
            Err(Error::ZeroOnLoop) => zero_on_loop = true,
            Err(e) => return Err(e),
        }
        r *= 0.5;
    }
    if indices.is_empty() && zero_on_loop {
        return Err(Error::ZeroOnLoop);
    }
    Err(Error::IndexUnstable { indices })
}

/// Hessian deviator `W = (w_uu - w_vv, 2 w_uv)` of a scalar function.
pub fn hessian_deviator(w: &Expr, u: f64, v: f64) -> Result<[f64; 2]> {
    let j = w.eval_jet(&Jet2::variable(Var::U, u, 2), &Jet2::variable(Var::V, v, 2))?;
    Ok([j.coeff(2, 0) - j.coeff(0, 2), 2.0 * j.coeff(1, 1)])
}

/// Index of the Hessian deviator of `w` around `center`.
pub fn hessian_deviator_index(w: &Expr, center: [f64; 2], radius: f64) -> Result<i32> {
    let mut peak: f64 = 0.0;
    let mut hess: f64 = 0.0;
    for k in 0..64 {
        let t = 2.0 * PI * k as f64 / 64.0;
        let (u, v) = (center[0] + radius * t.cos(), center[1] + radius * t.sin());
        let j = w.eval_jet(&Jet2::variable(Var::U, u, 2), &Jet2::variable(Var::V, v, 2))?;
        let d = [j.coeff(2, 0) - j.coeff(0, 2), 2.0 * j.coeff(1, 1)];
        peak = peak.max(d[0].hypot(d[1]));
        hess = hess.max(j.coeff(2, 0).abs() + j.coeff(0, 2).abs() + j.coeff(1, 1).abs());
    }
    if peak <= 1e-12 * (1.0 + hess) {
        return Err(Error::PreconditionFailed(format!(
            "Hessian deviator of {w} vanishes identically near ({}, {})",
            center[0], center[1]
        )));
    }
    winding_index(&|u, v| hessian_deviator(w, u, v), center, radius, 0.0)
}

/// Homogeneous polynomial planar field of one degree, stored as Taylor
/// coefficients `a_j` of `x^(k-j) y^j` for each component.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HomogeneousField {
    pub degree: usize,
    pub coeffs: [Vec<f64>; 2],
}

impl HomogeneousField {
    /// Degree-`k` part of a pair of jets.
    pub fn from_jets(jets: &[Jet2; 2], k: usize) -> Self {
        let part = |j: &Jet2| {
            j.homogeneous(k)
                .into_iter()
                .map(|(a, b, c)| c / (factorial(a) * factorial(b)))
                .collect::<Vec<_>>()
        };
        HomogeneousField {
            degree: k,
            coeffs: [part(&jets[0]), part(&jets[1])],
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> [f64; 2] {
        let k = self.degree;
        let ev = |c: &[f64]| {
            c.iter()
                .enumerate()
                .map(|(j, a)| a * x.powi((k - j) as i32) * y.powi(j as i32))
                .sum::<f64>()
        };
        [ev(&self.coeffs[0]), ev(&self.coeffs[1])]
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().flatten().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Winding number around the unit circle.
    pub fn index(&self) -> Result<i32> {
        winding_number(&|x, y| Ok(self.eval(x, y)), [0.0, 0.0], 1.0, 0.0)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Result of the isolated-zero test for a homogeneous field.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SemiHomogeneity {
    pub semi_homogeneous: bool,
    /// `min_θ |J(cos θ, sin θ)| / max coefficient`.
    pub margin: f64,
}

const ANGLES: usize = 4096;

/// Whether the homogeneous field has an isolated zero at the origin: the
/// minimum of its norm on the unit half-circle (dense sampling followed by
/// golden-section refinement of the smallest samples) exceeds
/// `tol × max coefficient`.
pub fn semi_homogeneity(jet: &HomogeneousField, tol: f64) -> SemiHomogeneity {
    let scale = jet.max_coeff();
    if scale == 0.0 {
        return SemiHomogeneity {
            semi_homogeneous: false,
            margin: 0.0,
        };
    }
    let norm = |t: f64| {
        let w = jet.eval(t.cos(), t.sin());
        w[0].hypot(w[1])
    };
    let dt = PI / ANGLES as f64;
    let mut samples: Vec<(f64, f64)> = (0..ANGLES)
        .map(|k| {
            let t = dt * k as f64;
            (norm(t), t)
        })
        .collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = samples[0].0;
    for &(_, t) in samples.iter().take(8) {
        best = best.min(golden_min(&norm, t - dt, t + dt));
    }
    let margin = best / scale;
    SemiHomogeneity {
        semi_homogeneous: margin > tol,
        margin,
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd)
}
