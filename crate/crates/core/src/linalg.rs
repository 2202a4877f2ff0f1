//! Three-vector helpers over jets and reals.

use crate::jets::Jet2;

pub type JetVec = [Jet2; 3];

pub fn dot(a: &JetVec, b: &JetVec) -> Jet2 {
    &(&(&a[0] * &b[0]) + &(&a[1] * &b[1])) + &(&a[2] * &b[2])
}

pub fn cross(a: &JetVec, b: &JetVec) -> JetVec {
    [
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

/// Determinant `[a, b, c]` of three column vectors.
pub fn det3(a: &JetVec, b: &JetVec, c: &JetVec) -> Jet2 {
    dot(&cross(a, b), c)
}

pub fn add(a: &JetVec, b: &JetVec) -> JetVec {
    [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]]
}

pub fn sub(a: &JetVec, b: &JetVec) -> JetVec {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

pub fn scale(s: &Jet2, a: &JetVec) -> JetVec {
    [s * &a[0], s * &a[1], s * &a[2]]
}

pub fn du(a: &JetVec) -> JetVec {
    [a[0].du(), a[1].du(), a[2].du()]
}

pub fn dv(a: &JetVec) -> JetVec {
    [a[0].dv(), a[1].dv(), a[2].dv()]
}

pub fn values(a: &JetVec) -> [f64; 3] {
    [a[0].value(), a[1].value(), a[2].value()]
}

pub fn truncate(a: &JetVec, order: usize) -> JetVec {
    [a[0].truncate(order), a[1].truncate(order), a[2].truncate(order)]
}

pub fn order(a: &JetVec) -> usize {
    a.iter().map(Jet2::order).min().unwrap_or(0)
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn det33(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    dot3(cross3(a, b), c)
}

pub fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn axpy3(s: f64, a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [s * a[0] + b[0], s * a[1] + b[1], s * a[2] + b[2]]
}
