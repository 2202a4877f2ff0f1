//! Truncated Taylor arithmetic ("jets") in one and two variables.
//!
//! A [`Jet2`] of order `N` carries every mixed partial derivative
//! `∂^{i+j} / ∂u^i ∂v^j` with `i + j <= N` of some quantity at a fixed base
//! point. The coefficients are the raw partials, not the Taylor-normalised
//! monomial coefficients, so `coeff(2, 0)` of `u^2` is `2`.
//!
//! Products follow the Leibniz rule and are truncated at total degree `N`.
//! Elementary functions are applied by composing their univariate Taylor
//! series with the non-constant part of the argument, which is exact up to
//! the truncation order. Binary operations between jets of different order
//! truncate to the smaller order: the result only knows what both operands
//! know.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

/// Largest order accepted for jets built by the geometry pipeline.
pub const MAX_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("division by a quantity whose value is zero")]
    DivisionByZeroValue,
    #[error("{0} evaluated outside its domain")]
    DomainError(ElementaryFn),
}

/// Elementary functions understood by both the jets and the expression
/// language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementaryFn {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Pow,
}

impl ElementaryFn {
    pub fn name(self) -> &'static str {
        match self {
            ElementaryFn::Sin => "sin",
            ElementaryFn::Cos => "cos",
            ElementaryFn::Tan => "tan",
            ElementaryFn::Exp => "exp",
            ElementaryFn::Ln => "ln",
            ElementaryFn::Sqrt => "sqrt",
            ElementaryFn::Pow => "pow",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => ElementaryFn::Sin,
            "cos" => ElementaryFn::Cos,
            "tan" => ElementaryFn::Tan,
            "exp" => ElementaryFn::Exp,
            "ln" => ElementaryFn::Ln,
            "sqrt" => ElementaryFn::Sqrt,
            _ => return None,
        })
    }
}

impl fmt::Display for ElementaryFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which of the two surface parameters a seed jet represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    U,
    V,
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `(sin x, cos x)` from separate libm calls. Adjacent calls are otherwise
/// fused into `sincos`, which can round differently from `sin` or `cos`
/// alone, and plain and jet evaluation would disagree in the last bit.
fn sin_and_cos(x: f64) -> (f64, f64) {
    (std::hint::black_box(x).sin(), std::hint::black_box(x).cos())
}

/// Derivatives `g^{(k)}(x)` for `k = 0..=n` of an elementary function.
fn derivatives(func: ElementaryFn, x: f64, n: usize, p: f64) -> Result<Vec<f64>, JetError> {
    let mut d = Vec::with_capacity(n + 1);
    match func {
        ElementaryFn::Exp => {
            let e = x.exp();
            d.resize(n + 1, e);
        }
        ElementaryFn::Sin | ElementaryFn::Cos => {
            let (s, c) = sin_and_cos(x);
            let cycle = if func == ElementaryFn::Sin {
                [s, c, -s, -c]
            } else {
                [c, -s, -c, s]
            };
            d.extend((0..=n).map(|k| cycle[k % 4]));
        }
        ElementaryFn::Ln => {
            if x <= 0.0 {
                return Err(JetError::DomainError(func));
            }
            d.push(x.ln());
            for k in 1..=n {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                d.push(sign * factorial(k - 1) / x.powi(k as i32));
            }
        }
        ElementaryFn::Sqrt | ElementaryFn::Pow => {
            let p = if func == ElementaryFn::Sqrt { 0.5 } else { p };
            let ok = if n == 0 { x >= 0.0 } else { x > 0.0 };
            if !ok {
                return Err(JetError::DomainError(func));
            }
            let mut falling = 1.0;
            for k in 0..=n {
                d.push(falling * x.powf(p - k as f64));
                falling *= p - k as f64;
            }
            if func == ElementaryFn::Sqrt {
                d[0] = x.sqrt();
            }
        }
        ElementaryFn::Tan => unreachable!("tan is evaluated as sin/cos"),
    }
    Ok(d)
}

/// Reciprocal derivatives `(1/x)^{(k)}`.
fn reciprocal_derivatives(x: f64, n: usize) -> Result<Vec<f64>, JetError> {
    if x == 0.0 {
        return Err(JetError::DivisionByZeroValue);
    }
    Ok((0..=n)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * factorial(k) / x.powi(k as i32 + 1)
        })
        .collect())
}

/// Operations shared by the one- and two-variable jets and by plain reals,
/// i.e. everything the expression evaluator needs.
pub trait Scalar: Clone + Send + Sync {
    fn constant_like(&self, c: f64) -> Self;
    fn value(&self) -> f64;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn try_div(&self, other: &Self) -> Result<Self, JetError>;
    fn apply(&self, func: ElementaryFn) -> Result<Self, JetError>;
    fn powf(&self, p: f64) -> Result<Self, JetError>;

    fn powi(&self, n: i32) -> Result<Self, JetError> {
        if n < 0 {
            let pos = self.powi(-n)?;
            return self.constant_like(1.0).try_div(&pos);
        }
        let mut result = self.constant_like(1.0);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }
}

impl Scalar for f64 {
    fn constant_like(&self, c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn try_div(&self, other: &Self) -> Result<Self, JetError> {
        if *other == 0.0 {
            Err(JetError::DivisionByZeroValue)
        } else {
            Ok(self / other)
        }
    }
    fn apply(&self, func: ElementaryFn) -> Result<Self, JetError> {
        let x = *self;
        Ok(match func {
            ElementaryFn::Sin => x.sin(),
            ElementaryFn::Cos => x.cos(),
            ElementaryFn::Tan => {
                let (s, c) = sin_and_cos(x);
                if c == 0.0 {
                    return Err(JetError::DivisionByZeroValue);
                }
                s / c
            }
            ElementaryFn::Exp => x.exp(),
            ElementaryFn::Ln => {
                if x <= 0.0 {
                    return Err(JetError::DomainError(func));
                }
                x.ln()
            }
            ElementaryFn::Sqrt => {
                if x < 0.0 {
                    return Err(JetError::DomainError(func));
                }
                x.sqrt()
            }
            ElementaryFn::Pow => unreachable!("pow takes an exponent"),
        })
    }
    fn powf(&self, p: f64) -> Result<Self, JetError> {
        if *self < 0.0 {
            return Err(JetError::DomainError(ElementaryFn::Pow));
        }
        Ok(f64::powf(*self, p))
    }
}

/// Shared plumbing for series composition.
trait Truncated: Scalar {
    fn order(&self) -> usize;
    /// The jet minus its value (a jet with zero constant term).
    fn centered(&self) -> Self;

    /// `g(self)` given `derivs[k] = g^{(k)}(self.value())`.
    fn compose_derivs(&self, derivs: &[f64]) -> Self {
        let delta = self.centered();
        let mut result = self.constant_like(derivs[0]);
        let mut power = self.constant_like(1.0);
        for (k, dk) in derivs.iter().enumerate().skip(1).take(self.order()) {
            power = power.mul(&delta);
            let term = power.scaled(dk / factorial(k));
            result = result.add(&term);
        }
        result
    }

    fn scaled(&self, s: f64) -> Self;

    fn apply_series(&self, func: ElementaryFn) -> Result<Self, JetError> {
        if func == ElementaryFn::Tan {
            let s = self.apply_series(ElementaryFn::Sin)?;
            let c = self.apply_series(ElementaryFn::Cos)?;
            return s.try_div(&c);
        }
        let d = derivatives(func, self.value(), self.order(), 0.0)?;
        Ok(self.compose_derivs(&d))
    }

    fn recip(&self) -> Result<Self, JetError> {
        let d = reciprocal_derivatives(self.value(), self.order())?;
        Ok(self.compose_derivs(&d))
    }
}

// ───────────────────────────── Jet2 ─────────────────────────────

#[inline]
fn index2(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

#[inline]
fn len2(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Bivariate jet: all partials `∂^{i+j}/∂u^i∂v^j` with `i + j <= order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    order: usize,
    coeffs: Vec<f64>,
}

impl Jet2 {
    pub fn constant(c: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; len2(order)];
        coeffs[0] = c;
        Jet2 { order, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(0.0, order)
    }

    /// Seed jet of the coordinate `which` at `base`.
    pub fn variable(which: Var, base: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut j = Self::constant(base, order);
        if order >= 1 {
            match which {
                Var::U => j.coeffs[index2(1, 0)] = 1.0,
                Var::V => j.coeffs[index2(0, 1)] = 1.0,
            }
        }
        j
    }

    /// Builds a jet from a closure giving `∂^{i+j}` for each `(i, j)`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut coeffs = vec![0.0; len2(order)];
        for d in 0..=order {
            for j in 0..=d {
                coeffs[index2(d - j, j)] = f(d - j, j);
            }
        }
        Jet2 { order, coeffs }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Raw coefficient slice, ordered by total degree then by `v`-degree.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Mixed partial `∂^{i+j} / ∂u^i ∂v^j` at the base point.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        assert!(i + j <= self.order, "partial ({i},{j}) beyond jet order {}", self.order);
        self.coeffs[index2(i, j)]
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Jet2 {
            order,
            coeffs: self.coeffs[..len2(order)].to_vec(),
        }
    }

    /// `∂/∂u`, one order lower. Panics on an order-0 jet.
    pub fn du(&self) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        Self::from_fn(self.order - 1, |i, j| self.coeffs[index2(i + 1, j)])
    }

    /// `∂/∂v`, one order lower. Panics on an order-0 jet.
    pub fn dv(&self) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        Self::from_fn(self.order - 1, |i, j| self.coeffs[index2(i, j + 1)])
    }

    /// Coefficients `(i, j, ∂^{i+j})` of total degree `deg`.
    pub fn homogeneous(&self, deg: usize) -> Vec<(usize, usize, f64)> {
        assert!(deg <= self.order);
        (0..=deg).map(|j| (deg - j, j, self.coeff(deg - j, j))).collect()
    }

    /// Evaluates the Taylor polynomial at the offset `(du, dv)`.
    pub fn taylor_eval(&self, du: f64, dv: f64) -> f64 {
        let mut s = 0.0;
        for d in 0..=self.order {
            for j in 0..=d {
                let i = d - j;
                s += self.coeffs[index2(i, j)] * du.powi(i as i32) * dv.powi(j as i32)
                    / (factorial(i) * factorial(j));
            }
        }
        s
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let order = self.order.min(other.order);
        let n = len2(order);
        Jet2 {
            order,
            coeffs: (0..n).map(|k| f(self.coeffs[k], other.coeffs[k])).collect(),
        }
    }

    fn leibniz(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut out = vec![0.0; len2(order)];
        for d in 0..=order {
            for j in 0..=d {
                let i = d - j;
                let mut acc = 0.0;
                for p in 0..=i {
                    let cp = binomial(i, p);
                    for q in 0..=j {
                        let a = self.coeffs[index2(p, q)];
                        if a == 0.0 {
                            continue;
                        }
                        acc += cp * binomial(j, q) * a * other.coeffs[index2(i - p, j - q)];
                    }
                }
                out[index2(i, j)] = acc;
            }
        }
        Jet2 { order, coeffs: out }
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet2 {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_const(&self, c: f64) -> Self {
        let mut r = self.clone();
        r.coeffs[0] += c;
        r
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        Truncated::recip(self)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, JetError> {
        let mut q = self.leibniz(&Truncated::recip(other)?);
        // same rounding as the plain quotient
        q.coeffs[0] = self.value() / other.value();
        Ok(q)
    }

    pub fn sin(&self) -> Self {
        self.apply_series(ElementaryFn::Sin).expect("sin is entire")
    }

    pub fn cos(&self) -> Self {
        self.apply_series(ElementaryFn::Cos).expect("cos is entire")
    }

    pub fn exp(&self) -> Self {
        self.apply_series(ElementaryFn::Exp).expect("exp is entire")
    }

    pub fn ln(&self) -> Result<Self, JetError> {
        self.apply_series(ElementaryFn::Ln)
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        self.apply_series(ElementaryFn::Sqrt)
    }

    pub fn pow_const(&self, p: f64) -> Result<Self, JetError> {
        let d = derivatives(ElementaryFn::Pow, self.value(), self.order, p)?;
        Ok(self.compose_derivs(&d))
    }
}

impl Default for Jet2 {
    fn default() -> Self {
        Jet2::constant(0.0, 0)
    }
}

impl Scalar for Jet2 {
    fn constant_like(&self, c: f64) -> Self {
        Jet2::constant(c, self.order)
    }
    fn value(&self) -> f64 {
        self.coeffs[0]
    }
    fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }
    fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }
    fn mul(&self, other: &Self) -> Self {
        self.leibniz(other)
    }
    fn neg(&self) -> Self {
        self.scale(-1.0)
    }
    fn try_div(&self, other: &Self) -> Result<Self, JetError> {
        self.checked_div(other)
    }
    fn apply(&self, func: ElementaryFn) -> Result<Self, JetError> {
        self.apply_series(func)
    }
    fn powf(&self, p: f64) -> Result<Self, JetError> {
        self.pow_const(p)
    }
}

impl Truncated for Jet2 {
    fn order(&self) -> usize {
        self.order
    }
    fn centered(&self) -> Self {
        let mut r = self.clone();
        r.coeffs[0] = 0.0;
        r
    }
    fn scaled(&self, s: f64) -> Self {
        self.scale(s)
    }
}

macro_rules! jet_binop {
    ($ty:ty, $trait:ident, $method:ident, $body:expr) => {
        impl $trait<&$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                $body(self, rhs)
            }
        }
        impl $trait<$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                $body(&self, &rhs)
            }
        }
        impl $trait<&$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                $body(&self, rhs)
            }
        }
        impl $trait<$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                $body(self, &rhs)
            }
        }
        impl $trait<f64> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: f64) -> $ty {
                $body(self, &self.constant_like(rhs))
            }
        }
        impl $trait<f64> for $ty {
            type Output = $ty;
            fn $method(self, rhs: f64) -> $ty {
                $body(&self, &self.constant_like(rhs))
            }
        }
    };
}

macro_rules! jet_ops {
    ($ty:ty) => {
        jet_binop!($ty, Add, add, |a: &$ty, b: &$ty| Scalar::add(a, b));
        jet_binop!($ty, Sub, sub, |a: &$ty, b: &$ty| Scalar::sub(a, b));
        jet_binop!($ty, Mul, mul, |a: &$ty, b: &$ty| Scalar::mul(a, b));
        // Division through the operator yields non-finite coefficients on a
        // zero divisor, like `f64`; `checked_div` reports it instead.
        jet_binop!($ty, Div, div, |a: &$ty, b: &$ty| {
            a.checked_div(b).unwrap_or_else(|_| a.constant_like(f64::NAN))
        });

        impl Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                Scalar::neg(&self)
            }
        }
        impl Neg for &$ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                Scalar::neg(self)
            }
        }
    };
}

jet_ops!(Jet2);
jet_ops!(Jet1);

// ───────────────────────────── Jet1 ─────────────────────────────

/// Univariate jet: derivatives `d^i/dt^i` for `i <= order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet1 {
    coeffs: Vec<f64>,
}

impl Jet1 {
    pub fn constant(c: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = c;
        Jet1 { coeffs }
    }

    pub fn variable(base: f64, order: usize) -> Self {
        let mut j = Self::constant(base, order);
        if order >= 1 {
            j.coeffs[1] = 1.0;
        }
        j
    }

    pub fn from_derivatives(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty());
        Jet1 { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `d^i/dt^i` at the base point.
    pub fn deriv(&self, i: usize) -> f64 {
        self.coeffs[i]
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Jet1 {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }

    /// `d/dt`, one order lower.
    pub fn derivative(&self) -> Self {
        assert!(self.order() >= 1, "cannot differentiate an order-0 jet");
        Jet1 {
            coeffs: self.coeffs[1..].to_vec(),
        }
    }

    /// Antiderivative with the given value at the base point, one order higher.
    pub fn integral(&self, value: f64) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(value);
        coeffs.extend_from_slice(&self.coeffs);
        Jet1 { coeffs }
    }

    /// `outer ∘ self`, where `outer` holds the derivatives of a function at
    /// `self.value()`.
    pub fn compose(&self, outer: &Jet1) -> Self {
        let n = self.order().min(outer.order());
        self.truncate(n).compose_derivs(&outer.coeffs[..=n])
    }

    pub fn taylor_eval(&self, dt: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * dt.powi(i as i32) / factorial(i))
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet1 {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, JetError> {
        let mut q = Scalar::mul(self, &Truncated::recip(other)?);
        q.coeffs[0] = self.value() / other.value();
        Ok(q)
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        self.apply_series(ElementaryFn::Sqrt)
    }

    pub fn pow_const(&self, p: f64) -> Result<Self, JetError> {
        let d = derivatives(ElementaryFn::Pow, self.value(), self.order(), p)?;
        Ok(self.compose_derivs(&d))
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        Jet1 {
            coeffs: (0..n).map(|k| f(self.coeffs[k], other.coeffs[k])).collect(),
        }
    }
}

impl Scalar for Jet1 {
    fn constant_like(&self, c: f64) -> Self {
        Jet1::constant(c, self.order())
    }
    fn value(&self) -> f64 {
        self.coeffs[0]
    }
    fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }
    fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }
    fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|m| {
                (0..=m)
                    .map(|k| binomial(m, k) * self.coeffs[k] * other.coeffs[m - k])
                    .sum()
            })
            .collect();
        Jet1 { coeffs }
    }
    fn neg(&self) -> Self {
        self.scale(-1.0)
    }
    fn try_div(&self, other: &Self) -> Result<Self, JetError> {
        self.checked_div(other)
    }
    fn apply(&self, func: ElementaryFn) -> Result<Self, JetError> {
        self.apply_series(func)
    }
    fn powf(&self, p: f64) -> Result<Self, JetError> {
        self.pow_const(p)
    }
}

impl Truncated for Jet1 {
    fn order(&self) -> usize {
        self.coeffs.len() - 1
    }
    fn centered(&self) -> Self {
        let mut r = self.clone();
        r.coeffs[0] = 0.0;
        r
    }
    fn scaled(&self, s: f64) -> Self {
        self.scale(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn variable_seeds() {
        let u = Jet2::variable(Var::U, 2.0, 2);
        assert_eq!(u.coeffs(), &[2.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let v = Jet2::variable(Var::V, 0.0, 1);
        assert_eq!((v.coeff(0, 0), v.coeff(0, 1), v.coeff(1, 0)), (0.0, 1.0, 0.0));
        let u3 = Jet2::variable(Var::U, 3.0, 2);
        let sq = &u3 * &u3;
        assert_eq!((sq.coeff(0, 0), sq.coeff(1, 0), sq.coeff(2, 0)), (9.0, 6.0, 2.0));
    }

    #[test]
    fn sin_of_u() {
        let s = Jet2::variable(Var::U, 0.0, 3).sin();
        assert_eq!(s.coeff(0, 0), 0.0);
        assert_eq!(s.coeff(1, 0), 1.0);
        assert_eq!(s.coeff(2, 0), 0.0);
        assert!(close(s.coeff(3, 0), -1.0, 1e-15));
    }

    #[test]
    fn product_rule() {
        let u = Jet2::variable(Var::U, 1.0, 2);
        let v = Jet2::variable(Var::V, 1.0, 2);
        let p = &u * &v;
        assert_eq!(p.coeff(0, 0), 1.0);
        assert_eq!(p.coeff(1, 0), 1.0);
        assert_eq!(p.coeff(0, 1), 1.0);
        assert_eq!(p.coeff(1, 1), 1.0);
        assert_eq!(p.coeff(2, 0), 0.0);
        assert_eq!(p.coeff(0, 2), 0.0);
    }

    #[test]
    fn exp_of_quadratic_matches_finite_differences() {
        // Frozen from central differences of exp(u^2 + v) at the origin, h = 1e-4.
        let g = |u: f64, v: f64| (u * u + v).exp();
        let h = 1e-4;
        let fd_v = (g(0.0, h) - g(0.0, -h)) / (2.0 * h);
        let fd_vv = (g(0.0, h) - 2.0 * g(0.0, 0.0) + g(0.0, -h)) / (h * h);
        let fd_uu = (g(h, 0.0) - 2.0 * g(0.0, 0.0) + g(-h, 0.0)) / (h * h);
        let u = Jet2::variable(Var::U, 0.0, 2);
        let v = Jet2::variable(Var::V, 0.0, 2);
        let e = (&u * &u + &v).exp();
        assert_eq!(e.coeff(0, 0), 1.0);
        assert!(close(e.coeff(0, 1), 1.0, 1e-15) && close(fd_v, 1.0, 1e-6));
        assert!(close(e.coeff(0, 2), 1.0, 1e-15) && close(fd_vv, 1.0, 1e-6));
        assert!(close(e.coeff(2, 0), 2.0, 1e-15) && close(fd_uu, 2.0, 1e-6));
        assert_eq!(e.coeff(1, 0), 0.0);
        assert_eq!(e.coeff(1, 1), 0.0);
    }

    #[test]
    fn domain_errors() {
        let z = Jet2::constant(0.0, 2);
        let one = Jet2::constant(1.0, 2);
        assert_eq!(one.checked_div(&z), Err(JetError::DivisionByZeroValue));
        assert_eq!(
            Jet2::constant(-1.0, 2).ln(),
            Err(JetError::DomainError(ElementaryFn::Ln))
        );
        assert_eq!(z.sqrt(), Err(JetError::DomainError(ElementaryFn::Sqrt)));
        assert!(Jet2::constant(0.0, 0).sqrt().is_ok());
    }

    #[test]
    fn mixed_orders_truncate() {
        let a = Jet2::variable(Var::U, 1.0, 4);
        let b = Jet2::variable(Var::V, 1.0, 2);
        assert_eq!((&a * &b).order(), 2);
        assert_eq!((&a + &b).order(), 2);
    }

    #[test]
    fn derivative_shifts() {
        let u = Jet2::variable(Var::U, 0.5, 4);
        let v = Jet2::variable(Var::V, -0.3, 4);
        let f = (&u * &v).sin();
        let fu = f.du();
        assert_eq!(fu.order(), 3);
        assert_eq!(fu.coeff(1, 1), f.coeff(2, 1));
        assert_eq!(f.dv().coeff(0, 2), f.coeff(0, 3));
    }

    #[test]
    fn taylor_eval_reproduces_polynomial() {
        let u = Jet2::variable(Var::U, 1.0, 3);
        let v = Jet2::variable(Var::V, 2.0, 3);
        let p = &(&u * &u) * &v;
        // u^2 v around (1, 2) is a cubic, so the 3-jet is exact.
        let exact = (1.3f64).powi(2) * 1.6;
        assert!(close(p.taylor_eval(0.3, -0.4), exact, 1e-14));
    }

    #[test]
    fn jet1_composition_and_integral() {
        let t = Jet1::variable(0.3, 5);
        let e = t.apply(ElementaryFn::Exp).unwrap();
        for k in 0..=5 {
            assert!(close(e.deriv(k), 0.3f64.exp(), 1e-14));
        }
        let d = e.derivative().integral(e.value());
        assert_eq!(d, e);
        // sin(exp(t)) via compose equals direct evaluation.
        let outer = Jet1::variable(e.value(), 5).apply(ElementaryFn::Sin).unwrap();
        let direct = e.apply(ElementaryFn::Sin).unwrap();
        let composed = e.compose(&outer);
        for k in 0..=5 {
            assert!(close(composed.deriv(k), direct.deriv(k), 1e-12));
        }
    }

    #[test]
    fn powi_negative() {
        let u = Jet2::variable(Var::U, 2.0, 2);
        let r = u.powi(-2).unwrap();
        assert!(close(r.coeff(0, 0), 0.25, 1e-15));
        assert!(close(r.coeff(1, 0), -0.25, 1e-15));
        assert!(close(r.coeff(2, 0), 6.0 / 16.0, 1e-15));
    }
}
