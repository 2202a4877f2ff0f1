//! Closed-form expressions for parameterizations and transversal fields.
//!
//! Grammar (whitespace-insensitive, no implicit multiplication):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := primary ('^' ['-' | '+'] NUMBER)?
//! primary  := NUMBER | 'pi' | PARAM | FUNC '(' expr ')' | '(' expr ')'
//! FUNC     := sin | cos | tan | exp | ln | sqrt
//! NUMBER   := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//! ```
//!
//! Parameters are declared by the caller (`u v` for surfaces, `t` for
//! profile curves). Expressions evaluate over any [`Scalar`]: plain `f64`,
//! [`Jet1`](crate::jets::Jet1) or [`Jet2`](crate::jets::Jet2).

use std::fmt;

use thiserror::Error;

use crate::jets::{ElementaryFn, JetError, Jet2, Scalar, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{function}` takes 1 argument, found {found} (byte {offset})")]
    Arity {
        function: String,
        found: usize,
        offset: usize,
    },
}

/// Evaluation failure with the byte offset of the offending node.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{source} (expression byte {offset})")]
pub struct EvalError {
    pub offset: usize,
    #[source]
    pub source: JetError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Num(f64),
    Pi,
    Var { index: usize, name: String },
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(ElementaryFn, Box<Expr>),
}

/// Expression tree node. Equality compares structure only, not source offsets.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub offset: usize,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Num(a), Num(b)) => a.to_bits() == b.to_bits(),
            (Pi, Pi) => true,
            (Var { index: a, name: n }, Var { index: b, name: m }) => a == b && n == m,
            (Neg(a), Neg(b)) => a == b,
            (Binary(o, a, b), Binary(p, c, d)) => o == p && a == c && b == d,
            (Pow(a, e), Pow(b, f)) => a == b && e.to_bits() == f.to_bits(),
            (Call(f, a), Call(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl Expr {
    fn node(kind: ExprKind) -> Self {
        Expr { kind, offset: 0 }
    }

    pub fn num(x: f64) -> Self {
        Self::node(ExprKind::Num(x))
    }

    pub fn var(index: usize, name: &str) -> Self {
        Self::node(ExprKind::Var {
            index,
            name: name.to_string(),
        })
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Self {
        Self::node(ExprKind::Binary(op, Box::new(a), Box::new(b)))
    }

    pub fn call(f: ElementaryFn, a: Expr) -> Self {
        Self::node(ExprKind::Call(f, Box::new(a)))
    }

    pub fn neg(a: Expr) -> Self {
        Self::node(ExprKind::Neg(Box::new(a)))
    }

    /// Replaces parameter `i` by `replacements[i]`.
    pub fn substitute(&self, replacements: &[Expr]) -> Expr {
        let kind = match &self.kind {
            ExprKind::Var { index, .. } => return replacements[*index].clone(),
            ExprKind::Num(x) => ExprKind::Num(*x),
            ExprKind::Pi => ExprKind::Pi,
            ExprKind::Neg(a) => ExprKind::Neg(Box::new(a.substitute(replacements))),
            ExprKind::Binary(op, a, b) => ExprKind::Binary(
                *op,
                Box::new(a.substitute(replacements)),
                Box::new(b.substitute(replacements)),
            ),
            ExprKind::Pow(a, e) => ExprKind::Pow(Box::new(a.substitute(replacements)), *e),
            ExprKind::Call(f, a) => ExprKind::Call(*f, Box::new(a.substitute(replacements))),
        };
        Expr {
            kind,
            offset: self.offset,
        }
    }

    /// Evaluates with `vars[i]` bound to parameter `i`.
    pub fn eval<T: Scalar>(&self, vars: &[T]) -> Result<T, EvalError> {
        let err = |source| EvalError {
            offset: self.offset,
            source,
        };
        let like = &vars[0];
        Ok(match &self.kind {
            ExprKind::Num(x) => like.constant_like(*x),
            ExprKind::Pi => like.constant_like(std::f64::consts::PI),
            ExprKind::Var { index, .. } => vars[*index].clone(),
            ExprKind::Neg(a) => a.eval(vars)?.neg(),
            ExprKind::Binary(op, a, b) => {
                let a = a.eval(vars)?;
                let b = b.eval(vars)?;
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => a.try_div(&b).map_err(err)?,
                }
            }
            ExprKind::Pow(a, e) => {
                let a = a.eval(vars)?;
                if e.fract() == 0.0 && e.abs() < 1e9 {
                    a.powi(*e as i32).map_err(err)?
                } else {
                    a.powf(*e).map_err(err)?
                }
            }
            ExprKind::Call(f, a) => a.eval(vars)?.apply(*f).map_err(err)?,
        })
    }

    /// Jet of the expression in the surface parameters `(u, v)`.
    pub fn eval_jet(&self, u: &Jet2, v: &Jet2) -> Result<Jet2, EvalError> {
        self.eval(&[u.clone(), v.clone()])
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, ..) => op.precedence(),
            ExprKind::Neg(_) => 3,
            ExprKind::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        write!(f, "{}", x as i64)
    } else {
        write!(f, "{x:?}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, need: bool| {
            if need {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match &self.kind {
            ExprKind::Num(x) => write_num(f, *x),
            ExprKind::Pi => f.write_str("pi"),
            ExprKind::Var { name, .. } => f.write_str(name),
            ExprKind::Neg(a) => {
                f.write_str("-")?;
                wrap(f, a, a.precedence() < 3)
            }
            ExprKind::Binary(op, a, b) => {
                let p = op.precedence();
                wrap(f, a, a.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                // Left-associative: an equal-precedence right operand needs parentheses.
                wrap(f, b, b.precedence() <= p)
            }
            ExprKind::Pow(a, e) => {
                wrap(f, a, a.precedence() < 5)?;
                f.write_str("^")?;
                write_num(f, *e)
            }
            ExprKind::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let x: f64 = text.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            out.push((Tok::Num(x), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => {
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((tok, start));
        i += c.len_utf8();
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    params: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            let (_, offset) = self.bump();
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr {
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                offset,
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            let (_, offset) = self.bump();
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr {
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                offset,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            let (_, offset) = self.bump();
            let inner = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                offset,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        let (_, offset) = self.bump();
        let sign = match self.peek() {
            Tok::Op('-') => {
                self.bump();
                -1.0
            }
            Tok::Op('+') => {
                self.bump();
                1.0
            }
            _ => 1.0,
        };
        match *self.peek() {
            Tok::Num(e) => {
                self.bump();
                if *self.peek() == Tok::Op('^') {
                    return self.syntax("chained `^` needs parentheses");
                }
                Ok(Expr {
                    kind: ExprKind::Pow(Box::new(base), sign * e),
                    offset,
                })
            }
            _ => self.syntax("exponent must be a numeric literal"),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (tok, offset) = self.bump();
        match tok {
            Tok::Num(x) => Ok(Expr {
                kind: ExprKind::Num(x),
                offset,
            }),
            Tok::LParen => {
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.syntax("expected `)`");
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(func) = ElementaryFn::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return self.syntax(format!("expected `(` after `{name}`"));
                    }
                    self.bump();
                    if *self.peek() == Tok::RParen {
                        return Err(ParseError::Arity {
                            function: name,
                            found: 0,
                            offset,
                        });
                    }
                    let arg = self.expr()?;
                    let mut found = 1;
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        self.expr()?;
                        found += 1;
                    }
                    if found != 1 {
                        return Err(ParseError::Arity {
                            function: name,
                            found,
                            offset,
                        });
                    }
                    if *self.peek() != Tok::RParen {
                        return self.syntax("expected `)`");
                    }
                    self.bump();
                    return Ok(Expr {
                        kind: ExprKind::Call(func, Box::new(arg)),
                        offset,
                    });
                }
                if name == "pi" {
                    return Ok(Expr {
                        kind: ExprKind::Pi,
                        offset,
                    });
                }
                match self.params.iter().position(|p| *p == name) {
                    Some(index) => Ok(Expr {
                        kind: ExprKind::Var { index, name },
                        offset,
                    }),
                    None => Err(ParseError::UnknownIdentifier { name, offset }),
                }
            }
            Tok::End => Err(ParseError::Syntax {
                offset,
                message: "unexpected end of input".into(),
            }),
            other => Err(ParseError::Syntax {
                offset,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }
}

/// Parses an expression over the parameters `params`.
pub fn parse_with(src: &str, params: &[&str]) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        params,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax("unexpected trailing input");
    }
    Ok(e)
}

/// Parses an expression in the surface parameters `u`, `v`.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    parse_with(src, &["u", "v"])
}

/// Three component expressions sharing one parameter list.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorExpr {
    pub components: [Expr; 3],
    pub params: Vec<String>,
}

impl VectorExpr {
    pub fn parse(srcs: [&str; 3], params: &[&str]) -> Result<Self, ParseError> {
        Ok(VectorExpr {
            components: [
                parse_with(srcs[0], params)?,
                parse_with(srcs[1], params)?,
                parse_with(srcs[2], params)?,
            ],
            params: params.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn eval<T: Scalar>(&self, vars: &[T]) -> Result<[T; 3], EvalError> {
        Ok([
            self.components[0].eval(vars)?,
            self.components[1].eval(vars)?,
            self.components[2].eval(vars)?,
        ])
    }

    /// Jets of the three components at `(u, v)` to the given order.
    pub fn jets_at(&self, u: f64, v: f64, order: usize) -> Result<[Jet2; 3], EvalError> {
        let vars = [
            Jet2::variable(Var::U, u, order),
            Jet2::variable(Var::V, v, order),
        ];
        self.eval(&vars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(e: &Expr, u: f64, v: f64) -> f64 {
        e.eval(&[u, v]).unwrap()
    }

    #[test]
    fn structure() {
        let e = parse("sin(u)*cos(v)").unwrap();
        assert!(matches!(
            &e.kind,
            ExprKind::Binary(BinOp::Mul, a, b)
                if matches!(a.kind, ExprKind::Call(ElementaryFn::Sin, _))
                && matches!(b.kind, ExprKind::Call(ElementaryFn::Cos, _))
        ));
        let e = parse("u^2 + v^2").unwrap();
        assert!(matches!(
            &e.kind,
            ExprKind::Binary(BinOp::Add, a, b)
                if matches!(a.kind, ExprKind::Pow(_, p) if p == 2.0)
                && matches!(b.kind, ExprKind::Pow(_, p) if p == 2.0)
        ));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(plain(&parse("-u^2").unwrap(), 3.0, 0.0), -9.0);
        assert_eq!(plain(&parse("u - v - 1").unwrap(), 5.0, 1.0), 3.0);
        assert_eq!(plain(&parse("u / v / 2").unwrap(), 8.0, 2.0), 2.0);
        assert_eq!(plain(&parse("2 * -u").unwrap(), 3.0, 0.0), -6.0);
        assert_eq!(plain(&parse("u^-1").unwrap(), 4.0, 0.0), 0.25);
    }

    #[test]
    fn quartic_normal_form_value() {
        // Independent evaluation: 0.5 * 1 + 1/24 * 1.
        let e = parse("1/2*(u^2+v^2) + 1/24*(u^2+v^2)^2").unwrap();
        let expected = 0.5 + 1.0 / 24.0;
        assert!((plain(&e, 1.0, 0.0) - expected).abs() < 1e-15);
        assert!((expected - 0.5416666667).abs() < 1e-10);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("2u"), Err(ParseError::Syntax { offset: 1, .. })));
        assert!(matches!(
            parse("abs(u)"),
            Err(ParseError::UnknownIdentifier { ref name, offset: 0 }) if name == "abs"
        ));
        assert!(matches!(parse("sin(u, v)"), Err(ParseError::Arity { found: 2, .. })));
        assert!(matches!(parse("sin()"), Err(ParseError::Arity { found: 0, .. })));
        assert!(matches!(parse("u^v"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("(u"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("u $ v"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(
            parse_with("u", &["t"]),
            Err(ParseError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn jet_evaluation() {
        let u = Jet2::variable(Var::U, 2.0, 1);
        let v = Jet2::variable(Var::V, 3.0, 1);
        let j = parse("u*v").unwrap().eval_jet(&u, &v).unwrap();
        assert_eq!((j.value(), j.coeff(1, 0), j.coeff(0, 1)), (6.0, 3.0, 2.0));

        let u = Jet2::variable(Var::U, 0.0, 2);
        let v = Jet2::variable(Var::V, 0.7, 2);
        let j = parse("sin(u)").unwrap().eval_jet(&u, &v).unwrap();
        assert_eq!((j.value(), j.coeff(1, 0), j.coeff(2, 0)), (0.0, 1.0, 0.0));
    }

    #[test]
    fn exp_uv_matches_finite_differences() {
        let e = parse("exp(u*v)").unwrap();
        let u = Jet2::variable(Var::U, 1.0, 2);
        let v = Jet2::variable(Var::V, 1.0, 2);
        let j = e.eval_jet(&u, &v).unwrap();
        let g = |a: f64, b: f64| plain(&e, a, b);
        let h = 1e-4;
        let fd_u = (g(1.0 + h, 1.0) - g(1.0 - h, 1.0)) / (2.0 * h);
        let fd_uv = (g(1.0 + h, 1.0 + h) - g(1.0 + h, 1.0 - h) - g(1.0 - h, 1.0 + h)
            + g(1.0 - h, 1.0 - h))
            / (4.0 * h * h);
        let e1 = std::f64::consts::E;
        assert!((j.value() - e1).abs() < 1e-15);
        assert!((j.coeff(1, 0) - e1).abs() / e1 < 1e-14);
        assert!((j.coeff(1, 1) - 2.0 * e1).abs() / e1 < 1e-14);
        assert!((fd_u - j.coeff(1, 0)).abs() / e1 < 1e-6);
        assert!((fd_uv - j.coeff(1, 1)).abs() / e1 < 1e-6);
    }

    #[test]
    fn eval_error_carries_offset() {
        let e = parse("u + ln(v)").unwrap();
        let err = e.eval(&[1.0, -1.0]).unwrap_err();
        assert_eq!(err.offset, 4);
        assert_eq!(err.source, JetError::DomainError(ElementaryFn::Ln));
    }

    #[test]
    fn substitution() {
        let x = parse_with("sin(t)^2", &["t"]).unwrap();
        let s = x.substitute(&[parse("u*v").unwrap()]);
        assert!((plain(&s, 0.5, 2.0) - 1f64.sin().powi(2)).abs() < 1e-15);
    }
}
