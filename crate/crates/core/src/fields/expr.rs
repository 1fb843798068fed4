use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::error::{DomainError, Error, Result};
use crate::scalar::{AdScalar, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Conj,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Conj => "conj",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "conj" => Func::Conj,
            _ => return None,
        })
    }
}

/// Expression tree node. Coordinate indices are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// The imaginary unit.
    I,
    Q(usize),
    P(usize),
    /// `zʲ = qʲ + i pʲ`.
    Z(usize),
    /// Extra time slot, only present in time-dependent fields.
    Time,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    fn eval<S: AdScalar>(&self, x: &[S], n: usize) -> Result<S> {
        Ok(match self {
            Expr::Const(c) => S::from_real(<S::Real as Real>::lit(*c)),
            Expr::I => S::i(),
            Expr::Q(j) => x[*j],
            Expr::P(j) => x[n + *j],
            Expr::Z(j) => x[*j] + S::i() * x[n + *j],
            Expr::Time => x[2 * n],
            Expr::Neg(a) => -a.eval(x, n)?,
            Expr::Add(a, b) => a.eval(x, n)? + b.eval(x, n)?,
            Expr::Sub(a, b) => a.eval(x, n)? - b.eval(x, n)?,
            Expr::Mul(a, b) => a.eval(x, n)? * b.eval(x, n)?,
            Expr::Div(a, b) => {
                let num = a.eval(x, n)?;
                let den = b.eval(x, n)?;
                if is_zero(&den) {
                    return Err(DomainError::DivisionByZero.into());
                }
                num / den
            }
            Expr::Pow(a, k) => {
                let base = a.eval(x, n)?;
                if *k < 0 && is_zero(&base) {
                    return Err(DomainError::DivisionByZero.into());
                }
                base.powi(*k)
            }
            Expr::Call(func, a) => {
                let arg = a.eval(x, n)?;
                match func {
                    Func::Sin => arg.sin(),
                    Func::Cos => arg.cos(),
                    Func::Exp => arg.exp(),
                    Func::Log => {
                        if is_zero(&arg) {
                            return Err(DomainError::LogOfZero.into());
                        }
                        arg.ln()
                    }
                    Func::Conj => arg.conj(),
                }
            }
        })
    }

    fn any(&self, pred: &impl Fn(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.any(pred),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.any(pred) || b.any(pred),
            _ => false,
        }
    }
}

fn is_zero<S: AdScalar>(v: &S) -> bool {
    let p = v.primal();
    p.re == S::Real::zero() && p.im == S::Real::zero()
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "(-{:?})", -c),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::I => f.write_str("i"),
            Expr::Q(j) => write!(f, "q{}", j + 1),
            Expr::P(j) => write!(f, "p{}", j + 1),
            Expr::Z(j) => write!(f, "z{}", j + 1),
            Expr::Time => f.write_str("t"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, k) if *k < 0 => write!(f, "({a}^-{})", -(*k as i64)),
            Expr::Pow(a, k) => write!(f, "({a}^{k})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// A scalar field over an n-dimensional complex phase space, optionally
/// with a trailing time argument.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    expr: Expr,
    n: usize,
    time: bool,
}

impl ScalarField {
    /// Wraps an expression tree. Fails if any coordinate index is outside `0..n`
    /// or if the tree uses `t` without `time`.
    pub fn from_expr(expr: Expr, n: usize, time: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("phase space dimension must be positive".into()));
        }
        let bad_index = expr.any(&|e| matches!(e, Expr::Q(j) | Expr::P(j) | Expr::Z(j) if *j >= n));
        if bad_index {
            return Err(Error::Config(format!("coordinate index out of range for n = {n}")));
        }
        if !time && expr.any(&|e| matches!(e, Expr::Time)) {
            return Err(Error::Config("field uses `t` but has no time slot".into()));
        }
        Ok(Self { expr, n, time })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::from_expr(Expr::Const(c), n, false).expect("valid constant field")
    }

    /// `qʲ` for 0-based `j`.
    pub fn q(n: usize, j: usize) -> Self {
        Self::from_expr(Expr::Q(j), n, false).expect("index in range")
    }

    pub fn p(n: usize, j: usize) -> Self {
        Self::from_expr(Expr::P(j), n, false).expect("index in range")
    }

    pub fn z(n: usize, j: usize) -> Self {
        Self::from_expr(Expr::Z(j), n, false).expect("index in range")
    }

    pub fn zbar(n: usize, j: usize) -> Self {
        Self::from_expr(Expr::Call(Func::Conj, Box::new(Expr::Z(j))), n, false).expect("index in range")
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn has_time(&self) -> bool {
        self.time
    }

    /// Number of evaluation slots: `2n`, plus one for time.
    pub fn slots(&self) -> usize {
        2 * self.n + usize::from(self.time)
    }

    pub fn uses_imaginary_unit(&self) -> bool {
        self.expr.any(&|e| matches!(e, Expr::I))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { expr: Expr::Mul(Box::new(Expr::Const(k)), Box::new(self.expr.clone())), ..*self }
    }

    /// Evaluates over any AD scalar. `x` holds `[q.., p..]` and, for
    /// time-dependent fields, `t` last.
    pub fn eval_ad<S: AdScalar>(&self, x: &[S]) -> Result<S> {
        if x.len() != self.slots() {
            return Err(Error::Arity { expected: self.slots(), got: x.len() });
        }
        self.expr.eval(x, self.n)
    }

    fn combine(self, rhs: Self, op: fn(Box<Expr>, Box<Expr>) -> Expr) -> Self {
        assert_eq!(self.n, rhs.n, "combining fields of different dimension");
        Self { expr: op(Box::new(self.expr), Box::new(rhs.expr)), n: self.n, time: self.time || rhs.time }
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

impl Add for ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: Self) -> Self {
        self.combine(rhs, Expr::Add)
    }
}

impl Sub for ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: Self) -> Self {
        self.combine(rhs, Expr::Sub)
    }
}

impl Mul for ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: Self) -> Self {
        self.combine(rhs, Expr::Mul)
    }
}

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> Self {
        Self { expr: Expr::Neg(Box::new(self.expr)), ..self }
    }
}
