//! Curve-defining expressions: parsing, printing, evaluation, symbolic
//! differentiation, and the a–e linearization of implicit polynomial relations.
//!
//! Constants are exact rationals. Decimal literals such as `0.1` are read as
//! the exact fraction they denote, so relations with rational coefficients can
//! be manipulated without rounding; evaluation uses a cached `f64` image.

mod build;
mod diff;
mod eval;
mod parse;
mod poly;
mod print;

use std::collections::BTreeSet;
use std::fmt;

use num::rational::Ratio;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub use build::{add, div, func, mul, neg, pow, sub};
pub use eval::{Env, EvalError, Single};
pub use parse::{parse, parse_with, ParseError};
pub use poly::{barrow_linearize, barrow_linearize_exact, ImplicitRelation, LinearizeError, Poly2};

/// An exact rational constant together with its nearest `f64`.
#[derive(Clone, Debug)]
pub struct Number {
    exact: BigRational,
    approx: f64,
}

impl Number {
    pub fn new(exact: BigRational) -> Self {
        let approx = ratio_to_f64(&exact);
        Number { exact, approx }
    }

    pub fn int(v: i64) -> Self {
        Number::new(BigRational::from_integer(BigInt::from(v)))
    }

    /// Exact image of a finite double. Every finite `f64` is a dyadic rational.
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Number::new)
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn value(&self) -> f64 {
        self.approx
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exact.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.exact.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.exact.is_integer()
    }
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        self.exact == other.exact
    }
}

impl Eq for Number {}

/// Correctly rounded conversion (up to the accuracy of `ToPrimitive`).
pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
        // exact when both fit in 53 bits
        if n.unsigned_abs() < (1u64 << 53) && d < (1i64 << 53) {
            return n as f64 / d as f64;
        }
    }
    r.to_f64().unwrap_or(f64::NAN)
}

/// Rational exponent of a power node.
pub type Exponent = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sqrt,
    Ln,
    Exp,
    Sin,
    Cos,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Sqrt, Func::Ln, Func::Exp, Func::Sin, Func::Cos];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree.
///
/// `Neg` is the unary minus of the grammar; a minus sign written directly in
/// front of a numeric literal produces a negative constant instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(Number),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
    Func(Func, Box<Expr>),
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Const(Number::int(v))
    }

    pub fn rational(r: BigRational) -> Expr {
        Expr::Const(Number::new(r))
    }

    /// Exact constant for a finite double; panics on NaN or infinity.
    pub fn real(v: f64) -> Expr {
        Expr::Const(Number::from_f64(v).expect("finite constant"))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn as_const(&self) -> Option<&Number> {
        match self {
            Expr::Const(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(Number::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(Number::is_one)
    }

    /// Names of the free variables, sorted.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => 1 + a.size(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Simultaneous renaming of variables. Names not covered by `map` are kept.
    pub fn rename(&self, map: &dyn Fn(&str) -> Option<String>) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(v) => Expr::Var(map(v).unwrap_or_else(|| v.clone())),
            Expr::Neg(a) => Expr::Neg(Box::new(a.rename(map))),
            Expr::Add(a, b) => Expr::Add(Box::new(a.rename(map)), Box::new(b.rename(map))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.rename(map)), Box::new(b.rename(map))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.rename(map)), Box::new(b.rename(map))),
            Expr::Div(a, b) => Expr::Div(Box::new(a.rename(map)), Box::new(b.rename(map))),
            Expr::Pow(a, q) => Expr::Pow(Box::new(a.rename(map)), *q),
            Expr::Func(f, a) => Expr::Func(*f, Box::new(a.rename(map))),
        }
    }

    /// Replace every occurrence of variable `name` by `with`.
    pub fn substitute(&self, name: &str, with: &Expr) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(v) if v == name => with.clone(),
            Expr::Var(_) => self.clone(),
            Expr::Neg(a) => neg(a.substitute(name, with)),
            Expr::Add(a, b) => add(a.substitute(name, with), b.substitute(name, with)),
            Expr::Sub(a, b) => sub(a.substitute(name, with), b.substitute(name, with)),
            Expr::Mul(a, b) => mul(a.substitute(name, with), b.substitute(name, with)),
            Expr::Div(a, b) => div(a.substitute(name, with), b.substitute(name, with)),
            Expr::Pow(a, q) => pow(a.substitute(name, with), *q),
            Expr::Func(f, a) => func(*f, a.substitute(name, with)),
        }
    }

    /// Symbolic derivative with respect to `var`, lightly simplified.
    pub fn differentiate(&self, var: &str) -> Expr {
        diff::differentiate(self, var)
    }

    pub fn eval(&self, env: &dyn Env) -> Result<f64, EvalError> {
        eval::eval(self, env)
    }

    /// Exact evaluation over the rationals. Only defined for rational
    /// functions (no transcendental nodes, integer exponents).
    pub fn eval_exact(&self, env: &dyn Fn(&str) -> Option<BigRational>) -> Result<BigRational, EvalError> {
        eval::eval_exact(self, env)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_expr(self, f)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
