//! Bivariate polynomials over the rationals and the a–e rules for implicit
//! relations f(x, z) = 0.
//!
//! The linearization shifts the point to (x0 − a, z0 − e), expands the
//! relation as a polynomial in the increments, drops the constant term and
//! every term of combined degree two or more, and solves what is left for
//! e/a. It deliberately does not call `differentiate`; the implicit
//! derivative is kept as an independent check.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigRational, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::eval::exact_to_f64;
use super::{Expr, Number};

/// Polynomial in two indeterminates; key `(i, j)` is the monomial `u^i v^j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly2::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn u() -> Self {
        Poly2::monomial(1, 0, BigRational::one())
    }

    pub fn v() -> Self {
        Poly2::monomial(0, 1, BigRational::one())
    }

    pub fn monomial(i: u32, j: u32, c: BigRational) -> Self {
        let mut p = Poly2::zero();
        p.add_term(i, j, c);
        p
    }

    fn add_term(&mut self, i: u32, j: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((i, j)).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigRational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &BigRational)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (i, j, c) in other.terms() {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly2 {
        Poly2 {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (i, j, c) in self.terms() {
            for (k, l, d) in other.terms() {
                out.add_term(i + k, j + l, c * d);
            }
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> Poly2 {
        let mut out = Poly2::zero();
        for (i, j, c) in self.terms() {
            out.add_term(i, j, c * s);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly2 {
        let mut out = Poly2::constant(BigRational::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Exact value at (u, v).
    pub fn eval(&self, u: &BigRational, v: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, j, c) in self.terms() {
            acc += c * num::pow::Pow::pow(u, i) * num::pow::Pow::pow(v, j);
        }
        acc
    }

    /// Build from an expression, interpreting each variable through `var`.
    /// Fails on transcendental nodes, non-integer or negative exponents, and
    /// division by a non-constant.
    pub fn from_expr(e: &Expr, var: &dyn Fn(&str) -> Option<Poly2>) -> Result<Poly2, NotPolynomial> {
        let bad = |why: &'static str| NotPolynomial {
            node: e.to_string(),
            why,
        };
        Ok(match e {
            Expr::Const(n) => Poly2::constant(n.exact().clone()),
            Expr::Var(name) => var(name).ok_or_else(|| bad("variable outside the relation"))?,
            Expr::Neg(a) => Poly2::from_expr(a, var)?.neg(),
            Expr::Add(a, b) => Poly2::from_expr(a, var)?.add(&Poly2::from_expr(b, var)?),
            Expr::Sub(a, b) => Poly2::from_expr(a, var)?.sub(&Poly2::from_expr(b, var)?),
            Expr::Mul(a, b) => Poly2::from_expr(a, var)?.mul(&Poly2::from_expr(b, var)?),
            Expr::Div(a, b) => {
                let den = Poly2::from_expr(b, var)?
                    .as_constant()
                    .ok_or_else(|| bad("division by a non-constant"))?;
                if den.is_zero() {
                    return Err(bad("division by zero"));
                }
                Poly2::from_expr(a, var)?.scale(&den.recip())
            }
            Expr::Pow(a, q) => {
                if !q.is_integer() || q.is_negative() {
                    return Err(bad("exponent is not a non-negative integer"));
                }
                let k = q
                    .numer()
                    .to_u32()
                    .filter(|k| *k <= 64)
                    .ok_or_else(|| bad("exponent too large"))?;
                Poly2::from_expr(a, var)?.pow(k)
            }
            Expr::Func(..) => return Err(bad("transcendental function")),
        })
    }

    /// Expression `Σ c·u^i·v^j` in the given variable names.
    pub fn to_expr(&self, u: &str, v: &str) -> Expr {
        use super::build::{add, mul, pow};
        let mut acc = Expr::int(0);
        for (i, j, c) in self.terms() {
            let mut term = Expr::Const(Number::new(c.clone()));
            if i > 0 {
                term = mul(term, pow(Expr::var(u), (i as i64).into()));
            }
            if j > 0 {
                term = mul(term, pow(Expr::var(v), (j as i64).into()));
            }
            acc = add(acc, term);
        }
        acc
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr("u", "v"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{node}` is not polynomial: {why}")]
pub struct NotPolynomial {
    pub node: String,
    pub why: &'static str,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinearizeError {
    #[error(transparent)]
    NotPolynomial(#[from] NotPolynomial),
    #[error("relation variables must be two distinct names, got `{0}` and `{1}`")]
    BadVariables(String, String),
    #[error("point is not on the relation: f = {residual:e}")]
    NotOnRelation { residual: f64 },
    #[error("vertical tangent: the relation has no e-linear term at this point")]
    VerticalTangent,
    #[error("non-finite coordinate")]
    NonFinite,
}

/// An algebraic relation f(x, z) = 0 between abscissa and ordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct ImplicitRelation {
    expr: Expr,
    abscissa: String,
    ordinate: String,
    poly: Poly2,
}

impl ImplicitRelation {
    pub fn new(expr: Expr, abscissa: &str, ordinate: &str) -> Result<Self, LinearizeError> {
        if abscissa == ordinate {
            return Err(LinearizeError::BadVariables(abscissa.into(), ordinate.into()));
        }
        let poly = Poly2::from_expr(&expr, &|name| {
            if name == abscissa {
                Some(Poly2::u())
            } else if name == ordinate {
                Some(Poly2::v())
            } else {
                None
            }
        })?;
        Ok(ImplicitRelation {
            expr,
            abscissa: abscissa.into(),
            ordinate: ordinate.into(),
            poly,
        })
    }

    /// Parse `text` as a relation in `x` (abscissa) and `z` (ordinate).
    pub fn parse_xz(text: &str) -> Result<Self, RelationParseError> {
        let expr = super::parse(text)?;
        Ok(ImplicitRelation::new(expr, "x", "z")?)
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn abscissa(&self) -> &str {
        &self.abscissa
    }

    pub fn ordinate(&self) -> &str {
        &self.ordinate
    }

    /// The relation as a polynomial in (abscissa, ordinate).
    pub fn poly(&self) -> &Poly2 {
        &self.poly
    }

    /// Expand f(x0 − a, z0 − e) as a polynomial in (a, e).
    pub fn shifted(&self, x0: &BigRational, z0: &BigRational) -> Poly2 {
        let a_sub = Poly2::constant(x0.clone()).sub(&Poly2::u());
        let e_sub = Poly2::constant(z0.clone()).sub(&Poly2::v());
        Poly2::from_expr(&self.expr, &|name| {
            if name == self.abscissa {
                Some(a_sub.clone())
            } else if name == self.ordinate {
                Some(e_sub.clone())
            } else {
                None
            }
        })
        .expect("validated at construction")
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RelationParseError {
    #[error(transparent)]
    Parse(#[from] super::ParseError),
    #[error(transparent)]
    Relation(#[from] LinearizeError),
}

const ON_RELATION_TOL: f64 = 1e-9;

/// Slope e/a at (x0, z0) by the a–e rules, in exact arithmetic.
pub fn barrow_linearize_exact(
    rel: &ImplicitRelation,
    x0: &BigRational,
    z0: &BigRational,
) -> Result<BigRational, LinearizeError> {
    let shifted = rel.shifted(x0, z0);
    // the constant term of the shifted relation is f(x0, z0)
    let residual = shifted.coeff(0, 0);
    let residual_f = exact_to_f64(&residual);
    if residual_f.abs() > ON_RELATION_TOL {
        return Err(LinearizeError::NotOnRelation { residual: residual_f });
    }
    // keep only terms linear in a and e: c_a·a + c_e·e = 0
    let c_a = shifted.coeff(1, 0);
    let c_e = shifted.coeff(0, 1);
    if c_e.is_zero() {
        return Err(LinearizeError::VerticalTangent);
    }
    Ok(-c_a / c_e)
}

/// Slope e/a at (x0, z0) by the a–e rules. Coordinates are taken as the exact
/// rationals their doubles denote.
pub fn barrow_linearize(rel: &ImplicitRelation, x0: f64, z0: f64) -> Result<f64, LinearizeError> {
    let x = BigRational::from_float(x0).ok_or(LinearizeError::NonFinite)?;
    let z = BigRational::from_float(z0).ok_or(LinearizeError::NonFinite)?;
    barrow_linearize_exact(rel, &x, &z).map(|r| exact_to_f64(&r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    /// Implicit derivative −f_x/f_z through symbolic differentiation.
    fn implicit_slope(rel: &ImplicitRelation, x0: &BigRational, z0: &BigRational) -> BigRational {
        let env = |name: &str| match name {
            "x" => Some(x0.clone()),
            "z" => Some(z0.clone()),
            _ => None,
        };
        let fx = rel.expr().differentiate("x").eval_exact(&env).unwrap();
        let fz = rel.expr().differentiate("z").eval_exact(&env).unwrap();
        -fx / fz
    }

    #[test]
    fn explicit_parabola() {
        let rel = ImplicitRelation::parse_xz("z - x^2").unwrap();
        assert_eq!(barrow_linearize(&rel, 1.0, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn semicubical_parabola() {
        let rel = ImplicitRelation::parse_xz("z^2 - x^3").unwrap();
        let got = barrow_linearize_exact(&rel, &rat(4), &rat(8)).unwrap();
        assert_eq!(got, rat(3));
        assert_eq!(got, implicit_slope(&rel, &rat(4), &rat(8)));
    }

    #[test]
    fn circle() {
        let rel = ImplicitRelation::parse_xz("x^2 + z^2 - 25").unwrap();
        assert_eq!(barrow_linearize(&rel, 3.0, 4.0).unwrap(), -0.75);
    }

    #[test]
    fn truncation_discards_higher_order_terms() {
        let rel = ImplicitRelation::parse_xz("x^2 + z^2 - 25").unwrap();
        let shifted = rel.shifted(&rat(3), &rat(4));
        // (3 - a)^2 + (4 - e)^2 - 25 = -6a - 8e + a^2 + e^2
        assert_eq!(shifted.coeff(0, 0), rat(0));
        assert_eq!(shifted.coeff(1, 0), rat(-6));
        assert_eq!(shifted.coeff(0, 1), rat(-8));
        assert_eq!(shifted.coeff(2, 0), rat(1));
        assert_eq!(shifted.coeff(0, 2), rat(1));
    }

    #[test]
    fn errors() {
        let rel = ImplicitRelation::parse_xz("x^2 + z^2 - 25").unwrap();
        assert!(matches!(
            barrow_linearize(&rel, 1.0, 1.0),
            Err(LinearizeError::NotOnRelation { .. })
        ));
        assert_eq!(barrow_linearize(&rel, 5.0, 0.0), Err(LinearizeError::VerticalTangent));
        assert!(matches!(
            ImplicitRelation::parse_xz("sin(x) - z"),
            Err(RelationParseError::Relation(LinearizeError::NotPolynomial(_)))
        ));
        assert!(matches!(
            ImplicitRelation::parse_xz("x*y - z"),
            Err(RelationParseError::Relation(LinearizeError::NotPolynomial(_)))
        ));
    }

    #[test]
    fn rational_coefficients_via_division_by_constants() {
        let rel = ImplicitRelation::parse_xz("z - x^3/3 + 0.5*x").unwrap();
        // slope x^2 - 1/2 at x = 2
        let z0 = rat(8) / rat(3) - rat(1);
        let got = barrow_linearize_exact(&rel, &rat(2), &z0).unwrap();
        assert_eq!(got, rat(7) / rat(2));
    }

    #[test]
    fn to_expr_round_trips_through_the_parser() {
        let rel = ImplicitRelation::parse_xz("(x - 2*z)^3 + x*z/7 - 1").unwrap();
        let text = rel.poly().to_expr("x", "z").to_string();
        let back = ImplicitRelation::parse_xz(&text).unwrap();
        assert_eq!(back.poly(), rel.poly());
    }
}
