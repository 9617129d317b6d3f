//! Minimal-parenthesis printer whose output re-parses to the same tree.

use std::fmt::{self, Write};

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use super::{Exponent, Expr, Number};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

/// Decimal text for a rational whose denominator divides a power of ten.
fn decimal(r: &BigRational) -> Option<String> {
    let mut d = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut a, mut b) = (0usize, 0usize);
    while d.is_even() {
        d /= &two;
        a += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        b += 1;
    }
    if !d.is_one() {
        return None;
    }
    let k = a.max(b);
    let scaled = r.numer().abs() * num::pow(BigInt::from(10), k) / r.denom();
    let mut digits = scaled.to_string();
    if k > 0 {
        if digits.len() <= k {
            digits = format!("{}{}", "0".repeat(k + 1 - digits.len()), digits);
        }
        digits.insert(digits.len() - k, '.');
    }
    if r.is_negative() {
        digits.insert(0, '-');
    }
    Some(digits)
}

fn const_text(n: &Number) -> String {
    let r = n.exact();
    decimal(r).unwrap_or_else(|| format!("({}/{})", r.numer(), r.denom()))
}

fn const_prec(n: &Number) -> u8 {
    if n.is_negative() && decimal(n.exact()).is_some() {
        UNARY
    } else {
        ATOM
    }
}

fn is_plain_int(e: &Expr) -> bool {
    e.as_const().is_some_and(|n| n.is_integer() && !n.is_negative())
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) => PRODUCT,
        Expr::Neg(_) => UNARY,
        Expr::Pow(..) => POWER,
        Expr::Const(n) => const_prec(n),
        Expr::Var(_) | Expr::Func(..) => ATOM,
    }
}

pub(super) fn exponent_text(q: &Exponent) -> String {
    let r = BigRational::new((*q.numer()).into(), (*q.denom()).into());
    match decimal(&r) {
        Some(s) => s,
        None => format!("({}/{})", q.numer(), q.denom()),
    }
}

fn child(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(e) < min {
        f.write_char('(')?;
        write_expr(e, f)?;
        f.write_char(')')
    } else {
        write_expr(e, f)
    }
}

pub(super) fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Const(n) => f.write_str(&const_text(n)),
        Expr::Var(v) => f.write_str(v),
        Expr::Add(a, b) => {
            child(a, SUM, f)?;
            f.write_str(" + ")?;
            child(b, PRODUCT, f)
        }
        Expr::Sub(a, b) => {
            child(a, SUM, f)?;
            f.write_str(" - ")?;
            child(b, PRODUCT, f)
        }
        Expr::Mul(a, b) => {
            child(a, PRODUCT, f)?;
            f.write_char('*')?;
            child(b, UNARY, f)
        }
        Expr::Div(a, b) => {
            // `(1/3)` would read back as a rational constant
            if is_plain_int(a) && is_plain_int(b) {
                write!(f, "({a})")?;
            } else {
                child(a, PRODUCT, f)?;
            }
            f.write_char('/')?;
            child(b, UNARY, f)
        }
        Expr::Neg(a) => {
            f.write_char('-')?;
            // `-3` would read back as a negative constant
            if matches!(**a, Expr::Const(ref n) if !n.is_negative()) {
                write!(f, "({a})")
            } else {
                child(a, UNARY, f)
            }
        }
        Expr::Pow(a, q) => {
            child(a, ATOM, f)?;
            write!(f, "^{}", exponent_text(q))
        }
        Expr::Func(func, a) => write!(f, "{}({a})", func.name()),
    }
}
