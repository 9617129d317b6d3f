//! Simplifying constructors: constant folding and 0/1 elimination.

use num::{One, Signed, Zero};

use super::{Exponent, Expr, Func, Number};

fn both_const<'a>(a: &'a Expr, b: &'a Expr) -> Option<(&'a Number, &'a Number)> {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Some((x, y)),
        _ => None,
    }
}

pub fn add(a: Expr, b: Expr) -> Expr {
    if let Some((x, y)) = both_const(&a, &b) {
        return Expr::rational(x.exact() + y.exact());
    }
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    Expr::Add(Box::new(a), Box::new(b))
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    if let Some((x, y)) = both_const(&a, &b) {
        return Expr::rational(x.exact() - y.exact());
    }
    if b.is_zero() {
        return a;
    }
    if a.is_zero() {
        return neg(b);
    }
    Expr::Sub(Box::new(a), Box::new(b))
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    if let Some((x, y)) = both_const(&a, &b) {
        return Expr::rational(x.exact() * y.exact());
    }
    if a.is_zero() || b.is_zero() {
        return Expr::int(0);
    }
    if a.is_one() {
        return b;
    }
    if b.is_one() {
        return a;
    }
    if a.as_const().is_some_and(|n| (-n.exact()).is_one()) {
        return neg(b);
    }
    Expr::Mul(Box::new(a), Box::new(b))
}

pub fn div(a: Expr, b: Expr) -> Expr {
    if let Some((x, y)) = both_const(&a, &b) {
        if !y.is_zero() {
            return Expr::rational(x.exact() / y.exact());
        }
    }
    if a.is_zero() && !b.is_zero() {
        return Expr::int(0);
    }
    if b.is_one() {
        return a;
    }
    Expr::Div(Box::new(a), Box::new(b))
}

pub fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(n) => Expr::rational(-n.exact()),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

pub fn pow(base: Expr, q: Exponent) -> Expr {
    if q.is_zero() {
        return Expr::int(1);
    }
    if q.is_one() {
        return base;
    }
    if let Expr::Const(n) = &base {
        if q.is_integer() && !(n.is_zero() && q.is_negative()) {
            let k = *q.numer();
            if k.unsigned_abs() <= 64 {
                let p = num::pow::Pow::pow(n.exact(), k.unsigned_abs() as u32);
                let p = if k < 0 { p.recip() } else { p };
                return Expr::rational(p);
            }
        }
    }
    // sqrt(u)^(2k) = u^k wherever the left side is defined
    if let Expr::Func(Func::Sqrt, u) = &base {
        if q.is_integer() && q.numer() % 2 == 0 {
            return pow((**u).clone(), q / 2);
        }
    }
    Expr::Pow(Box::new(base), q)
}

pub fn func(f: Func, arg: Expr) -> Expr {
    if let Expr::Const(n) = &arg {
        match f {
            Func::Exp if n.is_zero() => return Expr::int(1),
            Func::Ln if n.is_one() => return Expr::int(0),
            Func::Sin if n.is_zero() => return Expr::int(0),
            Func::Cos if n.is_zero() => return Expr::int(1),
            Func::Sqrt if n.is_zero() || n.is_one() => return arg,
            _ => {}
        }
    }
    Expr::Func(f, Box::new(arg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn folds_constants() {
        assert_eq!(add(Expr::int(2), Expr::int(3)), Expr::int(5));
        assert_eq!(mul(Expr::int(0), Expr::var("x")), Expr::int(0));
        assert_eq!(mul(Expr::int(1), Expr::var("x")), Expr::var("x"));
        assert_eq!(mul(Expr::int(-1), Expr::var("x")), neg(Expr::var("x")));
        assert_eq!(pow(Expr::int(2), Exponent::from_integer(-2)), parse("(1/4)").unwrap());
    }

    #[test]
    fn even_power_of_sqrt_collapses() {
        let e = pow(parse("sqrt(2*x)").unwrap(), Exponent::from_integer(2));
        assert_eq!(e, parse("2*x").unwrap());
    }

    #[test]
    fn division_by_zero_constant_is_not_folded() {
        let e = div(Expr::int(1), Expr::int(0));
        assert!(matches!(e, Expr::Div(_, _)));
    }
}
