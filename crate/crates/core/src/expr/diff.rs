use super::build::{add, div, func, mul, neg, pow, sub};
use super::{Exponent, Expr, Func};

pub(super) fn differentiate(e: &Expr, var: &str) -> Expr {
    match e {
        Expr::Const(_) => Expr::int(0),
        Expr::Var(v) => Expr::int(i64::from(v == var)),
        Expr::Neg(a) => neg(differentiate(a, var)),
        Expr::Add(a, b) => add(differentiate(a, var), differentiate(b, var)),
        Expr::Sub(a, b) => sub(differentiate(a, var), differentiate(b, var)),
        Expr::Mul(a, b) => add(
            mul(differentiate(a, var), (**b).clone()),
            mul((**a).clone(), differentiate(b, var)),
        ),
        Expr::Div(a, b) => {
            let da = differentiate(a, var);
            let db = differentiate(b, var);
            if db.is_zero() {
                return div(da, (**b).clone());
            }
            div(
                sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                pow((**b).clone(), Exponent::from_integer(2)),
            )
        }
        Expr::Pow(a, q) => {
            let da = differentiate(a, var);
            if da.is_zero() {
                return Expr::int(0);
            }
            let coeff = Expr::rational(num::BigRational::new((*q.numer()).into(), (*q.denom()).into()));
            mul(mul(coeff, pow((**a).clone(), q - 1)), da)
        }
        Expr::Func(f, a) => {
            let da = differentiate(a, var);
            if da.is_zero() {
                return Expr::int(0);
            }
            let a = (**a).clone();
            match f {
                Func::Sqrt => div(da, mul(Expr::int(2), func(Func::Sqrt, a))),
                Func::Ln => div(da, a),
                Func::Exp => mul(func(Func::Exp, a), da),
                Func::Sin => mul(func(Func::Cos, a), da),
                Func::Cos => neg(mul(func(Func::Sin, a), da)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, Expr, Single};

    fn d(text: &str) -> Expr {
        parse(text).unwrap().differentiate("x")
    }

    #[test]
    fn power_rule() {
        assert_eq!(d("x^2 + 3*x"), parse("2*x + 3").unwrap());
    }

    #[test]
    fn constant() {
        assert_eq!(d("7"), Expr::int(0));
        assert_eq!(d("y^2"), Expr::int(0));
    }

    /// Central difference with h = 1e-6.
    fn central(e: &Expr, x: f64) -> f64 {
        let h = 1e-6;
        (e.eval(&Single(x + h)).unwrap() - e.eval(&Single(x - h)).unwrap()) / (2.0 * h)
    }

    #[test]
    fn sqrt_chain_rule_matches_finite_difference() {
        let e = parse("sqrt(2*x)").unwrap();
        let fd = central(&e, 8.0);
        assert!((fd - 0.25).abs() < 1e-9, "oracle {fd}");
        let exact = e.differentiate("x").eval(&Single(8.0)).unwrap();
        assert!((exact - 0.25).abs() < 1e-15);
    }

    #[test]
    fn transcendental_rules() {
        for (text, x) in [
            ("sin(x)*cos(x)", 0.7),
            ("exp(x^2)", 0.3),
            ("ln(1 + x^2)/x", 1.3),
            ("x^(1/3)", 2.0),
            ("1/(x - 3)", 1.0),
        ] {
            let e = parse(text).unwrap();
            let exact = e.differentiate("x").eval(&Single(x)).unwrap();
            let fd = central(&e, x);
            assert!(
                (exact - fd).abs() <= 1e-6 * exact.abs().max(1.0),
                "{text}: {exact} vs {fd}"
            );
        }
    }
}
