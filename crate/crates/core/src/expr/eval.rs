use std::collections::HashMap;

use num::{BigRational, Zero};
use thiserror::Error;

use super::{ratio_to_f64, Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("domain violation in `{node}`: {reason}")]
    Domain { node: String, reason: &'static str },
    #[error("`{0}` has no exact rational value")]
    NotRational(String),
}

fn domain(node: &Expr, reason: &'static str) -> EvalError {
    EvalError::Domain {
        node: node.to_string(),
        reason,
    }
}

/// Variable bindings for evaluation.
pub trait Env {
    fn get(&self, name: &str) -> Option<f64>;
}

/// Binds every variable name to one value; used for univariate curves.
#[derive(Clone, Copy, Debug)]
pub struct Single(pub f64);

impl Env for Single {
    fn get(&self, _: &str) -> Option<f64> {
        Some(self.0)
    }
}

impl Env for HashMap<String, f64> {
    fn get(&self, name: &str) -> Option<f64> {
        HashMap::get(self, name).copied()
    }
}

impl Env for [(&str, f64)] {
    fn get(&self, name: &str) -> Option<f64> {
        self.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

impl<const N: usize> Env for [(&str, f64); N] {
    fn get(&self, name: &str) -> Option<f64> {
        Env::get(self.as_slice(), name)
    }
}

pub(super) fn eval(e: &Expr, env: &dyn Env) -> Result<f64, EvalError> {
    Ok(match e {
        Expr::Const(n) => n.value(),
        Expr::Var(v) => env.get(v).ok_or_else(|| EvalError::Unbound(v.clone()))?,
        Expr::Neg(a) => -eval(a, env)?,
        Expr::Add(a, b) => eval(a, env)? + eval(b, env)?,
        Expr::Sub(a, b) => eval(a, env)? - eval(b, env)?,
        Expr::Mul(a, b) => eval(a, env)? * eval(b, env)?,
        Expr::Div(a, b) => {
            let num = eval(a, env)?;
            let den = eval(b, env)?;
            if den == 0.0 {
                return Err(domain(e, "division by zero"));
            }
            num / den
        }
        Expr::Pow(a, q) => {
            let base = eval(a, env)?;
            let (p, d) = (*q.numer(), *q.denom());
            if base == 0.0 && p < 0 {
                return Err(domain(e, "division by zero"));
            }
            if d == 1 {
                match i32::try_from(p) {
                    Ok(k) => base.powi(k),
                    Err(_) => base.powf(p as f64),
                }
            } else {
                if base < 0.0 && d % 2 == 0 {
                    return Err(domain(e, "even root of a negative number"));
                }
                let root = match d {
                    2 => base.sqrt(),
                    3 => base.cbrt(),
                    _ if base < 0.0 => -(-base).powf(1.0 / d as f64),
                    _ => base.powf(1.0 / d as f64),
                };
                match i32::try_from(p) {
                    Ok(k) => root.powi(k),
                    Err(_) => root.powf(p as f64),
                }
            }
        }
        Expr::Func(f, a) => {
            let x = eval(a, env)?;
            match f {
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(domain(e, "square root of a negative number"));
                    }
                    x.sqrt()
                }
                Func::Ln => {
                    if x <= 0.0 {
                        return Err(domain(e, "logarithm of a non-positive number"));
                    }
                    x.ln()
                }
                Func::Exp => x.exp(),
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
            }
        }
    })
}

pub(super) fn eval_exact(e: &Expr, env: &dyn Fn(&str) -> Option<BigRational>) -> Result<BigRational, EvalError> {
    Ok(match e {
        Expr::Const(n) => n.exact().clone(),
        Expr::Var(v) => env(v).ok_or_else(|| EvalError::Unbound(v.clone()))?,
        Expr::Neg(a) => -eval_exact(a, env)?,
        Expr::Add(a, b) => eval_exact(a, env)? + eval_exact(b, env)?,
        Expr::Sub(a, b) => eval_exact(a, env)? - eval_exact(b, env)?,
        Expr::Mul(a, b) => eval_exact(a, env)? * eval_exact(b, env)?,
        Expr::Div(a, b) => {
            let den = eval_exact(b, env)?;
            if den.is_zero() {
                return Err(domain(e, "division by zero"));
            }
            eval_exact(a, env)? / den
        }
        Expr::Pow(a, q) if q.is_integer() => {
            let base = eval_exact(a, env)?;
            let k = *q.numer();
            if base.is_zero() && k < 0 {
                return Err(domain(e, "division by zero"));
            }
            let mag = num::pow::Pow::pow(&base, k.unsigned_abs());
            if k < 0 {
                mag.recip()
            } else {
                mag
            }
        }
        Expr::Pow(..) | Expr::Func(..) => return Err(EvalError::NotRational(e.to_string())),
    })
}

/// `f64` view of an exact result, for callers mixing both paths.
pub fn exact_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        0.0
    } else {
        ratio_to_f64(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn at(text: &str, x: f64) -> Result<f64, EvalError> {
        parse(text).unwrap().eval(&[("x", x)])
    }

    #[test]
    fn arithmetic() {
        assert_eq!(at("x^2+3*x", 2.0).unwrap(), 10.0);
        assert_eq!(at("sqrt(2*x)", 8.0).unwrap(), 4.0);
        assert_eq!(at("x^(1/3)", -8.0).unwrap(), -2.0);
        assert_eq!(at("x^(2/3)", -8.0).unwrap(), 4.0);
    }

    #[test]
    fn domain_errors_name_the_node() {
        let err = at("1 + ln(x)", 0.0).unwrap_err();
        assert_eq!(
            err,
            EvalError::Domain {
                node: "ln(x)".into(),
                reason: "logarithm of a non-positive number"
            }
        );
        assert!(matches!(at("1/(x - 1)", 1.0), Err(EvalError::Domain { .. })));
        assert!(matches!(at("sqrt(x)", -1.0), Err(EvalError::Domain { .. })));
        assert!(matches!(at("x^(1/2)", -1.0), Err(EvalError::Domain { .. })));
        assert!(matches!(at("x^-1", 0.0), Err(EvalError::Domain { .. })));
    }

    #[test]
    fn unbound_variable() {
        let err = parse("x + y").unwrap().eval(&[("x", 1.0)]).unwrap_err();
        assert_eq!(err, EvalError::Unbound("y".into()));
    }

    #[test]
    fn exact_evaluation() {
        let e = parse("x^2/3 - 1/x").unwrap();
        let v = e.eval_exact(&|_| Some(BigRational::from_integer(2.into()))).unwrap();
        assert_eq!(v, BigRational::new(5.into(), 6.into()));
        assert!(matches!(
            parse("sin(x)").unwrap().eval_exact(&|_| Some(BigRational::zero())),
            Err(EvalError::NotRational(_))
        ));
    }
}
