//! Recursive-descent parser.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | factor
//! factor   := base ('^' exponent)?
//! base     := number | ident | ident '(' expr ')' | '(' expr ')'
//! exponent := '-'? (number | '(' '-'? number ('/' number)? ')')
//! ```
//!
//! Two literal forms fold into a single constant: a minus sign directly in
//! front of a number that is not raised to a power (`-3`), and a
//! parenthesized ratio of integer literals (`(1/3)`, `(-2/7)`). Both are the
//! forms the printer emits for negative and non-decimal constants.

use num::{BigInt, BigRational, ToPrimitive, Zero};
use thiserror::Error;

use super::{Exponent, Expr, Func, Number};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: BigRational, integer: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                let (value, integer, end) = lex_number(bytes, i)?;
                i = end;
                out.push(Token {
                    tok: Tok::Num { value, integer },
                    offset: start,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(text[start..i].to_string()),
                    offset: start,
                });
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, format!("unexpected character `{ch}`")));
            }
        };
        out.push(Token { tok, offset: start });
        i += 1;
    }
    out.push(Token {
        tok: Tok::End,
        offset: text.len(),
    });
    Ok(out)
}

/// Reads `digits ('.' digits)? ([eE] [+-]? digits)?` into an exact rational.
fn lex_number(bytes: &[u8], start: usize) -> Result<(BigRational, bool, usize), ParseError> {
    let mut i = start;
    let mut mantissa = BigInt::zero();
    let mut scale: i64 = 0;
    let mut digits = 0;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        mantissa = mantissa * 10 + (bytes[i] - b'0');
        digits += 1;
        i += 1;
    }
    let mut integer = true;
    if i < bytes.len() && bytes[i] == b'.' {
        integer = false;
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            mantissa = mantissa * 10 + (bytes[i] - b'0');
            scale -= 1;
            digits += 1;
            i += 1;
        }
    }
    if digits == 0 {
        return Err(syntax(start, "malformed number"));
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        let mut sign = 1i64;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            if bytes[j] == b'-' {
                sign = -1;
            }
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            let mut e: i64 = 0;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                e = e.saturating_mul(10).saturating_add((bytes[j] - b'0') as i64);
                j += 1;
            }
            if e > 4000 {
                return Err(syntax(i, "exponent out of range"));
            }
            scale += sign * e;
            integer = false;
            i = j;
        }
    }
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(mantissa * num::pow(ten, scale as usize))
    } else {
        BigRational::new(mantissa, num::pow(ten, (-scale) as usize))
    };
    Ok((value, integer, i))
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    declared: Option<&'a [&'a str]>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].offset
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.offset(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() != Tok::Minus {
            return self.factor();
        }
        self.bump();
        if let Tok::Num { value, .. } = self.peek().clone() {
            if *self.peek_at(1) != Tok::Caret {
                self.bump();
                return Ok(Expr::Const(Number::new(-value)));
            }
        }
        let inner = self.unary()?;
        Ok(Expr::Neg(Box::new(inner)))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let q = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), q));
        }
        Ok(base)
    }

    /// Matches `'(' '-'? INT '/' INT ')'` at the cursor without consuming.
    fn rational_literal(&self) -> Option<(BigRational, usize)> {
        let mut k = 1;
        let negative = *self.peek_at(k) == Tok::Minus;
        if negative {
            k += 1;
        }
        let Tok::Num {
            value: n,
            integer: true,
        } = self.peek_at(k)
        else {
            return None;
        };
        if *self.peek_at(k + 1) != Tok::Slash {
            return None;
        }
        let Tok::Num {
            value: d,
            integer: true,
        } = self.peek_at(k + 2)
        else {
            return None;
        };
        if *self.peek_at(k + 3) != Tok::RParen || d.is_zero() {
            return None;
        }
        let r = n / d;
        Some((if negative { -r } else { r }, k + 4))
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num { value, .. } => {
                self.bump();
                Ok(Expr::Const(Number::new(value)))
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(f) = Func::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return Err(syntax(self.offset(), format!("expected '(' after `{name}`")));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    return Ok(Expr::Func(f, Box::new(arg)));
                }
                if *self.peek() == Tok::LParen {
                    return Err(ParseError::UnknownIdentifier { offset, name });
                }
                if let Some(declared) = self.declared {
                    if !declared.contains(&name.as_str()) {
                        return Err(ParseError::UnknownIdentifier { offset, name });
                    }
                }
                Ok(Expr::Var(name))
            }
            Tok::LParen => {
                if let Some((r, len)) = self.rational_literal() {
                    for _ in 0..len {
                        self.bump();
                    }
                    return Ok(Expr::Const(Number::new(r)));
                }
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::End => Err(syntax(offset, "unexpected end of input")),
            other => Err(syntax(offset, format!("unexpected token {other:?}"))),
        }
    }

    fn exponent(&mut self) -> Result<Exponent, ParseError> {
        let offset = self.offset();
        let mut negative = false;
        if *self.peek() == Tok::Minus {
            negative = true;
            self.bump();
        }
        let value = match self.peek().clone() {
            Tok::Num { value, .. } => {
                self.bump();
                value
            }
            Tok::LParen => {
                self.bump();
                let mut inner_neg = false;
                if *self.peek() == Tok::Minus {
                    inner_neg = true;
                    self.bump();
                }
                let Tok::Num { value: n, .. } = self.peek().clone() else {
                    return Err(syntax(self.offset(), "expected rational exponent"));
                };
                self.bump();
                let mut r = n;
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let Tok::Num { value: d, .. } = self.peek().clone() else {
                        return Err(syntax(self.offset(), "expected denominator"));
                    };
                    if d.is_zero() {
                        return Err(syntax(self.offset(), "zero denominator in exponent"));
                    }
                    self.bump();
                    r /= d;
                }
                self.expect(Tok::RParen, "')'")?;
                if inner_neg {
                    -r
                } else {
                    r
                }
            }
            _ => return Err(syntax(offset, "expected exponent")),
        };
        let value = if negative { -value } else { value };
        match (value.numer().to_i64(), value.denom().to_i64()) {
            (Some(n), Some(d)) => Ok(Exponent::new(n, d)),
            _ => Err(syntax(offset, "exponent out of range")),
        }
    }
}

fn run(text: &str, declared: Option<&[&str]>) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        declared,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.offset(), "unexpected trailing input"));
    }
    Ok(e)
}

/// Parse an expression; any identifier that is not a function name is a variable.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    run(text, None)
}

/// Parse an expression whose variables must come from `vars`.
pub fn parse_with(text: &str, vars: &[&str]) -> Result<Expr, ParseError> {
    run(text, Some(vars))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn sum_of_power_and_product() {
        let e = parse("x^2 + 3*x").unwrap();
        let want = Expr::Add(
            b(Expr::Pow(b(Expr::var("x")), Exponent::from_integer(2))),
            b(Expr::Mul(b(Expr::int(3)), b(Expr::var("x")))),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn dangling_operator_reports_offset() {
        let err = parse("x +").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 3, .. }), "{err:?}");
    }

    #[test]
    fn sqrt_call() {
        let e = parse("sqrt(2*x)").unwrap();
        let want = Expr::Func(Func::Sqrt, b(Expr::Mul(b(Expr::int(2)), b(Expr::var("x")))));
        assert_eq!(e, want);
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(parse(" x ^ 2+3 *x ").unwrap(), parse("x^2+3*x").unwrap());
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let e = parse("-x^2").unwrap();
        assert_eq!(e, Expr::Neg(b(Expr::Pow(b(Expr::var("x")), Exponent::from_integer(2)))));
        let e = parse("-2^2").unwrap();
        assert_eq!(e, Expr::Neg(b(Expr::Pow(b(Expr::int(2)), Exponent::from_integer(2)))));
    }

    #[test]
    fn unary_minus_binds_tighter_than_product() {
        let e = parse("-x*y").unwrap();
        assert_eq!(e, Expr::Mul(b(Expr::Neg(b(Expr::var("x")))), b(Expr::var("y"))));
    }

    #[test]
    fn negative_literal_folds() {
        assert_eq!(parse("-3").unwrap(), Expr::int(-3));
        assert_eq!(parse("x*-3").unwrap(), Expr::Mul(b(Expr::var("x")), b(Expr::int(-3))));
    }

    #[test]
    fn rational_exponents() {
        let e = parse("x^(1/2)").unwrap();
        assert_eq!(e, Expr::Pow(b(Expr::var("x")), Exponent::new(1, 2)));
        let e = parse("x^-1.5").unwrap();
        assert_eq!(e, Expr::Pow(b(Expr::var("x")), Exponent::new(-3, 2)));
        let e = parse("x^(-2/3)").unwrap();
        assert_eq!(e, Expr::Pow(b(Expr::var("x")), Exponent::new(-2, 3)));
    }

    #[test]
    fn scientific_literal() {
        let e = parse("1e-6").unwrap();
        assert_eq!(e.as_const().unwrap().value(), 1e-6);
    }

    #[test]
    fn unknown_function_is_unknown_identifier() {
        let err = parse("foo(x)").unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownIdentifier {
                offset: 0,
                name: "foo".into()
            }
        );
    }

    #[test]
    fn undeclared_variable_rejected() {
        let err = parse_with("x + t", &["x"]).unwrap_err();
        assert!(matches!(err, ParseError::UnknownIdentifier { offset: 4, .. }));
        assert!(parse_with("x + 1", &["x"]).is_ok());
    }

    #[test]
    fn misc_errors() {
        assert!(matches!(parse("(x"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("x $ 2"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("sin x"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("x y"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse(""), Err(ParseError::Syntax { offset: 0, .. })));
    }
}
