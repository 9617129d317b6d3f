//! Renaming between the two naming conventions for the same geometry.
//!
//! In the Barrow frame the given curve is `y(x)`, the area curve is `z(x)`
//! and the scale is `R`. In the Leibniz frame the same objects are called
//! `z(y)`, `x(y)` and `a`. Only names change; no value is recomputed.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::expr::Expr;

use super::report::{Detail, TheoremReport};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    #[default]
    Barrow,
    Leibniz,
}

impl Frame {
    pub fn other(self) -> Frame {
        match self {
            Frame::Barrow => Frame::Leibniz,
            Frame::Leibniz => Frame::Barrow,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Frame::Barrow => "barrow",
            Frame::Leibniz => "leibniz",
        }
    }
}

/// Symbol table `(barrow, leibniz)`.
const SYMBOLS: [(&str, &str); 4] = [("x", "y"), ("y", "z"), ("z", "x"), ("R", "a")];

pub struct LeibnizFrame;

impl LeibnizFrame {
    /// Name of a symbol after moving from `from` to the other frame.
    pub fn rename_symbol(symbol: &str, from: Frame) -> Option<&'static str> {
        SYMBOLS.iter().find_map(|&(b, l)| match from {
            Frame::Barrow if b == symbol => Some(l),
            Frame::Leibniz if l == symbol => Some(b),
            _ => None,
        })
    }

    /// Rename a key such as `x0`, `z_lo` or `R`: the leading symbol is
    /// mapped when followed by nothing, a digit, or `_`.
    pub fn rename_key(key: &str, from: Frame) -> String {
        let mut chars = key.chars();
        let Some(head) = chars.next() else {
            return String::new();
        };
        let rest = chars.as_str();
        let suffix_ok = rest.is_empty() || rest.starts_with(|c: char| c.is_ascii_digit() || c == '_');
        match Self::rename_symbol(&key[..head.len_utf8()], from) {
            Some(new) if suffix_ok => format!("{new}{rest}"),
            _ => key.to_string(),
        }
    }

    pub fn rename_expr(e: &Expr, from: Frame) -> Expr {
        e.rename(&|v| Self::rename_symbol(v, from).map(str::to_string))
    }
}

fn frame_of(r: &TheoremReport) -> Frame {
    match r.inputs.get("frame").and_then(Value::as_str) {
        Some("leibniz") => Frame::Leibniz,
        _ => Frame::Barrow,
    }
}

fn rename_label(label: &str, from: Frame) -> String {
    label
        .split(' ')
        .map(|w| match w.split_once('=') {
            Some((k, v)) => format!("{}={v}", LeibnizFrame::rename_key(k, from)),
            None => LeibnizFrame::rename_symbol(w, from).unwrap_or(w).to_string(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Move a report to the other frame. Applying it twice restores the input.
pub fn to_leibniz_frame(r: &TheoremReport) -> TheoremReport {
    let from = frame_of(r);
    let mut out = r.clone();
    out.inputs = r
        .inputs
        .iter()
        .map(|(k, v)| {
            if k == "frame" {
                (k.clone(), Value::from(from.other().name()))
            } else {
                (LeibnizFrame::rename_key(k, from), v.clone())
            }
        })
        .collect();
    if !out.inputs.contains_key("frame") {
        out.inputs.insert("frame".into(), Value::from(from.other().name()));
    }
    out.details = r
        .details
        .iter()
        .map(|d| Detail {
            label: rename_label(&d.label, from),
            ..d.clone()
        })
        .collect();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::quadrature::report::{inputs, num};

    #[test]
    fn symbols_cycle() {
        assert_eq!(LeibnizFrame::rename_symbol("x", Frame::Barrow), Some("y"));
        assert_eq!(LeibnizFrame::rename_symbol("y", Frame::Leibniz), Some("x"));
        assert_eq!(LeibnizFrame::rename_key("x0", Frame::Barrow), "y0");
        assert_eq!(LeibnizFrame::rename_key("z_lo", Frame::Barrow), "x_lo");
        assert_eq!(LeibnizFrame::rename_key("tol", Frame::Barrow), "tol");
        assert_eq!(LeibnizFrame::rename_key("R", Frame::Barrow), "a");
    }

    #[test]
    fn expressions_rename_variables() {
        let e = parse("x*y/R").unwrap();
        let l = LeibnizFrame::rename_expr(&e, Frame::Barrow);
        assert_eq!(l.to_string(), "y*z/a");
        assert_eq!(LeibnizFrame::rename_expr(&l, Frame::Leibniz), e);
    }

    #[test]
    fn report_round_trip() {
        let r = TheoremReport::new(
            "tangent",
            inputs([("R", num(2.0)), ("x0", num(1.0)), ("tol", num(1e-9))]),
            vec![Detail::new("line vs z at x=0.5", 0.0, 0.0, 0.0, 1.0)],
        );
        let l = to_leibniz_frame(&r);
        assert!(l.inputs.contains_key("a") && l.inputs.contains_key("y0"));
        assert_eq!(l.inputs["frame"], "leibniz");
        assert_eq!(l.details[0].label, "line vs x at y=0.5");
        let back = to_leibniz_frame(&l);
        assert_eq!(back.inputs["frame"], "barrow");
        let mut orig = r.clone();
        orig.inputs.insert("frame".into(), "barrow".into());
        assert_eq!(back, orig);
    }
}
