//! Plane curves and the classical tangent quantities.
//!
//! One frame throughout: abscissa to the right, ordinate upward. The
//! subtangent is signed, `t = c / c'`, so that `t · n = c²` holds with the
//! subnormal `n = c · c'`; the unsigned length is `|t|`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{self, EvalError, Expr, ParseError, Single};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("invalid domain [{lo}, {hi}]")]
    InvalidDomain { lo: f64, hi: f64 },
    #[error("sampled abscissas must be finite and strictly increasing (index {index})")]
    NotIncreasing { index: usize },
    #[error("sampled curve needs at least two points with matching x/y lengths")]
    BadSamples,
    #[error("curve expression must have at most one variable, found {0:?}")]
    TooManyVariables(Vec<String>),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("x = {x} is outside the domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("cannot evaluate curve at x = {x}: {source}")]
    Eval { x: f64, source: EvalError },
    #[error("derivative undefined at x = {x}: {reason}")]
    DerivativeUndefined { x: f64, reason: String },
    #[error("zero slope at x = {x}: subtangent is infinite")]
    ZeroSlope { x: f64 },
    #[error("step must be non-zero")]
    ZeroStep,
    #[error("annotation `{claimed}` contradicted by probe (`{found}`)")]
    AnnotationMismatch { claimed: String, found: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticCurve {
    expr: Expr,
    var: String,
    slope: Expr,
    curvature: Expr,
    third: Expr,
    lo: f64,
    hi: f64,
}

impl AnalyticCurve {
    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    /// First derivative expression.
    pub fn slope_expr(&self) -> &Expr {
        &self.slope
    }

    /// Second derivative expression.
    pub fn second_expr(&self) -> &Expr {
        &self.curvature
    }

    /// Third derivative expression.
    pub fn third_expr(&self) -> &Expr {
        &self.third
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledCurve {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SampledCurve {
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Index of the segment `[x_i, x_{i+1}]` containing `x`.
    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    fn interpolate(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let (x0, x1, y0, y1) = (self.xs[i], self.xs[i + 1], self.ys[i], self.ys[i + 1]);
        if x == x0 {
            return y0;
        }
        if x == x1 {
            return y1;
        }
        y0 + (y1 - y0) * ((x - x0) / (x1 - x0))
    }

    fn slope(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let d = |i: usize, j: usize| (self.ys[j] - self.ys[i]) / (self.xs[j] - self.xs[i]);
        match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(0) => d(0, 1),
            Ok(i) if i == n - 1 => d(n - 2, n - 1),
            Ok(i) => d(i - 1, i + 1),
            Err(_) => {
                let i = self.segment(x);
                d(i, i + 1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Analytic(Box<AnalyticCurve>),
    Sampled(SampledCurve),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convexity {
    Convex,
    Concave,
    /// Second differences vanish to tolerance; both convex and concave.
    Linear,
    Neither,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    Neither,
}

/// Claims about a curve that are checked by probing before they are relied on.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Annotations {
    pub monotonicity: Option<Monotonicity>,
    pub convexity: Option<Convexity>,
}

/// A curve over a closed interval: an expression in one variable, or a
/// piecewise-linear interpolant of samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveSpec", into = "CurveSpec")]
pub struct PlaneCurve {
    shape: Shape,
    annotations: Annotations,
}

/// JSON form of a curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurveSpec {
    Analytic { expr: String, domain: [f64; 2] },
    Sampled { x: Vec<f64>, y: Vec<f64> },
}

impl TryFrom<CurveSpec> for PlaneCurve {
    type Error = CurveError;

    fn try_from(spec: CurveSpec) -> Result<Self, CurveError> {
        match spec {
            CurveSpec::Analytic { expr, domain } => PlaneCurve::parse(&expr, domain[0], domain[1]),
            CurveSpec::Sampled { x, y } => PlaneCurve::sampled(x, y),
        }
    }
}

impl From<PlaneCurve> for CurveSpec {
    fn from(c: PlaneCurve) -> Self {
        match c.shape {
            Shape::Analytic(a) => CurveSpec::Analytic {
                expr: a.expr.to_string(),
                domain: [a.lo, a.hi],
            },
            Shape::Sampled(s) => CurveSpec::Sampled { x: s.xs, y: s.ys },
        }
    }
}

/// Signed tangent quantities at one point of a curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TangentData {
    pub x: f64,
    pub c: f64,
    pub slope: f64,
    pub subtangent: f64,
    pub subnormal: f64,
    pub tangent_foot: f64,
    /// The ordinate vanishes here; the subtangent is reported as 0.
    pub zero_ordinate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CharacteristicTriangle {
    pub dx: f64,
    pub dc: f64,
    pub chord: f64,
}

fn check_domain(lo: f64, hi: f64) -> Result<(), CurveError> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(CurveError::InvalidDomain { lo, hi })
    }
}

impl PlaneCurve {
    /// Analytic curve from an expression with at most one free variable.
    pub fn analytic(expr: Expr, lo: f64, hi: f64) -> Result<Self, CurveError> {
        check_domain(lo, hi)?;
        let vars = expr.variables();
        if vars.len() > 1 {
            return Err(CurveError::TooManyVariables(vars.into_iter().collect()));
        }
        let var = vars.into_iter().next().unwrap_or_else(|| "x".to_string());
        let slope = expr.differentiate(&var);
        let curvature = slope.differentiate(&var);
        let third = curvature.differentiate(&var);
        Ok(PlaneCurve {
            shape: Shape::Analytic(Box::new(AnalyticCurve {
                expr,
                var,
                slope,
                curvature,
                third,
                lo,
                hi,
            })),
            annotations: Annotations::default(),
        })
    }

    pub fn parse(text: &str, lo: f64, hi: f64) -> Result<Self, CurveError> {
        PlaneCurve::analytic(expr::parse(text)?, lo, hi)
    }

    pub fn sampled(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, CurveError> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(CurveError::BadSamples);
        }
        for (i, w) in xs.windows(2).enumerate() {
            if !(w[0].is_finite() && w[1].is_finite() && w[0] < w[1]) {
                return Err(CurveError::NotIncreasing { index: i + 1 });
            }
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(CurveError::BadSamples);
        }
        Ok(PlaneCurve {
            shape: Shape::Sampled(SampledCurve { xs, ys }),
            annotations: Annotations::default(),
        })
    }

    pub fn with_annotations(mut self, annotations: Annotations) -> Self {
        self.annotations = annotations;
        self
    }

    pub fn annotations(&self) -> Annotations {
        self.annotations
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn as_analytic(&self) -> Option<&AnalyticCurve> {
        match &self.shape {
            Shape::Analytic(a) => Some(a),
            Shape::Sampled(_) => None,
        }
    }

    pub fn as_sampled(&self) -> Option<&SampledCurve> {
        match &self.shape {
            Shape::Sampled(s) => Some(s),
            Shape::Analytic(_) => None,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Analytic(a) => (a.lo, a.hi),
            Shape::Sampled(s) => (s.xs[0], s.xs[s.xs.len() - 1]),
        }
    }

    /// Same curve on a sub-interval (analytic) or restricted samples.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self, CurveError> {
        check_domain(lo, hi)?;
        self.check_x(lo)?;
        self.check_x(hi)?;
        match &self.shape {
            Shape::Analytic(a) => {
                let mut a = a.clone();
                a.lo = lo;
                a.hi = hi;
                Ok(PlaneCurve {
                    shape: Shape::Analytic(a),
                    annotations: self.annotations,
                })
            }
            Shape::Sampled(s) => {
                let mut xs = vec![lo];
                let mut ys = vec![s.interpolate(lo)];
                for (&x, &y) in s.xs.iter().zip(&s.ys) {
                    if x > lo && x < hi {
                        xs.push(x);
                        ys.push(y);
                    }
                }
                xs.push(hi);
                ys.push(s.interpolate(hi));
                PlaneCurve::sampled(xs, ys)
            }
        }
    }

    /// Domain membership with a few ulps of slack at the ends.
    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.domain();
        let slack = 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
        x.is_finite() && x >= lo - slack && x <= hi + slack
    }

    fn check_x(&self, x: f64) -> Result<(), CurveError> {
        if self.contains(x) {
            Ok(())
        } else {
            let (lo, hi) = self.domain();
            Err(CurveError::OutOfDomain { x, lo, hi })
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64, CurveError> {
        self.check_x(x)?;
        let v = match &self.shape {
            Shape::Analytic(a) => a
                .expr
                .eval(&Single(x))
                .map_err(|source| CurveError::Eval { x, source })?,
            Shape::Sampled(s) => s.interpolate(x),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CurveError::Eval {
                x,
                source: EvalError::Domain {
                    node: self.describe(),
                    reason: "non-finite value",
                },
            })
        }
    }

    pub fn slope(&self, x: f64) -> Result<f64, CurveError> {
        self.check_x(x)?;
        let v = match &self.shape {
            Shape::Analytic(a) => a.slope.eval(&Single(x)).map_err(|e| CurveError::DerivativeUndefined {
                x,
                reason: e.to_string(),
            })?,
            Shape::Sampled(s) => s.slope(x),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CurveError::DerivativeUndefined {
                x,
                reason: "non-finite slope".into(),
            })
        }
    }

    /// Second derivative; `None` for sampled curves.
    pub fn second(&self, x: f64) -> Option<Result<f64, CurveError>> {
        let a = self.as_analytic()?;
        Some(self.derivative(&a.curvature, x, "second derivative undefined"))
    }

    /// Third derivative; `None` for sampled curves.
    pub fn third(&self, x: f64) -> Option<Result<f64, CurveError>> {
        let a = self.as_analytic()?;
        Some(self.derivative(&a.third, x, "third derivative undefined"))
    }

    fn derivative(&self, e: &Expr, x: f64, reason: &str) -> Result<f64, CurveError> {
        self.check_x(x).and_then(|_| {
            e.eval(&Single(x))
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CurveError::DerivativeUndefined {
                    x,
                    reason: reason.into(),
                })
        })
    }

    pub fn tangent_data(&self, x: f64) -> Result<TangentData, CurveError> {
        let c = self.eval(x)?;
        let slope = self.slope(x)?;
        if slope == 0.0 {
            return Err(CurveError::ZeroSlope { x });
        }
        let subtangent = c / slope;
        Ok(TangentData {
            x,
            c,
            slope,
            subtangent,
            subnormal: c * slope,
            tangent_foot: x - subtangent,
            zero_ordinate: c == 0.0,
        })
    }

    pub fn characteristic_triangle(&self, x: f64, dx: f64) -> Result<CharacteristicTriangle, CurveError> {
        if dx == 0.0 {
            return Err(CurveError::ZeroStep);
        }
        let dc = self.eval(x + dx)? - self.eval(x)?;
        Ok(CharacteristicTriangle {
            dx,
            dc,
            chord: dx.hypot(dc),
        })
    }

    fn probe(&self, a: f64, b: f64, n: usize) -> Result<Vec<f64>, CurveError> {
        let n = n.max(3);
        let h = (b - a) / (n - 1) as f64;
        (0..n)
            .map(|i| {
                let x = if i == n - 1 { b } else { a + i as f64 * h };
                self.eval(x)
            })
            .collect()
    }

    /// Classify convexity on `[a, b]` from second differences on a uniform
    /// grid of `n` probes (at least 3).
    pub fn convexity(&self, a: f64, b: f64, n: usize) -> Result<Convexity, CurveError> {
        let v = self.probe(a, b, n)?;
        let scale = v.iter().fold(0.0f64, |m, y| m.max(y.abs())).max(f64::MIN_POSITIVE);
        let tol = 1e-12 * scale;
        let (mut pos, mut neg) = (false, false);
        for w in v.windows(3) {
            let d2 = w[0] - 2.0 * w[1] + w[2];
            pos |= d2 > tol;
            neg |= d2 < -tol;
        }
        Ok(match (pos, neg) {
            (false, false) => Convexity::Linear,
            (true, false) => Convexity::Convex,
            (false, true) => Convexity::Concave,
            (true, true) => Convexity::Neither,
        })
    }

    /// Classify monotonicity on `[a, b]` from first differences.
    pub fn monotonicity(&self, a: f64, b: f64, n: usize) -> Result<Monotonicity, CurveError> {
        let v = self.probe(a, b, n)?;
        let scale = v.iter().fold(0.0f64, |m, y| m.max(y.abs())).max(f64::MIN_POSITIVE);
        let tol = 1e-12 * scale;
        let (mut up, mut down) = (false, false);
        for w in v.windows(2) {
            let d = w[1] - w[0];
            up |= d > tol;
            down |= d < -tol;
        }
        Ok(match (up, down) {
            (false, false) => Monotonicity::Constant,
            (true, false) => Monotonicity::Increasing,
            (false, true) => Monotonicity::Decreasing,
            (true, true) => Monotonicity::Neither,
        })
    }

    /// Check any annotations against probes over the whole domain.
    pub fn verify_annotations(&self, n: usize) -> Result<(), CurveError> {
        let (lo, hi) = self.domain();
        if let Some(claimed) = self.annotations.monotonicity {
            let found = self.monotonicity(lo, hi, n)?;
            let ok = found == claimed || (found == Monotonicity::Constant && claimed != Monotonicity::Neither);
            if !ok {
                return Err(CurveError::AnnotationMismatch {
                    claimed: format!("{claimed:?}"),
                    found: format!("{found:?}"),
                });
            }
        }
        if let Some(claimed) = self.annotations.convexity {
            let found = self.convexity(lo, hi, n)?;
            let ok = found == claimed || (found == Convexity::Linear && claimed != Convexity::Neither);
            if !ok {
                return Err(CurveError::AnnotationMismatch {
                    claimed: format!("{claimed:?}"),
                    found: format!("{found:?}"),
                });
            }
        }
        Ok(())
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match &self.shape {
            Shape::Analytic(a) => format!("{} on [{}, {}]", a.expr, a.lo, a.hi),
            Shape::Sampled(s) => format!("{} samples on [{}, {}]", s.xs.len(), s.xs[0], s.xs[s.xs.len() - 1]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(text: &str, lo: f64, hi: f64) -> PlaneCurve {
        PlaneCurve::parse(text, lo, hi).unwrap()
    }

    #[test]
    fn evaluation() {
        assert_eq!(curve("x^2", 0.0, 5.0).eval(3.0).unwrap(), 9.0);
        let s = PlaneCurve::sampled(vec![0.0, 1.0], vec![0.0, 2.0]).unwrap();
        assert_eq!(s.eval(0.5).unwrap(), 1.0);
        assert!(matches!(
            curve("x", 0.0, 2.0).eval(5.0),
            Err(CurveError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn slopes() {
        assert_eq!(curve("x^2", 0.0, 5.0).slope(2.0).unwrap(), 4.0);
        let s = PlaneCurve::sampled(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap();
        assert_eq!(s.slope(1.0).unwrap(), 2.0);
        assert_eq!(s.slope(0.0).unwrap(), 1.0);
        assert_eq!(s.slope(2.0).unwrap(), 3.0);
        assert_eq!(s.slope(1.5).unwrap(), 3.0);
        assert!(matches!(
            curve("sqrt(x)", 0.0, 1.0).slope(0.0),
            Err(CurveError::DerivativeUndefined { .. })
        ));
    }

    #[test]
    fn tangent_quantities() {
        let t = curve("x", 0.0, 5.0).tangent_data(3.0).unwrap();
        assert_eq!((t.subtangent, t.subnormal, t.tangent_foot), (3.0, 3.0, 0.0));
        let t = curve("x^2", 0.0, 5.0).tangent_data(2.0).unwrap();
        assert_eq!((t.subtangent, t.subnormal, t.tangent_foot), (1.0, 16.0, 1.0));
        let parabola = curve("sqrt(2*x)", 0.0, 10.0);
        for x in [0.5, 2.0, 8.0, 9.7] {
            let t = parabola.tangent_data(x).unwrap();
            assert!((t.subnormal - 1.0).abs() < 1e-15, "{x}: {}", t.subnormal);
        }
    }

    #[test]
    fn zero_slope_and_zero_ordinate_are_distinct() {
        assert_eq!(
            curve("(x - 1)^2", 0.0, 2.0).tangent_data(1.0),
            Err(CurveError::ZeroSlope { x: 1.0 })
        );
        let t = curve("x", 0.0, 2.0).tangent_data(0.0).unwrap();
        assert!(t.zero_ordinate);
        assert_eq!(t.subtangent, 0.0);
    }

    #[test]
    fn sign_convention() {
        let inc = curve("x", 0.5, 3.0).tangent_data(2.0).unwrap();
        assert!(inc.subtangent > 0.0 && inc.tangent_foot < inc.x);
        let dec = curve("1/x", 0.5, 3.0).tangent_data(2.0).unwrap();
        assert!(dec.subtangent < 0.0 && dec.tangent_foot > dec.x);
    }

    #[test]
    fn characteristic_triangles() {
        let t = curve("x", 0.0, 2.0).characteristic_triangle(1.0, 0.5).unwrap();
        assert_eq!((t.dx, t.dc), (0.5, 0.5));
        assert!((t.chord - 0.5f64.sqrt()).abs() < 1e-16);
        let t = curve("x^2", 0.0, 2.0).characteristic_triangle(1.0, 0.1).unwrap();
        assert!((t.dc - 0.21).abs() < 1e-15);
        assert_eq!(
            curve("x", 0.0, 2.0).characteristic_triangle(1.0, 0.0),
            Err(CurveError::ZeroStep)
        );
    }

    #[test]
    fn convexity_classes() {
        assert_eq!(
            curve("x^2", 0.0, 2.0).convexity(0.0, 2.0, 50).unwrap(),
            Convexity::Convex
        );
        assert_eq!(
            curve("sqrt(x)", 0.1, 2.0).convexity(0.1, 2.0, 50).unwrap(),
            Convexity::Concave
        );
        assert_eq!(
            curve("sin(x)", 0.0, 6.0).convexity(0.0, 6.0, 50).unwrap(),
            Convexity::Neither
        );
        assert_eq!(
            curve("2*x + 1", 0.0, 6.0).convexity(0.0, 6.0, 50).unwrap(),
            Convexity::Linear
        );
    }

    #[test]
    fn annotations_are_checked() {
        let c = curve("x^2", 0.0, 2.0).with_annotations(Annotations {
            monotonicity: Some(Monotonicity::Increasing),
            convexity: Some(Convexity::Concave),
        });
        assert!(matches!(
            c.verify_annotations(64),
            Err(CurveError::AnnotationMismatch { .. })
        ));
    }

    #[test]
    fn json_forms() {
        let c: PlaneCurve = serde_json::from_str(r#"{"kind":"analytic","expr":"x^2","domain":[0,2]}"#).unwrap();
        assert_eq!(c.eval(1.5).unwrap(), 2.25);
        let s: PlaneCurve = serde_json::from_str(r#"{"kind":"sampled","x":[0,1,2],"y":[0,1,4]}"#).unwrap();
        assert_eq!(s.eval(1.5).unwrap(), 2.5);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(text, r#"{"kind":"analytic","expr":"x^2","domain":[0.0,2.0]}"#);
        let bad = serde_json::from_str::<PlaneCurve>(r#"{"kind":"sampled","x":[0,0],"y":[0,1]}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn rejects_bivariate_expressions() {
        assert!(matches!(
            PlaneCurve::parse("x*y", 0.0, 1.0),
            Err(CurveError::TooManyVariables(_))
        ));
    }
}
