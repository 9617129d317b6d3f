//! A string-and-cam drawing device that integrates a slope law.
//!
//! A string of fixed length `U` runs from the cam point `E` through the
//! pulley `T` to the pen `C`. With `x = TR` the pen's distance from the
//! axis, `TC = U − ET`, and `CR = √(TC² − x²)`, the taut string keeps the
//! pen moving along `dz/dx = σ·CR/x`.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use num::Rational64;

use crate::curve::{CurveError, PlaneCurve};
use crate::expr::{self, Expr, Func};
use crate::quadrature::{self, Detail, QuadratureError, TheoremReport};

pub const DEFAULT_STEP: f64 = 1e-4;
/// Steps between step-halving accuracy checks.
pub const CHECK_EVERY: usize = 100;
/// The run stops this many steps short of an infeasible point.
pub const SAFETY_STEPS: usize = 10;
const FEASIBILITY_PROBES: usize = 1025;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TractionalError {
    #[error("invalid device configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("infeasible cam at x = {x}: {reason}")]
    InfeasibleCam { x: f64, reason: String },
    #[error("trace truncated at x = {stopped_at}: cam infeasible at x = {x}")]
    Truncated {
        trace: Box<DeviceTrace>,
        stopped_at: f64,
        x: f64,
    },
    #[error("step-halving check failed at x = {x}: discrepancy {discrepancy} > {limit}")]
    Accuracy { x: f64, discrepancy: f64, limit: f64 },
    #[error("x = {x} outside (0, {a}]")]
    OutOfRange { x: f64, a: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceConfig {
    /// Total string length `ET + TC`.
    #[serde(rename = "U")]
    pub u: f64,
    pub step: f64,
    /// Sign of the pen slope, `+1` or `−1`.
    pub sigma: f64,
    pub x0: f64,
    pub z0: f64,
    pub x1: f64,
}

impl DeviceConfig {
    pub fn new(u: f64, x0: f64, x1: f64) -> Self {
        DeviceConfig {
            u,
            step: DEFAULT_STEP,
            sigma: -1.0,
            x0,
            z0: 0.0,
            x1,
        }
    }

    pub fn validate(&self) -> Result<(), TractionalError> {
        let bad = |m: String| Err(TractionalError::InvalidConfig(m));
        if !(self.u > 0.0 && self.u.is_finite()) {
            return bad(format!("string length U = {} must be positive", self.u));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad(format!("step h = {} must be positive", self.step));
        }
        if self.sigma != 1.0 && self.sigma != -1.0 {
            return bad(format!("slope sign must be +1 or -1, got {}", self.sigma));
        }
        if !(self.x0 > 0.0 && self.x0 < self.x1 && self.x1.is_finite()) {
            return bad(format!("need 0 < x0 < x1, got [{}, {}]", self.x0, self.x1));
        }
        if !self.z0.is_finite() {
            return bad(format!("initial z0 = {} must be finite", self.z0));
        }
        Ok(())
    }
}

/// The cam profile `ET(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CamCurve {
    pub et: PlaneCurve,
}

impl CamCurve {
    pub fn new(et: PlaneCurve) -> Self {
        CamCurve { et }
    }

    /// `CR² = (U − ET)² − x²`.
    pub fn cr_squared(&self, u: f64, x: f64) -> Result<f64, CurveError> {
        let tc = u - self.et.eval(x)?;
        Ok(tc * tc - x * x)
    }

    /// First probe point in `[x0, x1]` where the string cannot reach the pen
    /// or the cam dips below the axis.
    pub fn first_infeasible(&self, u: f64, x0: f64, x1: f64) -> Result<Option<(f64, String)>, CurveError> {
        let slack = 1e-12 * u * u;
        for i in 0..FEASIBILITY_PROBES {
            let x = if i == FEASIBILITY_PROBES - 1 {
                x1
            } else {
                x0 + (x1 - x0) * (i as f64 / (FEASIBILITY_PROBES - 1) as f64)
            };
            let et = self.et.eval(x)?;
            if et < -1e-12 * u {
                return Ok(Some((x, format!("cam ordinate ET = {et} is negative"))));
            }
            let tc = u - et;
            if tc < 0.0 || tc * tc - x * x < -slack {
                return Ok(Some((
                    x,
                    format!("string segment TC = {tc} cannot reach the pen at x = {x}"),
                )));
            }
        }
        Ok(None)
    }

    pub fn check_feasible(&self, u: f64, x0: f64, x1: f64) -> Result<(), TractionalError> {
        match self.first_infeasible(u, x0, x1)? {
            Some((x, reason)) => Err(TractionalError::InfeasibleCam { x, reason }),
            None => Ok(()),
        }
    }
}

fn cam_expr(w: &Expr, u: f64) -> Expr {
    let one_plus = expr::add(Expr::int(1), expr::pow(w.clone(), Rational64::from_integer(2)));
    let root = expr::func(Func::Sqrt, one_plus);
    expr::sub(Expr::real(u), expr::mul(Expr::var("x"), root))
}

/// `ET(x) = U − x·√(1 + w(x)²)` on `[x0, x1]`.
pub fn cam_from_slope_law(w: &PlaneCurve, u: f64, x0: f64, x1: f64) -> Result<CamCurve, TractionalError> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(TractionalError::InvalidConfig(format!(
            "string length U = {u} must be positive"
        )));
    }
    let w = w.restrict(x0, x1)?;
    let et = match (w.as_analytic(), w.as_sampled()) {
        (Some(a), _) => {
            let law = a.expr().rename(&|_| Some("x".to_string()));
            PlaneCurve::analytic(cam_expr(&law, u), x0, x1)?
        }
        (_, Some(s)) => {
            let ys = s.xs().iter().zip(s.ys()).map(|(&x, &w)| u - x * w.hypot(1.0)).collect();
            PlaneCurve::sampled(s.xs().to_vec(), ys)?
        }
        _ => unreachable!("a curve is analytic or sampled"),
    };
    let cam = CamCurve::new(et);
    cam.check_feasible(u, x0, x1)?;
    Ok(cam)
}

/// Cam whose pen traces the area curve of `f` with scale `a`, i.e. `w = f/a`.
pub fn cam_for_quadrature(f: &PlaneCurve, a: f64, u: f64, x0: f64, x1: f64) -> Result<CamCurve, TractionalError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(QuadratureError::InvalidScale(a).into());
    }
    let w = match (f.as_analytic(), f.as_sampled()) {
        (Some(c), _) => PlaneCurve::analytic(expr::div(c.expr().clone(), Expr::real(a)), f.domain().0, f.domain().1)?,
        (_, Some(s)) => PlaneCurve::sampled(s.xs().to_vec(), s.ys().iter().map(|y| y / a).collect())?,
        _ => unreachable!("a curve is analytic or sampled"),
    };
    cam_from_slope_law(&w, u, x0, x1)
}

/// One recorded pen state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceState {
    pub x: f64,
    pub z: f64,
    #[serde(rename = "ET")]
    pub et: f64,
    #[serde(rename = "TC")]
    pub tc: f64,
    #[serde(rename = "CR")]
    pub cr: f64,
    pub slope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceTrace {
    pub config: DeviceConfig,
    pub states: Vec<DeviceState>,
}

impl DeviceTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,z,ET,TC,CR,slope\n");
        for s in &self.states {
            out.push_str(&format!("{},{},{},{},{},{}\n", s.x, s.z, s.et, s.tc, s.cr, s.slope));
        }
        out
    }

    pub fn last(&self) -> &DeviceState {
        self.states.last().expect("a trace has at least its initial state")
    }
}

struct Device<'a> {
    cam: &'a CamCurve,
    cfg: &'a DeviceConfig,
}

impl Device<'_> {
    fn state(&self, x: f64, z: f64) -> Result<DeviceState, CurveError> {
        let et = self.cam.et.eval(x)?;
        let tc = self.cfg.u - et;
        // below the rounding noise of U − ET the pen sits on the string's foot
        let d = tc * tc - x * x;
        let noise = 4.0 * f64::EPSILON * self.cfg.u * (tc.abs() + x);
        let cr = if d <= noise { 0.0 } else { d.sqrt() };
        Ok(DeviceState {
            x,
            z,
            et,
            tc,
            cr,
            slope: self.cfg.sigma * cr / x,
        })
    }

    fn slope(&self, x: f64) -> Result<f64, CurveError> {
        Ok(self.state(x, 0.0)?.slope)
    }

    fn rk4(&self, x: f64, z: f64, h: f64) -> Result<f64, CurveError> {
        // the slope law does not depend on z, but the stages are kept general
        let f = |x: f64, _z: f64| self.slope(x);
        let k1 = f(x, z)?;
        let k2 = f(x + h / 2.0, z + h * k1 / 2.0)?;
        let k3 = f(x + h / 2.0, z + h * k2 / 2.0)?;
        let k4 = f(x + h, z + h * k3)?;
        Ok(z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
    }
}

fn grid(cfg: &DeviceConfig) -> Vec<f64> {
    let n = ((cfg.x1 - cfg.x0) / cfg.step).ceil().max(1.0) as usize;
    let mut xs: Vec<f64> = (0..n).map(|i| cfg.x0 + i as f64 * cfg.step).collect();
    xs.push(cfg.x1);
    xs.dedup_by(|b, a| *b <= *a);
    xs
}

/// Integrate the pen trace with fixed-step RK4 on `[x0, x1]`.
pub fn simulate_device(cam: &CamCurve, cfg: &DeviceConfig) -> Result<DeviceTrace, TractionalError> {
    cfg.validate()?;
    let xs = grid(cfg);
    let slack = 1e-12 * cfg.u * cfg.u;
    let mut stop = xs.len() - 1;
    let mut infeasible = None;
    for (i, &x) in xs.iter().enumerate() {
        if cam.et.eval(x)? < -1e-12 * cfg.u || cam.cr_squared(cfg.u, x)? < -slack {
            infeasible = Some(x);
            stop = i.saturating_sub(SAFETY_STEPS);
            break;
        }
    }
    if stop == 0 {
        let x = infeasible.unwrap_or(cfg.x0);
        return Err(TractionalError::InfeasibleCam {
            x,
            reason: "string cannot reach the pen at the start of the run".into(),
        });
    }
    let dev = Device { cam, cfg };
    let mut states = Vec::with_capacity(stop + 1);
    let mut z = cfg.z0;
    states.push(dev.state(xs[0], z)?);
    for i in 0..stop {
        let (x, h) = (xs[i], xs[i + 1] - xs[i]);
        let next = dev.rk4(x, z, h)?;
        if (i + 1) % CHECK_EVERY == 0 {
            let half = dev.rk4(x, z, h / 2.0)?;
            let twice = dev.rk4(x + h / 2.0, half, h / 2.0)?;
            let discrepancy = (twice - next).abs();
            let limit = 1e-6 * z.abs().max(1.0);
            if discrepancy > limit {
                return Err(TractionalError::Accuracy { x, discrepancy, limit });
            }
        }
        z = next;
        states.push(dev.state(xs[i + 1], z)?);
    }
    let trace = DeviceTrace { config: *cfg, states };
    match infeasible {
        Some(x) => Err(TractionalError::Truncated {
            stopped_at: trace.last().x,
            trace: Box::new(trace),
            x,
        }),
        None => Ok(trace),
    }
}

/// `z(x) = a·ln((a + √(a² − x²))/x) − √(a² − x²)`, with `z(a) = 0`.
pub fn tractrix_closed_form(a: f64, x: f64) -> Result<f64, TractionalError> {
    if !(a > 0.0 && x > 0.0 && x <= a) {
        return Err(TractionalError::OutOfRange { x, a });
    }
    let s = ((a - x) * (a + x)).sqrt();
    Ok(a * ((a + s) / x).ln() - s)
}

/// Constant cam for the tractrix with string segment `TC = a`.
pub fn tractrix_cam(a: f64, u: f64, x0: f64, x1: f64) -> Result<CamCurve, TractionalError> {
    if !(a > 0.0 && a <= u) {
        return Err(TractionalError::InvalidConfig(format!(
            "need 0 < a ≤ U, got a = {a}, U = {u}"
        )));
    }
    Ok(CamCurve::new(PlaneCurve::analytic(Expr::real(u - a), x0, x1)?))
}

/// Build the cam for `w = f/a`, run the device with `σ = +1`, and compare
/// the pen height with the certified area curve of `f`.
pub fn verify_device_quadrature(
    f: &PlaneCurve,
    a: f64,
    u: f64,
    x0: f64,
    x1: f64,
    tol: f64,
) -> Result<TheoremReport, TractionalError> {
    verify_device_quadrature_with(f, a, u, x0, x1, tol, DEFAULT_STEP)
}

pub fn verify_device_quadrature_with(
    f: &PlaneCurve,
    a: f64,
    u: f64,
    x0: f64,
    x1: f64,
    tol: f64,
    step: f64,
) -> Result<TheoremReport, TractionalError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(QuadratureError::InvalidTolerance(tol).into());
    }
    let f = f.restrict(x0, x1)?;
    for i in 0..=256 {
        let x = x0 + (x1 - x0) * (i as f64 / 256.0);
        let v = f.eval(x.min(x1))?;
        if v < 0.0 {
            return Err(QuadratureError::Precondition(format!("quadrature target is negative at x = {x}: {v}")).into());
        }
    }
    let cam = cam_for_quadrature(&f, a, u, x0, x1)?;
    let cfg = DeviceConfig {
        step,
        sigma: 1.0,
        ..DeviceConfig::new(u, x0, x1)
    };
    let trace = simulate_device(&cam, &cfg)?;
    let q = quadrature::quadratrix(&f, a, 2, 1e-3 * tol)?;
    let stride = (trace.states.len() / 128).max(1);
    let mut details = Vec::new();
    for (i, s) in trace.states.iter().enumerate() {
        if i % stride != 0 && i + 1 != trace.states.len() {
            continue;
        }
        let z = q.z_at(s.x)?;
        let pen = s.z - cfg.z0;
        details.push(
            Detail::new(
                format!("pen vs z at x={}", s.x),
                pen,
                z.mid,
                (pen - z.mid).abs(),
                tol + z.radius,
            )
            .at(s.x),
        );
    }
    let mut m = serde_json::Map::new();
    for (k, v) in [("R", a), ("U", u), ("x0", x0), ("x1", x1), ("h", step), ("tol", tol)] {
        m.insert(
            k.into(),
            serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number),
        );
    }
    m.insert("cam".into(), Value::from(cam.et.describe()));
    m.insert("frame".into(), Value::from("barrow"));
    Ok(TheoremReport::new("device_quadrature", m, details))
}
