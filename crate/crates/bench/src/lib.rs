//! Benchmark fixtures.

use tangenta_core::tractional::tractrix_cam;
use tangenta_core::{tractrix_closed_form, CamCurve, DeviceConfig, PlaneCurve};

/// Curves of increasing evaluation cost on `[0, 2]`.
pub const CURVES: [&str; 3] = ["x^2", "exp(x)*sin(x) + 2", "sqrt(1 + x^3)"];

pub fn curve(text: &str) -> PlaneCurve {
    PlaneCurve::parse(text, 0.0, 2.0).expect("fixture curve parses")
}

/// Tractrix device at `a = 1` over `[0.1, 0.99]`.
pub fn tractrix(step: f64) -> (CamCurve, DeviceConfig) {
    let cam = tractrix_cam(1.0, 2.0, 0.1, 0.99).expect("feasible cam");
    let cfg = DeviceConfig {
        step,
        z0: tractrix_closed_form(1.0, 0.1).expect("inside the domain"),
        ..DeviceConfig::new(2.0, 0.1, 0.99)
    };
    (cam, cfg)
}
