//! Tangent and area constructions on plane curves.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod diagram;
pub mod expr;
pub mod quadrature;
pub mod sum;
pub mod tractional;

pub use curve::{Annotations, Convexity, CurveError, CurveSpec, Monotonicity, PlaneCurve, Shape, TangentData};
pub use diagram::{barrow_figure, leibniz_figure, render_svg, DiagramError, Scene};
pub use expr::{parse, Expr, ParseError};
pub use quadrature::{
    certify_area, darboux_sums, ftc_check, oscillation_sum, quadratrix, tagged_sum, to_leibniz_frame,
    verify_leibniz_tangency, verify_prop11, verify_prop19, verify_subnormal_area, CertifiedArea, Frame, Partition,
    QuadratrixCurve, QuadratureError, TheoremReport, Verdict,
};
pub use sum::ExactSum;
pub use tractional::{
    cam_from_slope_law, simulate_device, tractrix_closed_form, verify_device_quadrature, CamCurve, DeviceConfig,
    DeviceTrace, TractionalError,
};
