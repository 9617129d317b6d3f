//! Darboux sums, certified areas, the area curve, and theorem checks.

use thiserror::Error;

use crate::curve::{CurveError, Monotonicity};

mod certify;
mod frame;
mod partition;
mod quadratrix;
mod report;
mod theorems;

pub use certify::{certify_area, certify_area_with, BoundRule, CertifiedArea, CertifyOptions, DEFAULT_MAX_CELLS};
pub use frame::{to_leibniz_frame, Frame, LeibnizFrame};
pub use partition::{darboux_sums, oscillation_sum, tagged_sum, CellBounds, DarbouxSums, Partition};
pub use quadratrix::{barrow_subtangent, quadratrix, quadratrix_with, QuadratrixCurve, ZValue};
pub use report::{Detail, TheoremReport, Verdict};
pub use theorems::{
    ftc_check, ftc_check_with, verify_leibniz_tangency, verify_prop11, verify_prop19, verify_subnormal_area, FtcOptions,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("tagged sum needs tags on the partition")]
    MissingTags,
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("cell cap reached at {cells} cells with total width {width}")]
    CellCap { cells: usize, width: f64 },
    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("ordinate is zero at x = {x}: subtangent undefined")]
    ZeroOrdinate { x: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("ordinate must be monotone on the domain, found {0:?}")]
    NotMonotone(Monotonicity),
    #[error("grid point {x} is within one step ({h}) of the domain edge")]
    GridTooCloseToEdge { x: f64, h: f64 },
}
