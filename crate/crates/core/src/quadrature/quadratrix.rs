//! The area curve `z(x) = (1/R) ∫ₐˣ y` as a certified node table.

use serde::Serialize;

use crate::curve::PlaneCurve;

use super::certify::{certify_area_with, CertifiedArea, CertifyOptions};
use super::frame::Frame;
use super::QuadratureError;

/// Enclosure of `z` at one abscissa.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZValue {
    pub x: f64,
    pub lo: f64,
    pub hi: f64,
    pub mid: f64,
    pub radius: f64,
}

impl ZValue {
    fn from_area(x: f64, area: &CertifiedArea, scale: f64) -> Self {
        ZValue {
            x,
            lo: area.lower / scale,
            hi: area.upper / scale,
            mid: area.value / scale,
            radius: area.radius / scale,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadratrixCurve {
    base: PlaneCurve,
    scale: f64,
    segment_tol: f64,
    options: CertifyOptions,
    xs: Vec<f64>,
    areas: Vec<CertifiedArea>,
}

/// Certify `z` on `node_count` uniform nodes spanning the domain of `y`.
/// `tol` bounds the total area width and is split evenly over segments.
pub fn quadratrix(y: &PlaneCurve, scale: f64, node_count: usize, tol: f64) -> Result<QuadratrixCurve, QuadratureError> {
    quadratrix_with(y, scale, node_count, tol, CertifyOptions::default())
}

pub fn quadratrix_with(
    y: &PlaneCurve,
    scale: f64,
    node_count: usize,
    tol: f64,
    options: CertifyOptions,
) -> Result<QuadratrixCurve, QuadratureError> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(QuadratureError::InvalidScale(scale));
    }
    if node_count < 2 {
        return Err(QuadratureError::InvalidPartition(format!(
            "{node_count} quadratrix nodes"
        )));
    }
    let (a, b) = y.domain();
    let segments = node_count - 1;
    let segment_tol = tol / segments as f64;
    let h = (b - a) / segments as f64;
    let xs: Vec<f64> = (0..node_count)
        .map(|i| if i == segments { b } else { a + i as f64 * h })
        .collect();
    let mut areas = Vec::with_capacity(node_count);
    let mut acc = CertifiedArea::zero();
    areas.push(acc.clone());
    for w in xs.windows(2) {
        acc = acc.combine(&certify_area_with(y, w[0], w[1], segment_tol, options)?);
        areas.push(acc.clone());
    }
    Ok(QuadratrixCurve {
        base: y.clone(),
        scale,
        segment_tol,
        options,
        xs,
        areas,
    })
}

impl QuadratrixCurve {
    pub fn base(&self) -> &PlaneCurve {
        &self.base
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn nodes(&self) -> impl Iterator<Item = ZValue> + '_ {
        self.xs
            .iter()
            .zip(&self.areas)
            .map(|(&x, a)| ZValue::from_area(x, a, self.scale))
    }

    pub fn node_count(&self) -> usize {
        self.xs.len()
    }

    /// Certified `z(x)`, reusing the node table up to the last node `≤ x`.
    pub fn z_at(&self, x: f64) -> Result<ZValue, QuadratureError> {
        if !self.base.contains(x) {
            self.base.eval(x)?;
        }
        let k = self.xs.partition_point(|&n| n <= x).saturating_sub(1);
        if self.xs[k] == x {
            return Ok(ZValue::from_area(x, &self.areas[k], self.scale));
        }
        let part = certify_area_with(&self.base, self.xs[k], x, self.segment_tol, self.options)?;
        Ok(ZValue::from_area(x, &self.areas[k].combine(&part), self.scale))
    }

    /// Certified area `∫ₐˣ y`, before division by the scale.
    pub fn area_at(&self, x: f64) -> Result<f64, QuadratureError> {
        Ok(self.z_at(x)?.mid * self.scale)
    }

    /// Table as CSV with a header row named for the given frame.
    pub fn to_csv_in(&self, frame: Frame) -> String {
        let (x, z) = match frame {
            Frame::Barrow => ("x", "z"),
            Frame::Leibniz => ("y", "x"),
        };
        let mut out = format!("{x},{z}_lo,{z}_hi,{z}_mid\n");
        for n in self.nodes() {
            out.push_str(&format!("{},{},{},{}\n", n.x, n.lo, n.hi, n.mid));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        self.to_csv_in(Frame::Barrow)
    }
}

/// `t = R·z(x)/y(x)`.
pub fn barrow_subtangent(q: &QuadratrixCurve, x: f64) -> Result<f64, QuadratureError> {
    let y = q.base.eval(x)?;
    if y == 0.0 {
        return Err(QuadratureError::ZeroOrdinate { x });
    }
    Ok(q.scale * q.z_at(x)?.mid / y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_curve_table() {
        let y = PlaneCurve::parse("x", 0.0, 1.0).unwrap();
        let q = quadratrix(&y, 1.0, 5, 1e-10).unwrap();
        for n in q.nodes() {
            let want = n.x * n.x / 2.0;
            assert!(n.lo <= want + 1e-15 && want <= n.hi + 1e-15, "{n:?}");
            assert!(n.lo <= n.hi);
        }
        let csv = q.to_csv();
        assert!(csv.starts_with("x,z_lo,z_hi,z_mid\n"));
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.lines().nth(5).unwrap().starts_with("1,"));
    }

    #[test]
    fn subtangent_of_constant_and_identity() {
        let one = PlaneCurve::parse("1", 0.0, 3.0).unwrap();
        let q = quadratrix(&one, 2.0, 4, 1e-12).unwrap();
        assert_eq!(q.z_at(2.0).unwrap().mid, 1.0);
        assert_eq!(barrow_subtangent(&q, 2.0).unwrap(), 2.0);

        let id = PlaneCurve::parse("x", 0.0, 2.0).unwrap();
        let q = quadratrix(&id, 1.0, 3, 1e-12).unwrap();
        let t = barrow_subtangent(&q, 1.5).unwrap();
        assert!((t - 0.75).abs() < 1e-12);
        assert!(matches!(
            barrow_subtangent(&q, 0.0),
            Err(QuadratureError::ZeroOrdinate { .. })
        ));
    }

    #[test]
    fn doubling_scale_halves_z() {
        let y = PlaneCurve::parse("exp(x)", 0.0, 1.0).unwrap();
        let q1 = quadratrix(&y, 1.0, 9, 1e-9).unwrap();
        let q2 = quadratrix(&y, 2.0, 9, 1e-9).unwrap();
        for (a, b) in q1.nodes().zip(q2.nodes()) {
            assert_eq!(a.mid, 2.0 * b.mid);
        }
    }

    #[test]
    fn off_node_values() {
        let y = PlaneCurve::parse("3*x^2", 0.0, 2.0).unwrap();
        let q = quadratrix(&y, 1.0, 3, 1e-10).unwrap();
        let z = q.z_at(1.5).unwrap();
        assert!((z.mid - 3.375).abs() <= 1e-10, "{z:?}");
        assert!(z.lo <= 3.375 && 3.375 <= z.hi);
        assert!(q.z_at(2.5).is_err());
    }

    #[test]
    fn leibniz_header() {
        let y = PlaneCurve::parse("x", 0.0, 1.0).unwrap();
        let q = quadratrix(&y, 1.0, 2, 1e-9).unwrap();
        assert!(q.to_csv_in(Frame::Leibniz).starts_with("y,x_lo,x_hi,x_mid\n"));
    }

    #[test]
    fn bad_scale() {
        let y = PlaneCurve::parse("x", 0.0, 1.0).unwrap();
        assert!(matches!(
            quadratrix(&y, 0.0, 3, 1e-9),
            Err(QuadratureError::InvalidScale(_))
        ));
    }
}
