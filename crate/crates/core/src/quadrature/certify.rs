//! Certified enclosures of `∫ₐᵇ f` by adaptive bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::curve::{PlaneCurve, Shape};
use crate::sum::ExactSum;

use super::partition::{curvature_range, slope_range, value_range};
use super::QuadratureError;

pub const DEFAULT_MAX_CELLS: usize = 1_000_000;

/// How a single cell is bounded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundRule {
    /// `δ·inf f ≤ ∫ ≤ δ·sup f` only.
    Darboux,
    /// Darboux bounds intersected with a trapezoid bound driven by the
    /// slope range and a midpoint bound driven by the curvature range.
    #[default]
    Enclosure,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    pub rule: BoundRule,
    pub max_cells: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            rule: BoundRule::Enclosure,
            max_cells: DEFAULT_MAX_CELLS,
        }
    }
}

/// A certified enclosure `lower ≤ ∫ ≤ upper`.
#[derive(Clone, Debug, Serialize)]
pub struct CertifiedArea {
    pub lower: f64,
    pub upper: f64,
    pub value: f64,
    pub radius: f64,
    pub cells: usize,
    #[serde(skip)]
    lower_sum: ExactSum,
    #[serde(skip)]
    upper_sum: ExactSum,
}

impl CertifiedArea {
    fn from_sums(lower_sum: ExactSum, upper_sum: ExactSum, cells: usize) -> Self {
        let width = &upper_sum - &lower_sum;
        let mut mid = lower_sum.clone();
        mid.extend(&upper_sum);
        CertifiedArea {
            lower: lower_sum.value(),
            upper: upper_sum.value(),
            value: mid.value() / 2.0,
            radius: width.value() / 2.0,
            cells,
            lower_sum,
            upper_sum,
        }
    }

    pub(crate) fn zero() -> Self {
        CertifiedArea::from_sums(ExactSum::new(), ExactSum::new(), 0)
    }

    /// Enclosure of the area over the union of two adjacent intervals.
    pub fn combine(&self, other: &CertifiedArea) -> CertifiedArea {
        let mut lo = self.lower_sum.clone();
        lo.extend(&other.lower_sum);
        let mut hi = self.upper_sum.clone();
        hi.extend(&other.upper_sum);
        CertifiedArea::from_sums(lo, hi, self.cells + other.cells)
    }

    /// `upper − lower`, rounded once from the exact difference.
    pub fn width(&self) -> f64 {
        (&self.upper_sum - &self.lower_sum).value()
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

struct Cell {
    l: f64,
    r: f64,
    w: f64,
    lo: f64,
    hi: f64,
}

impl Cell {
    fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Max-heap key: widest cell first, ties broken towards smaller `x`.
struct Key {
    width: f64,
    left: f64,
    idx: usize,
}

impl PartialEq for Key {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Key {
    fn cmp(&self, o: &Self) -> Ordering {
        self.width
            .total_cmp(&o.width)
            .then_with(|| o.left.total_cmp(&self.left))
            .then_with(|| o.idx.cmp(&self.idx))
    }
}

fn enclose(c: &PlaneCurve, l: f64, r: f64, w: f64, rule: BoundRule) -> Result<Cell, QuadratureError> {
    let fl = c.eval(l)?;
    let fr = c.eval(r)?;
    if let (Shape::Sampled(s), BoundRule::Enclosure) = (c.shape(), rule) {
        // piecewise linear: the trapezoid sum over the pieces is the integral
        let mut area = ExactSum::new();
        let (mut x, mut y) = (l, fl);
        for (&xs, &ys) in s.xs().iter().zip(s.ys()) {
            if xs > l && xs < r {
                area.add_product(xs - x, 0.5 * (y + ys));
                (x, y) = (xs, ys);
            }
        }
        area.add_product(r - x, 0.5 * (y + fr));
        let v = area.value();
        let pad = 4.0 * f64::EPSILON * v.abs();
        return Ok(Cell {
            l,
            r,
            w,
            lo: v - pad,
            hi: v + pad,
        });
    }
    let (m, mx) = value_range(c, l, r)?;
    let (mut lo, mut hi) = (w * m, w * mx);
    if rule == BoundRule::Enclosure {
        if let Some((p, q)) = slope_range(c, l, r) {
            let t = 0.5 * w * (fl + fr);
            let s = ((fr - fl) / w).clamp(p, q);
            let a = if q > p {
                (q - s) * (s - p) * w * w / (2.0 * (q - p))
            } else {
                0.0
            };
            let pad = 8.0 * f64::EPSILON * (t.abs() + a + w * fl.abs().max(fr.abs()));
            lo = lo.max(t - a - pad);
            hi = hi.min(t + a + pad);
        }
        if let Some((k0, k1)) = curvature_range(c, l, r) {
            // ∫ = δ·f(m) + f''(ξ)·δ³/24
            let fm = c.eval(l + 0.5 * w)?;
            let m = w * fm;
            let cube = w * w * w / 24.0;
            let pad = 8.0 * f64::EPSILON * (m.abs() + cube * k0.abs().max(k1.abs()));
            lo = lo.max(m + k0 * cube - pad);
            hi = hi.min(m + k1 * cube + pad);
        }
    }
    let round = f64::EPSILON * lo.abs().max(hi.abs());
    Ok(Cell {
        l,
        r,
        w,
        lo: lo - round,
        hi: hi + round,
    })
}

/// Bisect the widest cell until `Σ (upper − lower) ≤ tol`.
pub fn certify_area(c: &PlaneCurve, a: f64, b: f64, tol: f64) -> Result<CertifiedArea, QuadratureError> {
    certify_area_with(c, a, b, tol, CertifyOptions::default())
}

pub fn certify_area_with(
    c: &PlaneCurve,
    a: f64,
    b: f64,
    tol: f64,
    opts: CertifyOptions,
) -> Result<CertifiedArea, QuadratureError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(QuadratureError::InvalidTolerance(tol));
    }
    if !(a <= b) {
        return Err(QuadratureError::InvalidPartition(format!("interval [{a}, {b}]")));
    }
    if a == b {
        c.eval(a)?;
        return Ok(CertifiedArea::zero());
    }
    let mut cells = vec![Some(enclose(c, a, b, b - a, opts.rule)?)];
    let mut heap = BinaryHeap::new();
    let first = cells[0].as_ref().unwrap();
    let mut total = first.width();
    heap.push(Key {
        width: first.width(),
        left: a,
        idx: 0,
    });
    let mut live = 1usize;
    loop {
        if total <= tol {
            // confirm with an exact total before stopping
            let exact: ExactSum = cells.iter().flatten().map(Cell::width).collect();
            total = exact.value();
            if total <= tol {
                break;
            }
        }
        if live >= opts.max_cells {
            return Err(QuadratureError::CellCap {
                cells: live,
                width: total,
            });
        }
        let Key { idx, .. } = heap.pop().expect("live cells are always queued");
        let cell = cells[idx].take().expect("queued cell is live");
        let half = cell.w / 2.0;
        let mid = cell.l + half;
        if !(mid > cell.l && mid < cell.r) {
            return Err(QuadratureError::CellCap {
                cells: live,
                width: total,
            });
        }
        let left = enclose(c, cell.l, mid, half, opts.rule)?;
        let right = enclose(c, mid, cell.r, half, opts.rule)?;
        total += left.width() + right.width() - cell.width();
        for child in [left, right] {
            heap.push(Key {
                width: child.width(),
                left: child.l,
                idx: cells.len(),
            });
            cells.push(Some(child));
        }
        live += 1;
    }
    let mut done: Vec<Cell> = cells.into_iter().flatten().collect();
    done.sort_by(|x, y| x.l.total_cmp(&y.l));
    let lower: ExactSum = done.iter().map(|c| c.lo).collect();
    let upper: ExactSum = done.iter().map(|c| c.hi).collect();
    Ok(CertifiedArea::from_sums(lower, upper, done.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveError;

    fn curve(t: &str, lo: f64, hi: f64) -> PlaneCurve {
        PlaneCurve::parse(t, lo, hi).unwrap()
    }

    #[test]
    fn square_on_unit_interval() {
        let r = certify_area(&curve("x^2", 0.0, 1.0), 0.0, 1.0, 1e-6).unwrap();
        assert!(r.contains(1.0 / 3.0));
        assert!(r.upper - r.lower <= 1e-6);
        assert!(r.cells < 10_000, "{} cells", r.cells);
    }

    #[test]
    fn sine_over_half_period() {
        let r = certify_area(&curve("sin(x)", 0.0, 4.0), 0.0, std::f64::consts::PI, 1e-8).unwrap();
        assert!(r.contains(2.0), "[{}, {}]", r.lower, r.upper);
        assert!((r.value - 2.0).abs() <= 1e-8);
    }

    #[test]
    fn darboux_rule_needs_many_more_cells() {
        let c = curve("x^2", 0.0, 1.0);
        let opts = CertifyOptions {
            rule: BoundRule::Darboux,
            ..Default::default()
        };
        let d = certify_area_with(&c, 0.0, 1.0, 1e-3, opts).unwrap();
        let e = certify_area(&c, 0.0, 1.0, 1e-3).unwrap();
        assert!(d.contains(1.0 / 3.0) && e.contains(1.0 / 3.0));
        assert!(d.cells > 10 * e.cells);
    }

    #[test]
    fn constant_is_one_cell() {
        let r = certify_area(&curve("2", 0.0, 3.0), 0.0, 3.0, 1e-12).unwrap();
        assert_eq!(r.cells, 1);
        assert_eq!(r.value, 6.0);
    }

    #[test]
    fn sampled_trapezoid_is_exact() {
        let c = PlaneCurve::sampled(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 2.0]).unwrap();
        let r = certify_area(&c, 0.0, 2.0, 1e-12).unwrap();
        assert_eq!(r.value, 3.0);
        let r = certify_area(&c, 0.5, 1.5, 1e-12).unwrap();
        assert_eq!(r.value, 1.75);
    }

    #[test]
    fn combine_adds_enclosures() {
        let c = curve("exp(x)", 0.0, 2.0);
        let l = certify_area(&c, 0.0, 1.0, 1e-9).unwrap();
        let r = certify_area(&c, 1.0, 2.0, 1e-9).unwrap();
        let both = l.combine(&r);
        assert!(both.contains(2f64.exp() - 1.0));
        assert_eq!(both.cells, l.cells + r.cells);
    }

    #[test]
    fn cap_is_reported() {
        let opts = CertifyOptions {
            rule: BoundRule::Darboux,
            max_cells: 50,
        };
        let err = certify_area_with(&curve("x", 0.0, 1.0), 0.0, 1.0, 1e-9, opts).unwrap_err();
        assert!(matches!(err, QuadratureError::CellCap { cells: 50, .. }));
    }

    #[test]
    fn bad_inputs() {
        let c = curve("x", 0.0, 1.0);
        assert!(matches!(
            certify_area(&c, 0.0, 1.0, 0.0),
            Err(QuadratureError::InvalidTolerance(_))
        ));
        assert!(matches!(
            certify_area(&c, 0.0, 2.0, 1e-6),
            Err(QuadratureError::Curve(CurveError::OutOfDomain { .. }))
        ));
    }

    #[test]
    fn constant_curvature_is_one_cell() {
        let r = certify_area(&curve("3*x^2 - x + 2", -1.0, 2.0), -1.0, 2.0, 1e-12).unwrap();
        assert_eq!(r.cells, 1);
        assert!(r.contains(13.5), "[{}, {}]", r.lower, r.upper);
    }

    #[test]
    fn curvature_bound_keeps_cells_low() {
        let r = certify_area(&curve("exp(x)", 0.0, 1.0), 0.0, 1.0, 1e-10).unwrap();
        assert!(r.contains(std::f64::consts::E - 1.0));
        assert!(r.cells < 2_000, "{} cells", r.cells);
    }
}
