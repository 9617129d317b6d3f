//! Partitions, cell extrema, and the lower/upper/tagged/oscillation sums.

use serde::Serialize;

use crate::curve::{CurveError, PlaneCurve, Shape};
use crate::sum::ExactSum;

use super::QuadratureError;

/// Sub-intervals scanned for slope sign changes inside one cell.
const SCAN: usize = 8;
/// Bisection stops once the bracket around a critical point is this narrow.
const CRITICAL_TOL: f64 = 1e-12;

/// Nodes `a = x₀ < … < xₙ = b` with cell widths and optional tags in `[0, 1]`.
///
/// Widths are stored, not recomputed: for a uniform partition every cell has
/// width exactly `d = (b − a)/n`, and splitting a cell halves its width
/// exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Partition {
    nodes: Vec<f64>,
    widths: Vec<f64>,
    tags: Option<Vec<f64>>,
    uniform: Option<f64>,
}

impl Partition {
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self, QuadratureError> {
        if n == 0 || !(a.is_finite() && b.is_finite() && a < b) {
            return Err(QuadratureError::InvalidPartition(format!(
                "uniform partition of [{a}, {b}] into {n} cells"
            )));
        }
        let d = (b - a) / n as f64;
        let nodes = (0..=n).map(|i| if i == n { b } else { a + i as f64 * d }).collect();
        Ok(Partition {
            nodes,
            widths: vec![d; n],
            tags: None,
            uniform: Some(d),
        })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self, QuadratureError> {
        if nodes.len() < 2 || nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(QuadratureError::InvalidPartition(
                "nodes must be finite and strictly increasing, at least two".into(),
            ));
        }
        let widths = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Partition {
            nodes,
            widths,
            tags: None,
            uniform: None,
        })
    }

    pub fn with_tags(mut self, tags: Vec<f64>) -> Result<Self, QuadratureError> {
        if tags.len() != self.cells() || tags.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(QuadratureError::InvalidPartition(format!(
                "need {} tags in [0, 1]",
                self.cells()
            )));
        }
        self.tags = Some(tags);
        Ok(self)
    }

    /// The same tag `eps` in every cell (0 = left endpoints, 1 = right).
    pub fn with_uniform_tag(self, eps: f64) -> Result<Self, QuadratureError> {
        let n = self.cells();
        self.with_tags(vec![eps; n])
    }

    pub fn cells(&self) -> usize {
        self.widths.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn tags(&self) -> Option<&[f64]> {
        self.tags.as_deref()
    }

    /// Common cell width when the partition is uniform.
    pub fn uniform_width(&self) -> Option<f64> {
        self.uniform
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    /// Split cell `i` in two halves. Tags are dropped.
    pub fn refine(&self, i: usize) -> Partition {
        assert!(i < self.cells(), "cell {i} out of range");
        let half = self.widths[i] / 2.0;
        let mut nodes = self.nodes.clone();
        nodes.insert(i + 1, self.nodes[i] + half);
        let mut widths = self.widths.clone();
        widths[i] = half;
        widths.insert(i + 1, half);
        Partition {
            nodes,
            widths,
            tags: None,
            uniform: None,
        }
    }

    fn tag_point(&self, i: usize, eps: f64) -> f64 {
        if eps == 0.0 {
            self.nodes[i]
        } else if eps == 1.0 {
            self.nodes[i + 1]
        } else {
            self.nodes[i] + eps * self.widths[i]
        }
    }
}

/// Infimum and supremum of a curve over `[l, r]`.
///
/// Sampled curves are piecewise linear, so endpoints and interior samples
/// are exact. Analytic curves use endpoints, a probe grid, and critical
/// points located by bisection on sign changes of the slope.
pub(crate) fn value_range(c: &PlaneCurve, l: f64, r: f64) -> Result<(f64, f64), CurveError> {
    let fl = c.eval(l)?;
    let fr = c.eval(r)?;
    let (mut lo, mut hi) = (fl.min(fr), fl.max(fr));
    match c.shape() {
        Shape::Sampled(s) => {
            for (&x, &y) in s.xs().iter().zip(s.ys()) {
                if x > l && x < r {
                    lo = lo.min(y);
                    hi = hi.max(y);
                }
            }
        }
        Shape::Analytic(_) => {
            let (a, b) = range_by_scan(&|x| c.eval(x), &|x| c.slope(x).ok(), l, r)?;
            lo = lo.min(a);
            hi = hi.max(b);
        }
    }
    Ok((lo, hi))
}

/// Range of the slope over `[l, r]` for analytic curves; `None` when the
/// slope or its derivative is unavailable somewhere on the probe grid.
pub(crate) fn slope_range(c: &PlaneCurve, l: f64, r: f64) -> Option<(f64, f64)> {
    c.as_analytic()?;
    let second = |x: f64| c.second(x).and_then(Result::ok);
    for k in 0..=SCAN {
        second(probe(l, r, k))?;
    }
    range_by_scan(&|x| c.slope(x), &second, l, r).ok()
}

/// Range of the second derivative over `[l, r]` for analytic curves.
pub(crate) fn curvature_range(c: &PlaneCurve, l: f64, r: f64) -> Option<(f64, f64)> {
    c.as_analytic()?;
    let third = |x: f64| c.third(x).and_then(Result::ok);
    for k in 0..=SCAN {
        third(probe(l, r, k))?;
    }
    range_by_scan(&|x| c.second(x).expect("analytic"), &third, l, r).ok()
}

fn probe(l: f64, r: f64, k: usize) -> f64 {
    if k == SCAN {
        r
    } else {
        l + (r - l) * (k as f64 / SCAN as f64)
    }
}

fn range_by_scan(
    g: &dyn Fn(f64) -> Result<f64, CurveError>,
    dg: &dyn Fn(f64) -> Option<f64>,
    l: f64,
    r: f64,
) -> Result<(f64, f64), CurveError> {
    let xs: Vec<f64> = (0..=SCAN).map(|k| probe(l, r, k)).collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in &xs {
        let v = g(x)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let slopes: Vec<Option<f64>> = xs.iter().map(|&x| dg(x)).collect();
    for k in 0..SCAN {
        let (Some(sp), Some(sq)) = (slopes[k], slopes[k + 1]) else {
            continue;
        };
        if sp * sq >= 0.0 {
            continue;
        }
        let (mut p, mut q) = (xs[k], xs[k + 1]);
        let tol = CRITICAL_TOL.max(4.0 * f64::EPSILON * p.abs().max(q.abs()));
        for _ in 0..200 {
            if q - p <= tol {
                break;
            }
            let m = 0.5 * (p + q);
            if m <= p || m >= q {
                break;
            }
            match dg(m) {
                Some(sm) if (sm < 0.0) == (sp < 0.0) && sm != 0.0 => p = m,
                Some(_) => q = m,
                None => break,
            }
        }
        let (gp, gq) = (g(p)?, g(q)?);
        let pad = dg(p).unwrap_or(0.0).abs().max(dg(q).unwrap_or(0.0).abs()) * (q - p);
        lo = lo.min(gp.min(gq) - pad);
        hi = hi.max(gp.max(gq) + pad);
    }
    Ok((lo, hi))
}

/// Per-cell bookkeeping of a Darboux sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CellBounds {
    pub left: f64,
    pub right: f64,
    pub width: f64,
    pub inf: f64,
    pub sup: f64,
}

impl CellBounds {
    /// Oscillation `Dᵢ = Mᵢ − mᵢ`.
    pub fn oscillation(&self) -> f64 {
        self.sup - self.inf
    }
}

#[derive(Clone, Debug)]
pub struct DarbouxSums {
    pub cells: Vec<CellBounds>,
    lower: ExactSum,
    upper: ExactSum,
}

impl DarbouxSums {
    /// `Σ δᵢ mᵢ`, correctly rounded.
    pub fn lower(&self) -> f64 {
        self.lower.value()
    }

    /// `Σ δᵢ Mᵢ`, correctly rounded.
    pub fn upper(&self) -> f64 {
        self.upper.value()
    }

    /// `Σ δᵢ Dᵢ`. Equal to upper − lower in exact arithmetic; this is the
    /// correctly rounded value of that exact difference.
    pub fn oscillation(&self) -> f64 {
        (&self.upper - &self.lower).value()
    }
}

pub fn darboux_sums(c: &PlaneCurve, p: &Partition) -> Result<DarbouxSums, QuadratureError> {
    let mut cells = Vec::with_capacity(p.cells());
    let mut lower = ExactSum::new();
    let mut upper = ExactSum::new();
    for i in 0..p.cells() {
        let (l, r, w) = (p.nodes[i], p.nodes[i + 1], p.widths[i]);
        let (inf, sup) = value_range(c, l, r)?;
        lower.add_product(w, inf);
        upper.add_product(w, sup);
        cells.push(CellBounds {
            left: l,
            right: r,
            width: w,
            inf,
            sup,
        });
    }
    Ok(DarbouxSums { cells, lower, upper })
}

/// `S = Σ δᵢ f(xᵢ₋₁ + εᵢ δᵢ)`.
pub fn tagged_sum(c: &PlaneCurve, p: &Partition) -> Result<f64, QuadratureError> {
    let tags = p.tags().ok_or(QuadratureError::MissingTags)?;
    let mut s = ExactSum::new();
    for (i, &eps) in tags.iter().enumerate() {
        s.add_product(p.widths[i], c.eval(p.tag_point(i, eps))?);
    }
    Ok(s.value())
}

pub fn oscillation_sum(c: &PlaneCurve, p: &Partition) -> Result<f64, QuadratureError> {
    Ok(darboux_sums(c, p)?.oscillation())
}
