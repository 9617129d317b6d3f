//! Numerical verification of the tangent/area relations.

use num::{BigRational, Rational64};
use serde_json::Value;

use crate::curve::{Monotonicity, PlaneCurve};
use crate::expr::{self, Expr};
use crate::sum::ExactSum;

use super::certify::certify_area;
use super::partition::{oscillation_sum, tagged_sum, Partition};
use super::quadratrix::{quadratrix, QuadratrixCurve, ZValue};
use super::report::{inputs, num, Detail, TheoremReport};
use super::QuadratureError;

/// Relative slack added to every comparison of computed values.
const REL_TOL: f64 = 1e-9;
/// Nodes in the quadratrix tables built by the verifiers.
const TABLE_NODES: usize = 65;
/// Probes used to classify monotonicity.
const SHAPE_PROBES: usize = 257;

fn check_scale(r: f64) -> Result<(), QuadratureError> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(QuadratureError::InvalidScale(r))
    }
}

fn abs_max(y: &PlaneCurve, lo: f64, hi: f64) -> Result<f64, QuadratureError> {
    let n = TABLE_NODES;
    let mut m = 0.0f64;
    for i in 0..n {
        let x = if i == n - 1 {
            hi
        } else {
            lo + (hi - lo) * (i as f64 / (n - 1) as f64)
        };
        m = m.max(y.eval(x)?.abs());
    }
    Ok(m)
}

/// Certification budget for a table over the whole domain of `y`.
fn table(y: &PlaneCurve, scale: f64) -> Result<(QuadratrixCurve, f64), QuadratureError> {
    let (lo, hi) = y.domain();
    let size = (hi - lo).max(abs_max(y, lo, hi)? * (hi - lo)).max(1.0);
    let q = quadratrix(y, scale, TABLE_NODES, 1e-11 * size)?;
    Ok((q, size))
}

fn frame_inputs(mut m: serde_json::Map<String, Value>) -> serde_json::Map<String, Value> {
    m.insert("frame".into(), Value::from("barrow"));
    m
}

fn nonnegative(y: &PlaneCurve) -> Result<(), QuadratureError> {
    let (lo, hi) = y.domain();
    for i in 0..SHAPE_PROBES {
        let x = lo + (hi - lo) * (i as f64 / (SHAPE_PROBES - 1) as f64);
        let v = y.eval(x.min(hi))?;
        if v < 0.0 {
            return Err(QuadratureError::Precondition(format!(
                "ordinate is negative at x = {x}: {v}"
            )));
        }
    }
    Ok(())
}

/// The tangent to the area curve at `x0` lies on one side of it: below when
/// `y` increases, above when `y` decreases.
pub fn verify_prop11(y: &PlaneCurve, r: f64, x0: f64, probes: &[f64]) -> Result<TheoremReport, QuadratureError> {
    check_scale(r)?;
    let (lo, hi) = y.domain();
    if !(x0 > lo && x0 < hi) {
        return Err(QuadratureError::Precondition(format!(
            "x0 = {x0} must lie inside ({lo}, {hi})"
        )));
    }
    for &p in probes {
        y.eval(p)?;
    }
    y.verify_annotations(SHAPE_PROBES)?;
    let mono = y.monotonicity(lo, hi, SHAPE_PROBES)?;
    let (sign, case) = match mono {
        Monotonicity::Increasing | Monotonicity::Constant => (1.0, "tangent below"),
        Monotonicity::Decreasing => (-1.0, "tangent above"),
        Monotonicity::Neither => return Err(QuadratureError::NotMonotone(mono)),
    };
    nonnegative(y)?;
    let (q, _) = table(y, r)?;
    let y0 = y.eval(x0)?;
    let z0 = q.z_at(x0)?;
    let slope = y0 / r;
    let zs: Vec<ZValue> = probes.iter().map(|&p| q.z_at(p)).collect::<Result<_, _>>()?;
    let scale = zs
        .iter()
        .map(|z| z.mid.abs())
        .chain(probes.iter().map(|&p| y.eval(p).map_or(0.0, f64::abs)))
        .fold((hi - lo).max(y0.abs()).max(z0.mid.abs()), f64::max);
    let details = zs
        .iter()
        .map(|z| {
            let line = z0.mid + slope * (z.x - x0);
            let tol = z.radius + z0.radius + REL_TOL * scale;
            let d = Detail::new(
                format!("line vs z at x={}", z.x),
                line,
                z.mid,
                sign * (line - z.mid),
                tol,
            )
            .at(z.x);
            if z.x == x0 {
                d.note("point of tangency")
            } else if (line - z.mid).abs() <= tol {
                d.note("boundary case: line meets the curve")
            } else {
                d
            }
        })
        .collect();
    let t = if y0 == 0.0 { f64::INFINITY } else { r * z0.mid / y0 };
    let m = inputs([
        ("R", num(r)),
        ("x0", num(x0)),
        ("y0", num(y0)),
        ("z0", num(z0.mid)),
        ("t", num(t)),
        ("case", Value::from(case)),
    ]);
    Ok(TheoremReport::new("prop11", frame_inputs(m), details))
}

/// `|Σ δᵢ y(tagᵢ) − R·Δz| ≤ Σ δᵢ Dᵢ`, tags defaulting to left endpoints.
pub fn verify_prop19(y: &PlaneCurve, r: f64, p: &Partition) -> Result<TheoremReport, QuadratureError> {
    check_scale(r)?;
    let (a, b) = p.interval();
    let tagged = match p.tags() {
        Some(_) => p.clone(),
        None => p.clone().with_uniform_tag(0.0)?,
    };
    let sum = tagged_sum(y, &tagged)?;
    let size = (b - a).max(abs_max(y, a, b)? * (b - a)).max(1.0);
    let area = certify_area(y, a, b, 1e-11 * size)?;
    // z(b) − z(a) scaled back by R
    let rdz = r * (area.value / r);
    let osc = oscillation_sum(y, p)?;
    let gap = (sum - rdz).abs();
    let slack = area.radius + REL_TOL * size;
    let ratio = if gap > 0.0 { osc / gap } else { f64::INFINITY };
    let mut d = Detail::new("gap vs oscillation sum", gap, osc, gap - osc, slack);
    if osc == 0.0 {
        d = d.note("boundary case: zero oscillation");
    }
    let m = inputs([
        ("R", num(r)),
        ("cells", Value::from(p.cells())),
        ("tagged_sum", num(sum)),
        ("R_dz", num(rdz)),
        ("oscillation", num(osc)),
        ("bound_to_gap", num(ratio)),
    ]);
    Ok(TheoremReport::new("prop19", frame_inputs(m), vec![d]))
}

struct Tangency {
    ec_bar: f64,
    ec_paren: f64,
    radius: f64,
}

fn tangency(q: &QuadratrixCurve, y0: f64, z0: &ZValue, delta: f64) -> Result<Tangency, QuadratureError> {
    let a = q.scale();
    let z1 = q.z_at(z0.x + delta)?;
    let ec_bar = if z0.mid > 0.0 && y0 > 0.0 {
        let t = a * z0.mid / y0;
        z0.mid * delta / t
    } else {
        delta * y0 / a
    };
    Ok(Tangency {
        ec_bar,
        ec_paren: z1.mid - z0.mid,
        radius: z0.radius + z1.radius,
    })
}

/// Tangent increment versus curve increment over `[x0, x0 + Δ]`.
pub fn verify_leibniz_tangency(y: &PlaneCurve, a: f64, x0: f64, delta: f64) -> Result<TheoremReport, QuadratureError> {
    check_scale(a)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(QuadratureError::Precondition(format!(
            "step Δ = {delta} must be positive"
        )));
    }
    let (lo, hi) = y.domain();
    if !(x0 >= lo && x0 + delta <= hi) {
        return Err(QuadratureError::Precondition(format!(
            "[x0, x0 + Δ] = [{x0}, {}] must lie in [{lo}, {hi}]",
            x0 + delta
        )));
    }
    let y0 = y.eval(x0)?;
    if !(y0 > 0.0) {
        return Err(QuadratureError::Precondition(format!(
            "ordinate at x0 must be positive, got {y0}"
        )));
    }
    let mono = y.monotonicity(x0, x0 + delta, SHAPE_PROBES)?;
    if !matches!(mono, Monotonicity::Increasing | Monotonicity::Constant) {
        return Err(QuadratureError::Precondition(format!(
            "ordinate must be nondecreasing on [x0, x0 + Δ], found {mono:?}"
        )));
    }
    let (q, size) = table(y, a)?;
    let z0 = q.z_at(x0)?;
    let scale = size.max(y0.abs()).max(z0.mid.abs());
    let base = tangency(&q, y0, &z0, delta)?;

    let mut details = Vec::new();
    let lhs = a * base.ec_bar;
    let rhs = delta * y0;
    details.push(Detail::new(
        "a*EC_bar vs delta*y0",
        lhs,
        rhs,
        (lhs - rhs).abs(),
        1e-12 * rhs.abs(),
    ));

    let tol = base.radius + REL_TOL * scale;
    let boundary = (base.ec_bar - base.ec_paren).abs() <= tol;
    let mut d = Detail::new(
        "EC_bar vs E(C)",
        base.ec_bar,
        base.ec_paren,
        base.ec_bar - base.ec_paren,
        tol,
    );
    if boundary {
        d = d.note("boundary case: tangent increment equals curve increment");
    }
    details.push(d);

    let mut ratios = Vec::new();
    for k in 0..4 {
        let dk = delta / f64::from(1u32 << k);
        let t = tangency(&q, y0, &z0, dk)?;
        ratios.push((dk, t.ec_bar / t.ec_paren, t.radius / t.ec_paren.abs()));
    }
    for (dk, ratio, rel) in &ratios {
        details.push(
            Detail::new(format!("ratio at delta={dk}"), *ratio, 1.0, ratio - 1.0, rel + REL_TOL).note("EC_bar/E(C)"),
        );
    }
    for w in ratios.windows(2) {
        let (dk, r0, rel0) = w[0];
        let (_, r1, rel1) = w[1];
        details.push(Detail::new(
            format!("ratio monotone at delta={dk}"),
            r0,
            r1,
            r0 - r1,
            rel0 + rel1 + REL_TOL,
        ));
    }
    let (g0, g1) = (1.0 - ratios[2].1, 1.0 - ratios[3].1);
    if boundary || g0.abs() <= ratios[2].2 + REL_TOL {
        details.push(Detail::new("first-order rate", 0.0, 0.0, 0.0, 0.0).note("boundary case: ratio identically 1"));
    } else {
        let order = (g0 / g1).log2();
        details.push(
            Detail::new("first-order rate", order, 1.0, (order - 1.0).abs(), 0.2)
                .note("log2 of successive (1 - ratio)"),
        );
    }

    let m = inputs([
        ("R", num(a)),
        ("x0", num(x0)),
        ("y0", num(y0)),
        ("z0", num(z0.mid)),
        ("delta", num(delta)),
        ("EC_bar", num(base.ec_bar)),
        ("E(C)", num(base.ec_paren)),
    ]);
    Ok(TheoremReport::new("leibniz_tangency", frame_inputs(m), details))
}

fn ulp(v: f64) -> f64 {
    let v = v.abs();
    if v == 0.0 || !v.is_finite() {
        return f64::MIN_POSITIVE * f64::EPSILON;
    }
    let next = f64::from_bits(v.to_bits() + 1);
    next - v
}

struct SubnormalSums {
    by_subnormal: ExactSum,
    by_ordinate: ExactSum,
    magnitude: ExactSum,
}

/// `Σ Δx·nᵢ` and `Σ yᵢ·Δyᵢ` with right-endpoint ordinates.
fn subnormal_sums(y: &PlaneCurve, p: &Partition, dx: f64) -> Result<SubnormalSums, QuadratureError> {
    let ys: Vec<f64> = p.nodes().iter().map(|&x| y.eval(x)).collect::<Result<_, _>>()?;
    let mut s = SubnormalSums {
        by_subnormal: ExactSum::new(),
        by_ordinate: ExactSum::new(),
        magnitude: ExactSum::new(),
    };
    for w in ys.windows(2) {
        let dy = w[1] - w[0];
        let n = w[1] * dy / dx;
        s.by_subnormal.add_product(dx, n);
        s.by_ordinate.add_product(w[1], dy);
        s.magnitude.add((w[1] * dy).abs());
    }
    Ok(s)
}

/// Discrete subnormal sums against `½(y(b)² − y(a)²)`.
pub fn verify_subnormal_area(y: &PlaneCurve, p: &Partition) -> Result<TheoremReport, QuadratureError> {
    let dx = p
        .uniform_width()
        .ok_or_else(|| QuadratureError::InvalidPartition("subnormal sums need a uniform partition".into()))?;
    let (a, b) = p.interval();
    let (ya, yb) = (y.eval(a)?, y.eval(b)?);
    let target = 0.5 * (yb * yb - ya * ya);
    let scale = target.abs().max(yb * yb).max(ya * ya).max(1.0);
    let mut details = Vec::new();

    let s = subnormal_sums(y, p, dx)?;
    let (l, r) = (s.by_subnormal.value(), s.by_ordinate.value());
    let diff = (&s.by_subnormal - &s.by_ordinate).value().abs();
    details.push(Detail::new(
        "sum dx*n vs sum y*dy",
        l,
        r,
        diff,
        4.0 * ulp(s.magnitude.value()),
    ));

    let mut errors = Vec::new();
    for k in 0..3 {
        let n = p.cells() << k;
        let pk = Partition::uniform(a, b, n)?;
        let sk = subnormal_sums(y, &pk, pk.uniform_width().expect("uniform"))?;
        errors.push((n, sk.by_ordinate.value(), (sk.by_ordinate.value() - target).abs()));
    }
    for w in errors.windows(2) {
        let (n0, s0, e0) = w[0];
        let (n1, _, e1) = w[1];
        let mut d = Detail::new(format!("error at n={n1} vs n={n0}"), e1, e0, e1 - e0, 1e-12 * scale);
        if s0 >= target {
            d = d.note("sum bounds the area from above");
        }
        details.push(d);
    }

    let mut analytic = None;
    if let Some(c) = y.as_analytic() {
        let half = Expr::rational(BigRational::new(1.into(), 2.into()));
        let sq = expr::pow(c.expr().clone(), Rational64::from_integer(2));
        let n_expr = expr::mul(half, sq).differentiate(c.var());
        let n_curve = PlaneCurve::analytic(n_expr.clone(), a, b)?;
        let area = certify_area(&n_curve, a, b, 1e-8 * scale)?;
        let tol = area.radius + 1e-7 * scale;
        details.push(
            Detail::new(
                "area under subnormal curve",
                area.value,
                target,
                (area.value - target).abs(),
                tol,
            )
            .note(format!("n = {n_expr}")),
        );
        analytic = Some(n_expr.to_string());
    }

    let m = inputs([
        ("cells", Value::from(p.cells())),
        ("dx", num(dx)),
        ("target", num(target)),
        ("sum", num(r)),
        ("subnormal", analytic.map_or(Value::Null, Value::from)),
    ]);
    Ok(TheoremReport::new("subnormal_area", frame_inputs(m), details))
}

/// Options for [`ftc_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FtcOptions {
    /// Quadratrix node spacing is `(b − a)/nodes`; central differences use
    /// that spacing as their step.
    pub nodes: usize,
}

impl Default for FtcOptions {
    fn default() -> Self {
        FtcOptions { nodes: 1024 }
    }
}

/// `R·z′(x) = y(x)` by central differences of the certified area curve.
pub fn ftc_check(y: &PlaneCurve, r: f64, grid: &[f64], tol: f64) -> Result<TheoremReport, QuadratureError> {
    ftc_check_with(y, r, grid, tol, FtcOptions::default())
}

pub fn ftc_check_with(
    y: &PlaneCurve,
    r: f64,
    grid: &[f64],
    tol: f64,
    opts: FtcOptions,
) -> Result<TheoremReport, QuadratureError> {
    check_scale(r)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(QuadratureError::InvalidTolerance(tol));
    }
    let (lo, hi) = y.domain();
    let h = (hi - lo) / opts.nodes as f64;
    for &g in grid {
        if g - h < lo || g + h > hi {
            return Err(QuadratureError::GridTooCloseToEdge { x: g, h });
        }
    }
    let segment_tol = 1e-2 * tol * h / r;
    let q = quadratrix(y, r, opts.nodes + 1, segment_tol * opts.nodes as f64)?;
    let mut details = Vec::with_capacity(grid.len());
    let mut residual_max = 0.0f64;
    for &g in grid {
        let zp = q.z_at(g + h)?;
        let zm = q.z_at(g - h)?;
        let dz = (zp.mid - zm.mid) / (2.0 * h);
        let lhs = r * dz;
        let yg = y.eval(g)?;
        let res = (lhs - yg).abs();
        residual_max = residual_max.max(res);
        details.push(Detail::new(format!("R*dz/dx vs y at x={g}"), lhs, yg, res, tol).at(g));
    }
    let m = inputs([
        ("R", num(r)),
        ("h", num(h)),
        ("tol", num(tol)),
        ("max_residual", num(residual_max)),
    ]);
    Ok(TheoremReport::new("ftc", frame_inputs(m), details))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Verdict;

    fn curve(t: &str, lo: f64, hi: f64) -> PlaneCurve {
        PlaneCurve::parse(t, lo, hi).unwrap()
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn tangent_below_for_increasing_ordinate() {
        let y = curve("x", 0.0, 2.0);
        let r = verify_prop11(&y, 1.0, 1.0, &grid(0.0, 2.0, 21)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{}", r.to_json());
        assert_eq!(r.probes, 21);
        // z = x²/2, tangent at 1: x − 1/2; gap (x − 1)²/2
        let d = r.details.iter().find(|d| d.x == Some(0.0)).unwrap();
        assert!((d.violation + 0.5).abs() < 1e-9);
        assert_eq!(r.inputs["case"], "tangent below");
    }

    #[test]
    fn tangent_above_for_decreasing_ordinate() {
        let y = curve("exp(-x)", 0.0, 3.0);
        let r = verify_prop11(&y, 2.0, 1.5, &grid(0.0, 3.0, 31)).unwrap();
        assert!(r.holds(), "{}", r.to_json());
        assert_eq!(r.inputs["case"], "tangent above");
    }

    #[test]
    fn constant_ordinate_touches_everywhere() {
        let r = verify_prop11(&curve("1", 0.0, 3.0), 1.0, 1.0, &grid(0.0, 3.0, 7)).unwrap();
        assert!(r.holds());
        assert!(r.details.iter().all(|d| d.note.is_some()));
    }

    #[test]
    fn prop11_preconditions() {
        let y = curve("2 + sin(x)", 0.0, 6.0);
        assert!(matches!(
            verify_prop11(&y, 1.0, 1.0, &[0.5]),
            Err(QuadratureError::NotMonotone(_))
        ));
        let y = curve("x", 0.0, 2.0);
        assert!(matches!(
            verify_prop11(&y, 1.0, 2.0, &[0.5]),
            Err(QuadratureError::Precondition(_))
        ));
        assert!(matches!(
            verify_prop11(&y, 0.0, 1.0, &[0.5]),
            Err(QuadratureError::InvalidScale(_))
        ));
        let y = curve("x - 1", 0.0, 2.0);
        assert!(matches!(
            verify_prop11(&y, 1.0, 1.5, &[0.5]),
            Err(QuadratureError::Precondition(_))
        ));
    }

    #[test]
    fn prop19_bound_and_constant_case() {
        let p = Partition::uniform(0.0, 1.0, 10).unwrap();
        let r = verify_prop19(&curve("x^2", 0.0, 1.0), 1.0, &p).unwrap();
        assert!(r.holds(), "{}", r.to_json());
        assert!(r.inputs["bound_to_gap"].as_f64().unwrap() >= 1.0);
        let r = verify_prop19(&curve("1", 0.0, 1.0), 3.0, &p).unwrap();
        assert!(r.holds());
        assert_eq!(r.details[0].lhs, 0.0);
    }

    #[test]
    fn tangency_identity_curve() {
        let r = verify_leibniz_tangency(&curve("x", 0.0, 2.0), 1.0, 1.0, 0.5).unwrap();
        assert!(r.holds(), "{}", r.to_json());
        // z = x²/2: EC_bar = 0.5, E(C) = 0.625
        assert!((r.inputs["EC_bar"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        assert!((r.inputs["E(C)"].as_f64().unwrap() - 0.625).abs() < 1e-9);
    }

    #[test]
    fn tangency_constant_is_boundary() {
        let r = verify_leibniz_tangency(&curve("2", 0.0, 2.0), 1.0, 0.5, 1.0).unwrap();
        assert!(r.holds(), "{}", r.to_json());
        assert!(r
            .details
            .iter()
            .any(|d| d.note.as_deref().is_some_and(|n| n.starts_with("boundary"))));
    }

    #[test]
    fn tangency_preconditions() {
        let y = curve("1 - x", 0.0, 1.0);
        assert!(matches!(
            verify_leibniz_tangency(&y, 1.0, 0.1, 0.5),
            Err(QuadratureError::Precondition(_))
        ));
        let y = curve("x", 0.0, 1.0);
        assert!(matches!(
            verify_leibniz_tangency(&y, 1.0, 0.0, 0.5),
            Err(QuadratureError::Precondition(_))
        ));
        assert!(matches!(
            verify_leibniz_tangency(&y, 1.0, 0.8, 0.5),
            Err(QuadratureError::Precondition(_))
        ));
    }

    #[test]
    fn subnormal_identity_line() {
        let p = Partition::uniform(0.0, 1.0, 8).unwrap();
        let r = verify_subnormal_area(&curve("x", 0.0, 1.0), &p).unwrap();
        assert!(r.holds(), "{}", r.to_json());
        // right-endpoint sum for y = x is 1/2 + 1/(2n)
        assert_eq!(r.inputs["sum"].as_f64().unwrap(), 0.5 + 1.0 / 16.0);
    }

    #[test]
    fn subnormal_of_root_is_constant() {
        let p = Partition::uniform(0.0, 2.0, 16).unwrap();
        let r = verify_subnormal_area(&curve("sqrt(2*x)", 0.0, 2.0), &p).unwrap();
        assert!(r.holds(), "{}", r.to_json());
        assert_eq!(r.inputs["subnormal"], "1");
    }

    #[test]
    fn ftc_on_sine() {
        let y = curve("sin(x)", 0.0, 3.0);
        let r = ftc_check(&y, 1.0, &grid(0.1, 2.9, 15), 1e-4).unwrap();
        assert!(r.holds(), "{}", r.to_json());
        assert!(r.max_violation < 1e-5);
    }

    #[test]
    fn ftc_rejects_edge_points() {
        let y = curve("x", 0.0, 1.0);
        assert!(matches!(
            ftc_check(&y, 1.0, &[0.0], 1e-6),
            Err(QuadratureError::GridTooCloseToEdge { .. })
        ));
    }

    #[test]
    fn ulp_of_one() {
        assert_eq!(ulp(1.0), f64::EPSILON);
        assert_eq!(ulp(-1.5), f64::EPSILON);
    }
}
