//! Bounds on the Jensen gap `E[φ(X)] − φ(E[X])`.
//!
//! Everything here rests on the divided-difference curve
//!
//! ```text
//! h(x; ν) = (φ(x) − φ(ν)) / (x − ν)² − φ′(ν) / (x − ν)
//! ```
//!
//! which equals half of `φ″` at some point between `x` and `ν`. Since the
//! gap is `∫ h(x; μ) (x − μ)² dF(x)`, the infimum and supremum of `h(·; μ)`
//! over the support, times `var(X)`, bracket the gap. When `φ′` is convex
//! (concave) `h` is nondecreasing (nonincreasing) in `x`, so the extrema sit
//! at the ends of the support; otherwise they are found by a grid scan with
//! golden-section refinement.

use serde::Serialize;

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::functions::{CatalogKind, FunctionSpec, PhiPrimeShape, make_catalog_function};
use crate::interval::{ext_mul, ExtReal, SupportInterval};
use crate::search::golden_section;

/// Number of points in the global scan used when `φ′` has no known shape.
pub const SCAN_POINTS: usize = 512;

const LIMIT_PROBES: usize = 60;
const LIMIT_DIVERGENCE: f64 = 1e12;
const LIMIT_AGREEMENT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    Direct,
    TaylorNearCenter,
    EndpointLimit,
}

/// A value of `h` (or of `φ″/2`) together with where it was taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HEvaluation {
    pub value: f64,
    /// The evaluation point; for `EndpointLimit` this is the endpoint,
    /// possibly `±inf`.
    pub attained_at: f64,
    pub method: EvalMethod,
}

impl Serialize for HEvaluation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("HEvaluation", 3)?;
        st.serialize_field("at", &ExtReal(self.attained_at))?;
        st.serialize_field("value", &ExtReal(self.value))?;
        st.serialize_field("method", &self.method)?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HExtrema {
    pub inf: HEvaluation,
    pub sup: HEvaluation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    /// Extrema of `h(·; μ)` over the support of a law.
    HExtrema,
    /// Extrema of `h(·; x̄)` over `[min, max]` of a sample.
    Sample,
    /// Extrema of `φ″/2` over the support.
    Curvature,
    /// Coarse-plus-conditional decomposition over a partition.
    Partition,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapBounds {
    pub lower: f64,
    pub upper: f64,
    pub lower_detail: HEvaluation,
    pub upper_detail: HEvaluation,
    pub variance_used: f64,
    pub method: BoundMethod,
}

impl GapBounds {
    pub fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.lower - slack && value <= self.upper + slack
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

impl Serialize for GapBounds {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("GapBounds", 6)?;
        st.serialize_field("lower", &ExtReal(self.lower))?;
        st.serialize_field("upper", &ExtReal(self.upper))?;
        st.serialize_field("variance", &self.variance_used)?;
        st.serialize_field("method", &self.method)?;
        st.serialize_field("witness_lower", &self.lower_detail)?;
        st.serialize_field("witness_upper", &self.upper_detail)?;
        st.end()
    }
}

/// Radius below which `h` is replaced by its Taylor expansion around `ν`.
pub fn switch_radius(nu: f64) -> f64 {
    f64::EPSILON.cbrt() * nu.abs().max(1.0)
}

/// `h(x; ν)` without the near-center switch. Uses the function's
/// cancellation-free evaluator when it has one.
pub fn h_direct(f: &FunctionSpec, nu: f64, x: f64) -> f64 {
    if let Some(v) = f.stable_h(nu, x) {
        return v;
    }
    let d = x - nu;
    (f.eval(x) - f.eval(nu)) / (d * d) - f.deriv1(nu) / d
}

/// Raw `h` with the near-center switch; may be non-finite.
fn h_raw(f: &FunctionSpec, nu: f64, x: f64) -> f64 {
    if (x - nu).abs() <= switch_radius(nu) {
        taylor_h(f, nu, x)
    } else {
        h_direct(f, nu, x)
    }
}

/// Second-order expansion `φ″(ν)/2 + φ‴(ν)(x−ν)/6`, with `φ‴` taken from the
/// change in `φ″`; equals `φ″(ν)/2` at `x = ν`.
fn taylor_h(f: &FunctionSpec, nu: f64, x: f64) -> f64 {
    if x == nu {
        0.5 * f.deriv2(nu)
    } else {
        (2.0 * f.deriv2(nu) + f.deriv2(x)) / 6.0
    }
}

fn check_in_domain(f: &FunctionSpec, x: f64, what: &str) -> Result<()> {
    if f.natural_domain().contains(x) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{what} = {x} is outside the domain {} of {}",
            f.natural_domain(),
            f.name()
        )))
    }
}

pub fn h_eval(f: &FunctionSpec, nu: f64, x: f64) -> Result<HEvaluation> {
    check_in_domain(f, nu, "ν")?;
    check_in_domain(f, x, "x")?;
    if (x - nu).abs() <= switch_radius(nu) {
        let value = taylor_h(f, nu, x);
        if !value.is_finite() {
            return Err(Error::Evaluation { what: "φ″", at: nu });
        }
        return Ok(HEvaluation {
            value,
            attained_at: x,
            method: EvalMethod::TaylorNearCenter,
        });
    }
    if !f.eval(x).is_finite() {
        return Err(Error::Evaluation { what: "φ", at: x });
    }
    let value = h_direct(f, nu, x);
    if value.is_nan() {
        return Err(Error::Evaluation { what: "h", at: x });
    }
    Ok(HEvaluation {
        value,
        attained_at: x,
        method: EvalMethod::Direct,
    })
}

/// Limit of `g(x)` as `x` moves from `start` toward `endpoint` along a
/// geometric probe sequence.
pub(crate) fn approach_limit(g: &dyn Fn(f64) -> f64, start: f64, endpoint: f64) -> Result<f64> {
    let undetermined = |reason: &str| Error::LimitUndetermined {
        endpoint,
        reason: reason.to_string(),
    };
    let sign = if endpoint > start { 1.0 } else { -1.0 };
    let step = start.abs().max(1.0);
    let mut history: Vec<f64> = Vec::with_capacity(LIMIT_PROBES);
    let mut scale = None;
    for k in 0..LIMIT_PROBES {
        let x = if endpoint.is_infinite() {
            start + sign * step * 2f64.powi(k as i32)
        } else {
            endpoint - (endpoint - start) * 0.5f64.powi(k as i32 + 1)
        };
        if x == endpoint || x.is_infinite() {
            break;
        }
        let v = g(x);
        if v.is_nan() {
            return Err(undetermined("function is NaN near the endpoint"));
        }
        if v.is_infinite() {
            return Ok(v);
        }
        let scale = *scale.get_or_insert(v.abs().max(1.0));
        if v.abs() > LIMIT_DIVERGENCE * scale {
            return Ok(v.signum() * f64::INFINITY);
        }
        if let Some(&prev) = history.last() {
            let d2 = v - prev;
            if d2.abs() <= LIMIT_AGREEMENT * v.abs().max(1.0) {
                // Aitken acceleration when the last steps contract geometrically.
                if history.len() >= 2 {
                    let d1 = prev - history[history.len() - 2];
                    if d1 != d2 && d1 * d2 > 0.0 && d2.abs() < d1.abs() {
                        let accel = v - d2 * d2 / (d2 - d1);
                        if (accel - v).abs() <= 10.0 * d2.abs() {
                            return Ok(accel);
                        }
                    }
                }
                return Ok(v);
            }
        }
        history.push(v);
        if non_contracting(&history, 10) {
            return Ok((v - history[0]).signum() * f64::INFINITY);
        }
    }
    Err(undetermined("no monotone trend over 60 probes"))
}

/// The last `run` steps all move the same way and none is shorter than the
/// step before it. Along a geometric probe sequence this means divergence.
fn non_contracting(history: &[f64], run: usize) -> bool {
    if history.len() < run + 2 {
        return false;
    }
    let tail = &history[history.len() - run - 2..];
    let steps: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    let sign = steps[0].signum();
    steps[0] != 0.0
        && steps.iter().all(|d| d.signum() == sign && *d != 0.0)
        && steps.windows(2).all(|w| w[1].abs() >= w[0].abs() * (1.0 - 1e-9))
}

/// Limit of `h(x; ν)` as `x` approaches an endpoint of the working interval.
pub fn h_endpoint_limit(f: &FunctionSpec, nu: f64, endpoint: f64) -> Result<HEvaluation> {
    if let Some(value) = f.h_limit_hint(endpoint, nu) {
        return Ok(HEvaluation {
            value,
            attained_at: endpoint,
            method: EvalMethod::EndpointLimit,
        });
    }
    if f.defined_at(endpoint) {
        return h_eval(f, nu, endpoint);
    }
    let value = approach_limit(&|x| h_raw(f, nu, x), nu, endpoint)?;
    Ok(HEvaluation {
        value,
        attained_at: endpoint,
        method: EvalMethod::EndpointLimit,
    })
}

/// A scalar curve whose extrema over an interval are wanted.
trait Profile {
    fn value(&self, x: f64) -> f64;
    fn at(&self, x: f64) -> HEvaluation;
    fn end(&self, end: f64, closed: bool) -> Result<HEvaluation>;
}

struct HProfile<'a> {
    f: &'a FunctionSpec,
    nu: f64,
}

impl Profile for HProfile<'_> {
    fn value(&self, x: f64) -> f64 {
        h_raw(self.f, self.nu, x)
    }

    fn at(&self, x: f64) -> HEvaluation {
        let method = if (x - self.nu).abs() <= switch_radius(self.nu) {
            EvalMethod::TaylorNearCenter
        } else {
            EvalMethod::Direct
        };
        HEvaluation {
            value: self.value(x),
            attained_at: x,
            method,
        }
    }

    fn end(&self, end: f64, closed: bool) -> Result<HEvaluation> {
        if closed {
            h_eval(self.f, self.nu, end)
        } else {
            h_endpoint_limit(self.f, self.nu, end)
        }
    }
}

struct CurvatureProfile<'a> {
    f: &'a FunctionSpec,
    /// Interior point used to start approach sequences.
    anchor: f64,
}

impl Profile for CurvatureProfile<'_> {
    fn value(&self, x: f64) -> f64 {
        0.5 * self.f.deriv2(x)
    }

    fn at(&self, x: f64) -> HEvaluation {
        HEvaluation {
            value: self.value(x),
            attained_at: x,
            method: EvalMethod::Direct,
        }
    }

    fn end(&self, end: f64, closed: bool) -> Result<HEvaluation> {
        if closed || self.f.defined_at(end) {
            let v = self.value(end);
            if !v.is_finite() {
                return Err(Error::Evaluation { what: "φ″", at: end });
            }
            return Ok(self.at(end));
        }
        let value = approach_limit(&|x| self.value(x), self.anchor, end)?;
        Ok(HEvaluation {
            value,
            attained_at: end,
            method: EvalMethod::EndpointLimit,
        })
    }
}

/// Grid for the global scan: linear over a core around `center`, log-spaced
/// toward infinite ends. All points are strictly inside the interval.
fn scan_grid(interval: &SupportInterval, center: f64) -> Vec<f64> {
    let (lo, hi) = (interval.lower, interval.upper);
    let span = 4.0
        * [1.0, center.abs(), if lo.is_finite() { center - lo } else { 0.0 }, if hi.is_finite() { hi - center } else { 0.0 }]
            .into_iter()
            .fold(0.0_f64, f64::max);
    let tails = usize::from(lo.is_infinite()) + usize::from(hi.is_infinite());
    let tail_points = 128;
    let core_points = SCAN_POINTS - tails * tail_points;
    let core_lo = if lo.is_finite() { lo } else { center - span };
    let core_hi = if hi.is_finite() { hi } else { center + span };
    let mut grid = Vec::with_capacity(SCAN_POINTS);
    if lo.is_infinite() {
        for i in (1..=tail_points).rev() {
            let t = i as f64 / tail_points as f64;
            grid.push(core_lo - span * (10f64.powf(8.0 * t) - 1.0));
        }
    }
    for i in 0..core_points {
        let t = (i as f64 + 0.5) / core_points as f64;
        grid.push(core_lo + t * (core_hi - core_lo));
    }
    if hi.is_infinite() {
        for i in 1..=tail_points {
            let t = i as f64 / tail_points as f64;
            grid.push(core_hi + span * (10f64.powf(8.0 * t) - 1.0));
        }
    }
    grid.dedup();
    grid
}

/// Global extrema: grid scan, golden-section refinement of each local
/// extremum, endpoint limits. Interior witnesses win ties.
fn scan_extrema(p: &dyn Profile, interval: &SupportInterval, center: f64) -> Result<HExtrema> {
    let grid = scan_grid(interval, center);
    let values: Vec<f64> = grid.iter().map(|&x| p.value(x)).collect();
    let lower_end = p.end(interval.lower, interval.lower_closed)?;
    let upper_end = p.end(interval.upper, interval.upper_closed)?;

    let refine = |sign: f64| -> Option<HEvaluation> {
        let n = grid.len();
        let key = |i: usize| sign * values[i];
        let mut candidates: Vec<usize> = (0..n)
            .filter(|&i| !values[i].is_nan())
            .filter(|&i| {
                let left_ok = i == 0 || values[i - 1].is_nan() || key(i) <= key(i - 1);
                let right_ok = i + 1 == n || values[i + 1].is_nan() || key(i) <= key(i + 1);
                left_ok && right_ok
            })
            .collect();
        candidates.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
        candidates.truncate(32);
        let mut best: Option<HEvaluation> = None;
        for i in candidates {
            let a = grid[i.saturating_sub(1)];
            let b = grid[(i + 1).min(n - 1)];
            let tol = 1e-10 * a.abs().max(b.abs()).max(1.0);
            let objective = |x: f64| {
                let v = sign * p.value(x);
                if v.is_nan() { f64::INFINITY } else { v }
            };
            let m = golden_section(objective, a, b, tol);
            let (x, v) = if m.value <= key(i) { (m.x, m.value) } else { (grid[i], key(i)) };
            if best.is_none_or(|b| v < sign * b.value) {
                best = Some(p.at(x));
            }
        }
        best
    };

    let pick = |interior: Option<HEvaluation>, ends: [HEvaluation; 2], sign: f64| -> HEvaluation {
        let mut best = interior;
        for e in ends {
            if e.value.is_nan() {
                continue;
            }
            // strict comparison so that an interior witness wins ties
            if best.is_none_or(|b| sign * e.value < sign * b.value) {
                best = Some(e);
            }
        }
        best.unwrap_or(ends[0])
    };

    let inf = pick(refine(1.0), [lower_end, upper_end], 1.0);
    let sup = pick(refine(-1.0), [lower_end, upper_end], -1.0);
    Ok(HExtrema { inf, sup })
}

fn check_interval(f: &FunctionSpec, interval: &SupportInterval) -> Result<()> {
    if interval.is_subset_of(&f.natural_domain()) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "interval {interval} is not inside the domain {} of {}",
            f.natural_domain(),
            f.name()
        )))
    }
}

fn contains_closure(interval: &SupportInterval, x: f64) -> bool {
    x >= interval.lower && x <= interval.upper && x.is_finite()
}

/// Infimum and supremum of `h(·; ν)` over `interval`.
pub fn h_extrema(f: &FunctionSpec, interval: &SupportInterval, nu: f64) -> Result<HExtrema> {
    check_interval(f, interval)?;
    if !contains_closure(interval, nu) {
        return Err(Error::Domain(format!("center {nu} is outside {interval}")));
    }
    if interval.is_degenerate() {
        let at = h_eval(f, nu, interval.lower)?;
        return Ok(HExtrema { inf: at, sup: at });
    }
    let p = HProfile { f, nu };
    let left = || p.end(interval.lower, interval.lower_closed);
    let right = || p.end(interval.upper, interval.upper_closed);
    match f.phi_prime_shape() {
        PhiPrimeShape::Convex | PhiPrimeShape::Concave => Ok(ordered(left()?, right()?)),
        PhiPrimeShape::Unknown => scan_extrema(&p, interval, nu),
    }
}

/// A monotone curve has its extrema at the two ends. Order them by value so
/// a flat curve evaluated with rounding noise still gives `inf ≤ sup`.
fn ordered(a: HEvaluation, b: HEvaluation) -> HExtrema {
    if b.value < a.value {
        HExtrema { inf: b, sup: a }
    } else {
        HExtrema { inf: a, sup: b }
    }
}

/// Infimum and supremum of `φ″/2` over `interval`.
pub fn curvature_extrema(f: &FunctionSpec, interval: &SupportInterval, anchor: f64) -> Result<HExtrema> {
    check_interval(f, interval)?;
    let p = CurvatureProfile { f, anchor };
    if interval.is_degenerate() {
        let at = p.end(interval.lower, true)?;
        return Ok(HExtrema { inf: at, sup: at });
    }
    let left = || p.end(interval.lower, interval.lower_closed);
    let right = || p.end(interval.upper, interval.upper_closed);
    // φ′ convex ⇔ φ″ nondecreasing
    match f.phi_prime_shape() {
        PhiPrimeShape::Convex | PhiPrimeShape::Concave => Ok(ordered(left()?, right()?)),
        PhiPrimeShape::Unknown => scan_extrema(&p, interval, anchor),
    }
}

fn check_support(f: &FunctionSpec, d: &DistributionSpec) -> Result<()> {
    if d.support().is_subset_of(&f.natural_domain()) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "support {} is not inside the domain {} of {}",
            d.support(),
            f.natural_domain(),
            f.name()
        )))
    }
}

fn assemble(extrema: HExtrema, variance: f64, method: BoundMethod) -> Result<GapBounds> {
    let lower = ext_mul(extrema.inf.value, variance);
    let upper = ext_mul(extrema.sup.value, variance);
    if lower.is_nan() || upper.is_nan() {
        return Err(Error::Numeric("bound evaluated to NaN".into()));
    }
    Ok(GapBounds {
        lower,
        upper,
        lower_detail: extrema.inf,
        upper_detail: extrema.sup,
        variance_used: variance,
        method,
    })
}

fn degenerate(f: &FunctionSpec, nu: f64, method: BoundMethod) -> Result<GapBounds> {
    let at = h_eval(f, nu, nu)?;
    assemble(HExtrema { inf: at, sup: at }, 0.0, method)
}

/// `inf h(·; μ) var(X) ≤ gap ≤ sup h(·; μ) var(X)` over the support of `d`.
pub fn jensen_bounds(f: &FunctionSpec, d: &DistributionSpec) -> Result<GapBounds> {
    check_support(f, d)?;
    let mu = d.mean();
    let var = d.variance();
    if var == 0.0 {
        return degenerate(f, mu, BoundMethod::HExtrema);
    }
    let ex = h_extrema(f, &d.support(), mu)?;
    assemble(ex, var, BoundMethod::HExtrema)
}

/// Bounds on `mean(φ(x_i)) − φ(x̄)` using `h(·; x̄)` over `[min, max]` and
/// the population variance of the sample.
pub fn sample_bounds(f: &FunctionSpec, xs: &[f64]) -> Result<GapBounds> {
    let d = DistributionSpec::empirical(xs.to_vec())?;
    check_support(f, &d)?;
    let mu = d.mean();
    let var = d.variance();
    if var == 0.0 {
        return degenerate(f, mu, BoundMethod::Sample);
    }
    let ex = h_extrema(f, &d.support(), mu)?;
    assemble(ex, var, BoundMethod::Sample)
}

/// The looser bounds `inf φ″/2 · var(X)` and `sup φ″/2 · var(X)`.
pub fn curvature_bounds(f: &FunctionSpec, d: &DistributionSpec) -> Result<GapBounds> {
    check_support(f, d)?;
    let var = d.variance();
    if var == 0.0 {
        let p = CurvatureProfile { f, anchor: d.mean() };
        let at = p.at(d.mean());
        return assemble(HExtrema { inf: at, sup: at }, 0.0, BoundMethod::Curvature);
    }
    let ex = curvature_extrema(f, &d.support(), d.mean())?;
    assemble(ex, var, BoundMethod::Curvature)
}

/// A bracket on an expectation and on the mean it induces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanBracket {
    /// Bracket on `E[φ(X)]` (for power means, on `E[X^s]`).
    pub expectation_lower: f64,
    pub expectation_upper: f64,
    /// Bracket on the generalized mean `φ⁻¹(E[φ(X)])`.
    pub mean_lower: f64,
    pub mean_upper: f64,
    pub gap: GapBounds,
}

impl Serialize for MeanBracket {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("MeanBracket", 5)?;
        st.serialize_field("expectation_lower", &ExtReal(self.expectation_lower))?;
        st.serialize_field("expectation_upper", &ExtReal(self.expectation_upper))?;
        st.serialize_field("mean_lower", &ExtReal(self.mean_lower))?;
        st.serialize_field("mean_upper", &ExtReal(self.mean_upper))?;
        st.serialize_field("gap", &self.gap)?;
        st.end()
    }
}

/// Bracket `E[X^s]` through `Y = X^r` and `φ(y) = y^{s/r}`, and the power
/// mean `M_s = (E X^s)^{1/s}` it implies.
pub fn power_mean_bounds(d: &DistributionSpec, r: f64, s: f64) -> Result<MeanBracket> {
    if r == 0.0 || s == 0.0 || !r.is_finite() || !s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "power mean needs finite nonzero r and s, got r={r}, s={s}"
        )));
    }
    let y = d.transform_power(r)?;
    let p = s / r;
    let f = make_catalog_function(CatalogKind::Power { p })?;
    let gap = jensen_bounds(&f, &y)?;
    let base = y.mean().powf(p);
    let e_lo = base + gap.lower;
    let e_hi = base + gap.upper;
    let root = |v: f64| -> f64 {
        if v <= 0.0 {
            if s > 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            v.powf(1.0 / s)
        }
    };
    let (mean_lower, mean_upper) = if s > 0.0 {
        (root(e_lo), root(e_hi))
    } else {
        (root(e_hi), root(e_lo))
    };
    Ok(MeanBracket {
        expectation_lower: e_lo,
        expectation_upper: e_hi,
        mean_lower,
        mean_upper,
        gap,
    })
}

/// Bracket the generalized mean `φ⁻¹(E[φ(X)])` for strictly monotone `φ`.
pub fn generalized_mean_bounds(
    f: &FunctionSpec,
    f_inverse: &dyn Fn(f64) -> f64,
    d: &DistributionSpec,
) -> Result<MeanBracket> {
    let gap = jensen_bounds(f, d)?;
    let slope = f.deriv1(d.mean());
    if !(slope != 0.0 && slope.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "{} is not strictly monotone at the mean",
            f.name()
        )));
    }
    let increasing = slope > 0.0;
    let base = f.eval(d.mean());
    let e_lo = base + gap.lower;
    let e_hi = base + gap.upper;
    let support = d.support();
    // Ends mapping outside the range of φ go to the matching support end.
    let invert = |v: f64, toward_upper: bool| -> f64 {
        let x = f_inverse(v);
        if x.is_nan() {
            if toward_upper { support.upper } else { support.lower }
        } else {
            x
        }
    };
    let (mean_lower, mean_upper) = if increasing {
        (invert(e_lo, false), invert(e_hi, true))
    } else {
        (invert(e_hi, false), invert(e_lo, true))
    };
    Ok(MeanBracket {
        expectation_lower: e_lo,
        expectation_upper: e_hi,
        mean_lower,
        mean_upper,
        gap,
    })
}
