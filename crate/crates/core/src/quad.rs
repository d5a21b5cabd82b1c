//! Adaptive Gauss–Kronrod (10/21) quadrature.
//!
//! Finite cores are integrated with global adaptive bisection. Unbounded
//! ends and open ends where the integrand may be singular are handled by a
//! geometric sequence of pieces marching toward the end; the pieces must
//! contract or the integral is reported as divergent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::interval::SupportInterval;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections per finite piece.
    pub max_subdivisions: usize,
    /// Maximum number of geometric pieces toward an end.
    pub max_tail_pieces: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
            max_tail_pieces: 60,
        }
    }
}

impl QuadConfig {
    pub fn with_budget(mut self, max_subdivisions: usize) -> Self {
        self.max_subdivisions = max_subdivisions.max(1);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("integral diverges toward {toward} (partial sum {partial})")]
    Diverged { toward: f64, partial: f64 },
    #[error("no convergence within budget: value {value}, error estimate {error}")]
    NotConverged { value: f64, error: f64 },
    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },
}

impl QuadError {
    /// Sign of the divergent value, if this is a divergence.
    pub fn divergent_sign(&self) -> Option<f64> {
        match self {
            QuadError::Diverged { partial, .. } => Some(if *partial < 0.0 { -1.0 } else { 1.0 }),
            _ => None,
        }
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite { at: center });
    }
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(QuadError::NonFinite { at: x1 });
        }
        if !f2.is_finite() {
            return Err(QuadError::NonFinite { at: x2 });
        }
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((result, err))
}

/// Adaptive integration over a finite interval.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<Integral, QuadError> {
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    let (value, error) = gk21(f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut splits = 0;
    // Segments too narrow to split further still count toward the error.
    let mut frozen_err = 0.0;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err + frozen_err <= tol {
            break;
        }
        let Some(seg) = heap.pop() else { break };
        if splits >= cfg.max_subdivisions {
            heap.push(seg);
            return Err(QuadError::NotConverged {
                value: total,
                error: total_err + frozen_err,
            });
        }
        let mid = 0.5 * (seg.a + seg.b);
        if !(seg.a < mid && mid < seg.b) {
            frozen_err += seg.error;
            total_err -= seg.error;
            continue;
        }
        let (v1, e1) = gk21(f, seg.a, mid)?;
        let (v2, e2) = gk21(f, mid, seg.b)?;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
        splits += 1;
    }
    // Re-sum for accuracy after many incremental updates.
    let mut value = 0.0;
    let mut error = frozen_err;
    for seg in heap.iter() {
        value += seg.value;
        error += seg.error;
    }
    Ok(Integral { value, error })
}

/// Integrate from `start` toward `end` (finite or infinite) in geometric
/// pieces. `width` sets the first piece for infinite ends.
fn integrate_toward<F: Fn(f64) -> f64>(
    f: &F,
    start: f64,
    end: f64,
    width: f64,
    cfg: &QuadConfig,
) -> Result<Integral, QuadError> {
    let dir = if end > start { 1.0 } else { -1.0 };
    let piece_cfg = QuadConfig {
        abs_tol: 0.1 * cfg.abs_tol,
        ..*cfg
    };
    let mut total = 0.0;
    let mut error = 0.0;
    let mut prev_mag = f64::INFINITY;
    let mut small_run = 0;
    let mut slow_run = 0;
    let mut lo = start;
    for k in 0..cfg.max_tail_pieces {
        let hi = if end.is_finite() {
            end - (end - start) * 0.5f64.powi(k as i32 + 1)
        } else {
            start + dir * width * (2f64.powi(k as i32 + 1) - 1.0)
        };
        if hi == lo || !hi.is_finite() {
            break;
        }
        let (a, b) = if dir > 0.0 { (lo, hi) } else { (hi, lo) };
        let piece = match integrate_finite(f, a, b, &piece_cfg) {
            Ok(p) => p,
            Err(QuadError::NonFinite { .. }) => {
                return Err(QuadError::Diverged { toward: end, partial: total })
            }
            Err(e) => return Err(e),
        };
        total += piece.value;
        error += piece.error;
        if !total.is_finite() {
            return Err(QuadError::Diverged { toward: end, partial: total });
        }
        let mag = piece.value.abs();
        let piece_tol = 0.1 * cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if mag <= piece_tol {
            small_run += 1;
            if small_run >= 2 {
                return Ok(Integral { value: total, error: error + mag });
            }
        } else {
            small_run = 0;
        }
        if mag > piece_tol && mag >= 0.9 * prev_mag {
            slow_run += 1;
            if slow_run >= 8 {
                return Err(QuadError::Diverged { toward: end, partial: total });
            }
        } else {
            slow_run = 0;
        }
        prev_mag = mag;
        lo = hi;
    }
    if end.is_finite() && small_run > 0 {
        // The pieces shrank to the resolution of f64 while already small.
        return Ok(Integral { value: total, error: error + prev_mag });
    }
    Err(QuadError::Diverged { toward: end, partial: total })
}

/// Integrate `f` over `support`. Closed finite ends are part of the
/// adaptive core; open finite ends and infinite ends are approached in
/// geometric pieces. `center` must lie inside the support and `spread > 0`
/// sets the size of the core around it.
pub fn integrate_over<F: Fn(f64) -> f64>(
    f: &F,
    support: &SupportInterval,
    center: f64,
    spread: f64,
    cfg: &QuadConfig,
) -> Result<Integral, QuadError> {
    if support.is_degenerate() {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    let spread = if spread > 0.0 && spread.is_finite() {
        spread
    } else {
        1.0
    };
    let center = center.clamp(support.lower, support.upper);
    let core_lo = if support.lower.is_infinite() {
        (center - 8.0 * spread).min(support.upper - spread)
    } else if support.lower_closed {
        support.lower
    } else {
        let anchor = center.min(support.lower + spread).min(support.upper);
        support.lower + 0.5 * (anchor - support.lower)
    };
    let core_hi = if support.upper.is_infinite() {
        (center + 8.0 * spread).max(core_lo + spread)
    } else if support.upper_closed {
        support.upper
    } else {
        let anchor = center.max(support.upper - spread).max(core_lo);
        support.upper - 0.5 * (support.upper - anchor)
    };
    let mut part = integrate_finite(f, core_lo, core_hi, cfg)?;
    if core_lo > support.lower {
        let tail = integrate_toward(f, core_lo, support.lower, spread, cfg)?;
        part.value += tail.value;
        part.error += tail.error;
    }
    if core_hi < support.upper {
        let tail = integrate_toward(f, core_hi, support.upper, spread, cfg)?;
        part.value += tail.value;
        part.error += tail.error;
    }
    Ok(part)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let cfg = QuadConfig::default();
        let r = integrate_finite(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, &cfg).unwrap();
        assert!((r.value - 0.0).abs() < 1e-14);
        let r = integrate_finite(&|x: f64| x.powi(6), -1.0, 1.0, &cfg).unwrap();
        assert!((r.value - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_over_real_line() {
        let cfg = QuadConfig::default();
        let pdf = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let r = integrate_over(&pdf, &SupportInterval::real_line(), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn log_singularity_converges() {
        let cfg = QuadConfig::default();
        let iv = SupportInterval::open(0.0, 1.0).unwrap();
        let r = integrate_over(&|x: f64| -x.ln(), &iv, 0.5, 0.5, &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn reciprocal_singularity_diverges() {
        let cfg = QuadConfig::default();
        let iv = SupportInterval::open(0.0, 1.0).unwrap();
        let err = integrate_over(&|x: f64| 1.0 / x, &iv, 0.5, 0.5, &cfg).unwrap_err();
        assert_eq!(err.divergent_sign(), Some(1.0));
    }

    #[test]
    fn flat_tail_diverges() {
        let cfg = QuadConfig::default();
        let iv = SupportInterval::positive_half_line();
        let err = integrate_over(&|_x: f64| 1.0, &iv, 1.0, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, QuadError::Diverged { .. }));
    }

    #[test]
    fn exponential_tail() {
        let cfg = QuadConfig::default();
        let iv = SupportInterval::positive_half_line();
        let r = integrate_over(&|x: f64| x * (-x).exp(), &iv, 1.0, 1.0, &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadConfig::default().with_budget(2);
        let r = integrate_finite(&|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &cfg);
        assert!(matches!(r, Err(QuadError::NotConverged { .. })));
    }
}
