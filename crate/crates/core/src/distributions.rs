//! Laws of `X`: means, variances, cell probabilities and truncated moments.
//!
//! Analytic laws use closed forms. Samples are treated as the uniform
//! discrete law on their points (population variance, `n` divisor).
//! Custom densities are integrated numerically.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};
use crate::interval::SupportInterval;
use crate::quad::{integrate_over, QuadConfig, QuadError};

pub type PdfFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Law {
    Normal { mu: f64, sigma: f64 },
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
    Empirical(Arc<[f64]>),
    /// Finite law `P(X = values[i]) = weights[i]`.
    Discrete { values: Arc<[f64]>, weights: Arc<[f64]> },
    /// Density known only as a callable, normalized numerically.
    CustomPdf {
        pdf: PdfFn,
        support: SupportInterval,
        quadrature_budget: usize,
    },
}

impl fmt::Debug for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Law::Normal { mu, sigma } => write!(f, "Normal({mu}, {sigma})"),
            Law::Exponential { rate } => write!(f, "Exponential({rate})"),
            Law::Uniform { lo, hi } => write!(f, "Uniform({lo}, {hi})"),
            Law::Empirical(xs) => write!(f, "Empirical(n={})", xs.len()),
            Law::Discrete { values, .. } => write!(f, "Discrete(atoms={})", values.len()),
            Law::CustomPdf { support, .. } => write!(f, "CustomPdf({support})"),
        }
    }
}

/// Probability, mean and variance of `X` restricted to a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedStats {
    pub prob: f64,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Clone, Debug)]
pub struct DistributionSpec {
    law: Law,
    support: SupportInterval,
    mean: f64,
    variance: f64,
    /// Total mass of a custom density before normalization.
    norm: f64,
}

fn std_pdf(z: f64) -> f64 {
    if z.is_infinite() {
        0.0
    } else {
        (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
    }
}

fn std_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

fn std_sf(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

fn std_quantile(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// `z ϕ(z)` with the convention `±∞ · ϕ(±∞) = 0`.
fn z_pdf(z: f64) -> f64 {
    if z.is_infinite() {
        0.0
    } else {
        z * std_pdf(z)
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

fn weighted_moments(values: &[f64], weights: Option<&[f64]>) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mass = match weights {
        Some(w) => compensated_sum(w.iter().copied()),
        None => 1.0,
    };
    let mean = match weights {
        Some(w) => compensated_sum(values.iter().zip(w).map(|(x, w)| x * w)) / mass,
        None => compensated_sum(values.iter().copied()) / n,
    };
    let var = match weights {
        Some(w) => {
            compensated_sum(values.iter().zip(w).map(|(x, w)| w * (x - mean) * (x - mean))) / mass
        }
        None => compensated_sum(values.iter().map(|x| (x - mean) * (x - mean))) / n,
    };
    (mass, mean, var)
}

fn quad_error(e: QuadError, what: &str) -> Error {
    match e {
        QuadError::Diverged { .. } => {
            Error::InvalidParameter(format!("{what} is not finite for this density"))
        }
        other => Error::Numeric(format!("{what}: {other}")),
    }
}

impl DistributionSpec {
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "normal needs finite mu and sigma > 0, got mu={mu}, sigma={sigma}"
            )));
        }
        Ok(Self {
            law: Law::Normal { mu, sigma },
            support: SupportInterval::real_line(),
            mean: mu,
            variance: sigma * sigma,
            norm: 1.0,
        })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "exponential rate must be > 0, got {rate}"
            )));
        }
        Ok(Self {
            law: Law::Exponential { rate },
            support: SupportInterval::positive_half_line(),
            mean: 1.0 / rate,
            variance: 1.0 / (rate * rate),
            norm: 1.0,
        })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!(
                "uniform needs finite lo < hi, got lo={lo}, hi={hi}"
            )));
        }
        Ok(Self {
            law: Law::Uniform { lo, hi },
            support: SupportInterval::open(lo, hi)?,
            mean: 0.5 * (lo + hi),
            variance: (hi - lo) * (hi - lo) / 12.0,
            norm: 1.0,
        })
    }

    pub fn empirical(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::TooFewSamples(samples.len()));
        }
        if let Some(bad) = samples.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite sample {bad}")));
        }
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (_, mean, variance) = weighted_moments(&samples, None);
        Ok(Self {
            law: Law::Empirical(samples.into()),
            support: SupportInterval::closed(lo, hi)?,
            mean,
            variance,
            norm: 1.0,
        })
    }

    pub fn discrete(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != weights.len() {
            return Err(Error::InvalidParameter(
                "discrete law needs matching, non-empty values and weights".into(),
            ));
        }
        if values.iter().any(|x| !x.is_finite()) || weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter(
                "discrete law needs finite values and nonnegative weights".into(),
            ));
        }
        let (mass, mean, variance) = weighted_moments(&values, Some(&weights));
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter("discrete weights sum to zero".into()));
        }
        let weights: Vec<f64> = weights.iter().map(|w| w / mass).collect();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            law: Law::Discrete {
                values: values.into(),
                weights: weights.into(),
            },
            support: SupportInterval::closed(lo, hi)?,
            mean,
            variance,
            norm: 1.0,
        })
    }

    /// A law given by a density on `support`. The density is normalized by
    /// its numerically integrated mass.
    pub fn custom_pdf(
        pdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: SupportInterval,
        quadrature_budget: usize,
    ) -> Result<Self> {
        Self::custom_pdf_arc(Arc::new(pdf), support, quadrature_budget)
    }

    fn custom_pdf_arc(pdf: PdfFn, support: SupportInterval, quadrature_budget: usize) -> Result<Self> {
        if support.is_degenerate() {
            return Err(Error::InvalidParameter("custom density needs a non-degenerate support".into()));
        }
        let cfg = QuadConfig::default().with_budget(quadrature_budget);
        let (center, spread) = rough_center(&support);
        let g = |x: f64| pdf(x);
        let mass = integrate_over(&g, &support, center, spread, &cfg)
            .map_err(|e| quad_error(e, "total mass"))?
            .value;
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("density has mass {mass}")));
        }
        let m1 = integrate_over(&|x: f64| x * pdf(x), &support, center, spread, &cfg)
            .map_err(|e| quad_error(e, "mean"))?
            .value
            / mass;
        let spread = spread.max(1e-12);
        let m2 = integrate_over(&|x: f64| (x - m1) * (x - m1) * pdf(x), &support, m1, spread, &cfg)
            .map_err(|e| quad_error(e, "variance"))?
            .value
            / mass;
        if !m1.is_finite() || !m2.is_finite() {
            return Err(Error::InvalidParameter("density has infinite moments".into()));
        }
        Ok(Self {
            law: Law::CustomPdf {
                pdf,
                support,
                quadrature_budget,
            },
            support,
            mean: m1,
            variance: m2.max(0.0),
            norm: mass,
        })
    }

    pub fn law(&self) -> &Law {
        &self.law
    }

    pub fn support(&self) -> SupportInterval {
        self.support
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.law, Law::Empirical(_) | Law::Discrete { .. })
    }

    /// Atoms and their probabilities for discrete laws.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match &self.law {
            Law::Empirical(xs) => {
                let w = 1.0 / xs.len() as f64;
                Some(xs.iter().map(|&x| (x, w)).collect())
            }
            Law::Discrete { values, weights } => {
                Some(values.iter().copied().zip(weights.iter().copied()).collect())
            }
            _ => None,
        }
    }

    /// Density at `x` for continuous laws.
    pub fn density(&self, x: f64) -> Option<f64> {
        let inside = self.support.contains(x) || x == self.support.lower || x == self.support.upper;
        match &self.law {
            Law::Normal { mu, sigma } => Some(std_pdf((x - mu) / sigma) / sigma),
            Law::Exponential { rate } => Some(if x >= 0.0 { rate * (-rate * x).exp() } else { 0.0 }),
            Law::Uniform { lo, hi } => Some(if inside { 1.0 / (hi - lo) } else { 0.0 }),
            Law::CustomPdf { pdf, .. } => Some(if inside { pdf(x) / self.norm } else { 0.0 }),
            Law::Empirical(_) | Law::Discrete { .. } => None,
        }
    }

    pub(crate) fn quad_config(&self) -> QuadConfig {
        match &self.law {
            Law::CustomPdf { quadrature_budget, .. } => QuadConfig::default().with_budget(*quadrature_budget),
            _ => QuadConfig::default(),
        }
    }

    /// Core placement for quadrature over `cell`.
    pub(crate) fn quad_anchor(&self, cell: &SupportInterval) -> (f64, f64) {
        let sd = self.sd().max(1e-300);
        if cell.is_bounded() {
            (0.5 * (cell.lower + cell.upper), 0.5 * cell.width())
        } else if cell.lower.is_finite() {
            ((cell.lower + 0.5 * sd).max(self.mean), sd)
        } else if cell.upper.is_finite() {
            ((cell.upper - 0.5 * sd).min(self.mean), sd)
        } else {
            (self.mean, sd)
        }
    }

    fn check_cell(&self, cell: &SupportInterval) -> Result<()> {
        if cell.is_subset_of(&self.support) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "cell {cell} is not inside the support {}",
                self.support
            )))
        }
    }

    pub fn interval_prob(&self, cell: &SupportInterval) -> Result<f64> {
        self.check_cell(cell)?;
        if *cell == self.support {
            return Ok(1.0);
        }
        let p = match &self.law {
            Law::Normal { mu, sigma } => {
                let a = (cell.lower - mu) / sigma;
                let b = (cell.upper - mu) / sigma;
                normal_mass(a, b)
            }
            Law::Exponential { rate } => {
                let l = cell.lower.max(0.0);
                let w = cell.upper - l;
                (-rate * l).exp() * -(-rate * w).exp_m1()
            }
            Law::Uniform { lo, hi } => (cell.upper.min(*hi) - cell.lower.max(*lo)) / (hi - lo),
            Law::Empirical(_) | Law::Discrete { .. } => {
                let atoms = self.atoms().unwrap_or_default();
                compensated_sum(atoms.iter().filter(|(x, _)| cell.contains(*x)).map(|(_, w)| *w))
            }
            Law::CustomPdf { pdf, .. } => {
                let (c, s) = self.quad_anchor(cell);
                integrate_over(&|x: f64| pdf(x), cell, c, s, &self.quad_config())
                    .map_err(|e| quad_error(e, "cell probability"))?
                    .value
                    / self.norm
            }
        };
        Ok(p.clamp(0.0, 1.0))
    }

    pub fn truncated_stats(&self, cell: &SupportInterval) -> Result<TruncatedStats> {
        self.truncated_stats_indexed(cell, 0)
    }

    pub(crate) fn truncated_stats_indexed(&self, cell: &SupportInterval, index: usize) -> Result<TruncatedStats> {
        self.check_cell(cell)?;
        if *cell == self.support {
            return Ok(TruncatedStats {
                prob: 1.0,
                mean: self.mean,
                variance: self.variance,
            });
        }
        let empty = || Error::EmptyCell {
            index,
            cell: cell.to_string(),
        };
        let stats = match &self.law {
            Law::Normal { mu, sigma } => {
                let a = (cell.lower - mu) / sigma;
                let b = (cell.upper - mu) / sigma;
                let z = normal_mass(a, b);
                if !(z > 0.0) {
                    return Err(empty());
                }
                let d = (std_pdf(a) - std_pdf(b)) / z;
                let v = 1.0 + (z_pdf(a) - z_pdf(b)) / z - d * d;
                TruncatedStats {
                    prob: z,
                    mean: mu + sigma * d,
                    variance: (sigma * sigma * v).max(0.0),
                }
            }
            Law::Exponential { rate } => {
                let l = cell.lower.max(0.0);
                let w = cell.upper - l;
                let prob = (-rate * l).exp() * -(-rate * w).exp_m1();
                if !(prob > 0.0) {
                    return Err(empty());
                }
                let (m, v) = truncated_exponential_shifted(*rate, w);
                TruncatedStats {
                    prob,
                    mean: l + m,
                    variance: v,
                }
            }
            Law::Uniform { lo, hi } => {
                let l = cell.lower.max(*lo);
                let u = cell.upper.min(*hi);
                if !(u > l) {
                    return Err(empty());
                }
                TruncatedStats {
                    prob: (u - l) / (hi - lo),
                    mean: 0.5 * (l + u),
                    variance: (u - l) * (u - l) / 12.0,
                }
            }
            Law::Empirical(xs) => {
                let inside: Vec<f64> = xs.iter().copied().filter(|x| cell.contains(*x)).collect();
                if inside.is_empty() {
                    return Err(empty());
                }
                let (_, mean, variance) = weighted_moments(&inside, None);
                TruncatedStats {
                    prob: inside.len() as f64 / xs.len() as f64,
                    mean,
                    variance,
                }
            }
            Law::Discrete { values, weights } => {
                let (vs, ws): (Vec<f64>, Vec<f64>) = values
                    .iter()
                    .zip(weights.iter())
                    .filter(|(x, _)| cell.contains(**x))
                    .map(|(x, w)| (*x, *w))
                    .unzip();
                let (mass, mean, variance) = weighted_moments(&vs, Some(&ws));
                if !(mass > 0.0) {
                    return Err(empty());
                }
                TruncatedStats {
                    prob: mass,
                    mean,
                    variance,
                }
            }
            Law::CustomPdf { pdf, .. } => {
                let cfg = self.quad_config();
                let (c, s) = self.quad_anchor(cell);
                let mass = integrate_over(&|x: f64| pdf(x), cell, c, s, &cfg)
                    .map_err(|e| quad_error(e, "cell probability"))?
                    .value;
                if !(mass > 0.0) {
                    return Err(empty());
                }
                let m = integrate_over(&|x: f64| x * pdf(x), cell, c, s, &cfg)
                    .map_err(|e| quad_error(e, "cell mean"))?
                    .value
                    / mass;
                let v = integrate_over(&|x: f64| (x - m) * (x - m) * pdf(x), cell, c, s, &cfg)
                    .map_err(|e| quad_error(e, "cell variance"))?
                    .value
                    / mass;
                TruncatedStats {
                    prob: (mass / self.norm).min(1.0),
                    mean: m,
                    variance: v.max(0.0),
                }
            }
        };
        Ok(stats)
    }

    /// Interior cut points splitting the support into `m` cells of equal
    /// probability (nearest rank for discrete laws, where ties may merge
    /// cells).
    pub fn equal_probability_cuts(&self, m: usize) -> Result<Vec<f64>> {
        if m < 1 {
            return Err(Error::InvalidParameter("number of cells must be at least 1".into()));
        }
        let levels = (1..m).map(|j| j as f64 / m as f64);
        let cuts = match &self.law {
            Law::Normal { mu, sigma } => levels.map(|q| mu + sigma * std_quantile(q)).collect(),
            Law::Exponential { rate } => levels.map(|q| -(-q).ln_1p() / rate).collect(),
            Law::Uniform { lo, hi } => levels.map(|q| lo + (hi - lo) * q).collect(),
            Law::Empirical(_) | Law::Discrete { .. } => {
                let mut atoms = self.atoms().unwrap_or_default();
                atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut cuts: Vec<f64> = Vec::new();
                for q in levels {
                    // smallest atom with P(X < atom) ≥ q
                    let mut below = 0.0;
                    let mut i = 0;
                    while i < atoms.len() {
                        let v = atoms[i].0;
                        if below >= q - 1e-12 && v > atoms[0].0 {
                            break;
                        }
                        while i < atoms.len() && atoms[i].0 == v {
                            below += atoms[i].1;
                            i += 1;
                        }
                    }
                    if i < atoms.len() && cuts.last().is_none_or(|&c| atoms[i].0 > c) {
                        cuts.push(atoms[i].0);
                    }
                }
                cuts
            }
            Law::CustomPdf { .. } => {
                let mut cuts = Vec::with_capacity(m - 1);
                for q in levels {
                    cuts.push(self.custom_quantile(q)?);
                }
                cuts
            }
        };
        Ok(cuts)
    }

    fn custom_quantile(&self, q: f64) -> Result<f64> {
        let s = self.support;
        let sd = self.sd().max(1e-12);
        let mut lo = if s.lower.is_finite() { s.lower } else { self.mean - 8.0 * sd };
        let mut hi = if s.upper.is_finite() { s.upper } else { self.mean + 8.0 * sd };
        let below = |x: f64| -> Result<f64> {
            let cell = SupportInterval::new(s.lower, x, s.lower_closed, false)?;
            self.interval_prob(&cell)
        };
        while s.lower.is_infinite() && below(lo)? > q {
            lo -= 8.0 * sd;
        }
        while s.upper.is_infinite() && below(hi)? < q {
            hi += 8.0 * sd;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if below(mid)? < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Law of `Y = X^r` for a positive support.
    pub fn transform_power(&self, r: f64) -> Result<DistributionSpec> {
        if r == 0.0 || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("power r must be finite and nonzero, got {r}")));
        }
        if self.support.lower < 0.0 || (self.support.lower == 0.0 && self.support.lower_closed) {
            return Err(Error::Domain(format!(
                "power transform needs a positive support, got {}",
                self.support
            )));
        }
        if r == 1.0 {
            return Ok(self.clone());
        }
        match &self.law {
            Law::Empirical(xs) => Self::empirical(xs.iter().map(|x| x.powf(r)).collect()),
            Law::Discrete { values, weights } => {
                Self::discrete(values.iter().map(|x| x.powf(r)).collect(), weights.to_vec())
            }
            _ => {
                let s = self.support;
                let map = |x: f64| if x == 0.0 && r < 0.0 { f64::INFINITY } else { x.powf(r) };
                let (a, b) = (map(s.lower), map(s.upper));
                let support = if r > 0.0 {
                    SupportInterval::new(a, b, s.lower_closed, s.upper_closed)?
                } else {
                    SupportInterval::new(b, a, s.upper_closed && b.is_finite(), s.lower_closed && a.is_finite())?
                };
                let base = self.clone();
                let inv = 1.0 / r;
                let pdf = move |y: f64| {
                    if !(y > 0.0) {
                        return 0.0;
                    }
                    let x = y.powf(inv);
                    let jac = inv.abs() * y.powf(inv - 1.0);
                    let d = base.density(x).unwrap_or(0.0);
                    if d == 0.0 {
                        0.0
                    } else {
                        d * jac
                    }
                };
                let budget = match &self.law {
                    Law::CustomPdf { quadrature_budget, .. } => *quadrature_budget,
                    _ => QuadConfig::default().max_subdivisions,
                };
                Self::custom_pdf_arc(Arc::new(pdf), support, budget)
            }
        }
    }
}

fn rough_center(support: &SupportInterval) -> (f64, f64) {
    match (support.lower.is_finite(), support.upper.is_finite()) {
        (true, true) => (0.5 * (support.lower + support.upper), 0.5 * support.width()),
        (true, false) => (support.lower + 1.0_f64.max(support.lower.abs()), 1.0_f64.max(support.lower.abs())),
        (false, true) => (support.upper - 1.0_f64.max(support.upper.abs()), 1.0_f64.max(support.upper.abs())),
        (false, false) => (0.0, 1.0),
    }
}

/// `P(a < Z < b)` for a standard normal, using the tail that avoids
/// cancellation.
fn normal_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        std_sf(a) - std_sf(b)
    } else if b <= 0.0 {
        std_cdf(b) - std_cdf(a)
    } else {
        1.0 - std_cdf(a) - std_sf(b)
    }
}

/// Mean and variance of an exponential truncated to `[0, w)`.
fn truncated_exponential_shifted(rate: f64, w: f64) -> (f64, f64) {
    let scale = 1.0 / rate;
    if w.is_infinite() {
        return (scale, scale * scale);
    }
    let z = rate * w;
    if z < 1e-2 {
        let z2 = z * z;
        let m = z / 2.0 - z2 / 12.0 + z2 * z2 / 720.0;
        let v = z2 / 12.0 - z2 * z2 / 240.0 + z2 * z2 * z2 / 6048.0;
        (scale * m, scale * scale * v)
    } else {
        let m = 1.0 - z / z.exp_m1();
        let q = z * (-0.5 * z).exp() / -(-z).exp_m1();
        (scale * m, scale * scale * (1.0 - q * q).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(lo: f64, hi: f64) -> SupportInterval {
        SupportInterval::left_closed(lo, hi).unwrap()
    }

    #[test]
    fn means_and_variances() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        assert_eq!(e.mean(), 1.0);
        assert_eq!(e.variance(), 1.0);
        assert_eq!(DistributionSpec::uniform(10.0, 100.0).unwrap().mean(), 55.0);
        let s = DistributionSpec::empirical(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.mean(), 2.0);
        assert!((s.variance() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(DistributionSpec::normal(0.0, 1.0).unwrap().variance(), 1.0);
    }

    #[test]
    fn invalid_laws() {
        assert!(DistributionSpec::normal(0.0, 0.0).is_err());
        assert!(DistributionSpec::exponential(-1.0).is_err());
        assert!(DistributionSpec::uniform(2.0, 1.0).is_err());
        assert_eq!(
            DistributionSpec::empirical(vec![1.0]).unwrap_err(),
            Error::TooFewSamples(1)
        );
        assert!(DistributionSpec::empirical(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn interval_probabilities() {
        let n = DistributionSpec::normal(0.0, 1.0).unwrap();
        let p = n.interval_prob(&SupportInterval::open(f64::NEG_INFINITY, -0.431).unwrap()).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-3);
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        assert!((u.interval_prob(&SupportInterval::new(0.0, 0.5, false, false).unwrap()).unwrap() - 0.5).abs() < 1e-15);
        let s = DistributionSpec::empirical(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.interval_prob(&cell(1.0, 3.0)).unwrap(), 0.5);
    }

    #[test]
    fn cell_outside_support_is_rejected() {
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        assert!(matches!(u.interval_prob(&cell(-1.0, 0.5)), Err(Error::Domain(_))));
    }

    #[test]
    fn normal_tertile_moments() {
        let n = DistributionSpec::normal(0.0, 1.0).unwrap();
        let t = n.truncated_stats(&SupportInterval::left_closed(0.431, f64::INFINITY).unwrap()).unwrap();
        assert!((t.mean - 1.091).abs() < 1e-3, "{}", t.mean);
        assert!((t.variance - 0.280).abs() < 1e-3, "{}", t.variance);
        let t = n.truncated_stats(&cell(-0.431, 0.431)).unwrap();
        assert!(t.mean.abs() < 1e-12);
        assert!((t.variance - 0.060).abs() < 1e-3, "{}", t.variance);
    }

    #[test]
    fn uniform_half_moments() {
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        let t = u.truncated_stats(&SupportInterval::new(0.0, 0.5, false, false).unwrap()).unwrap();
        assert!((t.mean - 0.25).abs() < 1e-15);
        assert!((t.variance - 1.0 / 48.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_truncation_against_quadrature() {
        let e = DistributionSpec::exponential(2.0).unwrap();
        let cfg = QuadConfig::default();
        for (l, u) in [(0.1, 0.3), (0.5, 0.501), (1.0, f64::INFINITY), (0.2, 5.0)] {
            let c = if u.is_finite() {
                SupportInterval::closed(l, u).unwrap()
            } else {
                cell(l, u)
            };
            let t = e.truncated_stats(&c).unwrap();
            let pdf = |x: f64| 2.0 * (-2.0 * x).exp();
            let (cc, ss) = e.quad_anchor(&c);
            let mass = integrate_over(&pdf, &c, cc, ss, &cfg).unwrap().value;
            let m = integrate_over(&|x: f64| x * pdf(x), &c, cc, ss, &cfg).unwrap().value / mass;
            let v = integrate_over(&|x: f64| (x - m) * (x - m) * pdf(x), &c, cc, ss, &cfg).unwrap().value / mass;
            assert!((t.prob - mass).abs() < 1e-10);
            assert!((t.mean - m).abs() < 1e-9 * m.abs().max(1.0), "{l},{u}: {} vs {m}", t.mean);
            assert!((t.variance - v).abs() < 1e-8 * v.max(1e-6), "{l},{u}: {} vs {v}", t.variance);
        }
    }

    #[test]
    fn empty_cell_is_an_error() {
        let s = DistributionSpec::empirical(vec![1.0, 2.0, 5.0]).unwrap();
        assert!(matches!(s.truncated_stats(&cell(3.0, 4.0)), Err(Error::EmptyCell { .. })));
    }

    #[test]
    fn equal_probability_cut_examples() {
        let n = DistributionSpec::normal(0.0, 1.0).unwrap();
        let c = n.equal_probability_cuts(3).unwrap();
        assert!((c[0] + 0.431).abs() < 1e-3 && (c[1] - 0.431).abs() < 1e-3);
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        let c = u.equal_probability_cuts(4).unwrap();
        assert_eq!(c, vec![0.25, 0.5, 0.75]);
        let e = DistributionSpec::exponential(1.0).unwrap();
        let c = e.equal_probability_cuts(2).unwrap();
        assert!((c[0] - 2f64.ln()).abs() < 1e-15);
        assert!(e.equal_probability_cuts(0).is_err());
        assert!(e.equal_probability_cuts(1).unwrap().is_empty());
    }

    #[test]
    fn empirical_cuts_use_ranks() {
        let xs: Vec<f64> = (1..=8).map(f64::from).collect();
        let s = DistributionSpec::empirical(xs).unwrap();
        assert_eq!(s.equal_probability_cuts(4).unwrap(), vec![3.0, 5.0, 7.0]);
        let tied = DistributionSpec::empirical(vec![1.0, 1.0, 1.0, 2.0]).unwrap();
        assert_eq!(tied.equal_probability_cuts(2).unwrap(), vec![2.0]);
    }

    #[test]
    fn power_transform_examples() {
        let s = DistributionSpec::empirical(vec![1.0, 4.0, 9.0]).unwrap();
        let t = s.transform_power(0.5).unwrap();
        match t.law() {
            Law::Empirical(xs) => assert_eq!(&xs[..], &[1.0, 2.0, 3.0]),
            other => panic!("{other:?}"),
        }
        let u = DistributionSpec::uniform(1.0, 2.0).unwrap();
        let same = u.transform_power(1.0).unwrap();
        assert_eq!(same.mean(), u.mean());
        assert_eq!(same.support(), u.support());

        let xs = vec![2.0, 5.0, 7.5, 11.0];
        let direct = xs.iter().map(|x| 1.0 / x).sum::<f64>() / 4.0;
        let t = DistributionSpec::empirical(xs).unwrap().transform_power(-1.0).unwrap();
        assert!((t.mean() - direct).abs() < 1e-15);

        assert!(DistributionSpec::normal(0.0, 1.0).unwrap().transform_power(2.0).is_err());
    }

    #[test]
    fn power_transform_of_uniform_uses_change_of_variables() {
        // Y = X^2, X ~ U(1,2): E[Y] = 7/3, E[Y^2] = 31/5
        let u = DistributionSpec::uniform(1.0, 2.0).unwrap();
        let y = u.transform_power(2.0).unwrap();
        assert!((y.mean() - 7.0 / 3.0).abs() < 1e-9);
        assert!((y.variance() - (31.0 / 5.0 - 49.0 / 9.0)).abs() < 1e-9);
        // Y = 1/X: E[Y] = ln 2
        let inv = u.transform_power(-1.0).unwrap();
        assert!((inv.mean() - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn reciprocal_of_exponential_is_rejected() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        assert!(e.transform_power(-1.0).is_err());
    }

    #[test]
    fn custom_density_moments() {
        // triangular density on (0, 2) peaked at 1
        let tri = DistributionSpec::custom_pdf(
            |x: f64| if x < 1.0 { x } else { 2.0 - x },
            SupportInterval::open(0.0, 2.0).unwrap(),
            500,
        )
        .unwrap();
        assert!((tri.mean() - 1.0).abs() < 1e-10);
        assert!((tri.variance() - 1.0 / 6.0).abs() < 1e-10);
        let cuts = tri.equal_probability_cuts(2).unwrap();
        assert!((cuts[0] - 1.0).abs() < 1e-9);
    }
}
