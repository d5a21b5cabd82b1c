//! Reference values of the Jensen gap `E[φ(X)] − φ(E[X])`.
//!
//! Discrete laws are summed exactly, densities are integrated, and Monte
//! Carlo is the fallback when quadrature cannot converge.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, Normal, Uniform};
use serde::Serialize;

use crate::distributions::{compensated_sum, DistributionSpec, Law};
use crate::error::{Error, Result};
use crate::functions::FunctionSpec;
use crate::interval::{ExtReal, SupportInterval};
use crate::quad::{integrate_over, QuadConfig, QuadError};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
/// Rejection sampling gives up after this many draws per accepted point.
const MAX_REJECTIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Quadrature,
    ExactSum,
    MonteCarlo { seed: u64, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub method: OracleMethod,
}

impl Serialize for GapEstimate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("GapEstimate", 3)?;
        st.serialize_field("value", &ExtReal(self.value))?;
        st.serialize_field("error_bound", &self.error_bound)?;
        st.serialize_field("method", &self.method)?;
        st.end()
    }
}

/// How the oracle should compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleConfig {
    /// Exact sum or quadrature, with Monte Carlo of `budget` draws as fallback.
    Auto { budget: usize, seed: u64 },
    MonteCarlo { n: usize, seed: u64 },
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig::Auto {
            budget: DEFAULT_MC_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

pub fn estimate_gap(f: &FunctionSpec, d: &DistributionSpec, budget: usize) -> Result<GapEstimate> {
    estimate_gap_with(f, d, OracleConfig::Auto { budget, seed: DEFAULT_SEED })
}

pub fn estimate_gap_with(f: &FunctionSpec, d: &DistributionSpec, cfg: OracleConfig) -> Result<GapEstimate> {
    let support = d.support();
    check_domain(f, &support)?;
    estimate_on(f, d, &support, d.mean(), cfg)
}

/// `E[φ(X) | X ∈ cell] − φ(E[X | X ∈ cell])`.
pub fn estimate_conditional_gap(
    f: &FunctionSpec,
    d: &DistributionSpec,
    cell: &SupportInterval,
    budget: usize,
) -> Result<GapEstimate> {
    estimate_conditional_gap_with(f, d, cell, OracleConfig::Auto { budget, seed: DEFAULT_SEED })
}

pub fn estimate_conditional_gap_with(
    f: &FunctionSpec,
    d: &DistributionSpec,
    cell: &SupportInterval,
    cfg: OracleConfig,
) -> Result<GapEstimate> {
    let stats = d.truncated_stats(cell)?;
    if !(stats.prob > 0.0) {
        return Err(Error::EmptyCell {
            index: 0,
            cell: cell.to_string(),
        });
    }
    check_domain(f, cell)?;
    estimate_on(f, d, cell, stats.mean, cfg)
}

fn check_domain(f: &FunctionSpec, region: &SupportInterval) -> Result<()> {
    let dom = f.natural_domain();
    if region.is_subset_of(&dom) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{region} is not inside the domain {dom} of {}",
            f.name()
        )))
    }
}

fn estimate_on(
    f: &FunctionSpec,
    d: &DistributionSpec,
    region: &SupportInterval,
    mu: f64,
    cfg: OracleConfig,
) -> Result<GapEstimate> {
    let (budget, seed) = match cfg {
        OracleConfig::MonteCarlo { n, seed } => return monte_carlo(f, d, region, mu, n, seed),
        OracleConfig::Auto { budget, seed } => (budget, seed),
    };
    if let Some(atoms) = d.atoms() {
        return Ok(exact_sum(f, &atoms, region, mu));
    }
    match quadrature(f, d, region, mu) {
        Ok(est) => Ok(est),
        Err(QuadError::Diverged { partial, toward }) => {
            if partial.is_nan() {
                return Err(Error::Numeric(format!("gap integral toward {toward} is undefined")));
            }
            Ok(GapEstimate {
                value: if partial < 0.0 { f64::NEG_INFINITY } else { f64::INFINITY },
                error_bound: 0.0,
                method: OracleMethod::Quadrature,
            })
        }
        Err(_) => monte_carlo(f, d, region, mu, budget, seed),
    }
}

fn centered(f: &FunctionSpec, mu: f64) -> impl Fn(f64) -> f64 + '_ {
    let f_mu = f.eval(mu);
    let d_mu = f.deriv1(mu);
    move |x| f.eval(x) - f_mu - d_mu * (x - mu)
}

fn exact_sum(f: &FunctionSpec, atoms: &[(f64, f64)], region: &SupportInterval, mu: f64) -> GapEstimate {
    let g = centered(f, mu);
    let inside: Vec<(f64, f64)> = atoms.iter().copied().filter(|(x, _)| region.contains(*x)).collect();
    let mass = compensated_sum(inside.iter().map(|(_, w)| *w));
    let terms: Vec<f64> = inside.iter().map(|&(x, w)| w * g(x) / mass).collect();
    let value = compensated_sum(terms.iter().copied());
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    GapEstimate {
        value,
        error_bound: 4.0 * f64::EPSILON * scale,
        method: OracleMethod::ExactSum,
    }
}

fn quadrature(
    f: &FunctionSpec,
    d: &DistributionSpec,
    region: &SupportInterval,
    mu: f64,
) -> std::result::Result<GapEstimate, QuadError> {
    let g = centered(f, mu);
    let integrand = |x: f64| {
        let p = d.density(x).unwrap_or(0.0);
        if p == 0.0 {
            0.0
        } else {
            g(x) * p
        }
    };
    let (c, s) = d.quad_anchor(region);
    let base = d.quad_config();
    let tight = QuadConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        ..base
    };
    let mass = if *region == d.support() {
        1.0
    } else {
        d.interval_prob(region).map_err(|_| QuadError::NonFinite { at: c })?
    };
    let r = match integrate_over(&integrand, region, c, s, &tight) {
        Err(QuadError::NotConverged { .. }) => integrate_over(&integrand, region, c, s, &base)?,
        other => other?,
    };
    Ok(GapEstimate {
        value: r.value / mass,
        error_bound: r.error / mass,
        method: OracleMethod::Quadrature,
    })
}

enum Sampler {
    Normal(Normal<f64>),
    Exp(Exp<f64>),
    Uniform(Uniform<f64>),
    Points(Vec<f64>, Option<WeightedIndex<f64>>),
}

impl Sampler {
    fn new(d: &DistributionSpec) -> Result<Self> {
        let bad = |e: String| Error::InvalidParameter(e);
        Ok(match d.law() {
            Law::Normal { mu, sigma } => Sampler::Normal(Normal::new(*mu, *sigma).map_err(|e| bad(e.to_string()))?),
            Law::Exponential { rate } => Sampler::Exp(Exp::new(*rate).map_err(|e| bad(e.to_string()))?),
            Law::Uniform { lo, hi } => Sampler::Uniform(Uniform::new(*lo, *hi).map_err(|e| bad(e.to_string()))?),
            Law::Empirical(xs) => Sampler::Points(xs.to_vec(), None),
            Law::Discrete { values, weights } => Sampler::Points(
                values.to_vec(),
                Some(WeightedIndex::new(weights.iter().copied()).map_err(|e| bad(e.to_string()))?),
            ),
            Law::CustomPdf { .. } => {
                return Err(Error::Numeric(
                    "Monte Carlo sampling is not available for a custom density".into(),
                ))
            }
        })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Normal(n) => n.sample(rng),
            Sampler::Exp(e) => e.sample(rng),
            Sampler::Uniform(u) => u.sample(rng),
            Sampler::Points(xs, None) => xs[rand::Rng::random_range(rng, 0..xs.len())],
            Sampler::Points(xs, Some(w)) => xs[w.sample(rng)],
        }
    }
}

fn monte_carlo(
    f: &FunctionSpec,
    d: &DistributionSpec,
    region: &SupportInterval,
    mu: f64,
    n: usize,
    seed: u64,
) -> Result<GapEstimate> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "Monte Carlo needs at least 2 draws, got {n}"
        )));
    }
    let sampler = Sampler::new(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f_mu = f.eval(mu);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..n {
        let mut tries = 0;
        let x = loop {
            let x = sampler.draw(&mut rng);
            if region.contains(x) {
                break x;
            }
            tries += 1;
            if tries > MAX_REJECTIONS {
                return Err(Error::Numeric(format!("could not sample inside {region}")));
            }
        };
        let y = f.eval(x) - f_mu;
        if !y.is_finite() {
            return Err(Error::Evaluation { what: "phi", at: x });
        }
        let delta = y - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (y - mean);
    }
    let var = m2 / (n - 1) as f64;
    Ok(GapEstimate {
        value: mean,
        error_bound: 3.0 * (var / n as f64).sqrt(),
        method: OracleMethod::MonteCarlo { seed, n },
    })
}
