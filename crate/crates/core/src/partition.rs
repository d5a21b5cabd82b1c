//! Partition refinement of the gap bounds.
//!
//! Split the support into cells `I_j` with probabilities `η_j` and
//! conditional means `μ_j`. The gap decomposes into the gap of the coarse
//! variable `Y` (`P(Y = μ_j) = η_j`, `E[Y] = E[X]`) plus the `η_j`-weighted
//! conditional gaps of each cell, and each piece is bounded on its own:
//!
//! ```text
//! gap ≥ inf_{y∈[μ_1,μ_m]} h(y; μ_Y) var(Y) + Σ_j η_j inf_{x∈I_j} h(x; μ_j) var(X | X∈I_j)
//! ```
//!
//! with `sup` in place of `inf` for the upper bound.

use serde::Serialize;

use crate::bounds::{curvature_extrema, h_extrema, BoundMethod, GapBounds, HEvaluation, HExtrema, h_eval};
use crate::distributions::{DistributionSpec, TruncatedStats};
use crate::error::{Error, Result};
use crate::functions::FunctionSpec;
use crate::interval::{ext_mul, ext_sum, SupportInterval};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub interval: SupportInterval,
    pub stats: TruncatedStats,
}

#[derive(Debug, Clone)]
pub struct PartitionPlan {
    /// `x_0 < x_1 < … < x_m`, outer ends included (possibly infinite).
    pub cuts: Vec<f64>,
    pub cells: Vec<Cell>,
    /// Discrete law of the cell means.
    pub coarse: DistributionSpec,
    pub mean: f64,
    pub variance: f64,
}

pub fn build_partition(d: &DistributionSpec, cuts: &[f64]) -> Result<PartitionPlan> {
    let support = d.support();
    for (i, &c) in cuts.iter().enumerate() {
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!("cut {c} is not finite")));
        }
        let below_upper = c < support.upper || (support.upper_closed && c == support.upper);
        if !(c > support.lower && below_upper) {
            return Err(Error::Domain(format!(
                "cut {c} is not inside the support {support}"
            )));
        }
        if i > 0 && c <= cuts[i - 1] {
            return Err(Error::InvalidParameter(format!(
                "cuts must be strictly increasing, got {} then {c}",
                cuts[i - 1]
            )));
        }
    }
    let m = cuts.len() + 1;
    let mut edges = Vec::with_capacity(m + 1);
    edges.push(support.lower);
    edges.extend_from_slice(cuts);
    edges.push(support.upper);

    let mut cells = Vec::with_capacity(m);
    for j in 0..m {
        let lower_closed = if j == 0 { support.lower_closed } else { true };
        let upper_closed = if j == m - 1 { support.upper_closed } else { false };
        let interval = SupportInterval::new(edges[j], edges[j + 1], lower_closed, upper_closed)?;
        let stats = d.truncated_stats_indexed(&interval, j)?;
        if !(stats.prob > 0.0) {
            return Err(Error::EmptyCell {
                index: j,
                cell: interval.to_string(),
            });
        }
        cells.push(Cell { interval, stats });
    }
    let coarse = DistributionSpec::discrete(
        cells.iter().map(|c| c.stats.mean).collect(),
        cells.iter().map(|c| c.stats.prob).collect(),
    )?;
    Ok(PartitionPlan {
        cuts: edges,
        cells,
        coarse,
        mean: d.mean(),
        variance: d.variance(),
    })
}

impl PartitionPlan {
    pub fn total_prob(&self) -> f64 {
        self.cells.iter().map(|c| c.stats.prob).sum()
    }
}

/// One row of the per-cell table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellBounds {
    pub interval: SupportInterval,
    pub prob: f64,
    pub mean: f64,
    pub variance: f64,
    pub inf_h: HEvaluation,
    pub sup_h: HEvaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionBounds {
    pub bounds: GapBounds,
    pub coarse_variance: f64,
    pub coarse_inf_h: HEvaluation,
    pub coarse_sup_h: HEvaluation,
    pub cells: Vec<CellBounds>,
}

pub fn partition_bounds(f: &FunctionSpec, plan: &PartitionPlan) -> Result<PartitionBounds> {
    let dom = f.natural_domain();
    for cell in &plan.cells {
        if !cell.interval.is_subset_of(&dom) {
            return Err(Error::Domain(format!(
                "cell {} is not inside the domain {dom} of {}",
                cell.interval,
                f.name()
            )));
        }
    }
    let mu_y = plan.coarse.mean();
    let var_y = plan.coarse.variance();
    let coarse_span = plan.coarse.support();
    let coarse = if var_y == 0.0 {
        let at = h_eval(f, mu_y, mu_y)?;
        HExtrema { inf: at, sup: at }
    } else {
        h_extrema(f, &coarse_span, mu_y)?
    };

    let mut lower_terms = vec![ext_mul(coarse.inf.value, var_y)];
    let mut upper_terms = vec![ext_mul(coarse.sup.value, var_y)];
    let mut rows = Vec::with_capacity(plan.cells.len());
    for cell in &plan.cells {
        let s = cell.stats;
        let ex = if s.variance == 0.0 {
            let at = h_eval(f, s.mean, s.mean)?;
            HExtrema { inf: at, sup: at }
        } else {
            h_extrema(f, &cell.interval, s.mean)?
        };
        lower_terms.push(s.prob * ext_mul(ex.inf.value, s.variance));
        upper_terms.push(s.prob * ext_mul(ex.sup.value, s.variance));
        rows.push(CellBounds {
            interval: cell.interval,
            prob: s.prob,
            mean: s.mean,
            variance: s.variance,
            inf_h: ex.inf,
            sup_h: ex.sup,
        });
    }
    let lower = ext_sum(lower_terms)?;
    let upper = ext_sum(upper_terms)?;
    // With a single cell the bound is exactly the unpartitioned one, so keep
    // its witnesses.
    let (lower_detail, upper_detail) = if rows.len() == 1 {
        (rows[0].inf_h, rows[0].sup_h)
    } else {
        (coarse.inf, coarse.sup)
    };
    Ok(PartitionBounds {
        bounds: GapBounds {
            lower,
            upper,
            lower_detail,
            upper_detail,
            variance_used: plan.variance,
            method: if rows.len() == 1 { BoundMethod::HExtrema } else { BoundMethod::Partition },
        },
        coarse_variance: var_y,
        coarse_inf_h: coarse.inf,
        coarse_sup_h: coarse.sup,
        cells: rows,
    })
}

/// True when `inf φ″ > 0` on the window, the window has positive
/// probability, and `X` has positive variance inside it; this certifies a
/// strictly positive gap.
pub fn positivity_certificate(f: &FunctionSpec, d: &DistributionSpec, window: &SupportInterval) -> bool {
    let Some(w) = window.intersect(&d.support()) else {
        return false;
    };
    if w.is_degenerate() || !w.is_subset_of(&f.natural_domain()) {
        return false;
    }
    let anchor = d.mean().clamp(w.lower, w.upper);
    let anchor = if anchor.is_finite() { anchor } else { 0.0_f64.clamp(w.lower, w.upper) };
    let curvature_positive = match curvature_extrema(f, &w, anchor) {
        Ok(ex) => ex.inf.value > 0.0,
        Err(_) => false,
    };
    if !curvature_positive {
        return false;
    }
    match d.truncated_stats(&w) {
        Ok(s) => s.prob > 0.0 && s.variance > 0.0,
        Err(_) => false,
    }
}
