//! Recompute the published reference values and compare each one.

use jensen_sharp::bounds::{curvature_bounds, jensen_bounds, power_mean_bounds, sample_bounds};
use jensen_sharp::distributions::DistributionSpec;
use jensen_sharp::functions::{make_catalog_function, CatalogKind};
use jensen_sharp::interval::ExtReal;
use jensen_sharp::oracle::estimate_gap;
use jensen_sharp::partition::{build_partition, partition_bounds};
use jensen_sharp::samples::reference_sample;
use serde_json::{json, Value};

use crate::CliResult;

struct Rows(Vec<Value>);

impl Rows {
    fn compare(&mut self, check: &str, reference: f64, computed: f64, tolerance: f64) {
        let diff = if reference == computed { 0.0 } else { (reference - computed).abs() };
        let pass = diff <= tolerance;
        self.push(check, Some(reference), computed, Some(diff), Some(tolerance), pass);
    }

    fn property(&mut self, check: &str, computed: f64, pass: bool) {
        self.push(check, None, computed, None, None, pass);
    }

    fn push(
        &mut self,
        check: &str,
        reference: Option<f64>,
        computed: f64,
        diff: Option<f64>,
        tolerance: Option<f64>,
        pass: bool,
    ) {
        self.0.push(json!({
            "check": check,
            "reference": reference.map(ExtReal),
            "computed": ExtReal(computed),
            "abs_diff": diff.map(ExtReal),
            "tolerance": tolerance,
            "status": crate::verdict(pass),
        }));
    }
}

pub(crate) fn report() -> CliResult<(Value, bool)> {
    let mut rows = Rows(Vec::new());

    let f = make_catalog_function(CatalogKind::ExpScaled { t: 0.5 })?;
    let d = DistributionSpec::exponential(1.0)?;
    let b = jensen_bounds(&f, &d)?;
    rows.compare("exp(x/2), Exponential(1): lower bound", 0.176, b.lower, 5e-4);
    rows.compare("exp(x/2), Exponential(1): upper bound", f64::INFINITY, b.upper, 0.0);
    let c = curvature_bounds(&f, &d)?;
    rows.compare("exp(x/2), Exponential(1): curvature lower bound", 0.125, c.lower, 1e-9);
    let g = estimate_gap(&f, &d, 1_000_000)?;
    rows.compare("exp(x/2), Exponential(1): gap", 0.351, g.value, 5e-4);

    let f = make_catalog_function(CatalogKind::ExpScaled { t: 1.0 })?;
    let d = DistributionSpec::normal(0.0, 1.0)?;
    let cuts = d.equal_probability_cuts(3)?;
    rows.compare("exp(x), normal tertiles: lower cut", -0.431, cuts[0], 1e-3);
    rows.compare("exp(x), normal tertiles: upper cut", 0.431, cuts[1], 1e-3);
    let plan = build_partition(&d, &cuts)?;
    let pb = partition_bounds(&f, &plan)?;
    let table = [
        (-1.091, 0.280, 0.000, 0.212),
        (0.000, 0.060, 0.435, 0.580),
        (1.091, 0.280, 1.209, f64::INFINITY),
    ];
    for (j, (cell, want)) in pb.cells.iter().zip(table).enumerate() {
        let n = j + 1;
        rows.compare(&format!("exp(x), normal tertiles: cell {n} mean"), want.0, cell.mean, 1e-3);
        rows.compare(&format!("exp(x), normal tertiles: cell {n} variance"), want.1, cell.variance, 1e-3);
        rows.compare(&format!("exp(x), normal tertiles: cell {n} inf h"), want.2, cell.inf_h.value, 2e-3);
        rows.compare(&format!("exp(x), normal tertiles: cell {n} sup h"), want.3, cell.sup_h.value, 2e-3);
    }
    rows.compare("exp(x), normal tertiles: lower bound", 0.409, pb.bounds.lower, 2e-3);
    rows.compare("exp(x), normal tertiles: upper bound", f64::INFINITY, pb.bounds.upper, 0.0);
    let g = estimate_gap(&f, &d, 1_000_000)?;
    rows.compare("exp(x), Normal(0,1): gap", 0.649, g.value, 5e-4);

    let xs = reference_sample();
    let n = xs.len() as f64;
    let arith = xs.iter().sum::<f64>() / n;
    let geo = (xs.iter().map(|x| x.ln()).sum::<f64>() / n).exp();
    let harm = n / xs.iter().map(|x| 1.0 / x).sum::<f64>();
    let neglog = make_catalog_function(CatalogKind::NegLog)?;
    let sb = sample_bounds(&neglog, &xs)?;
    let ratio = arith / geo;
    rows.property(
        "uniform sample: arithmetic/geometric ratio inside exp(bounds)",
        ratio,
        sb.lower.exp() <= ratio && ratio <= sb.upper.exp(),
    );
    let sample = DistributionSpec::empirical(xs.clone())?;
    let cb = curvature_bounds(&neglog, &sample)?;
    rows.property(
        "uniform sample: curvature bounds strictly wider",
        cb.upper - cb.lower,
        cb.lower < sb.lower && cb.upper > sb.upper,
    );
    let pm = power_mean_bounds(&sample, 1.0, -1.0)?;
    rows.property(
        "uniform sample: harmonic mean inside power-mean bracket",
        harm,
        pm.mean_lower <= harm && harm <= pm.mean_upper,
    );
    rows.property(
        "uniform sample: bracket upper end below arithmetic mean",
        pm.mean_upper,
        pm.mean_upper < arith,
    );

    let total = rows.0.len();
    let failed = rows.0.iter().filter(|r| r["status"] == "FAIL").count();
    let value = json!({
        "command": "paper",
        "sample": {
            "n": xs.len(),
            "arithmetic_mean": arith,
            "geometric_mean": geo,
            "harmonic_mean": harm,
            "ratio_bracket": [sb.lower.exp(), sb.upper.exp()],
            "harmonic_bracket": [pm.mean_lower, pm.mean_upper],
        },
        "rows": rows.0,
        "passed": total - failed,
        "failed": failed,
    });
    Ok((value, failed == 0))
}
