//! Command-line front end for the `jensen-sharp` bounds.

pub mod grammar;
mod render;
mod reproduce;

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jensen_sharp::bounds::{curvature_bounds, jensen_bounds, power_mean_bounds, sample_bounds, GapBounds};
use jensen_sharp::distributions::DistributionSpec;
use jensen_sharp::functions::{make_catalog_function, CatalogKind, FunctionSpec};
use jensen_sharp::interval::{ext_mul, ExtReal, SupportInterval};
use jensen_sharp::oracle::{estimate_gap_with, GapEstimate, OracleConfig, DEFAULT_MC_SAMPLES, DEFAULT_SEED};
use jensen_sharp::partition::{build_partition, partition_bounds, positivity_certificate};
use jensen_sharp::samples::read_samples;
use serde_json::{json, Value};

use grammar::{parse_dist, parse_finite, parse_oracle, parse_phi, parse_window, DistArg, OracleArg};

pub use render::render_text;

pub const SEED_ENV: &str = "JENSEN_SHARP_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug, Clone, PartialEq)]
#[command(name = "jensen-sharp", version, about = "Two-sided bounds on the Jensen gap E[phi(X)] - phi(E[X])")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Seed for Monte Carlo; overrides JENSEN_SHARP_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Bounds from the extrema of h over the support.
    Bound(BoundArgs),
    /// Bounds for a sample read from a file.
    SampleBound(BoundArgs),
    /// Bounds refined by splitting the support into cells.
    Partition(PartitionArgs),
    /// Bracket the power mean M_s through Y = X^r.
    PowerMean(PowerMeanArgs),
    /// Reference value of the gap.
    Oracle(OracleArgs),
    /// Recompute the published reference values and compare.
    Paper,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct BoundArgs {
    #[arg(long, value_parser = parse_phi)]
    pub phi: CatalogKind,
    #[arg(long, value_parser = parse_dist)]
    pub dist: DistArg,
    #[arg(long, value_parser = parse_oracle)]
    pub oracle: Option<OracleArg>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct PartitionArgs {
    #[arg(long, value_parser = parse_phi)]
    pub phi: CatalogKind,
    #[arg(long, value_parser = parse_dist)]
    pub dist: DistArg,
    /// Number of equal-probability cells.
    #[arg(long, conflicts_with = "cuts", required_unless_present = "cuts")]
    pub cells: Option<usize>,
    /// Interior cut points, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_finite)]
    pub cuts: Option<Vec<f64>>,
    /// Window `lo,hi` to test for a certified positive gap.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
    pub window: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_oracle)]
    pub oracle: Option<OracleArg>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct PowerMeanArgs {
    #[arg(long, value_parser = parse_dist)]
    pub dist: DistArg,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_finite)]
    pub r: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_finite)]
    pub s: f64,
    #[arg(long, value_parser = parse_oracle)]
    pub oracle: Option<OracleArg>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct OracleArgs {
    #[arg(long, value_parser = parse_phi)]
    pub phi: CatalogKind,
    #[arg(long, value_parser = parse_dist)]
    pub dist: DistArg,
    #[arg(long, value_parser = parse_oracle, default_value = "quad")]
    pub oracle: OracleArg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub format: OutputFormat,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<jensen_sharp::Error> for CliError {
    fn from(e: jensen_sharp::Error) -> Self {
        let code = if e.is_usage() { EXIT_USAGE } else { EXIT_NUMERIC };
        Self { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env {
        Some(text) => text
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("{SEED_ENV}='{text}' is not a whole number"))),
        None => Ok(DEFAULT_SEED),
    }
}

impl RunConfig {
    /// Parse command-line arguments (program name first). `env_seed` is the
    /// value of `JENSEN_SHARP_SEED`, if set.
    pub fn from_args<I, T>(args: I, env_seed: Option<&str>) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args)?;
        let seed = resolve_seed(cli.seed, env_seed)
            .map_err(|e| clap::Error::raw(clap::error::ErrorKind::InvalidValue, e.message + "\n"))?;
        Ok(Self {
            command: cli.command,
            format: cli.format,
            seed,
        })
    }

    /// Arguments that parse back to this configuration.
    pub fn to_args(&self) -> Vec<String> {
        let mut a = vec!["jensen-sharp".to_string()];
        let mut push = |k: &str, v: String| {
            a.push(format!("--{k}={v}"));
        };
        let name = match &self.command {
            Command::Bound(b) | Command::SampleBound(b) => {
                push("phi", b.phi.to_string());
                push("dist", b.dist.to_string());
                if let Some(o) = b.oracle {
                    push("oracle", o.to_string());
                }
                if matches!(self.command, Command::Bound(_)) { "bound" } else { "sample-bound" }
            }
            Command::Partition(p) => {
                push("phi", p.phi.to_string());
                push("dist", p.dist.to_string());
                if let Some(m) = p.cells {
                    push("cells", m.to_string());
                }
                if let Some(c) = &p.cuts {
                    push("cuts", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
                }
                if let Some((lo, hi)) = p.window {
                    push("window", format!("{},{}", ExtReal(lo), ExtReal(hi)));
                }
                if let Some(o) = p.oracle {
                    push("oracle", o.to_string());
                }
                "partition"
            }
            Command::PowerMean(p) => {
                push("dist", p.dist.to_string());
                push("r", p.r.to_string());
                push("s", p.s.to_string());
                if let Some(o) = p.oracle {
                    push("oracle", o.to_string());
                }
                "power-mean"
            }
            Command::Oracle(o) => {
                push("phi", o.phi.to_string());
                push("dist", o.dist.to_string());
                push("oracle", o.oracle.to_string());
                "oracle"
            }
            Command::Paper => "paper",
        };
        let format = match self.format {
            OutputFormat::Text => "text",
            OutputFormat::Json => "json",
        };
        push("format", format.to_string());
        push("seed", self.seed.to_string());
        a.insert(1, name.to_string());
        a
    }
}

/// A finished report and the exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub value: Value,
    pub status: i32,
}

impl Report {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => serde_json::to_string_pretty(&self.value).expect("report serializes") + "\n",
            OutputFormat::Text => render_text(&self.value),
        }
    }
}

/// Run the whole program: parse, execute, render. Returns the exit status,
/// standard output and standard error.
pub fn main_with<I, T>(args: I, env_seed: Option<&str>) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::from_args(args, env_seed) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (EXIT_OK, text, String::new()),
                _ => (EXIT_USAGE, String::new(), text),
            };
        }
    };
    match run(&cfg) {
        Ok(report) => (report.status, report.render(cfg.format), String::new()),
        Err(e) => (e.code, String::new(), format!("error: {}\n", e.message)),
    }
}

pub fn run(cfg: &RunConfig) -> CliResult<Report> {
    let value = match &cfg.command {
        Command::Bound(a) => bound_report(a, cfg.seed)?,
        Command::SampleBound(a) => sample_bound_report(a, cfg.seed)?,
        Command::Partition(a) => partition_report(a, cfg.seed)?,
        Command::PowerMean(a) => power_mean_report(a, cfg.seed)?,
        Command::Oracle(a) => oracle_report(a, cfg.seed)?,
        Command::Paper => {
            let (value, all_pass) = reproduce::report()?;
            let status = if all_pass { EXIT_OK } else { EXIT_CHECK_FAILED };
            return Ok(Report { value, status });
        }
    };
    Ok(Report { value, status: EXIT_OK })
}

fn function(kind: CatalogKind) -> CliResult<FunctionSpec> {
    Ok(make_catalog_function(kind)?)
}

fn distribution(arg: &DistArg) -> CliResult<DistributionSpec> {
    Ok(match arg {
        DistArg::Normal { mu, sigma } => DistributionSpec::normal(*mu, *sigma)?,
        DistArg::Exponential { rate } => DistributionSpec::exponential(*rate)?,
        DistArg::Uniform { lo, hi } => DistributionSpec::uniform(*lo, *hi)?,
        DistArg::File(path) => DistributionSpec::empirical(read_samples(path)?)?,
    })
}

fn oracle_config(arg: OracleArg, seed: u64) -> OracleConfig {
    match arg {
        OracleArg::Quad => OracleConfig::Auto {
            budget: DEFAULT_MC_SAMPLES,
            seed,
        },
        OracleArg::MonteCarlo { n, seed: s } => OracleConfig::MonteCarlo {
            n: n as usize,
            seed: s.unwrap_or(seed),
        },
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn bracket(b: &GapBounds, g: &GapEstimate) -> &'static str {
    verdict(b.contains(g.value, 3.0 * g.error_bound))
}

fn inputs(phi: Option<CatalogKind>, dist: &DistArg, oracle: Option<OracleArg>, seed: u64) -> Value {
    json!({
        "phi": phi.map(|k| k.to_string()),
        "dist": dist.to_string(),
        "oracle": oracle.map(|o| o.to_string()),
        "seed": seed,
    })
}

fn with_oracle(
    report: &mut Value,
    f: &FunctionSpec,
    d: &DistributionSpec,
    oracle: Option<OracleArg>,
    seed: u64,
    bounds: &GapBounds,
) -> CliResult<()> {
    let (est, check) = match oracle {
        Some(o) => {
            let g = estimate_gap_with(f, d, oracle_config(o, seed))?;
            (serde_json::to_value(g).expect("serializes"), Value::from(bracket(bounds, &g)))
        }
        None => (Value::Null, Value::Null),
    };
    report["oracle"] = est;
    report["bracket"] = check;
    Ok(())
}

fn bound_report(a: &BoundArgs, seed: u64) -> CliResult<Value> {
    let f = function(a.phi)?;
    let d = distribution(&a.dist)?;
    let b = jensen_bounds(&f, &d)?;
    let c = curvature_bounds(&f, &d)?;
    let mut r = json!({
        "command": "bound",
        "inputs": inputs(Some(a.phi), &a.dist, a.oracle, seed),
        "moments": {"mean": d.mean(), "variance": d.variance()},
        "bounds": b,
        "curvature": c,
    });
    with_oracle(&mut r, &f, &d, a.oracle, seed, &b)?;
    Ok(r)
}

fn sample_bound_report(a: &BoundArgs, seed: u64) -> CliResult<Value> {
    let DistArg::File(path) = &a.dist else {
        return Err(CliError::usage(format!(
            "sample-bound needs --dist file:<path>, got '{}'",
            a.dist
        )));
    };
    let xs = read_samples(path)?;
    let f = function(a.phi)?;
    let b = sample_bounds(&f, &xs)?;
    let d = DistributionSpec::empirical(xs.clone())?;
    let c = curvature_bounds(&f, &d)?;
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut r = json!({
        "command": "sample-bound",
        "inputs": inputs(Some(a.phi), &a.dist, a.oracle, seed),
        "sample": {"n": xs.len(), "mean": d.mean(), "variance": d.variance(), "min": lo, "max": hi},
        "bounds": b,
        "curvature": c,
    });
    with_oracle(&mut r, &f, &d, a.oracle, seed, &b)?;
    Ok(r)
}

fn partition_report(a: &PartitionArgs, seed: u64) -> CliResult<Value> {
    let f = function(a.phi)?;
    let d = distribution(&a.dist)?;
    let cuts = match (&a.cuts, a.cells) {
        (Some(c), _) => c.clone(),
        (None, Some(m)) => d.equal_probability_cuts(m)?,
        (None, None) => return Err(CliError::usage("give --cells or --cuts")),
    };
    let plan = build_partition(&d, &cuts)?;
    let pb = partition_bounds(&f, &plan)?;
    let cells: Vec<Value> = pb
        .cells
        .iter()
        .map(|c| {
            json!({
                "cell": c.interval.to_string(),
                "prob": c.prob,
                "mean": c.mean,
                "variance": c.variance,
                "inf_h": ExtReal(c.inf_h.value),
                "sup_h": ExtReal(c.sup_h.value),
            })
        })
        .collect();
    let mut r = json!({
        "command": "partition",
        "inputs": inputs(Some(a.phi), &a.dist, a.oracle, seed),
        "cuts": cuts,
        "cells": cells,
        "coarse": {
            "variance": pb.coarse_variance,
            "inf_h": ExtReal(pb.coarse_inf_h.value),
            "sup_h": ExtReal(pb.coarse_sup_h.value),
            "lower_term": ExtReal(ext_mul(pb.coarse_inf_h.value, pb.coarse_variance)),
            "upper_term": ExtReal(ext_mul(pb.coarse_sup_h.value, pb.coarse_variance)),
        },
        "bounds": pb.bounds,
    });
    if let Some((lo, hi)) = a.window {
        let w = SupportInterval::new(lo, hi, lo.is_finite(), hi.is_finite())?;
        r["certificate"] = json!({
            "window": w.to_string(),
            "positive_gap": positivity_certificate(&f, &d, &w),
        });
    }
    with_oracle(&mut r, &f, &d, a.oracle, seed, &pb.bounds)?;
    Ok(r)
}

fn power_mean_report(a: &PowerMeanArgs, seed: u64) -> CliResult<Value> {
    let d = distribution(&a.dist)?;
    let m = power_mean_bounds(&d, a.r, a.s)?;
    let mut r = json!({
        "command": "power-mean",
        "inputs": inputs(None, &a.dist, a.oracle, seed),
        "r": a.r,
        "s": a.s,
        "bracket": m,
        "oracle": null,
        "power_mean": null,
        "check": null,
    });
    if let Some(o) = a.oracle {
        let y = d.transform_power(a.r)?;
        let p = a.s / a.r;
        let f = function(CatalogKind::Power { p })?;
        let g = estimate_gap_with(&f, &y, oracle_config(o, seed))?;
        let moment = y.mean().powf(p) + g.value;
        let mean = moment.powf(1.0 / a.s);
        r["oracle"] = serde_json::to_value(g).expect("serializes");
        r["power_mean"] = serde_json::to_value(ExtReal(mean)).expect("serializes");
        r["check"] = Value::from(bracket(&m.gap, &g));
    }
    Ok(r)
}

fn oracle_report(a: &OracleArgs, seed: u64) -> CliResult<Value> {
    let f = function(a.phi)?;
    let d = distribution(&a.dist)?;
    let g = estimate_gap_with(&f, &d, oracle_config(a.oracle, seed))?;
    Ok(json!({
        "command": "oracle",
        "inputs": inputs(Some(a.phi), &a.dist, Some(a.oracle), seed),
        "oracle": g,
    }))
}
