//! Text forms for functions, laws and oracle choices: `name:key=val,key=val`.

use std::fmt;
use std::path::PathBuf;

use jensen_sharp::functions::CatalogKind;

/// Parse a decimal number. `inf` and `-inf` are accepted only when
/// `extended` is set.
pub fn parse_number(token: &str, extended: bool) -> Result<f64, String> {
    let t = token.trim();
    match t {
        "inf" | "+inf" if extended => return Ok(f64::INFINITY),
        "-inf" if extended => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    let decimal = !t.is_empty()
        && t.chars().all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'))
        && t.chars().any(|c| c.is_ascii_digit());
    match t.parse::<f64>() {
        Ok(v) if decimal && v.is_finite() => Ok(v),
        _ if !extended && matches!(t, "inf" | "+inf" | "-inf") => {
            Err(format!("'{t}' is not allowed here, a finite number is required"))
        }
        _ => Err(format!("'{t}' is not a number")),
    }
}

type Pairs<'a> = Vec<(&'a str, &'a str)>;

/// Split `name:k=v,...` into the name and its key/value pairs.
fn split_spec(text: &str) -> Result<(&str, Pairs<'_>), String> {
    let (name, rest) = match text.split_once(':') {
        Some((n, r)) => (n.trim(), Some(r)),
        None => (text.trim(), None),
    };
    let mut pairs = Vec::new();
    if let Some(rest) = rest {
        for token in rest.split(',') {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| format!("bad token '{token}' in '{text}': expected key=value"))?;
            let k = k.trim();
            if pairs.iter().any(|(seen, _)| *seen == k) {
                return Err(format!("bad token '{token}' in '{text}': '{k}' given twice"));
            }
            pairs.push((k, v.trim()));
        }
    }
    Ok((name, pairs))
}

struct Fields<'a> {
    text: &'a str,
    pairs: Pairs<'a>,
}

impl<'a> Fields<'a> {
    fn new(text: &'a str, pairs: Pairs<'a>, allowed: &[&str]) -> Result<Self, String> {
        for (k, v) in &pairs {
            if !allowed.contains(k) {
                return Err(format!(
                    "bad token '{k}={v}' in '{text}': expected one of {}",
                    allowed.join(", ")
                ));
            }
        }
        Ok(Self { text, pairs })
    }

    fn get(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn number(&self, key: &str) -> Result<f64, String> {
        let v = self
            .get(key)
            .ok_or_else(|| format!("'{}' is missing {key}=<number>", self.text))?;
        parse_number(v, false).map_err(|e| format!("bad token '{key}={v}' in '{}': {e}", self.text))
    }

    fn number_or(&self, key: &str, default: f64) -> Result<f64, String> {
        if self.get(key).is_some() {
            self.number(key)
        } else {
            Ok(default)
        }
    }

    fn count(&self, key: &str) -> Result<Option<u64>, String> {
        self.get(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| format!("bad token '{key}={v}' in '{}': expected a whole number", self.text))
            })
            .transpose()
    }
}

pub fn parse_phi(text: &str) -> Result<CatalogKind, String> {
    let (name, pairs) = split_spec(text)?;
    match name {
        "exp" => {
            let f = Fields::new(text, pairs, &["t"])?;
            Ok(CatalogKind::ExpScaled { t: f.number("t")? })
        }
        "power" => {
            let f = Fields::new(text, pairs, &["p"])?;
            Ok(CatalogKind::Power { p: f.number("p")? })
        }
        "neglog" => {
            Fields::new(text, pairs, &[])?;
            Ok(CatalogKind::NegLog)
        }
        "quad" => {
            let f = Fields::new(text, pairs, &["a", "b", "c"])?;
            Ok(CatalogKind::Quadratic {
                c2: f.number("a")?,
                c1: f.number_or("b", 0.0)?,
                c0: f.number_or("c", 0.0)?,
            })
        }
        other => Err(format!(
            "bad token '{other}' in '{text}': expected exp, power, neglog or quad"
        )),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistArg {
    Normal { mu: f64, sigma: f64 },
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
    File(PathBuf),
}

impl fmt::Display for DistArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistArg::Normal { mu, sigma } => write!(f, "normal:mu={mu},sigma={sigma}"),
            DistArg::Exponential { rate } => write!(f, "exp:rate={rate}"),
            DistArg::Uniform { lo, hi } => write!(f, "uniform:lo={lo},hi={hi}"),
            DistArg::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

pub fn parse_dist(text: &str) -> Result<DistArg, String> {
    if let Some(path) = text.strip_prefix("file:") {
        if path.is_empty() {
            return Err(format!("'{text}' is missing a path"));
        }
        return Ok(DistArg::File(PathBuf::from(path)));
    }
    let (name, pairs) = split_spec(text)?;
    match name {
        "normal" => {
            let f = Fields::new(text, pairs, &["mu", "sigma"])?;
            Ok(DistArg::Normal {
                mu: f.number("mu")?,
                sigma: f.number("sigma")?,
            })
        }
        "exp" => {
            let f = Fields::new(text, pairs, &["rate"])?;
            Ok(DistArg::Exponential { rate: f.number("rate")? })
        }
        "uniform" => {
            let f = Fields::new(text, pairs, &["lo", "hi"])?;
            Ok(DistArg::Uniform {
                lo: f.number("lo")?,
                hi: f.number("hi")?,
            })
        }
        other => Err(format!(
            "bad token '{other}' in '{text}': expected normal, exp, uniform or file"
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleArg {
    Quad,
    MonteCarlo { n: u64, seed: Option<u64> },
}

impl fmt::Display for OracleArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleArg::Quad => f.write_str("quad"),
            OracleArg::MonteCarlo { n, seed: None } => write!(f, "mc:n={n}"),
            OracleArg::MonteCarlo { n, seed: Some(s) } => write!(f, "mc:n={n},seed={s}"),
        }
    }
}

pub fn parse_oracle(text: &str) -> Result<OracleArg, String> {
    let (name, pairs) = split_spec(text)?;
    match name {
        "quad" => {
            Fields::new(text, pairs, &[])?;
            Ok(OracleArg::Quad)
        }
        "mc" => {
            let f = Fields::new(text, pairs, &["n", "seed"])?;
            let n = f.count("n")?.unwrap_or(jensen_sharp::oracle::DEFAULT_MC_SAMPLES as u64);
            Ok(OracleArg::MonteCarlo { n, seed: f.count("seed")? })
        }
        other => Err(format!("bad token '{other}' in '{text}': expected quad or mc")),
    }
}

/// `lo,hi` with extended reals allowed.
pub fn parse_window(text: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| format!("bad window '{text}': expected lo,hi"))?;
    let lo = parse_number(lo, true).map_err(|e| format!("bad window '{text}': {e}"))?;
    let hi = parse_number(hi, true).map_err(|e| format!("bad window '{text}': {e}"))?;
    if lo >= hi {
        return Err(format!("bad window '{text}': need lo < hi"));
    }
    Ok((lo, hi))
}

pub fn parse_finite(text: &str) -> Result<f64, String> {
    parse_number(text, false)
}
