//! Sample files and the bundled reference sample.

use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Uniform;

use crate::error::{Error, Result};

/// 100 draws from Uniform(10, 100), ChaCha8 seeded with 42.
pub const REFERENCE_SAMPLE_TEXT: &str = include_str!("../data/uniform_10_100_seed42.txt");

/// One number per line; blank lines and `#` comments are skipped.
pub fn parse_samples(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let x: f64 = line.parse().map_err(|_| {
            Error::InvalidParameter(format!("line {}: '{line}' is not a number", lineno + 1))
        })?;
        if !x.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "line {}: sample values must be finite",
                lineno + 1
            )));
        }
        out.push(x);
    }
    Ok(out)
}

pub fn read_samples(path: &std::path::Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    parse_samples(&text)
}

pub fn seeded_uniform_sample(n: usize, lo: f64, hi: f64, seed: u64) -> Result<Vec<f64>> {
    let u = Uniform::new(lo, hi).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| u.sample(&mut rng)).collect())
}

pub fn reference_sample() -> Vec<f64> {
    parse_samples(REFERENCE_SAMPLE_TEXT).expect("bundled sample parses")
}

pub fn format_samples(xs: &[f64], header: &str) -> String {
    let mut s = String::new();
    for line in header.lines() {
        s.push_str("# ");
        s.push_str(line);
        s.push('\n');
    }
    for x in xs {
        s.push_str(&format!("{x:?}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let xs = parse_samples("# header\n1.5\n\n  2 # trailing\n-3e2\n").unwrap();
        assert_eq!(xs, vec![1.5, 2.0, -300.0]);
        assert!(parse_samples("1\nabc\n").is_err());
        assert!(parse_samples("inf\n").is_err());
        assert!(parse_samples("").unwrap().is_empty());
    }

    #[test]
    fn bundled_sample_regenerates() {
        let fresh = seeded_uniform_sample(100, 10.0, 100.0, 42).unwrap();
        assert_eq!(reference_sample(), fresh);
        assert!(fresh.iter().all(|&x| (10.0..100.0).contains(&x)));
    }
}
