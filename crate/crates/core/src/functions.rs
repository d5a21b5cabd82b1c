//! Twice-differentiable functions with derivative information.
//!
//! A [`FunctionSpec`] bundles `φ`, `φ′`, `φ″`, the domain on which they are
//! valid, and the shape of `φ′`. The shape tag decides whether the extrema of
//! the divided-difference curve `h(x; ν)` can be read off at the interval
//! ends (monotone `h`) or must be searched for.
//!
//! Catalog functions additionally carry a cancellation-free evaluator for
//! `h` and the analytic limits of `h` at the ends of their domain.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::SupportInterval;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// `(endpoint, ν) -> Some(lim_{x→endpoint} h(x; ν))` when known.
pub type LimitHintFn = Arc<dyn Fn(f64, f64) -> Option<f64> + Send + Sync>;
/// `(ν, x) -> h(x; ν)` evaluated without catastrophic cancellation.
pub type StableHFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiPrimeShape {
    Convex,
    Concave,
    Unknown,
}

impl fmt::Display for PhiPrimeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PhiPrimeShape::Convex => "convex",
            PhiPrimeShape::Concave => "concave",
            PhiPrimeShape::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// Built-in function families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogKind {
    /// `e^{t x}`
    ExpScaled { t: f64 },
    /// `x^p` on `(0, ∞)`
    Power { p: f64 },
    /// `-ln x` on `(0, ∞)`
    NegLog,
    /// `c2 x² + c1 x + c0`
    Quadratic { c2: f64, c1: f64, c0: f64 },
}

impl fmt::Display for CatalogKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogKind::ExpScaled { t } => write!(f, "exp:t={t}"),
            CatalogKind::Power { p } => write!(f, "power:p={p}"),
            CatalogKind::NegLog => f.write_str("neglog"),
            CatalogKind::Quadratic { c2, c1, c0 } => write!(f, "quad:a={c2},b={c1},c={c0}"),
        }
    }
}

#[derive(Clone)]
pub struct FunctionSpec {
    name: String,
    eval: RealFn,
    deriv1: RealFn,
    deriv2: RealFn,
    natural_domain: SupportInterval,
    phi_prime_shape: PhiPrimeShape,
    h_limit_hint: Option<LimitHintFn>,
    stable_h: Option<StableHFn>,
    catalog: Option<CatalogKind>,
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("name", &self.name)
            .field("natural_domain", &self.natural_domain)
            .field("phi_prime_shape", &self.phi_prime_shape)
            .field("has_limit_hint", &self.h_limit_hint.is_some())
            .finish()
    }
}

impl FunctionSpec {
    /// A user-supplied function given as three callables plus a domain.
    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        natural_domain: SupportInterval,
        phi_prime_shape: PhiPrimeShape,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            deriv1: Arc::new(deriv1),
            deriv2: Arc::new(deriv2),
            natural_domain,
            phi_prime_shape,
            h_limit_hint: None,
            stable_h: None,
            catalog: None,
        }
    }

    pub fn with_h_limit_hint(
        mut self,
        hint: impl Fn(f64, f64) -> Option<f64> + Send + Sync + 'static,
    ) -> Self {
        self.h_limit_hint = Some(Arc::new(hint));
        self
    }

    pub fn with_shape(mut self, shape: PhiPrimeShape) -> Self {
        self.phi_prime_shape = shape;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn catalog_kind(&self) -> Option<CatalogKind> {
        self.catalog
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn deriv1(&self, x: f64) -> f64 {
        (self.deriv1)(x)
    }

    pub fn deriv2(&self, x: f64) -> f64 {
        (self.deriv2)(x)
    }

    pub fn natural_domain(&self) -> SupportInterval {
        self.natural_domain
    }

    pub fn phi_prime_shape(&self) -> PhiPrimeShape {
        self.phi_prime_shape
    }

    pub fn h_limit_hint(&self, endpoint: f64, nu: f64) -> Option<f64> {
        self.h_limit_hint.as_ref().and_then(|hint| hint(endpoint, nu))
    }

    pub fn has_limit_hint(&self) -> bool {
        self.h_limit_hint.is_some()
    }

    pub(crate) fn stable_h(&self, nu: f64, x: f64) -> Option<f64> {
        self.stable_h.as_ref().map(|h| h(nu, x))
    }

    /// Whether `φ` itself can be evaluated at `x` (used for endpoint limits).
    pub fn defined_at(&self, x: f64) -> bool {
        x.is_finite() && self.natural_domain.contains(x)
    }
}

pub fn make_catalog_function(kind: CatalogKind) -> Result<FunctionSpec> {
    let name = kind.to_string();
    let spec = match kind {
        CatalogKind::ExpScaled { t } => {
            if t == 0.0 || !t.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "exp scale t must be finite and nonzero, got {t}"
                )));
            }
            let shape = if t > 0.0 {
                PhiPrimeShape::Convex
            } else {
                PhiPrimeShape::Concave
            };
            FunctionSpec {
                name,
                eval: Arc::new(move |x| (t * x).exp()),
                deriv1: Arc::new(move |x| t * (t * x).exp()),
                deriv2: Arc::new(move |x| t * t * (t * x).exp()),
                natural_domain: SupportInterval::real_line(),
                phi_prime_shape: shape,
                h_limit_hint: Some(Arc::new(move |end, _nu| exp_limit(t, end))),
                stable_h: Some(Arc::new(move |nu, x| exp_h(t, nu, x))),
                catalog: Some(kind),
            }
        }
        CatalogKind::Power { p } => {
            if p == 0.0 || !p.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "power p must be finite and nonzero, got {p}"
                )));
            }
            let shape = if p >= 2.0 || (p > 0.0 && p <= 1.0) {
                PhiPrimeShape::Convex
            } else {
                PhiPrimeShape::Concave
            };
            FunctionSpec {
                name,
                eval: Arc::new(move |x| x.powf(p)),
                deriv1: Arc::new(move |x| p * x.powf(p - 1.0)),
                deriv2: Arc::new(move |x| p * (p - 1.0) * x.powf(p - 2.0)),
                natural_domain: SupportInterval::positive_half_line(),
                phi_prime_shape: shape,
                h_limit_hint: Some(Arc::new(move |end, nu| power_limit(p, end, nu))),
                stable_h: Some(Arc::new(move |nu, x| power_h(p, nu, x))),
                catalog: Some(kind),
            }
        }
        CatalogKind::NegLog => FunctionSpec {
            name,
            eval: Arc::new(|x| -x.ln()),
            deriv1: Arc::new(|x| -1.0 / x),
            deriv2: Arc::new(|x| 1.0 / (x * x)),
            natural_domain: SupportInterval::positive_half_line(),
            phi_prime_shape: PhiPrimeShape::Concave,
            h_limit_hint: Some(Arc::new(|end, _nu| {
                if end == 0.0 {
                    Some(f64::INFINITY)
                } else if end == f64::INFINITY {
                    Some(0.0)
                } else {
                    None
                }
            })),
            stable_h: Some(Arc::new(neglog_h)),
            catalog: Some(kind),
        },
        CatalogKind::Quadratic { c2, c1, c0 } => {
            if !(c2.is_finite() && c1.is_finite() && c0.is_finite()) {
                return Err(Error::InvalidParameter(
                    "quadratic coefficients must be finite".into(),
                ));
            }
            FunctionSpec {
                name,
                eval: Arc::new(move |x| (c2 * x + c1) * x + c0),
                deriv1: Arc::new(move |x| 2.0 * c2 * x + c1),
                deriv2: Arc::new(move |_| 2.0 * c2),
                natural_domain: SupportInterval::real_line(),
                // φ′ is affine, so both shapes hold and h is constant.
                phi_prime_shape: PhiPrimeShape::Convex,
                h_limit_hint: Some(Arc::new(move |_, _| Some(c2))),
                stable_h: Some(Arc::new(move |_, _| c2)),
                catalog: Some(kind),
            }
        }
    };
    Ok(spec)
}

fn exp_limit(t: f64, end: f64) -> Option<f64> {
    match (end == f64::INFINITY, end == f64::NEG_INFINITY) {
        (true, _) => Some(if t > 0.0 { f64::INFINITY } else { 0.0 }),
        (_, true) => Some(if t > 0.0 { 0.0 } else { f64::INFINITY }),
        _ => None,
    }
}

fn power_limit(p: f64, end: f64, nu: f64) -> Option<f64> {
    if end == 0.0 {
        if p < 0.0 {
            Some(f64::INFINITY)
        } else {
            Some((p - 1.0) * nu.powf(p - 2.0))
        }
    } else if end == f64::INFINITY {
        if p > 2.0 {
            Some(f64::INFINITY)
        } else if p == 2.0 {
            Some(1.0)
        } else {
            Some(0.0)
        }
    } else {
        None
    }
}

const SERIES_RADIUS: f64 = 0.1;

/// `h` for `e^{tx}`: `t² e^{tν} (e^z − 1 − z)/z²` with `z = t(x−ν)`.
fn exp_h(t: f64, nu: f64, x: f64) -> f64 {
    let d = x - nu;
    let z = t * d;
    if z.abs() <= 0.5 {
        // Σ z^k / (k+2)!
        let mut term: f64 = 0.5;
        let mut sum = 0.0;
        for k in 0..40 {
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            term *= z / (k as f64 + 3.0);
        }
        t * t * (t * nu).exp() * sum
    } else {
        let e_nu = (t * nu).exp();
        ((t * x).exp() - e_nu) / (d * d) - t * e_nu / d
    }
}

/// `h` for `x^p`: `ν^{p−2} ((1+u)^p − 1 − p u)/u²` with `u = (x−ν)/ν`.
fn power_h(p: f64, nu: f64, x: f64) -> f64 {
    let d = x - nu;
    let u = d / nu;
    if u.abs() <= SERIES_RADIUS {
        // binomial series Σ_{k≥2} C(p,k) u^{k−2}
        let mut coef = p * (p - 1.0) / 2.0;
        let mut upow = 1.0;
        let mut sum = 0.0;
        for k in 2..60 {
            let term = coef * upow;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            coef *= (p - k as f64) / (k as f64 + 1.0);
            upow *= u;
        }
        nu.powf(p - 2.0) * sum
    } else {
        (x.powf(p) - nu.powf(p)) / (d * d) - p * nu.powf(p - 1.0) / d
    }
}

/// `h` for `-ln x`: `ν^{−2} (u − ln(1+u))/u²` with `u = (x−ν)/ν`.
fn neglog_h(nu: f64, x: f64) -> f64 {
    let u = (x - nu) / nu;
    let g = if u.abs() <= SERIES_RADIUS {
        // Σ_{k≥2} (−1)^k u^{k−2}/k
        let mut sum = 0.0;
        let mut upow = 1.0;
        for k in 2..60 {
            let term = upow / k as f64;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            upow *= -u;
        }
        sum
    } else {
        (u - u.ln_1p()) / (u * u)
    };
    g / (nu * nu)
}

/// Probe window for shape classification of a function that will be bounded
/// against a law centred at `center` with spread `spread`.
pub fn default_probe_window(f: &FunctionSpec, center: f64, spread: f64) -> Result<SupportInterval> {
    let dom = f.natural_domain();
    let mut lo = dom.lower.max(center - 8.0 * spread);
    let mut hi = dom.upper.min(center + 8.0 * spread);
    if lo == dom.lower && !dom.lower_closed {
        lo += 1e-6 * (hi - lo);
    }
    if hi == dom.upper && !dom.upper_closed {
        hi -= 1e-6 * (hi - lo);
    }
    SupportInterval::closed(lo, hi)
}

/// Classify `φ′` on a bounded probe window by midpoint tests over every
/// probe pair.
pub fn classify_phi_prime_shape(
    f: &FunctionSpec,
    window: &SupportInterval,
    probe_grid_size: usize,
) -> Result<PhiPrimeShape> {
    if probe_grid_size < 8 {
        return Err(Error::InvalidParameter(format!(
            "probe grid needs at least 8 points, got {probe_grid_size}"
        )));
    }
    if !window.is_bounded() || window.is_degenerate() {
        return Err(Error::InvalidParameter(format!(
            "probe window {window} must be bounded and non-degenerate"
        )));
    }
    if !window.is_subset_of(&f.natural_domain()) {
        return Err(Error::Domain(format!(
            "probe window {window} outside domain {} of {}",
            f.natural_domain(),
            f.name()
        )));
    }
    let n = probe_grid_size;
    let xs: Vec<f64> = (0..n)
        .map(|i| {
            let frac = if window.lower_closed && window.upper_closed {
                i as f64 / (n - 1) as f64
            } else {
                (i as f64 + 0.5) / n as f64
            };
            window.lower + frac * window.width()
        })
        .collect();
    let mut d1 = Vec::with_capacity(n);
    for &x in &xs {
        let v = f.deriv1(x);
        if !v.is_finite() {
            return Err(Error::Evaluation { what: "φ′", at: x });
        }
        d1.push(v);
    }
    let scale = d1.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let slack = 1e-9 * scale;

    let mut convex = true;
    let mut concave = true;
    for i in 0..n {
        for j in (i + 1)..n {
            let mid = 0.5 * (xs[i] + xs[j]);
            let dm = f.deriv1(mid);
            if !dm.is_finite() {
                return Err(Error::Evaluation { what: "φ′", at: mid });
            }
            let chord = 0.5 * (d1[i] + d1[j]);
            if dm > chord + slack {
                convex = false;
            }
            if dm < chord - slack {
                concave = false;
            }
        }
        if !convex && !concave {
            return Ok(PhiPrimeShape::Unknown);
        }
    }
    Ok(if convex {
        PhiPrimeShape::Convex
    } else if concave {
        PhiPrimeShape::Concave
    } else {
        PhiPrimeShape::Unknown
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central_diff(g: &dyn Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-5 * x.abs().max(1.0);
        (g(x + h) - g(x - h)) / (2.0 * h)
    }

    fn catalog_grid() -> Vec<CatalogKind> {
        let mut kinds = vec![
            CatalogKind::NegLog,
            CatalogKind::Quadratic { c2: 1.0, c1: 0.0, c0: 0.0 },
            CatalogKind::Quadratic { c2: -0.5, c1: 2.0, c0: 1.0 },
        ];
        for t in [0.5, -0.5, 1.0, -1.0, 2.0] {
            kinds.push(CatalogKind::ExpScaled { t });
        }
        for p in [-2.0, -1.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
            kinds.push(CatalogKind::Power { p });
        }
        kinds
    }

    fn probe_points(f: &FunctionSpec) -> Vec<f64> {
        if f.natural_domain().lower == 0.0 {
            (0..100).map(|i| 0.1 + 0.1 * i as f64).collect()
        } else {
            (0..100).map(|i| -5.0 + 0.1 * i as f64).collect()
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for kind in catalog_grid() {
            let f = make_catalog_function(kind).unwrap();
            for x in probe_points(&f) {
                let fd1 = central_diff(&|y| f.eval(y), x);
                let fd2 = central_diff(&|y| f.deriv1(y), x);
                let d1 = f.deriv1(x);
                let d2 = f.deriv2(x);
                assert!(
                    (fd1 - d1).abs() <= 1e-5 * d1.abs().max(1.0),
                    "{kind} φ′ at {x}: {fd1} vs {d1}"
                );
                assert!(
                    (fd2 - d2).abs() <= 1e-5 * d2.abs().max(1.0),
                    "{kind} φ″ at {x}: {fd2} vs {d2}"
                );
            }
        }
    }

    #[test]
    fn exp_scaled_half() {
        let f = make_catalog_function(CatalogKind::ExpScaled { t: 0.5 }).unwrap();
        assert_eq!(f.phi_prime_shape(), PhiPrimeShape::Convex);
        for x in [-2.0, 0.0, 1.0, 3.0] {
            assert!((f.deriv2(x) - 0.25 * (0.5 * x).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn quadratic_unit() {
        let f = make_catalog_function(CatalogKind::Quadratic { c2: 1.0, c1: 0.0, c0: 0.0 }).unwrap();
        assert_eq!(f.deriv2(-7.0), 2.0);
        assert_eq!(f.deriv2(123.0), 2.0);
        assert_eq!(f.natural_domain(), SupportInterval::real_line());
    }

    #[test]
    fn reciprocal_is_concave_on_positive_axis() {
        let f = make_catalog_function(CatalogKind::Power { p: -1.0 }).unwrap();
        assert_eq!(f.phi_prime_shape(), PhiPrimeShape::Concave);
        assert_eq!(f.natural_domain(), SupportInterval::positive_half_line());
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(
            make_catalog_function(CatalogKind::ExpScaled { t: 0.0 }),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            make_catalog_function(CatalogKind::Power { p: 0.0 }),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn classify_examples() {
        let f = make_catalog_function(CatalogKind::ExpScaled { t: 0.5 }).unwrap();
        let w = SupportInterval::closed(-5.0, 5.0).unwrap();
        assert_eq!(classify_phi_prime_shape(&f, &w, 32).unwrap(), PhiPrimeShape::Convex);

        let f = make_catalog_function(CatalogKind::NegLog).unwrap();
        let w = SupportInterval::closed(0.1, 10.0).unwrap();
        assert_eq!(classify_phi_prime_shape(&f, &w, 32).unwrap(), PhiPrimeShape::Concave);

        let f = FunctionSpec::custom(
            "neg-cos",
            |x: f64| -x.cos(),
            |x: f64| x.sin(),
            |x: f64| x.cos(),
            SupportInterval::real_line(),
            PhiPrimeShape::Unknown,
        );
        let w = SupportInterval::closed(0.0, 6.0).unwrap();
        assert_eq!(classify_phi_prime_shape(&f, &w, 32).unwrap(), PhiPrimeShape::Unknown);
    }

    #[test]
    fn classify_agrees_with_catalog_tags() {
        for kind in catalog_grid() {
            let f = make_catalog_function(kind).unwrap();
            let w = if f.natural_domain().lower == 0.0 {
                SupportInterval::closed(0.1, 10.0).unwrap()
            } else {
                SupportInterval::closed(-5.0, 5.0).unwrap()
            };
            let got = classify_phi_prime_shape(&f, &w, 32).unwrap();
            assert_eq!(got, f.phi_prime_shape(), "{kind}");
        }
    }

    #[test]
    fn classify_rejects_bad_inputs() {
        let f = make_catalog_function(CatalogKind::NegLog).unwrap();
        let w = SupportInterval::closed(0.1, 10.0).unwrap();
        assert!(classify_phi_prime_shape(&f, &w, 4).is_err());
        let outside = SupportInterval::closed(-1.0, 1.0).unwrap();
        assert!(matches!(
            classify_phi_prime_shape(&f, &outside, 16),
            Err(Error::Domain(_))
        ));
        let g = FunctionSpec::custom(
            "blowup",
            |x: f64| x,
            |x: f64| 1.0 / (x - 1.0),
            |x: f64| -1.0 / ((x - 1.0) * (x - 1.0)),
            SupportInterval::real_line(),
            PhiPrimeShape::Unknown,
        );
        let w = SupportInterval::closed(0.0, 2.0).unwrap();
        assert!(matches!(
            classify_phi_prime_shape(&g, &w, 9),
            Err(Error::Evaluation { .. })
        ));
    }

    #[test]
    fn probe_window_is_clamped_to_domain() {
        let f = make_catalog_function(CatalogKind::NegLog).unwrap();
        let w = default_probe_window(&f, 1.0, 1.0).unwrap();
        assert!(w.lower > 0.0 && w.upper == 9.0);
    }

    #[test]
    fn stable_h_matches_direct_formula_away_from_center() {
        for kind in catalog_grid() {
            let f = make_catalog_function(kind).unwrap();
            for x in probe_points(&f) {
                let nu = if f.natural_domain().lower == 0.0 { 3.0 } else { 0.7 };
                if (x - nu).abs() < 0.5 {
                    continue;
                }
                let d = x - nu;
                let direct = (f.eval(x) - f.eval(nu)) / (d * d) - f.deriv1(nu) / d;
                let stable = f.stable_h(nu, x).unwrap();
                assert!(
                    (direct - stable).abs() <= 1e-10 * direct.abs().max(1.0),
                    "{kind} at x={x}: {direct} vs {stable}"
                );
            }
        }
    }
}
