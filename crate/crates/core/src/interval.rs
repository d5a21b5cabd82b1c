//! Support intervals over the extended real line.
//!
//! Endpoints are `f64` values where `±INFINITY` stands for an unbounded side.
//! An infinite endpoint is always open.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportInterval {
    pub lower: f64,
    pub upper: f64,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl SupportInterval {
    pub fn new(lower: f64, upper: f64, lower_closed: bool, upper_closed: bool) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() {
            return Err(Error::InvalidParameter("interval endpoint is NaN".into()));
        }
        if (lower.is_infinite() && lower_closed) || (upper.is_infinite() && upper_closed) {
            return Err(Error::InvalidParameter(
                "an infinite endpoint cannot be closed".into(),
            ));
        }
        if lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!(
                "interval ({lower}, {upper}) is empty"
            )));
        }
        // A single point is allowed only as a closed degenerate interval.
        let degenerate_ok = lower == upper && lower_closed && upper_closed;
        if !(lower < upper || degenerate_ok) {
            return Err(Error::InvalidParameter(format!(
                "interval lower {lower} must be below upper {upper}"
            )));
        }
        Ok(Self {
            lower,
            upper,
            lower_closed,
            upper_closed,
        })
    }

    pub fn open(lower: f64, upper: f64) -> Result<Self> {
        Self::new(lower, upper, false, false)
    }

    pub fn closed(lower: f64, upper: f64) -> Result<Self> {
        Self::new(lower, upper, true, true)
    }

    /// Left-closed, right-open; an infinite left end stays open.
    pub fn left_closed(lower: f64, upper: f64) -> Result<Self> {
        Self::new(lower, upper, lower.is_finite(), false)
    }

    pub fn real_line() -> Self {
        Self {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            lower_closed: false,
            upper_closed: false,
        }
    }

    pub fn positive_half_line() -> Self {
        Self {
            lower: 0.0,
            upper: f64::INFINITY,
            lower_closed: false,
            upper_closed: false,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lower_closed {
            x >= self.lower
        } else {
            x > self.lower
        };
        let below = if self.upper_closed {
            x <= self.upper
        } else {
            x < self.upper
        };
        above && below
    }

    /// Whether `self` is a subset of `other`, honoring open/closed ends.
    pub fn is_subset_of(&self, other: &SupportInterval) -> bool {
        let lower_ok = self.lower > other.lower
            || (self.lower == other.lower && (!self.lower_closed || other.lower_closed));
        let upper_ok = self.upper < other.upper
            || (self.upper == other.upper && (!self.upper_closed || other.upper_closed));
        lower_ok && upper_ok
    }

    pub fn intersect(&self, other: &SupportInterval) -> Option<SupportInterval> {
        let (lower, lower_closed) = if self.lower > other.lower {
            (self.lower, self.lower_closed)
        } else if self.lower < other.lower {
            (other.lower, other.lower_closed)
        } else {
            (self.lower, self.lower_closed && other.lower_closed)
        };
        let (upper, upper_closed) = if self.upper < other.upper {
            (self.upper, self.upper_closed)
        } else if self.upper > other.upper {
            (other.upper, other.upper_closed)
        } else {
            (self.upper, self.upper_closed && other.upper_closed)
        };
        SupportInterval::new(lower, upper, lower_closed, upper_closed).ok()
    }
}

impl serde::Serialize for SupportInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SupportInterval", 4)?;
        st.serialize_field("lower", &ExtReal(self.lower))?;
        st.serialize_field("upper", &ExtReal(self.upper))?;
        st.serialize_field("lower_closed", &self.lower_closed)?;
        st.serialize_field("upper_closed", &self.upper_closed)?;
        st.end()
    }
}

impl fmt::Display for SupportInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lower_closed { '[' } else { '(' };
        let close = if self.upper_closed { ']' } else { ')' };
        write!(f, "{open}{}, {}{close}", self.lower, self.upper)
    }
}

/// Product used when a bound factor may be infinite: a zero variance wins over
/// an infinite curvature factor.
pub fn ext_mul(factor: f64, variance: f64) -> f64 {
    if variance == 0.0 || factor == 0.0 {
        0.0
    } else {
        factor * variance
    }
}

/// Sum of extended reals where `+inf + -inf` cannot be resolved.
pub fn ext_sum<I: IntoIterator<Item = f64>>(terms: I) -> Result<f64> {
    let mut total = 0.0;
    let mut saw_pos_inf = false;
    let mut saw_neg_inf = false;
    for t in terms {
        if t == f64::INFINITY {
            saw_pos_inf = true;
        } else if t == f64::NEG_INFINITY {
            saw_neg_inf = true;
        } else if t.is_nan() {
            return Err(Error::Numeric("NaN term in bound sum".into()));
        } else {
            total += t;
        }
    }
    match (saw_pos_inf, saw_neg_inf) {
        (true, true) => Err(Error::Numeric(
            "bound sum mixes +inf and -inf terms".into(),
        )),
        (true, false) => Ok(f64::INFINITY),
        (false, true) => Ok(f64::NEG_INFINITY),
        (false, false) => Ok(total),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_closed_infinite_end() {
        assert!(SupportInterval::new(0.0, f64::INFINITY, true, true).is_err());
        assert!(SupportInterval::new(0.0, f64::INFINITY, true, false).is_ok());
    }

    #[test]
    fn rejects_reversed_and_open_point() {
        assert!(SupportInterval::open(1.0, 0.0).is_err());
        assert!(SupportInterval::open(1.0, 1.0).is_err());
        assert!(SupportInterval::closed(1.0, 1.0).unwrap().is_degenerate());
    }

    #[test]
    fn subset_respects_closedness() {
        let open = SupportInterval::open(0.0, 1.0).unwrap();
        let closed = SupportInterval::closed(0.0, 1.0).unwrap();
        assert!(open.is_subset_of(&closed));
        assert!(!closed.is_subset_of(&open));
        assert!(closed.is_subset_of(&SupportInterval::real_line()));
    }

    #[test]
    fn left_closed_cells() {
        let c = SupportInterval::left_closed(1.0, 3.0).unwrap();
        assert!(c.contains(1.0));
        assert!(!c.contains(3.0));
        let tail = SupportInterval::left_closed(f64::NEG_INFINITY, 0.0).unwrap();
        assert!(!tail.lower_closed);
    }

    #[test]
    fn ext_real_json() {
        let v = serde_json::to_string(&[ExtReal(1.5), ExtReal(f64::INFINITY), ExtReal(f64::NEG_INFINITY)]).unwrap();
        assert_eq!(v, r#"[1.5,"inf","-inf"]"#);
        assert_eq!(format!("{:.3}", ExtReal(0.17564)), "0.176");
    }

    #[test]
    fn zero_variance_beats_infinity() {
        assert_eq!(ext_mul(f64::INFINITY, 0.0), 0.0);
        assert_eq!(ext_mul(f64::INFINITY, 2.0), f64::INFINITY);
        assert_eq!(ext_sum([1.0, f64::INFINITY]).unwrap(), f64::INFINITY);
        assert!(ext_sum([f64::NEG_INFINITY, f64::INFINITY]).is_err());
    }
}

/// Serializes an extended real as a JSON number, or `"inf"` / `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtReal(pub f64);

impl serde::Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            f.write_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            f.write_str("-inf")
        } else if let Some(p) = f.precision() {
            write!(f, "{:.*}", p, self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}
