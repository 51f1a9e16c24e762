//! Values in `]-inf, +inf]`.
//!
//! `+inf` dominates every sum. Subtracting two infinite values is undefined
//! and reported as `None` rather than producing `NaN`.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    /// Panics on `NaN` or `-inf`, which are not members of the extended half-line.
    pub fn new(v: f64) -> ExtReal {
        assert!(!v.is_nan() && v != f64::NEG_INFINITY, "not an extended real: {v}");
        ExtReal(v)
    }

    pub fn finite(v: f64) -> ExtReal {
        assert!(v.is_finite(), "expected a finite value, got {v}");
        ExtReal(v)
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn value(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    /// Raw `f64`, with `+inf` for the sentinel.
    pub fn to_f64(self) -> f64 {
        self.0
    }

    /// `self - other`; `None` when both are infinite.
    pub fn checked_sub(self, other: ExtReal) -> Option<ExtReal> {
        match (self.is_finite(), other.is_finite()) {
            (_, true) => Some(ExtReal(self.0 - other.0)),
            (true, false) => None, // would be -inf
            (false, false) => None,
        }
    }

    pub fn sub_finite(self, v: f64) -> ExtReal {
        assert!(v.is_finite());
        ExtReal(self.0 - v)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        if !self.is_finite() || !rhs.is_finite() {
            ExtReal::INFINITY
        } else {
            ExtReal(self.0 + rhs.0)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "+inf")
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str("+inf")
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtReal::finite(v)),
            Raw::Str(s) if s == "+inf" || s == "inf" => Ok(ExtReal::INFINITY),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("invalid extended real `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_dominates_sums() {
        let a = ExtReal::finite(2.0);
        assert_eq!(a + ExtReal::finite(3.0), ExtReal::finite(5.0));
        assert_eq!(a + ExtReal::INFINITY, ExtReal::INFINITY);
        assert_eq!(ExtReal::INFINITY + ExtReal::INFINITY, ExtReal::INFINITY);
    }

    #[test]
    fn never_subtract_two_sentinels() {
        assert_eq!(ExtReal::INFINITY.checked_sub(ExtReal::INFINITY), None);
        assert_eq!(ExtReal::finite(1.0).checked_sub(ExtReal::INFINITY), None);
        assert_eq!(ExtReal::INFINITY.checked_sub(ExtReal::finite(1.0)), Some(ExtReal::INFINITY));
        assert_eq!(ExtReal::finite(1.0).checked_sub(ExtReal::finite(4.0)), Some(ExtReal::finite(-3.0)));
    }

    #[test]
    fn ordering_and_serde() {
        assert!(ExtReal::finite(1e300) < ExtReal::INFINITY);
        assert_eq!(serde_json::to_string(&ExtReal::INFINITY).unwrap(), "\"+inf\"");
        let v: ExtReal = serde_json::from_str("1.5").unwrap();
        assert_eq!(v.value(), Some(1.5));
    }

    #[test]
    #[should_panic]
    fn rejects_nan() {
        let _ = ExtReal::new(f64::NAN);
    }
}
