//! Finite-dimensional real normed spaces `(R^n, |.|_p)` and their duals.
//!
//! The dual of `(R^n, |.|_p)` is represented in the same coordinates with the
//! conjugate exponent `q`, `1/p + 1/q = 1`. Coordinates are shared; norms never are.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, Error, Result};

/// Absolute tolerance for identities that should hold exactly up to rounding.
/// All corpus values are O(1), so one global scale suffices.
pub const EPS_NUM: f64 = 1e-9;

/// Largest finite exponent accepted for a general `l^p` norm. Power sums with
/// larger exponents overflow or lose all precision.
pub const MAX_FINITE_P: f64 = 64.0;

/// Norm family on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    L1,
    L2,
    LInf,
    /// General `l^p` with `1 < p < inf`, `p != 2`.
    P(f64),
}

impl Norm {
    pub fn from_exponent(p: f64) -> Result<Norm> {
        if p == f64::INFINITY {
            return Ok(Norm::LInf);
        }
        if !p.is_finite() || !(1.0..=MAX_FINITE_P).contains(&p) {
            return Err(Error::InvalidExponent(p));
        }
        Ok(if p == 1.0 {
            Norm::L1
        } else if p == 2.0 {
            Norm::L2
        } else {
            Norm::P(p)
        })
    }

    pub fn exponent(self) -> f64 {
        match self {
            Norm::L1 => 1.0,
            Norm::L2 => 2.0,
            Norm::LInf => f64::INFINITY,
            Norm::P(p) => p,
        }
    }

    /// Conjugate exponent norm, with `dual(1) = inf` and `dual(inf) = 1`.
    pub fn dual(self) -> Norm {
        match self {
            Norm::L1 => Norm::LInf,
            Norm::LInf => Norm::L1,
            Norm::L2 => Norm::L2,
            Norm::P(p) => {
                let q = p / (p - 1.0);
                // q may land on 2 only when p did; keep the family canonical
                if q == 2.0 {
                    Norm::L2
                } else {
                    Norm::P(q)
                }
            }
        }
    }

    pub fn eval(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|a| a.abs()).sum(),
            Norm::L2 => v.iter().map(|a| a * a).sum::<f64>().sqrt(),
            Norm::LInf => v.iter().fold(0.0, |m, a| m.max(a.abs())),
            Norm::P(p) => {
                // scale by the largest entry so the power sum stays in range
                let m = v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
                if m == 0.0 {
                    return 0.0;
                }
                m * v.iter().map(|a| (a.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
            }
        }
    }
}

impl Serialize for Norm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Norm::LInf => s.serialize_str("inf"),
            other => s.serialize_f64(other.exponent()),
        }
    }
}

impl<'de> Deserialize<'de> for Norm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        let p = match Raw::deserialize(d)? {
            Raw::Num(p) => p,
            Raw::Str(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => f64::INFINITY,
            Raw::Str(s) => return Err(serde::de::Error::custom(format!("invalid exponent `{s}`"))),
        };
        Norm::from_exponent(p).map_err(serde::de::Error::custom)
    }
}

/// `(R^dim, |.|_p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Space {
    pub dim: usize,
    #[serde(rename = "p")]
    pub norm: Norm,
}

impl Space {
    pub fn new(dim: usize, p: f64) -> Result<Space> {
        if dim == 0 {
            return Err(Error::InvalidInput("space dimension must be at least 1".into()));
        }
        Ok(Space { dim, norm: Norm::from_exponent(p)? })
    }

    pub fn l1(dim: usize) -> Space {
        Space { dim, norm: Norm::L1 }
    }

    pub fn l2(dim: usize) -> Space {
        Space { dim, norm: Norm::L2 }
    }

    pub fn linf(dim: usize) -> Space {
        Space { dim, norm: Norm::LInf }
    }

    pub fn dual(&self) -> Space {
        Space { dim: self.dim, norm: self.norm.dual() }
    }

    pub fn is_hilbert(&self) -> bool {
        self.norm == Norm::L2
    }

    pub fn check(&self, v: &[f64]) -> Result<()> {
        check_dim(self.dim, v.len())?;
        if v.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("vector entries must be finite".into()));
        }
        Ok(())
    }

    pub fn norm(&self, v: &[f64]) -> Result<f64> {
        self.check(v)?;
        Ok(self.norm.eval(v))
    }

    /// Norm of `v` regarded as an element of the dual space.
    pub fn dual_norm(&self, v: &[f64]) -> Result<f64> {
        self.check(v)?;
        Ok(self.norm.dual().eval(v))
    }

    /// `sqrt(|x|^2 + |x*|_*^2)`.
    pub fn product_norm(&self, pp: &PairPoint) -> Result<f64> {
        let a = self.norm(&pp.x)?;
        let b = self.dual_norm(&pp.xstar)?;
        Ok(a.hypot(b))
    }
}

/// Duality pairing `<x, x*> = sum_i x_i x*_i`.
pub fn pairing(x: &[f64], xstar: &[f64]) -> Result<f64> {
    check_dim(x.len(), xstar.len())?;
    Ok(dot(x, xstar))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// A point `(x, x*)` of `E x E*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairPoint {
    pub x: Vec<f64>,
    pub xstar: Vec<f64>,
}

impl PairPoint {
    pub fn new(x: Vec<f64>, xstar: Vec<f64>) -> PairPoint {
        PairPoint { x, xstar }
    }

    /// One-dimensional convenience constructor.
    pub fn scalar(x: f64, xstar: f64) -> PairPoint {
        PairPoint { x: vec![x], xstar: vec![xstar] }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn swapped(&self) -> PairPoint {
        PairPoint { x: self.xstar.clone(), xstar: self.x.clone() }
    }

    pub fn pairing(&self) -> f64 {
        dot(&self.x, &self.xstar)
    }

    pub fn check(&self, sp: &Space) -> Result<()> {
        sp.check(&self.x)?;
        sp.check(&self.xstar)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_of_the_two_axes_example() {
        assert_eq!(Space::l1(2).norm(&[1.0, -1.0]).unwrap(), 2.0);
        assert_eq!(Space::linf(2).norm(&[-3.0, 2.0]).unwrap(), 3.0);
        for sp in [Space::l1(3), Space::l2(3), Space::linf(3), Space::new(3, 3.5).unwrap()] {
            assert_eq!(sp.norm(&[0.0; 3]).unwrap(), 0.0);
        }
    }

    #[test]
    fn pairing_examples() {
        for t in [-1.0, -0.3, 0.0, 1.0] {
            assert_eq!(pairing(&[1.0, 0.0], &[1.0, t]).unwrap(), 1.0);
        }
        assert_eq!(pairing(&[0.0, 0.0], &[5.0, -7.0]).unwrap(), 0.0);
        assert_eq!(pairing(&[1.0, 1.0], &[2.0, 2.0]).unwrap(), 4.0);
        assert!(matches!(pairing(&[1.0], &[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn product_norm_examples() {
        let sp = Space::l2(1);
        assert_eq!(sp.product_norm(&PairPoint::scalar(0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(sp.product_norm(&PairPoint::scalar(3.0, 4.0)).unwrap(), 5.0);
        let sp = Space::l1(2);
        let v = sp.product_norm(&PairPoint::new(vec![1.0, 1.0], vec![1.0, 0.0])).unwrap();
        assert!((v - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exponent_guard() {
        assert!(Space::new(2, 0.5).is_err());
        assert!(Space::new(2, 65.0).is_err());
        assert!(Space::new(2, f64::NAN).is_err());
        assert!(Space::new(0, 2.0).is_err());
        assert_eq!(Space::new(2, f64::INFINITY).unwrap().norm, Norm::LInf);
        assert_eq!(Space::new(2, 64.0).unwrap().norm, Norm::P(64.0));
    }

    #[test]
    fn dual_is_an_involution() {
        for p in [1.0, 1.5, 2.0, 3.0, 64.0, f64::INFINITY] {
            let sp = Space::new(4, p).unwrap();
            let dd = sp.dual().dual();
            assert_eq!(dd.dim, sp.dim);
            assert!((dd.norm.exponent() - sp.norm.exponent()).abs() < 1e-12 || p.is_infinite());
        }
        assert_eq!(Space::l1(2).dual().norm, Norm::LInf);
        assert_eq!(Space::linf(2).dual().norm, Norm::L1);
    }

    #[test]
    fn dual_norm_is_attained_on_a_dense_unit_sphere_grid() {
        // for |v|_* = 1 in 2-D, sup over |w| = 1 of <w, v> should approach 1
        for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            let sp = Space::new(2, p).unwrap();
            let v = [0.6, -0.8];
            let dn = sp.dual_norm(&v).unwrap();
            let v: Vec<f64> = v.iter().map(|a| a / dn).collect();
            let mut best = f64::NEG_INFINITY;
            for k in 0..20_000 {
                let t = k as f64 / 20_000.0 * std::f64::consts::TAU;
                let w = [t.cos(), t.sin()];
                let n = sp.norm(&w).unwrap();
                best = best.max(dot(&[w[0] / n, w[1] / n], &v));
            }
            assert!((best - 1.0).abs() < 1e-4, "p={p} best={best}");
        }
    }

    #[test]
    fn norm_serde_accepts_inf() {
        let sp: Space = serde_json::from_str(r#"{"dim":2,"p":"inf"}"#).unwrap();
        assert_eq!(sp, Space::linf(2));
        assert_eq!(serde_json::to_string(&sp).unwrap(), r#"{"dim":2,"p":"inf"}"#);
        let sp: Space = serde_json::from_str(r#"{"dim":1,"p":1.0}"#).unwrap();
        assert_eq!(sp.norm, Norm::L1);
        assert!(serde_json::from_str::<Space>(r#"{"dim":1,"p":0.2}"#).is_err());
    }
}
