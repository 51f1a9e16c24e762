use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::space::EPS_NUM;

/// Closed primal regions usable in `Restrict`. The list is closed so that
/// closedness of a restricted graph is decided structurally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// Points with at most one nonzero coordinate.
    UnionOfAxes,
    /// `{ x : <normal, x> <= offset }`
    Halfspace { normal: Vec<f64>, offset: f64 },
}

impl Region {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Region::Box { lo, hi } => {
                check_dim(dim, lo.len())?;
                check_dim(dim, hi.len())?;
                if lo.iter().zip(hi).any(|(a, b)| a.partial_cmp(b).is_none_or(|o| o.is_gt())) {
                    return Err(Error::InvalidInput("box region has lo > hi".into()));
                }
            }
            Region::Ball { center, radius } => {
                check_dim(dim, center.len())?;
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(Error::InvalidInput("ball radius must be finite and >= 0".into()));
                }
            }
            Region::UnionOfAxes => {}
            Region::Halfspace { normal, offset } => {
                check_dim(dim, normal.len())?;
                if !offset.is_finite() || normal.iter().all(|a| *a == 0.0) {
                    return Err(Error::InvalidInput("halfspace needs a nonzero normal".into()));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = EPS_NUM;
        match self {
            Region::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *a - tol <= *v && *v <= *b + tol),
            Region::Ball { center, radius } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2.sqrt() <= radius + tol
            }
            Region::UnionOfAxes => x.iter().filter(|v| v.abs() > tol).count() <= 1,
            Region::Halfspace { normal, offset } => {
                crate::space::dot(normal, x) <= offset + tol
            }
        }
    }

    /// Intersection with a box, when the region is itself a box.
    pub(crate) fn intersect_box(&self, lo: &[f64], hi: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            Region::Box { lo: a, hi: b } => {
                let l: Vec<f64> = lo.iter().zip(a).map(|(u, v)| u.max(*v)).collect();
                let h: Vec<f64> = hi.iter().zip(b).map(|(u, v)| u.min(*v)).collect();
                Some((l, h))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_of_axes() {
        let r = Region::UnionOfAxes;
        assert!(r.contains(&[1.0, 0.0]));
        assert!(r.contains(&[0.0, -3.0]));
        assert!(r.contains(&[0.0, 0.0]));
        assert!(!r.contains(&[1.0, 1.0]));
    }

    #[test]
    fn other_regions() {
        let b = Region::Box { lo: vec![-1.0], hi: vec![1.0] };
        assert!(b.contains(&[1.0]) && !b.contains(&[1.1]));
        let ball = Region::Ball { center: vec![0.0, 0.0], radius: 1.0 };
        assert!(ball.contains(&[0.6, 0.8]) && !ball.contains(&[1.0, 1.0]));
        let h = Region::Halfspace { normal: vec![1.0, 1.0], offset: 0.0 };
        assert!(h.contains(&[-1.0, 1.0]) && !h.contains(&[1.0, 0.1]));
        assert!(Region::Box { lo: vec![1.0], hi: vec![0.0] }.validate(1).is_err());
    }
}
