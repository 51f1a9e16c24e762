use serde::{Deserialize, Serialize};

use super::region::Region;
use crate::convex::{ConvexFunction, ScalarForm};
use crate::error::{Error, Result};
use crate::space::{PairPoint, Space};

/// Smooth scalar forms whose gradient is taken coordinatewise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothForm {
    /// `sum_k c_k t^k`, not necessarily convex.
    Polynomial { coefficients: Vec<f64> },
    /// `ln|t| - t^2/2` on `t != 0`; gradient `1/t - t`.
    LogAbsMinusHalfSquare,
}

/// `f(x) = sum_i form(x_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothFunction {
    pub dim: usize,
    pub form: SmoothForm,
}

impl SmoothFunction {
    pub fn polynomial(coefficients: Vec<f64>) -> SmoothFunction {
        SmoothFunction { dim: 1, form: SmoothForm::Polynomial { coefficients } }
    }

    /// Coordinatewise derivative, `None` off the domain.
    pub fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        match &self.form {
            SmoothForm::Polynomial { coefficients } => Some(
                x.iter()
                    .map(|&t| {
                        coefficients
                            .iter()
                            .enumerate()
                            .skip(1)
                            .rev()
                            .fold(0.0, |acc, (k, c)| acc * t + k as f64 * c)
                    })
                    .collect(),
            ),
            SmoothForm::LogAbsMinusHalfSquare => {
                if x.contains(&0.0) {
                    None
                } else {
                    Some(x.iter().map(|&t| 1.0 / t - t).collect())
                }
            }
        }
    }
}

/// Algebraic description of a set-valued operator `S: R^n => R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorSpec {
    /// A finite graph, taken as given.
    ExplicitGraph { points: Vec<PairPoint> },
    /// `x -> { A x + b }`
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    Gradient(SmoothFunction),
    Subdifferential(ConvexFunction),
    DualityMap(Space),
    Zero { dim: usize },
    Inverse(Box<OperatorSpec>),
    /// `t -> S(t + by)`
    Translate { inner: Box<OperatorSpec>, by: Vec<f64> },
    Sum(Box<OperatorSpec>, Box<OperatorSpec>),
    /// `(S^{-1} + T^{-1})^{-1}`
    ParallelSum(Box<OperatorSpec>, Box<OperatorSpec>),
    Restrict { inner: Box<OperatorSpec>, region: Region },
    /// `x -> factor * S(x)`
    Scale { inner: Box<OperatorSpec>, factor: f64 },
}

fn at(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{path}: {msg}"))
}

impl OperatorSpec {
    pub fn identity(dim: usize) -> OperatorSpec {
        OperatorSpec::Subdifferential(ConvexFunction::half_square(dim))
    }

    pub fn subdifferential(form: ScalarForm, dim: usize) -> OperatorSpec {
        OperatorSpec::Subdifferential(ConvexFunction { dim, form })
    }

    pub fn inverse(self) -> OperatorSpec {
        OperatorSpec::Inverse(Box::new(self))
    }

    pub fn sum(self, other: OperatorSpec) -> OperatorSpec {
        OperatorSpec::Sum(Box::new(self), Box::new(other))
    }

    pub fn parallel_sum(self, other: OperatorSpec) -> OperatorSpec {
        OperatorSpec::ParallelSum(Box::new(self), Box::new(other))
    }

    pub fn restrict(self, region: Region) -> OperatorSpec {
        OperatorSpec::Restrict { inner: Box::new(self), region }
    }

    pub fn scale(self, factor: f64) -> OperatorSpec {
        OperatorSpec::Scale { inner: Box::new(self), factor }
    }

    /// Checks internal consistency; returns the dimension. Errors carry a
    /// dotted path to the offending node.
    pub fn validate(&self, path: &str) -> Result<usize> {
        match self {
            OperatorSpec::ExplicitGraph { points } => {
                let first = points.first().ok_or_else(|| at(path, "explicit graph must be nonempty"))?;
                let n = first.x.len();
                if n == 0 {
                    return Err(at(path, "points must have dimension >= 1"));
                }
                for (i, p) in points.iter().enumerate() {
                    if p.x.len() != n || p.xstar.len() != n {
                        return Err(at(&format!("{path}.points[{i}]"), format!("expected dimension {n}")));
                    }
                    if p.x.iter().chain(&p.xstar).any(|v| !v.is_finite()) {
                        return Err(at(&format!("{path}.points[{i}]"), "entries must be finite"));
                    }
                }
                Ok(n)
            }
            OperatorSpec::Affine { matrix, offset } => {
                let n = offset.len();
                if n == 0 || matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
                    return Err(at(path, "matrix must be square and match the offset length"));
                }
                if matrix.iter().flatten().chain(offset).any(|v| !v.is_finite()) {
                    return Err(at(path, "entries must be finite"));
                }
                Ok(n)
            }
            OperatorSpec::Gradient(f) => {
                if f.dim == 0 {
                    return Err(at(path, "dimension must be >= 1"));
                }
                if let SmoothForm::Polynomial { coefficients } = &f.form {
                    if coefficients.iter().any(|c| !c.is_finite()) {
                        return Err(at(path, "coefficients must be finite"));
                    }
                }
                Ok(f.dim)
            }
            OperatorSpec::Subdifferential(f) => {
                f.validate().map_err(|e| at(path, e))?;
                Ok(f.dim)
            }
            OperatorSpec::DualityMap(sp) => {
                if sp.dim == 0 {
                    return Err(at(path, "dimension must be >= 1"));
                }
                Ok(sp.dim)
            }
            OperatorSpec::Zero { dim } => {
                if *dim == 0 {
                    return Err(at(path, "dimension must be >= 1"));
                }
                Ok(*dim)
            }
            OperatorSpec::Inverse(s) => s.validate(&format!("{path}.inverse")),
            OperatorSpec::Translate { inner, by } => {
                let n = inner.validate(&format!("{path}.translate.inner"))?;
                if by.len() != n || by.iter().any(|v| !v.is_finite()) {
                    return Err(at(&format!("{path}.translate.by"), format!("expected {n} finite entries")));
                }
                Ok(n)
            }
            OperatorSpec::Sum(a, b) | OperatorSpec::ParallelSum(a, b) => {
                let tag = if matches!(self, OperatorSpec::Sum(..)) { "sum" } else { "parallel_sum" };
                let n = a.validate(&format!("{path}.{tag}[0]"))?;
                let m = b.validate(&format!("{path}.{tag}[1]"))?;
                if n != m {
                    return Err(at(path, format!("summands have dimensions {n} and {m}")));
                }
                Ok(n)
            }
            OperatorSpec::Restrict { inner, region } => {
                let n = inner.validate(&format!("{path}.restrict.inner"))?;
                region.validate(n).map_err(|e| at(&format!("{path}.restrict.region"), e))?;
                Ok(n)
            }
            OperatorSpec::Scale { inner, factor } => {
                let n = inner.validate(&format!("{path}.scale.inner"))?;
                if !(factor.is_finite() && *factor > 0.0) {
                    return Err(at(&format!("{path}.scale.factor"), "factor must be > 0"));
                }
                Ok(n)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            OperatorSpec::ExplicitGraph { points } => points.first().map_or(0, |p| p.x.len()),
            OperatorSpec::Affine { offset, .. } => offset.len(),
            OperatorSpec::Gradient(f) => f.dim,
            OperatorSpec::Subdifferential(f) => f.dim,
            OperatorSpec::DualityMap(sp) => sp.dim,
            OperatorSpec::Zero { dim } => *dim,
            OperatorSpec::Inverse(s) => s.dim(),
            OperatorSpec::Translate { inner, .. }
            | OperatorSpec::Restrict { inner, .. }
            | OperatorSpec::Scale { inner, .. } => inner.dim(),
            OperatorSpec::Sum(a, _) | OperatorSpec::ParallelSum(a, _) => a.dim(),
        }
    }

    /// Short human-readable description used as sample provenance.
    pub fn describe(&self) -> String {
        match self {
            OperatorSpec::ExplicitGraph { points } => format!("graph[{}]", points.len()),
            OperatorSpec::Affine { .. } => "affine".into(),
            OperatorSpec::Gradient(f) => match &f.form {
                SmoothForm::Polynomial { coefficients } => format!("grad poly{coefficients:?}"),
                SmoothForm::LogAbsMinusHalfSquare => "grad(ln|t| - t^2/2)".into(),
            },
            OperatorSpec::Subdifferential(f) => format!("subdiff {:?}", f.form),
            OperatorSpec::DualityMap(sp) => format!("J(l^{})", sp.norm.exponent()),
            OperatorSpec::Zero { .. } => "0".into(),
            OperatorSpec::Inverse(s) => format!("({})^-1", s.describe()),
            OperatorSpec::Translate { inner, by } => format!("translate({}, {by:?})", inner.describe()),
            OperatorSpec::Sum(a, b) => format!("({} + {})", a.describe(), b.describe()),
            OperatorSpec::ParallelSum(a, b) => format!("({} # {})", a.describe(), b.describe()),
            OperatorSpec::Restrict { inner, region } => format!("{}|{region:?}", inner.describe()),
            OperatorSpec::Scale { inner, factor } => format!("{factor} * {}", inner.describe()),
        }
    }
}

/// An operator together with the normed space it acts on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Operator {
    pub space: Space,
    #[serde(rename = "operator")]
    pub spec: OperatorSpec,
}

impl Operator {
    pub fn new(space: Space, spec: OperatorSpec) -> Result<Operator> {
        let n = spec.validate("operator")?;
        if n != space.dim {
            return Err(Error::DimensionMismatch { expected: space.dim, got: n });
        }
        Ok(Operator { space, spec })
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }
}
