//! Proper convex lower semicontinuous functions on `R^n` that are separable:
//! `f(x) = sum_i g(x_i)` for one scalar form `g`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::space::EPS_NUM;

/// A closed interval `[lo, hi]` with possibly infinite ends.
pub type Interval = (f64, f64);

/// Scalar proper convex lsc function `g: R -> ]-inf, inf]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarForm {
    /// `sum_k c_k t^k`; must be convex on `R`.
    Polynomial { coefficients: Vec<f64> },
    /// `t^2 / 2`
    HalfSquare,
    /// `|t|`
    Abs,
    /// `0` on `[lo, hi]`, `+inf` elsewhere.
    BoxIndicator { lo: f64, hi: f64 },
    /// `max(lo * t, hi * t)`, the support function of `[lo, hi]`.
    BoxSupport { lo: f64, hi: f64 },
    /// Piecewise-linear interpolation of `(points, values)`, `+inf` outside the hull.
    GridSampled { points: Vec<f64>, values: Vec<f64> },
}

/// `f(x) = sum_i form(x_i)` on `R^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexFunction {
    pub dim: usize,
    pub form: ScalarForm,
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect()
}

fn trimmed(c: &[f64]) -> &[f64] {
    let mut n = c.len();
    while n > 0 && c[n - 1] == 0.0 {
        n -= 1;
    }
    &c[..n]
}

/// Solve `h(t) = y` for nondecreasing continuous `h` that is unbounded both ways.
fn solve_increasing(h: impl Fn(f64) -> f64, y: f64) -> f64 {
    let (mut lo, mut hi) = (-1.0, 1.0);
    while h(lo) > y {
        lo *= 2.0;
    }
    while h(hi) < y {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn contains(iv: Interval, y: f64, tol: f64) -> bool {
    iv.0 - tol <= y && y <= iv.1 + tol
}

impl ScalarForm {
    pub fn quartic_quarter() -> ScalarForm {
        ScalarForm::Polynomial { coefficients: vec![0.0, 0.0, 0.0, 0.0, 0.25] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarForm::Polynomial { coefficients } => {
                if coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidInput("polynomial coefficients must be finite".into()));
                }
                let second = derivative(&derivative(trimmed(coefficients)));
                let second = trimmed(&second);
                if second.len().is_multiple_of(2) && !second.is_empty() {
                    return Err(Error::NotConvex("second derivative has odd degree".into()));
                }
                if let Some(&lead) = second.last() {
                    if lead < 0.0 {
                        return Err(Error::NotConvex("negative leading curvature".into()));
                    }
                }
                for k in 0..=4000 {
                    let t = -100.0 + 0.05 * k as f64;
                    let v = horner(second, t);
                    if v < -EPS_NUM * (1.0 + t.abs().powi(second.len() as i32)) {
                        return Err(Error::NotConvex(format!("second derivative {v} < 0 at t = {t}")));
                    }
                }
                Ok(())
            }
            ScalarForm::HalfSquare | ScalarForm::Abs => Ok(()),
            ScalarForm::BoxIndicator { lo, hi } | ScalarForm::BoxSupport { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(Error::InvalidInput(format!("box [{lo}, {hi}] must be finite and nonempty")));
                }
                Ok(())
            }
            ScalarForm::GridSampled { points, values } => {
                if points.is_empty() {
                    return Err(Error::EmptyDomain);
                }
                if points.len() != values.len() {
                    return Err(Error::InvalidInput(format!(
                        "grid has {} points but {} values",
                        points.len(),
                        values.len()
                    )));
                }
                if points.iter().chain(values).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("grid points and values must be finite".into()));
                }
                if points.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidInput("grid points must be strictly increasing".into()));
                }
                let slopes = grid_slopes(points, values);
                for (k, w) in slopes.windows(2).enumerate() {
                    let tol = 1e-9 * (1.0 + w[0].abs().max(w[1].abs()));
                    if w[1] < w[0] - tol {
                        return Err(Error::NotConvex(format!(
                            "midpoint test fails at grid point {} (slopes {} then {})",
                            points[k + 1],
                            w[0],
                            w[1]
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Effective-domain hull `[lo, hi]`.
    pub fn domain(&self) -> Interval {
        match self {
            ScalarForm::BoxIndicator { lo, hi } => (*lo, *hi),
            ScalarForm::GridSampled { points, .. } => (points[0], points[points.len() - 1]),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            ScalarForm::Polynomial { coefficients } => horner(coefficients, t),
            ScalarForm::HalfSquare => 0.5 * t * t,
            ScalarForm::Abs => t.abs(),
            ScalarForm::BoxIndicator { lo, hi } => {
                if *lo <= t && t <= *hi {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ScalarForm::BoxSupport { lo, hi } => (lo * t).max(hi * t),
            ScalarForm::GridSampled { points, values } => {
                let n = points.len();
                if t < points[0] || t > points[n - 1] {
                    return f64::INFINITY;
                }
                if n == 1 {
                    return values[0];
                }
                let k = points.partition_point(|&p| p <= t).clamp(1, n - 1);
                let (x0, x1) = (points[k - 1], points[k]);
                let w = (t - x0) / (x1 - x0);
                values[k - 1] + w * (values[k] - values[k - 1])
            }
        }
    }

    /// `dg(t)`, or `None` when `t` is outside the domain.
    pub fn subgradient(&self, t: f64) -> Option<Interval> {
        let inf = f64::INFINITY;
        match self {
            ScalarForm::Polynomial { coefficients } => {
                let d = horner(&derivative(coefficients), t);
                Some((d, d))
            }
            ScalarForm::HalfSquare => Some((t, t)),
            ScalarForm::Abs => Some(if t > 0.0 {
                (1.0, 1.0)
            } else if t < 0.0 {
                (-1.0, -1.0)
            } else {
                (-1.0, 1.0)
            }),
            ScalarForm::BoxIndicator { lo, hi } => {
                if t < *lo || t > *hi {
                    None
                } else {
                    let left = if t == *lo { -inf } else { 0.0 };
                    let right = if t == *hi { inf } else { 0.0 };
                    Some((left, right))
                }
            }
            ScalarForm::BoxSupport { lo, hi } => Some(if t > 0.0 {
                (*hi, *hi)
            } else if t < 0.0 {
                (*lo, *lo)
            } else {
                (*lo, *hi)
            }),
            ScalarForm::GridSampled { points, values } => {
                let n = points.len();
                if t < points[0] || t > points[n - 1] {
                    return None;
                }
                let slopes = grid_slopes(points, values);
                // index of the first node >= t
                let k = points.partition_point(|&p| p < t);
                if k < n && points[k] == t {
                    let left = if k == 0 { -inf } else { slopes[k - 1] };
                    let right = if k == n - 1 { inf } else { slopes[k] };
                    Some((left, right))
                } else {
                    let s = slopes[k - 1];
                    Some((s, s))
                }
            }
        }
    }

    /// `dg*(y) = { t : y in dg(t) }`, or `None` when empty.
    pub fn inverse_subgradient(&self, y: f64) -> Option<Interval> {
        let inf = f64::INFINITY;
        match self {
            ScalarForm::Polynomial { coefficients } => {
                let c = trimmed(coefficients);
                if c.len() <= 2 {
                    let slope = c.get(1).copied().unwrap_or(0.0);
                    return (y == slope).then_some((-inf, inf));
                }
                let d = derivative(c);
                let t = solve_increasing(|t| horner(&d, t), y);
                Some((t, t))
            }
            ScalarForm::HalfSquare => Some((y, y)),
            ScalarForm::Abs => {
                if y.abs() < 1.0 {
                    Some((0.0, 0.0))
                } else if y == 1.0 {
                    Some((0.0, inf))
                } else if y == -1.0 {
                    Some((-inf, 0.0))
                } else {
                    None
                }
            }
            ScalarForm::BoxIndicator { lo, hi } => Some(if y > 0.0 {
                (*hi, *hi)
            } else if y < 0.0 {
                (*lo, *lo)
            } else {
                (*lo, *hi)
            }),
            ScalarForm::BoxSupport { lo, hi } => {
                if y < *lo || y > *hi {
                    None
                } else {
                    let left = if y == *lo { -inf } else { 0.0 };
                    let right = if y == *hi { inf } else { 0.0 };
                    Some((left, right))
                }
            }
            ScalarForm::GridSampled { points, values } => {
                let n = points.len();
                if n == 1 {
                    return Some((points[0], points[0]));
                }
                let slopes = grid_slopes(points, values);
                // node k carries [slopes[k-1], slopes[k]], segment k carries slopes[k]
                for k in 0..n {
                    let left = if k == 0 { -inf } else { slopes[k - 1] };
                    let right = if k == n - 1 { inf } else { slopes[k] };
                    if y < left {
                        break;
                    }
                    if y == right && k < n - 1 {
                        // flat piece: the whole segment, possibly more
                        let mut end = k + 1;
                        while end < n - 1 && slopes[end] == y {
                            end += 1;
                        }
                        return Some((points[k], points[end]));
                    }
                    if y <= right {
                        return Some((points[k], points[k]));
                    }
                }
                None
            }
        }
    }

    /// Resolvent `(I + dg)^{-1}(theta)`: the unique `t` with `theta - t in dg(t)`.
    pub fn prox(&self, theta: f64) -> f64 {
        match self {
            ScalarForm::HalfSquare => 0.5 * theta,
            ScalarForm::Abs => theta.signum() * (theta.abs() - 1.0).max(0.0),
            ScalarForm::BoxIndicator { lo, hi } => theta.clamp(*lo, *hi),
            ScalarForm::BoxSupport { lo, hi } => theta - theta.clamp(*lo, *hi),
            ScalarForm::Polynomial { coefficients } => {
                let d = derivative(coefficients);
                solve_increasing(|t| t + horner(&d, t), theta)
            }
            ScalarForm::GridSampled { points, .. } => {
                let (mut lo, mut hi) = (points[0], points[points.len() - 1]);
                if lo == hi {
                    return lo;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let (a, b) = self.subgradient(mid).expect("inside the hull");
                    if mid + b < theta {
                        lo = mid;
                    } else if mid + a > theta {
                        hi = mid;
                    } else {
                        return mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// Largest node spacing for grid forms; zero otherwise.
    pub fn grid_resolution(&self) -> f64 {
        match self {
            ScalarForm::GridSampled { points, .. } => {
                points.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
            }
            _ => 0.0,
        }
    }
}

pub(crate) fn grid_slopes(points: &[f64], values: &[f64]) -> Vec<f64> {
    points
        .windows(2)
        .zip(values.windows(2))
        .map(|(p, v)| (v[1] - v[0]) / (p[1] - p[0]))
        .collect()
}

impl ConvexFunction {
    pub fn new(dim: usize, form: ScalarForm) -> Result<ConvexFunction> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        form.validate()?;
        Ok(ConvexFunction { dim, form })
    }

    /// `|x|^2 / 2` (Euclidean).
    pub fn half_square(dim: usize) -> ConvexFunction {
        ConvexFunction { dim, form: ScalarForm::HalfSquare }
    }

    /// `|x|_1`
    pub fn abs(dim: usize) -> ConvexFunction {
        ConvexFunction { dim, form: ScalarForm::Abs }
    }

    pub fn quartic(dim: usize) -> ConvexFunction {
        ConvexFunction { dim, form: ScalarForm::quartic_quarter() }
    }

    pub fn box_indicator(dim: usize, lo: f64, hi: f64) -> Result<ConvexFunction> {
        ConvexFunction::new(dim, ScalarForm::BoxIndicator { lo, hi })
    }

    pub fn grid(points: Vec<f64>, values: Vec<f64>) -> Result<ConvexFunction> {
        ConvexFunction::new(1, ScalarForm::GridSampled { points, values })
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        self.form.validate()
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(x.iter().map(|&t| self.form.value(t)).sum())
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        let (lo, hi) = self.form.domain();
        x.iter().all(|&t| lo <= t && t <= hi)
    }

    /// `df(x)` as a box, or `None` off the domain.
    pub fn subgradient(&self, x: &[f64]) -> Option<Vec<Interval>> {
        x.iter().map(|&t| self.form.subgradient(t)).collect()
    }

    /// `df*(y)` as a box, or `None` when empty.
    pub fn inverse_subgradient(&self, y: &[f64]) -> Option<Vec<Interval>> {
        y.iter().map(|&t| self.form.inverse_subgradient(t)).collect()
    }

    pub fn prox(&self, theta: &[f64]) -> Vec<f64> {
        theta.iter().map(|&t| self.form.prox(t)).collect()
    }

    /// Structural membership `x* in df(x)` with tolerance scaled by magnitude.
    /// Per coordinate, `y` may be near `dg(t)` or `t` near `dg^{-1}(y)`, so a
    /// point a rounding error off a kink is still accepted.
    pub(crate) fn subgradient_contains(&self, x: &[f64], xstar: &[f64]) -> bool {
        x.len() == xstar.len()
            && x.iter().zip(xstar).all(|(&t, &y)| {
                let forward = self.form.subgradient(t).is_some_and(|iv| contains(iv, y, EPS_NUM * (1.0 + y.abs())));
                forward
                    || self.form.inverse_subgradient(y).is_some_and(|iv| contains(iv, t, EPS_NUM * (1.0 + t.abs())))
            })
    }
}
