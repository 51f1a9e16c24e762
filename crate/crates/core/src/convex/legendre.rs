//! Discrete Legendre transform in linear time and Fenchel-equality membership.

use serde::{Deserialize, Serialize};

use super::function::{ConvexFunction, ScalarForm};
use crate::error::{check_dim, Error, Result};
use crate::space::{PairPoint, EPS_NUM};

/// Uniform grid `lo, lo + step, ..., hi` on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1 {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Grid1 {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Grid1> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi && step.is_finite() && step > 0.0) {
            return Err(Error::InvalidInput(format!("bad grid [{lo}, {hi}] with step {step}")));
        }
        Ok(Grid1 { lo, hi, step })
    }

    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `lo + k * step`, computed as a ratio of integers when `1/step` is an
    /// integer so that nodes like `0` and `1` are hit exactly.
    pub fn point(&self, k: usize) -> f64 {
        let inv = 1.0 / self.step;
        if (inv - inv.round()).abs() < 1e-9 && (self.lo * inv - (self.lo * inv).round()).abs() < 1e-6 {
            ((self.lo * inv).round() + k as f64) / inv.round()
        } else {
            self.lo + k as f64 * self.step
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }
}

/// Lower convex hull of `(x_i, v_i)` with increasing `x_i`, as indices.
fn lower_hull(xs: &[f64], vs: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or above the chord a -> i
            let lhs = (vs[b] - vs[a]) * (xs[i] - xs[a]);
            let rhs = (vs[i] - vs[a]) * (xs[b] - xs[a]);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// `max_i (x_i y - v_i)` for every sorted `y`, with the maximizing index.
fn llt(xs: &[f64], vs: &[f64], ys: &[f64]) -> Vec<(f64, usize)> {
    let hull = lower_hull(xs, vs);
    let slope = |k: usize| (vs[hull[k + 1]] - vs[hull[k]]) / (xs[hull[k + 1]] - xs[hull[k]]);
    let mut k = 0;
    ys.iter()
        .map(|&y| {
            while k + 1 < hull.len() && slope(k) < y {
                k += 1;
            }
            let i = hull[k];
            (xs[i] * y - vs[i], i)
        })
        .collect()
}

fn scalar_form(f: &ConvexFunction) -> Result<&ScalarForm> {
    f.validate()?;
    Ok(&f.form)
}

/// Discrete Legendre transform `f*(y) = max_x (x y - f(x))` over the finite
/// nodes of `primal`, tabulated on `dual`.
///
/// A dual node is dropped (`f* = +inf` there) when the maximizer sits on the
/// end of the primal grid and `y` lies strictly beyond the last hull slope: the
/// supremum is then still growing at the truncation. The result is a
/// [`ScalarForm::GridSampled`] on the remaining nodes.
pub fn conjugate(f: &ConvexFunction, primal: &Grid1, dual: &Grid1) -> Result<ConvexFunction> {
    let form = scalar_form(f)?;
    let (xs, vs): (Vec<f64>, Vec<f64>) = primal
        .points()
        .into_iter()
        .map(|x| (x, form.value(x)))
        .filter(|(_, v)| v.is_finite())
        .unzip();
    if xs.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let ys = dual.points();
    let last = primal.len() - 1;
    let first_x = primal.point(0);
    let last_x = primal.point(last);
    let hull = lower_hull(&xs, &vs);
    let (lo_slope, hi_slope) = if hull.len() >= 2 {
        let s = |a: usize, b: usize| (vs[b] - vs[a]) / (xs[b] - xs[a]);
        (s(hull[0], hull[1]), s(hull[hull.len() - 2], hull[hull.len() - 1]))
    } else {
        (f64::NEG_INFINITY, f64::INFINITY)
    };
    let mut points = Vec::new();
    let mut values = Vec::new();
    for (&y, (v, i)) in ys.iter().zip(llt(&xs, &vs, &ys)) {
        let at_hi = xs[i] == last_x && y > hi_slope;
        let at_lo = xs[i] == first_x && y < lo_slope;
        if hull.len() >= 2 && (at_hi || at_lo) {
            continue;
        }
        if hull.len() == 1 && (xs[i] == last_x && last_x != first_x || xs[i] == first_x && last_x != first_x) {
            continue;
        }
        points.push(y);
        values.push(v);
    }
    if points.is_empty() {
        return Err(Error::EmptyDomain);
    }
    ConvexFunction::new(f.dim, ScalarForm::GridSampled { points, values })
}

/// Exact conjugate of the piecewise-linear interpolant of a grid form.
fn pl_conjugate(points: &[f64], values: &[f64], y: f64) -> f64 {
    points.iter().zip(values).map(|(x, v)| x * y - v).fold(f64::NEG_INFINITY, f64::max)
}

/// `x* in df(x)`, decided by the Fenchel equality `f(x) + f*(x*) = <x, x*>`.
///
/// Closed-form structure is used for named and polynomial forms; grid forms use
/// the exact conjugate of their interpolant with a tolerance of `eps_num` plus
/// the squared grid resolution.
pub fn subdifferential_contains(f: &ConvexFunction, pp: &PairPoint) -> Result<bool> {
    check_dim(f.dim, pp.x.len())?;
    check_dim(f.dim, pp.xstar.len())?;
    match &f.form {
        ScalarForm::GridSampled { points, values } => {
            let h = f.form.grid_resolution();
            for (&x, &y) in pp.x.iter().zip(&pp.xstar) {
                let fx = f.form.value(x);
                if !fx.is_finite() {
                    return Ok(false);
                }
                let gap = fx + pl_conjugate(points, values, y) - x * y;
                let tol = EPS_NUM * (1.0 + fx.abs() + (x * y).abs()) + h * h;
                if gap > tol {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Ok(f.subgradient_contains(&pp.x, &pp.xstar)),
    }
}
