//! Pointwise values `S(x)` and preimages `S^{-1}(y)` as finite unions of
//! polyhedral sets.

use super::spec::OperatorSpec;
use crate::convex::{ConvexFunction, ScalarForm};
use crate::error::{Error, Result};
use crate::space::{dot, Norm, Space, EPS_NUM};

/// A polyhedral subset of `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueSet {
    Point(Vec<f64>),
    /// Axis-aligned box; ends may be infinite.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Convex hull of at most `n` generators.
    Hull(Vec<Vec<f64>>),
    Minkowski(Box<ValueSet>, Box<ValueSet>),
}

fn clamp_interval(lo: f64, hi: f64, clamp: f64) -> (f64, f64) {
    let l = if lo.is_finite() { lo } else if hi.is_finite() { hi.min(0.0) - clamp } else { -clamp };
    let h = if hi.is_finite() { hi } else if lo.is_finite() { lo.max(0.0) + clamp } else { clamp };
    (l, h)
}

impl ValueSet {
    pub fn dim(&self) -> usize {
        match self {
            ValueSet::Point(p) => p.len(),
            ValueSet::Box { lo, .. } => lo.len(),
            ValueSet::Hull(g) => g[0].len(),
            ValueSet::Minkowski(a, _) => a.dim(),
        }
    }

    /// Number of `[0, 1]` parameters consumed by [`ValueSet::point_at`].
    pub fn param_dim(&self) -> usize {
        match self {
            ValueSet::Point(_) => 0,
            ValueSet::Box { lo, .. } => lo.len(),
            ValueSet::Hull(g) => g[0].len(),
            ValueSet::Minkowski(a, b) => a.param_dim() + b.param_dim(),
        }
    }

    /// Point of the set selected by `u in [0,1]^param_dim`; infinite box ends
    /// are cut off `clamp` away from the finite part.
    pub fn point_at(&self, u: &[f64], clamp: f64) -> Vec<f64> {
        match self {
            ValueSet::Point(p) => p.clone(),
            ValueSet::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .enumerate()
                .map(|(i, (&l, &h))| {
                    let (l, h) = clamp_interval(l, h, clamp);
                    let w = u.get(i).copied().unwrap_or(0.5).clamp(0.0, 1.0);
                    l + w * (h - l)
                })
                .collect(),
            ValueSet::Hull(g) => {
                let m = g.len();
                let w: Vec<f64> = (0..m).map(|i| u.get(i).copied().unwrap_or(1.0).clamp(0.0, 1.0)).collect();
                let total: f64 = w.iter().sum();
                let n = g[0].len();
                let mut out = vec![0.0; n];
                for (gi, wi) in g.iter().zip(&w) {
                    let wi = if total > 0.0 { wi / total } else { 1.0 / m as f64 };
                    for (o, v) in out.iter_mut().zip(gi) {
                        *o += wi * v;
                    }
                }
                out
            }
            ValueSet::Minkowski(a, b) => {
                let k = a.param_dim().min(u.len());
                let p = a.point_at(&u[..k], clamp);
                let q = b.point_at(&u[k..], clamp);
                p.iter().zip(&q).map(|(s, t)| s + t).collect()
            }
        }
    }

    /// Deterministic finite sample: vertices plus `per_edge` points along each
    /// box axis or hull edge.
    pub fn samples(&self, clamp: f64, per_edge: usize) -> Vec<Vec<f64>> {
        match self {
            ValueSet::Point(p) => vec![p.clone()],
            ValueSet::Box { lo, hi } => {
                let mut out: Vec<Vec<f64>> = vec![Vec::new()];
                for (&l, &h) in lo.iter().zip(hi) {
                    let (l, h) = clamp_interval(l, h, clamp);
                    let levels: Vec<f64> = if h > l {
                        (0..per_edge).map(|k| l + (h - l) * k as f64 / (per_edge - 1) as f64).collect()
                    } else {
                        vec![l]
                    };
                    out = out
                        .into_iter()
                        .flat_map(|p| {
                            levels.iter().map(move |&v| {
                                let mut q = p.clone();
                                q.push(v);
                                q
                            })
                        })
                        .collect();
                }
                out
            }
            ValueSet::Hull(g) => {
                let mut out = g.clone();
                for i in 0..g.len() {
                    for j in i + 1..g.len() {
                        for k in 1..per_edge - 1 {
                            let t = k as f64 / (per_edge - 1) as f64;
                            out.push(g[i].iter().zip(&g[j]).map(|(a, b)| a + t * (b - a)).collect());
                        }
                    }
                }
                out
            }
            ValueSet::Minkowski(a, b) => {
                let sa = a.samples(clamp, per_edge);
                let sb = b.samples(clamp, per_edge);
                sa.iter()
                    .flat_map(|p| sb.iter().map(move |q| p.iter().zip(q).map(|(s, t)| s + t).collect()))
                    .collect()
            }
        }
    }

    pub fn translate(self, v: &[f64]) -> ValueSet {
        let add = |p: Vec<f64>| p.iter().zip(v).map(|(a, b)| a + b).collect::<Vec<f64>>();
        match self {
            ValueSet::Point(p) => ValueSet::Point(add(p)),
            ValueSet::Box { lo, hi } => ValueSet::Box { lo: add(lo), hi: add(hi) },
            ValueSet::Hull(g) => ValueSet::Hull(g.into_iter().map(add).collect()),
            ValueSet::Minkowski(a, b) => ValueSet::Minkowski(Box::new(a.translate(v)), b),
        }
    }

    /// `factor * set` for `factor > 0`.
    pub fn scale(self, factor: f64) -> ValueSet {
        let mul = |p: Vec<f64>| p.iter().map(|a| a * factor).collect::<Vec<f64>>();
        match self {
            ValueSet::Point(p) => ValueSet::Point(mul(p)),
            ValueSet::Box { lo, hi } => ValueSet::Box { lo: mul(lo), hi: mul(hi) },
            ValueSet::Hull(g) => ValueSet::Hull(g.into_iter().map(mul).collect()),
            ValueSet::Minkowski(a, b) => ValueSet::Minkowski(Box::new(a.scale(factor)), Box::new(b.scale(factor))),
        }
    }

    pub fn minkowski(a: &ValueSet, b: &ValueSet) -> ValueSet {
        match (a, b) {
            (ValueSet::Point(p), other) | (other, ValueSet::Point(p)) => other.clone().translate(p),
            (ValueSet::Box { lo: l1, hi: h1 }, ValueSet::Box { lo: l2, hi: h2 }) => ValueSet::Box {
                lo: l1.iter().zip(l2).map(|(a, b)| a + b).collect(),
                hi: h1.iter().zip(h2).map(|(a, b)| a + b).collect(),
            },
            _ => ValueSet::Minkowski(Box::new(a.clone()), Box::new(b.clone())),
        }
    }

    /// Finite generator list of a bounded set.
    fn generators(&self) -> Result<Vec<Vec<f64>>> {
        match self {
            ValueSet::Point(p) => Ok(vec![p.clone()]),
            ValueSet::Box { lo, hi } => {
                if lo.iter().chain(hi).any(|v| !v.is_finite()) {
                    return Err(Error::UnsupportedComposition(
                        "Minkowski sum of an unbounded box with a hull".into(),
                    ));
                }
                Ok(self.samples(0.0, 2))
            }
            ValueSet::Hull(g) => Ok(g.clone()),
            ValueSet::Minkowski(a, b) => {
                let ga = a.generators()?;
                let gb = b.generators()?;
                Ok(ga.iter().flat_map(|p| gb.iter().map(move |q| p.iter().zip(q).map(|(s, t)| s + t).collect())).collect())
            }
        }
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> Result<bool> {
        match self {
            ValueSet::Point(p) => Ok(p.iter().zip(y).all(|(a, b)| (a - b).abs() <= tol)),
            ValueSet::Box { lo, hi } => {
                Ok(y.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| *l - tol <= *v && *v <= *h + tol))
            }
            ValueSet::Hull(g) => hull_contains(g, y, tol),
            ValueSet::Minkowski(..) => hull_contains(&self.generators()?, y, tol),
        }
    }
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn dist_to_segment(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    ((p[0] - a[0] - t * d[0]).powi(2) + (p[1] - a[1] - t * d[1]).powi(2)).sqrt()
}

/// Membership in the convex hull of `gens`, exact for dimensions 1 and 2.
fn hull_contains(gens: &[Vec<f64>], y: &[f64], tol: f64) -> Result<bool> {
    let n = y.len();
    let distinct = gens.iter().all(|g| g.iter().zip(&gens[0]).all(|(a, b)| (a - b).abs() <= tol));
    if distinct {
        return Ok(gens[0].iter().zip(y).all(|(a, b)| (a - b).abs() <= tol));
    }
    match n {
        1 => {
            let lo = gens.iter().map(|g| g[0]).fold(f64::INFINITY, f64::min);
            let hi = gens.iter().map(|g| g[0]).fold(f64::NEG_INFINITY, f64::max);
            Ok(lo - tol <= y[0] && y[0] <= hi + tol)
        }
        2 => {
            // Andrew's monotone chain
            let mut pts: Vec<&Vec<f64>> = gens.iter().collect();
            pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
            pts.dedup_by(|a, b| (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol);
            let mut hull: Vec<&Vec<f64>> = Vec::new();
            for pass in 0..2 {
                let start = hull.len();
                let iter: Box<dyn Iterator<Item = &&Vec<f64>>> =
                    if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
                for p in iter {
                    while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                        hull.pop();
                    }
                    hull.push(p);
                }
                hull.pop();
            }
            if hull.len() <= 2 {
                let (a, b) = (hull[0], hull[hull.len() - 1]);
                return Ok(dist_to_segment(y, a, b) <= tol);
            }
            for i in 0..hull.len() {
                let a = hull[i];
                let b = hull[(i + 1) % hull.len()];
                if cross(a, b, y) < 0.0 && dist_to_segment(y, a, b) > tol {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Err(Error::UnsupportedComposition(format!(
            "hull membership in dimension {n} (only 1 and 2 are decided exactly)"
        ))),
    }
}

pub(crate) fn tol_for(y: &[f64]) -> f64 {
    EPS_NUM * (1.0 + y.iter().fold(0.0f64, |m, a| m.max(a.abs())))
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `J_p(x)` for `1 < p < inf`.
pub(crate) fn smooth_duality(p: f64, x: &[f64]) -> Vec<f64> {
    let n = Norm::P(p).eval(x);
    if n == 0.0 {
        return vec![0.0; x.len()];
    }
    // |x|^{2-p} |x_i|^{p-1} sign(x_i) = |x| (|x_i| / |x|)^{p-1} sign(x_i)
    x.iter().map(|&t| n * (t.abs() / n).powf(p - 1.0) * sign(t)).collect()
}

/// The duality map value `J(x)` of `(R^n, |.|)`.
pub(crate) fn duality_values(sp: &Space, x: &[f64]) -> ValueSet {
    match sp.norm {
        Norm::L2 => ValueSet::Point(x.to_vec()),
        Norm::P(p) => ValueSet::Point(smooth_duality(p, x)),
        Norm::L1 => {
            let n = Norm::L1.eval(x);
            if n == 0.0 {
                return ValueSet::Point(vec![0.0; x.len()]);
            }
            let lo = x.iter().map(|&t| if t == 0.0 { -n } else { n * sign(t) }).collect();
            let hi = x.iter().map(|&t| if t == 0.0 { n } else { n * sign(t) }).collect();
            ValueSet::Box { lo, hi }
        }
        Norm::LInf => {
            let n = Norm::LInf.eval(x);
            if n == 0.0 {
                return ValueSet::Point(vec![0.0; x.len()]);
            }
            let gens: Vec<Vec<f64>> = x
                .iter()
                .enumerate()
                .filter(|(_, t)| t.abs() >= n * (1.0 - 1e-12))
                .map(|(i, &t)| {
                    let mut e = vec![0.0; x.len()];
                    e[i] = n * sign(t);
                    e
                })
                .collect();
            if gens.len() == 1 {
                ValueSet::Point(gens.into_iter().next().unwrap())
            } else {
                ValueSet::Hull(gens)
            }
        }
    }
}

fn is_smooth(f: &ConvexFunction) -> bool {
    matches!(f.form, ScalarForm::HalfSquare | ScalarForm::Polynomial { .. })
}

fn boxed(ivs: Vec<(f64, f64)>) -> ValueSet {
    if ivs.iter().all(|(a, b)| a == b) {
        ValueSet::Point(ivs.into_iter().map(|(a, _)| a).collect())
    } else {
        let (lo, hi) = ivs.into_iter().unzip();
        ValueSet::Box { lo, hi }
    }
}

fn solve_linear(matrix: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let mut a: Vec<Vec<f64>> = matrix.iter().zip(rhs).map(|(r, b)| {
        let mut row = r.clone();
        row.push(*b);
        row
    }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        let pivot = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot[col];
                for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

pub(crate) fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Number of `[0,1]` parameters needed to reach any point of `S(x)`.
pub(crate) fn value_param_dim(spec: &OperatorSpec) -> Result<usize> {
    Ok(match spec {
        OperatorSpec::ExplicitGraph { .. }
        | OperatorSpec::Affine { .. }
        | OperatorSpec::Gradient(_)
        | OperatorSpec::Zero { .. } => 0,
        OperatorSpec::Subdifferential(f) => {
            if is_smooth(f) {
                0
            } else {
                f.dim
            }
        }
        OperatorSpec::DualityMap(sp) => match sp.norm {
            Norm::L2 | Norm::P(_) => 0,
            Norm::L1 | Norm::LInf => sp.dim,
        },
        OperatorSpec::Inverse(s) => preimage_param_dim(s)?,
        OperatorSpec::Translate { inner, .. }
        | OperatorSpec::Restrict { inner, .. }
        | OperatorSpec::Scale { inner, .. } => value_param_dim(inner)?,
        OperatorSpec::Sum(a, b) => value_param_dim(a)? + value_param_dim(b)?,
        OperatorSpec::ParallelSum(..) => {
            return Err(Error::UnsupportedComposition("pointwise values of a parallel sum".into()))
        }
    })
}

pub(crate) fn preimage_param_dim(spec: &OperatorSpec) -> Result<usize> {
    Ok(match spec {
        OperatorSpec::ExplicitGraph { .. } | OperatorSpec::Affine { .. } => 0,
        OperatorSpec::Zero { dim } => *dim,
        OperatorSpec::Gradient(_) => {
            return Err(Error::UnsupportedComposition("preimages of a gradient operator".into()))
        }
        OperatorSpec::Subdifferential(f) => f.dim,
        OperatorSpec::DualityMap(sp) => value_param_dim(&OperatorSpec::DualityMap(sp.dual()))?,
        OperatorSpec::Inverse(s) => value_param_dim(s)?,
        OperatorSpec::Translate { inner, .. }
        | OperatorSpec::Restrict { inner, .. }
        | OperatorSpec::Scale { inner, .. } => preimage_param_dim(inner)?,
        OperatorSpec::Sum(..) => {
            return Err(Error::UnsupportedComposition("preimages of a sum".into()))
        }
        OperatorSpec::ParallelSum(a, b) => preimage_param_dim(a)? + preimage_param_dim(b)?,
    })
}

/// Upper bound on the number of distinct value sets `S(x)` is split into.
pub(crate) fn value_branches(spec: &OperatorSpec) -> usize {
    match spec {
        OperatorSpec::ExplicitGraph { points } => {
            let mut best = 1;
            for p in points {
                let c = points.iter().filter(|q| q.x == p.x).count();
                best = best.max(c);
            }
            best
        }
        OperatorSpec::Inverse(s) => preimage_branches(s),
        OperatorSpec::Translate { inner, .. }
        | OperatorSpec::Restrict { inner, .. }
        | OperatorSpec::Scale { inner, .. } => value_branches(inner),
        OperatorSpec::Sum(a, b) => value_branches(a) * value_branches(b),
        _ => 1,
    }
}

fn preimage_branches(spec: &OperatorSpec) -> usize {
    match spec {
        OperatorSpec::ExplicitGraph { points } => {
            let mut best = 1;
            for p in points {
                best = best.max(points.iter().filter(|q| q.xstar == p.xstar).count());
            }
            best
        }
        OperatorSpec::Inverse(s) => value_branches(s),
        OperatorSpec::Translate { inner, .. }
        | OperatorSpec::Restrict { inner, .. }
        | OperatorSpec::Scale { inner, .. } => preimage_branches(inner),
        OperatorSpec::ParallelSum(a, b) => preimage_branches(a) * preimage_branches(b),
        _ => 1,
    }
}

/// `S(x)` as a union of polyhedral sets (empty when `x` is off the domain).
pub(crate) fn values(spec: &OperatorSpec, x: &[f64]) -> Result<Vec<ValueSet>> {
    Ok(match spec {
        OperatorSpec::ExplicitGraph { points } => {
            let tol = tol_for(x);
            points
                .iter()
                .filter(|p| p.x.iter().zip(x).all(|(a, b)| (a - b).abs() <= tol))
                .map(|p| ValueSet::Point(p.xstar.clone()))
                .collect()
        }
        OperatorSpec::Affine { matrix, offset } => {
            let v = mat_vec(matrix, x).iter().zip(offset).map(|(a, b)| a + b).collect();
            vec![ValueSet::Point(v)]
        }
        OperatorSpec::Gradient(f) => f.gradient(x).map(ValueSet::Point).into_iter().collect(),
        OperatorSpec::Zero { dim } => vec![ValueSet::Point(vec![0.0; *dim])],
        OperatorSpec::Subdifferential(f) => match f.subgradient(x) {
            None => vec![],
            Some(ivs) => {
                let set = boxed(ivs);
                // keep parameter counts stable for set-valued forms
                if !is_smooth(f) {
                    if let ValueSet::Point(p) = set {
                        vec![ValueSet::Box { lo: p.clone(), hi: p }]
                    } else {
                        vec![set]
                    }
                } else {
                    vec![set]
                }
            }
        },
        OperatorSpec::DualityMap(sp) => vec![duality_values(sp, x)],
        OperatorSpec::Inverse(s) => preimage(s, x)?,
        OperatorSpec::Translate { inner, by } => {
            let shifted: Vec<f64> = x.iter().zip(by).map(|(a, b)| a + b).collect();
            values(inner, &shifted)?
        }
        OperatorSpec::Scale { inner, factor } => {
            values(inner, x)?.into_iter().map(|v| v.scale(*factor)).collect()
        }
        OperatorSpec::Restrict { inner, region } => {
            if region.contains(x) {
                values(inner, x)?
            } else {
                vec![]
            }
        }
        OperatorSpec::Sum(a, b) => {
            let va = values(a, x)?;
            let vb = values(b, x)?;
            va.iter().flat_map(|p| vb.iter().map(move |q| ValueSet::minkowski(p, q))).collect()
        }
        OperatorSpec::ParallelSum(..) => {
            return Err(Error::UnsupportedComposition("pointwise values of a parallel sum".into()))
        }
    })
}

/// `S^{-1}(y)` as a union of polyhedral sets.
pub(crate) fn preimage(spec: &OperatorSpec, y: &[f64]) -> Result<Vec<ValueSet>> {
    Ok(match spec {
        OperatorSpec::ExplicitGraph { points } => {
            let tol = tol_for(y);
            points
                .iter()
                .filter(|p| p.xstar.iter().zip(y).all(|(a, b)| (a - b).abs() <= tol))
                .map(|p| ValueSet::Point(p.x.clone()))
                .collect()
        }
        OperatorSpec::Affine { matrix, offset } => {
            let rhs: Vec<f64> = y.iter().zip(offset).map(|(a, b)| a - b).collect();
            match solve_linear(matrix, &rhs) {
                Some(x) => vec![ValueSet::Point(x)],
                None => return Err(Error::UnsupportedComposition("preimage of a singular affine map".into())),
            }
        }
        OperatorSpec::Zero { dim } => {
            if y.iter().all(|v| v.abs() <= tol_for(y)) {
                vec![ValueSet::Box { lo: vec![f64::NEG_INFINITY; *dim], hi: vec![f64::INFINITY; *dim] }]
            } else {
                vec![]
            }
        }
        OperatorSpec::Gradient(_) => {
            return Err(Error::UnsupportedComposition("preimages of a gradient operator".into()))
        }
        OperatorSpec::Subdifferential(f) => match f.inverse_subgradient(y) {
            None => vec![],
            Some(ivs) => {
                let set = boxed(ivs);
                match set {
                    ValueSet::Point(p) => vec![ValueSet::Box { lo: p.clone(), hi: p }],
                    other => vec![other],
                }
            }
        },
        OperatorSpec::DualityMap(sp) => vec![duality_values(&sp.dual(), y)],
        OperatorSpec::Inverse(s) => values(s, y)?,
        OperatorSpec::Translate { inner, by } => {
            let neg: Vec<f64> = by.iter().map(|v| -v).collect();
            preimage(inner, y)?.into_iter().map(|v| v.translate(&neg)).collect()
        }
        OperatorSpec::Scale { inner, factor } => {
            let scaled: Vec<f64> = y.iter().map(|v| v / factor).collect();
            preimage(inner, &scaled)?
        }
        OperatorSpec::Restrict { inner, region } => {
            let mut out = Vec::new();
            for set in preimage(inner, y)? {
                match &set {
                    ValueSet::Point(p) => {
                        if region.contains(p) {
                            out.push(set);
                        }
                    }
                    ValueSet::Box { lo, hi } if lo == hi => {
                        if region.contains(lo) {
                            out.push(set);
                        }
                    }
                    ValueSet::Box { lo, hi } => match region.intersect_box(lo, hi) {
                        Some((l, h)) => {
                            if l.iter().zip(&h).all(|(a, b)| a <= b) {
                                out.push(ValueSet::Box { lo: l, hi: h });
                            }
                        }
                        None => {
                            return Err(Error::UnsupportedComposition(
                                "preimage of a restriction to a non-box region".into(),
                            ))
                        }
                    },
                    _ => {
                        return Err(Error::UnsupportedComposition(
                            "preimage of a restriction with set-valued preimages".into(),
                        ))
                    }
                }
            }
            out
        }
        OperatorSpec::Sum(..) => return Err(Error::UnsupportedComposition("preimages of a sum".into())),
        OperatorSpec::ParallelSum(a, b) => {
            let pa = preimage(a, y)?;
            let pb = preimage(b, y)?;
            pa.iter().flat_map(|p| pb.iter().map(move |q| ValueSet::minkowski(p, q))).collect()
        }
    })
}

/// Structural graph membership.
pub(crate) fn contains_spec(spec: &OperatorSpec, x: &[f64], y: &[f64]) -> Result<bool> {
    let tol = tol_for(y).max(tol_for(x));
    Ok(match spec {
        OperatorSpec::Subdifferential(f) => f.subgradient_contains(x, y),
        OperatorSpec::DualityMap(sp) => duality_contains(sp, x, y),
        OperatorSpec::Inverse(s) => contains_spec(s, y, x)?,
        OperatorSpec::Translate { inner, by } => {
            let shifted: Vec<f64> = x.iter().zip(by).map(|(a, b)| a + b).collect();
            contains_spec(inner, &shifted, y)?
        }
        OperatorSpec::Scale { inner, factor } => {
            let scaled: Vec<f64> = y.iter().map(|v| v / factor).collect();
            contains_spec(inner, x, &scaled)?
        }
        OperatorSpec::Restrict { inner, region } => region.contains(x) && contains_spec(inner, x, y)?,
        OperatorSpec::ParallelSum(..) => {
            let mut hit = false;
            for set in preimage(spec, y)? {
                if set.contains(x, tol)? {
                    hit = true;
                    break;
                }
            }
            hit
        }
        _ => {
            let mut hit = false;
            for set in values(spec, x)? {
                if set.contains(y, tol)? {
                    hit = true;
                    break;
                }
            }
            hit
        }
    })
}

/// `|x|^2 = |x*|_*^2 = <x, x*>` within tolerance.
pub(crate) fn duality_contains(sp: &Space, x: &[f64], xstar: &[f64]) -> bool {
    let a = sp.norm.eval(x).powi(2);
    let b = sp.norm.dual().eval(xstar).powi(2);
    let c = dot(x, xstar);
    let tol = EPS_NUM * (1.0 + a.max(b));
    (a - c).abs() <= tol && (b - c).abs() <= tol
}
