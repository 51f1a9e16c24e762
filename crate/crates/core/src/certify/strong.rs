//! Strong maximality: monotone relations against compact convex sets given
//! by vertex lists.

use serde::{Deserialize, Serialize};

use super::monotone::{require_monotone, Screen};
use super::{CertParams, CertReport, PropertyTag, Verdict, Witness};
use crate::error::{check_dim, Result};
use crate::nelder_mead::{minimize_with_restarts, Options};
use crate::operators::{values_at, Operator, OperatorSpec, ValueSet};
use crate::space::{PairPoint, EPS_NUM};

/// Which space the polytope lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// A point `w` of `E` against a polytope in `E*`.
    Dual,
    /// A point `w*` of `E*` against a polytope in `E`.
    Primal,
}

/// A point and a polytope `conv(vertices)` on the opposite side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongInstance {
    pub side: Side,
    pub point: Vec<f64>,
    pub vertices: Vec<Vec<f64>>,
}

/// Premise: `max over v of <s - w, s* - v> >= 0` for every graph point.
fn premise_holds(screen: &Screen, w: &[f64], vertices: &[Vec<f64>], params: &CertParams) -> bool {
    let score = |p: &PairPoint| -> f64 {
        vertices
            .iter()
            .map(|v| {
                p.x.iter().zip(w).zip(p.xstar.iter().zip(v)).map(|((a, b), (c, d))| (a - b) * (c - d)).sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut scored: Vec<(f64, usize)> = Vec::with_capacity(screen.seeds.len());
    for (i, s) in screen.seeds.iter().enumerate() {
        let v = score(&s.point);
        if v < -params.eps_num {
            return false;
        }
        scored.push((v, i));
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let opts = Options { max_iter: params.max_iter, target: -params.eps_num, ..Options::default() };
    scored.iter().take(params.seeds).all(|&(_, i)| screen.model.refine(&screen.seeds[i], score, opts).0 >= -params.eps_num)
}

fn hull_point(vertices: &[Vec<f64>], lambda: &[f64]) -> Vec<f64> {
    let total: f64 = lambda.iter().sum();
    let m = vertices.len() as f64;
    let mut out = vec![0.0; vertices[0].len()];
    for (v, l) in vertices.iter().zip(lambda) {
        let w = if total > 0.0 { l / total } else { 1.0 / m };
        for (o, a) in out.iter_mut().zip(v) {
            *o += w * a;
        }
    }
    out
}

/// `V meets conv(vertices)`, by vertex membership then local distance
/// minimization over both parametrizations.
fn meets(set: &ValueSet, vertices: &[Vec<f64>], clamp: f64) -> bool {
    let tol = 1e-7;
    if vertices.iter().any(|v| set.contains(v, EPS_NUM * (1.0 + v.iter().fold(0.0f64, |m, a| m.max(a.abs())))).unwrap_or(false)) {
        return true;
    }
    let pd = set.param_dim();
    let m = vertices.len();
    let dist = |z: &[f64]| -> f64 {
        let p = set.point_at(&z[..pd], clamp);
        let q = hull_point(vertices, &z[pd..]);
        p.iter().zip(&q).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()))
    };
    let z0 = vec![0.5; pd + m];
    let bounds = vec![(0.0, 1.0); pd + m];
    let step = vec![0.25; pd + m];
    let best = minimize_with_restarts(dist, &z0, &bounds, &step, Options { target: tol, max_iter: 400, ..Options::default() }, 4);
    best.value <= tol
}

/// For each instance whose premise holds on the graph, checks that the
/// operator's value at the point meets the polytope; fails at the first
/// instance where it does not.
pub fn strong_maximality_check(
    op: &Operator,
    instances: &[StrongInstance],
    radius: f64,
    params: &CertParams,
) -> Result<CertReport> {
    require_monotone(op, radius, params)?;
    let inverse = Operator { space: op.space.dual(), spec: OperatorSpec::Inverse(Box::new(op.spec.clone())) };
    let primal = Screen::new(op, radius, params)?;
    let dual = Screen::new(&inverse, radius, params)?;
    let mut vacuous = 0usize;
    for (k, inst) in instances.iter().enumerate() {
        check_dim(op.dim(), inst.point.len())?;
        for v in &inst.vertices {
            check_dim(op.dim(), v.len())?;
        }
        let (subject, screen) = match inst.side {
            Side::Dual => (op, &primal),
            Side::Primal => (&inverse, &dual),
        };
        if inst.vertices.is_empty() || !premise_holds(screen, &inst.point, &inst.vertices, params) {
            vacuous += 1;
            continue;
        }
        let sets = values_at(subject, &inst.point)?;
        if !sets.iter().any(|s| meets(s, &inst.vertices, radius)) {
            return Ok(CertReport::new(PropertyTag::StronglyMaximal, Verdict::Fail, params)
                .with_witness(Witness::Instance { instance: inst.clone() })
                .examined(k + 1));
        }
    }
    let report = CertReport::new(PropertyTag::StronglyMaximal, Verdict::Pass, params).examined(instances.len());
    Ok(if vacuous == instances.len() {
        report.note("no instance satisfied its premise")
    } else {
        report
    })
}

/// Unit boxes around a value of the operator at `{-1, 0, 1}^n` (origin only
/// for `n > 3`), on both sides.
pub fn default_instances(op: &Operator) -> Vec<StrongInstance> {
    let n = op.dim();
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    if n <= 3 {
        for _ in 0..n {
            points = points
                .into_iter()
                .flat_map(|p| {
                    [-1.0, 0.0, 1.0].into_iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
    } else {
        points = vec![vec![0.0; n]];
    }
    let corners = |c: &[f64]| -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = vec![Vec::new()];
        for &ci in c {
            out = out
                .into_iter()
                .flat_map(|p| {
                    [ci - 0.5, ci + 0.5].into_iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    };
    let inverse = Operator { space: op.space.dual(), spec: OperatorSpec::Inverse(Box::new(op.spec.clone())) };
    let mut out = Vec::new();
    for (side, subject) in [(Side::Dual, op), (Side::Primal, &inverse)] {
        for w in &points {
            let center = values_at(subject, w)
                .ok()
                .and_then(|sets| sets.first().map(|s| s.point_at(&vec![0.5; s.param_dim()], 1.0)))
                .unwrap_or_else(|| vec![0.0; n]);
            out.push(StrongInstance { side, point: w.clone(), vertices: corners(&center) });
        }
    }
    out
}
