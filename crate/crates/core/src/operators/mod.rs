//! Set-valued operators `S: R^n => R^n`: primitives, combinators, graph
//! membership and deterministic graph sampling.

mod model;
mod region;
mod spec;
mod values;

use serde::{Deserialize, Serialize};

pub(crate) use model::{GraphModel, Seed};
pub use region::Region;
pub use spec::{Operator, OperatorSpec, SmoothForm, SmoothFunction};
pub use values::ValueSet;

use crate::error::{check_dim, Error, Result};
use crate::space::{Norm, PairPoint, Space};

/// Graph points of an operator inside a product-norm ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSample {
    /// Sorted lexicographically, without duplicates.
    pub points: Vec<PairPoint>,
    pub radius: f64,
    pub density: f64,
    pub provenance: String,
}

/// Default grid budget per chart for [`sample_graph`].
pub const SAMPLE_BUDGET: usize = 4096;

/// `pp in G(S)` up to the numeric tolerance, decided structurally.
pub fn contains(op: &Operator, pp: &PairPoint) -> Result<bool> {
    pp.check(&op.space)?;
    values::contains_spec(&op.spec, &pp.x, &pp.xstar)
}

/// `|x|^2 = |x*|_*^2 = <x, x*>` within tolerance.
pub fn duality_map_contains(sp: &Space, x: &[f64], xstar: &[f64]) -> Result<bool> {
    sp.check(x)?;
    sp.check(xstar)?;
    Ok(values::duality_contains(sp, x, xstar))
}

/// Finite subset of `J(x)` containing every extreme point.
pub fn duality_map_select(sp: &Space, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    sp.check(x)?;
    if let Norm::P(p) = sp.norm {
        Norm::from_exponent(p)?;
    }
    Ok(match values::duality_values(sp, x) {
        ValueSet::Point(p) => vec![p],
        ValueSet::Box { lo, hi } => ValueSet::Box { lo, hi }.samples(0.0, 2),
        ValueSet::Hull(g) => g,
        ValueSet::Minkowski(..) => unreachable!("duality values are boxes or hulls"),
    })
}

/// `S(x)` as a union of polyhedral sets.
pub fn values_at(op: &Operator, x: &[f64]) -> Result<Vec<ValueSet>> {
    op.space.check(x)?;
    values::values(&op.spec, x)
}

/// `t -> S(t + x)`; the identity when `x = 0`.
pub fn translate(spec: &OperatorSpec, x: &[f64]) -> Result<OperatorSpec> {
    check_dim(spec.dim(), x.len())?;
    if x.iter().all(|v| *v == 0.0) {
        return Ok(spec.clone());
    }
    Ok(OperatorSpec::Translate { inner: Box::new(spec.clone()), by: x.to_vec() })
}

pub(crate) fn cmp_points(a: &PairPoint, b: &PairPoint) -> std::cmp::Ordering {
    a.x.iter()
        .chain(&a.xstar)
        .zip(b.x.iter().chain(&b.xstar))
        .map(|(u, v)| u.total_cmp(v))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Deterministic graph points within product-norm radius `radius`, on a grid
/// of `density` nodes per unit.
pub fn sample_graph(op: &Operator, radius: f64, density: f64) -> Result<GraphSample> {
    sample_graph_with_budget(op, radius, density, SAMPLE_BUDGET)
}

pub(crate) fn sample_graph_with_budget(op: &Operator, radius: f64, density: f64, budget: usize) -> Result<GraphSample> {
    if !(radius.is_finite() && radius > 0.0 && density.is_finite() && density > 0.0) {
        return Err(Error::InvalidInput("radius and density must be positive".into()));
    }
    let model = GraphModel::build(&op.spec, radius)?;
    let mut points: Vec<PairPoint> = model
        .grid_points(density, budget)
        .into_iter()
        .filter(|p| op.space.product_norm(p).is_ok_and(|r| r <= radius * (1.0 + 1e-12)))
        .collect();
    points.sort_by(cmp_points);
    points.dedup();
    if points.is_empty() {
        return Err(Error::NoSamples { radius });
    }
    Ok(GraphSample { points, radius, density, provenance: op.spec.describe() })
}
