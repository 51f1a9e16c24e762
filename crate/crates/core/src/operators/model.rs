//! Finite-dimensional parametrizations of graphs truncated at a radius.
//!
//! A graph is a finite list of isolated points plus a list of charts. A chart
//! maps a parameter box onto a piece of the graph; `None` marks parameters
//! that fall outside it (for example after a restriction).

use std::sync::Arc;

use super::spec::{OperatorSpec, SmoothForm};
use super::values::{duality_values, preimage_param_dim, value_branches, value_param_dim, values, ValueSet};
use crate::convex::ScalarForm;
use crate::error::Result;
use crate::nelder_mead::{minimize, Options};
use crate::space::{Norm, PairPoint};

/// Points per unit axis: the vertices, midpoint and quarter points.
const UNIT_POINTS: usize = 5;

type ChartFn = Arc<dyn Fn(&[f64]) -> Option<PairPoint> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Axis {
    pub lo: f64,
    pub hi: f64,
    /// Unit axes (barycentric weights, signs) get a fixed small grid.
    pub unit: bool,
}

impl Axis {
    fn domain(lo: f64, hi: f64) -> Axis {
        Axis { lo, hi, unit: false }
    }

    fn unit(lo: f64, hi: f64) -> Axis {
        Axis { lo, hi, unit: true }
    }

    fn levels(&self, count: usize) -> Vec<f64> {
        if count <= 1 || self.hi <= self.lo {
            return vec![0.5 * (self.lo + self.hi)];
        }
        let m = (count - 1) as f64;
        (0..count).map(|k| (self.lo * (m - k as f64) + self.hi * k as f64) / m).collect()
    }
}

#[derive(Clone)]
pub(crate) struct Chart {
    pub axes: Vec<Axis>,
    map: ChartFn,
}

impl std::fmt::Debug for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chart").field("axes", &self.axes).finish()
    }
}

impl Chart {
    fn new(axes: Vec<Axis>, map: impl Fn(&[f64]) -> Option<PairPoint> + Send + Sync + 'static) -> Chart {
        Chart { axes, map: Arc::new(map) }
    }

    pub fn eval(&self, theta: &[f64]) -> Option<PairPoint> {
        (self.map)(theta)
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.axes.iter().map(|a| (a.lo, a.hi)).collect()
    }

    /// Parameter grid with spacing `1/density` on domain axes, shrunk so that
    /// the grid has at most `budget` nodes.
    pub fn grid(&self, density: f64, budget: usize) -> Vec<Vec<f64>> {
        let units = self.axes.iter().filter(|a| a.unit).count();
        let doms = self.axes.len() - units;
        let mut per_dom = 1usize;
        if doms > 0 {
            let widest = self.axes.iter().filter(|a| !a.unit).map(|a| a.hi - a.lo).fold(0.0, f64::max);
            let natural = (widest * density).round() as usize + 1;
            let room = (budget as f64 / (UNIT_POINTS as f64).powi(units as i32)).max(1.0);
            let cap = room.powf(1.0 / doms as f64).floor() as usize;
            per_dom = natural.min(cap).max(2);
            if per_dom < natural && per_dom.is_multiple_of(2) {
                per_dom -= 1;
            }
            per_dom = per_dom.max(2);
        }
        let mut out: Vec<Vec<f64>> = vec![Vec::new()];
        for a in &self.axes {
            let count = if a.unit {
                UNIT_POINTS
            } else {
                let natural = ((a.hi - a.lo) * density).round() as usize + 1;
                natural.min(per_dom).max(2)
            };
            let levels = a.levels(count);
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

    fn then(self, f: impl Fn(PairPoint) -> Option<PairPoint> + Send + Sync + 'static) -> Chart {
        let inner = self.map;
        Chart { axes: self.axes, map: Arc::new(move |t| inner(t).and_then(&f)) }
    }
}

/// A graph point with the chart parameter it came from (`None` for atoms).
#[derive(Debug, Clone)]
pub(crate) struct Seed {
    pub point: PairPoint,
    pub origin: Option<(usize, Vec<f64>)>,
}

/// A truncated graph as isolated points plus charts.
#[derive(Debug, Clone)]
pub(crate) struct GraphModel {
    pub atoms: Vec<PairPoint>,
    pub charts: Vec<Chart>,
}

fn cube(n: usize, r: f64) -> Vec<Axis> {
    vec![Axis::domain(-r, r); n]
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

/// Charts of `J` on `l^1(n)`: one cell per proper zero set `Z`, coordinates
/// outside `Z` free and the dual coordinates on `Z` ranging over
/// `|x|_1 [-1, 1]`.
fn l1_duality_charts(n: usize, r: f64) -> Vec<Chart> {
    let mut charts = Vec::new();
    for mask in 0u32..(1 << n) - 1 {
        let zero: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
        let axes = zero.iter().map(|&z| if z { Axis::unit(-1.0, 1.0) } else { Axis::domain(-r, r) }).collect();
        charts.push(Chart::new(axes, move |t| {
            let x: Vec<f64> = (0..n).map(|i| if zero[i] { 0.0 } else { t[i] }).collect();
            let norm = Norm::L1.eval(&x);
            let xstar = (0..n).map(|i| if zero[i] { norm * t[i] } else { norm * sign(t[i]) }).collect();
            Some(PairPoint::new(x, xstar))
        }));
    }
    charts
}

/// Extends a chart of the driving summand by a parametrized selection of the
/// other summand's values.
fn extend_sum(chart: Chart, other: Arc<OperatorSpec>, extra: usize, branch: usize, clamp: f64) -> Chart {
    let base = chart.axes.len();
    let mut axes = chart.axes.clone();
    axes.extend(std::iter::repeat_n(Axis::unit(0.0, 1.0), extra));
    let inner = chart.map;
    Chart::new(axes, move |t| {
        let pp = inner(&t[..base])?;
        let sets = values(&other, &pp.x).ok()?;
        let set = sets.get(branch)?;
        let v = set.point_at(&t[base..], clamp);
        let xstar = pp.xstar.iter().zip(&v).map(|(a, b)| a + b).collect();
        Some(PairPoint::new(pp.x, xstar))
    })
}

fn sum_atoms(atoms: &[PairPoint], other: &OperatorSpec, clamp: f64) -> Vec<PairPoint> {
    let mut out = Vec::new();
    for a in atoms {
        if let Ok(sets) = values(other, &a.x) {
            for set in sets {
                for v in set.samples(clamp, UNIT_POINTS) {
                    out.push(PairPoint::new(a.x.clone(), a.xstar.iter().zip(&v).map(|(s, t)| s + t).collect()));
                }
            }
        }
    }
    out
}

fn map_model(m: GraphModel, f: impl Fn(PairPoint) -> Option<PairPoint> + Send + Sync + Clone + 'static) -> GraphModel {
    GraphModel {
        atoms: m.atoms.into_iter().filter_map(&f).collect(),
        charts: m.charts.into_iter().map(|c| c.then(f.clone())).collect(),
    }
}

impl GraphModel {
    /// Parametrization whose parameter boxes have half-width `r` on domain
    /// axes.
    pub fn build(spec: &OperatorSpec, r: f64) -> Result<GraphModel> {
        let n = spec.dim();
        Ok(match spec {
            OperatorSpec::ExplicitGraph { points } => GraphModel { atoms: points.clone(), charts: vec![] },
            OperatorSpec::Zero { dim } => {
                let dim = *dim;
                GraphModel {
                    atoms: vec![],
                    charts: vec![Chart::new(cube(dim, r), move |t| Some(PairPoint::new(t.to_vec(), vec![0.0; dim])))],
                }
            }
            OperatorSpec::Affine { .. } | OperatorSpec::DualityMap(_) | OperatorSpec::Gradient(_) | OperatorSpec::Subdifferential(_)
                if Self::pointwise(spec) =>
            {
                let s = Arc::new(spec.clone());
                GraphModel {
                    atoms: vec![],
                    charts: vec![Chart::new(cube(n, r), move |t| {
                        let v = values(&s, t).ok()?;
                        match v.first()? {
                            ValueSet::Point(p) => Some(PairPoint::new(t.to_vec(), p.clone())),
                            _ => None,
                        }
                    })],
                }
            }
            OperatorSpec::Gradient(f) => {
                // ln|t| - t^2/2: one chart per open orthant
                debug_assert!(matches!(f.form, SmoothForm::LogAbsMinusHalfSquare));
                let lo = 1.0 / r;
                let charts = (0u32..1 << n)
                    .map(|mask| {
                        let axes = (0..n)
                            .map(|i| if mask & (1 << i) != 0 { Axis::domain(-r, -lo) } else { Axis::domain(lo, r) })
                            .collect();
                        let g = f.clone();
                        Chart::new(axes, move |t| Some(PairPoint::new(t.to_vec(), g.gradient(t)?)))
                    })
                    .collect();
                GraphModel { atoms: vec![], charts }
            }
            OperatorSpec::Subdifferential(f) => {
                // Minty parametrization theta -> (prox theta, theta - prox theta)
                let g = f.clone();
                GraphModel {
                    atoms: vec![],
                    charts: vec![Chart::new(cube(n, 2.0 * r), move |t| {
                        let x = g.prox(t);
                        let xstar = t.iter().zip(&x).map(|(a, b)| a - b).collect();
                        Some(PairPoint::new(x, xstar))
                    })],
                }
            }
            OperatorSpec::DualityMap(sp) => match sp.norm {
                Norm::L1 => GraphModel {
                    atoms: vec![PairPoint::new(vec![0.0; n], vec![0.0; n])],
                    charts: l1_duality_charts(n, r),
                },
                Norm::LInf => GraphModel {
                    atoms: vec![PairPoint::new(vec![0.0; n], vec![0.0; n])],
                    charts: l1_duality_charts(n, r).into_iter().map(|c| c.then(|p| Some(p.swapped()))).collect(),
                },
                _ => {
                    let sp = *sp;
                    GraphModel {
                        atoms: vec![],
                        charts: vec![Chart::new(cube(n, r), move |t| {
                            match duality_values(&sp, t) {
                                ValueSet::Point(p) => Some(PairPoint::new(t.to_vec(), p)),
                                _ => None,
                            }
                        })],
                    }
                }
            },
            OperatorSpec::Affine { .. } => unreachable!("affine maps are pointwise"),
            OperatorSpec::Inverse(s) => map_model(GraphModel::build(s, r)?, |p| Some(p.swapped())),
            OperatorSpec::Translate { inner, by } => {
                let by = by.clone();
                map_model(GraphModel::build(inner, r)?, move |p| {
                    let x = p.x.iter().zip(&by).map(|(a, b)| a - b).collect();
                    Some(PairPoint::new(x, p.xstar))
                })
            }
            OperatorSpec::Scale { inner, factor } => {
                let k = *factor;
                map_model(GraphModel::build(inner, r)?, move |p| {
                    let xstar = p.xstar.iter().map(|a| a * k).collect();
                    Some(PairPoint::new(p.x, xstar))
                })
            }
            OperatorSpec::Restrict { inner, region } => {
                let region = region.clone();
                map_model(GraphModel::build(inner, r)?, move |p| if region.contains(&p.x) { Some(p) } else { None })
            }
            OperatorSpec::Sum(a, b) => {
                // drive with a summand whose partner supports pointwise values
                let (driver, other) = if value_param_dim(b).is_ok() { (a, b) } else { (b, a) };
                let extra = value_param_dim(other)?;
                let branches = value_branches(other);
                let base = GraphModel::build(driver, r)?;
                let other = Arc::new((**other).clone());
                let mut charts = Vec::new();
                for c in base.charts {
                    for k in 0..branches {
                        charts.push(extend_sum(c.clone(), other.clone(), extra, k, r));
                    }
                }
                GraphModel { atoms: sum_atoms(&base.atoms, &other, r), charts }
            }
            OperatorSpec::ParallelSum(a, b) => {
                preimage_param_dim(a)?;
                let dual = OperatorSpec::Sum(Box::new(a.as_ref().clone().inverse()), Box::new(b.as_ref().clone().inverse()));
                map_model(GraphModel::build(&dual, r)?, |p| Some(p.swapped()))
            }
        })
    }

    /// Single-valued everywhere on its domain with a box domain.
    fn pointwise(spec: &OperatorSpec) -> bool {
        match spec {
            OperatorSpec::Affine { .. } => true,
            OperatorSpec::DualityMap(_) => false,
            OperatorSpec::Gradient(f) => matches!(f.form, SmoothForm::Polynomial { .. }),
            OperatorSpec::Subdifferential(f) => {
                matches!(f.form, ScalarForm::HalfSquare | ScalarForm::Polynomial { .. })
            }
            _ => false,
        }
    }

    /// Atoms followed by every chart grid node that lands on the graph.
    pub fn grid_points(&self, density: f64, budget: usize) -> Vec<PairPoint> {
        self.tagged_grid(density, budget).into_iter().map(|s| s.point).collect()
    }

    /// Local minimization of `objective` over the chart a seed came from;
    /// atoms are returned as they are. Returns the value and the refined seed.
    pub fn refine(&self, seed: &Seed, objective: impl Fn(&PairPoint) -> f64, opts: Options) -> (f64, Seed) {
        let start = objective(&seed.point);
        let Some((k, t0)) = &seed.origin else {
            return (start, seed.clone());
        };
        let chart = &self.charts[*k];
        if t0.is_empty() {
            return (start, seed.clone());
        }
        let bounds = chart.bounds();
        let step: Vec<f64> = chart.axes.iter().map(|a| ((a.hi - a.lo) / 16.0).max(1e-3)).collect();
        let f = |t: &[f64]| chart.eval(t).map_or(f64::INFINITY, |p| objective(&p));
        let mut best = (start, t0.clone());

        // The fiber over the seed's base point first: when the objective is
        // finite only on that fiber, a joint simplex cannot move along it.
        let units: Vec<usize> = (0..chart.axes.len()).filter(|&i| chart.axes[i].unit).collect();
        if !units.is_empty() && units.len() < chart.axes.len() {
            let embed = |u: &[f64]| {
                let mut t = t0.clone();
                for (&i, v) in units.iter().zip(u) {
                    t[i] = *v;
                }
                t
            };
            let u0: Vec<f64> = units.iter().map(|&i| t0[i]).collect();
            let ub: Vec<(f64, f64)> = units.iter().map(|&i| bounds[i]).collect();
            let us: Vec<f64> = units.iter().map(|&i| step[i]).collect();
            let m = minimize(|u| f(&embed(u)), &u0, &ub, &us, opts);
            if m.value < best.0 {
                best = (m.value, embed(&m.x));
            }
        }
        if best.0 > opts.target {
            let m = minimize(f, &best.1, &bounds, &step, opts);
            if m.value < best.0 {
                best = (m.value, m.x);
            }
        }
        match chart.eval(&best.1) {
            Some(point) if best.0 < start => (best.0, Seed { point, origin: Some((*k, best.1)) }),
            _ => (start, seed.clone()),
        }
    }

    /// Like [`GraphModel::grid_points`], keeping the chart and parameter of
    /// each node so that it can seed a local search.
    pub fn tagged_grid(&self, density: f64, budget: usize) -> Vec<Seed> {
        let mut out: Vec<Seed> = self.atoms.iter().map(|p| Seed { point: p.clone(), origin: None }).collect();
        for (k, c) in self.charts.iter().enumerate() {
            for t in c.grid(density, budget) {
                if let Some(point) = c.eval(&t) {
                    out.push(Seed { point, origin: Some((k, t)) });
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;

    #[test]
    fn grid_respects_budget_and_keeps_odd_counts() {
        let c = Chart::new(cube(2, 16.0), |t| Some(PairPoint::new(t.to_vec(), t.to_vec())));
        let g = c.grid(4.0, 1024);
        assert!(g.len() <= 1024);
        assert_eq!(g.len(), 31 * 31);
        assert!(g.iter().any(|t| t == &vec![0.0, 0.0]));
    }

    #[test]
    fn l1_cells_reach_vertex_of_axis_value() {
        let m = GraphModel::build(&OperatorSpec::DualityMap(Space::l1(2)), 4.0).unwrap();
        let pts = m.grid_points(1.0, 4096);
        assert!(pts.contains(&PairPoint::new(vec![1.0, 0.0], vec![1.0, 1.0])));
        assert!(pts.contains(&PairPoint::new(vec![0.0, 1.0], vec![1.0, 1.0])));
        assert!(pts.contains(&PairPoint::new(vec![1.0, 1.0], vec![2.0, 2.0])));
    }
}
