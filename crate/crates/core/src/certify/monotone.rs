//! Monotonicity on samples and the search for monotonically related points
//! off the graph.

use rayon::prelude::*;

use super::grid::SearchBox;
use super::{CertParams, CertReport, PropertyTag, Verdict, Witness};
use crate::error::{Error, Result};
use crate::nelder_mead::Options;
use crate::operators::{self, cmp_points, sample_graph_with_budget, GraphModel, Operator, Seed};
use crate::space::PairPoint;

/// `<s - w, s* - w*>`
pub(crate) fn pairing_diff(s: &PairPoint, w: &PairPoint) -> f64 {
    s.x.iter().zip(&w.x).zip(s.xstar.iter().zip(&w.xstar)).map(|((a, b), (c, d))| (a - b) * (c - d)).sum()
}

/// Pass iff every pair of graph samples within radius `radius` has
/// `<s - t, s* - t*> >= -eps_num`; fails with the first violating pair.
pub fn is_monotone(op: &Operator, radius: f64, params: &CertParams) -> Result<CertReport> {
    let sample = sample_graph_with_budget(op, radius, params.density, params.chart_budget)?;
    let pts = &sample.points;
    let first_bad: Option<(usize, usize, f64)> = (0..pts.len())
        .into_par_iter()
        .filter_map(|i| {
            (i + 1..pts.len()).find_map(|j| {
                let v = pairing_diff(&pts[i], &pts[j]);
                (v < -params.eps_num).then_some((i, j, v))
            })
        })
        .min_by_key(|t| (t.0, t.1));
    let pairs = pts.len() * pts.len().saturating_sub(1) / 2;
    Ok(match first_bad {
        None => CertReport::new(PropertyTag::Monotone, Verdict::Pass, params).examined(pairs),
        Some((i, j, v)) => CertReport::new(PropertyTag::Monotone, Verdict::Fail, params)
            .with_witness(Witness::Pair { first: pts[i].clone(), second: pts[j].clone(), pairing: v })
            .examined(pairs),
    })
}

pub(crate) fn require_monotone(op: &Operator, radius: f64, params: &CertParams) -> Result<()> {
    let report = is_monotone(op, radius, params)?;
    if report.verdict != Verdict::Pass {
        return Err(Error::Precondition("operator is not monotone on its samples".into()));
    }
    Ok(())
}

/// Graph samples with chart origins, used to screen and refine candidates.
pub(crate) struct Screen {
    pub model: GraphModel,
    pub seeds: Vec<Seed>,
}

impl Screen {
    pub fn new(op: &Operator, radius: f64, params: &CertParams) -> Result<Screen> {
        let model = GraphModel::build(&op.spec, radius)?;
        let seeds: Vec<Seed> = model
            .tagged_grid(params.density, params.chart_budget)
            .into_iter()
            .filter(|s| op.space.product_norm(&s.point).is_ok_and(|q| q <= radius))
            .collect();
        if seeds.is_empty() {
            return Err(Error::NoSamples { radius });
        }
        Ok(Screen { model, seeds })
    }

    /// Whether `w` stays monotonically related to every graph point accepted
    /// by `keep`: a sample screen followed by local descent from the
    /// lowest-scoring samples.
    pub fn related(&self, w: &PairPoint, keep: &(dyn Fn(&PairPoint) -> bool + Sync), params: &CertParams) -> bool {
        let mut scored: Vec<(f64, usize)> = Vec::new();
        for (i, s) in self.seeds.iter().enumerate() {
            if !keep(&s.point) {
                continue;
            }
            let v = pairing_diff(&s.point, w);
            if v < -params.eps_num {
                return false;
            }
            scored.push((v, i));
        }
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut starts: Vec<Seed> = scored.iter().take(params.seeds).map(|&(_, i)| self.seeds[i].clone()).collect();
        starts.extend(self.seeds_at(&w.x, keep));
        let opts = Options { max_iter: params.max_iter, target: -params.eps_num, ..Options::default() };
        for seed in &starts {
            let (v, _) = self.model.refine(seed, |p| if keep(p) { pairing_diff(p, w) } else { f64::INFINITY }, opts);
            if v < -params.eps_num {
                return false;
            }
        }
        true
    }

    /// Whether `w` is farther than [`OFF_GRAPH_MARGIN`] from every graph
    /// point. Points closer than that are related up to `eps_num` without
    /// carrying information, so they are not reported as witnesses.
    pub fn clear_of_graph(&self, w: &PairPoint, params: &CertParams) -> bool {
        let dist_sq = |p: &PairPoint| -> f64 {
            p.x.iter().zip(&w.x).chain(p.xstar.iter().zip(&w.xstar)).map(|(a, b)| (a - b) * (a - b)).sum()
        };
        let limit = OFF_GRAPH_MARGIN * OFF_GRAPH_MARGIN;
        let mut scored: Vec<(f64, usize)> = Vec::with_capacity(self.seeds.len());
        for (i, s) in self.seeds.iter().enumerate() {
            let d = dist_sq(&s.point);
            if d <= limit {
                return false;
            }
            scored.push((d, i));
        }
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut starts: Vec<Seed> = scored.iter().take(params.seeds).map(|&(_, i)| self.seeds[i].clone()).collect();
        starts.extend(self.seeds_at(&w.x, &|_| true));
        let opts = Options { max_iter: params.max_iter, target: limit, ..Options::default() };
        starts.iter().all(|seed| self.model.refine(seed, dist_sq, opts).0 > limit)
    }

    /// Chart parameters whose primal component is `x`, for charts
    /// parametrized by the primal point itself.
    fn seeds_at(&self, x: &[f64], keep: &(dyn Fn(&PairPoint) -> bool + Sync)) -> Vec<Seed> {
        let mut out = Vec::new();
        for (k, c) in self.model.charts.iter().enumerate() {
            if c.axes.len() != x.len() {
                continue;
            }
            let t: Vec<f64> = x.iter().zip(&c.axes).map(|(v, a)| v.clamp(a.lo, a.hi)).collect();
            if let Some(p) = c.eval(&t) {
                if keep(&p) && p.x.iter().zip(x).all(|(a, b)| (a - b).abs() <= 1e-12) {
                    out.push(Seed { point: p, origin: Some((k, t)) });
                }
            }
        }
        out
    }
}

/// Euclidean distance in `E x E*` below which a candidate is treated as on
/// the graph. Relatedness up to `eps_num` admits points within roughly
/// `sqrt(eps_num)` of a graph of moderate slope.
pub const OFF_GRAPH_MARGIN: f64 = 1e-3;

/// Candidates are screened in chunks so the first witness in grid order is
/// found without screening the whole grid.
pub(crate) const CANDIDATE_CHUNK: usize = 256;

/// Searches `search_box` for a point off the graph that is monotonically
/// related to every graph point. A witness refutes maximality; finding none
/// is a pass at the searched scale.
pub fn maximality_violation_search(
    op: &Operator,
    search_box: &SearchBox,
    radius: f64,
    params: &CertParams,
) -> Result<CertReport> {
    if search_box.lo.len() != 2 * op.dim() || search_box.hi.len() != 2 * op.dim() {
        return Err(Error::DimensionMismatch { expected: 2 * op.dim(), got: search_box.lo.len() });
    }
    require_monotone(op, radius, params)?;
    let screen = Screen::new(op, radius, params)?;
    let mut candidates = search_box.candidates(params.candidate_budget);
    // smallest witnesses first; among equal norms, larger coordinates first
    candidates.sort_by(|a, b| {
        let na = op.space.product_norm(a).unwrap_or(f64::INFINITY);
        let nb = op.space.product_norm(b).unwrap_or(f64::INFINITY);
        na.total_cmp(&nb).then_with(|| cmp_points(b, a))
    });
    let all = |_: &PairPoint| true;
    let mut undecidable = 0usize;
    for (c, chunk) in candidates.chunks(CANDIDATE_CHUNK).enumerate() {
        let hits: Vec<(Option<bool>, bool)> = chunk
            .par_iter()
            .map(|w| match operators::contains(op, w) {
                Ok(true) => (Some(true), false),
                Ok(false) => (Some(false), screen.related(w, &all, params) && screen.clear_of_graph(w, params)),
                Err(_) => (None, false),
            })
            .collect();
        for (k, (on_graph, related)) in hits.into_iter().enumerate() {
            if on_graph.is_none() {
                undecidable += 1;
            }
            if on_graph == Some(false) && related {
                let w = chunk[k].clone();
                return Ok(CertReport::new(PropertyTag::Maximal, Verdict::Fail, params)
                    .with_witness(Witness::Point { point: w })
                    .examined(c * CANDIDATE_CHUNK + k + 1));
            }
        }
    }
    let report = CertReport::new(PropertyTag::Maximal, Verdict::Pass, params).examined(candidates.len());
    Ok(if undecidable > 0 {
        report.note(format!("{undecidable} candidates skipped: graph membership undecidable"))
    } else {
        report
    })
}

