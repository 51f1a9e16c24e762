//! Quasidensity gaps: `inf over G(S) of 1/2|s-x|^2 + 1/2|s*-x*|^2 + <s-x, s*-x*>`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CertParams, CertReport, PropertyTag, Verdict, Witness};
use crate::error::{Error, Result};
use crate::nelder_mead::Options;
use crate::operators::{self, GraphModel, Operator, Seed};
use crate::space::{dot, PairPoint, Space};

/// Gap at one probe and radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub probe: PairPoint,
    pub gap: f64,
    /// Graph point attaining `gap`.
    pub minimizer: PairPoint,
    pub radius_used: f64,
    /// `|gap(2R) - gap(R)| <= eps_gap`.
    pub converged: bool,
}

/// The integrand; nonnegative by Hoelder's inequality, so rounding below zero
/// is clamped.
pub(crate) fn integrand(space: &Space, s: &PairPoint, probe: &PairPoint) -> f64 {
    let dx: Vec<f64> = s.x.iter().zip(&probe.x).map(|(a, b)| a - b).collect();
    let dxs: Vec<f64> = s.xstar.iter().zip(&probe.xstar).map(|(a, b)| a - b).collect();
    let a = space.norm.eval(&dx);
    let b = space.norm.dual().eval(&dxs);
    (0.5 * a * a + 0.5 * b * b + dot(&dx, &dxs)).max(0.0)
}

/// Incrementally computed gaps along the radii `r0, 2 r0, 4 r0, ...`.
///
/// Each stage is seeded with the previous minimizer, whose chart parameter is
/// still admissible at the larger radius, so gaps never increase along the
/// chain.
struct GapChain<'a> {
    op: &'a Operator,
    probe: &'a PairPoint,
    params: &'a CertParams,
    radii: Vec<f64>,
    gaps: Vec<(f64, PairPoint)>,
    best: Option<Seed>,
    on_graph: bool,
}

impl<'a> GapChain<'a> {
    fn new(op: &'a Operator, probe: &'a PairPoint, params: &'a CertParams) -> GapChain<'a> {
        let on_graph = operators::contains(op, probe).unwrap_or(false);
        GapChain { op, probe, params, radii: vec![], gaps: vec![], best: None, on_graph }
    }

    /// Gap at radius `r`, which must be a power-of-two multiple of the
    /// chain's starting radius.
    fn at(&mut self, r: f64) -> Result<(f64, PairPoint)> {
        if self.on_graph {
            return Ok((0.0, self.probe.clone()));
        }
        if self.radii.is_empty() {
            let mut r0 = r;
            while r0 >= 2.0 {
                r0 *= 0.5;
            }
            self.radii.push(r0);
            let g = self.stage(r0)?;
            self.gaps.push(g);
        }
        while *self.radii.last().unwrap() < r * (1.0 - 1e-12) {
            let next = self.radii.last().unwrap() * 2.0;
            self.radii.push(next);
            let g = self.stage(next)?;
            self.gaps.push(g);
        }
        let k = self.radii.iter().position(|&q| (q - r).abs() <= 1e-12 * r).ok_or_else(|| {
            Error::InvalidInput(format!("radius {r} is not on the doubling chain"))
        })?;
        Ok(self.gaps[k].clone())
    }

    fn stage(&mut self, r: f64) -> Result<(f64, PairPoint)> {
        let space = &self.op.space;
        let probe = self.probe;
        let model = GraphModel::build(&self.op.spec, r)?;
        let mut seeds: Vec<Seed> = model
            .tagged_grid(self.params.density, self.params.chart_budget)
            .into_iter()
            .filter(|s| s.origin.is_some() || space.product_norm(&s.point).is_ok_and(|q| q <= r))
            .collect();
        if let Some(b) = &self.best {
            seeds.push(b.clone());
        }
        if seeds.is_empty() {
            // inf over an empty truncation
            return Ok((f64::INFINITY, probe.clone()));
        }
        let mut scored: Vec<(f64, usize)> =
            seeds.iter().enumerate().map(|(i, s)| (integrand(space, &s.point, probe), i)).collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut picks: Vec<usize> = scored.iter().take(self.params.seeds).map(|p| p.1).collect();
        if self.best.is_some() && !picks.contains(&(seeds.len() - 1)) {
            picks.push(seeds.len() - 1);
        }
        let opts = Options { max_iter: self.params.max_iter, target: 1e-16, ..Options::default() };
        let mut best_val = f64::INFINITY;
        let mut best_seed: Option<Seed> = None;
        for &i in &picks {
            let seed = &seeds[i];
            let (v, refined) = model.refine(seed, |p| integrand(space, p, probe), opts);
            if v < best_val {
                best_val = v;
                best_seed = Some(refined);
            }
            if best_val <= 1e-16 {
                break;
            }
        }
        let best = best_seed.expect("at least one seed");
        let out = (best_val, best.point.clone());
        self.best = Some(best);
        Ok(out)
    }
}

/// Gap of `op` at `probe` and radius `radius`, with default parameters.
pub fn gap(op: &Operator, probe: &PairPoint, radius: f64) -> Result<GapResult> {
    gap_with(op, probe, radius, &CertParams::default())
}

pub fn gap_with(op: &Operator, probe: &PairPoint, radius: f64, params: &CertParams) -> Result<GapResult> {
    probe.check(&op.space)?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let mut chain = GapChain::new(op, probe, params);
    let (g, m) = chain.at(radius)?;
    let (g2, _) = chain.at(2.0 * radius)?;
    Ok(GapResult {
        probe: probe.clone(),
        gap: g,
        minimizer: m,
        radius_used: radius,
        converged: (g2 - g).abs() <= params.eps_gap,
    })
}

/// Relative decrease over two doublings still counted as a stable gap.
const STABLE_REL: f64 = 1e-3;

enum ProbeOutcome {
    Pass,
    Fail(GapResult),
    Inconclusive(GapResult),
}

fn classify(op: &Operator, probe: &PairPoint, tol: f64, params: &CertParams) -> Result<ProbeOutcome> {
    let mut chain = GapChain::new(op, probe, params);
    let mut r = params.radius;
    let mut last = None;
    for _ in 0..=params.max_doublings {
        let (g, m) = chain.at(r)?;
        let (g2, _) = chain.at(2.0 * r)?;
        let converged = (g2 - g).abs() <= params.eps_gap;
        let result = GapResult { probe: probe.clone(), gap: g, minimizer: m, radius_used: r, converged };
        if converged && g <= tol {
            return Ok(ProbeOutcome::Pass);
        }
        let (g4, _) = chain.at(4.0 * r)?;
        let stable = g4 == f64::INFINITY || g - g4 <= params.eps_gap + STABLE_REL * g;
        if g4 >= 10.0 * tol && stable {
            return Ok(ProbeOutcome::Fail(result));
        }
        last = Some(result);
        r *= 2.0;
    }
    Ok(ProbeOutcome::Inconclusive(last.expect("at least one radius")))
}

/// Probes are processed in chunks of this size so that a failure stops the
/// search early while the first failing probe in grid order is still found.
const CHUNK: usize = 64;

/// Pass iff every probe's converged gap is at most `tol`; fail at the first
/// probe (grid order) whose gap stays at or above `10 tol` and does not decay
/// across two radius doublings; inconclusive otherwise.
pub fn is_quasidense(op: &Operator, probes: &[PairPoint], tol: f64, params: &CertParams) -> Result<CertReport> {
    if probes.is_empty() {
        return Err(Error::InvalidInput("probe grid is empty".into()));
    }
    for p in probes {
        p.check(&op.space)?;
    }
    let mut undecided: Option<GapResult> = None;
    let mut examined = 0;
    for chunk in probes.chunks(CHUNK) {
        let outcomes: Vec<Result<ProbeOutcome>> =
            chunk.par_iter().map(|p| classify(op, p, tol, params)).collect();
        for o in outcomes {
            examined += 1;
            match o? {
                ProbeOutcome::Pass => {}
                ProbeOutcome::Fail(g) => {
                    return Ok(CertReport::new(PropertyTag::Quasidense, Verdict::Fail, params)
                        .with_witness(Witness::Gap(g))
                        .examined(examined));
                }
                ProbeOutcome::Inconclusive(g) => {
                    if undecided.is_none() {
                        undecided = Some(g);
                    }
                }
            }
        }
    }
    Ok(match undecided {
        None => CertReport::new(PropertyTag::Quasidense, Verdict::Pass, params).examined(examined),
        Some(g) => CertReport::new(PropertyTag::Quasidense, Verdict::Inconclusive, params)
            .with_witness(Witness::Gap(g))
            .examined(examined)
            .note("gap neither converged below tol nor stayed above 10 tol"),
    })
}

/// Gaps at the base radius over a probe grid, in grid order.
pub fn gap_landscape(op: &Operator, probes: &[PairPoint], params: &CertParams) -> Result<Vec<GapResult>> {
    probes.par_iter().map(|p| gap_with(op, p, params.radius, params)).collect()
}
