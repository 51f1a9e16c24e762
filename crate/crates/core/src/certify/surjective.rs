//! Range searches: surjectivity onto target grids and Hilbert-space
//! resolvents.

use rayon::prelude::*;

use super::{CertParams, CertReport, PropertyTag, Verdict, Witness};
use crate::error::{Error, Result};
use crate::nelder_mead::Options;
use crate::operators::{GraphModel, Operator, Seed};
use crate::space::PairPoint;

/// Best graph point for a residual, searched over the parametrization at
/// `radius`.
fn best_residual(
    model: &GraphModel,
    seeds: &[Seed],
    residual: &(dyn Fn(&PairPoint) -> f64 + Sync),
    params: &CertParams,
) -> (f64, PairPoint) {
    let mut scored: Vec<(f64, usize)> = seeds.iter().enumerate().map(|(i, s)| (residual(&s.point), i)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut best = (scored[0].0, seeds[scored[0].1].point.clone());
    for &(_, i) in scored.iter().take(params.seeds) {
        let mut seed = seeds[i].clone();
        // restarts from the previous optimum with a fresh simplex
        for _ in 0..4 {
            let opts = Options { max_iter: 2 * params.max_iter, ftol: 0.0, target: 0.1 * params.eps_res, ..Options::default() };
            let (v, refined) = model.refine(&seed, residual, opts);
            if v < best.0 {
                best = (v, refined.point.clone());
            }
            if v <= 0.1 * params.eps_res {
                return best;
            }
            seed = refined;
        }
    }
    best
}

fn search_model(op: &Operator, radius: f64, params: &CertParams) -> Result<(GraphModel, Vec<Seed>)> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidInput("search radius must be positive".into()));
    }
    let model = GraphModel::build(&op.spec, radius)?;
    let seeds = model.tagged_grid(params.density, params.candidate_budget);
    if seeds.is_empty() {
        return Err(Error::NoSamples { radius });
    }
    Ok((model, seeds))
}

/// For each target `y`, searches for `x` with `y in S(x)` (residual in the
/// dual norm at most `eps_res`) over graph parameters of size up to
/// `radius`. Pass iff every target is hit; fails at the first miss.
pub fn surjectivity_check(op: &Operator, targets: &[Vec<f64>], radius: f64, params: &CertParams) -> Result<CertReport> {
    for t in targets {
        op.space.check(t)?;
    }
    let (model, seeds) = search_model(op, radius, params)?;
    let dual = op.space.norm.dual();
    let residuals: Vec<f64> = targets
        .par_iter()
        .map(|y| {
            let r = |p: &PairPoint| {
                let d: Vec<f64> = p.xstar.iter().zip(y).map(|(a, b)| a - b).collect();
                dual.eval(&d)
            };
            best_residual(&model, &seeds, &r, params).0
        })
        .collect();
    for (k, (y, r)) in targets.iter().zip(&residuals).enumerate() {
        if *r > params.eps_res {
            return Ok(CertReport::new(PropertyTag::Surjective, Verdict::Fail, params)
                .with_witness(Witness::Target { target: y.clone(), residual: *r })
                .examined(k + 1));
        }
    }
    Ok(CertReport::new(PropertyTag::Surjective, Verdict::Pass, params).examined(targets.len()))
}

/// `t` with `target in S(t) + t` up to `eps_res`, or `None`. Hilbert space
/// only.
pub fn resolvent_solve(op: &Operator, target: &[f64], radius: f64, params: &CertParams) -> Result<Option<Vec<f64>>> {
    if !op.space.is_hilbert() {
        return Err(Error::NotHilbert(op.space.norm.exponent()));
    }
    op.space.check(target)?;
    let (model, seeds) = search_model(op, radius, params)?;
    let r = |p: &PairPoint| -> f64 {
        p.x.iter().zip(&p.xstar).zip(target).map(|((a, b), z)| (a + b - z).powi(2)).sum::<f64>().sqrt()
    };
    let (res, p) = best_residual(&model, &seeds, &r, params);
    Ok((res <= params.eps_res).then_some(p.x))
}
