//! Fitzpatrick functions, their conjugates and Fitzpatrick-extension
//! membership, all by truncated suprema over graph samples.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::nelder_mead::{minimize, Options};
use crate::operators::{GraphModel, Operator, Seed};
use crate::space::{dot, PairPoint, Space};

/// A truncated supremum. When `saturated` is set the supremum was still
/// growing at the truncation boundary and `value` is only a lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitzEval {
    pub point: PairPoint,
    pub value: ExtReal,
    pub radius: f64,
    pub saturated: bool,
}

/// Outcome of an extension-membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Member,
    NonMember,
    Inconclusive,
}

/// Truncation and grid settings for Fitzpatrick computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitzParams {
    /// Outer truncation radius; the inner supremum uses twice this.
    pub radius: f64,
    /// Graph sampling density (nodes per unit).
    pub density: f64,
    /// Step of the outer grid over `[-radius, radius]^(2n)`.
    pub step: f64,
    /// Cap on the number of outer grid cells.
    pub table_budget: usize,
    /// Growth on the outer shell below this is not counted as saturation.
    pub saturation_tol: f64,
}

impl Default for FitzParams {
    fn default() -> Self {
        FitzParams { radius: 4.0, density: 4.0, step: 0.05, table_budget: 40_000, saturation_tol: 1e-7 }
    }
}

fn refine_opts() -> Options {
    Options { max_iter: 200, ftol: 1e-14, xtol: 1e-11, ..Options::default() }
}

/// `<s, x*> + <x, s*> - <s, s*>`
fn integrand(s: &PairPoint, x: &[f64], xstar: &[f64]) -> f64 {
    dot(&s.x, xstar) + dot(x, &s.xstar) - s.pairing()
}

/// The two largest scores, ties broken towards the smaller index.
#[derive(Default)]
struct TopTwo {
    first: Option<(f64, usize)>,
    second: Option<(f64, usize)>,
}

impl TopTwo {
    fn offer(&mut self, v: f64, i: usize) {
        let beats = |slot: &Option<(f64, usize)>| slot.is_none_or(|(w, _)| v > w);
        if beats(&self.first) {
            self.second = self.first.replace((v, i));
        } else if beats(&self.second) {
            self.second = Some((v, i));
        }
    }

    fn best(&self) -> f64 {
        self.first.map_or(f64::NEG_INFINITY, |(v, _)| v)
    }

    fn indices(&self) -> impl Iterator<Item = usize> {
        self.first.into_iter().chain(self.second).map(|(_, i)| i)
    }
}

/// `phi_S` truncated to the product-norm ball of radius `radius`.
struct Phi {
    model: GraphModel,
    seeds: Vec<Seed>,
    norms: Vec<f64>,
    space: Space,
    radius: f64,
    shell: f64,
    saturation_tol: f64,
}

impl Phi {
    fn new(op: &Operator, radius: f64, density: f64, saturation_tol: f64) -> Result<Phi> {
        let model = GraphModel::build(&op.spec, radius)?;
        let seeds: Vec<Seed> = model
            .tagged_grid(density, 4096)
            .into_iter()
            .filter(|s| op.space.product_norm(&s.point).is_ok_and(|r| r <= radius))
            .collect();
        if seeds.is_empty() {
            return Err(Error::NoSamples { radius });
        }
        let norms = seeds.iter().map(|s| op.space.product_norm(&s.point).unwrap_or(f64::INFINITY)).collect();
        let shell = radius - (2.0 / density).max(radius / 8.0);
        Ok(Phi { model, seeds, norms, space: op.space, radius, shell, saturation_tol })
    }

    fn inside(&self, p: &PairPoint) -> bool {
        self.space.product_norm(p).is_ok_and(|r| r <= self.radius)
    }

    fn eval(&self, x: &[f64], xstar: &[f64]) -> (f64, bool) {
        let mut interior = f64::NEG_INFINITY;
        let mut outer = f64::NEG_INFINITY;
        let mut top = TopTwo::default();
        for (i, (s, r)) in self.seeds.iter().zip(&self.norms).enumerate() {
            let v = integrand(&s.point, x, xstar);
            if *r <= self.shell {
                interior = interior.max(v);
            } else {
                outer = outer.max(v);
            }
            top.offer(v, i);
        }
        let saturated = outer > interior + self.saturation_tol * (1.0 + interior.abs());
        let mut best = top.best();
        for i in top.indices() {
            let (v, _) = self.model.refine(
                &self.seeds[i],
                |p| if self.inside(p) { -integrand(p, x, xstar) } else { f64::INFINITY },
                refine_opts(),
            );
            best = best.max(-v);
        }
        (best, saturated)
    }
}

/// `phi_S(x, x*) = sup over G(S) of <s, x*> + <x, s*> - <s, s*>`, truncated
/// at product-norm radius `radius`.
pub fn fitzpatrick_value(op: &Operator, pp: &PairPoint, radius: f64) -> Result<FitzEval> {
    pp.check(&op.space)?;
    let params = FitzParams::default();
    let phi = Phi::new(op, radius, params.density, params.saturation_tol)?;
    let (v, saturated) = phi.eval(&pp.x, &pp.xstar);
    Ok(FitzEval { point: pp.clone(), value: ExtReal::new(v), radius, saturated })
}

/// Evaluator of `phi_S^*` with the outer grid of `phi_S` values cached.
pub struct FitzpatrickConjugate {
    phi: Phi,
    params: FitzParams,
    /// Outer grid cells with finite, unsaturated `phi_S`.
    table: Vec<(Vec<f64>, f64)>,
    /// Marks cells on the boundary layer of the outer box.
    on_shell: Vec<bool>,
    dim: usize,
}

impl FitzpatrickConjugate {
    pub fn new(op: &Operator, params: FitzParams) -> Result<FitzpatrickConjugate> {
        if !(params.radius > 0.0 && params.step > 0.0 && params.density > 0.0) {
            return Err(Error::InvalidInput("radius, step and density must be positive".into()));
        }
        let phi = Phi::new(op, 2.0 * params.radius, params.density, params.saturation_tol)?;
        let n = op.dim();
        let natural = (2.0 * params.radius / params.step).round() as usize + 1;
        let cap = (params.table_budget as f64).powf(1.0 / (2 * n) as f64).floor() as usize;
        let mut per_axis = natural.min(cap).max(3);
        if per_axis < natural && per_axis.is_multiple_of(2) {
            per_axis -= 1;
        }
        let r = params.radius;
        let level = |k: usize| {
            let m = (per_axis - 1) as f64;
            (-r * (m - k as f64) + r * k as f64) / m
        };
        let total = per_axis.pow(2 * n as u32);
        let cells: Vec<Vec<f64>> = (0..total)
            .map(|mut idx| {
                let mut z = vec![0.0; 2 * n];
                for slot in z.iter_mut().rev() {
                    *slot = level(idx % per_axis);
                    idx /= per_axis;
                }
                z
            })
            .collect();
        let evaluated: Vec<Option<(Vec<f64>, f64, bool)>> = cells
            .into_par_iter()
            .map(|z| {
                let (v, sat) = phi.eval(&z[..n], &z[n..]);
                let shell = z.iter().any(|c| c.abs() >= r - 0.5 * (2.0 * r / (per_axis - 1) as f64));
                (!sat && v.is_finite()).then_some((z, v, shell))
            })
            .collect();
        let mut table = Vec::new();
        let mut on_shell = Vec::new();
        for (z, v, shell) in evaluated.into_iter().flatten() {
            table.push((z, v));
            on_shell.push(shell);
        }
        if table.is_empty() {
            return Err(Error::NoSamples { radius: params.radius });
        }
        Ok(FitzpatrickConjugate { phi, params, table, on_shell, dim: n })
    }

    pub fn params(&self) -> &FitzParams {
        &self.params
    }

    fn target(&self, z: &[f64], dual_pp: &PairPoint) -> f64 {
        let n = self.dim;
        dot(&z[..n], &dual_pp.x) + dot(&z[n..], &dual_pp.xstar)
    }

    /// Best table cell and the saturation flag, without refinement.
    fn scan(&self, dual_pp: &PairPoint) -> (f64, Option<usize>, bool) {
        let mut interior = f64::NEG_INFINITY;
        let mut outer = f64::NEG_INFINITY;
        let mut top = TopTwo::default();
        for (i, ((z, phi), shell)) in self.table.iter().zip(&self.on_shell).enumerate() {
            let v = self.target(z, dual_pp) - phi;
            if *shell {
                outer = outer.max(v);
            } else {
                interior = interior.max(v);
            }
            top.offer(v, i);
        }
        let saturated = outer > interior + self.params.saturation_tol * (1.0 + interior.abs());
        (top.best(), top.indices().next(), saturated)
    }

    /// `phi_S^*(y*, y**) = sup <x, y*> + <x*, y**> - phi_S(x, x*)` over the
    /// outer box.
    pub fn value(&self, dual_pp: &PairPoint) -> Result<FitzEval> {
        dual_pp.check(&self.phi.space)?;
        let (table_best, start, saturated) = self.scan(dual_pp);
        let value = self.refine(dual_pp, table_best, start);
        Ok(FitzEval { point: dual_pp.clone(), value: ExtReal::new(value), radius: self.params.radius, saturated })
    }

    /// Local ascent from the best cell; `phi_S` is convex, so the target is
    /// concave and one start suffices.
    fn refine(&self, dual_pp: &PairPoint, table_best: f64, start: Option<usize>) -> f64 {
        let Some(i) = start else {
            return table_best;
        };
        let n = self.dim;
        let r = self.params.radius;
        let bounds = vec![(-r, r); 2 * n];
        let step = vec![self.params.step; 2 * n];
        let m = minimize(
            |z| {
                let (phi, sat) = self.phi.eval(&z[..n], &z[n..]);
                if sat {
                    f64::INFINITY
                } else {
                    phi - self.target(z, dual_pp)
                }
            },
            &self.table[i].0,
            &bounds,
            &step,
            refine_opts(),
        );
        table_best.max(-m.value)
    }

    /// `(y*, y**) in G(S^F)` iff `phi_S^*(y*, y**) = <y*, y**>`.
    ///
    /// A saturated value is a lower bound, so exceeding the pairing by more
    /// than `tol` still decides non-membership. Refinement only raises the
    /// value, so a table maximum already above the pairing decides it too.
    pub fn membership(&self, dual_pp: &PairPoint, tol: f64) -> Result<Membership> {
        dual_pp.check(&self.phi.space)?;
        let p = dual_pp.pairing();
        let (table_best, start, saturated) = self.scan(dual_pp);
        if table_best - p > tol {
            return Ok(Membership::NonMember);
        }
        let v = self.refine(dual_pp, table_best, start);
        Ok(if v - p > tol {
            Membership::NonMember
        } else if saturated {
            Membership::Inconclusive
        } else if (v - p).abs() <= tol {
            Membership::Member
        } else {
            Membership::NonMember
        })
    }
}

/// One-shot [`FitzpatrickConjugate::value`] at outer radius `radius`.
pub fn fitzpatrick_conjugate_value(op: &Operator, dual_pp: &PairPoint, radius: f64) -> Result<FitzEval> {
    let params = FitzParams { radius, ..FitzParams::default() };
    FitzpatrickConjugate::new(op, params)?.value(dual_pp)
}

/// One-shot [`FitzpatrickConjugate::membership`] at outer radius `radius`.
pub fn fit_extension_contains(op: &Operator, dual_pp: &PairPoint, radius: f64, tol: f64) -> Result<Membership> {
    let params = FitzParams { radius, ..FitzParams::default() };
    FitzpatrickConjugate::new(op, params)?.membership(dual_pp, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::OperatorSpec;

    fn identity() -> Operator {
        Operator::new(Space::l2(1), OperatorSpec::identity(1)).unwrap()
    }

    #[test]
    fn identity_fitzpatrick_closed_form() {
        for (x, xs) in [(1.0, 1.0), (0.0, 0.0), (0.5, -1.5), (2.0, 0.3)] {
            let e = fitzpatrick_value(&identity(), &PairPoint::scalar(x, xs), 16.0).unwrap();
            let want = (x + xs) * (x + xs) / 4.0;
            assert!((e.value.to_f64() - want).abs() < 1e-9, "({x},{xs}) {e:?}");
            assert!(!e.saturated);
        }
    }

    #[test]
    fn unbounded_sup_is_saturated() {
        let op = Operator::new(Space::l2(1), OperatorSpec::subdifferential(crate::convex::ScalarForm::Abs, 1)).unwrap();
        let e = fitzpatrick_value(&op, &PairPoint::scalar(0.0, 1.5), 16.0).unwrap();
        assert!(e.saturated);
        let e = fitzpatrick_value(&op, &PairPoint::scalar(0.7, 0.5), 16.0).unwrap();
        assert!(!e.saturated);
        assert!((e.value.to_f64() - 0.7).abs() < 1e-9);
    }
}
