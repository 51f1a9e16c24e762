//! Local maximality searches over families of open boxes: type (FPV) on the
//! primal side and type (FP) on the dual side.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::SearchBox;
use super::monotone::{require_monotone, Screen, CANDIDATE_CHUNK};
use super::{CertParams, CertReport, PropertyTag, Verdict, Witness};
use crate::error::Result;
use crate::operators::{self, Operator, OperatorSpec};
use crate::space::PairPoint;

/// Axis-aligned open boxes `center +- half_width`, iterated width-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxFamily {
    pub centers: Vec<Vec<f64>>,
    pub half_widths: Vec<f64>,
}

impl BoxFamily {
    /// Centers on `{-2, 0, 2}^dim` and half-widths `1/2, 1, 2, 4` plus one box
    /// covering the whole truncated graph.
    pub fn standard(dim: usize, radius: f64) -> BoxFamily {
        let mut centers: Vec<Vec<f64>> = vec![Vec::new()];
        for _ in 0..dim {
            centers = centers
                .into_iter()
                .flat_map(|c| {
                    [-2.0, 0.0, 2.0].into_iter().map(move |v| {
                        let mut d = c.clone();
                        d.push(v);
                        d
                    })
                })
                .collect();
        }
        BoxFamily { centers, half_widths: vec![0.5, 1.0, 2.0, 4.0, 2.0 * radius] }
    }

    pub fn boxes(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        let mut out = Vec::new();
        for &h in &self.half_widths {
            for c in &self.centers {
                out.push((c.iter().map(|v| v - h).collect(), c.iter().map(|v| v + h).collect()));
            }
        }
        out
    }
}

fn inside_open(lo: &[f64], hi: &[f64], x: &[f64], margin: f64) -> bool {
    x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| *l + margin < *v && *v < *h - margin)
}

/// Box corners and the violating point.
type Violation = (Vec<f64>, Vec<f64>, PairPoint);

/// First `(U, (w, w*))` with `w in U`, `(w, w*)` clear of the graph and
/// `<s - w, s* - w*> >= 0` for every graph point with `s in U`.
fn search(
    op: &Operator,
    family: &BoxFamily,
    radius: f64,
    params: &CertParams,
    property: PropertyTag,
) -> Result<(CertReport, Option<Violation>)> {
    let screen = Screen::new(op, radius, params)?;
    let candidates = SearchBox::cube(op.dim(), params.search_half_width).candidates(params.candidate_budget);
    let mut examined = 0usize;
    for (lo, hi) in family.boxes() {
        if !screen.seeds.iter().any(|s| inside_open(&lo, &hi, &s.point.x, 0.0)) {
            continue;
        }
        let margin = 1e-3 * hi.iter().zip(&lo).map(|(h, l)| h - l).fold(f64::INFINITY, f64::min);
        let local: Vec<&PairPoint> = candidates.iter().filter(|w| inside_open(&lo, &hi, &w.x, margin)).collect();
        let keep = |p: &PairPoint| inside_open(&lo, &hi, &p.x, 0.0);
        for chunk in local.chunks(CANDIDATE_CHUNK) {
            let found: Vec<bool> = chunk
                .par_iter()
                .map(|w| {
                    operators::contains(op, w) == Ok(false)
                        && screen.related(w, &keep, params)
                        && screen.clear_of_graph(w, params)
                })
                .collect();
            for (k, hit) in found.into_iter().enumerate() {
                examined += 1;
                if hit {
                    let report = CertReport::new(property, Verdict::Fail, params).examined(examined);
                    return Ok((report, Some((lo, hi, chunk[k].clone()))));
                }
            }
        }
    }
    Ok((CertReport::new(property, Verdict::Pass, params).examined(examined), None))
}

/// Type (FPV) violation search: a pass means no violation in the family.
pub fn fpv_violation_search(op: &Operator, family: &BoxFamily, radius: f64, params: &CertParams) -> Result<CertReport> {
    require_monotone(op, radius, params)?;
    let (report, hit) = search(op, family, radius, params, PropertyTag::Fpv)?;
    Ok(match hit {
        Some((lo, hi, point)) => report.with_witness(Witness::Neighbourhood { lo, hi, point }),
        None => report,
    })
}

/// Type (FP) violation search, with the boxes in the dual space.
pub fn fp_violation_search(op: &Operator, family: &BoxFamily, radius: f64, params: &CertParams) -> Result<CertReport> {
    require_monotone(op, radius, params)?;
    let inverse = Operator { space: op.space.dual(), spec: OperatorSpec::Inverse(Box::new(op.spec.clone())) };
    let (report, hit) = search(&inverse, family, radius, params, PropertyTag::Fp)?;
    Ok(match hit {
        Some((lo, hi, point)) => report.with_witness(Witness::Neighbourhood { lo, hi, point: point.swapped() }),
        None => report,
    })
}
