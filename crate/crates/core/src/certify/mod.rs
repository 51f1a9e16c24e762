//! Certification engines: quasidensity gaps, monotonicity and maximality,
//! local maximality searches, strong maximality and surjectivity.

mod gap;
mod grid;
mod local;
mod monotone;
mod strong;
mod surjective;

use serde::{Deserialize, Serialize};

use crate::space::{PairPoint, EPS_NUM};

pub use gap::{gap, gap_landscape, gap_with, is_quasidense, GapResult};
pub use grid::{standard_probe_grid, target_grid, SearchBox};
pub use local::{fp_violation_search, fpv_violation_search, BoxFamily};
pub use monotone::{is_monotone, maximality_violation_search, OFF_GRAPH_MARGIN};
pub use strong::{default_instances, strong_maximality_check, Side, StrongInstance};
pub use surjective::{resolvent_solve, surjectivity_check};

/// Property a report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyTag {
    Monotone,
    Maximal,
    Quasidense,
    Fpv,
    Fp,
    StronglyMaximal,
    Surjective,
}

impl PropertyTag {
    pub const ALL: [PropertyTag; 7] = [
        PropertyTag::Monotone,
        PropertyTag::Maximal,
        PropertyTag::Quasidense,
        PropertyTag::Fpv,
        PropertyTag::Fp,
        PropertyTag::StronglyMaximal,
        PropertyTag::Surjective,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyTag::Monotone => "monotone",
            PropertyTag::Maximal => "maximal",
            PropertyTag::Quasidense => "quasidense",
            PropertyTag::Fpv => "fpv",
            PropertyTag::Fp => "fp",
            PropertyTag::StronglyMaximal => "strongly-maximal",
            PropertyTag::Surjective => "surjective",
        }
    }

    pub fn parse(s: &str) -> Option<PropertyTag> {
        PropertyTag::ALL.into_iter().find(|t| t.name() == s)
    }

    /// Position in the order certifications are run.
    pub fn rank(self) -> usize {
        PropertyTag::ALL.iter().position(|t| *t == self).unwrap_or(usize::MAX)
    }
}

impl std::fmt::Display for PropertyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of a certification. Searches that find nothing report `Pass`
/// only in the sense that no violation exists at the searched scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    /// A precondition (such as monotonicity) does not hold.
    NotApplicable,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
            Verdict::NotApplicable => "not-applicable",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Concrete evidence attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A point of `E x E*`, e.g. monotonically related but off the graph.
    Point { point: PairPoint },
    /// Two graph points with negative pairing of differences.
    Pair { first: PairPoint, second: PairPoint, pairing: f64 },
    Gap(GapResult),
    /// An open box (in `E` for FPV, in `E*` for FP) and a violating point.
    Neighbourhood { lo: Vec<f64>, hi: Vec<f64>, point: PairPoint },
    /// A target missed by the range, with the best residual reached.
    Target { target: Vec<f64>, residual: f64 },
    /// A strong-maximality instance whose premise holds but whose
    /// conclusion fails.
    Instance { instance: StrongInstance },
}

/// Tunable radii, grids and tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertParams {
    /// Base truncation radius of the graph.
    pub radius: f64,
    /// Grid nodes per unit length on graph charts.
    pub density: f64,
    /// Pass threshold for converged gaps.
    pub tol: f64,
    /// Radius-doubling stabilization threshold for gaps.
    pub eps_gap: f64,
    pub eps_num: f64,
    /// Residual threshold for surjectivity and resolvent solves.
    pub eps_res: f64,
    /// How many times the base radius may be doubled.
    pub max_doublings: usize,
    /// Seeds refined by local descent.
    pub seeds: usize,
    pub max_iter: usize,
    /// Grid nodes per chart.
    pub chart_budget: usize,
    /// Candidate points per search.
    pub candidate_budget: usize,
    /// Half-width of the default search boxes in `E x E*`.
    pub search_half_width: f64,
    /// Probe grid half-width and nodes per axis.
    pub probe_half_width: f64,
    pub probe_points: usize,
}

impl Default for CertParams {
    fn default() -> Self {
        CertParams {
            radius: 16.0,
            density: 4.0,
            tol: 1e-5,
            eps_gap: 1e-6,
            eps_num: EPS_NUM,
            eps_res: 1e-7,
            max_doublings: 8,
            seeds: 8,
            max_iter: 200,
            chart_budget: 1024,
            candidate_budget: 6561,
            search_half_width: 4.0,
            probe_half_width: 3.0,
            probe_points: 13,
        }
    }
}

/// Result of one certification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub property: PropertyTag,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub parameters: CertParams,
    /// Items examined (probes, candidates, targets, instances or pairs).
    pub examined: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CertReport {
    pub(crate) fn new(property: PropertyTag, verdict: Verdict, params: &CertParams) -> CertReport {
        CertReport { property, verdict, witnesses: vec![], parameters: *params, examined: 0, note: None }
    }

    pub(crate) fn with_witness(mut self, w: Witness) -> CertReport {
        self.witnesses.push(w);
        self
    }

    pub(crate) fn examined(mut self, n: usize) -> CertReport {
        self.examined = n;
        self
    }

    pub(crate) fn note(mut self, note: impl Into<String>) -> CertReport {
        self.note = Some(note.into());
        self
    }

    /// Report for a check whose precondition failed.
    pub fn not_applicable(property: PropertyTag, params: &CertParams, reason: impl Into<String>) -> CertReport {
        CertReport::new(property, Verdict::NotApplicable, params).note(reason)
    }
}
