//! Named example operators with their expected certification outcomes. The
//! collection doubles as the regression suite.

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::certify::{
    default_instances, fp_violation_search, fpv_violation_search, is_monotone, is_quasidense,
    maximality_violation_search, standard_probe_grid, strong_maximality_check, surjectivity_check, target_grid,
    BoxFamily, CertParams, CertReport, PropertyTag, SearchBox, Side, StrongInstance, Verdict, Witness,
};
use crate::convex::{ConvexFunction, ScalarForm};
use crate::error::{Error, Result};
use crate::operators::{Operator, OperatorSpec, Region, SmoothForm, SmoothFunction};
use crate::space::{PairPoint, Space};

/// What a check is run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subject {
    Operator,
    /// `S + J`; in Hilbert space this is `S + I`.
    PlusDuality,
}

/// One expected certification outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub property: PropertyTag,
    pub subject: Subject,
    /// Surjectivity targets; defaults to the 9 x 9 grid on `[-2, 2]^n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<Vec<f64>>>,
    pub verdict: Verdict,
}

impl Expectation {
    fn on(property: PropertyTag, verdict: Verdict) -> Expectation {
        Expectation { property, subject: Subject::Operator, targets: None, verdict }
    }

    fn plus_duality(targets: Option<Vec<Vec<f64>>>, verdict: Verdict) -> Expectation {
        Expectation { property: PropertyTag::Surjective, subject: Subject::PlusDuality, targets, verdict }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub operator: Operator,
    pub expected: Vec<Expectation>,
    /// Where the example comes from, in mathematical terms.
    pub provenance: String,
    /// Caveat carried verbatim into every report for this entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn scalar(spec: OperatorSpec) -> Operator {
    Operator::new(Space::l2(1), spec).expect("corpus operators are well-formed")
}

/// `x -> {-2 lambda x}`, the gradient of `-lambda x^2`; quasidense iff
/// `lambda != 1/2`, monotone iff `lambda <= 0`.
pub fn lambda_quadratic(lambda: f64) -> CorpusEntry {
    let spec = if lambda == 0.0 {
        OperatorSpec::Zero { dim: 1 }
    } else {
        OperatorSpec::Gradient(SmoothFunction::polynomial(vec![0.0, 0.0, -lambda]))
    };
    let qd = if lambda == 0.5 { Verdict::Fail } else { Verdict::Pass };
    let mono = if lambda <= 0.0 { Verdict::Pass } else { Verdict::Fail };
    CorpusEntry {
        name: format!("lambda-quadratic-{lambda}"),
        operator: scalar(spec),
        expected: vec![Expectation::on(PropertyTag::Monotone, mono), Expectation::on(PropertyTag::Quasidense, qd)],
        provenance: format!("gradient of -{lambda} x^2 on R; quasidense exactly when lambda != 1/2"),
        note: None,
    }
}

/// `x -> {1/x - x}` on `R \ {0}`: quasidense, while `S + I = 1/x` misses 0.
pub fn reciprocal_minus_identity() -> CorpusEntry {
    let spec = OperatorSpec::Gradient(SmoothFunction { dim: 1, form: SmoothForm::LogAbsMinusHalfSquare });
    CorpusEntry {
        name: "reciprocal-minus-identity".into(),
        operator: scalar(spec),
        expected: vec![
            Expectation::on(PropertyTag::Quasidense, Verdict::Pass),
            Expectation::plus_duality(Some(vec![vec![0.0]]), Verdict::Fail),
            Expectation::plus_duality(
                Some([-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0].iter().map(|&t| vec![t]).collect()),
                Verdict::Pass,
            ),
        ],
        provenance: "Hilbert-space operator 1/x - x: quasidense with dense but non-surjective range of S + I".into(),
        note: None,
    }
}

/// The duality map of `l^1(2)` restricted to the union of the two axes.
pub fn axes_operator() -> CorpusEntry {
    let spec = OperatorSpec::DualityMap(Space::l1(2)).restrict(Region::UnionOfAxes);
    let op = Operator::new(Space::l1(2), spec).expect("well-formed");
    use PropertyTag::*;
    CorpusEntry {
        name: "axes-operator".into(),
        operator: op,
        expected: vec![
            Expectation::on(Monotone, Verdict::Pass),
            Expectation::on(Maximal, Verdict::Fail),
            Expectation::on(Quasidense, Verdict::Fail),
            Expectation::on(Fpv, Verdict::Fail),
            Expectation::on(Fp, Verdict::Fail),
            Expectation::on(StronglyMaximal, Verdict::Fail),
            Expectation::on(Surjective, Verdict::Pass),
            Expectation::plus_duality(None, Verdict::Pass),
        ],
        provenance: "duality map of l^1 on R^2 restricted to the union of the axes: S and S + J surjective, \
                     S monotone but neither maximal nor quasidense"
            .into(),
        note: None,
    }
}

/// Caveat attached to every truncated tail operator.
pub const TAIL_CAVEAT: &str = "The infinite tail operator (Tx)_n = sum_{k>=n} x_k from l^1 to l^inf is maximally \
monotone but not quasidense; that failure is infinite-dimensional and outside numeric scope. Finite truncations \
are certified only for monotonicity and maximality at scale.";

/// Upper-triangular ones matrix on `l^1(n)`: `(Tx)_i = sum_{k >= i} x_k`.
pub fn truncated_tail(n: usize) -> Result<CorpusEntry> {
    if n == 0 {
        return Err(Error::InvalidInput("tail operator needs n >= 1".into()));
    }
    let matrix = (0..n).map(|i| (0..n).map(|j| if j >= i { 1.0 } else { 0.0 }).collect()).collect();
    let op = Operator::new(Space::l1(n), OperatorSpec::Affine { matrix, offset: vec![0.0; n] })?;
    Ok(CorpusEntry {
        name: format!("truncated-tail-{n}"),
        operator: op,
        expected: vec![
            Expectation::on(PropertyTag::Monotone, Verdict::Pass),
            Expectation::on(PropertyTag::Maximal, Verdict::Pass),
        ],
        provenance: format!("finite truncation to R^{n} of the tail-sum operator on sequences"),
        note: Some(TAIL_CAVEAT.into()),
    })
}

fn subdifferential_entry(name: &str, form: ScalarForm, provenance: &str) -> CorpusEntry {
    use PropertyTag::*;
    CorpusEntry {
        name: name.into(),
        operator: scalar(OperatorSpec::Subdifferential(ConvexFunction { dim: 1, form })),
        expected: vec![
            Expectation::on(Monotone, Verdict::Pass),
            Expectation::on(Maximal, Verdict::Pass),
            Expectation::on(Quasidense, Verdict::Pass),
            Expectation::on(Fpv, Verdict::Pass),
            Expectation::on(Fp, Verdict::Pass),
            Expectation::on(StronglyMaximal, Verdict::Pass),
        ],
        provenance: provenance.into(),
        note: None,
    }
}

/// Subdifferentials of `x^2/2`, `|x|`, `x^4/4` and the indicator of `[-1, 1]`.
pub fn standard_subdifferentials() -> Vec<CorpusEntry> {
    vec![
        subdifferential_entry("subdiff-half-square", ScalarForm::HalfSquare, "subdifferential of x^2/2 (the identity)"),
        subdifferential_entry("subdiff-abs", ScalarForm::Abs, "subdifferential of |x|"),
        subdifferential_entry("subdiff-quartic", ScalarForm::quartic_quarter(), "subdifferential of x^4/4"),
        subdifferential_entry(
            "subdiff-box-indicator",
            ScalarForm::BoxIndicator { lo: -1.0, hi: 1.0 },
            "subdifferential of the indicator of [-1, 1] (its normal cone)",
        ),
    ]
}

/// `d(x^2/2) + d|x|`, a sum with overlapping domains.
pub fn sum_half_square_abs() -> CorpusEntry {
    let spec = OperatorSpec::identity(1).sum(OperatorSpec::Subdifferential(ConvexFunction::abs(1)));
    CorpusEntry {
        name: "sum-half-square-abs".into(),
        operator: scalar(spec),
        expected: vec![
            Expectation::on(PropertyTag::Monotone, Verdict::Pass),
            Expectation::on(PropertyTag::Maximal, Verdict::Pass),
            Expectation::on(PropertyTag::Quasidense, Verdict::Pass),
            Expectation::on(PropertyTag::Fpv, Verdict::Pass),
            Expectation::on(PropertyTag::Fp, Verdict::Pass),
        ],
        provenance: "sum of the subdifferentials of x^2/2 and |x|, whose domains overlap".into(),
        note: None,
    }
}

/// Every entry, in a fixed order.
pub fn all_entries() -> Vec<CorpusEntry> {
    let mut out: Vec<CorpusEntry> = [0.0, 0.25, 0.5, 0.75, 1.0].into_iter().map(lambda_quadratic).collect();
    out.push(reciprocal_minus_identity());
    out.push(axes_operator());
    out.push(truncated_tail(3).expect("n >= 1"));
    out.extend(standard_subdifferentials());
    out.push(sum_half_square_abs());
    out
}

/// Entries whose name matches `pattern` (`*` matches any run of characters).
pub fn select(pattern: Option<&str>) -> Result<Vec<CorpusEntry>> {
    let entries = all_entries();
    let Some(pattern) = pattern else {
        return Ok(entries);
    };
    let re = Regex::new(&format!("^{}$", regex::escape(pattern).replace(r"\*", ".*")))
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let picked: Vec<CorpusEntry> = entries.into_iter().filter(|e| re.is_match(&e.name)).collect();
    if picked.is_empty() {
        return Err(Error::EmptySelection(pattern.to_string()));
    }
    Ok(picked)
}

pub fn find(name: &str) -> Option<CorpusEntry> {
    all_entries().into_iter().find(|e| e.name == name)
}

/// `S + J` on the same space.
pub fn plus_duality(op: &Operator) -> Operator {
    Operator { space: op.space, spec: op.spec.clone().sum(OperatorSpec::DualityMap(op.space)) }
}

/// Inputs a property check may need beyond the operator itself.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckInputs {
    pub probes: Option<Vec<PairPoint>>,
    pub targets: Option<Vec<Vec<f64>>>,
}

/// Runs one property check with default search sets; unmet preconditions
/// give a not-applicable report.
pub fn run_property(op: &Operator, property: PropertyTag, inputs: &CheckInputs, params: &CertParams) -> Result<CertReport> {
    let n = op.dim();
    let r = params.radius;
    let outcome = match property {
        PropertyTag::Monotone => is_monotone(op, r, params),
        PropertyTag::Maximal => maximality_violation_search(op, &SearchBox::cube(n, params.search_half_width), r, params),
        PropertyTag::Quasidense => {
            let probes = match &inputs.probes {
                Some(p) => p.clone(),
                None => standard_probe_grid(n, params.probe_half_width, params.probe_points),
            };
            is_quasidense(op, &probes, params.tol, params)
        }
        PropertyTag::Fpv => fpv_violation_search(op, &BoxFamily::standard(n, r), r, params),
        PropertyTag::Fp => fp_violation_search(op, &BoxFamily::standard(n, r), r, params),
        PropertyTag::StronglyMaximal => {
            let mut instances: Vec<StrongInstance> = Vec::new();
            let maximal =
                maximality_violation_search(op, &SearchBox::cube(n, params.search_half_width), r, params);
            if let Ok(rep) = &maximal {
                for w in &rep.witnesses {
                    if let Witness::Point { point } = w {
                        instances.push(StrongInstance {
                            side: Side::Dual,
                            point: point.x.clone(),
                            vertices: vec![point.xstar.clone()],
                        });
                    }
                }
            }
            instances.extend(default_instances(op));
            strong_maximality_check(op, &instances, r, params)
        }
        PropertyTag::Surjective => {
            let targets = inputs.targets.clone().unwrap_or_else(|| target_grid(n, 2.0, 9));
            surjectivity_check(op, &targets, params.search_half_width, params)
        }
    };
    match outcome {
        Err(Error::Precondition(reason)) => Ok(CertReport::not_applicable(property, params, reason)),
        other => other,
    }
}

/// One executed check with its expectation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    /// Corpus entry or input file the check ran on.
    pub source: String,
    pub subject: Subject,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Verdict>,
    pub report: CertReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn matches(&self) -> bool {
        self.expected.is_none_or(|v| v == self.report.verdict)
    }
}

/// Runs every expectation of an entry, in dependency order.
pub fn run_entry(entry: &CorpusEntry, params: &CertParams) -> Result<Vec<CheckRecord>> {
    let mut expected = entry.expected.clone();
    expected.sort_by_key(|e| (e.property.rank(), e.subject == Subject::PlusDuality));
    let sum = plus_duality(&entry.operator);
    expected
        .par_iter()
        .map(|e| {
            let op = match e.subject {
                Subject::Operator => &entry.operator,
                Subject::PlusDuality => &sum,
            };
            let inputs = CheckInputs { probes: None, targets: e.targets.clone() };
            let report = run_property(op, e.property, &inputs, params)?;
            Ok(CheckRecord {
                source: entry.name.clone(),
                subject: e.subject,
                expected: Some(e.verdict),
                report,
                note: entry.note.clone(),
            })
        })
        .collect()
}
