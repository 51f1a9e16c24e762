//! Operator description files and run reports.
//!
//! An operator file is a JSON document:
//!
//! ```json
//! {
//!   "space": {"dim": 2, "p": 1},
//!   "operator": {"restrict": {"inner": {"duality_map": {"dim": 2, "p": 1}}, "region": "union_of_axes"}},
//!   "parameters": {"radius": 16, "tol": 1e-5}
//! }
//! ```

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::certify::{CertParams, GapResult, Witness};
use crate::corpus::CheckRecord;
use crate::error::{Error, Result};
use crate::operators::{Operator, OperatorSpec};
use crate::space::{PairPoint, Space};

/// Optional overrides of the default certification parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileParameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_res: Option<f64>,
    /// Nodes per axis of the tensor probe grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_half_width: Option<f64>,
    /// Explicit probes; replace the tensor grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<PairPoint>>,
    /// Explicit surjectivity targets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<Vec<f64>>>,
}

impl FileParameters {
    pub fn apply(&self, params: &mut CertParams) {
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut params.radius, self.radius);
        set(&mut params.density, self.density);
        set(&mut params.tol, self.tol);
        set(&mut params.eps_gap, self.eps_gap);
        set(&mut params.eps_res, self.eps_res);
        set(&mut params.probe_half_width, self.probe_half_width);
        if let Some(k) = self.probe_points {
            params.probe_points = k;
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        for (name, v) in [
            ("radius", self.radius),
            ("density", self.density),
            ("tol", self.tol),
            ("eps_gap", self.eps_gap),
            ("eps_res", self.eps_res),
            ("probe_half_width", self.probe_half_width),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(parse_error(&format!("parameters.{name}"), "must be a positive number"));
                }
            }
        }
        if self.probe_points == Some(0) {
            return Err(parse_error("parameters.probe_points", "must be at least 1"));
        }
        for (i, p) in self.probes.iter().flatten().enumerate() {
            if p.x.len() != dim || p.xstar.len() != dim {
                return Err(parse_error(&format!("parameters.probes[{i}]"), format!("expected dimension {dim}")));
            }
        }
        for (i, t) in self.targets.iter().flatten().enumerate() {
            if t.len() != dim {
                return Err(parse_error(&format!("parameters.targets[{i}]"), format!("expected dimension {dim}")));
            }
        }
        Ok(())
    }
}

fn parse_error(path: &str, message: impl std::fmt::Display) -> Error {
    Error::Parse { path: path.to_string(), message: message.to_string() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub space: Space,
    pub operator: OperatorSpec,
    #[serde(default)]
    pub parameters: FileParameters,
}

impl OperatorFile {
    /// Parses and validates; syntax errors carry line and column, semantic
    /// errors a dotted path into the document.
    pub fn parse(text: &str) -> Result<OperatorFile> {
        let file: OperatorFile = serde_json::from_str(text)
            .map_err(|e| parse_error(&format!("line {} column {}", e.line(), e.column()), e))?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<()> {
        if self.space.dim == 0 {
            return Err(parse_error("space.dim", "must be at least 1"));
        }
        let n = self.operator.validate("operator").map_err(|e| match e {
            Error::InvalidInput(msg) => match msg.split_once(": ") {
                Some((path, rest)) => parse_error(path, rest),
                None => parse_error("operator", msg),
            },
            other => parse_error("operator", other),
        })?;
        if n != self.space.dim {
            return Err(parse_error("operator", format!("has dimension {n} but space.dim is {}", self.space.dim)));
        }
        self.parameters.validate(n)
    }

    pub fn operator(&self) -> Operator {
        Operator { space: self.space, spec: self.operator.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("operator files serialize")
    }
}

/// Lowercase hex SHA-256.
pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Results of one invocation; deterministic given input, parameters and
/// version (wall-clock timing is deliberately left out).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub input_digest: String,
    pub checks: Vec<CheckRecord>,
}

impl RunReport {
    pub fn new(input: &[u8], checks: Vec<CheckRecord>) -> RunReport {
        RunReport {
            tool: "qdense".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            input_digest: digest(input),
            checks,
        }
    }

    pub fn all_match(&self) -> bool {
        self.checks.iter().all(CheckRecord::matches)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}  input {}\n", self.tool, self.version, &self.input_digest[..16]);
        for c in &self.checks {
            let subject = match c.subject {
                crate::corpus::Subject::Operator => String::new(),
                crate::corpus::Subject::PlusDuality => " (S + J)".into(),
            };
            let status = match c.expected {
                None => String::new(),
                Some(v) if v == c.report.verdict => format!("  [expected {v}: ok]"),
                Some(v) => format!("  [expected {v}: MISMATCH]"),
            };
            out.push_str(&format!(
                "{}{}: {} {}{}\n",
                c.source, subject, c.report.property, c.report.verdict, status
            ));
            for w in &c.report.witnesses {
                out.push_str(&format!("    witness {}\n", describe_witness(w)));
            }
            if let Some(n) = &c.report.note {
                out.push_str(&format!("    note: {n}\n"));
            }
            if let Some(n) = &c.note {
                out.push_str(&format!("    caveat: {n}\n"));
            }
        }
        out
    }

    /// One row per check; witness coordinates flattened into one field.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["source", "subject", "property", "verdict", "expected", "matched", "witness"])
            .expect("in-memory write");
        for c in &self.checks {
            let subject = match c.subject {
                crate::corpus::Subject::Operator => "operator",
                crate::corpus::Subject::PlusDuality => "plus-duality",
            };
            let witness = c.report.witnesses.first().map(describe_witness).unwrap_or_default();
            w.write_record([
                c.source.as_str(),
                subject,
                c.report.property.name(),
                c.report.verdict.name(),
                c.expected.map_or("", |v| v.name()),
                if c.matches() { "true" } else { "false" },
                witness.as_str(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

fn vec_str(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|a| format!("{a}")).collect();
    format!("({})", parts.join(", "))
}

fn pair_str(p: &PairPoint) -> String {
    format!("({}, {})", vec_str(&p.x), vec_str(&p.xstar))
}

pub fn describe_witness(w: &Witness) -> String {
    match w {
        Witness::Point { point } => format!("point {}", pair_str(point)),
        Witness::Pair { first, second, pairing } => {
            format!("pair {} {} with pairing {pairing}", pair_str(first), pair_str(second))
        }
        Witness::Gap(g) => format!(
            "gap {} at probe {} (minimizer {}, radius {}, converged {})",
            g.gap,
            pair_str(&g.probe),
            pair_str(&g.minimizer),
            g.radius_used,
            g.converged
        ),
        Witness::Neighbourhood { lo, hi, point } => {
            format!("box {}..{} with point {}", vec_str(lo), vec_str(hi), pair_str(point))
        }
        Witness::Target { target, residual } => format!("target {} missed, residual {residual}", vec_str(target)),
        Witness::Instance { instance } => {
            let verts: Vec<String> = instance.vertices.iter().map(|v| vec_str(v)).collect();
            format!("{:?}-side point {} against conv{{{}}}", instance.side, vec_str(&instance.point), verts.join(", "))
        }
    }
}

/// 17 significant digits.
fn full(v: f64) -> String {
    format!("{v:.16e}")
}

/// Gap landscape rows `x_1..x_n, xstar_1..xstar_n, gap, converged`.
pub fn gap_csv(rows: &[GapResult]) -> String {
    let n = rows.first().map_or(0, |r| r.probe.dim());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.extend((1..=n).map(|i| format!("xstar{i}")));
    header.push("gap".into());
    header.push("converged".into());
    w.write_record(&header).expect("in-memory write");
    for r in rows {
        let mut rec: Vec<String> = r.probe.x.iter().chain(&r.probe.xstar).map(|v| full(*v)).collect();
        rec.push(full(r.gap));
        rec.push(r.converged.to_string());
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    const AXES: &str = r#"{
        "space": {"dim": 2, "p": 1},
        "operator": {"restrict": {"inner": {"duality_map": {"dim": 2, "p": 1}}, "region": "union_of_axes"}}
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let f = OperatorFile::parse(AXES).unwrap();
        let again = OperatorFile::parse(&f.to_json()).unwrap();
        assert_eq!(f, again);
        assert_eq!(again.to_json(), f.to_json());
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = OperatorFile::parse("{\n  \"space\": {\"dim\": 1, \"p\": 2},\n  \"operator\": oops\n}").unwrap_err();
        match err {
            Error::Parse { path, .. } => assert!(path.starts_with("line 3"), "{path}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors_carry_a_path() {
        let text = r#"{"space": {"dim": 1, "p": 2},
            "operator": {"scale": {"inner": {"zero": {"dim": 1}}, "factor": -1}}}"#;
        match OperatorFile::parse(text).unwrap_err() {
            Error::Parse { path, .. } => assert_eq!(path, "operator.scale.factor"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn digest_is_hex_sha256() {
        assert_eq!(digest(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
