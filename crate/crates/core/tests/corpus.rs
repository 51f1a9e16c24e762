use qdense_core::corpus::{self, lambda_quadratic, truncated_tail, Subject};
use qdense_core::operators::values_at;
use qdense_core::{CertParams, Error, OperatorSpec, PairPoint, Verdict};

fn tail_value(n: usize, x: &[f64]) -> Vec<f64> {
    let op = truncated_tail(n).unwrap().operator;
    let sets = values_at(&op, x).unwrap();
    assert_eq!(sets.len(), 1);
    sets[0].samples(1.0, 1).remove(0)
}

#[test]
fn zero_lambda_is_the_zero_operator() {
    assert_eq!(lambda_quadratic(0.0).operator.spec, OperatorSpec::Zero { dim: 1 });
}

#[test]
fn tail_operator_values() {
    assert_eq!(tail_value(1, &[2.5]), vec![2.5]);
    assert_eq!(tail_value(3, &[1.0, 1.0, 1.0]), vec![3.0, 2.0, 1.0]);
    for x in [[1.0, -2.0, 0.5], [0.0, 3.0, -1.0]] {
        let t = tail_value(3, &x);
        let pairing: f64 = x.iter().zip(&t).map(|(a, b)| a * b).sum();
        // <x, Tx> = ((sum x)^2 + |x|^2) / 2
        let s: f64 = x.iter().sum();
        let q: f64 = x.iter().map(|v| v * v).sum();
        assert!((pairing - 0.5 * (s * s + q)).abs() <= 1e-12);
        assert!(pairing >= 0.0);
    }
    assert!(matches!(truncated_tail(0), Err(Error::InvalidInput(_))));
}

#[test]
fn tail_entries_carry_the_caveat() {
    let e = truncated_tail(3).unwrap();
    assert_eq!(e.note.as_deref(), Some(corpus::TAIL_CAVEAT));
}

#[test]
fn selection_by_pattern() {
    let picked = corpus::select(Some("lambda*")).unwrap();
    assert_eq!(picked.len(), 5);
    assert!(picked.iter().all(|e| e.name.starts_with("lambda-quadratic-")));
    assert_eq!(corpus::select(None).unwrap().len(), corpus::all_entries().len());
    assert!(matches!(corpus::select(Some("zzz")), Err(Error::EmptySelection(_))));
    assert_eq!(corpus::select(Some("axes-operator")).unwrap().len(), 1);
}

#[test]
fn names_are_unique() {
    let mut names: Vec<String> = corpus::all_entries().into_iter().map(|e| e.name).collect();
    let n = names.len();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), n);
}

#[test]
fn every_entry_matches_its_expectations() {
    let params = CertParams::default();
    for entry in corpus::all_entries() {
        for rec in corpus::run_entry(&entry, &params).unwrap() {
            assert!(
                rec.matches(),
                "{} {} ({:?}): expected {:?}, got {}",
                rec.source,
                rec.report.property,
                rec.subject,
                rec.expected,
                rec.report.verdict
            );
        }
    }
}

#[test]
fn reciprocal_plus_identity_misses_only_zero() {
    let entry = corpus::reciprocal_minus_identity();
    let records = corpus::run_entry(&entry, &CertParams::default()).unwrap();
    let sums: Vec<_> = records.iter().filter(|r| r.subject == Subject::PlusDuality).collect();
    assert_eq!(sums.len(), 2);
    assert_eq!(sums[0].report.verdict, Verdict::Fail);
    assert_eq!(sums[1].report.verdict, Verdict::Pass);
}

#[test]
fn entries_round_trip_through_json() {
    for entry in corpus::all_entries() {
        let text = serde_json::to_string(&entry).unwrap();
        let back: corpus::CorpusEntry = serde_json::from_str(&text).unwrap();
        assert_eq!(back, entry);
    }
    let p = PairPoint::scalar(1.0, -1.0);
    assert_eq!(serde_json::from_str::<PairPoint>(&serde_json::to_string(&p).unwrap()).unwrap(), p);
}
