use proptest::prelude::*;
use qdense_core::certify::is_monotone;
use qdense_core::operators::{
    contains, duality_map_contains, duality_map_select, sample_graph, translate, SmoothForm, SmoothFunction,
};
use qdense_core::{CertParams, ConvexFunction, Operator, OperatorSpec, PairPoint, Region, ScalarForm, Space, Verdict};

fn poly(coefficients: Vec<f64>) -> OperatorSpec {
    OperatorSpec::Gradient(SmoothFunction::polynomial(coefficients))
}

fn op(space: Space, spec: OperatorSpec) -> Operator {
    Operator::new(space, spec).unwrap()
}

fn axes() -> Operator {
    op(Space::l1(2), OperatorSpec::DualityMap(Space::l1(2)).restrict(Region::UnionOfAxes))
}

fn pp(x: &[f64], xstar: &[f64]) -> PairPoint {
    PairPoint::new(x.to_vec(), xstar.to_vec())
}

#[test]
fn membership_examples() {
    let j = op(Space::l1(2), OperatorSpec::DualityMap(Space::l1(2)));
    assert!(contains(&j, &pp(&[1.0, 0.0], &[1.0, 0.5])).unwrap());
    let zero = op(Space::l2(2), OperatorSpec::Zero { dim: 2 });
    for x in [[0.0, 0.0], [3.0, -1.0], [-7.5, 2.0]] {
        assert!(contains(&zero, &pp(&x, &[0.0, 0.0])).unwrap());
        assert!(!contains(&zero, &pp(&x, &[0.0, 1e-3])).unwrap());
    }
    let grad = op(Space::l2(1), poly(vec![0.0, 0.0, -1.0]));
    assert!(contains(&grad, &PairPoint::scalar(1.0, -2.0)).unwrap());
    assert!(!contains(&grad, &PairPoint::scalar(1.0, 2.0)).unwrap());
}

#[test]
fn axes_operator_membership() {
    let s = axes();
    assert!(contains(&s, &pp(&[1.0, 0.0], &[1.0, 1.0])).unwrap());
    assert!(contains(&s, &pp(&[0.0, -2.0], &[0.5, -2.0])).unwrap());
    assert!(!contains(&s, &pp(&[1.0, 1.0], &[2.0, 2.0])).unwrap());
}

#[test]
fn duality_map_examples() {
    for x in [[0.0, 0.0], [1.0, -2.0], [0.3, 4.0]] {
        assert!(duality_map_contains(&Space::l2(2), &x, &x).unwrap());
    }
    for t in [-1.0, -0.25, 0.0, 0.9, 1.0] {
        assert!(duality_map_contains(&Space::l1(2), &[0.0, 1.0], &[t, 1.0]).unwrap());
    }
    assert!(!duality_map_contains(&Space::l1(2), &[0.0, 1.0], &[1.5, 1.0]).unwrap());
    assert!(duality_map_contains(&Space::l1(2), &[1.0, 1.0], &[2.0, 2.0]).unwrap());
    assert!(!duality_map_contains(&Space::l1(2), &[1.0, 1.0], &[2.0, 1.0]).unwrap());
}

fn sorted(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[test]
fn duality_select_examples() {
    assert_eq!(duality_map_select(&Space::l2(2), &[3.0, 4.0]).unwrap(), vec![vec![3.0, 4.0]]);
    assert_eq!(
        sorted(duality_map_select(&Space::l1(2), &[1.0, 0.0]).unwrap()),
        vec![vec![1.0, -1.0], vec![1.0, 1.0]]
    );
    for lambda in [0.5, 2.0, 3.25] {
        assert_eq!(
            sorted(duality_map_select(&Space::l1(2), &[lambda, 0.0]).unwrap()),
            vec![vec![lambda, -lambda], vec![lambda, lambda]]
        );
    }
}

#[test]
fn explicit_graph_samples_are_the_points() {
    let points = vec![pp(&[1.0], &[2.0]), pp(&[-1.0], &[0.5]), pp(&[0.0], &[0.0])];
    let s = op(Space::l2(1), OperatorSpec::ExplicitGraph { points: points.clone() });
    let g = sample_graph(&s, 10.0, 1.0).unwrap();
    let mut want = points;
    want.sort_by(|a, b| (a.x[0], a.xstar[0]).partial_cmp(&(b.x[0], b.xstar[0])).unwrap());
    assert_eq!(g.points, want);
}

#[test]
fn gradient_samples_on_a_unit_lattice() {
    let s = op(Space::l2(1), poly(vec![0.0, 0.0, -1.0]));
    let g = sample_graph(&s, 10.0, 1.0).unwrap();
    // |(k, -2k)| = sqrt(5)|k| <= 10 keeps |k| <= 4
    let want: Vec<PairPoint> = (-4..=4).map(|k| PairPoint::scalar(k as f64, -2.0 * k as f64)).collect();
    assert_eq!(g.points, want);
}

#[test]
fn axes_samples_include_the_vertices_of_p() {
    let g = sample_graph(&axes(), 16.0, 4.0).unwrap();
    for want in [pp(&[1.0, 0.0], &[1.0, 1.0]), pp(&[0.0, 1.0], &[1.0, 1.0])] {
        assert!(g.points.contains(&want), "{want:?}");
    }
    assert!(g.points.iter().all(|p| p.x.iter().filter(|v| **v != 0.0).count() <= 1));
}

#[test]
fn translation_examples() {
    let id = op(Space::l2(1), poly(vec![0.0, 0.0, 0.5]));
    let same = op(Space::l2(1), translate(&id.spec, &[0.0]).unwrap());
    assert_eq!(sample_graph(&same, 8.0, 2.0).unwrap().points, sample_graph(&id, 8.0, 2.0).unwrap().points);
    let shifted = op(Space::l2(1), translate(&id.spec, &[1.0]).unwrap());
    for t in [-2.0, 0.0, 0.5, 3.0] {
        assert!(contains(&shifted, &PairPoint::scalar(t, t + 1.0)).unwrap());
        assert!(!contains(&shifted, &PairPoint::scalar(t, t)).unwrap());
    }
    let back = op(Space::l2(1), translate(&shifted.spec, &[-1.0]).unwrap());
    for p in sample_graph(&id, 8.0, 2.0).unwrap().points {
        assert!(contains(&back, &p).unwrap());
    }
}

#[test]
fn invalid_specs_are_rejected_with_paths() {
    let bad = OperatorSpec::Translate { inner: Box::new(OperatorSpec::Zero { dim: 2 }), by: vec![1.0] };
    let err = Operator::new(Space::l2(2), bad).unwrap_err().to_string();
    assert!(err.contains("operator.translate.by"), "{err}");
    assert!(Operator::new(Space::l2(2), OperatorSpec::Zero { dim: 3 }).is_err());
    assert!(Operator::new(Space::l2(1), OperatorSpec::ExplicitGraph { points: vec![] }).is_err());
}

fn corpus_specs() -> Vec<Operator> {
    vec![
        op(Space::l2(1), OperatorSpec::identity(1)),
        op(Space::l2(1), OperatorSpec::subdifferential(ScalarForm::Abs, 1)),
        op(Space::l2(1), OperatorSpec::subdifferential(ScalarForm::BoxIndicator { lo: -1.0, hi: 1.0 }, 1)),
        op(Space::l2(1), poly(vec![0.0, 0.0, -0.25])),
        op(Space::l2(1), OperatorSpec::Gradient(SmoothFunction { dim: 1, form: SmoothForm::LogAbsMinusHalfSquare })),
        op(Space::l1(2), OperatorSpec::DualityMap(Space::l1(2))),
        op(Space::linf(2), OperatorSpec::DualityMap(Space::linf(2))),
        op(Space::new(2, 3.0).unwrap(), OperatorSpec::DualityMap(Space::new(2, 3.0).unwrap())),
        axes(),
        op(Space::l2(1), OperatorSpec::identity(1).sum(OperatorSpec::subdifferential(ScalarForm::Abs, 1))),
        op(Space::l2(1), OperatorSpec::identity(1).parallel_sum(OperatorSpec::identity(1))),
        op(Space::l2(1), OperatorSpec::subdifferential(ScalarForm::Abs, 1).scale(2.0)),
        op(
            Space::l2(2),
            OperatorSpec::Affine { matrix: vec![vec![1.0, 1.0], vec![-1.0, 1.0]], offset: vec![0.5, 0.0] },
        ),
    ]
}

#[test]
fn every_sample_is_a_member() {
    for s in corpus_specs() {
        let g = sample_graph(&s, 6.0, 2.0).unwrap();
        assert!(!g.points.is_empty());
        for p in &g.points {
            assert!(contains(&s, p).unwrap(), "{} misses {p:?}", s.spec.describe());
        }
    }
}

#[test]
fn inverse_is_an_involution() {
    for s in corpus_specs() {
        let twice = op(s.space, s.spec.clone().inverse().inverse());
        assert_eq!(sample_graph(&twice, 6.0, 2.0).unwrap().points, sample_graph(&s, 6.0, 2.0).unwrap().points);
    }
}

#[test]
fn inverse_swaps_members() {
    for s in corpus_specs() {
        let inv = op(s.space.dual(), s.spec.clone().inverse());
        for p in sample_graph(&s, 6.0, 2.0).unwrap().points {
            assert!(contains(&inv, &p.swapped()).unwrap(), "{} {p:?}", s.spec.describe());
        }
    }
}

#[test]
fn parallel_sum_of_identities_halves() {
    let s = op(Space::l2(1), OperatorSpec::identity(1).parallel_sum(OperatorSpec::identity(1)));
    for t in [-2.0, 0.0, 1.0, 3.0] {
        assert!(contains(&s, &PairPoint::scalar(t, t / 2.0)).unwrap());
        assert!(!contains(&s, &PairPoint::scalar(t, t)).unwrap() || t == 0.0);
    }
}

#[test]
fn sums_of_monotone_operators_are_monotone() {
    let params = CertParams::default();
    let parts = [
        OperatorSpec::identity(1),
        OperatorSpec::subdifferential(ScalarForm::Abs, 1),
        OperatorSpec::Subdifferential(ConvexFunction::quartic(1)),
        OperatorSpec::subdifferential(ScalarForm::BoxIndicator { lo: -1.0, hi: 2.0 }, 1),
    ];
    for a in &parts {
        for b in &parts {
            let s = op(Space::l2(1), a.clone().sum(b.clone()));
            let rep = is_monotone(&s, 8.0, &params).unwrap();
            assert_eq!(rep.verdict, Verdict::Pass, "{}", s.spec.describe());
        }
    }
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY), 1.2..6.0f64]
}

proptest! {
    #[test]
    fn duality_selections_satisfy_j1(p in exponent(), x in prop::collection::vec(-5.0..5.0f64, 2)) {
        let sp = Space::new(2, p).unwrap();
        for xs in duality_map_select(&sp, &x).unwrap() {
            prop_assert!(duality_map_contains(&sp, &x, &xs).unwrap());
            let a = sp.norm(&x).unwrap();
            let b = sp.dual_norm(&xs).unwrap();
            let pair: f64 = x.iter().zip(&xs).map(|(u, v)| u * v).sum();
            prop_assert!((0.5 * a * a + 0.5 * b * b - pair).abs() <= 1e-9 * (1.0 + a * a));
            prop_assert!((b - a).abs() <= 1e-9 * (1.0 + a));
        }
    }

    #[test]
    fn duality_map_is_homogeneous(p in exponent(), x in prop::collection::vec(-5.0..5.0f64, 2), lambda in 0.01..10.0f64) {
        let sp = Space::new(2, p).unwrap();
        for xs in duality_map_select(&sp, &x).unwrap() {
            let lx: Vec<f64> = x.iter().map(|v| lambda * v).collect();
            let lxs: Vec<f64> = xs.iter().map(|v| lambda * v).collect();
            prop_assert!(duality_map_contains(&sp, &lx, &lxs).unwrap());
        }
    }

    #[test]
    fn translation_is_a_group_action(a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let s = op(Space::l2(1), OperatorSpec::subdifferential(ScalarForm::Abs, 1));
        let ab = translate(&translate(&s.spec, &[a]).unwrap(), &[b]).unwrap();
        let direct = op(Space::l2(1), translate(&s.spec, &[a + b]).unwrap());
        let composed = op(Space::l2(1), ab);
        for p in sample_graph(&direct, 6.0, 2.0).unwrap().points {
            prop_assert!(contains(&composed, &p).unwrap(), "{:?}", p);
        }
    }

    #[test]
    fn scaling_preserves_monotonicity(lambda in 0.1..10.0f64, idx in 0usize..4) {
        let specs = [
            OperatorSpec::identity(1),
            OperatorSpec::subdifferential(ScalarForm::Abs, 1),
            poly(vec![0.0, 0.0, -0.5]),
            poly(vec![0.0, 0.0, 0.5, 0.0, 0.25]),
        ];
        let params = CertParams::default();
        let s = op(Space::l2(1), specs[idx].clone());
        let scaled = op(Space::l2(1), specs[idx].clone().scale(lambda));
        let a = is_monotone(&s, 8.0, &params).unwrap().verdict;
        let b = is_monotone(&scaled, 8.0, &params).unwrap().verdict;
        prop_assert_eq!(a, b);
    }
}
