use proptest::prelude::*;
use qdense_core::{pairing, Norm, PairPoint, Space};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn closed_form_norms() {
    assert_eq!(Space::l1(2).norm(&[1.0, -1.0]).unwrap(), 2.0);
    assert_eq!(Space::linf(2).norm(&[-3.0, 2.0]).unwrap(), 3.0);
    assert_eq!(Space::l2(3).norm(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
    assert_eq!(Space::l2(2).norm(&[3.0, 4.0]).unwrap(), 5.0);
}

#[test]
fn pairing_examples() {
    for t in [-1.0, -0.3, 0.0, 1.0] {
        assert_eq!(pairing(&[1.0, 0.0], &[1.0, t]).unwrap(), 1.0);
    }
    assert_eq!(pairing(&[0.0, 0.0], &[7.0, -2.0]).unwrap(), 0.0);
    assert_eq!(pairing(&[1.0, 1.0], &[2.0, 2.0]).unwrap(), 4.0);
    assert!(pairing(&[1.0], &[1.0, 2.0]).is_err());
}

#[test]
fn product_norm_examples() {
    assert_eq!(Space::l2(1).product_norm(&PairPoint::scalar(0.0, 0.0)).unwrap(), 0.0);
    assert_eq!(Space::l2(1).product_norm(&PairPoint::scalar(3.0, 4.0)).unwrap(), 5.0);
    let pp = PairPoint::new(vec![1.0, 1.0], vec![1.0, 0.0]);
    assert!(close(Space::l1(2).product_norm(&pp).unwrap(), 5f64.sqrt()));
}

#[test]
fn dual_exponents() {
    assert_eq!(Space::l1(2).dual(), Space::linf(2));
    assert_eq!(Space::linf(2).dual(), Space::l1(2));
    assert_eq!(Space::l2(2).dual(), Space::l2(2));
    let sp = Space::new(2, 3.0).unwrap();
    assert!(close(sp.dual().norm.exponent(), 1.5));
    assert_eq!(sp.dual().dual(), sp);
}

#[test]
fn exponent_guard() {
    assert!(Space::new(1, 0.5).is_err());
    assert!(Space::new(1, 65.0).is_err());
    assert!(Space::new(1, f64::NAN).is_err());
    assert!(Space::new(1, f64::INFINITY).is_ok());
    assert!(Space::new(0, 2.0).is_err());
}

#[test]
fn dimension_and_finiteness_are_checked() {
    assert!(Space::l2(2).norm(&[1.0]).is_err());
    assert!(Space::l2(1).norm(&[f64::NAN]).is_err());
}

/// sup over unit-dual-norm w of <v, w>, by brute force over a fine grid.
fn dual_sup(sp: &Space, v: &[f64]) -> f64 {
    let dual = sp.dual();
    let mut best = f64::NEG_INFINITY;
    let n = 400;
    for i in 0..=n {
        for j in 0..=n {
            let w = [-1.0 + 2.0 * i as f64 / n as f64, -1.0 + 2.0 * j as f64 / n as f64];
            let m = dual.norm(&w).unwrap();
            if m > 0.0 {
                best = best.max(pairing(v, &[w[0] / m, w[1] / m]).unwrap());
            }
        }
    }
    best
}

#[test]
fn dual_norm_is_the_sup_of_pairings() {
    for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
        let sp = Space::new(2, p).unwrap();
        for v in [[0.6, -0.8], [1.0, 0.0], [0.3, 0.3]] {
            let m = sp.norm(&v).unwrap();
            let unit = [v[0] / m, v[1] / m];
            let s = dual_sup(&sp, &unit);
            assert!((1.0 - 1e-3..=1.0 + 1e-9).contains(&s), "p = {p}, v = {v:?}: {s}");
        }
    }
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY), 1.1..8.0f64]
}

proptest! {
    #[test]
    fn holder_inequality(p in exponent(), x in prop::collection::vec(-10.0..10.0f64, 3), y in prop::collection::vec(-10.0..10.0f64, 3)) {
        let sp = Space::new(3, p).unwrap();
        let lhs = pairing(&x, &y).unwrap().abs();
        let rhs = sp.norm(&x).unwrap() * sp.dual_norm(&y).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn product_norm_squares_add(p in exponent(), x in prop::collection::vec(-10.0..10.0f64, 2), y in prop::collection::vec(-10.0..10.0f64, 2)) {
        let sp = Space::new(2, p).unwrap();
        let pp = PairPoint::new(x.clone(), y.clone());
        let a = sp.norm(&x).unwrap();
        let b = sp.dual_norm(&y).unwrap();
        prop_assert!(close(sp.product_norm(&pp).unwrap().powi(2), a * a + b * b));
    }

    #[test]
    fn norms_are_homogeneous_and_subadditive(p in exponent(), lambda in -5.0..5.0f64,
        x in prop::collection::vec(-10.0..10.0f64, 2), y in prop::collection::vec(-10.0..10.0f64, 2)) {
        let sp = Space::new(2, p).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        prop_assert!(close(sp.norm(&scaled).unwrap(), lambda.abs() * sp.norm(&x).unwrap()));
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(sp.norm(&sum).unwrap() <= (sp.norm(&x).unwrap() + sp.norm(&y).unwrap()) * (1.0 + 1e-12));
    }

    #[test]
    fn dual_is_an_involution(p in exponent()) {
        let sp = Space::new(2, p).unwrap();
        let back = sp.dual().dual();
        match (sp.norm, back.norm) {
            (Norm::P(a), Norm::P(b)) => prop_assert!(close(a, b)),
            (a, b) => prop_assert_eq!(a, b),
        }
    }
}
