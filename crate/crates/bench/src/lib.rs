//! Fixtures shared by the benchmarks.

use qdense_core::certify::standard_probe_grid;
use qdense_core::corpus;
use qdense_core::{ConvexFunction, Operator, OperatorSpec, PairPoint, Space};

/// The duality map of `l^1(2)` restricted to the coordinate axes.
pub fn axes() -> Operator {
    corpus::axes_operator().operator
}

/// The identity on `R`.
pub fn identity() -> Operator {
    Operator::new(Space::l2(1), OperatorSpec::identity(1)).expect("well-formed")
}

/// The subdifferential of `|x|` on `R`.
pub fn abs() -> Operator {
    Operator::new(Space::l2(1), OperatorSpec::Subdifferential(ConvexFunction::abs(1))).expect("well-formed")
}

/// The default 13 x 13 probe grid in one dimension.
pub fn probes_1d() -> Vec<PairPoint> {
    standard_probe_grid(1, 3.0, 13)
}
