//! Numerical toolkit for set-valued monotone operators on finite-dimensional
//! `l^p` spaces: quasidensity, maximality, Fitzpatrick functions and the
//! local-search certificates built on them.

pub mod certify;
pub mod convex;
pub mod corpus;
mod error;
pub mod extended;
pub mod format;
pub mod nelder_mead;
pub mod operators;
pub mod space;

pub use certify::{CertParams, CertReport, GapResult, PropertyTag, Verdict};
pub use convex::{ConvexFunction, FitzEval, Grid1, Membership, ScalarForm};
pub use error::{Error, Result};
pub use extended::ExtReal;
pub use operators::{GraphSample, Operator, OperatorSpec, Region};
pub use space::{pairing, Norm, PairPoint, Space};
