//! Convex-analytic transforms: conjugates, subdifferentials and Fitzpatrick
//! functions.

mod fitzpatrick;
mod function;
mod legendre;

pub use fitzpatrick::{
    fit_extension_contains, fitzpatrick_conjugate_value, fitzpatrick_value, FitzEval, FitzParams,
    FitzpatrickConjugate, Membership,
};
pub use function::{ConvexFunction, Interval, ScalarForm};
pub use legendre::{conjugate, subdifferential_contains, Grid1};
