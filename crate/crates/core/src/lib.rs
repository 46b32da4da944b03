//! Regularization of ill-posed equations `Au = f` with positive-type
//! operators under logarithmic and mixed source conditions.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod chi;
pub mod choice;
pub mod error;
pub mod fractional;
pub mod grid;
pub mod harness;
pub mod logarithm;
pub mod loworder;
pub mod operator;
pub mod schemes;

pub use error::{Error, Result};
pub use grid::{GridFunction, NormKind};
pub use operator::{DiscreteOperator, OperatorKind, OperatorSpec};
