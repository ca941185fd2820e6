//! Channel simulation, Monte Carlo validation, scenario files and output
//! formats on top of `mimofade-core`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod generator;
pub mod output;
pub mod scenario;
pub mod tables;
pub mod trajectory;
pub mod validation;
