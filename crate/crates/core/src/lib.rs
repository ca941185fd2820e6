//! Closed-form second-order statistics of MIMO Rayleigh eigen-channels and
//! instantaneous mutual information, plus the estimators used to check them
//! against simulated channels.
//!
//! Everything here is `no_std` (with `alloc`); path generation, file formats
//! and the CLI live in the `mimofade` crate.
#![no_std]
// Whenever std is in the crate graph its inherent float methods shadow
// `num_traits::Float`, leaving those imports unused.
#![allow(unused_imports)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod eigenstats;
pub mod empirical;
pub mod error;
pub mod imistats;
pub mod linalg;
pub mod specfun;

pub use error::{Error, Result};
