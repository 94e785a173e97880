//! Linear pliable index coding.
//!
//! A server with m messages broadcasts linear combinations over F_q to n
//! clients, each holding some messages as side information and happy to
//! decode *any* t messages she is missing. This crate provides:
//!
//! - exact linear algebra over prime fields ([`gf`]), with a bitset fast
//!   path for F_2;
//! - instance modelling and generators for the complete, t-requests
//!   complete, random, and heterogeneous families ([`instance`]);
//! - the algebraic decodability criterion, scalar and vector ([`decode`]);
//! - the polynomial-time greedy encoder and its weighted t-requests variant
//!   ([`greedy`], [`greedy_t`]), with full per-round logs;
//! - exhaustive optima: brute-force optimal code length and the
//!   fitting-matrix minrank ([`oracle`]);
//! - closed-form random-graph bounds and the constant-weight constructive
//!   code ([`bounds`]).

pub mod bounds;
pub mod decode;
pub mod error;
pub mod gf;
pub mod greedy;
pub mod greedy_t;
pub mod instance;
pub mod oracle;

#[doc(hidden)]
pub mod testkit;

pub use error::{Error, Result};
