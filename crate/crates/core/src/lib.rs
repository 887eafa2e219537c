//! Exact-rational approximation pipelines for integer programs with
//! resource augmentation.
//!
//! Three pipelines return integer solutions whose objective is at most the
//! exact optimum while the equality constraints may be violated by a
//! bounded amount:
//!
//! * [`general::solve_general`] for `min { wx : Hx = b, l ≤ x ≤ u }`,
//!   with an additive violation of at most `ε·‖H‖∞`;
//! * [`config::solve_nfold_config`] for n-fold programs whose blocks pick
//!   one of finitely many configurations, additive violation `ε·max ‖D‖∞`;
//! * [`nfold::solve_nfold`] for n-fold programs with nonnegative data,
//!   multiplicative violation `ε` on every row.
//!
//! All arithmetic is exact. [`oracle`] has brute-force solvers for
//! cross-checking and [`apps`] reduces knapsack and scheduling problems.

#![allow(clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod apps;
pub mod boxing;
pub mod config;
pub mod error;
mod fallback;
pub mod general;
pub mod generate;
pub mod instance;
pub mod linalg;
pub mod mip;
pub mod nfold;
pub mod oracle;
pub mod rational;
pub mod result;
pub mod simplex;

pub use error::{Error, Result};
pub use instance::{ApproxParams, InstanceFile, Tolerance, ViolationReport};
pub use rational::Rat;
pub use result::{ApproxResult, Status};
