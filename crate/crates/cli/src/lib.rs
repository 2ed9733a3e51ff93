//! Command-line front end for `helixlab-core`: input resolution, the curve
//! gallery, the `analyze` pipeline and the `verify` gate.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analyze;
pub mod curves;
pub mod error;
pub mod gallery;
pub mod io;
pub mod verify;

pub use analyze::{cmd_analyze, tolerances_from_env, verdict_exit_code, OutputFormat, RunConfig};
pub use error::CliError;
pub use gallery::Manifest;
pub use verify::{cmd_verify, VerifyOutcome};
