//! Frenet apparatus, harmonic curvature functions and f-eikonal V_n-slant
//! helix detection for non-null curves in flat pseudo-Euclidean spaces
//! `R^n_ν` with a constant diagonal metric.
//!
//! The pipeline is
//! [`build_grid`] → [`frame_field`] → [`harmonic_profile`] → [`full_report`].

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod constancy;
pub mod curve;
pub mod eikonal;
pub mod error;
pub mod fd;
pub mod frenet;
pub mod harmonic;
pub mod pseudometric;
mod series;

pub use constancy::{constancy_test, ConstancyVerdict, Tolerances};
pub use curve::{
    arclength_jet, build_grid, jet_eval, speed, unit_speed_jet, CurveForm, CurveSpec, Family, Jet, JetFn,
    JetMode, SampleGrid,
};
pub use eikonal::{
    axis_reconstruct, eikonal_check, full_report, gradient_along_curve, parallel_check, parallel_detail,
    slant_detect, theorem31_residual, AxisDecomposition, AxisSummary, FieldForm, Hypothesis, ParallelCheck,
    ScalarField, SlantDetection, SlantReport, Thm31Residual, Verdict, BUILTIN_FIELDS,
};
pub use error::{GeomError, Result};
pub use frenet::{frame_field, frenet_at, frenet_residual, FrameField, FrenetApparatus};
pub use harmonic::{
    corollary32_residual, harmonic_profile, last_harmonic_verdict, lemma32_check, recursion_eps_indices, sum_invariant, HarmonicProfile,
    Lemma32Outcome, Lemma32Report, NoiseFloor,
};
pub use pseudometric::{CausalCharacter, SignatureMetric};
