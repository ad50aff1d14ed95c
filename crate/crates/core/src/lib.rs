//! Numerical laboratory for bilinear maximal averages along curves.
//!
//! The crate evaluates averages `B_r(f1, f2)(x) = ∫ f1(x + r γ1(t)) f2(x + r γ2(t)) η(t) dt`
//! and the maximal operators built from them, together with the Littlewood–Paley,
//! Calderón–Zygmund and sublevel-set machinery used to study their bounds.
//! Experiments live in [`harness`] and serialize to [`harness::ExperimentReport`].

pub mod bilinear_ops;
pub mod curve;
pub mod czd;
pub mod error;
pub mod exec;
pub mod gridfn;
pub mod harness;
pub mod lp_filters;
pub mod smoothing;

pub use error::{Error, Result};
pub use num_complex::Complex64;
