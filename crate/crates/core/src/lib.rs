//! Numerical differential geometry for Lagrangian self-shrinking tori in C² ≅ R⁴.
//!
//! The crate evaluates immersions through truncated Taylor jets, builds the adapted
//! Lagrangian frame `e1, e2, Je1, Je2` at each point, and checks the curvature identities
//! satisfied by self-shrinkers (`H = -x^⊥`) both pointwise and as integrals over the torus.
//! Planar self-shrinking curves are produced by a shooting solver and can be combined into
//! product tori, and a normalized rescaled curve-shortening flow drives closed curves to
//! their stationary shape.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod abresch_langer;
pub mod analysis;
pub mod error;
pub mod examples;
pub mod flow;
pub mod geometry;
pub mod tensor;

pub use error::{Error, Result};
