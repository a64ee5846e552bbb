//! Motion-description grounding for robot trajectories: a controlled
//! description language, parametric generators, a rule-based trajectory
//! analyzer, visualization renderers, dataset construction, evaluation
//! metrics and a closed-loop policy refiner.

// `!(x > 0.0)` is used on purpose so NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analyzer;
pub mod config;
pub mod control;
pub mod dataset;
pub mod dsl;
pub mod error;
pub mod eval;
pub mod generators;
pub mod render;
pub mod trajectory;

pub use error::{Error, Result};
