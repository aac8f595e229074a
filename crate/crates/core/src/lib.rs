//! Decision-analysis and burned-area prediction toolkit.
//!
//! * [`cvi`] scores expert relevance ratings with content-validity indices.
//! * [`bwm`] solves Best-Worst Method weights through the simplex in [`lp`].
//! * [`hierarchy`] pools decision-makers and composes dimension/attribute
//!   weights into global weights.
//! * [`fire`] reads the forest-fire meteorological table; [`models`] trains
//!   the regressors and [`tabgan`] the synthetic-row generator.
//! * [`cli`] wires the stages into batch commands.

pub mod bwm;
pub mod cli;
pub mod cvi;
pub mod fire;
pub mod hierarchy;
pub mod lp;
pub mod models;
pub mod nn;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod tabgan;
pub mod tolerances;
