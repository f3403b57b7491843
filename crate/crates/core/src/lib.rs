//! Per-actor risk scoring for driving scenarios.
//!
//! An actor's risk is measured by how much it restricts the Ego vehicle's
//! navigable future. The crate provides:
//!
//! - [`scenario`]: a straight multi-lane road, scripted actor trajectories and
//!   the five-phase highway case study, plus a TOML scenario document.
//! - [`prediction`]: linear behavior prediction and Gaussian-perturbed
//!   future sampling.
//! - [`planner`]: an exhaustive maneuver-lattice enumerator and a budgeted
//!   space-time RRT* planner sharing one disc collision model.
//! - [`risk`]: exact set-reduction risk, leave-one-out importance under a
//!   Euclidean or KL difference operator, Monte-Carlo risk statistics, and a
//!   collision-frequency plan selector.
//! - [`harness`]: the closed-loop replay that produces per-step CSV tables and
//!   SVG diagnostics.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod error;
pub mod harness;
pub mod planner;
pub mod prediction;
pub mod risk;
pub mod scenario;

pub use error::{Error, Result};
