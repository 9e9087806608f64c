//! Hit-and-Run sampling and planning on non-convex free spaces.
//!
//! The crate is organised around the two oracle queries of a free space
//! (membership and longest visible chord, see [`geometry`]) and the
//! algorithms built on them: the Hit-and-Run kernel ([`sampler`]), RRT and
//! Hit-and-Run planners ([`planner`]), their double-integrator variants
//! ([`dynamics`]), the cross-ratio / conductance analysis layer
//! ([`metrics`]) and the seeded width-sweep harness ([`experiment`]).

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod metrics;
pub mod planner;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod volume;

pub use dynamics::{KinoConfig, KinoState};
pub use error::{Error, Result};
pub use geometry::{generate_map, Chord, FreeSpace, GeneratedMap, GoalRegion, MapSpec, Point};
pub use rng::{RngSeed, SimRng};
