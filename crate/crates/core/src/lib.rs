//! Hexagonal-grid path planning: an agent that plans online under partial
//! observability with an adaptive observation window, classical baselines,
//! a rolling-gait compiler and a benchmark harness.

pub mod agent;
pub mod backend;
pub mod baselines;
pub mod bench;
pub mod gait;
pub mod hex;
pub mod render;
pub mod world;
