//! Simulation, learning, and planning toolkit for UAV-aided wireless
//! networks.
//!
//! The crate is organized around a ground-truth world model and the layers
//! that learn from it or plan over it:
//!
//! - [`world`] — synthetic 3D cities, LoS ray tracing, segmented air-to-ground
//!   channel simulation, link and relay rates;
//! - [`learn`] — radio-map reconstruction from sparse RSSI measurements,
//!   direct (KNN/kernel) and model-based via joint segment classification and
//!   pathloss fitting;
//! - [`map3d`] — building-height bounds reverse-engineered from classified
//!   links, with iterated radio/terrain refinement;
//! - [`compress`] — per-node logistic LoS-probability models distilled from a
//!   map, restoring differentiability for planners;
//! - [`relay`] — single-user relay placement exploiting nested propagation
//!   segments, with an exhaustive oracle;
//! - [`harvest`] — IoT data-harvesting trajectory design under a length
//!   budget, comparing channel views;
//! - [`sensing`] — active-learning RSSI localization with a particle filter;
//! - [`scenario`] / [`cli`] — config-driven experiment orchestration with
//!   seeded reproducibility and CSV/JSON artifacts.
//!
//! Every operation is deterministic given an explicit seed. See the crate
//! examples for one runnable entry point per capability.

pub mod cli;
pub mod compress;
pub mod error;
pub mod harvest;
pub mod io;
pub mod learn;
pub mod map3d;
pub mod relay;
pub mod scenario;
pub mod sensing;
pub mod world;

pub use error::{Error, Result};
