//! Ground truth for everything else: synthetic 3D cities, line-of-sight ray
//! tracing, obstruction-segment classification, segmented-channel RSSI
//! simulation, and link/relay rates.

pub mod channel;
pub mod city;
pub mod geometry;
pub mod raytrace;

pub use channel::{
    global_plos, relay_rate, sample_rssi, GlobalLosParams, Measurement, SegmentParams,
    SegmentedModel,
};
pub use city::{generate_city, CityMap, CitySpec, Footprint};
pub use geometry::{elevation_angle, GroundNode, Pose3, DEFAULT_NODE_HEIGHT};
pub use raytrace::{
    blocked_length, classify_segment, classify_with_thresholds, default_thresholds,
    for_each_crossing, line_of_sight, Crossing,
};
