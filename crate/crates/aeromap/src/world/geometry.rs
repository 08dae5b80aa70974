use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 3D position in meters. `z` is height above ground.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Pose3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Euclidean distance to another pose.
    pub fn distance(&self, other: &Pose3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Distance of the ground-plane projections.
    pub fn horizontal_distance(&self, other: &Pose3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Default antenna height for ground nodes, in meters.
pub const DEFAULT_NODE_HEIGHT: f64 = 1.5;

/// A fixed ground radio node (user, sensor, or base-station endpoint).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundNode {
    pub id: u32,
    pub position: Pose3,
}

impl GroundNode {
    /// Node at `(x, y)` with the default antenna height.
    pub fn new(id: u32, x: f64, y: f64) -> Self {
        Self {
            id,
            position: Pose3::new(x, y, DEFAULT_NODE_HEIGHT),
        }
    }

    pub fn with_height(id: u32, x: f64, y: f64, z: f64) -> Self {
        Self {
            id,
            position: Pose3::new(x, y, z),
        }
    }
}

/// Elevation angle from `node` to `uav`, in degrees within [-90, 90].
///
/// This is the angle between the node's horizontal plane and the line to the
/// UAV: 90 deg means directly overhead, 0 deg means level, negative means the
/// UAV sits below the node's antenna.
pub fn elevation_angle(uav: &Pose3, node: &GroundNode) -> Result<f64> {
    let dz = uav.z - node.position.z;
    let horiz = uav.horizontal_distance(&node.position);
    if horiz == 0.0 && dz == 0.0 {
        return Err(Error::invalid(
            "elevation angle undefined for coincident positions",
        ));
    }
    Ok(dz.atan2(horiz).to_degrees())
}
