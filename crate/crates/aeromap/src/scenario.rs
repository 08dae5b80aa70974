//! Scenario configuration: one JSON document driving every experiment, plus
//! the master-seed fan-out.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::channel::{GlobalLosParams, SegmentedModel};
use crate::world::city::CitySpec;
use crate::world::geometry::{GroundNode, DEFAULT_NODE_HEIGHT};

/// Stable per-module seed domains. The master seed fans out through
/// `derive_seed(master, domain, index)`; adding a new domain never perturbs
/// the streams of existing ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedDomain {
    CityGen = 1,
    Simulate = 2,
    FitChannel = 3,
    Reconstruct = 4,
    Map3d = 5,
    Compress = 6,
    Relay = 7,
    Harvest = 8,
    Sensing = 9,
    Sweep = 10,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic sub-seed: two splitmix64 rounds over (master, domain, index).
pub fn derive_seed(master: u64, domain: SeedDomain, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ (domain as u64).wrapping_mul(0xA24B_AED4_963E_E407)) ^ index)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CityConfig {
    /// Synthesize from this recipe with the city-gen sub-seed...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<CitySpec>,
    /// ...or load a previously saved city header.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    #[serde(default = "default_node_height")]
    pub z: f64,
}

fn default_node_height() -> f64 {
    DEFAULT_NODE_HEIGHT
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RandomNodes {
    pub count: usize,
    /// Keep-out margin from the map edge, meters.
    #[serde(default = "default_margin")]
    pub margin_m: f64,
}

fn default_margin() -> f64 {
    20.0
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NodesConfig {
    #[serde(default)]
    pub list: Vec<NodeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomNodes>,
}

impl Default for NodesConfig {
    fn default() -> Self {
        Self {
            list: Vec::new(),
            random: Some(RandomNodes {
                count: 6,
                margin_m: default_margin(),
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct LearnConfig {
    /// UAV training poses for channel fitting / reconstruction.
    pub training_poses: usize,
    pub altitude_m: f64,
    pub k: usize,
    /// Direct-reconstruction settings.
    pub knn_k: usize,
    /// Held-out query points for reconstruction experiments.
    pub query_points: usize,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            training_poses: 400,
            altitude_m: 50.0,
            k: 2,
            knn_k: 5,
            query_points: 500,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Map3dConfig {
    pub outer_iters: usize,
}

impl Default for Map3dConfig {
    fn default() -> Self {
        Self { outer_iters: 4 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct CompressConfig {
    pub samples_per_node: usize,
    pub radius_min_m: f64,
    pub radius_max_m: f64,
    pub altitude_min_m: f64,
    pub altitude_max_m: f64,
    pub ridge: f64,
}

impl Default for CompressConfig {
    fn default() -> Self {
        Self {
            samples_per_node: 2000,
            radius_min_m: 10.0,
            radius_max_m: 300.0,
            altitude_min_m: 20.0,
            altitude_max_m: 100.0,
            ridge: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RelayConfig {
    pub bs: [f64; 3],
    /// Which node plays the user; defaults to the first node.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub user_node: Option<u32>,
    pub altitude_m: f64,
    pub step_m: f64,
    pub max_march_m: f64,
    pub bs_always_los: bool,
    pub oracle_resolution_m: f64,
}

impl Default for RelayConfig {
    fn default() -> Self {
        Self {
            bs: [30.0, 30.0, 30.0],
            user_node: None,
            altitude_m: 50.0,
            step_m: 2.0,
            max_march_m: 200.0,
            bs_always_los: true,
            oracle_resolution_m: 4.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct HarvestConfig {
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub l_max_m: f64,
    pub n_waypoints: usize,
    pub v_max: f64,
    pub a_max: f64,
    pub slot_duration_s: f64,
    pub altitude_m: f64,
    /// Channel view of the single-plan command.
    pub view: String,
    /// Shadowing noise in the ground-truth evaluation.
    pub shadowing: bool,
    /// Length budgets of the sweep command.
    pub sweep_l_max: Vec<f64>,
    /// Planner views compared by the sweep command.
    pub sweep_views: Vec<String>,
    /// Scenario replicates in the sweep.
    pub sweep_scenarios: usize,
}

impl Default for HarvestConfig {
    fn default() -> Self {
        Self {
            start: [20.0, 20.0],
            end: [280.0, 280.0],
            l_max_m: 600.0,
            n_waypoints: 30,
            v_max: 15.0,
            a_max: 8.0,
            slot_duration_s: 2.0,
            altitude_m: 60.0,
            view: "compressed_map".into(),
            shadowing: true,
            sweep_l_max: vec![400.0, 600.0, 800.0, 1000.0],
            sweep_views: vec![
                "deterministic_los".into(),
                "global_probabilistic".into(),
                "compressed_map".into(),
                "true_map".into(),
            ],
            sweep_scenarios: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SensingScenarioConfig {
    pub budget: usize,
    pub policy: String,
    pub n_particles: usize,
    pub ring_candidates: usize,
    pub ring_radius_m: f64,
    pub altitude_m: f64,
    pub mc_draws: usize,
    pub scoring_particles: usize,
    /// Which node to localize; defaults to the first node.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_node: Option<u32>,
}

impl Default for SensingScenarioConfig {
    fn default() -> Self {
        Self {
            budget: 15,
            policy: "map_aided_active".into(),
            n_particles: 5000,
            ring_candidates: 16,
            ring_radius_m: 40.0,
            altitude_m: 60.0,
            mc_draws: 8,
            scoring_particles: 256,
            target_node: None,
        }
    }
}

fn default_city() -> CityConfig {
    CityConfig {
        spec: Some(CitySpec {
            nx: 60,
            ny: 60,
            cell_size: 5.0,
            origin: (0.0, 0.0),
            density: 0.2,
            height_min: 10.0,
            height_max: 40.0,
            building_min_cells: 2,
            building_max_cells: 5,
            footprints: Vec::new(),
        }),
        file: None,
    }
}

/// The one configuration document every command reads.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    pub city: CityConfig,
    pub nodes: NodesConfig,
    pub channel: SegmentedModel,
    pub global_los: GlobalLosParams,
    pub learn: LearnConfig,
    pub map3d: Map3dConfig,
    pub compress: CompressConfig,
    pub relay: RelayConfig,
    pub harvest: HarvestConfig,
    pub sensing: SensingScenarioConfig,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            seed: 0,
            city: default_city(),
            nodes: NodesConfig::default(),
            channel: SegmentedModel::default(),
            global_los: GlobalLosParams::default(),
            learn: LearnConfig::default(),
            map3d: Map3dConfig::default(),
            compress: CompressConfig::default(),
            relay: RelayConfig::default(),
            harvest: HarvestConfig::default(),
            sensing: SensingScenarioConfig::default(),
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        match (&self.city.spec, &self.city.file) {
            (None, None) => {
                return Err(Error::invalid("city: provide either a spec or a file"));
            }
            (Some(spec), _) => spec.validate()?,
            _ => {}
        }
        self.channel.validate()?;
        self.global_los.validate()?;
        if self.nodes.list.is_empty() && self.nodes.random.is_none() {
            return Err(Error::invalid("nodes: provide a list or a random block"));
        }
        let mut ids: Vec<u32> = self.nodes.list.iter().map(|n| n.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.nodes.list.len() {
            return Err(Error::invalid("nodes: duplicate ids"));
        }
        Ok(())
    }

    /// Materialize the node set. Random nodes draw from the simulate domain
    /// so layouts are reproducible per master seed.
    pub fn build_nodes(&self, bounds: (f64, f64, f64, f64)) -> Result<Vec<GroundNode>> {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut nodes: Vec<GroundNode> = self
            .nodes
            .list
            .iter()
            .map(|n| GroundNode::with_height(n.id, n.x, n.y, n.z))
            .collect();
        if let Some(random) = &self.nodes.random {
            let (x0, y0, x1, y1) = bounds;
            let m = random.margin_m;
            if x1 - x0 <= 2.0 * m || y1 - y0 <= 2.0 * m {
                return Err(Error::invalid("node margin leaves no room"));
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(
                self.seed,
                SeedDomain::Simulate,
                0xD06E,
            ));
            let base = nodes.iter().map(|n| n.id).max().map(|m| m + 1).unwrap_or(0);
            for i in 0..random.count {
                nodes.push(GroundNode::new(
                    base + i as u32,
                    rng.gen_range(x0 + m..x1 - m),
                    rng.gen_range(y0 + m..y1 - m),
                ));
            }
        }
        if nodes.is_empty() {
            return Err(Error::invalid("scenario produced no nodes"));
        }
        Ok(nodes)
    }
}
