//! Radio-map reconstruction from sparse measurements: direct KNN averaging
//! against the model-based route (fitted pathloss + ray-traced segments).
//!
//! ```bash
//! cargo run --example reconstruct_map
//! ```

use aeromap::learn::{
    fit_segmented_model, map_rmse, reconstruct_direct, reconstruct_model_based, DirectMethod,
    FitOptions, MapPredictor,
};
use aeromap::world::{generate_city, sample_rssi, CitySpec, GroundNode, Pose3, SegmentedModel};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> aeromap::Result<()> {
    let spec = CitySpec {
        nx: 80,
        ny: 80,
        cell_size: 5.0,
        origin: (0.0, 0.0),
        density: 0.2,
        height_min: 10.0,
        height_max: 45.0,
        building_min_cells: 3,
        building_max_cells: 7,
        footprints: Vec::new(),
    };
    let map = generate_city(3, &spec)?;
    let truth = SegmentedModel::default();

    let mut rng = ChaCha8Rng::seed_from_u64(0x3AD);
    let nodes: Vec<GroundNode> = (0..6)
        .map(|i| GroundNode::new(i, rng.gen_range(20.0..380.0), rng.gen_range(20.0..380.0)))
        .collect();
    let mut measurements = Vec::new();
    for i in 0..400 {
        let uav = Pose3::new(rng.gen_range(5.0..395.0), rng.gen_range(5.0..395.0), 50.0);
        for (j, node) in nodes.iter().enumerate() {
            measurements.push(sample_rssi(
                (i * nodes.len() + j) as u64,
                &truth,
                &map,
                &uav,
                node,
            )?);
        }
    }

    // Held-out query grid for the first node's map.
    let node = nodes[0];
    let grid: Vec<Pose3> = (0..800)
        .map(|_| Pose3::new(rng.gen_range(5.0..395.0), rng.gen_range(5.0..395.0), 50.0))
        .collect();
    let predictor = MapPredictor {
        map: &map,
        thresholds_m: &truth.thresholds_m,
    };
    let truth_map = reconstruct_model_based(&truth, &predictor, grid.clone(), &node)?;

    let fit = fit_segmented_model(&measurements, &nodes, &FitOptions::new(2))?;
    let model_map = reconstruct_model_based(&fit.model, &predictor, grid.clone(), &node)?;
    let direct_map =
        reconstruct_direct(&measurements, node.id, grid, DirectMethod::Knn { k: 5 })?;

    println!(
        "direct KNN-5 RMSE:         {:.2} dB",
        map_rmse(&direct_map, &truth_map)?
    );
    println!(
        "model-based (map) RMSE:    {:.2} dB",
        map_rmse(&model_map, &truth_map)?
    );
    Ok(())
}
