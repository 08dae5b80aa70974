//! Recover the segmented pathloss model from unlabeled RSSI measurements by
//! alternating segment classification with per-segment least squares.
//!
//! ```bash
//! cargo run --example fit_channel
//! ```

use aeromap::learn::{fit_segmented_model, FitOptions};
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
        density: 0.25,
        height_min: 10.0,
        height_max: 45.0,
        building_min_cells: 2,
        building_max_cells: 5,
        footprints: Vec::new(),
    };
    let map = generate_city(11, &spec)?;
    let truth = SegmentedModel::default();

    // 400 training poses at 50 m altitude, measuring 10 ground nodes.
    let mut rng = ChaCha8Rng::seed_from_u64(0xF17);
    let nodes: Vec<GroundNode> = (0..10)
        .map(|i| GroundNode::new(i, rng.gen_range(20.0..380.0), rng.gen_range(20.0..380.0)))
        .collect();
    let mut measurements = Vec::new();
    for i in 0..400 {
        let uav = Pose3::new(rng.gen_range(5.0..395.0), rng.gen_range(5.0..395.0), 50.0);
        for (j, node) in nodes.iter().enumerate() {
            let seed = (i * nodes.len() + j) as u64;
            measurements.push(sample_rssi(seed, &truth, &map, &uav, node)?);
        }
    }

    let fit = fit_segmented_model(&measurements, &nodes, &FitOptions::new(2))?;
    println!(
        "converged in {} iterations, label accuracy {:.3}",
        fit.iterations,
        fit.labeled.accuracy_vs_truth().unwrap()
    );
    for (s, (got, want)) in fit.model.segments.iter().zip(&truth.segments).enumerate() {
        println!(
            "segment {}: alpha {:.3} (true {:.1}), beta {:.1} dB (true {:.0}), sigma {:.2} dB (true {:.0})",
            s + 1,
            got.alpha,
            want.alpha,
            got.beta_db,
            want.beta_db,
            got.sigma_db,
            want.sigma_db
        );
    }
    Ok(())
}
