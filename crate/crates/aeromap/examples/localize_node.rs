//! Localize a ground node from UAV RSSI measurements with three waypoint
//! policies: random, map-free active, and map-aided active.
//!
//! ```bash
//! cargo run --release --example localize_node
//! ```

use aeromap::sensing::{run_localization, Policy, SensingConfig};
use aeromap::world::{generate_city, CitySpec, GroundNode, SegmentedModel};

fn main() -> aeromap::Result<()> {
    let spec = CitySpec {
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
    };
    let map = generate_city(17, &spec)?;
    let model = SegmentedModel::default();
    let node = GroundNode::new(0, 190.0, 140.0);
    let cfg = SensingConfig::default();

    for policy in [Policy::Random, Policy::MapFreeActive, Policy::MapAidedActive] {
        // Median over a few seeds; single runs are noisy.
        let mut finals: Vec<f64> = (0..5)
            .map(|seed| {
                run_localization(&map, &model, &node, 15, policy, &cfg, seed)
                    .map(|r| r.final_rmse_m)
            })
            .collect::<aeromap::Result<_>>()?;
        finals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        println!(
            "{:<18} median final RMSE over 5 runs: {:>6.1} m",
            policy.name(),
            finals[finals.len() / 2]
        );
    }

    let run = run_localization(&map, &model, &node, 15, Policy::MapAidedActive, &cfg, 0)?;
    println!("\nmap-aided run, RMSE per step:");
    for s in run.steps.iter().step_by(3) {
        println!(
            "  step {:>2}: uav ({:>5.0}, {:>5.0}) rssi {:>7.1} dBm -> error {:>6.1} m",
            s.step, s.uav.x, s.uav.y, s.rssi_dbm, s.rmse_m
        );
    }
    Ok(())
}
