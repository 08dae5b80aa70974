//! Map compression: distill the city into per-node logistic LoS models and
//! show how they discriminate open-field from shadowed nodes.
//!
//! ```bash
//! cargo run --example compress_map
//! ```

use aeromap::compress::{compress_map, local_plos};
use aeromap::world::{generate_city, CitySpec, Footprint, GroundNode};

fn main() -> aeromap::Result<()> {
    // One node in the open, one walled in by a courtyard.
    let mut footprints = vec![
        Footprint { x_min: 185.0, y_min: 185.0, x_max: 190.0, y_max: 255.0, height: 28.0 },
        Footprint { x_min: 250.0, y_min: 185.0, x_max: 255.0, y_max: 255.0, height: 28.0 },
        Footprint { x_min: 185.0, y_min: 185.0, x_max: 255.0, y_max: 190.0, height: 28.0 },
        Footprint { x_min: 185.0, y_min: 250.0, x_max: 255.0, y_max: 255.0, height: 28.0 },
    ];
    // Some scattered clutter elsewhere.
    footprints.push(Footprint {
        x_min: 60.0,
        y_min: 200.0,
        x_max: 90.0,
        y_max: 230.0,
        height: 20.0,
    });
    let spec = CitySpec {
        nx: 60,
        ny: 60,
        cell_size: 5.0,
        origin: (0.0, 0.0),
        density: 0.0,
        height_min: 0.0,
        height_max: 0.0,
        building_min_cells: 1,
        building_max_cells: 1,
        footprints,
    };
    let map = generate_city(0, &spec)?;
    let nodes = vec![
        GroundNode::new(0, 80.0, 80.0),   // open field
        GroundNode::new(1, 220.0, 220.0), // courtyard
    ];

    let models = compress_map(&map, &nodes, 2000, (10.0, 150.0), (10.0, 80.0), 1e-3, 9)?;
    for m in &models {
        println!(
            "node {}: slope {:.3}/deg, midpoint {:.1} deg ({} samples, loglik {:.1})",
            m.node_id, m.slope, m.midpoint_deg, m.samples, m.loglik
        );
        for theta in [10.0, 30.0, 60.0] {
            println!("    p_los({theta:>4.0} deg) = {:.3}", local_plos(m, theta));
        }
    }
    println!(
        "\nthe open-field node reaches LoS at much lower elevation (midpoint {:.1} vs {:.1} deg)",
        models[0].midpoint_deg, models[1].midpoint_deg
    );
    Ok(())
}
