//! Synthesize a random city raster and save it as JSON header + CSV heights.
//!
//! ```bash
//! cargo run --example gen_city
//! ```

use aeromap::io::save_city;
use aeromap::world::{generate_city, CitySpec};

fn main() -> aeromap::Result<()> {
    let spec = CitySpec {
        nx: 100,
        ny: 100,
        cell_size: 5.0,
        origin: (0.0, 0.0),
        density: 0.3,
        height_min: 10.0,
        height_max: 45.0,
        building_min_cells: 2,
        building_max_cells: 6,
        footprints: Vec::new(),
    };

    for seed in [1, 2, 3] {
        let map = generate_city(seed, &spec)?;
        println!(
            "seed {seed}: {}x{} cells, built fraction {:.3}, max height {:.1} m",
            map.nx(),
            map.ny(),
            map.built_fraction(),
            map.max_height()
        );
    }

    let map = generate_city(42, &spec)?;
    let out = std::path::Path::new("target/example-out/city.json");
    save_city(&map, out)?;
    println!("saved city to {} (+ .heights.csv)", out.display());
    Ok(())
}
