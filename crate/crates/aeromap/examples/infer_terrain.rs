//! Reverse-engineer building heights from LoS-labeled radio links: every
//! clear link upper-bounds the cells it crosses.
//!
//! ```bash
//! cargo run --example infer_terrain
//! ```

use aeromap::map3d::{infer_bounds, survey::street_grid_survey, GridGeometry, InferOptions};

fn main() -> aeromap::Result<()> {
    let (map, nodes, labeled) = street_grid_survey(5);
    println!(
        "street-grid city: {}x{} cells, {} nodes, {} labeled links",
        map.nx(),
        map.ny(),
        nodes.len(),
        labeled.measurements.len()
    );

    let geom = GridGeometry::of_map(&map);
    let bounds = infer_bounds(&labeled, &nodes, &geom, &InferOptions::default())?;

    let mut constrained = 0usize;
    let mut well_crossed = 0usize;
    let mut tight = 0usize;
    let mut gap_sum = 0.0;
    for ix in 0..map.nx() {
        for iy in 0..map.ny() {
            let i = bounds.idx(ix, iy);
            if bounds.upper[i].is_finite() {
                constrained += 1;
            }
            if bounds.los_crossings[i] >= 20 {
                well_crossed += 1;
                let gap = bounds.upper[i] - map.height_at_cell(ix, iy);
                gap_sum += gap;
                if gap <= 5.0 {
                    tight += 1;
                }
            }
        }
    }
    println!(
        "constrained cells: {constrained}/{} ({:.1}%)",
        bounds.cells(),
        100.0 * constrained as f64 / bounds.cells() as f64
    );
    println!(
        "cells with >= 20 LoS crossings: {well_crossed}, mean gap to truth {:.2} m, within 5 m: {tight}",
        gap_sum / well_crossed.max(1) as f64
    );
    Ok(())
}
