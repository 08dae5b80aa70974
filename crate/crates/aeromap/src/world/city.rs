//! Raster city model: a rectangular grid of per-cell building heights.
//!
//! Buildings are axis-aligned rectangular prisms rasterized onto the grid, so
//! every obstacle footprint is convex. Height 0 means open ground.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::geometry::Pose3;

/// Per-cell building-height raster over a rectangular area.
///
/// Heights are stored row-major with the x index as the row: cell `(ix, iy)`
/// lives at `heights[ix * ny + iy]` and spans
/// `[origin.0 + ix*cell, origin.0 + (ix+1)*cell) x [origin.1 + iy*cell, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CityMap {
    cell_size: f64,
    nx: usize,
    ny: usize,
    origin: (f64, f64),
    heights: Vec<f64>,
}

impl CityMap {
    /// Build a map from raw heights, validating invariants.
    pub fn new(
        cell_size: f64,
        nx: usize,
        ny: usize,
        origin: (f64, f64),
        heights: Vec<f64>,
    ) -> Result<Self> {
        if cell_size <= 0.0 || !cell_size.is_finite() {
            return Err(Error::invalid("cell_size must be positive and finite"));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::invalid("nx and ny must be >= 1"));
        }
        if heights.len() != nx * ny {
            return Err(Error::invalid(format!(
                "heights length {} does not match {}x{} grid",
                heights.len(),
                nx,
                ny
            )));
        }
        if heights.iter().any(|h| !h.is_finite() || *h < 0.0) {
            return Err(Error::invalid("heights must be finite and >= 0"));
        }
        Ok(Self {
            cell_size,
            nx,
            ny,
            origin,
            heights,
        })
    }

    /// All-ground map (every height 0).
    pub fn flat(cell_size: f64, nx: usize, ny: usize, origin: (f64, f64)) -> Result<Self> {
        Self::new(cell_size, nx, ny, origin, vec![0.0; nx * ny])
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    #[inline]
    pub fn height_at_cell(&self, ix: usize, iy: usize) -> f64 {
        self.heights[ix * self.ny + iy]
    }

    /// World-coordinate extent: `(x_min, y_min, x_max, y_max)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        (
            self.origin.0,
            self.origin.1,
            self.origin.0 + self.nx as f64 * self.cell_size,
            self.origin.1 + self.ny as f64 * self.cell_size,
        )
    }

    /// True when the ground-plane projection of `p` lies inside the map.
    pub fn contains(&self, p: &Pose3) -> bool {
        let (x0, y0, x1, y1) = self.bounds();
        p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1
    }

    /// Cell indices of a point, clamped to the grid (points exactly on the
    /// max edge map to the last cell).
    #[inline]
    pub fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let fx = (x - self.origin.0) / self.cell_size;
        let fy = (y - self.origin.1) / self.cell_size;
        let ix = (fx.floor() as isize).clamp(0, self.nx as isize - 1) as usize;
        let iy = (fy.floor() as isize).clamp(0, self.ny as isize - 1) as usize;
        (ix, iy)
    }

    /// Building height under a point (0 outside the raster).
    pub fn height_at(&self, x: f64, y: f64) -> f64 {
        let (x0, y0, x1, y1) = self.bounds();
        if x < x0 || x > x1 || y < y0 || y > y1 {
            return 0.0;
        }
        let (ix, iy) = self.cell_of(x, y);
        self.height_at_cell(ix, iy)
    }

    /// Tallest building on the map.
    pub fn max_height(&self) -> f64 {
        self.heights.iter().cloned().fold(0.0, f64::max)
    }

    /// Fraction of cells with nonzero height.
    pub fn built_fraction(&self) -> f64 {
        let built = self.heights.iter().filter(|h| **h > 0.0).count();
        built as f64 / self.heights.len() as f64
    }

    /// Replace the height raster, keeping the grid geometry. Used to turn
    /// estimated terrain back into a ray-traceable map.
    pub fn with_heights(&self, heights: Vec<f64>) -> Result<Self> {
        Self::new(self.cell_size, self.nx, self.ny, self.origin, heights)
    }
}

/// An explicit axis-aligned building footprint in world coordinates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Footprint {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
    pub height: f64,
}

/// Recipe for a synthetic city.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CitySpec {
    pub nx: usize,
    pub ny: usize,
    pub cell_size: f64,
    #[serde(default)]
    pub origin: (f64, f64),
    /// Target fraction of built (nonzero) cells, in [0, 1].
    pub density: f64,
    /// Building height range in meters, drawn uniformly.
    pub height_min: f64,
    pub height_max: f64,
    /// Random building footprint side lengths, in cells.
    #[serde(default = "default_min_side")]
    pub building_min_cells: usize,
    #[serde(default = "default_max_side")]
    pub building_max_cells: usize,
    /// Buildings placed verbatim before random fill.
    #[serde(default)]
    pub footprints: Vec<Footprint>,
}

fn default_min_side() -> usize {
    2
}

fn default_max_side() -> usize {
    6
}

impl CitySpec {
    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::invalid("city spec: nx and ny must be >= 1"));
        }
        if self.cell_size <= 0.0 || !self.cell_size.is_finite() {
            return Err(Error::invalid("city spec: cell_size must be positive"));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::invalid("city spec: density must be in [0, 1]"));
        }
        if self.height_min < 0.0 || self.height_min > self.height_max {
            return Err(Error::invalid(
                "city spec: need 0 <= height_min <= height_max",
            ));
        }
        if self.building_min_cells == 0 || self.building_min_cells > self.building_max_cells {
            return Err(Error::invalid(
                "city spec: need 1 <= building_min_cells <= building_max_cells",
            ));
        }
        for f in &self.footprints {
            if f.x_min >= f.x_max || f.y_min >= f.y_max || f.height < 0.0 || !f.height.is_finite()
            {
                return Err(Error::invalid("city spec: degenerate footprint"));
            }
        }
        Ok(())
    }
}

/// Generate a synthetic city. Deterministic for a fixed `(seed, spec)` pair.
///
/// Explicit footprints are rasterized first (a cell belongs to a footprint
/// when its center does); random axis-aligned buildings are then placed until
/// the built-cell fraction reaches `spec.density`. Overlaps keep the taller
/// height.
pub fn generate_city(seed: u64, spec: &CitySpec) -> Result<CityMap> {
    spec.validate()?;
    let mut heights = vec![0.0f64; spec.nx * spec.ny];

    for f in &spec.footprints {
        rasterize(spec, &mut heights, f);
    }

    let ncells = spec.nx * spec.ny;
    let target = (spec.density * ncells as f64).round() as usize;
    let mut built = heights.iter().filter(|h| **h > 0.0).count();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Generous cap so pathological overlap cannot loop forever.
    let max_attempts = 64 * ncells.max(64);
    let mut attempts = 0;
    while built < target && attempts < max_attempts {
        attempts += 1;
        let w = rng.gen_range(spec.building_min_cells..=spec.building_max_cells);
        let d = rng.gen_range(spec.building_min_cells..=spec.building_max_cells);
        let w = w.min(spec.nx);
        let d = d.min(spec.ny);
        let ix0 = rng.gen_range(0..=spec.nx - w);
        let iy0 = rng.gen_range(0..=spec.ny - d);
        let h = if spec.height_max > spec.height_min {
            rng.gen_range(spec.height_min..=spec.height_max)
        } else {
            spec.height_min
        };
        if h <= 0.0 {
            continue;
        }
        for ix in ix0..ix0 + w {
            for iy in iy0..iy0 + d {
                let cell = &mut heights[ix * spec.ny + iy];
                if *cell == 0.0 {
                    built += 1;
                }
                *cell = cell.max(h);
            }
        }
    }

    CityMap::new(
        spec.cell_size,
        spec.nx,
        spec.ny,
        spec.origin,
        heights,
    )
}

fn rasterize(spec: &CitySpec, heights: &mut [f64], f: &Footprint) {
    for ix in 0..spec.nx {
        let cx = spec.origin.0 + (ix as f64 + 0.5) * spec.cell_size;
        if cx < f.x_min || cx > f.x_max {
            continue;
        }
        for iy in 0..spec.ny {
            let cy = spec.origin.1 + (iy as f64 + 0.5) * spec.cell_size;
            if cy < f.y_min || cy > f.y_max {
                continue;
            }
            let cell = &mut heights[ix * spec.ny + iy];
            *cell = cell.max(f.height);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_spec() -> CitySpec {
        CitySpec {
            nx: 100,
            ny: 100,
            cell_size: 5.0,
            origin: (0.0, 0.0),
            density: 0.3,
            height_min: 10.0,
            height_max: 40.0,
            building_min_cells: 2,
            building_max_cells: 6,
            footprints: Vec::new(),
        }
    }

    #[test]
    fn zero_density_is_all_ground() {
        let mut spec = base_spec();
        spec.density = 0.0;
        let map = generate_city(1, &spec).unwrap();
        assert!(map.heights().iter().all(|h| *h == 0.0));
    }

    #[test]
    fn explicit_footprint_rasterizes_one_cell() {
        let mut spec = base_spec();
        spec.density = 0.0;
        // Exactly cell (3, 4): x in [15, 20), y in [20, 25).
        spec.footprints.push(Footprint {
            x_min: 15.0,
            y_min: 20.0,
            x_max: 20.0,
            y_max: 25.0,
            height: 30.0,
        });
        let map = generate_city(7, &spec).unwrap();
        for ix in 0..spec.nx {
            for iy in 0..spec.ny {
                let expect = if ix == 3 && iy == 4 { 30.0 } else { 0.0 };
                assert_eq!(map.height_at_cell(ix, iy), expect, "cell ({ix},{iy})");
            }
        }
    }

    #[test]
    fn density_hits_target_within_tolerance() {
        // Monte Carlo over seeds: 10,000 cells, target fraction 0.3 +- 0.05.
        let spec = base_spec();
        let mut worst = 0.0f64;
        for seed in 0..20 {
            let map = generate_city(seed, &spec).unwrap();
            worst = worst.max((map.built_fraction() - 0.3).abs());
        }
        assert!(worst <= 0.05, "worst density error {worst}");
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = base_spec();
        assert_eq!(generate_city(42, &spec).unwrap(), generate_city(42, &spec).unwrap());
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = base_spec();
        spec.density = 1.5;
        assert!(generate_city(0, &spec).is_err());

        let mut spec = base_spec();
        spec.height_min = 50.0;
        spec.height_max = 20.0;
        assert!(generate_city(0, &spec).is_err());
    }

    #[test]
    fn map_invariants_enforced() {
        assert!(CityMap::new(0.0, 2, 2, (0.0, 0.0), vec![0.0; 4]).is_err());
        assert!(CityMap::new(1.0, 2, 2, (0.0, 0.0), vec![0.0; 3]).is_err());
        assert!(CityMap::new(1.0, 2, 2, (0.0, 0.0), vec![-1.0, 0.0, 0.0, 0.0]).is_err());
        assert!(CityMap::new(1.0, 0, 2, (0.0, 0.0), vec![]).is_err());
    }
}
