//! Terrain reconstruction from classified radio links.
//!
//! Every link labeled line-of-sight pins an inequality on each crossed cell:
//! the building there must sit below the link at the crossing. Aggregating
//! the inequalities over many links carves per-cell height upper bounds out
//! of an initially unconstrained sky. NLoS links are disjunctive (at least
//! one crossed cell pokes above the link) and by default only inform the
//! re-labeling consistency check, not the bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::{self, FitOptions, InitPolicy, LabeledDataset};
use crate::world::channel::{Measurement, SegmentedModel};
use crate::world::city::CityMap;
use crate::world::geometry::GroundNode;
use crate::world::raytrace;

/// Per-cell building-height interval estimates aligned with a city grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightBounds {
    pub cell_size: f64,
    pub nx: usize,
    pub ny: usize,
    pub origin: (f64, f64),
    /// Least upper bound per cell; `f64::INFINITY` when unconstrained.
    pub upper: Vec<f64>,
    /// Greatest lower bound per cell (0 unless an NLoS heuristic raised it).
    pub lower: Vec<f64>,
    /// Point estimate per cell, within `[lower, upper]`.
    pub estimate: Vec<f64>,
    /// How many LoS crossings constrained each cell.
    pub los_crossings: Vec<u32>,
}

impl HeightBounds {
    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        ix * self.ny + iy
    }

    /// The estimate raster as a ray-traceable city.
    pub fn estimate_map(&self) -> Result<CityMap> {
        CityMap::new(
            self.cell_size,
            self.nx,
            self.ny,
            self.origin,
            self.estimate.clone(),
        )
    }

    fn check_invariants(&self) -> Result<()> {
        for i in 0..self.cells() {
            if !(self.lower[i] >= 0.0
                && self.lower[i] <= self.estimate[i]
                && self.estimate[i] <= self.upper[i])
            {
                return Err(Error::Numeric(format!(
                    "bounds out of order at cell {i}: {} <= {} <= {}",
                    self.lower[i], self.estimate[i], self.upper[i]
                )));
            }
        }
        Ok(())
    }
}

/// How NLoS links contribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NlosPolicy {
    /// Bounds come from LoS links only.
    Ignore,
    /// Raise `lower` on the single crossed cell with the highest current
    /// estimate (a heuristic resolution of the disjunction).
    RaiseLower,
}

/// How the point estimate is extracted from `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatePolicy {
    /// Midpoint of `[lower, min(upper, prior_max)]`, clamped to the bounds.
    /// Unobserved cells default to half the prior ceiling.
    MidpointPrior { prior_max_m: f64 },
    /// `clamp(prior, lower, upper)`: a flat prior pushed inside the bounds.
    FlatPrior { prior_m: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct InferOptions {
    pub nlos: NlosPolicy,
    pub estimate: EstimatePolicy,
    /// Keep the r-th smallest crossing constraint per cell instead of the
    /// minimum (r = 1). Larger r tolerates a few mislabeled LoS links at the
    /// cost of looser (possibly unsound) bounds.
    pub robust_rank: usize,
}

impl Default for InferOptions {
    fn default() -> Self {
        Self {
            nlos: NlosPolicy::Ignore,
            estimate: EstimatePolicy::MidpointPrior { prior_max_m: 60.0 },
            robust_rank: 1,
        }
    }
}

/// Grid geometry the bounds are computed on (usually copied from the true
/// map in simulation, or chosen to cover the survey area).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub cell_size: f64,
    pub nx: usize,
    pub ny: usize,
    pub origin: (f64, f64),
}

impl GridGeometry {
    pub fn of_map(map: &CityMap) -> Self {
        Self {
            cell_size: map.cell_size(),
            nx: map.nx(),
            ny: map.ny(),
            origin: map.origin(),
        }
    }

}

/// Lower `upper[cell]` to the `robust_rank`-th smallest constraint seen.
struct RankedMin {
    rank: usize,
    // Largest-first; holds at most `rank` values.
    kept: Vec<f64>,
}

impl RankedMin {
    fn new(rank: usize) -> Self {
        Self {
            rank: rank.max(1),
            kept: Vec::new(),
        }
    }

    fn push(&mut self, v: f64) {
        if self.kept.len() < self.rank {
            self.kept.push(v);
            self.kept.sort_by(|a, b| b.partial_cmp(a).unwrap());
        } else if v < self.kept[0] {
            self.kept[0] = v;
            self.kept.sort_by(|a, b| b.partial_cmp(a).unwrap());
        }
    }

    fn value(&self) -> f64 {
        if self.kept.len() == self.rank {
            self.kept[0]
        } else {
            f64::INFINITY
        }
    }
}

/// Aggregate LoS inequality constraints into per-cell height bounds.
///
/// K=2 label semantics: 1 = LoS, anything else = NLoS. The two endpoint
/// cells of each link are skipped, mirroring the ray tracer's self-blocking
/// rule. Links may start or end outside the bounds grid; traversal runs on
/// an aligned expansion and only cells inside `geom` record constraints.
/// With correct labels the bounds are sound: `upper >= true height`
/// everywhere. An empty dataset yields fully unconstrained bounds.
pub fn infer_bounds(
    labeled: &LabeledDataset,
    nodes: &[GroundNode],
    geom: &GridGeometry,
    opts: &InferOptions,
) -> Result<HeightBounds> {
    // Expand the traversal grid (cell-aligned) to cover every endpoint.
    let cs = geom.cell_size;
    let (mut min_x, mut min_y) = geom.origin;
    let mut max_x = geom.origin.0 + geom.nx as f64 * cs;
    let mut max_y = geom.origin.1 + geom.ny as f64 * cs;
    let mut endpoints: Vec<(crate::world::geometry::Pose3, crate::world::geometry::Pose3)> =
        Vec::with_capacity(labeled.measurements.len());
    for m in &labeled.measurements {
        let node = nodes.iter().find(|n| n.id == m.node_id).ok_or_else(|| {
            Error::invalid(format!("measurement references unknown node {}", m.node_id))
        })?;
        let (a, b) = (m.uav, node.position);
        min_x = min_x.min(a.x).min(b.x);
        min_y = min_y.min(a.y).min(b.y);
        max_x = max_x.max(a.x).max(b.x);
        max_y = max_y.max(a.y).max(b.y);
        endpoints.push((a, b));
    }
    let off_x = ((geom.origin.0 - min_x) / cs).ceil().max(0.0) as usize + 1;
    let off_y = ((geom.origin.1 - min_y) / cs).ceil().max(0.0) as usize + 1;
    let pad_x = ((max_x - (geom.origin.0 + geom.nx as f64 * cs)) / cs)
        .ceil()
        .max(0.0) as usize
        + 1;
    let pad_y = ((max_y - (geom.origin.1 + geom.ny as f64 * cs)) / cs)
        .ceil()
        .max(0.0) as usize
        + 1;
    let traversal_map = CityMap::flat(
        cs,
        geom.nx + off_x + pad_x,
        geom.ny + off_y + pad_y,
        (
            geom.origin.0 - off_x as f64 * cs,
            geom.origin.1 - off_y as f64 * cs,
        ),
    )?;

    let cells = geom.nx * geom.ny;
    let mut mins: Vec<RankedMin> = (0..cells)
        .map(|_| RankedMin::new(opts.robust_rank))
        .collect();
    let mut crossings = vec![0u32; cells];
    let mut lower = vec![0.0f64; cells];

    // Traversal-grid cell to bounds-grid index.
    let to_geom = |ix: usize, iy: usize| -> Option<usize> {
        let gx = ix.checked_sub(off_x)?;
        let gy = iy.checked_sub(off_y)?;
        (gx < geom.nx && gy < geom.ny).then_some(gx * geom.ny + gy)
    };

    for ((a, b), label) in endpoints.iter().zip(&labeled.labels) {
        let start = traversal_map.cell_of(a.x, a.y);
        let end = traversal_map.cell_of(b.x, b.y);
        if *label == 1 {
            raytrace::for_each_crossing(&traversal_map, a, b, |c| {
                if (c.ix, c.iy) == start || (c.ix, c.iy) == end {
                    return true;
                }
                let idx = match to_geom(c.ix, c.iy) {
                    Some(i) => i,
                    None => return true,
                };
                // Minimum link altitude over the crossing interval.
                let z0 = a.z + (b.z - a.z) * c.t0;
                let z1 = a.z + (b.z - a.z) * c.t1;
                mins[idx].push(z0.min(z1));
                crossings[idx] += 1;
                true
            });
        } else if opts.nlos == NlosPolicy::RaiseLower {
            // The blocker is ambiguous; blame the crossed cell that already
            // looks tallest.
            let mut best: Option<(usize, f64, f64)> = None;
            raytrace::for_each_crossing(&traversal_map, a, b, |c| {
                if (c.ix, c.iy) == start || (c.ix, c.iy) == end {
                    return true;
                }
                let idx = match to_geom(c.ix, c.iy) {
                    Some(i) => i,
                    None => return true,
                };
                let z0 = a.z + (b.z - a.z) * c.t0;
                let z1 = a.z + (b.z - a.z) * c.t1;
                let current = mins[idx].value();
                let score = if current.is_finite() { current } else { 0.0 };
                if best.map(|(_, s, _)| score > s).unwrap_or(true) {
                    best = Some((idx, score, z0.min(z1)));
                }
                true
            });
            if let Some((idx, _, z_min)) = best {
                lower[idx] = lower[idx].max(z_min.max(0.0));
            }
        }
    }

    let upper: Vec<f64> = mins.iter().map(|m| m.value()).collect();
    // Lower bounds never exceed uppers; a conflicting NLoS hint loses.
    for i in 0..cells {
        if lower[i] > upper[i] {
            lower[i] = upper[i];
        }
    }
    let estimate: Vec<f64> = (0..cells)
        .map(|i| {
            let e = match opts.estimate {
                EstimatePolicy::MidpointPrior { prior_max_m } => {
                    0.5 * (lower[i] + upper[i].min(prior_max_m).max(lower[i]))
                }
                EstimatePolicy::FlatPrior { prior_m } => prior_m,
            };
            e.clamp(lower[i], upper[i])
        })
        .collect();

    let bounds = HeightBounds {
        cell_size: geom.cell_size,
        nx: geom.nx,
        ny: geom.ny,
        origin: geom.origin,
        upper,
        lower,
        estimate,
        los_crossings: crossings,
    };
    bounds.check_invariants()?;
    Ok(bounds)
}

/// Joint radio/terrain refinement result.
#[derive(Debug, Clone)]
pub struct JointRefine {
    pub model: SegmentedModel,
    pub bounds: HeightBounds,
    pub labeled: LabeledDataset,
    pub outer_iterations: usize,
    pub converged: bool,
    pub label_flips_per_iter: Vec<usize>,
    /// Label accuracy against simulation truth per outer iteration, when
    /// every measurement carries it.
    pub accuracy_trace: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct RefineOptions {
    pub fit: FitOptions,
    pub infer: InferOptions,
    pub outer_iters: usize,
    /// Labels seeding the loop; defaults to a full alternating fit.
    pub initial_labels: Option<Vec<usize>>,
    /// Log-odds weight of the terrain-estimate LoS prediction in the
    /// re-label step. Confident channel evidence overrides the map,
    /// borderline points follow it.
    pub map_prior_logodds: f64,
}

impl RefineOptions {
    pub fn new(outer_iters: usize) -> Self {
        Self {
            fit: FitOptions::new(2),
            infer: InferOptions::default(),
            outer_iters,
            initial_labels: None,
            map_prior_logodds: (0.85f64 / 0.15).ln(),
        }
    }
}

/// Iterate {least-squares refit of the channel -> terrain bounds from the
/// LoS-labeled links -> re-label each link by Gaussian likelihood plus a
/// map-consistency prior from ray tracing the terrain estimate} until the
/// labels reach a fixed point or the iteration budget runs out.
///
/// Labels use LoS/NLoS semantics (`k = 2`); segment 1 is normalized to the
/// smaller fitted exponent every round.
pub fn joint_refine(
    measurements: &[Measurement],
    nodes: &[GroundNode],
    geom: &GridGeometry,
    opts: &RefineOptions,
) -> Result<JointRefine> {
    if opts.outer_iters == 0 {
        return Err(Error::invalid("outer_iters must be >= 1"));
    }
    if opts.fit.k != 2 {
        return Err(Error::invalid(
            "joint refinement uses LoS/NLoS semantics (k = 2)",
        ));
    }

    let mut labels = match &opts.initial_labels {
        Some(l) => {
            if l.len() != measurements.len() || l.iter().any(|s| *s < 1 || *s > 2) {
                return Err(Error::invalid("initial labels malformed"));
            }
            l.clone()
        }
        None => {
            let mut fit_opts = opts.fit.clone();
            fit_opts.init = InitPolicy::Auto(crate::world::channel::GlobalLosParams::default());
            learn::fit_segmented_model(measurements, nodes, &fit_opts)?
                .labeled
                .labels
        }
    };

    // Distances for the likelihood scores.
    let mut dists = Vec::with_capacity(measurements.len());
    for m in measurements {
        let node = nodes.iter().find(|n| n.id == m.node_id).ok_or_else(|| {
            Error::invalid(format!("measurement references unknown node {}", m.node_id))
        })?;
        dists.push(m.uav.distance(&node.position));
    }

    let mut flips_trace = Vec::new();
    let mut accuracy_trace = LabeledDataset::new(measurements.to_vec(), labels.clone(), 2)
        .ok()
        .and_then(|l| l.accuracy_vs_truth())
        .map(|a| vec![a]);
    let mut outer = 0;
    let mut converged = false;
    let mut model;

    loop {
        outer += 1;

        // Per-segment least squares on the current labels; keep segment 1
        // the less obstructed one.
        let mut fitted =
            learn::fit_with_fixed_labels(measurements, nodes, &labels, &opts.fit)?;
        if fitted.segments[0].alpha > fitted.segments[1].alpha {
            fitted.segments.swap(0, 1);
            for l in &mut labels {
                *l = 3 - *l;
            }
        }
        model = fitted;

        let labeled = LabeledDataset::new(measurements.to_vec(), labels.clone(), 2)?;
        let bounds = infer_bounds(&labeled, nodes, geom, &opts.infer)?;

        // Re-label: Gaussian likelihood per segment plus a prior toward the
        // segment the estimated terrain predicts.
        let est_map = bounds.estimate_map()?;
        let mut relabeled = Vec::with_capacity(measurements.len());
        for (m, d) in measurements.iter().zip(&dists) {
            let node = nodes.iter().find(|n| n.id == m.node_id).unwrap();
            let map_says = if raytrace::line_of_sight(&est_map, &m.uav, &node.position)? {
                1
            } else {
                2
            };
            let mut best = 1usize;
            let mut best_score = f64::INFINITY;
            for s in 1..=2 {
                let p = &model.segments[s - 1];
                let r = m.rssi_dbm - model.rssi_mean(s, *d)?;
                let mut score = p.sigma_db.ln() + r * r / (2.0 * p.sigma_db * p.sigma_db);
                if s != map_says {
                    score += opts.map_prior_logodds;
                }
                if score < best_score {
                    best_score = score;
                    best = s;
                }
            }
            relabeled.push(best);
        }

        let flips = relabeled
            .iter()
            .zip(&labels)
            .filter(|(a, b)| a != b)
            .count();
        flips_trace.push(flips);
        if let Some(trace) = &mut accuracy_trace {
            if let Some(acc) = LabeledDataset::new(measurements.to_vec(), relabeled.clone(), 2)?
                .accuracy_vs_truth()
            {
                trace.push(acc);
            }
        }

        // A relabeled segment starved below the refit minimum would wedge
        // the next round; stop at the last consistent state instead.
        let seg1 = relabeled.iter().filter(|s| **s == 1).count();
        let starved = seg1 < 2 || relabeled.len() - seg1 < 2;

        if flips == 0 {
            converged = true;
            labels = relabeled;
            break;
        }
        if starved || outer >= opts.outer_iters {
            if !starved {
                labels = relabeled;
            }
            break;
        }
        labels = relabeled;
    }

    let labeled = LabeledDataset::new(measurements.to_vec(), labels, 2)?;
    let bounds = infer_bounds(&labeled, nodes, geom, &opts.infer)?;
    Ok(JointRefine {
        model,
        bounds,
        labeled,
        outer_iterations: outer,
        converged,
        label_flips_per_iter: flips_trace,
        accuracy_trace,
    })
}

/// Reference survey generators for terrain-inference experiments.
pub mod survey {
    use super::*;
    use crate::world::channel::{sample_rssi, SegmentedModel};
    use crate::world::city::{CityMap, CitySpec, Footprint};
    use crate::world::geometry::{GroundNode, Pose3};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// A street-grid city, IoT nodes scattered along the streets, and a
    /// systematic multi-altitude lawnmower survey flown over the streets,
    /// labeled with ground truth.
    ///
    /// Streets keep every open cell reachable by grazing links, which is
    /// what makes dense sampling drive the inferred height bounds tight.
    pub fn street_grid_survey(seed: u64) -> (CityMap, Vec<GroundNode>, LabeledDataset) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cell = 5.0;
        let n = 50usize;
        // 3x3-cell blocks on a 5-cell period: 15 m buildings, 10 m streets.
        let mut footprints = Vec::new();
        for bx in 0..n / 5 {
            for by in 0..n / 5 {
                footprints.push(Footprint {
                    x_min: bx as f64 * 25.0,
                    y_min: by as f64 * 25.0,
                    x_max: bx as f64 * 25.0 + 15.0,
                    y_max: by as f64 * 25.0 + 15.0,
                    height: rng.gen_range(8.0..30.0),
                });
            }
        }
        let spec = CitySpec {
            nx: n,
            ny: n,
            cell_size: cell,
            origin: (0.0, 0.0),
            density: 0.0,
            height_min: 0.0,
            height_max: 0.0,
            building_min_cells: 1,
            building_max_cells: 1,
            footprints,
        };
        let map = crate::world::city::generate_city(seed, &spec).unwrap();

        // Nodes on street cells, thinned to roughly one per three cells.
        let mut nodes = Vec::new();
        let mut id = 0u32;
        for ix in 0..n {
            for iy in 0..n {
                let street = ix % 5 >= 3 || iy % 5 >= 3;
                if street && (ix * 7 + iy * 13) % 5 == 0 {
                    nodes.push(GroundNode::new(
                        id,
                        (ix as f64 + 0.5) * cell,
                        (iy as f64 + 0.5) * cell,
                    ));
                    id += 1;
                }
            }
        }

        // Lawnmower poses down every street band at a ladder of altitudes.
        let mut poses = Vec::new();
        let z_levels = [5.0, 12.0, 19.0, 26.0, 33.0];
        let mut sweep = Vec::new();
        let mut p = 5.0;
        while p < 250.0 {
            sweep.push(p);
            p += 15.0;
        }
        for band in 0..n / 5 {
            let center = band as f64 * 25.0 + 20.0;
            for &z in &z_levels {
                for &t in &sweep {
                    poses.push(Pose3::new(center, t, z));
                    poses.push(Pose3::new(t, center, z));
                }
            }
        }

        let model = SegmentedModel::default();
        let mut ms = Vec::with_capacity(poses.len() * nodes.len());
        let mut labels = Vec::with_capacity(poses.len() * nodes.len());
        let mut meas_seed = seed.wrapping_mul(0x9E37_79B9);
        for pose in &poses {
            for node in &nodes {
                meas_seed = meas_seed.wrapping_add(1);
                let m = sample_rssi(meas_seed, &model, &map, pose, node).unwrap();
                labels.push(m.true_segment.unwrap());
                ms.push(m);
            }
        }
        let labeled = LabeledDataset::new(ms, labels, 2).unwrap();
        (map, nodes, labeled)
    }
}
