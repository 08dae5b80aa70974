//! Line-of-sight ray tracing over the city raster.
//!
//! The 2D projection of a link is walked cell by cell (Amanatides-Woo style
//! traversal) with the exact parameter interval each cell occupies, so
//! blocking is decided from the true minimum link altitude over each
//! crossing, not from point samples.
//!
//! Conventions, shared by every consumer (classification, terrain-bound
//! inference, planners):
//! - a cell blocks when the link altitude drops strictly below the cell
//!   height somewhere over the crossing; grazing a roof exactly counts as
//!   clear,
//! - the two endpoint cells never block, so a node standing beside or inside
//!   a footprint is not self-blocked,
//! - obstruction severity is the total blocked length measured on the
//!   ground-plane projection. Measuring in 2D keeps severity monotone as the
//!   link steepens, which is what makes segment regions nested.

use crate::error::{Error, Result};
use crate::world::city::CityMap;
use crate::world::geometry::{GroundNode, Pose3};

/// One cell crossing of the projected segment: cell indices plus the
/// parameter interval `[t0, t1]` (0 at `a`, 1 at `b`).
#[derive(Debug, Clone, Copy)]
pub struct Crossing {
    pub ix: usize,
    pub iy: usize,
    pub t0: f64,
    pub t1: f64,
}

/// Walk every grid cell crossed by the 2D projection of segment `a`-`b`,
/// in order from `a` to `b`. The visitor returns `false` to stop early.
pub fn for_each_crossing<F>(map: &CityMap, a: &Pose3, b: &Pose3, mut visit: F)
where
    F: FnMut(Crossing) -> bool,
{
    let (ox, oy) = map.origin();
    let cs = map.cell_size();
    let dx = b.x - a.x;
    let dy = b.y - a.y;

    let (mut ix, mut iy) = map.cell_of(a.x, a.y);
    let (end_ix, end_iy) = map.cell_of(b.x, b.y);

    let step_x: isize = if dx > 0.0 { 1 } else { -1 };
    let step_y: isize = if dy > 0.0 { 1 } else { -1 };

    // Parameter value at which the ray leaves the current cell through the
    // next x (resp. y) boundary, and the per-cell increment.
    let mut t_max_x = if dx != 0.0 {
        let boundary = ox + (ix as f64 + if dx > 0.0 { 1.0 } else { 0.0 }) * cs;
        (boundary - a.x) / dx
    } else {
        f64::INFINITY
    };
    let mut t_max_y = if dy != 0.0 {
        let boundary = oy + (iy as f64 + if dy > 0.0 { 1.0 } else { 0.0 }) * cs;
        (boundary - a.y) / dy
    } else {
        f64::INFINITY
    };
    let t_delta_x = if dx != 0.0 { cs / dx.abs() } else { f64::INFINITY };
    let t_delta_y = if dy != 0.0 { cs / dy.abs() } else { f64::INFINITY };

    let mut t0 = 0.0f64;
    loop {
        let t1 = t_max_x.min(t_max_y).min(1.0);
        if t1 > t0 {
            let cont = visit(Crossing { ix, iy, t0, t1 });
            if !cont {
                return;
            }
        }
        if t1 >= 1.0 || (ix == end_ix && iy == end_iy) {
            return;
        }
        if t_max_x <= t_max_y {
            t0 = t_max_x;
            t_max_x += t_delta_x;
            let next = ix as isize + step_x;
            if next < 0 || next >= map.nx() as isize {
                return;
            }
            ix = next as usize;
        } else {
            t0 = t_max_y;
            t_max_y += t_delta_y;
            let next = iy as isize + step_y;
            if next < 0 || next >= map.ny() as isize {
                return;
            }
            iy = next as usize;
        }
    }
}

fn check_bounds(map: &CityMap, p: &Pose3, what: &str) -> Result<()> {
    if !map.contains(p) {
        let (x0, y0, x1, y1) = map.bounds();
        return Err(Error::OutOfBounds(format!(
            "{what} ({}, {}) outside map [{x0}, {x1}] x [{y0}, {y1}]",
            p.x, p.y
        )));
    }
    Ok(())
}

/// Length of the sub-interval of `[t0, t1]` on which the link altitude
/// `z(t) = za + (zb - za) t` is strictly below `h`, scaled by the projected
/// segment length `len2d`.
#[inline]
fn blocked_portion(za: f64, zb: f64, t0: f64, t1: f64, h: f64, len2d: f64) -> f64 {
    let dz = zb - za;
    if dz == 0.0 {
        return if za < h { (t1 - t0) * len2d } else { 0.0 };
    }
    // z(t) < h on one side of t* = (h - za) / dz.
    let t_star = (h - za) / dz;
    let (lo, hi) = if dz > 0.0 {
        // below h for t < t*
        (t0, t1.min(t_star))
    } else {
        (t0.max(t_star), t1)
    };
    if hi > lo {
        (hi - lo) * len2d
    } else {
        0.0
    }
}

/// Total obstructed length of link `a`-`b`, measured on the ground-plane
/// projection, in meters. Zero means unobstructed.
pub fn blocked_length(map: &CityMap, a: &Pose3, b: &Pose3) -> Result<f64> {
    check_bounds(map, a, "segment start")?;
    check_bounds(map, b, "segment end")?;

    let len2d = a.horizontal_distance(b);
    if len2d == 0.0 {
        // Vertical link: only the shared endpoint cell, which never blocks.
        return Ok(0.0);
    }
    let start = map.cell_of(a.x, a.y);
    let end = map.cell_of(b.x, b.y);
    let mut total = 0.0;
    for_each_crossing(map, a, b, |c| {
        if (c.ix, c.iy) == start || (c.ix, c.iy) == end {
            return true;
        }
        let h = map.height_at_cell(c.ix, c.iy);
        if h > 0.0 {
            total += blocked_portion(a.z, b.z, c.t0, c.t1, h, len2d);
        }
        true
    });
    Ok(total)
}

/// True when the straight segment `a`-`b` clears every building it crosses.
pub fn line_of_sight(map: &CityMap, a: &Pose3, b: &Pose3) -> Result<bool> {
    check_bounds(map, a, "segment start")?;
    check_bounds(map, b, "segment end")?;

    let len2d = a.horizontal_distance(b);
    if len2d == 0.0 {
        return Ok(true);
    }
    let start = map.cell_of(a.x, a.y);
    let end = map.cell_of(b.x, b.y);
    let mut clear = true;
    for_each_crossing(map, a, b, |c| {
        if (c.ix, c.iy) == start || (c.ix, c.iy) == end {
            return true;
        }
        let h = map.height_at_cell(c.ix, c.iy);
        if h > 0.0 && blocked_portion(a.z, b.z, c.t0, c.t1, h, len2d) > 0.0 {
            clear = false;
            return false;
        }
        true
    });
    Ok(clear)
}

/// Default obstruction-severity thresholds for a `k`-segment classifier:
/// segment `s` means the projected blocked length exceeds `20 * (s - 2)`
/// meters (segment 1 is fully clear).
pub fn default_thresholds(k: usize) -> Vec<f64> {
    (0..k.saturating_sub(1)).map(|i| 20.0 * i as f64).collect()
}

/// Classify a link against explicit blocked-length thresholds
/// (strictly increasing, `thresholds[0] == 0`). Returns `s` in
/// `1..=thresholds.len() + 1`.
pub fn classify_with_thresholds(
    map: &CityMap,
    uav: &Pose3,
    endpoint: &Pose3,
    thresholds: &[f64],
) -> Result<usize> {
    let bl = blocked_length(map, uav, endpoint)?;
    Ok(1 + thresholds.iter().filter(|t| bl > **t).count())
}

/// Obstruction class of the UAV-node link: 1 = line of sight, k = most
/// obstructed. `k >= 2` is required; `k > 2` uses the default thresholds.
pub fn classify_segment(map: &CityMap, uav: &Pose3, node: &GroundNode, k: usize) -> Result<usize> {
    if k < 2 {
        return Err(Error::invalid("segment count k must be >= 2"));
    }
    classify_with_thresholds(map, uav, &node.position, &default_thresholds(k))
}
