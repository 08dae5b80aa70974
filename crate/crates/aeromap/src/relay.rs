//! Single-user relay placement.
//!
//! End-to-end throughput is the minimum of the backhaul (BS-UAV) and access
//! (UAV-user) rates. Because propagation segments are nested, the optimum at
//! fixed altitude sits either on the BS-user axis or on the boundary of the
//! user's LoS region, so the search walks the axis and traces that boundary
//! by marching perpendicular from each axis point — linear work in the
//! BS-user distance at a fixed step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::channel::{relay_rate, SegmentedModel};
use crate::world::city::CityMap;
use crate::world::geometry::{GroundNode, Pose3};
use crate::world::raytrace;

/// A placement decision with its audit trail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelayPlacement {
    pub pose: Pose3,
    pub throughput_bps: f64,
    /// Relay-rate evaluations spent finding it.
    pub evaluations: usize,
    pub on_axis: bool,
    pub on_boundary: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct NestedSearchConfig {
    /// Flight altitude of every candidate, meters.
    pub altitude_m: f64,
    /// Axis discretization step, meters.
    pub step_m: f64,
    /// Perpendicular march resolution; must resolve the narrowest LoS
    /// corridor worth finding. 0 picks `step_m / 4`.
    pub march_step_m: f64,
    /// How far the perpendicular march may wander off the axis.
    pub max_march_m: f64,
    /// Model the BS-UAV hop as always line of sight (high tower); set false
    /// to ray-trace it like the user hop.
    pub bs_always_los: bool,
}

impl Default for NestedSearchConfig {
    fn default() -> Self {
        Self {
            altitude_m: 50.0,
            step_m: 2.0,
            march_step_m: 0.0,
            max_march_m: 200.0,
            bs_always_los: true,
        }
    }
}

/// End-to-end decode-and-forward throughput for a relay at `uav`.
pub fn relay_throughput(
    map: &CityMap,
    model: &SegmentedModel,
    bs: &Pose3,
    user: &GroundNode,
    uav: &Pose3,
    bs_always_los: bool,
) -> Result<f64> {
    let d_bs = uav.distance(bs);
    let d_user = uav.distance(&user.position);
    if d_bs <= 0.0 || d_user <= 0.0 {
        return Err(Error::invalid("relay coincides with an endpoint"));
    }
    let s_bs = if bs_always_los {
        1
    } else {
        raytrace::classify_with_thresholds(map, uav, bs, &model.thresholds_m)?
    };
    let s_user = model.classify(map, uav, user)?;
    let rate_bs = model.link_rate(model.rssi_mean(s_bs, d_bs)?);
    let rate_user = model.link_rate(model.rssi_mean(s_user, d_user)?);
    Ok(relay_rate(rate_bs, rate_user))
}

struct Candidate {
    pose: Pose3,
    throughput: f64,
    on_axis: bool,
}

/// Nested-segment placement search: discretized BS-user axis plus the traced
/// LoS-region boundary of the user at the given altitude.
pub fn plan_relay_nested(
    map: &CityMap,
    model: &SegmentedModel,
    bs: &Pose3,
    user: &GroundNode,
    cfg: &NestedSearchConfig,
) -> Result<RelayPlacement> {
    if cfg.step_m <= 0.0 || cfg.march_step_m < 0.0 {
        return Err(Error::invalid("step must be > 0"));
    }
    let march_step = if cfg.march_step_m > 0.0 {
        cfg.march_step_m
    } else {
        cfg.step_m / 4.0
    };
    let axis_len = Pose3::new(bs.x, bs.y, cfg.altitude_m)
        .horizontal_distance(&user.position);
    let above_user = Pose3::new(user.position.x, user.position.y, cfg.altitude_m);
    if axis_len == 0.0 {
        let throughput =
            relay_throughput(map, model, bs, user, &above_user, cfg.bs_always_los)?;
        return Ok(RelayPlacement {
            pose: above_user,
            throughput_bps: throughput,
            evaluations: 1,
            on_axis: true,
            on_boundary: false,
        });
    }

    // Axis direction and its in-plane normal.
    let ux = (user.position.x - bs.x) / axis_len;
    let uy = (user.position.y - bs.y) / axis_len;
    let (nx, ny) = (-uy, ux);

    let mut evaluations = 0usize;
    let mut best: Option<Candidate> = None;
    let mut consider = |pose: Pose3, on_axis: bool, evals: &mut usize| -> Result<()> {
        if !map.contains(&pose) {
            return Ok(());
        }
        *evals += 1;
        let throughput = relay_throughput(map, model, bs, user, &pose, cfg.bs_always_los)?;
        let better = match &best {
            None => true,
            Some(b) => throughput > b.throughput,
        };
        if better {
            best = Some(Candidate {
                pose,
                throughput,
                on_axis,
            });
        }
        Ok(())
    };

    let user_los = |p: &Pose3| -> Result<bool> {
        raytrace::line_of_sight(map, p, &user.position)
    };

    let n_axis = (axis_len / cfg.step_m).ceil() as usize;
    for i in 0..=n_axis {
        let t = (i as f64 * cfg.step_m).min(axis_len);
        let axis_point = Pose3::new(bs.x + ux * t, bs.y + uy * t, cfg.altitude_m);
        if !map.contains(&axis_point) {
            continue;
        }
        consider(axis_point, true, &mut evaluations)?;

        // March both normals; every LoS flip marks a boundary crossing,
        // bisected to a tenth of the march step, with the LoS-side point
        // kept as a candidate.
        for dir in [1.0, -1.0] {
            let mut prev = axis_point;
            let mut prev_state = user_los(&prev)?;
            let mut marched = march_step;
            while marched <= cfg.max_march_m {
                let p = Pose3::new(
                    axis_point.x + dir * nx * marched,
                    axis_point.y + dir * ny * marched,
                    cfg.altitude_m,
                );
                if !map.contains(&p) {
                    break;
                }
                let state = user_los(&p)?;
                if state != prev_state {
                    let mut lo = prev;
                    let mut hi = p;
                    let lo_state = prev_state;
                    let mut width = march_step;
                    while width > march_step / 10.0 {
                        let mid = Pose3::new(
                            0.5 * (lo.x + hi.x),
                            0.5 * (lo.y + hi.y),
                            cfg.altitude_m,
                        );
                        if user_los(&mid)? == lo_state {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                        width *= 0.5;
                    }
                    let boundary = if lo_state { lo } else { hi };
                    consider(boundary, false, &mut evaluations)?;
                }
                prev = p;
                prev_state = state;
                marched += march_step;
            }
        }
    }

    let best = best.ok_or_else(|| Error::Numeric("no feasible relay candidate".into()))?;
    Ok(RelayPlacement {
        pose: best.pose,
        throughput_bps: best.throughput,
        evaluations,
        on_axis: best.on_axis,
        on_boundary: !best.on_axis,
    })
}

/// Exhaustive grid search over the whole map at fixed altitude. Ties go to
/// the lexicographically smallest pose.
pub fn plan_relay_oracle(
    map: &CityMap,
    model: &SegmentedModel,
    bs: &Pose3,
    user: &GroundNode,
    resolution_m: f64,
    altitude_m: f64,
    bs_always_los: bool,
) -> Result<RelayPlacement> {
    if resolution_m <= 0.0 {
        return Err(Error::invalid("resolution must be > 0"));
    }
    let (x0, y0, x1, y1) = map.bounds();
    let mut evaluations = 0usize;
    let mut best: Option<(Pose3, f64)> = None;
    let mut x = x0 + resolution_m / 2.0;
    while x < x1 {
        let mut y = y0 + resolution_m / 2.0;
        while y < y1 {
            let pose = Pose3::new(x, y, altitude_m);
            let d_user = pose.distance(&user.position);
            let d_bs = pose.distance(bs);
            if d_user > 0.0 && d_bs > 0.0 {
                evaluations += 1;
                let tp = relay_throughput(map, model, bs, user, &pose, bs_always_los)?;
                let better = match &best {
                    None => true,
                    Some((_, b)) => tp > *b,
                };
                if better {
                    best = Some((pose, tp));
                }
            }
            y += resolution_m;
        }
        x += resolution_m;
    }
    let (pose, throughput) = best.ok_or_else(|| Error::Numeric("empty oracle grid".into()))?;

    // Label the winner by its distance to the axis for reporting.
    let axis_len = Pose3::new(bs.x, bs.y, altitude_m).horizontal_distance(&user.position);
    let on_axis = if axis_len == 0.0 {
        true
    } else {
        let ux = (user.position.x - bs.x) / axis_len;
        let uy = (user.position.y - bs.y) / axis_len;
        let px = pose.x - bs.x;
        let py = pose.y - bs.y;
        let along = (px * ux + py * uy).clamp(0.0, axis_len);
        let cx = bs.x + ux * along;
        let cy = bs.y + uy * along;
        ((pose.x - cx).powi(2) + (pose.y - cy).powi(2)).sqrt() <= resolution_m
    };
    Ok(RelayPlacement {
        pose,
        throughput_bps: throughput,
        evaluations,
        on_axis,
        on_boundary: false,
    })
}
