//! IoT data-harvesting trajectory design.
//!
//! A time-discretized path under a length budget, with one served node per
//! slot (orthogonal access). The planner is local search over waypoint
//! perturbations: gradient steps where the channel view is differentiable
//! (global-probabilistic and compressed-map views), pattern search otherwise
//! (deterministic-LoS and true-map views), with every candidate projected
//! back onto the length/dynamics constraints by scaling displacements toward
//! the straight chord.

use serde::{Deserialize, Serialize};

use crate::compress::{expected_rate, expected_rate_gradient, LocalLosModel};
use crate::error::{Error, Result};
use crate::world::channel::{GlobalLosParams, SegmentedModel};
use crate::world::city::CityMap;
use crate::world::geometry::{GroundNode, Pose3};

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Mission envelope for one harvesting flight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySpec {
    pub start: Pose3,
    pub end: Pose3,
    /// Total path length budget, meters.
    pub l_max_m: f64,
    pub n_waypoints: usize,
    /// Speed ceiling, m/s.
    pub v_max: f64,
    /// Acceleration ceiling, m/s^2.
    pub a_max: f64,
    pub slot_duration_s: f64,
    /// Planning altitude; every waypoint flies at this height.
    pub altitude_m: f64,
}

impl TrajectorySpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_waypoints < 2 {
            return Err(Error::invalid("need at least two waypoints"));
        }
        if self.v_max <= 0.0 || self.a_max <= 0.0 || self.slot_duration_s <= 0.0 {
            return Err(Error::invalid("dynamics bounds must be positive"));
        }
        let chord = self.chord_length();
        if self.l_max_m < chord {
            return Err(Error::invalid(format!(
                "length budget {} shorter than the straight path {chord}",
                self.l_max_m
            )));
        }
        let spacing = chord / (self.n_waypoints - 1) as f64;
        if spacing > self.v_max * self.slot_duration_s + 1e-9 {
            return Err(Error::invalid(
                "straight path already violates the speed bound; add waypoints",
            ));
        }
        Ok(())
    }

    fn chord_length(&self) -> f64 {
        let a = Pose3::new(self.start.x, self.start.y, self.altitude_m);
        let b = Pose3::new(self.end.x, self.end.y, self.altitude_m);
        a.distance(&b)
    }

    /// Straight start-end path resampled to `n_waypoints` at the planning
    /// altitude.
    pub fn straight_path(&self) -> Vec<Pose3> {
        let n = self.n_waypoints;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                Pose3::new(
                    self.start.x + t * (self.end.x - self.start.x),
                    self.start.y + t * (self.end.y - self.start.y),
                    self.altitude_m,
                )
            })
            .collect()
    }
}

/// Realized data of one node after flying the path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeBits {
    pub node_id: u32,
    pub bits: f64,
}

/// A planned (and optionally evaluated) harvesting trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<Pose3>,
    /// Served node per slot, aligned with `waypoints`.
    pub schedule: Vec<u32>,
    pub slot_duration_s: f64,
    /// Objective value under the planning channel view, bits.
    pub planned_objective_bits: f64,
    /// Ground-truth data per node, filled by [`evaluate_path`].
    pub realized_bits: Option<Vec<NodeBits>>,
}

impl Trajectory {
    pub fn path_length(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| w[0].distance(&w[1]))
            .sum()
    }

    /// Hard feasibility check against the mission spec.
    pub fn check_against(&self, spec: &TrajectorySpec) -> Result<()> {
        if self.waypoints.len() != spec.n_waypoints {
            return Err(Error::invalid("waypoint count differs from the spec"));
        }
        if self.schedule.len() != self.waypoints.len() {
            return Err(Error::invalid("schedule must cover every waypoint"));
        }
        if self.path_length() > spec.l_max_m + 1e-6 {
            return Err(Error::invalid(format!(
                "path length {} exceeds budget {}",
                self.path_length(),
                spec.l_max_m
            )));
        }
        let dt = spec.slot_duration_s;
        let mut prev_disp: Option<f64> = None;
        for w in self.waypoints.windows(2) {
            let disp = w[0].distance(&w[1]);
            if disp > spec.v_max * dt + 1e-9 {
                return Err(Error::invalid(format!(
                    "slot displacement {disp} exceeds speed bound"
                )));
            }
            if let Some(p) = prev_disp {
                if (disp - p).abs() > spec.a_max * dt * dt + 1e-9 {
                    return Err(Error::invalid("acceleration bound violated"));
                }
            }
            prev_disp = Some(disp);
        }
        Ok(())
    }
}

/// What the planner believes about the channel.
#[derive(Clone)]
pub enum ChannelView<'a> {
    /// Every link treated as line of sight (terrain-blind optimist).
    DeterministicLos,
    /// One logistic LoS probability shared by all nodes.
    GlobalProbabilistic(&'a GlobalLosParams),
    /// Per-node logistic LoS models distilled from a map.
    CompressedMap(&'a [LocalLosModel]),
    /// Ray-traced ground truth (clairvoyant planner).
    TrueMap(&'a CityMap),
}

impl ChannelView<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelView::DeterministicLos => "deterministic_los",
            ChannelView::GlobalProbabilistic(_) => "global_probabilistic",
            ChannelView::CompressedMap(_) => "compressed_map",
            ChannelView::TrueMap(_) => "true_map",
        }
    }

    /// Gradient steps apply where the rate is smooth in the UAV position.
    pub fn is_differentiable(&self) -> bool {
        matches!(
            self,
            ChannelView::GlobalProbabilistic(_) | ChannelView::CompressedMap(_)
        )
    }

    fn local_of(&self, node_id: u32) -> Result<LocalLosModel> {
        match self {
            ChannelView::GlobalProbabilistic(g) => Ok(LocalLosModel {
                node_id,
                slope: g.slope,
                midpoint_deg: g.midpoint_deg,
                samples: 0,
                loglik: 0.0,
            }),
            ChannelView::CompressedMap(models) => models
                .iter()
                .find(|m| m.node_id == node_id)
                .copied()
                .ok_or_else(|| Error::invalid(format!("no compressed model for node {node_id}"))),
            _ => Err(Error::invalid("view has no logistic model")),
        }
    }

    /// Expected service rate of `node` from `uav` under this view, bits/s.
    pub fn rate(&self, model: &SegmentedModel, uav: &Pose3, node: &GroundNode) -> Result<f64> {
        let d = uav.distance(&node.position);
        if d <= 0.0 {
            return Err(Error::invalid("rate undefined at zero distance"));
        }
        match self {
            ChannelView::DeterministicLos => Ok(model.link_rate(model.rssi_mean(1, d)?)),
            ChannelView::GlobalProbabilistic(_) | ChannelView::CompressedMap(_) => {
                let local = self.local_of(node.id)?;
                expected_rate(model, &local, uav, node)
            }
            ChannelView::TrueMap(map) => {
                let s = model.classify(map, uav, node)?;
                Ok(model.link_rate(model.rssi_mean(s, d)?))
            }
        }
    }

    /// Analytic rate gradient for the differentiable views.
    pub fn rate_gradient(
        &self,
        model: &SegmentedModel,
        uav: &Pose3,
        node: &GroundNode,
    ) -> Result<[f64; 3]> {
        let local = self.local_of(node.id)?;
        expected_rate_gradient(model, &local, uav, node)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PlanOptions {
    pub seed: u64,
    /// Hard cap on perturbation rounds; 0 picks `30 * n_waypoints`.
    pub max_rounds: usize,
    /// Stop when the relative gain over this many rounds drops below
    /// `stall_rel_tol`.
    pub stall_rounds: usize,
    pub stall_rel_tol: f64,
    /// Initial trust-region radius for waypoint moves, meters.
    pub trust_init_m: f64,
    /// Optional `(x_min, y_min, x_max, y_max)` box the path must stay in
    /// (set it to the map bounds when planning against ray-traced views).
    pub bounds_xy: Option<(f64, f64, f64, f64)>,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            max_rounds: 0,
            stall_rounds: 10,
            stall_rel_tol: 1e-4,
            trust_init_m: 12.0,
            bounds_xy: None,
        }
    }
}

fn greedy_schedule(
    view: &ChannelView,
    model: &SegmentedModel,
    waypoints: &[Pose3],
    nodes: &[GroundNode],
) -> Result<(Vec<u32>, f64)> {
    let mut schedule = Vec::with_capacity(waypoints.len());
    let mut total_rate = 0.0;
    for wp in waypoints {
        let mut best_id = nodes[0].id;
        let mut best_rate = f64::NEG_INFINITY;
        for node in nodes {
            let r = view.rate(model, wp, node)?;
            // Ties go to the lowest node id; nodes are scanned in order.
            if r > best_rate {
                best_rate = r;
                best_id = node.id;
            }
        }
        schedule.push(best_id);
        total_rate += best_rate;
    }
    Ok((schedule, total_rate))
}

/// Scale displacements toward the straight chord until the dynamics and
/// length constraints hold. Returns the feasible path (the chord itself in
/// the worst case).
fn project_to_feasible(spec: &TrajectorySpec, candidate: &[Pose3]) -> Vec<Pose3> {
    let chord = spec.straight_path();
    let feasible = |lambda: f64| -> Option<Vec<Pose3>> {
        let path: Vec<Pose3> = chord
            .iter()
            .zip(candidate)
            .map(|(c, w)| {
                Pose3::new(
                    c.x + lambda * (w.x - c.x),
                    c.y + lambda * (w.y - c.y),
                    spec.altitude_m,
                )
            })
            .collect();
        let traj = Trajectory {
            waypoints: path.clone(),
            schedule: vec![0; path.len()],
            slot_duration_s: spec.slot_duration_s,
            planned_objective_bits: 0.0,
            realized_bits: None,
        };
        traj.check_against(&TrajectorySpec {
            n_waypoints: path.len(),
            ..*spec
        })
        .ok()
        .map(|_| path)
    };

    if let Some(path) = feasible(1.0) {
        return path;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..25 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid).is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    feasible(lo).unwrap_or(chord)
}

/// Local-search path planner under a channel view. Deterministic per seed.
pub fn plan_path(
    spec: &TrajectorySpec,
    nodes: &[GroundNode],
    model: &SegmentedModel,
    view: &ChannelView,
    opts: &PlanOptions,
    warm_start: Option<&Trajectory>,
) -> Result<Trajectory> {
    spec.validate()?;
    if nodes.is_empty() {
        return Err(Error::invalid("no nodes to serve"));
    }

    let mut waypoints = match warm_start {
        Some(t) => {
            if t.waypoints.len() != spec.n_waypoints {
                return Err(Error::invalid("warm start has a different waypoint count"));
            }
            let mut wp = t.waypoints.clone();
            for p in &mut wp {
                p.z = spec.altitude_m;
            }
            let probe = Trajectory {
                waypoints: wp.clone(),
                schedule: vec![0; wp.len()],
                slot_duration_s: spec.slot_duration_s,
                planned_objective_bits: 0.0,
                realized_bits: None,
            };
            probe.check_against(spec)?;
            wp
        }
        None => spec.straight_path(),
    };

    let dt = spec.slot_duration_s;
    let (mut schedule, mut total_rate) = greedy_schedule(view, model, &waypoints, nodes)?;

    let max_rounds = if opts.max_rounds == 0 {
        30 * spec.n_waypoints
    } else {
        opts.max_rounds
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut trust = opts.trust_init_m;
    let mut history: Vec<f64> = vec![total_rate];

    // Interior waypoints in seeded random sweeps; endpoints stay pinned.
    let interior: Vec<usize> = (1..spec.n_waypoints - 1).collect();
    if !interior.is_empty() {
        let mut order = interior.clone();
        let mut cursor = order.len();

        for _ in 0..max_rounds {
            if cursor >= order.len() {
                order.shuffle(&mut rng);
                cursor = 0;
            }
            let i = order[cursor];
            cursor += 1;

            // Propose displacements for waypoint i.
            let node = nodes
                .iter()
                .find(|n| n.id == schedule[i])
                .expect("scheduled node exists");
            let mut proposals: Vec<(f64, f64)> = Vec::with_capacity(4);
            if view.is_differentiable() {
                let g = view.rate_gradient(model, &waypoints[i], node)?;
                let norm = (g[0] * g[0] + g[1] * g[1]).sqrt();
                if norm > 1e-12 {
                    proposals.push((trust * g[0] / norm, trust * g[1] / norm));
                } else {
                    proposals.push((trust, 0.0));
                }
            } else {
                proposals.extend_from_slice(&[
                    (trust, 0.0),
                    (-trust, 0.0),
                    (0.0, trust),
                    (0.0, -trust),
                ]);
            }

            let mut improved = false;
            for (dx, dy) in proposals {
                let mut candidate = waypoints.clone();
                candidate[i].x += dx;
                candidate[i].y += dy;
                if let Some((x0, y0, x1, y1)) = opts.bounds_xy {
                    candidate[i].x = candidate[i].x.clamp(x0, x1);
                    candidate[i].y = candidate[i].y.clamp(y0, y1);
                }
                let projected = project_to_feasible(spec, &candidate);
                let (cand_schedule, cand_rate) =
                    greedy_schedule(view, model, &projected, nodes)?;
                if cand_rate > total_rate {
                    waypoints = projected;
                    schedule = cand_schedule;
                    total_rate = cand_rate;
                    improved = true;
                    break;
                }
            }
            trust = if improved {
                (trust * 1.3).min(60.0)
            } else {
                (trust * 0.6).max(0.5)
            };

            history.push(total_rate);
            if history.len() > opts.stall_rounds {
                let before = history[history.len() - 1 - opts.stall_rounds];
                let rel = (total_rate - before) / before.abs().max(1e-12);
                if rel < opts.stall_rel_tol {
                    break;
                }
            }
        }
    }

    let traj = Trajectory {
        planned_objective_bits: total_rate * dt,
        waypoints,
        schedule,
        slot_duration_s: dt,
        realized_bits: None,
    };
    traj.check_against(spec)?;
    Ok(traj)
}

/// Fly the trajectory against the ray-traced ground truth and account the
/// data each node actually received. Reproducible per seed; shadowing can be
/// switched off to audit planners noise-free.
pub fn evaluate_path(
    trajectory: &Trajectory,
    map: &CityMap,
    model: &SegmentedModel,
    nodes: &[GroundNode],
    seed: u64,
    with_shadowing: bool,
) -> Result<Vec<NodeBits>> {
    if trajectory.schedule.len() != trajectory.waypoints.len() {
        return Err(Error::invalid("schedule must cover every waypoint"));
    }
    let mut per_node: Vec<NodeBits> = nodes
        .iter()
        .map(|n| NodeBits {
            node_id: n.id,
            bits: 0.0,
        })
        .collect();
    per_node.sort_by_key(|nb| nb.node_id);

    for (slot, (wp, node_id)) in trajectory
        .waypoints
        .iter()
        .zip(&trajectory.schedule)
        .enumerate()
    {
        let node = nodes
            .iter()
            .find(|n| n.id == *node_id)
            .ok_or_else(|| Error::invalid(format!("scheduled node {node_id} unknown")))?;
        let d = wp.distance(&node.position);
        let s = model.classify(map, wp, node)?;
        let mut rssi = model.rssi_mean(s, d)?;
        if with_shadowing {
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed ^ (slot as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            );
            let noise: f64 = StandardNormal.sample(&mut rng);
            rssi += model.params(s)?.sigma_db * noise;
        }
        let bits = trajectory.slot_duration_s * model.link_rate(rssi);
        let entry = per_node
            .iter_mut()
            .find(|nb| nb.node_id == *node_id)
            .expect("node present");
        entry.bits += bits;
    }
    Ok(per_node)
}
