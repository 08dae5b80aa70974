//! Command orchestration behind the `aeromap` binary.
//!
//! Every command reads one scenario JSON (plus `--override key=value` dotted
//! patches and an optional `--seed`), writes its artifacts atomically under
//! `--out-dir`, and returns a one-line JSON summary. Identical config and
//! seed produce byte-identical artifacts.
//!
//! Commands chain through the out directory: `simulate` leaves
//! `measurements.csv` for `fit-channel`/`reconstruct`/`infer-3d`, `gen-city`
//! leaves `city.json` for everything downstream. A missing upstream artifact
//! is recomputed in memory from the same sub-seeds, so single commands stay
//! runnable standalone with identical results.

use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::compress::compress_map;
use crate::error::{Error, Result};
use crate::harvest::{evaluate_path, plan_path, ChannelView, PlanOptions, Trajectory, TrajectorySpec};
use crate::io;
use crate::learn::{
    fit_segmented_model, map_rmse, reconstruct_direct, reconstruct_model_based, DirectMethod,
    FitOptions, InitPolicy, MapPredictor, SegmentedFit,
};
use crate::map3d::{joint_refine, GridGeometry, RefineOptions};
use crate::relay::{plan_relay_nested, plan_relay_oracle, NestedSearchConfig};
use crate::scenario::{derive_seed, Scenario, SeedDomain};
use crate::sensing::{run_localization, Policy, SensingConfig};
use crate::world::channel::{sample_rssi, Measurement};
use crate::world::city::{generate_city, CityMap};
use crate::world::geometry::{GroundNode, Pose3};

/// The sub-commands of the front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    GenCity,
    Simulate,
    FitChannel,
    Reconstruct,
    Infer3d,
    Compress,
    PlanRelay,
    PlanIot,
    Localize,
    Sweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GenCity => "gen-city",
            Command::Simulate => "simulate",
            Command::FitChannel => "fit-channel",
            Command::Reconstruct => "reconstruct",
            Command::Infer3d => "infer-3d",
            Command::Compress => "compress",
            Command::PlanRelay => "plan-relay",
            Command::PlanIot => "plan-iot",
            Command::Localize => "localize",
            Command::Sweep => "sweep",
        }
    }
}

/// One CLI invocation, already parsed.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config_path: PathBuf,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    /// Dotted-path patches, e.g. `("harvest.l_max_m", "800")`.
    pub overrides: Vec<(String, String)>,
}

/// Apply one `key=value` patch to the config document. Values parse as JSON
/// when possible and fall back to strings.
fn apply_override(doc: &mut Value, key: &str, raw: &str) -> Result<()> {
    let parsed: Value = serde_json::from_str(raw).unwrap_or(Value::String(raw.to_string()));
    let mut cursor = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if i + 1 == parts.len() {
            match cursor {
                Value::Object(map) => {
                    map.insert(part.to_string(), parsed);
                    return Ok(());
                }
                _ => {
                    return Err(Error::invalid(format!(
                        "override path {key} does not land in an object"
                    )))
                }
            }
        }
        cursor = match cursor {
            Value::Object(map) => map
                .entry(part.to_string())
                .or_insert_with(|| Value::Object(Default::default())),
            _ => {
                return Err(Error::invalid(format!(
                    "override path {key} crosses a non-object"
                )))
            }
        };
    }
    unreachable!("split never yields an empty iterator")
}

/// Load, patch, and validate the scenario.
pub fn load_scenario(inv: &Invocation) -> Result<Scenario> {
    let text = std::fs::read_to_string(&inv.config_path)?;
    let mut doc: Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("config: {e}")))?;
    for (key, value) in &inv.overrides {
        apply_override(&mut doc, key, value)?;
    }
    if let Some(seed) = inv.seed {
        apply_override(&mut doc, "seed", &seed.to_string())?;
    }
    let scenario: Scenario =
        serde_json::from_value(doc).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
    scenario.validate()?;
    Ok(scenario)
}

fn resolve_city(scenario: &Scenario, out_dir: &Path) -> Result<CityMap> {
    if let Some(file) = &scenario.city.file {
        return io::load_city(Path::new(file));
    }
    let cached = out_dir.join("city.json");
    if cached.exists() {
        return io::load_city(&cached);
    }
    let spec = scenario
        .city
        .spec
        .as_ref()
        .ok_or_else(|| Error::invalid("city: provide either a spec or a file"))?;
    generate_city(derive_seed(scenario.seed, SeedDomain::CityGen, 0), spec)
}

fn simulate_measurements(
    scenario: &Scenario,
    map: &CityMap,
    nodes: &[GroundNode],
) -> Result<Vec<Measurement>> {
    let (x0, y0, x1, y1) = map.bounds();
    let margin = 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(scenario.seed, SeedDomain::Simulate, 1));
    let mut out = Vec::with_capacity(scenario.learn.training_poses * nodes.len());
    for i in 0..scenario.learn.training_poses {
        let pose = Pose3::new(
            rng.gen_range(x0 + margin..x1 - margin),
            rng.gen_range(y0 + margin..y1 - margin),
            scenario.learn.altitude_m,
        );
        for (j, node) in nodes.iter().enumerate() {
            let seed = derive_seed(
                scenario.seed,
                SeedDomain::Simulate,
                1000 + (i * nodes.len() + j) as u64,
            );
            out.push(sample_rssi(seed, &scenario.channel, map, &pose, node)?);
        }
    }
    Ok(out)
}

fn resolve_measurements(
    scenario: &Scenario,
    map: &CityMap,
    nodes: &[GroundNode],
    out_dir: &Path,
) -> Result<Vec<Measurement>> {
    let cached = out_dir.join("measurements.csv");
    if cached.exists() {
        return io::load_measurements(&cached);
    }
    simulate_measurements(scenario, map, nodes)
}

fn fit_options(scenario: &Scenario) -> FitOptions {
    let mut opts = FitOptions::new(scenario.learn.k);
    opts.init = InitPolicy::Auto(scenario.global_los);
    opts.tx_power_dbm = scenario.channel.tx_power_dbm;
    opts.noise_floor_dbm = scenario.channel.noise_floor_dbm;
    opts.bandwidth_hz = scenario.channel.bandwidth_hz;
    opts
}

fn run_fit(scenario: &Scenario, measurements: &[Measurement], nodes: &[GroundNode]) -> Result<SegmentedFit> {
    fit_segmented_model(measurements, nodes, &fit_options(scenario))
}

fn channel_view<'a>(
    name: &str,
    scenario: &'a Scenario,
    map: &'a CityMap,
    compressed: &'a [crate::compress::LocalLosModel],
) -> Result<ChannelView<'a>> {
    match name {
        "deterministic_los" => Ok(ChannelView::DeterministicLos),
        "global_probabilistic" => Ok(ChannelView::GlobalProbabilistic(&scenario.global_los)),
        "compressed_map" => Ok(ChannelView::CompressedMap(compressed)),
        "true_map" => Ok(ChannelView::TrueMap(map)),
        other => Err(Error::invalid(format!("unknown channel view {other:?}"))),
    }
}

fn build_compressed(
    scenario: &Scenario,
    map: &CityMap,
    nodes: &[GroundNode],
) -> Result<Vec<crate::compress::LocalLosModel>> {
    compress_map(
        map,
        nodes,
        scenario.compress.samples_per_node,
        (scenario.compress.radius_min_m, scenario.compress.radius_max_m),
        (
            scenario.compress.altitude_min_m,
            scenario.compress.altitude_max_m,
        ),
        scenario.compress.ridge,
        derive_seed(scenario.seed, SeedDomain::Compress, 0),
    )
}

fn harvest_spec(scenario: &Scenario, l_max: f64) -> TrajectorySpec {
    TrajectorySpec {
        start: Pose3::new(
            scenario.harvest.start[0],
            scenario.harvest.start[1],
            scenario.harvest.altitude_m,
        ),
        end: Pose3::new(
            scenario.harvest.end[0],
            scenario.harvest.end[1],
            scenario.harvest.altitude_m,
        ),
        l_max_m: l_max,
        n_waypoints: scenario.harvest.n_waypoints,
        v_max: scenario.harvest.v_max,
        a_max: scenario.harvest.a_max,
        slot_duration_s: scenario.harvest.slot_duration_s,
        altitude_m: scenario.harvest.altitude_m,
    }
}

fn parse_policy(name: &str) -> Result<Policy> {
    match name {
        "random" => Ok(Policy::Random),
        "map_free_active" => Ok(Policy::MapFreeActive),
        "map_aided_active" => Ok(Policy::MapAidedActive),
        other => Err(Error::invalid(format!("unknown policy {other:?}"))),
    }
}

fn pick_node(nodes: &[GroundNode], wanted: Option<u32>, what: &str) -> Result<GroundNode> {
    match wanted {
        Some(id) => nodes
            .iter()
            .find(|n| n.id == id)
            .copied()
            .ok_or_else(|| Error::invalid(format!("{what}: node {id} not in the scenario"))),
        None => Ok(nodes[0]),
    }
}

/// Execute a command; returns the one-line JSON summary.
pub fn run(inv: &Invocation) -> Result<Value> {
    let scenario = load_scenario(inv)?;
    let out = &inv.out_dir;
    std::fs::create_dir_all(out)?;
    // The resolved configuration is itself an artifact, so a run can be
    // reproduced from its output directory alone.
    io::atomic_write(
        &out.join("resolved_config.json"),
        (serde_json::to_string_pretty(&scenario)? + "\n").as_bytes(),
    )?;

    match inv.command {
        Command::GenCity => {
            let spec = scenario
                .city
                .spec
                .as_ref()
                .ok_or_else(|| Error::invalid("gen-city needs city.spec"))?;
            let map = generate_city(derive_seed(scenario.seed, SeedDomain::CityGen, 0), spec)?;
            io::save_city(&map, &out.join("city.json"))?;
            Ok(json!({
                "command": "gen-city",
                "city": "city.json",
                "nx": map.nx(),
                "ny": map.ny(),
                "built_fraction": io::round6(map.built_fraction()),
                "max_height_m": io::round6(map.max_height()),
            }))
        }

        Command::Simulate => {
            let map = resolve_city(&scenario, out)?;
            let nodes = scenario.build_nodes(map.bounds())?;
            let ms = simulate_measurements(&scenario, &map, &nodes)?;
            io::save_measurements(&ms, &out.join("measurements.csv"))?;
            let los = ms
                .iter()
                .filter(|m| m.true_segment == Some(1))
                .count() as f64
                / ms.len().max(1) as f64;
            Ok(json!({
                "command": "simulate",
                "measurements": "measurements.csv",
                "count": ms.len(),
                "nodes": nodes.len(),
                "los_fraction": io::round6(los),
            }))
        }

        Command::FitChannel => {
            let map = resolve_city(&scenario, out)?;
            let nodes = scenario.build_nodes(map.bounds())?;
            let ms = resolve_measurements(&scenario, &map, &nodes, out)?;
            let fit = run_fit(&scenario, &ms, &nodes)?;
            let segments: Vec<Value> = fit
                .model
                .segments
                .iter()
                .map(|s| {
                    json!({
                        "alpha": io::round6(s.alpha),
                        "beta_db": io::round6(s.beta_db),
                        "sigma_db": io::round6(s.sigma_db),
                    })
                })
                .collect();
            let doc = json!({
                "segments": segments,
                "tx_power_dbm": io::round6(fit.model.tx_power_dbm),
                "noise_floor_dbm": io::round6(fit.model.noise_floor_dbm),
                "bandwidth_hz": io::round6(fit.model.bandwidth_hz),
                "iterations": fit.iterations,
                "converged": fit.converged,
                "label_accuracy": fit.labeled.accuracy_vs_truth().map(io::round6),
            });
            io::atomic_write(&out.join("channel_fit.json"), (doc.to_string() + "\n").as_bytes())?;

            // Labels alongside the raw measurements.
            let mut csv = String::from("uav_x,uav_y,uav_z,node_id,rssi,label\n");
            for (m, l) in fit.labeled.measurements.iter().zip(&fit.labeled.labels) {
                csv.push_str(&format!(
                    "{},{},{},{},{},{l}\n",
                    io::fmt_f64(m.uav.x),
                    io::fmt_f64(m.uav.y),
                    io::fmt_f64(m.uav.z),
                    m.node_id,
                    io::fmt_f64(m.rssi_dbm),
                ));
            }
            io::atomic_write(&out.join("labels.csv"), csv.as_bytes())?;

            Ok(json!({
                "command": "fit-channel",
                "fit": "channel_fit.json",
                "labels": "labels.csv",
                "alphas": fit.model.segments.iter().map(|s| io::round6(s.alpha)).collect::<Vec<_>>(),
                "iterations": fit.iterations,
                "converged": fit.converged,
                "label_accuracy": fit.labeled.accuracy_vs_truth().map(io::round6),
            }))
        }

        Command::Reconstruct => {
            let map = resolve_city(&scenario, out)?;
            let nodes = scenario.build_nodes(map.bounds())?;
            let ms = resolve_measurements(&scenario, &map, &nodes, out)?;
            let node = nodes[0];
            let (x0, y0, x1, y1) = map.bounds();
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(scenario.seed, SeedDomain::Reconstruct, 0));
            let grid: Vec<Pose3> = (0..scenario.learn.query_points)
                .map(|_| {
                    Pose3::new(
                        rng.gen_range(x0 + 2.0..x1 - 2.0),
                        rng.gen_range(y0 + 2.0..y1 - 2.0),
                        scenario.learn.altitude_m,
                    )
                })
                .collect();

            let truth_pred = MapPredictor {
                map: &map,
                thresholds_m: &scenario.channel.thresholds_m,
            };
            let truth_map =
                reconstruct_model_based(&scenario.channel, &truth_pred, grid.clone(), &node)?;
            let fit = run_fit(&scenario, &ms, &nodes)?;
            let model_map = reconstruct_model_based(&fit.model, &truth_pred, grid.clone(), &node)?;
            let direct_map = reconstruct_direct(
                &ms,
                node.id,
                grid,
                DirectMethod::Knn {
                    k: scenario.learn.knn_k,
                },
            )?;
            let rmse_model = map_rmse(&model_map, &truth_map)?;
            let rmse_direct = map_rmse(&direct_map, &truth_map)?;
            io::save_radio_map(
                &direct_map,
                &out.join("radio_map_direct.csv"),
                &out.join("radio_map_direct.json"),
            )?;
            io::save_radio_map(
                &model_map,
                &out.join("radio_map_model.csv"),
                &out.join("radio_map_model.json"),
            )?;
            Ok(json!({
                "command": "reconstruct",
                "node_id": node.id,
                "rmse_direct_db": io::round6(rmse_direct),
                "rmse_model_db": io::round6(rmse_model),
                "direct": "radio_map_direct.csv",
                "model": "radio_map_model.csv",
            }))
        }

        Command::Infer3d => {
            let map = resolve_city(&scenario, out)?;
            let nodes = scenario.build_nodes(map.bounds())?;
            let ms = resolve_measurements(&scenario, &map, &nodes, out)?;
            let geom = GridGeometry::of_map(&map);
            let mut opts = RefineOptions::new(scenario.map3d.outer_iters);
            opts.fit = fit_options(&scenario);
            opts.fit.k = 2;
            let refined = joint_refine(&ms, &nodes, &geom, &opts)?;
            io::save_bounds(&refined.bounds, out, "bounds")?;

            // Terrain audit against the ground truth we simulated from.
            let mut violations = 0usize;
            let mut gap_sum = 0.0;
            let mut constrained = 0usize;
            for ix in 0..map.nx() {
                for iy in 0..map.ny() {
                    let i = refined.bounds.idx(ix, iy);
                    let u = refined.bounds.upper[i];
                    if u < map.height_at_cell(ix, iy) {
                        violations += 1;
                    }
                    if u.is_finite() {
                        constrained += 1;
                        gap_sum += u - map.height_at_cell(ix, iy);
                    }
                }
            }
            Ok(json!({
                "command": "infer-3d",
                "bounds": "bounds_{lower,estimate,upper}.csv",
                "outer_iterations": refined.outer_iterations,
                "converged": refined.converged,
                "constrained_cells": constrained,
                "mean_upper_gap_m": io::round6(gap_sum / constrained.max(1) as f64),
                "unsound_cells": violations,
                "label_accuracy": refined
                    .accuracy_trace
                    .as_ref()
                    .and_then(|t| t.last())
                    .map(|a| io::round6(*a)),
            }))
        }

        Command::Compress => {
            let map = resolve_city(&scenario, out)?;
            let nodes = scenario.build_nodes(map.bounds())?;
            let models = build_compressed(&scenario, &map, &nodes)?;
            io::save_compressed_map(&models, &out.join("compressed_map.json"))?;
            Ok(json!({
                "command": "compress",
                "compressed_map": "compressed_map.json",
                "nodes": models.len(),
                "samples_per_node": scenario.compress.samples_per_node,
            }))
        }

        Command::PlanRelay => {
            let map = resolve_city(&scenario, out)?;
            let nodes = scenario.build_nodes(map.bounds())?;
            let user = pick_node(&nodes, scenario.relay.user_node, "relay")?;
            let bs = Pose3::new(
                scenario.relay.bs[0],
                scenario.relay.bs[1],
                scenario.relay.bs[2],
            );
            let cfg = NestedSearchConfig {
                altitude_m: scenario.relay.altitude_m,
                step_m: scenario.relay.step_m,
                march_step_m: 0.0,
                max_march_m: scenario.relay.max_march_m,
                bs_always_los: scenario.relay.bs_always_los,
            };
            let placed = plan_relay_nested(&map, &scenario.channel, &bs, &user, &cfg)?;
            let oracle = plan_relay_oracle(
                &map,
                &scenario.channel,
                &bs,
                &user,
                scenario.relay.oracle_resolution_m,
                scenario.relay.altitude_m,
                scenario.relay.bs_always_los,
            )?;
            let doc = json!({
                "pose": [io::round6(placed.pose.x), io::round6(placed.pose.y), io::round6(placed.pose.z)],
                "throughput_bps": io::round6(placed.throughput_bps),
                "evaluations": placed.evaluations,
                "on_axis": placed.on_axis,
                "on_boundary": placed.on_boundary,
                "oracle_throughput_bps": io::round6(oracle.throughput_bps),
            });
            io::atomic_write(&out.join("relay.json"), (doc.to_string() + "\n").as_bytes())?;
            Ok(json!({
                "command": "plan-relay",
                "relay": "relay.json",
                "throughput_bps": io::round6(placed.throughput_bps),
                "on_axis": placed.on_axis,
                "on_boundary": placed.on_boundary,
                "evaluations": placed.evaluations,
                "oracle_ratio": io::round6(placed.throughput_bps / oracle.throughput_bps.max(1e-9)),
            }))
        }

        Command::PlanIot => {
            let map = resolve_city(&scenario, out)?;
            let nodes = scenario.build_nodes(map.bounds())?;
            let compressed = if scenario.harvest.view == "compressed_map" {
                build_compressed(&scenario, &map, &nodes)?
            } else {
                Vec::new()
            };
            let view = channel_view(&scenario.harvest.view, &scenario, &map, &compressed)?;
            let spec = harvest_spec(&scenario, scenario.harvest.l_max_m);
            let opts = PlanOptions {
                seed: derive_seed(scenario.seed, SeedDomain::Harvest, 0),
                bounds_xy: Some(map.bounds()),
                ..PlanOptions::default()
            };
            let mut traj = plan_path(&spec, &nodes, &scenario.channel, &view, &opts, None)?;
            let realized = evaluate_path(
                &traj,
                &map,
                &scenario.channel,
                &nodes,
                derive_seed(scenario.seed, SeedDomain::Harvest, 1),
                scenario.harvest.shadowing,
            )?;
            let realized_total: f64 = realized.iter().map(|nb| nb.bits).sum();
            traj.realized_bits = Some(realized);
            io::save_trajectory(&traj, &out.join("trajectory.json"))?;
            Ok(json!({
                "command": "plan-iot",
                "trajectory": "trajectory.json",
                "view": scenario.harvest.view,
                "planned_objective_bits": io::round6(traj.planned_objective_bits),
                "realized_total_bits": io::round6(realized_total),
                "path_length_m": io::round6(traj.path_length()),
            }))
        }

        Command::Localize => {
            let map = resolve_city(&scenario, out)?;
            let nodes = scenario.build_nodes(map.bounds())?;
            let target = pick_node(&nodes, scenario.sensing.target_node, "sensing")?;
            let policy = parse_policy(&scenario.sensing.policy)?;
            let cfg = SensingConfig {
                n_particles: scenario.sensing.n_particles,
                ring_candidates: scenario.sensing.ring_candidates,
                ring_radius_m: scenario.sensing.ring_radius_m,
                altitude_m: scenario.sensing.altitude_m,
                global_los: scenario.global_los,
                mc_draws: scenario.sensing.mc_draws,
                scoring_particles: scenario.sensing.scoring_particles,
            };
            let run = run_localization(
                &map,
                &scenario.channel,
                &target,
                scenario.sensing.budget,
                policy,
                &cfg,
                derive_seed(scenario.seed, SeedDomain::Sensing, 0),
            )?;
            io::save_localization_log(&run.steps, &out.join("localize_run.csv"))?;
            let doc = json!({
                "policy": policy.name(),
                "target_node": target.id,
                "estimate": [io::round6(run.estimate.0), io::round6(run.estimate.1)],
                "final_rmse_m": io::round6(run.final_rmse_m),
                "steps": run.steps.len(),
                "degenerate_resets": run.degenerate_resets,
            });
            io::atomic_write(
                &out.join("localize_summary.json"),
                (doc.to_string() + "\n").as_bytes(),
            )?;
            Ok(json!({
                "command": "localize",
                "log": "localize_run.csv",
                "summary": "localize_summary.json",
                "policy": policy.name(),
                "final_rmse_m": io::round6(run.final_rmse_m),
            }))
        }

        Command::Sweep => {
            let spec = scenario
                .city
                .spec
                .as_ref()
                .ok_or_else(|| Error::invalid("sweep needs city.spec for scenario replicates"))?;
            let mut rows: Vec<(u64, String, f64, f64)> = Vec::new();
            let mut l_maxes = scenario.harvest.sweep_l_max.clone();
            l_maxes.sort_by(|a, b| a.partial_cmp(b).unwrap());

            for rep in 0..scenario.harvest.sweep_scenarios as u64 {
                let map = generate_city(
                    derive_seed(scenario.seed, SeedDomain::Sweep, 100 + rep),
                    spec,
                )?;
                let mut rep_scenario = scenario.clone();
                rep_scenario.seed = derive_seed(scenario.seed, SeedDomain::Sweep, 200 + rep);
                let nodes = rep_scenario.build_nodes(map.bounds())?;
                let compressed = build_compressed(&rep_scenario, &map, &nodes)?;

                for view_name in &scenario.harvest.sweep_views {
                    let view = channel_view(view_name, &scenario, &map, &compressed)?;
                    let mut warm: Option<Trajectory> = None;
                    for (li, l_max) in l_maxes.iter().enumerate() {
                        let mission = harvest_spec(&scenario, *l_max);
                        let opts = PlanOptions {
                            seed: derive_seed(
                                scenario.seed,
                                SeedDomain::Harvest,
                                1_000 + rep * 100 + li as u64,
                            ),
                            bounds_xy: Some(map.bounds()),
                            ..PlanOptions::default()
                        };
                        let traj = plan_path(
                            &mission,
                            &nodes,
                            &scenario.channel,
                            &view,
                            &opts,
                            warm.as_ref(),
                        )?;
                        let realized = evaluate_path(
                            &traj,
                            &map,
                            &scenario.channel,
                            &nodes,
                            derive_seed(
                                scenario.seed,
                                SeedDomain::Sweep,
                                10_000 + rep * 100 + li as u64,
                            ),
                            scenario.harvest.shadowing,
                        )?;
                        let total: f64 = realized.iter().map(|nb| nb.bits).sum();
                        rows.push((rep, view_name.clone(), *l_max, total));
                        warm = Some(traj);
                    }
                }
            }
            io::save_sweep_csv(&rows, &out.join("sweep.csv"))?;
            Ok(json!({
                "command": "sweep",
                "sweep": "sweep.csv",
                "rows": rows.len(),
                "scenarios": scenario.harvest.sweep_scenarios,
                "l_max": l_maxes,
                "planners": scenario.harvest.sweep_views,
            }))
        }
    }
}
