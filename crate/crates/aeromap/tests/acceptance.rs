//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with its measured numbers.
//!
//! Run with `cargo test --test acceptance -- --nocapture --test-threads=1`
//! to see the lines in order; the suite also runs fine in parallel.

use std::time::Instant;

use aeromap::compress::{compress_map, expected_rate, expected_rate_gradient, LocalLosModel};
use aeromap::harvest::{evaluate_path, plan_path, ChannelView, PlanOptions, TrajectorySpec};
use aeromap::learn::{
    fit_segmented_model, map_rmse, reconstruct_direct, reconstruct_model_based, DirectMethod,
    FitOptions, MapPredictor,
};
use aeromap::map3d::{infer_bounds, survey::street_grid_survey, GridGeometry, InferOptions};
use aeromap::relay::{plan_relay_nested, plan_relay_oracle, NestedSearchConfig};
use aeromap::sensing::{run_localization, Policy, SensingConfig};
use aeromap::world::{
    classify_with_thresholds, generate_city, sample_rssi, CityMap, CitySpec, GlobalLosParams,
    GroundNode, Pose3, SegmentedModel,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_city(seed: u64, nx: usize, ny: usize, density: f64, hmax: f64) -> CityMap {
    let spec = CitySpec {
        nx,
        ny,
        cell_size: 5.0,
        origin: (0.0, 0.0),
        density,
        height_min: 10.0,
        height_max: hmax,
        building_min_cells: 2,
        building_max_cells: 5,
        footprints: Vec::new(),
    };
    generate_city(seed, &spec).expect("city generation")
}

fn pass(criterion: usize, name: &str, details: &str) {
    println!("ACCEPTANCE {criterion} ({name}): PASS — {details}");
}

/// Criterion 1: along any straight approach toward the point above a node at
/// fixed altitude, the obstruction segment never increases. 1,000 triples,
/// zero violations, under a minute.
#[test]
fn criterion_1_nested_propagation() {
    let t0 = Instant::now();
    let thresholds = [0.0, 20.0];
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0001);
    let mut checked = 0usize;

    'outer: for city_seed in 0..50u64 {
        let map = random_city(city_seed, 70, 70, 0.25, 45.0);
        let (x0, y0, x1, y1) = map.bounds();
        for _ in 0..20 {
            if checked >= 1000 {
                break 'outer;
            }
            checked += 1;
            let node = GroundNode::new(
                0,
                rng.gen_range(x0 + 20.0..x1 - 20.0),
                rng.gen_range(y0 + 20.0..y1 - 20.0),
            );
            let altitude = rng.gen_range(25.0..90.0);
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            // Far end of the approach ray, clipped into the map.
            let mut reach = 300.0f64;
            loop {
                let fx = node.position.x + reach * phi.cos();
                let fy = node.position.y + reach * phi.sin();
                if fx > x0 && fx < x1 && fy > y0 && fy < y1 {
                    break;
                }
                reach *= 0.8;
            }
            let mut last_segment = usize::MAX;
            let steps = 40;
            for k in 0..=steps {
                // March from far out toward the point above the node.
                let r = reach * (1.0 - k as f64 / steps as f64);
                let uav = Pose3::new(
                    node.position.x + r * phi.cos(),
                    node.position.y + r * phi.sin(),
                    altitude,
                );
                let s = classify_with_thresholds(&map, &uav, &node.position, &thresholds)
                    .expect("in-bounds classification");
                assert!(
                    s <= last_segment,
                    "segment rose from {last_segment} to {s} at r={r} (city {city_seed})"
                );
                last_segment = s;
            }
        }
    }
    let dt = t0.elapsed();
    assert!(checked >= 1000);
    assert!(dt.as_secs() < 60, "took {dt:?}");
    pass(
        1,
        "nested propagation",
        &format!("{checked} approach rays, zero violations, {dt:?}"),
    );
}

/// Criterion 2: joint K=2 fit at paper scale (400 poses x 100 nodes at 50 m):
/// median label accuracy >= 95% and median |alpha error| <= 0.1, 20 seeds,
/// under two minutes.
#[test]
fn criterion_2_channel_learning_at_paper_scale() {
    let t0 = Instant::now();
    let truth = SegmentedModel::default();
    let mut accuracies = Vec::new();
    let mut err1 = Vec::new();
    let mut err2 = Vec::new();

    for seed in 0..20u64 {
        let map = random_city(1000 + seed, 80, 80, 0.2, 45.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2222);
        let nodes: Vec<GroundNode> = (0..100)
            .map(|i| {
                GroundNode::new(i, rng.gen_range(15.0..385.0), rng.gen_range(15.0..385.0))
            })
            .collect();
        let mut ms = Vec::with_capacity(400 * nodes.len());
        let mut meas_seed = seed.wrapping_mul(0x5175);
        for _ in 0..400 {
            let uav = Pose3::new(rng.gen_range(5.0..395.0), rng.gen_range(5.0..395.0), 50.0);
            for node in &nodes {
                meas_seed = meas_seed.wrapping_add(1);
                ms.push(sample_rssi(meas_seed, &truth, &map, &uav, node).unwrap());
            }
        }
        let fit = fit_segmented_model(&ms, &nodes, &FitOptions::new(2)).unwrap();
        accuracies.push(fit.labeled.accuracy_vs_truth().unwrap());
        err1.push((fit.model.segments[0].alpha - truth.segments[0].alpha).abs());
        err2.push((fit.model.segments[1].alpha - truth.segments[1].alpha).abs());
    }

    let median = |v: &mut Vec<f64>| -> f64 {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    };
    let acc = median(&mut accuracies);
    let e1 = median(&mut err1);
    let e2 = median(&mut err2);
    let dt = t0.elapsed();
    assert!(acc >= 0.95, "median label accuracy {acc}");
    assert!(e1 <= 0.1, "median LoS alpha error {e1}");
    assert!(e2 <= 0.1, "median NLoS alpha error {e2}");
    assert!(dt.as_secs() < 120, "took {dt:?}");
    pass(
        2,
        "channel learning at paper scale",
        &format!("median accuracy {acc:.4}, median alpha errors ({e1:.4}, {e2:.4}), {dt:?}"),
    );
}

/// Criterion 3: model-based reconstruction beats direct KNN on held-out
/// query points in at least 18 of 20 seeded replications.
#[test]
fn criterion_3_reconstruction_ordering() {
    let t0 = Instant::now();
    let truth = SegmentedModel::default();
    let mut wins = 0usize;

    for seed in 0..20u64 {
        let map = random_city(300 + seed, 80, 80, 0.2, 45.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3333);
        let nodes: Vec<GroundNode> = (0..6)
            .map(|i| {
                GroundNode::new(i, rng.gen_range(20.0..380.0), rng.gen_range(20.0..380.0))
            })
            .collect();
        let mut ms = Vec::new();
        let mut meas_seed = seed.wrapping_mul(0xF16);
        for _ in 0..400 {
            let uav = Pose3::new(rng.gen_range(5.0..395.0), rng.gen_range(5.0..395.0), 50.0);
            for node in &nodes {
                meas_seed = meas_seed.wrapping_add(1);
                ms.push(sample_rssi(meas_seed, &truth, &map, &uav, node).unwrap());
            }
        }
        let node = nodes[0];
        let grid: Vec<Pose3> = (0..500)
            .map(|_| Pose3::new(rng.gen_range(5.0..395.0), rng.gen_range(5.0..395.0), 50.0))
            .collect();
        let predictor = MapPredictor {
            map: &map,
            thresholds_m: &truth.thresholds_m,
        };
        let truth_map =
            reconstruct_model_based(&truth, &predictor, grid.clone(), &node).unwrap();
        let fit = fit_segmented_model(&ms, &nodes, &FitOptions::new(2)).unwrap();
        let model_map =
            reconstruct_model_based(&fit.model, &predictor, grid.clone(), &node).unwrap();
        let direct_map =
            reconstruct_direct(&ms, node.id, grid, DirectMethod::Knn { k: 5 }).unwrap();
        if map_rmse(&model_map, &truth_map).unwrap() < map_rmse(&direct_map, &truth_map).unwrap()
        {
            wins += 1;
        }
    }
    let dt = t0.elapsed();
    assert!(wins >= 18, "model-based won only {wins}/20");
    pass(
        3,
        "reconstruction ordering",
        &format!("model-based beat direct KNN in {wins}/20 replications, {dt:?}"),
    );
}

/// Criterion 4: with ground-truth LoS labels the inferred upper bounds are
/// sound on every cell, and tight (<= 5 m) wherever >= 20 LoS rays crossed.
#[test]
fn criterion_4_terrain_soundness_and_tightness() {
    let t0 = Instant::now();
    for seed in [5u64, 6, 7] {
        let (map, nodes, labeled) = street_grid_survey(seed);
        let geom = GridGeometry::of_map(&map);
        let bounds = infer_bounds(&labeled, &nodes, &geom, &InferOptions::default()).unwrap();
        let mut well_crossed = 0usize;
        for ix in 0..map.nx() {
            for iy in 0..map.ny() {
                let i = bounds.idx(ix, iy);
                let truth = map.height_at_cell(ix, iy);
                assert!(
                    bounds.upper[i] >= truth,
                    "unsound bound at ({ix},{iy}), survey seed {seed}"
                );
                if bounds.los_crossings[i] >= 20 {
                    well_crossed += 1;
                    let gap = bounds.upper[i] - truth;
                    assert!(
                        gap <= 5.0,
                        "loose bound at ({ix},{iy}): {gap} m with {} crossings (seed {seed})",
                        bounds.los_crossings[i]
                    );
                }
            }
        }
        assert!(well_crossed > 500, "only {well_crossed} well-crossed cells");
    }

    // Independent brute-force geometry oracle for the crossing minima: a
    // dense parametric sweep of random links must never find the link dip
    // below a bound derived from it.
    let (map, nodes, labeled) = street_grid_survey(5);
    let geom = GridGeometry::of_map(&map);
    let bounds = infer_bounds(&labeled, &nodes, &geom, &InferOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x04AC);
    for _ in 0..200 {
        let m = &labeled.measurements[rng.gen_range(0..labeled.measurements.len())];
        let node = nodes.iter().find(|n| n.id == m.node_id).unwrap();
        let a = m.uav;
        let b = node.position;
        let start = map.cell_of(a.x, a.y);
        let end = map.cell_of(b.x, b.y);
        let label = labeled.labels
            [labeled.measurements.iter().position(|x| std::ptr::eq(x, m)).unwrap()];
        if label != 1 {
            continue;
        }
        // 2,000-point parametric sweep: altitude at each sample must be at
        // least the bound of the cell under it (up to sampling slack).
        for k in 0..=2000 {
            let t = k as f64 / 2000.0;
            let x = a.x + (b.x - a.x) * t;
            let y = a.y + (b.y - a.y) * t;
            let z = a.z + (b.z - a.z) * t;
            let cell = map.cell_of(x, y);
            if cell == start || cell == end {
                continue;
            }
            let i = bounds.idx(cell.0, cell.1);
            assert!(
                bounds.upper[i] <= z + 1e-6,
                "bound {} above the LoS link altitude {z} it came from",
                bounds.upper[i]
            );
        }
    }
    let dt = t0.elapsed();
    pass(
        4,
        "terrain soundness and tightness",
        &format!("3 surveys sound everywhere, tight at >=20 crossings, oracle-checked, {dt:?}"),
    );
}

/// Criterion 5: nested relay search within 1% of the exhaustive oracle on
/// 100 random scenes, and evaluation count growing linearly (log-log slope
/// 1.0 +- 0.1) with BS-user distance. Under five minutes.
#[test]
fn criterion_5_relay_optimality_and_complexity() {
    let t0 = Instant::now();
    let model = SegmentedModel::default();
    let mut worst_ratio = f64::INFINITY;
    for seed in 0..100u64 {
        let map = random_city(500 + seed, 72, 72, 0.2, 60.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5555);
        let bs = Pose3::new(rng.gen_range(25.0..120.0), rng.gen_range(25.0..335.0), 30.0);
        let user = GroundNode::new(0, rng.gen_range(240.0..335.0), rng.gen_range(25.0..335.0));
        let nested =
            plan_relay_nested(&map, &model, &bs, &user, &NestedSearchConfig::default()).unwrap();
        let oracle = plan_relay_oracle(&map, &model, &bs, &user, 3.0, 50.0, true).unwrap();
        let ratio = nested.throughput_bps / oracle.throughput_bps;
        worst_ratio = worst_ratio.min(ratio);
        assert!(
            ratio >= 0.99,
            "seed {seed}: nested {} vs oracle {}",
            nested.throughput_bps,
            oracle.throughput_bps
        );
    }

    // Linear complexity in the BS-user distance.
    let mut counts = Vec::new();
    for d in [250.0f64, 500.0, 1000.0, 2000.0] {
        let nx = ((d + 200.0) / 5.0) as usize;
        let map = CityMap::flat(5.0, nx, 60, (0.0, 0.0)).unwrap();
        let bs = Pose3::new(50.0, 150.0, 30.0);
        let user = GroundNode::new(0, 50.0 + d, 150.0);
        let placed =
            plan_relay_nested(&map, &model, &bs, &user, &NestedSearchConfig::default()).unwrap();
        counts.push((d.ln(), (placed.evaluations as f64).ln()));
    }
    let n = counts.len() as f64;
    let mx = counts.iter().map(|(x, _)| x).sum::<f64>() / n;
    let my = counts.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = counts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let sxy: f64 = counts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let dt = t0.elapsed();
    assert!((slope - 1.0).abs() <= 0.1, "log-log slope {slope}");
    assert!(dt.as_secs() < 300, "took {dt:?}");
    pass(
        5,
        "relay optimality and complexity",
        &format!("100 scenes, worst nested/oracle ratio {worst_ratio:.4}, eval slope {slope:.3}, {dt:?}"),
    );
}

/// Criterion 6: harvesting planner comparison over a length-budget sweep on
/// ten 6-node scenarios: the compressed-map planner collects at least as
/// much as the global-probabilistic one in >= 8/10 scenarios at every
/// budget, and every planner's median haul is nondecreasing in the budget.
/// Under ten minutes.
#[test]
fn criterion_6_harvesting_trend() {
    let t0 = Instant::now();
    let model = SegmentedModel::default();
    let budgets = [450.0, 600.0, 750.0, 900.0];
    let planners = [
        "deterministic_los",
        "global_probabilistic",
        "compressed_map",
        "true_map",
    ];
    let gp = GlobalLosParams::default();
    // realized[planner][budget][scenario]
    let mut realized =
        vec![vec![vec![0.0f64; 10]; budgets.len()]; planners.len()];

    for scen in 0..10u64 {
        let map = random_city(600 + scen, 60, 60, 0.22, 42.0);
        let mut rng = ChaCha8Rng::seed_from_u64(scen ^ 0x6666);
        let nodes: Vec<GroundNode> = (0..6)
            .map(|i| {
                GroundNode::new(i, rng.gen_range(30.0..270.0), rng.gen_range(30.0..270.0))
            })
            .collect();
        let compressed =
            compress_map(&map, &nodes, 1200, (10.0, 200.0), (20.0, 90.0), 1e-3, scen).unwrap();

        for (pi, name) in planners.iter().enumerate() {
            let view = match *name {
                "deterministic_los" => ChannelView::DeterministicLos,
                "global_probabilistic" => ChannelView::GlobalProbabilistic(&gp),
                "compressed_map" => ChannelView::CompressedMap(&compressed),
                "true_map" => ChannelView::TrueMap(&map),
                _ => unreachable!(),
            };
            let mut warm = None;
            for (bi, l_max) in budgets.iter().enumerate() {
                let mission = TrajectorySpec {
                    start: Pose3::new(20.0, 20.0, 60.0),
                    end: Pose3::new(280.0, 280.0, 60.0),
                    l_max_m: *l_max,
                    n_waypoints: 30,
                    v_max: 15.0,
                    a_max: 8.0,
                    slot_duration_s: 2.0,
                    altitude_m: 60.0,
                };
                let opts = PlanOptions {
                    seed: scen.wrapping_mul(31).wrapping_add(bi as u64),
                    bounds_xy: Some(map.bounds()),
                    ..PlanOptions::default()
                };
                let traj = plan_path(&mission, &nodes, &model, &view, &opts, warm.as_ref())
                    .unwrap();
                // Shared evaluation seed across planners per (scenario, budget);
                // shadowing off so the trend reflects planner quality alone.
                let eval_seed = scen.wrapping_mul(1000).wrapping_add(bi as u64);
                let nb = evaluate_path(&traj, &map, &model, &nodes, eval_seed, false).unwrap();
                realized[pi][bi][scen as usize] = nb.iter().map(|x| x.bits).sum();
                warm = Some(traj);
            }
        }
    }

    // Compressed >= global-probabilistic in at least 8/10 at every budget.
    let comp = planners.iter().position(|p| *p == "compressed_map").unwrap();
    let glob = planners
        .iter()
        .position(|p| *p == "global_probabilistic")
        .unwrap();
    let mut win_counts = Vec::new();
    for bi in 0..budgets.len() {
        let wins = (0..10)
            .filter(|s| realized[comp][bi][*s] >= realized[glob][bi][*s])
            .count();
        assert!(
            wins >= 8,
            "compressed won only {wins}/10 at L_max {}",
            budgets[bi]
        );
        win_counts.push(wins);
    }

    // Median haul nondecreasing in the budget for every planner.
    for (pi, name) in planners.iter().enumerate() {
        let mut last = 0.0f64;
        for bi in 0..budgets.len() {
            let mut vals = realized[pi][bi].clone();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let med = vals[vals.len() / 2];
            assert!(
                med >= last - 1e-6,
                "{name}: median dropped at L_max {} ({last} -> {med})",
                budgets[bi]
            );
            last = med;
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 600, "took {dt:?}");
    pass(
        6,
        "harvesting trend",
        &format!(
            "compressed vs probabilistic wins per budget {win_counts:?}, medians monotone, {dt:?}"
        ),
    );
}

/// Criterion 7: the analytic gradient of the smoothed rate matches central
/// finite differences to 1e-5 relative error at 1,000 random poses.
#[test]
fn criterion_7_compression_differentiability() {
    let t0 = Instant::now();
    let model = SegmentedModel::default();
    let node = GroundNode::new(0, 140.0, 160.0);
    let local = LocalLosModel {
        node_id: 0,
        slope: 0.18,
        midpoint_deg: 28.0,
        samples: 0,
        loglik: 0.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x7777);
    let h = 1e-3;
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    while checked < 1000 {
        let uav = Pose3::new(
            rng.gen_range(0.0..300.0),
            rng.gen_range(0.0..300.0),
            rng.gen_range(10.0..120.0),
        );
        if uav.horizontal_distance(&node.position) < 1.0 {
            continue;
        }
        checked += 1;
        let grad = expected_rate_gradient(&model, &local, &uav, &node).unwrap();
        for axis in 0..3 {
            let mut lo = uav;
            let mut hi = uav;
            match axis {
                0 => {
                    lo.x -= h;
                    hi.x += h;
                }
                1 => {
                    lo.y -= h;
                    hi.y += h;
                }
                _ => {
                    lo.z -= h;
                    hi.z += h;
                }
            }
            let fd = (expected_rate(&model, &local, &hi, &node).unwrap()
                - expected_rate(&model, &local, &lo, &node).unwrap())
                / (2.0 * h);
            let scale = grad[axis].abs().max(fd.abs()).max(1e-3);
            let rel = (grad[axis] - fd).abs() / scale;
            worst = worst.max(rel);
            assert!(
                rel < 1e-5,
                "axis {axis} at {uav:?}: analytic {} vs fd {fd}",
                grad[axis]
            );
        }
    }
    let dt = t0.elapsed();
    pass(
        7,
        "compression differentiability",
        &format!("1000 poses, worst relative gradient error {worst:.2e}, {dt:?}"),
    );
}

/// Criterion 8: map-aided active localization beats the random-waypoint
/// policy in at least 80% of 50 seeded runs with a median improvement of at
/// least 20%. Under five minutes.
#[test]
fn criterion_8_sensing_improvement() {
    let t0 = Instant::now();
    let map = random_city(17, 60, 60, 0.2, 40.0);
    let model = SegmentedModel::default();
    let node = GroundNode::new(0, 190.0, 140.0);
    let cfg = SensingConfig::default();

    let mut wins = 0usize;
    let mut improvements = Vec::new();
    let runs = 50u64;
    for seed in 0..runs {
        let aided = run_localization(&map, &model, &node, 15, Policy::MapAidedActive, &cfg, seed)
            .unwrap();
        let random =
            run_localization(&map, &model, &node, 15, Policy::Random, &cfg, seed).unwrap();
        if aided.final_rmse_m <= random.final_rmse_m {
            wins += 1;
        }
        improvements.push((random.final_rmse_m - aided.final_rmse_m) / random.final_rmse_m);
    }
    improvements.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_improvement = improvements[improvements.len() / 2];
    let dt = t0.elapsed();
    assert!(
        wins as f64 >= 0.8 * runs as f64,
        "map-aided won only {wins}/{runs}"
    );
    assert!(
        median_improvement >= 0.20,
        "median improvement {median_improvement}"
    );
    assert!(dt.as_secs() < 300, "took {dt:?}");
    pass(
        8,
        "sensing improvement",
        &format!(
            "map-aided won {wins}/{runs}, median RMSE improvement {:.0}%, {dt:?}",
            100.0 * median_improvement
        ),
    );
}

/// Criterion 9: the full CLI pipeline is byte-identical across two runs with
/// the same config and seed.
#[test]
fn criterion_9_cli_determinism() {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scenario.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "seed": 11,
            "city": {"spec": {
                "nx": 50, "ny": 50, "cell_size": 5.0, "density": 0.2,
                "height_min": 10.0, "height_max": 40.0
            }},
            "nodes": {"random": {"count": 5, "margin_m": 20.0}},
            "learn": {"training_poses": 80, "query_points": 100},
            "compress": {"samples_per_node": 400, "radius_max_m": 150.0},
            "harvest": {
                "start": [15.0, 15.0], "end": [235.0, 235.0],
                "l_max_m": 500.0, "n_waypoints": 24
            }
        })
        .to_string(),
    )
    .unwrap();

    let pipeline = ["gen-city", "simulate", "fit-channel", "compress", "plan-iot"];
    let run_pipeline = |out: &std::path::Path| -> Vec<(String, Vec<u8>)> {
        for cmd in pipeline {
            let status = std::process::Command::new(env!("CARGO_BIN_EXE_aeromap"))
                .arg(cmd)
                .arg("--config")
                .arg(&config)
                .arg("--out-dir")
                .arg(out)
                .status()
                .expect("spawn aeromap");
            assert!(status.success(), "{cmd} failed");
        }
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort_by(|a, b| a.0.cmp(&b.0));
        files
    };

    let first = run_pipeline(&dir.path().join("run1"));
    let second = run_pipeline(&dir.path().join("run2"));
    assert_eq!(first.len(), second.len());
    let mut bytes = 0usize;
    for ((name_a, data_a), (name_b, data_b)) in first.iter().zip(&second) {
        assert_eq!(name_a, name_b);
        assert_eq!(data_a, data_b, "artifact {name_a} differs between runs");
        bytes += data_a.len();
    }
    let dt = t0.elapsed();
    pass(
        9,
        "cli determinism",
        &format!(
            "{} artifacts / {bytes} bytes byte-identical across two pipeline runs, {dt:?}",
            first.len()
        ),
    );
}
