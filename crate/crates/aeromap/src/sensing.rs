//! Active-learning localization of a ground node from UAV RSSI measurements.
//!
//! A particle filter tracks the posterior over the node's 2D position. Each
//! step the UAV picks the next measurement pose from a candidate ring by
//! minimizing the expected posterior covariance trace (A-optimality),
//! estimated by Monte Carlo over predictive measurements. With a 3D map the
//! likelihood ray-traces each particle hypothesis, which both sharpens the
//! update and steers the UAV toward low-noise LoS geometry.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::channel::{global_plos, sample_rssi, GlobalLosParams, Measurement, SegmentedModel};
use crate::world::city::CityMap;
use crate::world::geometry::{elevation_angle, GroundNode, Pose3, DEFAULT_NODE_HEIGHT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub x: f64,
    pub y: f64,
    pub weight: f64,
}

/// Posterior over the unknown node position.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleBelief {
    pub particles: Vec<Particle>,
    /// Resample when the effective sample size falls below this fraction of
    /// the particle count (0 disables resampling).
    pub resample_fraction: f64,
    /// How many times every weight underflowed and the belief was reset.
    pub degenerate_resets: usize,
}

impl ParticleBelief {
    /// Uniform prior over the map footprint.
    pub fn uniform(map: &CityMap, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("need at least one particle"));
        }
        let (x0, y0, x1, y1) = map.bounds();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = 1.0 / n as f64;
        let particles = (0..n)
            .map(|_| Particle {
                x: rng.gen_range(x0..x1),
                y: rng.gen_range(y0..y1),
                weight: w,
            })
            .collect();
        Ok(Self {
            particles,
            resample_fraction: 0.5,
            degenerate_resets: 0,
        })
    }

    pub fn effective_sample_size(&self) -> f64 {
        let ss: f64 = self.particles.iter().map(|p| p.weight * p.weight).sum();
        if ss > 0.0 {
            1.0 / ss
        } else {
            0.0
        }
    }

    /// Weighted posterior mean.
    pub fn mean(&self) -> (f64, f64) {
        let mut mx = 0.0;
        let mut my = 0.0;
        for p in &self.particles {
            mx += p.weight * p.x;
            my += p.weight * p.y;
        }
        (mx, my)
    }

    /// Trace of the 2x2 posterior covariance.
    pub fn covariance_trace(&self) -> f64 {
        let (mx, my) = self.mean();
        let mut t = 0.0;
        for p in &self.particles {
            t += p.weight * ((p.x - mx).powi(2) + (p.y - my).powi(2));
        }
        t
    }

    pub fn posterior_std(&self) -> f64 {
        self.covariance_trace().sqrt()
    }

    fn normalize(&mut self) -> bool {
        let sum: f64 = self.particles.iter().map(|p| p.weight).sum();
        if !(sum.is_finite() && sum > 0.0) {
            return false;
        }
        for p in &mut self.particles {
            p.weight /= sum;
        }
        true
    }

    fn reset_uniform_weights(&mut self) {
        let w = 1.0 / self.particles.len() as f64;
        for p in &mut self.particles {
            p.weight = w;
        }
    }

    /// Systematic resampling; weights become uniform.
    pub fn resample(&mut self, rng: &mut ChaCha8Rng) {
        let n = self.particles.len();
        let u0: f64 = rng.gen_range(0.0..1.0 / n as f64);
        let mut new = Vec::with_capacity(n);
        let mut cum = self.particles[0].weight;
        let mut j = 0usize;
        for i in 0..n {
            let u = u0 + i as f64 / n as f64;
            while cum < u && j + 1 < n {
                j += 1;
                cum += self.particles[j].weight;
            }
            new.push(Particle {
                x: self.particles[j].x,
                y: self.particles[j].y,
                weight: 1.0 / n as f64,
            });
        }
        self.particles = new;
    }
}

/// Which likelihood the filter runs.
#[derive(Clone, Copy)]
pub enum LikelihoodMode<'a> {
    /// Ray-trace each particle hypothesis against the map.
    MapAided(&'a CityMap),
    /// Mix the segment likelihoods with the global LoS probability.
    MapFree(&'a GlobalLosParams),
}

fn gaussian_pdf(r: f64, sigma: f64) -> f64 {
    let z = r / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// Measurement likelihood of an RSSI sample under a hypothesized node
/// position.
fn likelihood(
    rssi_dbm: f64,
    uav: &Pose3,
    hyp: (f64, f64),
    model: &SegmentedModel,
    mode: &LikelihoodMode,
) -> Result<f64> {
    let node = GroundNode::with_height(u32::MAX, hyp.0, hyp.1, DEFAULT_NODE_HEIGHT);
    let d = uav.distance(&node.position);
    if d <= 0.0 {
        return Ok(0.0);
    }
    match mode {
        LikelihoodMode::MapAided(map) => {
            let s = model.classify(map, uav, &node)?;
            let mean = model.rssi_mean(s, d)?;
            let sigma = model.params(s)?.sigma_db;
            Ok(gaussian_pdf(rssi_dbm - mean, sigma))
        }
        LikelihoodMode::MapFree(params) => {
            if model.k() < 2 {
                return Err(Error::invalid("map-free likelihood needs two segments"));
            }
            let theta = elevation_angle(uav, &node)?;
            let p = global_plos(params, theta);
            let l1 = gaussian_pdf(
                rssi_dbm - model.rssi_mean(1, d)?,
                model.params(1)?.sigma_db,
            );
            let l2 = gaussian_pdf(
                rssi_dbm - model.rssi_mean(2, d)?,
                model.params(2)?.sigma_db,
            );
            Ok(p * l1 + (1.0 - p) * l2)
        }
    }
}

/// Bayes update of the belief with one measurement. Resamples when the
/// effective sample size collapses; a full weight underflow resets to
/// uniform weights and bumps `degenerate_resets`.
pub fn update_belief(
    belief: &mut ParticleBelief,
    measurement: &Measurement,
    model: &SegmentedModel,
    mode: &LikelihoodMode,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    for p in &mut belief.particles {
        let l = likelihood(
            measurement.rssi_dbm,
            &measurement.uav,
            (p.x, p.y),
            model,
            mode,
        )?;
        p.weight *= l;
    }
    if !belief.normalize() {
        belief.reset_uniform_weights();
        belief.degenerate_resets += 1;
        return Ok(());
    }
    let n = belief.particles.len() as f64;
    if belief.resample_fraction > 0.0
        && belief.effective_sample_size() < belief.resample_fraction * n
    {
        belief.resample(rng);
    }
    Ok(())
}

/// Pick the measurement pose with the largest expected information gain:
/// the candidate minimizing the Monte Carlo estimate of the posterior
/// covariance trace. Ties keep the earliest candidate.
///
/// `mc_draws` predictive measurements are simulated per candidate against a
/// weighted subsample of `scoring_particles` hypotheses.
pub fn next_waypoint(
    belief: &ParticleBelief,
    candidates: &[Pose3],
    model: &SegmentedModel,
    mode: &LikelihoodMode,
    mc_draws: usize,
    scoring_particles: usize,
    seed: u64,
) -> Result<Pose3> {
    if candidates.is_empty() {
        return Err(Error::invalid("no candidate waypoints"));
    }
    if candidates.len() == 1 {
        return Ok(candidates[0]);
    }

    // Equal-weight subsample of the belief (systematic, deterministic).
    let n = belief.particles.len();
    let take = scoring_particles.clamp(1, n);
    let mut hyps: Vec<(f64, f64)> = Vec::with_capacity(take);
    {
        let mut cum = belief.particles[0].weight;
        let mut j = 0usize;
        for i in 0..take {
            let u = (i as f64 + 0.5) / take as f64;
            while cum < u && j + 1 < n {
                j += 1;
                cum += belief.particles[j].weight;
            }
            hyps.push((belief.particles[j].x, belief.particles[j].y));
        }
    }

    let mut best_pose = candidates[0];
    let mut best_score = f64::INFINITY;
    for (ci, cand) in candidates.iter().enumerate() {
        // Cache geometry per hypothesis once per candidate.
        let mut mean_sigma: Vec<(f64, f64)> = Vec::with_capacity(hyps.len());
        for h in &hyps {
            let node = GroundNode::with_height(u32::MAX, h.0, h.1, DEFAULT_NODE_HEIGHT);
            let d = cand.distance(&node.position).max(1e-6);
            match mode {
                LikelihoodMode::MapAided(map) => {
                    let s = model.classify(map, cand, &node)?;
                    mean_sigma.push((model.rssi_mean(s, d)?, model.params(s)?.sigma_db));
                }
                LikelihoodMode::MapFree(params) => {
                    // Score with the dominant mixture branch per hypothesis.
                    let theta = elevation_angle(cand, &node)?;
                    let s = if global_plos(params, theta) >= 0.5 { 1 } else { 2 };
                    mean_sigma.push((model.rssi_mean(s, d)?, model.params(s)?.sigma_db));
                }
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (ci as u64).wrapping_mul(0x9E37_79B9));
        let mut expected_trace = 0.0;
        for t in 0..mc_draws {
            // Deterministically spread the "true" hypothesis over the
            // subsample, then draw the measurement noise.
            let truth = (t * hyps.len()) / mc_draws;
            let (mu, sigma) = mean_sigma[truth];
            let noise: f64 = rng.sample(rand_distr::StandardNormal);
            let rssi = mu + sigma * noise;

            // Hypothetical posterior over the subsample.
            let mut weights: Vec<f64> = mean_sigma
                .iter()
                .map(|(m, s)| gaussian_pdf(rssi - m, *s))
                .collect();
            let sum: f64 = weights.iter().sum();
            if sum <= 0.0 {
                expected_trace += belief.covariance_trace();
                continue;
            }
            for w in &mut weights {
                *w /= sum;
            }
            let mut mx = 0.0;
            let mut my = 0.0;
            for (w, h) in weights.iter().zip(&hyps) {
                mx += w * h.0;
                my += w * h.1;
            }
            let mut tr = 0.0;
            for (w, h) in weights.iter().zip(&hyps) {
                tr += w * ((h.0 - mx).powi(2) + (h.1 - my).powi(2));
            }
            expected_trace += tr;
        }
        expected_trace /= mc_draws.max(1) as f64;

        // Strictly-better-only with a float-noise margin, so candidates with
        // equal information keep the earliest one.
        let accept = if best_score.is_finite() {
            expected_trace < best_score - (1e-9 * best_score.abs()).max(1e-15)
        } else {
            true
        };
        if accept {
            best_score = expected_trace;
            best_pose = *cand;
        }
    }
    Ok(best_pose)
}

/// Waypoint selection policy for a localization run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Uniform random candidate; map-free likelihood.
    Random,
    /// Information-driven candidate; map-free likelihood.
    MapFreeActive,
    /// Information-driven candidate; map-aided likelihood.
    MapAidedActive,
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::Random => "random",
            Policy::MapFreeActive => "map_free_active",
            Policy::MapAidedActive => "map_aided_active",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SensingConfig {
    pub n_particles: usize,
    /// Ring of candidate poses per step and its radius (travel budget).
    pub ring_candidates: usize,
    pub ring_radius_m: f64,
    pub altitude_m: f64,
    pub global_los: GlobalLosParams,
    pub mc_draws: usize,
    pub scoring_particles: usize,
}

impl Default for SensingConfig {
    fn default() -> Self {
        Self {
            n_particles: 5000,
            ring_candidates: 16,
            ring_radius_m: 40.0,
            altitude_m: 60.0,
            global_los: GlobalLosParams::default(),
            mc_draws: 8,
            scoring_particles: 256,
        }
    }
}

/// One step of a localization run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub step: usize,
    pub uav: Pose3,
    pub rssi_dbm: f64,
    pub estimate_x: f64,
    pub estimate_y: f64,
    pub rmse_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationRun {
    pub policy: Policy,
    pub estimate: (f64, f64),
    pub final_rmse_m: f64,
    pub steps: Vec<StepLog>,
    pub degenerate_resets: usize,
}

/// Sequential localization: pick a waypoint, measure, update, repeat.
/// Deterministic per seed.
pub fn run_localization(
    map: &CityMap,
    model: &SegmentedModel,
    true_node: &GroundNode,
    budget: usize,
    policy: Policy,
    cfg: &SensingConfig,
    seed: u64,
) -> Result<LocalizationRun> {
    let mut belief = ParticleBelief::uniform(map, cfg.n_particles, seed ^ 0x5EED)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (x0, y0, x1, y1) = map.bounds();
    let mut uav = Pose3::new(0.5 * (x0 + x1), 0.5 * (y0 + y1), cfg.altitude_m);
    let mut steps = Vec::with_capacity(budget);

    for step in 0..budget {
        let candidates: Vec<Pose3> = (0..cfg.ring_candidates)
            .map(|k| {
                let phi = std::f64::consts::TAU * k as f64 / cfg.ring_candidates as f64;
                Pose3::new(
                    (uav.x + cfg.ring_radius_m * phi.cos()).clamp(x0 + 1.0, x1 - 1.0),
                    (uav.y + cfg.ring_radius_m * phi.sin()).clamp(y0 + 1.0, y1 - 1.0),
                    cfg.altitude_m,
                )
            })
            .collect();

        uav = match policy {
            Policy::Random => candidates[rng.gen_range(0..candidates.len())],
            Policy::MapFreeActive => next_waypoint(
                &belief,
                &candidates,
                model,
                &LikelihoodMode::MapFree(&cfg.global_los),
                cfg.mc_draws,
                cfg.scoring_particles,
                seed ^ (step as u64).wrapping_mul(0xA5A5_5A5A),
            )?,
            Policy::MapAidedActive => next_waypoint(
                &belief,
                &candidates,
                model,
                &LikelihoodMode::MapAided(map),
                cfg.mc_draws,
                cfg.scoring_particles,
                seed ^ (step as u64).wrapping_mul(0xA5A5_5A5A),
            )?,
        };

        let m = sample_rssi(
            seed ^ (step as u64).wrapping_mul(0x0BAD_C0DE_1234_5677),
            model,
            map,
            &uav,
            true_node,
        )?;
        let mode = match policy {
            Policy::MapAidedActive => LikelihoodMode::MapAided(map),
            _ => LikelihoodMode::MapFree(&cfg.global_los),
        };
        update_belief(&mut belief, &m, model, &mode, &mut rng)?;

        let (ex, ey) = belief.mean();
        let rmse = ((ex - true_node.position.x).powi(2) + (ey - true_node.position.y).powi(2))
            .sqrt();
        steps.push(StepLog {
            step,
            uav,
            rssi_dbm: m.rssi_dbm,
            estimate_x: ex,
            estimate_y: ey,
            rmse_m: rmse,
        });
    }

    let estimate = belief.mean();
    let final_rmse = ((estimate.0 - true_node.position.x).powi(2)
        + (estimate.1 - true_node.position.y).powi(2))
    .sqrt();
    Ok(LocalizationRun {
        policy,
        estimate,
        final_rmse_m: final_rmse,
        steps,
        degenerate_resets: belief.degenerate_resets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::city::{generate_city, CitySpec, Footprint};

    fn flat_map() -> CityMap {
        CityMap::flat(5.0, 60, 60, (0.0, 0.0)).unwrap()
    }

    fn measurement(uav: Pose3, rssi: f64) -> Measurement {
        Measurement {
            uav,
            node_id: 0,
            rssi_dbm: rssi,
            true_segment: None,
        }
    }

    #[test]
    fn prior_mean_without_measurements() {
        let map = flat_map();
        let belief = ParticleBelief::uniform(&map, 20_000, 3).unwrap();
        let (mx, my) = belief.mean();
        // Uniform over [0, 300]^2.
        assert!((mx - 150.0).abs() < 5.0);
        assert!((my - 150.0).abs() < 5.0);
    }

    #[test]
    fn trilateration_concentrates_on_truth() {
        // LoS-only scene, small noise, three non-collinear poses; the
        // posterior mean should land within one cell of the truth, matching
        // a brute-force grid oracle.
        let map = flat_map();
        let mut model = SegmentedModel::default();
        model.segments[0].sigma_db = 0.5;
        model.segments[1].sigma_db = 0.6;
        let truth = GroundNode::new(0, 180.0, 120.0);
        let poses = [
            Pose3::new(60.0, 60.0, 50.0),
            Pose3::new(240.0, 70.0, 50.0),
            Pose3::new(150.0, 250.0, 50.0),
            Pose3::new(90.0, 170.0, 50.0),
        ];
        let ms: Vec<Measurement> = poses
            .iter()
            .map(|p| {
                let d = p.distance(&truth.position);
                measurement(*p, model.rssi_mean(1, d).unwrap())
            })
            .collect();

        let mut belief = ParticleBelief::uniform(&map, 30_000, 9).unwrap();
        let mode = LikelihoodMode::MapAided(&map);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in &ms {
            update_belief(&mut belief, m, &model, &mode, &mut rng).unwrap();
        }
        let (ex, ey) = belief.mean();
        let err = ((ex - 180.0f64).powi(2) + (ey - 120.0f64).powi(2)).sqrt();
        assert!(err < map.cell_size(), "posterior mean off by {err}");

        // Brute-force grid oracle: squared-residual minimizer.
        let mut best = (0.0, 0.0, f64::INFINITY);
        for ix in 0..300 {
            for iy in 0..300 {
                let hx = ix as f64 + 0.5;
                let hy = iy as f64 + 0.5;
                let hyp = Pose3::new(hx, hy, DEFAULT_NODE_HEIGHT);
                let ss: f64 = ms
                    .iter()
                    .map(|m| {
                        let d = m.uav.distance(&hyp).max(1e-6);
                        (m.rssi_dbm - model.rssi_mean(1, d).unwrap()).powi(2)
                    })
                    .sum();
                if ss < best.2 {
                    best = (hx, hy, ss);
                }
            }
        }
        let oracle_err = ((best.0 - 180.0f64).powi(2) + (best.1 - 120.0f64).powi(2)).sqrt();
        assert!(oracle_err < map.cell_size());
        let agree = ((ex - best.0).powi(2) + (ey - best.1).powi(2)).sqrt();
        assert!(agree < map.cell_size(), "filter vs oracle gap {agree}");
    }

    #[test]
    fn double_update_equals_half_variance_update() {
        let map = flat_map();
        let model = SegmentedModel::default();
        let mut half_var = model.clone();
        for s in &mut half_var.segments {
            s.sigma_db /= 2f64.sqrt();
        }
        let m = measurement(Pose3::new(100.0, 100.0, 60.0), -70.0);
        let mode = LikelihoodMode::MapAided(&map);

        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut twice = ParticleBelief::uniform(&map, 10_000, 4).unwrap();
        twice.resample_fraction = 0.0;
        update_belief(&mut twice, &m, &model, &mode, &mut rng).unwrap();
        update_belief(&mut twice, &m, &model, &mode, &mut rng).unwrap();

        let mut once = ParticleBelief::uniform(&map, 10_000, 4).unwrap();
        once.resample_fraction = 0.0;
        update_belief(&mut once, &m, &half_var, &mode, &mut rng).unwrap();

        let (ax, ay) = twice.mean();
        let (bx, by) = once.mean();
        assert!((ax - bx).abs() < 1e-9 && (ay - by).abs() < 1e-9);
    }

    #[test]
    fn resampling_preserves_mean_in_expectation() {
        let map = flat_map();
        let mut belief = ParticleBelief::uniform(&map, 500, 5).unwrap();
        // Skew the weights.
        for (i, p) in belief.particles.iter_mut().enumerate() {
            p.weight = (i as f64 + 1.0).powi(2);
        }
        assert!(belief.normalize());
        let (mx, my) = belief.mean();
        let std = belief.posterior_std();

        let mut acc = (0.0, 0.0);
        let reps = 10_000;
        for seed in 0..reps {
            let mut b = belief.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            b.resample(&mut rng);
            let (x, y) = b.mean();
            acc.0 += x;
            acc.1 += y;
        }
        acc.0 /= reps as f64;
        acc.1 /= reps as f64;
        let shift = ((acc.0 - mx).powi(2) + (acc.1 - my).powi(2)).sqrt();
        assert!(shift < 0.01 * std, "mean shift {shift} vs std {std}");
    }

    #[test]
    fn weights_stay_normalized() {
        let map = flat_map();
        let model = SegmentedModel::default();
        let mode = LikelihoodMode::MapFree(&GlobalLosParams::default());
        let mut belief = ParticleBelief::uniform(&map, 2000, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 0..10 {
            let m = measurement(
                Pose3::new(30.0 + 20.0 * i as f64, 140.0, 60.0),
                -75.0 + i as f64,
            );
            update_belief(&mut belief, &m, &model, &mode, &mut rng).unwrap();
            let sum: f64 = belief.particles.iter().map(|p| p.weight).sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn underflow_resets_to_uniform() {
        let map = flat_map();
        let mut model = SegmentedModel::default();
        model.segments[0].sigma_db = 1e-6;
        model.segments[1].sigma_db = 1e-6;
        let mode = LikelihoodMode::MapAided(&map);
        let mut belief = ParticleBelief::uniform(&map, 500, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // Impossible RSSI given the microscopic noise: all likelihoods 0.
        let m = measurement(Pose3::new(150.0, 150.0, 60.0), 100.0);
        update_belief(&mut belief, &m, &model, &mode, &mut rng).unwrap();
        assert_eq!(belief.degenerate_resets, 1);
        let sum: f64 = belief.particles.iter().map(|p| p.weight).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_candidate_is_returned() {
        let map = flat_map();
        let model = SegmentedModel::default();
        let belief = ParticleBelief::uniform(&map, 100, 8).unwrap();
        let only = Pose3::new(10.0, 20.0, 60.0);
        let got = next_waypoint(
            &belief,
            &[only],
            &model,
            &LikelihoodMode::MapAided(&map),
            4,
            64,
            0,
        )
        .unwrap();
        assert_eq!(got, only);
    }

    #[test]
    fn point_mass_belief_returns_first_candidate() {
        let map = flat_map();
        let model = SegmentedModel::default();
        let mut belief = ParticleBelief::uniform(&map, 100, 9).unwrap();
        for p in &mut belief.particles {
            p.x = 123.0;
            p.y = 77.0;
        }
        let candidates = [
            Pose3::new(50.0, 50.0, 60.0),
            Pose3::new(250.0, 250.0, 60.0),
            Pose3::new(150.0, 40.0, 60.0),
        ];
        let got = next_waypoint(
            &belief,
            &candidates,
            &model,
            &LikelihoodMode::MapAided(&map),
            6,
            64,
            1,
        )
        .unwrap();
        assert_eq!(got, candidates[0]);
    }

    #[test]
    fn low_noise_los_candidate_wins() {
        // Concentrated belief; one candidate sees the hypotheses through a
        // wall (NLoS, sigma 6), the other has clear LoS (sigma 2).
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
            footprints: vec![Footprint {
                x_min: 120.0,
                y_min: 40.0,
                x_max: 135.0,
                y_max: 260.0,
                height: 90.0,
            }],
        };
        let map = generate_city(0, &spec).unwrap();
        let model = SegmentedModel::default();
        let mut belief = ParticleBelief::uniform(&map, 400, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in &mut belief.particles {
            p.x = 200.0 + rng.gen_range(-8.0..8.0);
            p.y = 150.0 + rng.gen_range(-8.0..8.0);
        }
        let nlos_candidate = Pose3::new(60.0, 150.0, 30.0); // behind the wall
        let los_candidate = Pose3::new(250.0, 150.0, 30.0);
        let got = next_waypoint(
            &belief,
            &[nlos_candidate, los_candidate],
            &model,
            &LikelihoodMode::MapAided(&map),
            12,
            128,
            2,
        )
        .unwrap();
        assert_eq!(got, los_candidate);
    }

    #[test]
    fn budget_zero_returns_prior_mean() {
        let map = flat_map();
        let model = SegmentedModel::default();
        let node = GroundNode::new(0, 111.0, 222.0);
        let run = run_localization(
            &map,
            &model,
            &node,
            0,
            Policy::Random,
            &SensingConfig::default(),
            4,
        )
        .unwrap();
        assert!(run.steps.is_empty());
        assert!((run.estimate.0 - 150.0).abs() < 6.0);
        assert!((run.estimate.1 - 150.0).abs() < 6.0);
    }

    #[test]
    fn localization_deterministic_per_seed() {
        let map = flat_map();
        let model = SegmentedModel::default();
        let node = GroundNode::new(0, 200.0, 90.0);
        let cfg = SensingConfig {
            n_particles: 800,
            ..SensingConfig::default()
        };
        let a = run_localization(&map, &model, &node, 6, Policy::MapAidedActive, &cfg, 21)
            .unwrap();
        let b = run_localization(&map, &model, &node, 6, Policy::MapAidedActive, &cfg, 21)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn posterior_concentrates_with_clean_data() {
        let map = flat_map();
        let mut model = SegmentedModel::default();
        model.segments[0].sigma_db = 0.3;
        model.segments[1].sigma_db = 0.4;
        let node = GroundNode::new(0, 210.0, 160.0);
        let cfg = SensingConfig {
            n_particles: 4000,
            ..SensingConfig::default()
        };
        let run = run_localization(&map, &model, &node, 12, Policy::MapAidedActive, &cfg, 5)
            .unwrap();
        assert!(
            run.final_rmse_m < map.cell_size(),
            "rmse {}",
            run.final_rmse_m
        );
    }

    #[test]
    fn map_aided_beats_random_more_often_than_not() {
        // Mini version of the acceptance batch (50 seeded runs there).
        let spec = CitySpec {
            nx: 60,
            ny: 60,
            cell_size: 5.0,
            origin: (0.0, 0.0),
            density: 0.2,
            height_min: 10.0,
            height_max: 40.0,
            building_min_cells: 2,
            building_max_cells: 5,
            footprints: Vec::new(),
        };
        let map = generate_city(17, &spec).unwrap();
        let model = SegmentedModel::default();
        let node = GroundNode::new(0, 190.0, 140.0);
        let cfg = SensingConfig {
            n_particles: 1500,
            ..SensingConfig::default()
        };
        let mut wins = 0;
        let runs = 8;
        for seed in 0..runs {
            let aided =
                run_localization(&map, &model, &node, 10, Policy::MapAidedActive, &cfg, seed)
                    .unwrap();
            let random =
                run_localization(&map, &model, &node, 10, Policy::Random, &cfg, seed).unwrap();
            if aided.final_rmse_m <= random.final_rmse_m {
                wins += 1;
            }
        }
        assert!(wins * 2 > runs, "map-aided won only {wins}/{runs}");
    }
}
