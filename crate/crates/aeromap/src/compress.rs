//! Map compression: distill a 3D map into per-node logistic LoS-probability
//! models over the elevation angle.
//!
//! The raw map makes planning objectives discontinuous (LoS flips as the UAV
//! crosses region boundaries). Replacing each node's LoS field with a smooth
//! probability restores differentiability while keeping what matters to a
//! planner: which nodes offer LoS opportunities, and from which geometry.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::channel::{logistic, SegmentedModel};
use crate::world::city::CityMap;
use crate::world::geometry::{elevation_angle, GroundNode, Pose3};
use crate::world::raytrace;

/// Node-specific logistic LoS probability over elevation angle (degrees).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalLosModel {
    pub node_id: u32,
    /// Logistic slope per degree.
    pub slope: f64,
    /// Elevation angle of the 50% LoS point, degrees.
    pub midpoint_deg: f64,
    /// Training set size behind the fit.
    pub samples: usize,
    /// Unpenalized Bernoulli log-likelihood at the optimum.
    pub loglik: f64,
}

/// LoS probability of this node's link at elevation `theta_deg`.
pub fn local_plos(model: &LocalLosModel, theta_deg: f64) -> f64 {
    logistic(model.slope * (theta_deg - model.midpoint_deg))
}

/// Draw `count` UAV poses uniformly from the annular cylinder around the
/// node (radius and altitude ranges in meters), clamp them into the map, and
/// label each with the ray-traced LoS status. Deterministic per seed.
pub fn sample_training_set(
    map: &CityMap,
    node: &GroundNode,
    count: usize,
    radius_range: (f64, f64),
    altitude_range: (f64, f64),
    seed: u64,
) -> Result<Vec<(f64, bool)>> {
    if count == 0 {
        return Err(Error::invalid("training set count must be >= 1"));
    }
    let (r0, r1) = radius_range;
    let (z0, z1) = altitude_range;
    if !(0.0 < r0 && r0 < r1) || !(0.0 <= z0 && z0 < z1) {
        return Err(Error::invalid("degenerate sampling ranges"));
    }
    if !map.contains(&node.position) {
        return Err(Error::OutOfBounds("node outside the map".into()));
    }

    let (x0, y0, x1, y1) = map.bounds();
    let eps = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        // Area-uniform radius within the annulus.
        let u: f64 = rng.gen();
        let r = (r0 * r0 + u * (r1 * r1 - r0 * r0)).sqrt();
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let z = rng.gen_range(z0..z1);
        let uav = Pose3::new(
            (node.position.x + r * phi.cos()).clamp(x0 + eps, x1 - eps),
            (node.position.y + r * phi.sin()).clamp(y0 + eps, y1 - eps),
            z,
        );
        let theta = elevation_angle(&uav, node)?;
        let clear = raytrace::line_of_sight(map, &uav, &node.position)?;
        out.push((theta, clear));
    }
    Ok(out)
}

/// Intercept shrinkage keeping the fit finite on separable or single-class
/// data; small enough to leave the saturated probabilities above 0.99.
const INTERCEPT_RIDGE: f64 = 1e-4;

/// Fit the logistic LoS model by penalized maximum likelihood.
///
/// Parameterized internally as `p = logistic(w0 + w1 * theta)` with ridge
/// `0.5 * ridge * w1^2` on the slope (plus a tiny intercept shrinkage), so
/// separable and single-class data converge to a capped model instead of
/// diverging. Newton iterations run until the penalized gradient norm drops
/// below 1e-8.
pub fn fit_local_logistic(
    node_id: u32,
    training: &[(f64, bool)],
    ridge: f64,
) -> Result<LocalLosModel> {
    if training.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "{} samples < 10 required for a logistic fit",
            training.len()
        )));
    }
    if ridge <= 0.0 {
        return Err(Error::invalid("ridge must be > 0"));
    }

    let n = training.len() as f64;
    // Scale penalties with n so their pull is data-size independent.
    let lambda_w1 = ridge * n;
    let lambda_w0 = INTERCEPT_RIDGE * n;

    let penalized_nll = |w0: f64, w1: f64| -> f64 {
        let mut nll = 0.0;
        for (theta, y) in training {
            let t = w0 + w1 * theta;
            // softplus(-t) for y=1, softplus(t) for y=0
            let sp = |v: f64| {
                if v > 30.0 {
                    v
                } else {
                    (1.0 + v.exp()).ln()
                }
            };
            nll += if *y { sp(-t) } else { sp(t) };
        }
        nll + 0.5 * lambda_w1 * w1 * w1 + 0.5 * lambda_w0 * w0 * w0
    };

    let mut w0 = 0.0f64;
    let mut w1 = 0.1f64;
    let mut current = penalized_nll(w0, w1);
    let mut converged = false;
    for _ in 0..200 {
        // Gradient and Hessian of the penalized NLL.
        let mut g0 = lambda_w0 * w0;
        let mut g1 = lambda_w1 * w1;
        let mut h00 = lambda_w0;
        let mut h01 = 0.0;
        let mut h11 = lambda_w1;
        for (theta, y) in training {
            let p = logistic(w0 + w1 * theta);
            let e = p - if *y { 1.0 } else { 0.0 };
            g0 += e;
            g1 += e * theta;
            let w = (p * (1.0 - p)).max(1e-12);
            h00 += w;
            h01 += w * theta;
            h11 += w * theta * theta;
        }
        if (g0 * g0 + g1 * g1).sqrt() < 1e-8 {
            converged = true;
            break;
        }
        let det = h00 * h11 - h01 * h01;
        if det.abs() < 1e-30 {
            return Err(Error::Numeric("singular logistic Hessian".into()));
        }
        let step0 = (h11 * g0 - h01 * g1) / det;
        let step1 = (h00 * g1 - h01 * g0) / det;
        let gnorm = (g0 * g0 + g1 * g1).sqrt();
        if gnorm < 1e-3 {
            // Quadratic basin: objective changes fall below f64 resolution,
            // so a line search would stall. Pure Newton finishes the job.
            w0 -= step0;
            w1 -= step1;
            continue;
        }
        // Damped Newton: halve until the penalized objective improves.
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = penalized_nll(w0 - scale * step0, w1 - scale * step1);
            if cand <= current {
                w0 -= scale * step0;
                w1 -= scale * step1;
                current = cand;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return Err(Error::Numeric("logistic line search stalled".into()));
        }
    }
    if !converged {
        return Err(Error::Numeric("logistic fit did not converge".into()));
    }
    if !w0.is_finite() || !w1.is_finite() {
        return Err(Error::Numeric("logistic fit diverged".into()));
    }

    let mut loglik = 0.0;
    for (theta, y) in training {
        let p = logistic(w0 + w1 * theta).clamp(1e-300, 1.0 - 1e-16);
        loglik += if *y { p.ln() } else { (1.0 - p).ln() };
    }
    // w1 can be arbitrarily small on uninformative data; the midpoint is
    // then far outside [-90, 90], which planners treat as all-or-nothing.
    let slope = w1;
    let denom = if w1.abs() < 1e-12 {
        if w1 >= 0.0 {
            1e-12
        } else {
            -1e-12
        }
    } else {
        w1
    };
    let midpoint = -w0 / denom;
    Ok(LocalLosModel {
        node_id,
        slope,
        midpoint_deg: midpoint,
        samples: training.len(),
        loglik,
    })
}

/// Fit one local model per node by sampling the map around it.
pub fn compress_map(
    map: &CityMap,
    nodes: &[GroundNode],
    count_per_node: usize,
    radius_range: (f64, f64),
    altitude_range: (f64, f64),
    ridge: f64,
    seed: u64,
) -> Result<Vec<LocalLosModel>> {
    nodes
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let training = sample_training_set(
                map,
                node,
                count_per_node,
                radius_range,
                altitude_range,
                seed.wrapping_add(i as u64),
            )?;
            fit_local_logistic(node.id, &training, ridge)
        })
        .collect()
}

/// Bernoulli log-likelihood of `(theta, los)` pairs under a logistic model
/// given as (slope, midpoint).
pub fn bernoulli_loglik(slope: f64, midpoint_deg: f64, training: &[(f64, bool)]) -> f64 {
    let mut ll = 0.0;
    for (theta, y) in training {
        let p = logistic(slope * (theta - midpoint_deg)).clamp(1e-300, 1.0 - 1e-16);
        ll += if *y { p.ln() } else { (1.0 - p).ln() };
    }
    ll
}

/// Smoothed link rate: LoS probability mixes the two segment rates.
///
/// `p(theta) * rate_los(d) + (1 - p(theta)) * rate_nlos(d)`, continuous and
/// differentiable in the UAV position wherever `d > 0` (the elevation angle
/// has a cone apex directly above the node; the gradient there is taken as
/// the vertical-only limit).
pub fn expected_rate(
    model: &SegmentedModel,
    local: &LocalLosModel,
    uav: &Pose3,
    node: &GroundNode,
) -> Result<f64> {
    if model.k() < 2 {
        return Err(Error::invalid("expected_rate needs a LoS and an NLoS segment"));
    }
    let d = uav.distance(&node.position);
    if d <= 0.0 {
        return Err(Error::invalid("expected_rate undefined at zero distance"));
    }
    let theta = elevation_angle(uav, node)?;
    let p = local_plos(local, theta);
    let r_los = model.link_rate(model.rssi_mean(1, d)?);
    let r_nlos = model.link_rate(model.rssi_mean(2, d)?);
    Ok(p * r_los + (1.0 - p) * r_nlos)
}

/// Analytic gradient of [`expected_rate`] with respect to the UAV position.
pub fn expected_rate_gradient(
    model: &SegmentedModel,
    local: &LocalLosModel,
    uav: &Pose3,
    node: &GroundNode,
) -> Result<[f64; 3]> {
    if model.k() < 2 {
        return Err(Error::invalid("expected_rate needs a LoS and an NLoS segment"));
    }
    let dx = uav.x - node.position.x;
    let dy = uav.y - node.position.y;
    let dz = uav.z - node.position.z;
    let d2 = dx * dx + dy * dy + dz * dz;
    let d = d2.sqrt();
    if d <= 0.0 {
        return Err(Error::invalid("expected_rate undefined at zero distance"));
    }
    let r = (dx * dx + dy * dy).sqrt();

    let theta = elevation_angle(uav, node)?;
    let p = local_plos(local, theta);
    let dp_dtheta = local.slope * p * (1.0 - p); // per degree

    let rssi_los = model.rssi_mean(1, d)?;
    let rssi_nlos = model.rssi_mean(2, d)?;
    let r_los = model.link_rate(rssi_los);
    let r_nlos = model.link_rate(rssi_nlos);
    // dR/dd = dR/drssi * drssi/dd, with drssi/dd = -10 alpha / (d ln 10).
    let dr_los = model.link_rate_drssi(rssi_los)
        * (-10.0 * model.segments[0].alpha / (d * std::f64::consts::LN_10));
    let dr_nlos = model.link_rate_drssi(rssi_nlos)
        * (-10.0 * model.segments[1].alpha / (d * std::f64::consts::LN_10));

    // Gradients of distance and elevation angle (degrees).
    let grad_d = [dx / d, dy / d, dz / d];
    let deg = 180.0 / std::f64::consts::PI;
    let grad_theta = if r > 0.0 {
        [
            -dz * dx / (d2 * r) * deg,
            -dz * dy / (d2 * r) * deg,
            r / d2 * deg,
        ]
    } else {
        // Directly above the node: flat in z, cone apex in xy.
        [0.0, 0.0, 0.0]
    };

    let by_distance = p * dr_los + (1.0 - p) * dr_nlos;
    let by_angle = (r_los - r_nlos) * dp_dtheta;
    Ok([
        by_distance * grad_d[0] + by_angle * grad_theta[0],
        by_distance * grad_d[1] + by_angle * grad_theta[1],
        by_distance * grad_d[2] + by_angle * grad_theta[2],
    ])
}
