//! Segmented air-to-ground channel model.
//!
//! Path loss follows the log-distance law within each obstruction segment;
//! the segment selects the exponent/intercept/shadowing triple. Fast fading
//! is averaged out: RSSI here is the long-term mean plus log-normal
//! shadowing.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::city::CityMap;
use crate::world::geometry::{GroundNode, Pose3};
use crate::world::raytrace;

/// Pathloss parameters of one obstruction segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentParams {
    /// Pathloss exponent (2 = free space, larger = more obstructed).
    pub alpha: f64,
    /// Channel gain intercept at 1 m, dB.
    pub beta_db: f64,
    /// Shadowing standard deviation, dB.
    pub sigma_db: f64,
}

/// A K-segment pathloss model plus the link-budget constants needed to turn
/// RSSI into rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentedModel {
    /// Ordered least-obstructed first; `alpha` must be nondecreasing.
    pub segments: Vec<SegmentParams>,
    pub tx_power_dbm: f64,
    pub noise_floor_dbm: f64,
    pub bandwidth_hz: f64,
    /// Blocked-length thresholds separating the segments (meters, strictly
    /// increasing, first entry 0). Length is `segments.len() - 1`.
    pub thresholds_m: Vec<f64>,
}

impl Default for SegmentedModel {
    /// Two-segment LoS/NLoS model with plausible sub-6 GHz defaults.
    fn default() -> Self {
        Self {
            segments: vec![
                SegmentParams {
                    alpha: 2.2,
                    beta_db: -40.0,
                    sigma_db: 2.0,
                },
                SegmentParams {
                    alpha: 3.6,
                    beta_db: -45.0,
                    sigma_db: 6.0,
                },
            ],
            tx_power_dbm: 20.0,
            noise_floor_dbm: -90.0,
            bandwidth_hz: 1e6,
            thresholds_m: vec![0.0],
        }
    }
}

impl SegmentedModel {
    /// Build a model from segments, filling in default link-budget constants
    /// and thresholds.
    pub fn from_segments(segments: Vec<SegmentParams>) -> Result<Self> {
        let k = segments.len();
        let model = Self {
            segments,
            thresholds_m: raytrace::default_thresholds(k),
            ..Self::default()
        };
        model.validate()?;
        Ok(model)
    }

    pub fn k(&self) -> usize {
        self.segments.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::invalid("model needs at least one segment"));
        }
        for w in self.segments.windows(2) {
            if w[0].alpha > w[1].alpha {
                return Err(Error::invalid(
                    "segment exponents must be nondecreasing (less obstructed first)",
                ));
            }
        }
        if self.segments.iter().any(|s| s.sigma_db <= 0.0) {
            return Err(Error::invalid("shadowing sigma must be > 0"));
        }
        if self.bandwidth_hz <= 0.0 {
            return Err(Error::invalid("bandwidth must be > 0"));
        }
        if self.thresholds_m.len() + 1 != self.segments.len() {
            return Err(Error::invalid(
                "need exactly k-1 blocked-length thresholds",
            ));
        }
        if let Some(first) = self.thresholds_m.first() {
            if *first != 0.0 {
                return Err(Error::invalid("first threshold must be 0"));
            }
        }
        if self.thresholds_m.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("thresholds must be strictly increasing"));
        }
        Ok(())
    }

    pub fn params(&self, segment: usize) -> Result<&SegmentParams> {
        self.segments
            .get(segment.checked_sub(1).ok_or_else(|| {
                Error::invalid("segments are 1-based")
            })?)
            .ok_or_else(|| Error::invalid(format!("segment {segment} out of 1..={}", self.k())))
    }

    /// Mean RSSI of segment `segment` at 3D distance `d` meters, dBm.
    pub fn rssi_mean(&self, segment: usize, d: f64) -> Result<f64> {
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::invalid(format!("distance must be > 0, got {d}")));
        }
        let p = self.params(segment)?;
        Ok(self.tx_power_dbm + p.beta_db - 10.0 * p.alpha * d.log10())
    }

    /// Ray-traced obstruction class of the UAV-node link under this model's
    /// thresholds.
    pub fn classify(&self, map: &CityMap, uav: &Pose3, node: &GroundNode) -> Result<usize> {
        if self.k() == 1 {
            return Ok(1);
        }
        raytrace::classify_with_thresholds(map, uav, &node.position, &self.thresholds_m)
    }

    /// Shannon rate for a given RSSI, bits/s.
    pub fn link_rate(&self, rssi_dbm: f64) -> f64 {
        let snr = 10f64.powf((rssi_dbm - self.noise_floor_dbm) / 10.0);
        self.bandwidth_hz * (1.0 + snr).log2()
    }

    /// Derivative of `link_rate` with respect to RSSI, bits/s per dB.
    pub fn link_rate_drssi(&self, rssi_dbm: f64) -> f64 {
        let snr = 10f64.powf((rssi_dbm - self.noise_floor_dbm) / 10.0);
        self.bandwidth_hz * (std::f64::consts::LN_10 / 10.0) * snr
            / ((1.0 + snr) * std::f64::consts::LN_2)
    }
}

/// Decode-and-forward end-to-end rate: the weaker hop governs.
pub fn relay_rate(rate_bs_uav: f64, rate_uav_user: f64) -> f64 {
    rate_bs_uav.min(rate_uav_user)
}

/// One RSSI sample taken by the UAV toward a ground node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub uav: Pose3,
    pub node_id: u32,
    pub rssi_dbm: f64,
    /// Ground-truth obstruction class, carried only by simulated data for
    /// scoring. Estimators must never read it.
    pub true_segment: Option<usize>,
}

/// Draw one measurement of the `node` link from pose `uav`: ray-traced
/// segment, mean pathloss, plus Gaussian shadowing. Reproducible per seed.
pub fn sample_rssi(
    seed: u64,
    model: &SegmentedModel,
    map: &CityMap,
    uav: &Pose3,
    node: &GroundNode,
) -> Result<Measurement> {
    let s = model.classify(map, uav, node)?;
    let d = uav.distance(&node.position);
    let mean = model.rssi_mean(s, d)?;
    let sigma = model.params(s)?.sigma_db;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: f64 = rng.sample(StandardNormal);
    Ok(Measurement {
        uav: *uav,
        node_id: node.id,
        rssi_dbm: mean + sigma * noise,
        true_segment: Some(s),
    })
}

/// Global (node-independent) LoS probability as a logistic curve of the
/// elevation angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalLosParams {
    /// Logistic slope per degree of elevation; must be positive.
    pub slope: f64,
    /// Elevation angle of 50% LoS probability, degrees.
    pub midpoint_deg: f64,
}

impl Default for GlobalLosParams {
    fn default() -> Self {
        Self {
            slope: 0.15,
            midpoint_deg: 15.0,
        }
    }
}

impl GlobalLosParams {
    pub fn validate(&self) -> Result<()> {
        if self.slope <= 0.0 || !self.slope.is_finite() {
            return Err(Error::invalid("LoS probability slope must be > 0"));
        }
        Ok(())
    }
}

/// LoS probability at elevation `theta_deg` under the global model.
/// Approaches 1 near 90 degrees and 0 well below the midpoint.
pub fn global_plos(params: &GlobalLosParams, theta_deg: f64) -> f64 {
    logistic(params.slope * (theta_deg - params.midpoint_deg))
}

#[inline]
pub(crate) fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rssi_mean_intercept_and_log_law() {
        let model = SegmentedModel::default();
        // d = 1 m: tx + beta.
        let at_1m = model.rssi_mean(1, 1.0).unwrap();
        assert!((at_1m - (20.0 - 40.0)).abs() < 1e-12);
        // Doubling distance costs 10 * alpha * log10(2).
        let r1 = model.rssi_mean(2, 50.0).unwrap();
        let r2 = model.rssi_mean(2, 100.0).unwrap();
        assert!((r1 - r2 - 10.0 * 3.6 * 2f64.log10()).abs() < 1e-9);
    }

    #[test]
    fn rssi_mean_arithmetic_example() {
        let model = SegmentedModel {
            segments: vec![SegmentParams {
                alpha: 2.0,
                beta_db: -40.0,
                sigma_db: 1.0,
            }],
            tx_power_dbm: 20.0,
            thresholds_m: vec![],
            ..SegmentedModel::default()
        };
        assert!((model.rssi_mean(1, 100.0).unwrap() - (-60.0)).abs() < 1e-12);
    }

    #[test]
    fn rssi_mean_rejects_nonpositive_distance() {
        let model = SegmentedModel::default();
        assert!(model.rssi_mean(1, 0.0).is_err());
        assert!(model.rssi_mean(1, -3.0).is_err());
    }

    #[test]
    fn rssi_mean_strictly_decreasing_in_distance() {
        let model = SegmentedModel::default();
        let mut last = f64::INFINITY;
        for d in [1.0, 2.0, 10.0, 57.0, 300.0, 5000.0] {
            let r = model.rssi_mean(1, d).unwrap();
            assert!(r < last);
            last = r;
        }
    }

    #[test]
    fn link_rate_at_noise_floor_equals_bandwidth() {
        let model = SegmentedModel::default();
        let r = model.link_rate(model.noise_floor_dbm);
        assert!((r - model.bandwidth_hz).abs() / model.bandwidth_hz < 1e-12);
    }

    #[test]
    fn link_rate_limits_and_example() {
        let model = SegmentedModel::default();
        assert!(model.link_rate(-300.0) < 1e-20);
        // 15 dB SNR at 1 MHz: 1e6 * log2(1 + 31.6228) = 5.0278e6 b/s.
        let r = model.link_rate(model.noise_floor_dbm + 15.0);
        let expect = 1e6 * (1.0 + 10f64.powf(1.5)).log2();
        assert!((r - expect).abs() < 1.0);
        assert!((expect - 5.0278e6).abs() < 1e3);
    }

    #[test]
    fn link_rate_monotone_in_rssi() {
        let model = SegmentedModel::default();
        let mut last = -1.0;
        for rssi in -120..=0 {
            let r = model.link_rate(rssi as f64);
            assert!(r > last);
            last = r;
        }
    }

    #[test]
    fn relay_rate_is_min() {
        assert_eq!(relay_rate(5.0, 3.0), 3.0);
        assert_eq!(relay_rate(4.0, 4.0), 4.0);
        assert_eq!(relay_rate(0.0, 7.0), 0.0);
    }

    #[test]
    fn global_plos_examples() {
        let p = GlobalLosParams {
            slope: 0.2,
            midpoint_deg: 20.0,
        };
        assert!((global_plos(&p, 20.0) - 0.5).abs() < 1e-12);
        // Steep slope saturates near 1 at 90 degrees.
        let steep = GlobalLosParams {
            slope: 2.0,
            midpoint_deg: 20.0,
        };
        assert!(global_plos(&steep, 90.0) > 1.0 - 1e-10);
        // Direct evaluation at the far end.
        let lo = global_plos(&p, -90.0);
        assert!((lo - 1.0 / (1.0 + (22.0f64).exp())).abs() < 1e-18);
        assert!((lo - 2.8e-10).abs() < 1e-11);
    }

    #[test]
    fn global_plos_monotone_and_bounded() {
        let p = GlobalLosParams::default();
        let mut last = -1.0;
        for t in -90..=90 {
            let v = global_plos(&p, t as f64);
            assert!(v > 0.0 && v < 1.0);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn sample_rssi_zero_noise_path() {
        // Shadowing cannot be exactly zero (validation), so check that the
        // sampled value stays within a tight bound of the mean for tiny
        // sigma, and that the recorded segment matches the ray tracer.
        let mut model = SegmentedModel::default();
        model.segments[0].sigma_db = 1e-9;
        model.segments[1].sigma_db = 1e-9;
        let map = CityMap::flat(5.0, 20, 20, (0.0, 0.0)).unwrap();
        let node = GroundNode::new(3, 50.0, 50.0);
        let uav = Pose3::new(20.0, 20.0, 60.0);
        let m = sample_rssi(9, &model, &map, &uav, &node).unwrap();
        let mean = model
            .rssi_mean(1, uav.distance(&node.position))
            .unwrap();
        assert!((m.rssi_dbm - mean).abs() < 1e-6);
        assert_eq!(m.true_segment, Some(1));
        assert_eq!(m.node_id, 3);
    }

    #[test]
    fn sample_rssi_deterministic_per_seed() {
        let model = SegmentedModel::default();
        let map = CityMap::flat(5.0, 20, 20, (0.0, 0.0)).unwrap();
        let node = GroundNode::new(0, 50.0, 50.0);
        let uav = Pose3::new(20.0, 20.0, 60.0);
        let a = sample_rssi(1234, &model, &map, &uav, &node).unwrap();
        let b = sample_rssi(1234, &model, &map, &uav, &node).unwrap();
        assert_eq!(a, b);
        let c = sample_rssi(1235, &model, &map, &uav, &node).unwrap();
        assert_ne!(a.rssi_dbm, c.rssi_dbm);
    }

    #[test]
    fn sample_rssi_moments_match_model() {
        let model = SegmentedModel::default();
        let map = CityMap::flat(5.0, 20, 20, (0.0, 0.0)).unwrap();
        let node = GroundNode::new(0, 50.0, 50.0);
        let uav = Pose3::new(20.0, 20.0, 60.0);
        let mean = model.rssi_mean(1, uav.distance(&node.position)).unwrap();
        let n = 10_000;
        let samples: Vec<f64> = (0..n)
            .map(|i| sample_rssi(i, &model, &map, &uav, &node).unwrap().rssi_dbm)
            .collect();
        let m = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((m - mean).abs() < 0.1, "sample mean off by {}", m - mean);
        let sd = var.sqrt();
        assert!(
            (sd - 2.0).abs() / 2.0 < 0.05,
            "sample std {sd} vs sigma 2.0"
        );
    }

    #[test]
    fn model_validation() {
        let mut m = SegmentedModel::default();
        m.segments[0].alpha = 4.0; // decreasing order now
        assert!(m.validate().is_err());

        let mut m = SegmentedModel::default();
        m.segments[1].sigma_db = 0.0;
        assert!(m.validate().is_err());

        let mut m = SegmentedModel::default();
        m.thresholds_m = vec![1.0];
        assert!(m.validate().is_err());

        assert!(SegmentedModel::default().validate().is_ok());
    }
}
