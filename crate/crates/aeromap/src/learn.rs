//! Radio-map learning from sparse RSSI measurements.
//!
//! Two reconstruction routes:
//! - direct: kernel/KNN averaging of raw RSSI in pose space, no channel
//!   knowledge;
//! - model-based: fit a segmented pathloss model by alternating segment
//!   classification with per-segment least squares, then predict the mean
//!   channel at query poses from a segment predictor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::channel::{global_plos, GlobalLosParams, Measurement, SegmentedModel};
use crate::world::city::CityMap;
use crate::world::geometry::{elevation_angle, GroundNode, Pose3};
use crate::world::raytrace;

/// Measurements plus a per-measurement segment estimate in `1..=K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub measurements: Vec<Measurement>,
    pub labels: Vec<usize>,
}

impl LabeledDataset {
    pub fn new(measurements: Vec<Measurement>, labels: Vec<usize>, k: usize) -> Result<Self> {
        if measurements.len() != labels.len() {
            return Err(Error::invalid("labels must match measurements 1:1"));
        }
        if labels.iter().any(|s| *s < 1 || *s > k) {
            return Err(Error::invalid(format!("labels must lie in 1..={k}")));
        }
        Ok(Self {
            measurements,
            labels,
        })
    }

    /// Fraction of labels agreeing with the simulation ground truth, when
    /// every measurement carries one.
    pub fn accuracy_vs_truth(&self) -> Option<f64> {
        let mut hits = 0usize;
        for (m, s) in self.measurements.iter().zip(&self.labels) {
            match m.true_segment {
                Some(t) => {
                    if t == *s {
                        hits += 1;
                    }
                }
                None => return None,
            }
        }
        Some(hits as f64 / self.measurements.len().max(1) as f64)
    }
}

/// Predicted RSSI over a set of query poses for one ground node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioMap {
    pub node_id: u32,
    pub grid: Vec<Pose3>,
    pub predicted_rssi: Vec<f64>,
    pub predicted_segment: Option<Vec<usize>>,
}

/// How the alternating fit seeds its first labels.
#[derive(Debug, Clone)]
pub enum InitPolicy {
    /// Run the alternation from both the elevation warm start and the
    /// residual-quantile split, keep whichever ends with the lower objective.
    Auto(GlobalLosParams),
    /// Threshold the global LoS probability at 0.5 on the link elevation
    /// angle (two-segment warm start; other K fall back to quantiles).
    Elevation(GlobalLosParams),
    /// Split points into K groups by the residual of a single global
    /// pathloss fit (strongest links to segment 1).
    ResidualQuantiles,
    /// Start from caller-provided labels.
    Labels(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub k: usize,
    pub init: InitPolicy,
    pub max_iters: usize,
    /// Relative objective-change convergence threshold.
    pub tol: f64,
    /// Known transmit power; the intercepts are fit relative to it.
    pub tx_power_dbm: f64,
    pub noise_floor_dbm: f64,
    pub bandwidth_hz: f64,
    /// Lower clamp for fitted shadowing, dB. Keeps the likelihood bounded on
    /// noiseless data.
    pub sigma_floor_db: f64,
    /// Fraction of the largest segment reseeded into an emptied segment.
    pub reseed_fraction: f64,
    /// Physical range for fitted pathloss exponents. Slopes outside it are
    /// clamped (with the intercept refit), which keeps the alternation from
    /// latching onto a near/far split of one segment's cloud.
    pub alpha_bounds: (f64, f64),
    /// Iterations run with a pooled shadowing estimate before per-segment
    /// sigmas take over. Plain nearest-line clustering at first stops a
    /// wide-sigma segment from swallowing everything while the lines are
    /// still poor.
    pub homoscedastic_iters: usize,
}

impl FitOptions {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            init: InitPolicy::Auto(GlobalLosParams::default()),
            max_iters: 100,
            tol: 1e-6,
            tx_power_dbm: 20.0,
            noise_floor_dbm: -90.0,
            bandwidth_hz: 1e6,
            sigma_floor_db: 1e-2,
            reseed_fraction: 0.10,
            alpha_bounds: (1.0, 6.0),
            homoscedastic_iters: 4,
        }
    }
}

/// Result of the alternating classification / least-squares fit.
#[derive(Debug, Clone)]
pub struct SegmentedFit {
    pub model: SegmentedModel,
    pub labeled: LabeledDataset,
    /// Negative log-likelihood after each iteration; nonincreasing unless a
    /// reseed fired.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub reseeds: usize,
}

struct Point {
    log10_d: f64,
    rssi: f64,
    theta_deg: f64,
}

fn prepare_points(measurements: &[Measurement], nodes: &[GroundNode]) -> Result<Vec<Point>> {
    let mut points = Vec::with_capacity(measurements.len());
    for m in measurements {
        let node = nodes.iter().find(|n| n.id == m.node_id).ok_or_else(|| {
            Error::invalid(format!("measurement references unknown node {}", m.node_id))
        })?;
        let d = m.uav.distance(&node.position);
        if d <= 0.0 {
            return Err(Error::invalid("measurement at zero distance"));
        }
        points.push(Point {
            log10_d: d.log10(),
            rssi: m.rssi_dbm,
            theta_deg: elevation_angle(&m.uav, node)?,
        });
    }
    Ok(points)
}

/// Ordinary least squares of `y = intercept + slope * x`. Falls back to a
/// flat fit when the x spread is degenerate.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx < 1e-12 {
        return (my, 0.0);
    }
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

#[derive(Clone, Copy)]
struct SegFit {
    alpha: f64,
    beta_db: f64,
    sigma_db: f64,
    /// Mixture weight (class prior) of the segment.
    weight: f64,
}

fn fit_one_segment(points: &[Point], idx: &[usize], opts: &FitOptions) -> SegFit {
    let xs: Vec<f64> = idx.iter().map(|i| points[*i].log10_d).collect();
    let ys: Vec<f64> = idx.iter().map(|i| points[*i].rssi).collect();
    let (mut intercept, mut slope) = least_squares(&xs, &ys);
    let alpha = (-slope / 10.0).clamp(opts.alpha_bounds.0, opts.alpha_bounds.1);
    if alpha != -slope / 10.0 {
        // Refit the intercept for the clamped slope.
        slope = -10.0 * alpha;
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        intercept = my - slope * mx;
    }
    let beta_db = intercept - opts.tx_power_dbm;
    let mut ss = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let r = y - (intercept + slope * x);
        ss += r * r;
    }
    let sigma_db = (ss / xs.len() as f64).sqrt().max(opts.sigma_floor_db);
    SegFit {
        alpha,
        beta_db,
        sigma_db,
        weight: 1.0,
    }
}

fn predict(fit: &SegFit, opts: &FitOptions, log10_d: f64) -> f64 {
    opts.tx_power_dbm + fit.beta_db - 10.0 * fit.alpha * log10_d
}

/// Classification-likelihood objective: Gaussian negative log-likelihood of
/// the labeled points plus the class-prior term of the hard-assignment
/// mixture.
fn objective(points: &[Point], labels: &[usize], fits: &[SegFit], opts: &FitOptions) -> f64 {
    const HALF_LN_2PI: f64 = 0.918_938_533_204_672_74;
    let mut nll = 0.0;
    for (p, s) in points.iter().zip(labels) {
        let f = &fits[*s - 1];
        let r = p.rssi - predict(f, opts, p.log10_d);
        nll += f.sigma_db.ln() + r * r / (2.0 * f.sigma_db * f.sigma_db) + HALF_LN_2PI
            - f.weight.max(1e-12).ln();
    }
    nll
}

fn elevation_labels(points: &[Point], params: &GlobalLosParams) -> Vec<usize> {
    points
        .iter()
        .map(|p| {
            if global_plos(params, p.theta_deg) >= 0.5 {
                1
            } else {
                2
            }
        })
        .collect()
}

/// Split by residual rank against a single global pathloss fit: the
/// strongest links (largest positive residual) get segment 1. `shares` gives
/// each segment's fraction of the points, summing to 1.
fn residual_split_labels(points: &[Point], shares: &[f64]) -> Vec<usize> {
    let xs: Vec<f64> = points.iter().map(|p| p.log10_d).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.rssi).collect();
    let (intercept, slope) = least_squares(&xs, &ys);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|a, b| {
        let ra = ys[*a] - (intercept + slope * xs[*a]);
        let rb = ys[*b] - (intercept + slope * xs[*b]);
        rb.partial_cmp(&ra).unwrap()
    });
    let n = points.len();
    let mut labels = vec![shares.len(); n];
    let mut cum = 0.0;
    let mut start = 0usize;
    for (s, share) in shares.iter().enumerate() {
        cum += share;
        let end = ((cum * n as f64).round() as usize).min(n);
        for i in &order[start..end] {
            labels[*i] = s + 1;
        }
        start = end;
    }
    for i in &order[start..] {
        labels[*i] = shares.len();
    }
    labels
}

fn quantile_labels(points: &[Point], k: usize) -> Vec<usize> {
    residual_split_labels(points, &vec![1.0 / k as f64; k])
}

/// The segment proportions are unknown up front, so the auto policy seeds
/// several splits and lets the final likelihood arbitrate.
fn initial_label_candidates(points: &[Point], opts: &FitOptions) -> Vec<Vec<usize>> {
    match &opts.init {
        InitPolicy::Labels(l) => vec![l.clone()],
        InitPolicy::Elevation(params) if opts.k == 2 => vec![elevation_labels(points, params)],
        InitPolicy::Elevation(_) => vec![quantile_labels(points, opts.k)],
        InitPolicy::Auto(params) if opts.k == 2 => {
            let mut c = vec![elevation_labels(points, params)];
            for q in [0.5, 0.3, 0.15, 0.05] {
                c.push(residual_split_labels(points, &[q, 1.0 - q]));
            }
            c
        }
        InitPolicy::Auto(_) | InitPolicy::ResidualQuantiles => {
            vec![quantile_labels(points, opts.k)]
        }
    }
}

struct AltResult {
    fits: Vec<SegFit>,
    labels: Vec<usize>,
    trace: Vec<f64>,
    iterations: usize,
    converged: bool,
    reseeds: usize,
}

impl AltResult {
    fn final_nll(&self) -> f64 {
        *self.trace.last().unwrap_or(&f64::INFINITY)
    }
}

fn run_alternation(points: &[Point], labels0: Vec<usize>, opts: &FitOptions) -> Result<AltResult> {
    if opts.max_iters <= opts.homoscedastic_iters {
        return Err(Error::invalid(
            "max_iters must exceed the pooled-sigma warm phase",
        ));
    }
    let mut labels = labels0;
    let mut fits: Vec<SegFit> = vec![
        SegFit {
            alpha: 2.0,
            beta_db: -40.0,
            sigma_db: 1.0,
            weight: 1.0 / opts.k as f64,
        };
        opts.k
    ];
    let mut trace: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut reseeds = 0usize;

    for iter in 0..opts.max_iters {
        iterations += 1;

        // Refit every segment; rescue segments starved of points from the
        // worst-fitting tail of the largest one.
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); opts.k];
        for (i, s) in labels.iter().enumerate() {
            members[*s - 1].push(i);
        }
        for _ in 0..opts.k {
            let starved = match members.iter().position(|m| m.len() < 3) {
                Some(s) => s,
                None => break,
            };
            let largest = (0..opts.k).max_by_key(|s| members[*s].len()).expect("k >= 1");
            if members[largest].len() < 6 {
                return Err(Error::InsufficientData(
                    "too few points to populate every segment".into(),
                ));
            }
            reseeds += 1;
            let donor_fit = fit_one_segment(points, &members[largest], opts);
            let mut by_resid: Vec<usize> = members[largest].clone();
            by_resid.sort_by(|a, b| {
                let ra = (points[*a].rssi - predict(&donor_fit, opts, points[*a].log10_d)).abs();
                let rb = (points[*b].rssi - predict(&donor_fit, opts, points[*b].log10_d)).abs();
                rb.partial_cmp(&ra).unwrap()
            });
            let take = ((members[largest].len() as f64 * opts.reseed_fraction).ceil() as usize)
                .clamp(3, members[largest].len() / 2);
            let moved: Vec<usize> = by_resid[..take].to_vec();
            members[largest].retain(|i| !moved.contains(i));
            for i in &moved {
                labels[*i] = starved + 1;
            }
            members[starved] = moved;
        }
        for s in 0..opts.k {
            fits[s] = fit_one_segment(points, &members[s], opts);
            fits[s].weight = members[s].len() as f64 / points.len() as f64;
        }
        if iter < opts.homoscedastic_iters {
            // Pooled shadowing and flat class priors while the lines settle.
            let mut ss = 0.0;
            for (p, s) in points.iter().zip(&labels) {
                let r = p.rssi - predict(&fits[*s - 1], opts, p.log10_d);
                ss += r * r;
            }
            let pooled = (ss / points.len() as f64).sqrt().max(opts.sigma_floor_db);
            for f in &mut fits {
                f.sigma_db = pooled;
                f.weight = 1.0 / opts.k as f64;
            }
        }

        // Reassign each point to its maximum-likelihood segment.
        let mut new_labels = Vec::with_capacity(points.len());
        for p in points {
            let mut best = 1usize;
            let mut best_score = f64::INFINITY;
            for (s, f) in fits.iter().enumerate() {
                let r = p.rssi - predict(f, opts, p.log10_d);
                let score = f.sigma_db.ln() + r * r / (2.0 * f.sigma_db * f.sigma_db)
                    - f.weight.max(1e-12).ln();
                if score < best_score {
                    best_score = score;
                    best = s + 1;
                }
            }
            new_labels.push(best);
        }

        let nll = objective(points, &new_labels, &fits, opts);
        let stalled = trace
            .last()
            .map(|prev: &f64| ((prev - nll) / prev.abs().max(1.0)).abs() < opts.tol)
            .unwrap_or(false);
        trace.push(nll);
        let labels_fixed = new_labels == labels;
        labels = new_labels;
        // Never stop while the fits still carry the pooled sigma.
        if iter >= opts.homoscedastic_iters && (labels_fixed || stalled) {
            converged = true;
            break;
        }
    }

    Ok(AltResult {
        fits,
        labels,
        trace,
        iterations,
        converged,
        reseeds,
    })
}

/// Joint segment classification and pathloss parameter estimation.
///
/// Alternates hard assignment of each measurement to the segment with the
/// highest Gaussian likelihood against per-segment least squares on
/// `(log10 d, rssi)`, until labels stabilize or the objective stalls.
/// Segments are reordered by exponent before returning, so segment 1 is the
/// least obstructed.
pub fn fit_segmented_model(
    measurements: &[Measurement],
    nodes: &[GroundNode],
    opts: &FitOptions,
) -> Result<SegmentedFit> {
    if opts.k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    // Three parameters per segment; demand a modest multiple.
    let min_needed = 2 * opts.k * 3;
    if measurements.len() < min_needed {
        return Err(Error::InsufficientData(format!(
            "{} measurements < {min_needed} required for k={}",
            measurements.len(),
            opts.k
        )));
    }
    let points = prepare_points(measurements, nodes)?;
    if let InitPolicy::Labels(l) = &opts.init {
        if l.len() != points.len() || l.iter().any(|s| *s < 1 || *s > opts.k) {
            return Err(Error::invalid("initial labels malformed"));
        }
    }

    let mut best: Option<AltResult> = None;
    for labels0 in initial_label_candidates(&points, opts) {
        let run = run_alternation(&points, labels0, opts)?;
        let better = match &best {
            None => true,
            Some(b) => run.final_nll() < b.final_nll(),
        };
        if better {
            best = Some(run);
        }
    }
    let AltResult {
        fits,
        labels,
        trace,
        iterations,
        converged,
        reseeds,
    } = best.expect("at least one init candidate");

    // Order segments by exponent: least obstructed first.
    let mut order: Vec<usize> = (0..opts.k).collect();
    order.sort_by(|a, b| fits[*a].alpha.partial_cmp(&fits[*b].alpha).unwrap());
    let mut rank_of = vec![0usize; opts.k];
    for (rank, old) in order.iter().enumerate() {
        rank_of[*old] = rank;
    }
    let segments = order
        .iter()
        .map(|o| crate::world::channel::SegmentParams {
            alpha: fits[*o].alpha,
            beta_db: fits[*o].beta_db,
            sigma_db: fits[*o].sigma_db,
        })
        .collect::<Vec<_>>();
    let labels: Vec<usize> = labels.iter().map(|s| rank_of[*s - 1] + 1).collect();

    let model = SegmentedModel {
        segments,
        tx_power_dbm: opts.tx_power_dbm,
        noise_floor_dbm: opts.noise_floor_dbm,
        bandwidth_hz: opts.bandwidth_hz,
        thresholds_m: raytrace::default_thresholds(opts.k),
    };
    model.validate()?;
    Ok(SegmentedFit {
        labeled: LabeledDataset::new(measurements.to_vec(), labels, opts.k)?,
        model,
        objective_trace: trace,
        iterations,
        converged,
        reseeds,
    })
}

/// One-shot per-segment least squares with caller-fixed labels (oracle mode):
/// no reassignment, no reseeding. Keeps the caller's segment order.
pub fn fit_with_fixed_labels(
    measurements: &[Measurement],
    nodes: &[GroundNode],
    labels: &[usize],
    opts: &FitOptions,
) -> Result<SegmentedModel> {
    if labels.len() != measurements.len() {
        return Err(Error::invalid("labels must match measurements 1:1"));
    }
    let points = prepare_points(measurements, nodes)?;
    let mut segments = Vec::with_capacity(opts.k);
    for s in 1..=opts.k {
        let idx: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == s)
            .map(|(i, _)| i)
            .collect();
        if idx.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "segment {s} has {} points, need >= 2",
                idx.len()
            )));
        }
        let f = fit_one_segment(&points, &idx, opts);
        segments.push(crate::world::channel::SegmentParams {
            alpha: f.alpha,
            beta_db: f.beta_db,
            sigma_db: f.sigma_db,
        });
    }
    Ok(SegmentedModel {
        segments,
        tx_power_dbm: opts.tx_power_dbm,
        noise_floor_dbm: opts.noise_floor_dbm,
        bandwidth_hz: opts.bandwidth_hz,
        thresholds_m: raytrace::default_thresholds(opts.k),
    })
}

/// Direct reconstruction flavor.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectMethod {
    /// Mean of the k nearest training samples in 3D pose space.
    Knn { k: usize },
    /// Gaussian-kernel weighted mean with the given bandwidth (meters).
    Kernel { bandwidth_m: f64 },
}

/// Predict RSSI on `grid` by averaging nearby training samples of one node.
pub fn reconstruct_direct(
    measurements: &[Measurement],
    node_id: u32,
    grid: Vec<Pose3>,
    method: DirectMethod,
) -> Result<RadioMap> {
    let train: Vec<&Measurement> = measurements.iter().filter(|m| m.node_id == node_id).collect();
    if train.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no measurements for node {node_id}"
        )));
    }
    match method {
        DirectMethod::Knn { k } if k == 0 => {
            return Err(Error::invalid("knn k must be >= 1"));
        }
        DirectMethod::Kernel { bandwidth_m } if bandwidth_m <= 0.0 => {
            return Err(Error::invalid("kernel bandwidth must be > 0"));
        }
        _ => {}
    }

    let mut predicted = Vec::with_capacity(grid.len());
    let mut dists: Vec<(f64, f64)> = Vec::with_capacity(train.len());
    for q in &grid {
        dists.clear();
        dists.extend(train.iter().map(|m| (q.distance(&m.uav), m.rssi_dbm)));
        let value = match method {
            DirectMethod::Knn { k } => {
                let k = k.min(dists.len());
                dists.select_nth_unstable_by(k - 1, |a, b| a.0.partial_cmp(&b.0).unwrap());
                dists[..k].iter().map(|(_, r)| r).sum::<f64>() / k as f64
            }
            DirectMethod::Kernel { bandwidth_m } => {
                let mut wsum = 0.0;
                let mut acc = 0.0;
                for (d, r) in &dists {
                    let w = (-d * d / (2.0 * bandwidth_m * bandwidth_m)).exp();
                    wsum += w;
                    acc += w * r;
                }
                if wsum > 1e-300 {
                    acc / wsum
                } else {
                    // Every weight underflowed; nearest sample wins.
                    dists
                        .iter()
                        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
                        .map(|(_, r)| *r)
                        .unwrap()
                }
            }
        };
        predicted.push(value);
    }
    Ok(RadioMap {
        node_id,
        grid,
        predicted_rssi: predicted,
        predicted_segment: None,
    })
}

/// Supplies the obstruction segment for a query link.
pub trait SegmentPredictor {
    fn predict(&self, uav: &Pose3, node: &GroundNode) -> Result<usize>;
}

/// Ray-traces a city raster (ground truth or estimated heights).
pub struct MapPredictor<'a> {
    pub map: &'a CityMap,
    pub thresholds_m: &'a [f64],
}

impl SegmentPredictor for MapPredictor<'_> {
    fn predict(&self, uav: &Pose3, node: &GroundNode) -> Result<usize> {
        raytrace::classify_with_thresholds(self.map, uav, &node.position, self.thresholds_m)
    }
}

/// Ray-traces the tallest city consistent with inferred height bounds:
/// per-cell height `min(upper, prior_max)`. Sound bounds make this
/// predictor conservative (it never reports LoS on a truly blocked link).
pub struct BoundsPredictor {
    map: CityMap,
    thresholds_m: Vec<f64>,
}

impl BoundsPredictor {
    pub fn new(
        bounds: &crate::map3d::HeightBounds,
        prior_max_m: f64,
        thresholds_m: Vec<f64>,
    ) -> Result<Self> {
        let heights: Vec<f64> = bounds
            .upper
            .iter()
            .map(|u| u.min(prior_max_m).max(0.0))
            .collect();
        let map = CityMap::new(
            bounds.cell_size,
            bounds.nx,
            bounds.ny,
            bounds.origin,
            heights,
        )?;
        Ok(Self { map, thresholds_m })
    }
}

impl SegmentPredictor for BoundsPredictor {
    fn predict(&self, uav: &Pose3, node: &GroundNode) -> Result<usize> {
        raytrace::classify_with_thresholds(&self.map, uav, &node.position, &self.thresholds_m)
    }
}

/// Copies the label of the nearest labeled training pose (3D distance).
pub struct NearestLabelPredictor {
    poses: Vec<Pose3>,
    labels: Vec<usize>,
}

impl NearestLabelPredictor {
    pub fn new(labeled: &LabeledDataset) -> Result<Self> {
        if labeled.measurements.is_empty() {
            return Err(Error::InsufficientData("no labeled poses".into()));
        }
        Ok(Self {
            poses: labeled.measurements.iter().map(|m| m.uav).collect(),
            labels: labeled.labels.clone(),
        })
    }
}

impl SegmentPredictor for NearestLabelPredictor {
    fn predict(&self, uav: &Pose3, _node: &GroundNode) -> Result<usize> {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.poses.iter().enumerate() {
            let d = p.distance(uav);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        Ok(self.labels[best])
    }
}

/// Predict mean RSSI on `grid` from the fitted model and a segment predictor.
pub fn reconstruct_model_based(
    model: &SegmentedModel,
    predictor: &dyn SegmentPredictor,
    grid: Vec<Pose3>,
    node: &GroundNode,
) -> Result<RadioMap> {
    let mut rssi = Vec::with_capacity(grid.len());
    let mut segs = Vec::with_capacity(grid.len());
    for q in &grid {
        let s = predictor.predict(q, node)?;
        let d = q.distance(&node.position);
        rssi.push(model.rssi_mean(s, d)?);
        segs.push(s);
    }
    Ok(RadioMap {
        node_id: node.id,
        grid,
        predicted_rssi: rssi,
        predicted_segment: Some(segs),
    })
}

/// Root-mean-square difference between two maps on the same grid, dB.
pub fn map_rmse(predicted: &RadioMap, truth: &RadioMap) -> Result<f64> {
    if predicted.grid.len() != truth.grid.len()
        || predicted.grid.iter().zip(&truth.grid).any(|(a, b)| a != b)
    {
        return Err(Error::GridMismatch(
            "radio maps evaluated on different grids".into(),
        ));
    }
    let n = predicted.grid.len();
    if n == 0 {
        return Err(Error::GridMismatch("empty grid".into()));
    }
    let ss: f64 = predicted
        .predicted_rssi
        .iter()
        .zip(&truth.predicted_rssi)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((ss / n as f64).sqrt())
}
