//! Loop-closure experiments, sub-map merging and timing measurements.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descriptor::DescriptorConfig;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::matching::{match_observations, mix_seed, MatchConfig, ObservationFeatures};
use crate::registration::{angle_difference, ransac_se2, RansacConfig, Se2Transform};
use crate::simulator::{generate_forest, Observation, PointGrid, SimConfig, Simulation};

/// Squared position error bound for a true positive, m².
pub const MAX_POSITION_ERROR2: f64 = 10.0;
/// Rotation error bound for a true positive, radians.
pub const MAX_ROTATION_ERROR: f64 = 20.0 * std::f64::consts::PI / 180.0;
/// Thresholds on the number of point correspondences swept in experiments.
pub const DEFAULT_MIN_CORRS: [usize; 5] = [4, 8, 16, 32, 64];
/// Radius under which merged landmarks are fused, meters.
pub const MERGE_EPS: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    TruePositive,
    FalsePositive,
    FalseNegative,
    TrueNegative,
}

/// Labels one matching attempt between observations `i` and `j`.
///
/// `estimated` maps observation `j` coordinates into observation `i`
/// coordinates; `frame_i` and `frame_j` map each observation into the map.
pub fn classify_match(
    estimated: Option<&Se2Transform>,
    frame_i: &Se2Transform,
    frame_j: &Se2Transform,
    sensor_radius: f64,
) -> Label {
    match estimated {
        Some(h) => {
            let est_j = frame_i.compose(h);
            let pos_err2 = est_j.translation().dist2(frame_j.translation());
            let rot_err = angle_difference(est_j.theta, frame_j.theta);
            if pos_err2 < MAX_POSITION_ERROR2 && rot_err < MAX_ROTATION_ERROR {
                Label::TruePositive
            } else {
                Label::FalsePositive
            }
        }
        None if frame_i.translation().dist(frame_j.translation()) < sensor_radius => Label::FalseNegative,
        None => Label::TrueNegative,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn add(&mut self, label: Label) {
        match label {
            Label::TruePositive => self.tp += 1,
            Label::FalsePositive => self.fp += 1,
            Label::FalseNegative => self.fn_ += 1,
            Label::TrueNegative => self.tn += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean of precision and recall, 0 when both vanish.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub min_corrs: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrPoint {
    pub fn new(min_corrs: usize, precision: f64, recall: f64) -> Self {
        Self {
            min_corrs,
            precision,
            recall,
            f1: f1_score(precision, recall),
        }
    }
}

/// Result of matching one ordered observation pair.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchDecision {
    pub obs_i: usize,
    pub obs_j: usize,
    /// Maps observation `j` coordinates into observation `i` coordinates.
    pub estimated: Option<Se2Transform>,
    pub n_point_corrs: usize,
    pub n_inliers: usize,
}

impl MatchDecision {
    /// The estimate as seen under a stricter correspondence threshold.
    pub fn estimate_at(&self, min_corrs: usize) -> Option<&Se2Transform> {
        self.estimated.as_ref().filter(|_| self.n_point_corrs >= min_corrs)
    }
}

/// Builds matcher features for each observation; sampling seeds follow the
/// observation index.
pub fn build_features(observations: &[Observation], cfg: &DescriptorConfig) -> Result<Vec<ObservationFeatures>> {
    observations
        .par_iter()
        .enumerate()
        .map(|(k, o)| ObservationFeatures::build(&o.points, cfg).map(|f| f.with_sample_seed(k as u64)))
        .collect()
}

/// Matches observation `j` into observation `i` and estimates the transform.
pub fn match_pair(
    i: usize,
    j: usize,
    features: &[ObservationFeatures],
    match_cfg: &MatchConfig,
    ransac_cfg: &RansacConfig,
) -> MatchDecision {
    let corr = match_observations(&features[i], &features[j], match_cfg);
    let pairs: Vec<(Point2, Point2)> = corr
        .point_pairs
        .iter()
        .map(|&(pi, pj)| (features[j].landmarks[pj], features[i].landmarks[pi]))
        .collect();
    let cfg = RansacConfig {
        seed: mix_seed(mix_seed(ransac_cfg.seed, i as u64), j as u64),
        ..*ransac_cfg
    };
    let (estimated, n_inliers) = match ransac_se2(&pairs, &cfg) {
        Ok(out) => (Some(out.transform), out.inliers.len()),
        Err(_) => (None, 0),
    };
    MatchDecision {
        obs_i: i,
        obs_j: j,
        estimated,
        n_point_corrs: pairs.len(),
        n_inliers,
    }
}

/// Matches every pair `i < j`.
///
/// RANSAC runs with the smallest threshold in `min_corrs`; stricter
/// thresholds are applied afterwards through [`MatchDecision::estimate_at`],
/// which gives the same answers because the RANSAC seed depends only on the
/// pair.
pub fn match_all_pairs(
    features: &[ObservationFeatures],
    match_cfg: &MatchConfig,
    ransac_cfg: &RansacConfig,
    min_corrs: &[usize],
) -> Vec<MatchDecision> {
    let lowest = min_corrs.iter().copied().min().unwrap_or(ransac_cfg.min_correspondences);
    let cfg = RansacConfig {
        min_correspondences: lowest,
        ..*ransac_cfg
    };
    let n = features.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    pairs
        .par_iter()
        .map(|&(i, j)| match_pair(i, j, features, match_cfg, &cfg))
        .collect()
}

/// Confusion counts of `decisions` at each correspondence threshold.
pub fn confusion_by_threshold(
    decisions: &[MatchDecision],
    observations: &[Observation],
    sensor_radius: f64,
    min_corrs: &[usize],
) -> Vec<Confusion> {
    let frames: Vec<Se2Transform> = observations.iter().map(Observation::frame_pose).collect();
    min_corrs
        .iter()
        .map(|&mc| {
            let mut c = Confusion::default();
            for d in decisions {
                c.add(classify_match(d.estimate_at(mc), &frames[d.obs_i], &frames[d.obs_j], sensor_radius));
            }
            c
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub omegas: Vec<f64>,
    pub sigmas: Vec<f64>,
    /// Independent forests per (omega, sigma) cell.
    pub seeds: usize,
    pub min_corrs: Vec<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            omegas: vec![0.8, 0.9, 0.95, 1.0],
            sigmas: vec![0.0, 0.1, 0.2, 0.3, 0.4],
            seeds: 5,
            min_corrs: DEFAULT_MIN_CORRS.to_vec(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.omegas.is_empty() || self.sigmas.is_empty() || self.min_corrs.is_empty() || self.seeds == 0 {
            return Err(Error::InvalidConfig("experiment grid must be non-empty".into()));
        }
        Ok(())
    }
}

/// Outcome of one (omega, sigma) cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellResult {
    pub omega: f64,
    pub sigma: f64,
    /// Confusion counts per seed, then per threshold.
    pub confusion: Vec<Vec<Confusion>>,
    /// Precision and recall averaged over seeds, per threshold.
    pub pr: Vec<PrPoint>,
    /// Best F1 over thresholds.
    pub f1: f64,
    /// Standard deviation over seeds of the F1 at the best threshold.
    pub f1_std: f64,
    pub best_min_corrs: usize,
}

impl CellResult {
    fn from_confusion(omega: f64, sigma: f64, min_corrs: &[usize], confusion: Vec<Vec<Confusion>>) -> Self {
        let seeds = confusion.len() as f64;
        let pr: Vec<PrPoint> = min_corrs
            .iter()
            .enumerate()
            .map(|(k, &mc)| {
                let p = confusion.iter().map(|c| c[k].precision()).sum::<f64>() / seeds;
                let r = confusion.iter().map(|c| c[k].recall()).sum::<f64>() / seeds;
                PrPoint::new(mc, p, r)
            })
            .collect();
        let best = (0..pr.len()).fold(0, |b, k| if pr[k].f1 > pr[b].f1 { k } else { b });
        let per_seed: Vec<f64> = confusion
            .iter()
            .map(|c| f1_score(c[best].precision(), c[best].recall()))
            .collect();
        let mean = per_seed.iter().sum::<f64>() / seeds;
        let var = per_seed.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / seeds;
        Self {
            omega,
            sigma,
            confusion,
            f1: pr[best].f1,
            f1_std: var.sqrt(),
            best_min_corrs: pr[best].min_corrs,
            pr,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub omegas: Vec<f64>,
    pub sigmas: Vec<f64>,
    /// Row-major over sigma, then omega.
    pub cells: Vec<CellResult>,
}

impl ExperimentReport {
    pub fn cell(&self, omega: f64, sigma: f64) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| (c.omega - omega).abs() < 1e-12 && (c.sigma - sigma).abs() < 1e-12)
    }

    /// F1 values with one row per sigma and one column per omega.
    pub fn f1_grid(&self) -> Vec<Vec<f64>> {
        self.sigmas
            .iter()
            .map(|&s| self.omegas.iter().map(|&o| self.cell(o, s).map_or(f64::NAN, |c| c.f1)).collect())
            .collect()
    }
}

/// Seed of the `k`-th forest of an experiment.
pub fn run_seed(base: u64, k: usize) -> u64 {
    mix_seed(base, k as u64)
}

/// Loop-closure detection over an (omega, sigma) grid.
///
/// Each seed fixes a forest and the per-observation random draws, which are
/// shared by every cell, so differences between cells come from the noise
/// settings alone.
pub fn run_loop_closure_experiment(
    sim_cfg: &SimConfig,
    exp: &ExperimentConfig,
    descriptor_cfg: &DescriptorConfig,
    match_cfg: &MatchConfig,
    ransac_cfg: &RansacConfig,
) -> Result<ExperimentReport> {
    sim_cfg.validate()?;
    exp.validate()?;
    descriptor_cfg.validate()?;
    match_cfg.validate()?;
    ransac_cfg.validate()?;
    let mut confusion: HashMap<(usize, usize), Vec<Vec<Confusion>>> = HashMap::new();
    for k in 0..exp.seeds {
        let seeded = SimConfig {
            seed: run_seed(sim_cfg.seed, k),
            ..sim_cfg.clone()
        };
        let map = generate_forest(&seeded);
        for (si, &sigma) in exp.sigmas.iter().enumerate() {
            for (oi, &omega) in exp.omegas.iter().enumerate() {
                let cfg = SimConfig {
                    omega,
                    sigma,
                    ..seeded.clone()
                };
                let sim = Simulation::with_map(&cfg, map.clone())?;
                let features = build_features(&sim.observations, descriptor_cfg)?;
                let decisions = match_all_pairs(&features, match_cfg, ransac_cfg, &exp.min_corrs);
                let c = confusion_by_threshold(&decisions, &sim.observations, cfg.sensor_radius, &exp.min_corrs);
                confusion.entry((si, oi)).or_default().push(c);
            }
        }
    }
    let mut cells = Vec::new();
    for (si, &sigma) in exp.sigmas.iter().enumerate() {
        for (oi, &omega) in exp.omegas.iter().enumerate() {
            let c = confusion.remove(&(si, oi)).unwrap_or_default();
            cells.push(CellResult::from_confusion(omega, sigma, &exp.min_corrs, c));
        }
    }
    Ok(ExperimentReport {
        omegas: exp.omegas.clone(),
        sigmas: exp.sigmas.clone(),
        cells,
    })
}

/// Density clustering; returns one label per point, `None` for noise.
///
/// Clusters are numbered in order of their first point.
pub fn dbscan(points: &[Point2], eps: f64, min_pts: usize) -> Vec<Option<usize>> {
    assert!(eps > 0.0, "eps must be positive");
    let grid = PointGrid::new(points, eps);
    let neighbors = |i: usize| grid.within(points, points[i], eps);
    let mut labels: Vec<Option<usize>> = vec![None; points.len()];
    let mut visited = vec![false; points.len()];
    let mut next = 0;
    for start in 0..points.len() {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let seeds = neighbors(start);
        if seeds.len() < min_pts {
            continue;
        }
        let cluster = next;
        next += 1;
        labels[start] = Some(cluster);
        let mut queue = seeds;
        while let Some(q) = queue.pop() {
            if labels[q].is_none() {
                labels[q] = Some(cluster);
            }
            if visited[q] {
                continue;
            }
            visited[q] = true;
            let reach = neighbors(q);
            if reach.len() >= min_pts {
                queue.extend(reach.into_iter().filter(|&r| !visited[r] || labels[r].is_none()));
            }
        }
    }
    labels
}

/// A landmark of a sub-map: sub-map index and point index within it.
pub type SubmapLandmark = (usize, usize);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MergedMap {
    /// Landmarks in the frame of the first sub-map.
    pub landmarks: Vec<Point2>,
    /// Transform of each sub-map into the merged frame; `None` on failure.
    pub transforms: Vec<Option<Se2Transform>>,
    /// Sub-map landmarks fused into each merged landmark.
    pub provenance: Vec<Vec<SubmapLandmark>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MergeOutcome {
    pub map: MergedMap,
    /// Sub-maps that could not be aligned.
    pub failures: Vec<usize>,
    /// Point correspondences and RANSAC inliers per sub-map (0 for the first).
    pub correspondences: Vec<(usize, usize)>,
}

impl MergeOutcome {
    pub fn errors(&self) -> Vec<Error> {
        self.failures.iter().map(|&k| Error::MergeFailure(k)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MergeConfig {
    pub eps: f64,
    pub min_pts: usize,
}

impl Default for MergeConfig {
    fn default() -> Self {
        Self {
            eps: MERGE_EPS,
            min_pts: 1,
        }
    }
}

/// Clusters weighted landmarks until no two are within `eps`; merged
/// landmarks sit at the weighted mean of their members.
fn fuse(points: Vec<Point2>, provenance: Vec<Vec<SubmapLandmark>>, cfg: &MergeConfig) -> (Vec<Point2>, Vec<Vec<SubmapLandmark>>) {
    let (mut points, mut provenance) = (points, provenance);
    loop {
        let labels = dbscan(&points, cfg.eps, cfg.min_pts);
        let clusters = labels.iter().flatten().max().map_or(0, |m| m + 1);
        let noise = labels.iter().filter(|l| l.is_none()).count();
        if clusters + noise == points.len() {
            return (points, provenance);
        }
        let mut sums = vec![(Point2::default(), 0.0); clusters];
        let mut merged_prov: Vec<Vec<SubmapLandmark>> = vec![Vec::new(); clusters];
        let mut kept = Vec::new();
        let mut kept_prov = Vec::new();
        for ((p, prov), label) in points.into_iter().zip(provenance).zip(labels) {
            match label {
                Some(c) => {
                    let w = prov.len() as f64;
                    sums[c].0 = sums[c].0 + p * w;
                    sums[c].1 += w;
                    merged_prov[c].extend(prov);
                }
                None => {
                    kept.push(p);
                    kept_prov.push(prov);
                }
            }
        }
        points = sums.into_iter().map(|(s, w)| s * (1.0 / w)).chain(kept).collect();
        provenance = merged_prov.into_iter().chain(kept_prov).collect();
        for p in &mut provenance {
            p.sort_unstable();
        }
    }
}

/// Folds sub-maps into one map in order.
///
/// Each step rebuilds the features of the accumulated map, matches the next
/// sub-map against it, moves the sub-map into the accumulated frame and fuses
/// landmarks closer than `merge.eps`. A sub-map that cannot be aligned is
/// recorded as a failure and skipped.
pub fn merge_submaps(
    submaps: &[Vec<Point2>],
    descriptor_cfg: &DescriptorConfig,
    match_cfg: &MatchConfig,
    ransac_cfg: &RansacConfig,
    merge: &MergeConfig,
) -> Result<MergeOutcome> {
    if submaps.len() < 2 {
        return Err(Error::InvalidConfig("merging needs at least two sub-maps".into()));
    }
    if !(merge.eps > 0.0) {
        return Err(Error::InvalidConfig(format!("merge eps must be positive, got {}", merge.eps)));
    }
    let (mut landmarks, mut provenance) = fuse(
        submaps[0].clone(),
        (0..submaps[0].len()).map(|k| vec![(0, k)]).collect(),
        merge,
    );
    let mut transforms = vec![Some(Se2Transform::identity())];
    let mut failures = Vec::new();
    let mut correspondences = vec![(0, 0)];
    for (k, sub) in submaps.iter().enumerate().skip(1) {
        let acc = ObservationFeatures::build(&landmarks, descriptor_cfg)?;
        let next = ObservationFeatures::build(sub, descriptor_cfg)?.with_sample_seed(k as u64);
        let corr = match_observations(&acc, &next, match_cfg);
        let pairs: Vec<(Point2, Point2)> = corr
            .point_pairs
            .iter()
            .map(|&(pa, pb)| (sub[pb], landmarks[pa]))
            .collect();
        let cfg = RansacConfig {
            seed: mix_seed(ransac_cfg.seed, k as u64),
            ..*ransac_cfg
        };
        match ransac_se2(&pairs, &cfg) {
            Ok(out) => {
                correspondences.push((pairs.len(), out.inliers.len()));
                landmarks.extend(sub.iter().map(|&p| out.transform.apply(p)));
                provenance.extend((0..sub.len()).map(|i| vec![(k, i)]));
                (landmarks, provenance) = fuse(landmarks, provenance, merge);
                transforms.push(Some(out.transform));
            }
            Err(_) => {
                correspondences.push((pairs.len(), 0));
                failures.push(k);
                transforms.push(None);
            }
        }
    }
    Ok(MergeOutcome {
        map: MergedMap {
            landmarks,
            transforms,
            provenance,
        },
        failures,
        correspondences,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlignmentStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Distances between associated landmarks after moving the sources by
/// `transform`. Each pair is (source, target).
pub fn alignment_error(pairs: &[(Point2, Point2)], transform: &Se2Transform) -> Result<AlignmentStats> {
    if pairs.is_empty() {
        return Err(Error::NotEnoughCorrespondences { have: 0, need: 1 });
    }
    let d: Vec<f64> = pairs.iter().map(|&(s, t)| transform.apply(s).dist(t)).collect();
    Ok(AlignmentStats {
        mean: d.iter().sum::<f64>() / d.len() as f64,
        min: d.iter().copied().fold(f64::INFINITY, f64::min),
        max: d.iter().copied().fold(0.0, f64::max),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    /// Feature build time per observation, milliseconds.
    pub descriptor_ms: Vec<f64>,
    /// Matching time per pair, milliseconds.
    pub matching_ms: Vec<f64>,
    /// (comparisons, polygons in a, polygons in b) per pair.
    pub comparisons: Vec<(usize, usize, usize)>,
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

impl Timings {
    pub fn descriptor_median_ms(&self) -> f64 {
        median(&self.descriptor_ms)
    }

    pub fn matching_median_ms(&self) -> f64 {
        median(&self.matching_ms)
    }
}

/// Times feature building for every observation and matching for each
/// consecutive pair, on the calling thread.
pub fn benchmark_timings(
    observations: &[Vec<Point2>],
    descriptor_cfg: &DescriptorConfig,
    match_cfg: &MatchConfig,
) -> Result<Timings> {
    let mut timings = Timings::default();
    let mut features = Vec::with_capacity(observations.len());
    for (k, points) in observations.iter().enumerate() {
        let start = Instant::now();
        let f = ObservationFeatures::build(points, descriptor_cfg)?.with_sample_seed(k as u64);
        timings.descriptor_ms.push(start.elapsed().as_secs_f64() * 1e3);
        features.push(f);
    }
    for w in features.windows(2) {
        let start = Instant::now();
        let corr = match_observations(&w[0], &w[1], match_cfg);
        timings.matching_ms.push(start.elapsed().as_secs_f64() * 1e3);
        let ga = w[0].selected_polygons(match_cfg.gamma, match_cfg.seed).len();
        let gb = w[1].selected_polygons(match_cfg.gamma, match_cfg.seed).len();
        timings.comparisons.push((corr.comparisons, ga, gb));
    }
    Ok(timings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(theta: f64, x: f64, y: f64) -> Se2Transform {
        Se2Transform::new(theta, x, y)
    }

    #[test]
    fn classification_rules() {
        let fi = frame(0.4, 10.0, 0.0);
        let fj = frame(-1.0, 12.0, 3.0);
        let exact = fi.inverse().compose(&fj);
        assert_eq!(classify_match(Some(&exact), &fi, &fj, 50.0), Label::TruePositive);
        let shifted = exact.compose(&frame(0.0, 4.0, 0.0));
        assert_eq!(classify_match(Some(&shifted), &fi, &fj, 50.0), Label::FalsePositive);
        let turned = exact.compose(&Se2Transform::rotation(0.5));
        assert_eq!(classify_match(Some(&turned), &fi, &fj, 50.0), Label::FalsePositive);
        assert_eq!(classify_match(None, &fi, &fj, 50.0), Label::FalseNegative);
        let far = frame(0.0, 210.0, 0.0);
        assert_eq!(classify_match(None, &fi, &far, 50.0), Label::TrueNegative);
    }

    #[test]
    fn f1_edge_cases() {
        assert_eq!(f1_score(0.0, 0.0), 0.0);
        assert!((f1_score(1.0, 0.5) - 2.0 / 3.0).abs() < 1e-15);
        let c = Confusion::default();
        assert_eq!((c.precision(), c.recall()), (0.0, 0.0));
    }

    #[test]
    fn dbscan_pairs_and_chains() {
        let two = |d: f64| vec![Point2::new(0.0, 0.0), Point2::new(d, 0.0)];
        assert_eq!(dbscan(&two(0.3), 0.5, 1), vec![Some(0), Some(0)]);
        assert_eq!(dbscan(&two(0.8), 0.5, 1), vec![Some(0), Some(1)]);
        let chain: Vec<Point2> = (0..10).map(|k| Point2::new(k as f64 * 0.4, 0.0)).collect();
        assert!(dbscan(&chain, 0.5, 1).iter().all(|&l| l == Some(0)));
    }

    #[test]
    fn dbscan_marks_noise() {
        let mut pts: Vec<Point2> = (0..4).map(|k| Point2::new(k as f64 * 0.1, 0.0)).collect();
        pts.push(Point2::new(5.0, 5.0));
        let labels = dbscan(&pts, 0.5, 3);
        assert!(labels[..4].iter().all(|&l| l == Some(0)));
        assert_eq!(labels[4], None);
    }

    #[test]
    fn alignment_statistics() {
        let pairs = [(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)), (Point2::new(3.0, 1.0), Point2::new(4.0, 1.0))];
        let exact = alignment_error(&pairs, &frame(0.0, 1.0, 0.0)).unwrap();
        assert_eq!((exact.mean, exact.min, exact.max), (0.0, 0.0, 0.0));
        let off = alignment_error(&pairs, &Se2Transform::identity()).unwrap();
        assert_eq!((off.mean, off.min, off.max), (1.0, 1.0, 1.0));
        assert!(alignment_error(&[], &Se2Transform::identity()).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
