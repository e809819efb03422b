use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use urquhart_core::evaluation::{
    benchmark_timings, build_features, confusion_by_threshold, match_all_pairs, match_pair, merge_submaps,
    run_loop_closure_experiment, MatchDecision, MergeOutcome, PrPoint, Timings,
};
use urquhart_core::matching::match_observations;
use urquhart_core::simulator::{generate_forest, trajectory, window_submaps, Observation, Simulation};
use urquhart_core::{ObservationFeatures, Point2, Se2Transform};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{self, ObservationData, PrRow, TransformRow};
use crate::svg;

pub const FOREST: &str = "forest.csv";
pub const OBSERVATIONS: &str = "observations.csv";
pub const POSES: &str = "poses.csv";
pub const MANIFEST: &str = "manifest.json";
pub const TRANSFORMS: &str = "transforms.csv";
pub const F1_GRID: &str = "f1_grid.csv";
pub const PR_CURVES: &str = "pr_curves.csv";
pub const PR_CURVES_SVG: &str = "pr_curves.svg";
pub const MERGED_MAP: &str = "merged_map.csv";
pub const MERGED_MAP_SVG: &str = "merged_map.svg";
pub const MERGE_REPORT: &str = "merge_report.json";
pub const TIMINGS: &str = "timings.csv";

/// Record of a run: the resolved configuration reproduces it, `rows`
/// counts the data rows of every CSV written.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub inputs: Vec<PathBuf>,
    pub rows: BTreeMap<String, usize>,
}

impl Manifest {
    fn new(command: &str, config: &RunConfig, inputs: &[&Path]) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            inputs: inputs.iter().map(|p| p.to_path_buf()).collect(),
            rows: BTreeMap::new(),
        }
    }

    fn write(&self, out: &Path) -> Result<(), CliError> {
        io::write_json(&out.join(MANIFEST), self)
    }
}

fn prepare_out(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))
}

fn transform_row(i: usize, j: usize, t: &Se2Transform, n_inliers: usize, n_corrs: usize) -> TransformRow {
    TransformRow {
        i,
        j,
        theta_rad: t.theta,
        tx: t.tx,
        ty: t.ty,
        n_inliers,
        n_corrs,
    }
}

pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<Simulation, CliError> {
    let sim = Simulation::run(&cfg.sim)?;
    prepare_out(out)?;
    let mut manifest = Manifest::new("simulate", cfg, &[]);
    let data: Vec<ObservationData> = sim.observations.iter().map(ObservationData::from).collect();
    let frames: Vec<Se2Transform> = sim.observations.iter().map(Observation::frame_pose).collect();
    manifest.rows.insert(FOREST.into(), io::write_forest(&out.join(FOREST), &sim.map)?);
    manifest.rows.insert(OBSERVATIONS.into(), io::write_observations(&out.join(OBSERVATIONS), &data)?);
    manifest.rows.insert(POSES.into(), io::write_poses(&out.join(POSES), &frames)?);
    manifest.write(out)?;
    Ok(sim)
}

/// Outcome of matching one observation pair.
#[derive(Clone, Debug)]
pub struct PairReport {
    pub decision: MatchDecision,
    pub polygon_pairs: usize,
    pub triangle_pairs: usize,
}

impl PairReport {
    pub fn summary(&self) -> String {
        let d = &self.decision;
        let mut s = format!(
            "polygon pairs: {}\ntriangle pairs: {}\npoint pairs: {}\n",
            self.polygon_pairs, self.triangle_pairs, d.n_point_corrs
        );
        match &d.estimated {
            Some(t) => s += &format!(
                "transform: theta_deg={:.6} tx={:.6} ty={:.6}\ninliers: {}\nmatch",
                t.theta.to_degrees(),
                t.tx,
                t.ty,
                d.n_inliers
            ),
            None => s += "no match",
        }
        s
    }
}

/// Matches observation `j` into observation `i` of an observations file.
pub fn match_observations_file(
    cfg: &RunConfig,
    observations: &Path,
    i: usize,
    j: usize,
    out: Option<&Path>,
) -> Result<PairReport, CliError> {
    let data = io::read_observations(observations, 0)?;
    for k in [i, j] {
        if k >= data.len() {
            return Err(CliError::Config(format!("observation {k} not found; the file holds {}", data.len())));
        }
    }
    let features: Vec<ObservationFeatures> = data
        .iter()
        .enumerate()
        .map(|(k, o)| {
            if k == i || k == j {
                ObservationFeatures::build(&o.points, &cfg.descriptor).map(|f| f.with_sample_seed(k as u64))
            } else {
                Ok(ObservationFeatures::empty(&[]))
            }
        })
        .collect::<Result<_, _>>()?;
    let corr = match_observations(&features[i], &features[j], &cfg.matching);
    let decision = match_pair(i, j, &features, &cfg.matching, &cfg.ransac);
    let report = PairReport {
        decision,
        polygon_pairs: corr.polygon_pairs.len(),
        triangle_pairs: corr.triangle_pairs.len(),
    };
    if let Some(out) = out {
        prepare_out(out)?;
        let mut manifest = Manifest::new("match", cfg, &[observations]);
        let d = &report.decision;
        let rows = d.estimated.iter().map(|t| transform_row(i, j, t, d.n_inliers, d.n_point_corrs));
        manifest.rows.insert(TRANSFORMS.into(), io::write_csv(&out.join(TRANSFORMS), rows)?);
        manifest.write(out)?;
    }
    Ok(report)
}

/// Runs the (omega, sigma) grid experiment and writes its tables.
pub fn eval_grid(cfg: &RunConfig, out: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let report = run_loop_closure_experiment(&cfg.sim, &cfg.experiment, &cfg.descriptor, &cfg.matching, &cfg.ransac)?;
    prepare_out(out)?;
    let mut manifest = Manifest::new("eval", cfg, &[]);
    manifest.rows.insert(F1_GRID.into(), io::write_f1_grid(&out.join(F1_GRID), &report)?);
    manifest.rows.insert(PR_CURVES.into(), io::write_csv(&out.join(PR_CURVES), io::pr_rows(&report))?);
    io::write_text(&out.join(PR_CURVES_SVG), &svg::pr_curves(&report))?;
    manifest.write(out)?;
    Ok(report.f1_grid())
}

/// Evaluates every observation pair of a simulated run read from `input`,
/// a directory written by `simulate`.
pub fn eval_run(cfg: &RunConfig, input: &Path, out: &Path) -> Result<Vec<PrPoint>, CliError> {
    let frames = io::read_poses(&input.join(POSES))?;
    let data = io::read_observations(&input.join(OBSERVATIONS), frames.len())?;
    if data.len() != frames.len() {
        return Err(CliError::io(input, format!("{} observations but {} poses", data.len(), frames.len())));
    }
    let observations: Vec<Observation> = data
        .into_iter()
        .zip(&frames)
        .enumerate()
        .map(|(k, (o, frame))| Observation {
            time_index: k,
            true_pose: *frame,
            applied_rotation: 0.0,
            landmark_ids: o.landmark_ids.iter().map(|id| id.unwrap_or(usize::MAX)).collect(),
            points: o.points,
        })
        .collect();
    let features = build_features(&observations, &cfg.descriptor)?;
    let min_corrs = &cfg.experiment.min_corrs;
    let decisions = match_all_pairs(&features, &cfg.matching, &cfg.ransac, min_corrs);
    let confusion = confusion_by_threshold(&decisions, &observations, cfg.sim.sensor_radius, min_corrs);
    let pr: Vec<PrPoint> = min_corrs
        .iter()
        .zip(&confusion)
        .map(|(&mc, c)| PrPoint::new(mc, c.precision(), c.recall()))
        .collect();

    prepare_out(out)?;
    let mut manifest = Manifest::new("eval", cfg, &[input]);
    let lowest = min_corrs.iter().copied().min().unwrap_or(cfg.ransac.min_correspondences);
    let transforms = decisions.iter().filter_map(|d| {
        d.estimate_at(lowest)
            .map(|t| transform_row(d.obs_i, d.obs_j, t, d.n_inliers, d.n_point_corrs))
    });
    manifest.rows.insert(TRANSFORMS.into(), io::write_csv(&out.join(TRANSFORMS), transforms)?);
    let rows = pr.iter().map(|p| PrRow {
        omega: cfg.sim.omega,
        sigma: cfg.sim.sigma,
        min_corrs: p.min_corrs,
        precision: p.precision,
        recall: p.recall,
        f1: p.f1,
    });
    manifest.rows.insert(PR_CURVES.into(), io::write_csv(&out.join(PR_CURVES), rows)?);
    manifest.write(out)?;
    Ok(pr)
}

#[derive(Clone, Debug, Serialize)]
pub struct MergeReport {
    pub submaps: usize,
    pub input_landmarks: usize,
    pub merged_landmarks: usize,
    /// Sub-maps that could not be aligned.
    pub failures: Vec<usize>,
    /// Point correspondences and RANSAC inliers per sub-map.
    pub correspondences: Vec<(usize, usize)>,
}

fn simulated_submaps(cfg: &RunConfig) -> Result<Vec<Vec<Point2>>, CliError> {
    let sim = urquhart_core::SimConfig { laps: cfg.merge.laps, ..cfg.sim.clone() };
    let map = generate_forest(&sim);
    let poses = trajectory(&sim)?;
    let subs = window_submaps(&map, &poses, cfg.merge.window, cfg.merge.stride, &sim, sim.seed)?;
    Ok(subs.into_iter().map(|s| s.points).collect())
}

/// Merges the observations of `observations`, or simulated sub-maps when
/// no file is given, into one map.
pub fn merge(cfg: &RunConfig, observations: Option<&Path>, out: &Path) -> Result<(MergeOutcome, MergeReport), CliError> {
    let submaps: Vec<Vec<Point2>> = match observations {
        Some(path) => io::read_observations(path, 0)?.into_iter().map(|o| o.points).collect(),
        None => simulated_submaps(cfg)?,
    };
    let outcome = merge_submaps(&submaps, &cfg.descriptor, &cfg.matching, &cfg.ransac, &cfg.merge.merge_config())?;
    let report = MergeReport {
        submaps: submaps.len(),
        input_landmarks: submaps.iter().map(Vec::len).sum(),
        merged_landmarks: outcome.map.landmarks.len(),
        failures: outcome.failures.clone(),
        correspondences: outcome.correspondences.clone(),
    };

    prepare_out(out)?;
    let inputs: Vec<&Path> = observations.into_iter().collect();
    let mut manifest = Manifest::new("merge", cfg, &inputs);
    manifest.rows.insert(MERGED_MAP.into(), io::write_merged_map(&out.join(MERGED_MAP), &outcome.map)?);
    let transforms = outcome
        .map
        .transforms
        .iter()
        .zip(&outcome.correspondences)
        .enumerate()
        .filter_map(|(k, (t, &(n_corrs, n_inliers)))| t.map(|t| transform_row(0, k, &t, n_inliers, n_corrs)));
    manifest.rows.insert(TRANSFORMS.into(), io::write_csv(&out.join(TRANSFORMS), transforms)?);
    io::write_json(&out.join(MERGE_REPORT), &report)?;
    io::write_text(&out.join(MERGED_MAP_SVG), &svg::scatter("Merged map", &outcome.map.landmarks))?;
    manifest.write(out)?;
    Ok((outcome, report))
}

/// Times feature building and consecutive-pair matching on the calling
/// thread.
pub fn bench(cfg: &RunConfig, observations: Option<&Path>, out: &Path) -> Result<Timings, CliError> {
    let sets: Vec<Vec<Point2>> = match observations {
        Some(path) => io::read_observations(path, 0)?.into_iter().map(|o| o.points).collect(),
        None => Simulation::run(&cfg.sim)?.observations.into_iter().map(|o| o.points).collect(),
    };
    let timings = benchmark_timings(&sets, &cfg.descriptor, &cfg.matching)?;
    prepare_out(out)?;
    let inputs: Vec<&Path> = observations.into_iter().collect();
    let mut manifest = Manifest::new("bench", cfg, &inputs);
    manifest.rows.insert(TIMINGS.into(), io::write_csv(&out.join(TIMINGS), io::timing_rows(&timings))?);
    manifest.write(out)?;
    Ok(timings)
}
