//! CSV and JSON file formats.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use urquhart_core::evaluation::{ExperimentReport, MergedMap, Timings};
use urquhart_core::simulator::{ForestMap, Observation};
use urquhart_core::{Point2, Se2Transform};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandmarkRow {
    pub landmark_id: usize,
    pub x: f64,
    pub y: f64,
}

/// `landmark_id` is -1 when the point has no ground-truth identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservationRow {
    pub obs_id: usize,
    pub landmark_id: i64,
    pub x: f64,
    pub y: f64,
}

/// Pose of an observation frame in map coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoseRow {
    pub obs_id: usize,
    pub theta_rad: f64,
    pub x: f64,
    pub y: f64,
}

/// Transform mapping observation `j` coordinates into observation `i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformRow {
    pub i: usize,
    pub j: usize,
    pub theta_rad: f64,
    pub tx: f64,
    pub ty: f64,
    pub n_inliers: usize,
    pub n_corrs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergedRow {
    pub merged_id: usize,
    pub x: f64,
    pub y: f64,
    pub n_sources: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrRow {
    pub omega: f64,
    pub sigma: f64,
    pub min_corrs: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub stage: String,
    pub index: usize,
    pub ms: f64,
    pub comparisons: Option<usize>,
    pub g_i: Option<usize>,
    pub g_j: Option<usize>,
}

/// Points of one observation with their optional ground-truth ids.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObservationData {
    pub points: Vec<Point2>,
    pub landmark_ids: Vec<Option<usize>>,
}

impl From<&Observation> for ObservationData {
    fn from(o: &Observation) -> Self {
        Self {
            points: o.points.clone(),
            landmark_ids: o.landmark_ids.iter().map(|&id| Some(id)).collect(),
        }
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<usize, CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    let mut n = 0;
    for row in rows {
        w.serialize(row).map_err(|e| CliError::io(path, e))?;
        n += 1;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(n)
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e))?;
    r.deserialize().collect::<Result<_, _>>().map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io(path, e))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_forest(path: &Path, map: &ForestMap) -> Result<usize, CliError> {
    write_csv(
        path,
        map.landmarks
            .iter()
            .enumerate()
            .map(|(landmark_id, p)| LandmarkRow { landmark_id, x: p.x, y: p.y }),
    )
}

pub fn read_forest(path: &Path) -> Result<Vec<Point2>, CliError> {
    let rows: Vec<LandmarkRow> = read_csv(path)?;
    for (k, r) in rows.iter().enumerate() {
        if r.landmark_id != k {
            return Err(CliError::io(path, format!("row {k} has landmark_id {}", r.landmark_id)));
        }
    }
    Ok(rows.into_iter().map(|r| Point2::new(r.x, r.y)).collect())
}

pub fn write_observations(path: &Path, observations: &[ObservationData]) -> Result<usize, CliError> {
    let rows = observations.iter().enumerate().flat_map(|(obs_id, o)| {
        o.points.iter().zip(&o.landmark_ids).map(move |(p, id)| ObservationRow {
            obs_id,
            landmark_id: id.map_or(-1, |v| v as i64),
            x: p.x,
            y: p.y,
        })
    });
    write_csv(path, rows)
}

/// Reads observations grouped by `obs_id`. At least `min_count`
/// observations are returned, so empty observations listed elsewhere keep
/// their slots.
pub fn read_observations(path: &Path, min_count: usize) -> Result<Vec<ObservationData>, CliError> {
    let rows: Vec<ObservationRow> = read_csv(path)?;
    let count = rows.iter().map(|r| r.obs_id + 1).max().unwrap_or(0).max(min_count);
    let mut out = vec![ObservationData::default(); count];
    for r in rows {
        if r.landmark_id < -1 {
            return Err(CliError::io(path, format!("landmark_id {} is below -1", r.landmark_id)));
        }
        let o = &mut out[r.obs_id];
        o.points.push(Point2::new(r.x, r.y));
        o.landmark_ids.push(usize::try_from(r.landmark_id).ok());
    }
    Ok(out)
}

pub fn write_poses(path: &Path, frames: &[Se2Transform]) -> Result<usize, CliError> {
    write_csv(
        path,
        frames.iter().enumerate().map(|(obs_id, f)| PoseRow {
            obs_id,
            theta_rad: f.theta,
            x: f.tx,
            y: f.ty,
        }),
    )
}

pub fn read_poses(path: &Path) -> Result<Vec<Se2Transform>, CliError> {
    let rows: Vec<PoseRow> = read_csv(path)?;
    rows.iter()
        .enumerate()
        .map(|(k, r)| {
            if r.obs_id == k {
                Ok(Se2Transform::new(r.theta_rad, r.x, r.y))
            } else {
                Err(CliError::io(path, format!("row {k} has obs_id {}", r.obs_id)))
            }
        })
        .collect()
}

pub fn write_f1_grid(path: &Path, report: &ExperimentReport) -> Result<usize, CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    let mut header = vec!["sigma".to_string()];
    header.extend(report.omegas.iter().map(|o| format!("omega_{o}")));
    w.write_record(&header).map_err(|e| CliError::io(path, e))?;
    for (sigma, row) in report.sigmas.iter().zip(report.f1_grid()) {
        let mut record = vec![sigma.to_string()];
        record.extend(row.iter().map(f64::to_string));
        w.write_record(&record).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(report.sigmas.len())
}

pub fn pr_rows(report: &ExperimentReport) -> Vec<PrRow> {
    report
        .cells
        .iter()
        .flat_map(|c| {
            c.pr.iter().map(|p| PrRow {
                omega: c.omega,
                sigma: c.sigma,
                min_corrs: p.min_corrs,
                precision: p.precision,
                recall: p.recall,
                f1: p.f1,
            })
        })
        .collect()
}

pub fn write_merged_map(path: &Path, map: &MergedMap) -> Result<usize, CliError> {
    write_csv(
        path,
        map.landmarks
            .iter()
            .zip(&map.provenance)
            .enumerate()
            .map(|(merged_id, (p, prov))| MergedRow {
                merged_id,
                x: p.x,
                y: p.y,
                n_sources: prov.len(),
            }),
    )
}

pub fn timing_rows(t: &Timings) -> Vec<TimingRow> {
    let build = t.descriptor_ms.iter().enumerate().map(|(index, &ms)| TimingRow {
        stage: "descriptor".into(),
        index,
        ms,
        comparisons: None,
        g_i: None,
        g_j: None,
    });
    let matching = t
        .matching_ms
        .iter()
        .zip(&t.comparisons)
        .enumerate()
        .map(|(index, (&ms, &(c, ga, gb)))| TimingRow {
            stage: "matching".into(),
            index,
            ms,
            comparisons: Some(c),
            g_i: Some(ga),
            g_j: Some(gb),
        });
    build.chain(matching).collect()
}
