//! Centroid-distance Fourier descriptor of a polygon boundary.
//!
//! The boundary is resampled at a fixed number of equally spaced arc-length
//! positions, the squared distance of each sample to the vertex centroid is
//! taken, and the magnitude spectrum of that signature is kept. Magnitudes do
//! not change under a circular shift or reversal of the signature, so the
//! descriptor ignores where the boundary walk starts and which way it turns.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{perimeter, Point2};

pub const DEFAULT_STEP: f64 = 0.04;

/// Normalisation applied to the DFT magnitudes stored in a descriptor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DftScaling {
    /// Unnormalised transform: the DC bin is the sum of the signature.
    Raw,
    /// Transform divided by the sample count: the DC bin is the mean squared
    /// centroid distance, independent of the step.
    #[default]
    Mean,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DescriptorConfig {
    /// Sample spacing as a fraction of the perimeter.
    pub step: f64,
    pub scaling: DftScaling,
}

impl Default for DescriptorConfig {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            scaling: DftScaling::Mean,
        }
    }
}

impl DescriptorConfig {
    pub fn validate(&self) -> Result<()> {
        check_step(self.step)
    }

    pub fn sample_count(&self) -> usize {
        sample_count(self.step)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySamples {
    pub points: Vec<Point2>,
    pub step: f64,
    pub perimeter: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonDescriptor {
    pub magnitudes: Vec<f64>,
    /// Number of distinct polygon vertices.
    pub vertex_count: usize,
}

fn check_step(step: f64) -> Result<()> {
    if step > 0.0 && step < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidStep(step))
    }
}

/// Number of boundary samples for a given step: `round(1 / step)`.
pub fn sample_count(step: f64) -> usize {
    (1.0 / step).round() as usize
}

/// Arithmetic mean of the polygon vertices.
pub fn centroid(ring: &[Point2]) -> Point2 {
    let n = ring.len() as f64;
    let sum = ring.iter().fold(Point2::default(), |acc, &p| acc + p);
    sum * (1.0 / n)
}

/// Samples `round(1 / step)` points along the closed ring at arc-length
/// positions `k * step * perimeter`, starting at `ring[0]`.
pub fn resample_boundary(ring: &[Point2], step: f64) -> Result<BoundarySamples> {
    check_step(step)?;
    let total = perimeter(ring);
    let m = sample_count(step);
    let n = ring.len();
    let mut points = Vec::with_capacity(m);

    let mut edge = 0;
    let mut edge_start = 0.0;
    let mut edge_len = ring[0].dist(ring[1 % n]);
    for k in 0..m {
        let s = (k as f64 * step * total) % total;
        // Positions only grow until they wrap past the perimeter.
        if s < edge_start {
            edge = 0;
            edge_start = 0.0;
            edge_len = ring[0].dist(ring[1 % n]);
        }
        while s > edge_start + edge_len && edge + 1 < n {
            edge_start += edge_len;
            edge += 1;
            edge_len = ring[edge].dist(ring[(edge + 1) % n]);
        }
        let t = if edge_len > 0.0 {
            ((s - edge_start) / edge_len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        points.push(ring[edge].lerp(ring[(edge + 1) % n], t));
    }
    Ok(BoundarySamples {
        points,
        step,
        perimeter: total,
    })
}

/// Squared distance of each sample to `c`.
pub fn centroid_distance_signature(samples: &BoundarySamples, c: Point2) -> Vec<f64> {
    samples.points.iter().map(|p| p.dist2(c)).collect()
}

/// Magnitudes of the unnormalised discrete Fourier transform of `signature`.
pub fn dft_magnitude(signature: &[f64]) -> Vec<f64> {
    let m = signature.len();
    let w = 2.0 * PI / m as f64;
    (0..m)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (n, &v) in signature.iter().enumerate() {
                // Reduce the index first so the angle stays small.
                let angle = w * ((k * n) % m) as f64;
                re += v * angle.cos();
                im -= v * angle.sin();
            }
            re.hypot(im)
        })
        .collect()
}

/// Index of the vertex farthest from the centroid, the first one on ties.
pub fn canonical_start(ring: &[Point2], c: Point2) -> usize {
    let mut best = 0;
    for (i, p) in ring.iter().enumerate().skip(1) {
        if p.dist2(c) > ring[best].dist2(c) {
            best = i;
        }
    }
    best
}

/// Full descriptor of a polygon given by its vertex ring.
///
/// Sampling starts at [`canonical_start`] rather than at `ring[0]`, so the
/// result does not depend on where the stored walk begins.
pub fn describe(ring: &[Point2], cfg: &DescriptorConfig) -> Result<PolygonDescriptor> {
    let c = centroid(ring);
    let mut rotated = ring.to_vec();
    rotated.rotate_left(canonical_start(ring, c));
    let samples = resample_boundary(&rotated, cfg.step)?;
    let signature = centroid_distance_signature(&samples, c);
    let mut magnitudes = dft_magnitude(&signature);
    if cfg.scaling == DftScaling::Mean {
        let scale = 1.0 / magnitudes.len() as f64;
        magnitudes.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(PolygonDescriptor {
        magnitudes,
        vertex_count: ring.len(),
    })
}

/// Squared Euclidean distance between two magnitude vectors.
pub fn descriptor_distance(a: &PolygonDescriptor, b: &PolygonDescriptor) -> Result<f64> {
    if a.magnitudes.len() != b.magnitudes.len() {
        return Err(Error::LengthMismatch(a.magnitudes.len(), b.magnitudes.len()));
    }
    Ok(squared_distance(&a.magnitudes, &b.magnitudes))
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
