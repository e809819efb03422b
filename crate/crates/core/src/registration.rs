//! Planar rigid transforms and two-point RANSAC.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, DUPLICATE_TOLERANCE};

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Absolute angular difference in [0, pi].
pub fn angle_difference(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Rotation by `theta` followed by translation by `(tx, ty)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Se2Transform {
    pub theta: f64,
    pub tx: f64,
    pub ty: f64,
}

impl Default for Se2Transform {
    fn default() -> Self {
        Self::identity()
    }
}

impl Se2Transform {
    pub fn new(theta: f64, tx: f64, ty: f64) -> Self {
        Self {
            theta: wrap_angle(theta),
            tx,
            ty,
        }
    }

    pub const fn identity() -> Self {
        Self {
            theta: 0.0,
            tx: 0.0,
            ty: 0.0,
        }
    }

    pub fn rotation(theta: f64) -> Self {
        Self::new(theta, 0.0, 0.0)
    }

    pub fn translation(&self) -> Point2 {
        Point2::new(self.tx, self.ty)
    }

    fn rotate(&self, p: Point2) -> Point2 {
        let (s, c) = self.theta.sin_cos();
        Point2::new(c * p.x - s * p.y, s * p.x + c * p.y)
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        self.rotate(p) + self.translation()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Se2Transform) -> Se2Transform {
        let t = self.apply(other.translation());
        Se2Transform::new(self.theta + other.theta, t.x, t.y)
    }

    pub fn inverse(&self) -> Se2Transform {
        let inv = Se2Transform::rotation(-self.theta);
        let t = -inv.rotate(self.translation());
        Se2Transform::new(-self.theta, t.x, t.y)
    }
}

/// A source point and the target point it should map onto.
pub type Correspondence = (Point2, Point2);

/// Exact rigid transform from two correspondences.
pub fn solve_rigid_2pt(first: Correspondence, second: Correspondence) -> Result<Se2Transform> {
    let ds = second.0 - first.0;
    if ds.norm() <= DUPLICATE_TOLERANCE {
        return Err(Error::DegeneratePair);
    }
    let dt = second.1 - first.1;
    let theta = ds.cross(dt).atan2(ds.dot(dt));
    let cs = (first.0 + second.0) * 0.5;
    let ct = (first.1 + second.1) * 0.5;
    let r = Se2Transform::rotation(theta);
    let t = ct - r.apply(cs);
    Ok(Se2Transform::new(theta, t.x, t.y))
}

/// Least-squares rigid alignment of the given correspondences.
pub fn fit_rigid(corrs: &[Correspondence]) -> Result<Se2Transform> {
    if corrs.len() < 2 {
        return Err(Error::NotEnoughCorrespondences {
            have: corrs.len(),
            need: 2,
        });
    }
    let inv_n = 1.0 / corrs.len() as f64;
    let cs = corrs.iter().fold(Point2::default(), |acc, c| acc + c.0) * inv_n;
    let ct = corrs.iter().fold(Point2::default(), |acc, c| acc + c.1) * inv_n;
    let (mut sin_sum, mut cos_sum) = (0.0, 0.0);
    for &(s, t) in corrs {
        let (s, t) = (s - cs, t - ct);
        sin_sum += s.cross(t);
        cos_sum += s.dot(t);
    }
    if sin_sum == 0.0 && cos_sum == 0.0 {
        return Err(Error::DegeneratePair);
    }
    let theta = sin_sum.atan2(cos_sum);
    let t = ct - Se2Transform::rotation(theta).apply(cs);
    Ok(Se2Transform::new(theta, t.x, t.y))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RansacConfig {
    /// Inlier distance threshold in meters.
    pub d: f64,
    /// Stop once this fraction of correspondences are inliers.
    pub r: f64,
    /// Maximum number of iterations.
    pub s: usize,
    pub seed: u64,
    /// Fewer correspondences than this is an immediate failure.
    pub min_correspondences: usize,
    /// Refit the best model on all of its inliers.
    pub refit: bool,
}

impl Default for RansacConfig {
    fn default() -> Self {
        Self {
            d: 0.5,
            r: 0.99,
            s: 40_000,
            seed: 0,
            min_correspondences: 4,
            refit: true,
        }
    }
}

impl RansacConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0) || !(self.r > 0.0 && self.r <= 1.0) || self.s == 0 {
            return Err(Error::InvalidConfig(format!(
                "ransac needs d > 0, 0 < r <= 1 and s >= 1 (got d={}, r={}, s={})",
                self.d, self.r, self.s
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RansacOutcome {
    pub transform: Se2Transform,
    /// Indices of the correspondences consistent with `transform`.
    pub inliers: Vec<usize>,
    pub iterations: usize,
    /// Inlier count of the best sampled model, before any refit.
    pub best_sample_inliers: usize,
}

fn inliers_of(model: &Se2Transform, corrs: &[Correspondence], d2: f64) -> Vec<usize> {
    corrs
        .iter()
        .enumerate()
        .filter(|(_, (s, t))| model.apply(*s).dist2(*t) < d2)
        .map(|(i, _)| i)
        .collect()
}

fn count_inliers(model: &Se2Transform, corrs: &[Correspondence], d2: f64) -> usize {
    let (s, c) = model.theta.sin_cos();
    corrs
        .iter()
        .filter(|(p, q)| {
            let x = c * p.x - s * p.y + model.tx - q.x;
            let y = s * p.x + c * p.y + model.ty - q.y;
            x * x + y * y < d2
        })
        .count()
}

/// Robust rigid alignment mapping each correspondence's source onto its
/// target.
///
/// Each iteration solves the transform from two distinct random
/// correspondences and keeps the model with the most inliers. When `s` is at
/// least the number of distinct pairs, pairs are drawn without repetition.
/// The search stops after `s` iterations or once the inlier fraction
/// reaches `r`. The best model needs at least two inliers besides its own
/// sample.
pub fn ransac_se2(corrs: &[Correspondence], cfg: &RansacConfig) -> Result<RansacOutcome> {
    cfg.validate()?;
    let need = cfg.min_correspondences.max(2);
    if corrs.len() < need {
        return Err(Error::NotEnoughCorrespondences { have: corrs.len(), need });
    }
    let d2 = cfg.d * cfg.d;
    let n = corrs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<(Se2Transform, usize)> = None;
    let mut iterations = 0;
    let mut consider = |i: usize, j: usize, iterations: &mut usize| -> Option<bool> {
        // Coincident sources do not use up an iteration.
        let model = solve_rigid_2pt(corrs[i], corrs[j]).ok()?;
        *iterations += 1;
        let count = count_inliers(&model, corrs, d2);
        if best.is_none_or(|(_, b)| count > b) {
            best = Some((model, count));
        }
        Some(count as f64 >= cfg.r * n as f64)
    };
    if n * (n - 1) / 2 <= cfg.s {
        // The budget covers every pair: visit each once, in random order.
        let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        pairs.shuffle(&mut rng);
        for (i, j) in pairs {
            if consider(i, j, &mut iterations) == Some(true) {
                break;
            }
        }
    } else {
        let mut attempts = 0;
        while iterations < cfg.s && attempts < 2 * cfg.s {
            attempts += 1;
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            if consider(i, j, &mut iterations) == Some(true) {
                break;
            }
        }
    }

    let (model, count) = best.ok_or(Error::NoConsensus)?;
    if count < 4 {
        return Err(Error::NoConsensus);
    }
    let mut transform = model;
    let mut inliers = inliers_of(&model, corrs, d2);
    if cfg.refit {
        let subset: Vec<Correspondence> = inliers.iter().map(|&k| corrs[k]).collect();
        if let Ok(refined) = fit_rigid(&subset) {
            let refined_inliers = inliers_of(&refined, corrs, d2);
            if refined_inliers.len() >= inliers.len() {
                transform = refined;
                inliers = refined_inliers;
            }
        }
    }
    Ok(RansacOutcome {
        transform,
        inliers,
        iterations,
        best_sample_inliers: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn two_point_quarter_turn() {
        let t = solve_rigid_2pt(
            (Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)),
            (Point2::new(1.0, 0.0), Point2::new(1.0, 2.0)),
        )
        .unwrap();
        assert!(close(t.theta, PI / 2.0, 1e-15));
        assert!(close(t.tx, 1.0, 1e-15) && close(t.ty, 1.0, 1e-15));
    }

    #[test]
    fn two_point_identity_and_degenerate() {
        let p = Point2::new(2.0, -1.0);
        let q = Point2::new(-3.0, 4.0);
        let t = solve_rigid_2pt((p, p), (q, q)).unwrap();
        assert!(t.theta.abs() < 1e-15 && t.tx.abs() < 1e-15 && t.ty.abs() < 1e-15);
        assert_eq!(solve_rigid_2pt((p, p), (p, q)), Err(Error::DegeneratePair));
    }

    #[test]
    fn wrap_into_half_open_interval() {
        assert_eq!(wrap_angle(PI), PI);
        assert!(close(wrap_angle(-PI), PI, 1e-15));
        assert!(close(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, 1e-15));
        assert!(close(angle_difference(0.1, 2.0 * PI - 0.1), 0.2, 1e-12));
    }

    #[test]
    fn single_correspondence_fails() {
        let c = [(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0))];
        assert!(matches!(
            ransac_se2(&c, &RansacConfig::default()),
            Err(Error::NotEnoughCorrespondences { have: 1, .. })
        ));
    }

    #[test]
    fn noiseless_recovery() {
        let truth = Se2Transform::new(0.7, 3.0, -2.0);
        let corrs: Vec<Correspondence> = (0..100)
            .map(|k| {
                let p = Point2::new((k as f64 * 1.7).sin() * 20.0, (k as f64 * 0.9).cos() * 15.0);
                (p, truth.apply(p))
            })
            .collect();
        let out = ransac_se2(&corrs, &RansacConfig::default()).unwrap();
        assert_eq!(out.inliers.len(), 100);
        assert!(close(out.transform.theta, truth.theta, 1e-9));
        assert!(close(out.transform.tx, truth.tx, 1e-9));
        assert!(close(out.transform.ty, truth.ty, 1e-9));
    }

    #[test]
    fn least_squares_fit_is_exact_without_noise() {
        let truth = Se2Transform::new(-2.5, -1.0, 4.0);
        let corrs: Vec<Correspondence> = (0..5)
            .map(|k| {
                let p = Point2::new(k as f64, (k * k) as f64 * 0.3);
                (p, truth.apply(p))
            })
            .collect();
        let t = fit_rigid(&corrs).unwrap();
        assert!(angle_difference(t.theta, truth.theta) < 1e-12);
        assert!(t.translation().dist(truth.translation()) < 1e-12);
    }

    #[test]
    fn no_consensus_with_three_points() {
        let corrs = [
            (Point2::new(0.0, 0.0), Point2::new(0.0, 0.0)),
            (Point2::new(1.0, 0.0), Point2::new(1.0, 0.0)),
            (Point2::new(0.0, 1.0), Point2::new(0.0, 1.0)),
        ];
        let cfg = RansacConfig {
            min_correspondences: 2,
            ..Default::default()
        };
        assert_eq!(ransac_se2(&corrs, &cfg), Err(Error::NoConsensus));
    }
}
