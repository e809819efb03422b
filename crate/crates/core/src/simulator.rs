//! Synthetic forests, circular trajectories and noisy landmark observations.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::matching::mix_seed;
use crate::registration::Se2Transform;

/// Candidate attempts per active sample in Bridson's algorithm.
pub const BRIDSON_ATTEMPTS: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// Forest width and height in meters.
    pub extent: [f64; 2],
    /// Minimum spacing of the Poisson-disc layout before jitter.
    pub r_min: f64,
    /// Per-axis standard deviation of the jitter applied to the layout.
    pub jitter_sigma: f64,
    pub sensor_radius: f64,
    /// Probability that an in-range landmark is detected.
    pub omega: f64,
    /// Per-axis standard deviation of the measurement noise.
    pub sigma: f64,
    pub laps: usize,
    pub steps_per_lap: usize,
    /// Radius of the circular path, centered in the forest.
    pub circle_radius: f64,
    /// Bounds of the uniform random frame rotation, radians.
    pub rotation_range: [f64; 2],
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::full_scale()
    }
}

impl SimConfig {
    /// 1 km² forest, four laps.
    pub fn full_scale() -> Self {
        Self {
            extent: [1000.0, 1000.0],
            r_min: 7.0,
            jitter_sigma: 3.0,
            sensor_radius: 50.0,
            omega: 1.0,
            sigma: 0.0,
            laps: 4,
            steps_per_lap: 36,
            circle_radius: 300.0,
            rotation_range: [0.0, PI / 2.0],
            seed: 0,
        }
    }

    /// 400 m × 400 m forest, two laps.
    pub fn desk_scale() -> Self {
        Self {
            extent: [400.0, 400.0],
            laps: 2,
            circle_radius: 120.0,
            ..Self::full_scale()
        }
    }

    pub fn center(&self) -> Point2 {
        Point2::new(self.extent[0] / 2.0, self.extent[1] / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.r_min > 0.0) || self.extent.iter().any(|&e| !(e > 2.0 * self.r_min)) {
            return bad(format!("extent {:?} must exceed twice r_min {}", self.extent, self.r_min));
        }
        if !(self.jitter_sigma >= 0.0) || !(self.sigma >= 0.0) {
            return bad("noise standard deviations must be non-negative".into());
        }
        if !(0.0..=1.0).contains(&self.omega) {
            return bad(format!("omega must lie in [0, 1], got {}", self.omega));
        }
        if !(self.sensor_radius > 0.0) || !(self.circle_radius > 0.0) {
            return bad("sensor and circle radii must be positive".into());
        }
        if self.laps == 0 || self.steps_per_lap == 0 {
            return bad("laps and steps_per_lap must be at least 1".into());
        }
        if !(self.rotation_range[0] <= self.rotation_range[1]) {
            return bad(format!("empty rotation range {:?}", self.rotation_range));
        }
        let reach = self.circle_radius + self.sensor_radius;
        let c = self.center();
        if reach > c.x || reach > c.y {
            return bad(format!(
                "circle of radius {} plus sensor margin {} does not fit in {:?}",
                self.circle_radius, self.sensor_radius, self.extent
            ));
        }
        Ok(())
    }
}

/// Uniform bucket grid over a point set for radius queries.
#[derive(Clone, Debug)]
pub struct PointGrid {
    origin: Point2,
    cell: f64,
    cols: usize,
    rows: usize,
    starts: Vec<usize>,
    items: Vec<usize>,
}

impl PointGrid {
    pub fn new(points: &[Point2], cell: f64) -> Self {
        assert!(cell > 0.0);
        let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in points {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if points.is_empty() {
            lo = Point2::default();
            hi = Point2::default();
        }
        let cols = ((hi.x - lo.x) / cell).floor() as usize + 1;
        let rows = ((hi.y - lo.y) / cell).floor() as usize + 1;
        let mut grid = Self {
            origin: lo,
            cell,
            cols,
            rows,
            starts: vec![0; cols * rows + 1],
            items: vec![0; points.len()],
        };
        let ids: Vec<usize> = points.iter().map(|&p| grid.cell_of(p)).collect();
        for &c in &ids {
            grid.starts[c + 1] += 1;
        }
        for k in 0..cols * rows {
            grid.starts[k + 1] += grid.starts[k];
        }
        let mut fill = grid.starts.clone();
        for (i, &c) in ids.iter().enumerate() {
            grid.items[fill[c]] = i;
            fill[c] += 1;
        }
        grid
    }

    fn coords(&self, p: Point2) -> (i64, i64) {
        (
            ((p.x - self.origin.x) / self.cell).floor() as i64,
            ((p.y - self.origin.y) / self.cell).floor() as i64,
        )
    }

    fn cell_of(&self, p: Point2) -> usize {
        let (cx, cy) = self.coords(p);
        let cx = cx.clamp(0, self.cols as i64 - 1) as usize;
        let cy = cy.clamp(0, self.rows as i64 - 1) as usize;
        cy * self.cols + cx
    }

    /// Indices of points within `radius` of `center` (inclusive), ascending.
    pub fn within(&self, points: &[Point2], center: Point2, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit_within(points, center, radius, |i| out.push(i));
        out.sort_unstable();
        out
    }

    /// Calls `f` for every point within `radius` of `center`, in no
    /// particular order.
    pub fn visit_within(&self, points: &[Point2], center: Point2, radius: f64, mut f: impl FnMut(usize)) {
        let r2 = radius * radius;
        let (x0, y0) = self.coords(center - Point2::new(radius, radius));
        let (x1, y1) = self.coords(center + Point2::new(radius, radius));
        let (x0, x1) = (x0.max(0), x1.min(self.cols as i64 - 1));
        let (y0, y1) = (y0.max(0), y1.min(self.rows as i64 - 1));
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                let c = cy as usize * self.cols + cx as usize;
                for &i in &self.items[self.starts[c]..self.starts[c + 1]] {
                    if points[i].dist2(center) <= r2 {
                        f(i);
                    }
                }
            }
        }
    }
}

/// Maximal Poisson-disc sample of `[0, w] × [0, h]` with spacing `r_min`.
pub fn bridson_poisson_disc(extent: [f64; 2], r_min: f64, seed: u64) -> Vec<Point2> {
    let [w, h] = extent;
    let cell = r_min / 2f64.sqrt();
    let cols = (w / cell).ceil() as usize;
    let rows = (h / cell).ceil() as usize;
    let mut grid: Vec<Option<usize>> = vec![None; cols * rows];
    let cell_of = |p: Point2| {
        let cx = ((p.x / cell) as usize).min(cols - 1);
        let cy = ((p.y / cell) as usize).min(rows - 1);
        (cx, cy)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    let mut active = Vec::new();

    let first = Point2::new(rng.random_range(0.0..w), rng.random_range(0.0..h));
    let (cx, cy) = cell_of(first);
    grid[cy * cols + cx] = Some(0);
    points.push(first);
    active.push(0);

    let r2 = r_min * r_min;
    while !active.is_empty() {
        let slot = rng.random_range(0..active.len());
        let base = points[active[slot]];
        let mut placed = false;
        for _ in 0..BRIDSON_ATTEMPTS {
            // Uniform over the annulus [r, 2r] by area.
            let rho = rng.random_range(r2..4.0 * r2).sqrt();
            let angle = rng.random_range(0.0..2.0 * PI);
            let cand = base + Point2::new(rho * angle.cos(), rho * angle.sin());
            if !(cand.x >= 0.0 && cand.x < w && cand.y >= 0.0 && cand.y < h) {
                continue;
            }
            let (cx, cy) = cell_of(cand);
            let clear = (cy.saturating_sub(2)..(cy + 3).min(rows)).all(|y| {
                (cx.saturating_sub(2)..(cx + 3).min(cols))
                    .all(|x| grid[y * cols + x].is_none_or(|k| points[k].dist2(cand) >= r2))
            });
            if clear {
                grid[cy * cols + cx] = Some(points.len());
                active.push(points.len());
                points.push(cand);
                placed = true;
                break;
            }
        }
        if !placed {
            active.swap_remove(slot);
        }
    }
    points
}

/// Landmarks of a simulated forest; a landmark's id is its index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestMap {
    pub landmarks: Vec<Point2>,
    pub extent: [f64; 2],
}

impl ForestMap {
    pub fn len(&self) -> usize {
        self.landmarks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landmarks.is_empty()
    }

    pub fn grid(&self, cell: f64) -> PointGrid {
        PointGrid::new(&self.landmarks, cell)
    }

    pub fn mean_nearest_neighbor_distance(&self) -> f64 {
        mean_nearest_neighbor_distance(&self.landmarks)
    }
}

/// Mean over all points of the distance to the closest other point.
pub fn mean_nearest_neighbor_distance(points: &[Point2]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let spacing = {
        let (mut lo, mut hi) = (points[0], points[0]);
        for p in points {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (((hi.x - lo.x) * (hi.y - lo.y)) / points.len() as f64).sqrt().max(1e-9)
    };
    let grid = PointGrid::new(points, spacing);
    let total: f64 = points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut radius = spacing;
            loop {
                let mut best = f64::INFINITY;
                grid.visit_within(points, p, radius, |j| {
                    if j != i {
                        best = best.min(points[j].dist2(p));
                    }
                });
                if best.is_finite() {
                    break best.sqrt();
                }
                radius *= 2.0;
            }
        })
        .sum();
    total / points.len() as f64
}

/// Bridson layout perturbed by Gaussian jitter.
pub fn generate_forest(cfg: &SimConfig) -> ForestMap {
    let layout = bridson_poisson_disc(cfg.extent, cfg.r_min, mix_seed(cfg.seed, 0xF0_2E57));
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, 0x717_7E2));
    let landmarks = layout
        .into_iter()
        .map(|p| {
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            p + Point2::new(z1, z2) * cfg.jitter_sigma
        })
        .collect();
    ForestMap {
        landmarks,
        extent: cfg.extent,
    }
}

/// Poses evenly spaced on a counter-clockwise circle, heading along the
/// tangent, repeated for every lap.
pub fn circular_trajectory(center: Point2, radius: f64, laps: usize, steps_per_lap: usize) -> Vec<Se2Transform> {
    (0..laps * steps_per_lap)
        .map(|k| {
            let a = 2.0 * PI * (k % steps_per_lap) as f64 / steps_per_lap as f64;
            Se2Transform::new(a + PI / 2.0, center.x + radius * a.cos(), center.y + radius * a.sin())
        })
        .collect()
}

/// The trajectory described by `cfg`.
pub fn trajectory(cfg: &SimConfig) -> Result<Vec<Se2Transform>> {
    cfg.validate()?;
    Ok(circular_trajectory(cfg.center(), cfg.circle_radius, cfg.laps, cfg.steps_per_lap))
}

/// Landmarks seen from one pose, in a randomly rotated robot frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub time_index: usize,
    pub true_pose: Se2Transform,
    /// Extra rotation of the observation frame, radians.
    pub applied_rotation: f64,
    pub points: Vec<Point2>,
    /// Map id of each point, parallel to `points`.
    pub landmark_ids: Vec<usize>,
}

impl Observation {
    /// Maps observation coordinates to map coordinates.
    pub fn frame_pose(&self) -> Se2Transform {
        frame_pose(&self.true_pose, self.applied_rotation)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Map-from-observation transform for a pose and frame rotation.
pub fn frame_pose(true_pose: &Se2Transform, applied_rotation: f64) -> Se2Transform {
    true_pose.compose(&Se2Transform::rotation(-applied_rotation))
}

/// Noisy detection of every landmark within sensor range of any of
/// `centers`, expressed in the frame of `pose` rotated by a random angle.
///
/// Every in-range landmark draws its detection and noise variates whether
/// or not it is kept, so runs with the same seed but different `omega` or
/// `sigma` share their randomness.
pub fn observe_region(
    map: &ForestMap,
    grid: &PointGrid,
    pose: &Se2Transform,
    centers: &[Point2],
    cfg: &SimConfig,
    seed: u64,
) -> Observation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [lo, hi] = cfg.rotation_range;
    let applied_rotation = if hi > lo { rng.random_range(lo..=hi) } else { lo };
    let to_obs = frame_pose(pose, applied_rotation).inverse();

    let mut ids: Vec<usize> = centers
        .iter()
        .flat_map(|&c| grid.within(&map.landmarks, c, cfg.sensor_radius))
        .collect();
    ids.sort_unstable();
    ids.dedup();

    let mut points = Vec::with_capacity(ids.len());
    let mut landmark_ids = Vec::with_capacity(ids.len());
    for id in ids {
        let u: f64 = rng.random();
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        if u < cfg.omega {
            points.push(to_obs.apply(map.landmarks[id]) + Point2::new(z1, z2) * cfg.sigma);
            landmark_ids.push(id);
        }
    }
    Observation {
        time_index: 0,
        true_pose: *pose,
        applied_rotation,
        points,
        landmark_ids,
    }
}

/// One observation from `pose`.
pub fn observe(map: &ForestMap, grid: &PointGrid, pose: &Se2Transform, cfg: &SimConfig, seed: u64) -> Observation {
    observe_region(map, grid, pose, &[pose.translation()], cfg, seed)
}

/// Grid cell used for range queries against a forest.
pub fn query_cell(cfg: &SimConfig) -> f64 {
    cfg.sensor_radius / 2.0
}

/// Seed of observation `k` of a run.
pub fn observation_seed(cfg: &SimConfig, k: usize) -> u64 {
    mix_seed(mix_seed(cfg.seed, 0x0B5E_12E5), k as u64)
}

/// A forest, its trajectory and one observation per pose.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub config: SimConfig,
    pub map: ForestMap,
    pub poses: Vec<Se2Transform>,
    pub observations: Vec<Observation>,
}

impl Simulation {
    pub fn run(cfg: &SimConfig) -> Result<Self> {
        let map = generate_forest(cfg);
        Self::with_map(cfg, map)
    }

    /// Observes an existing forest; the forest is shared across noise
    /// settings of a sweep.
    pub fn with_map(cfg: &SimConfig, map: ForestMap) -> Result<Self> {
        let poses = trajectory(cfg)?;
        let grid = map.grid(query_cell(cfg));
        let observations = poses
            .iter()
            .enumerate()
            .map(|(k, pose)| Observation {
                time_index: k,
                ..observe(&map, &grid, pose, cfg, observation_seed(cfg, k))
            })
            .collect();
        Ok(Self {
            config: cfg.clone(),
            map,
            poses,
            observations,
        })
    }
}

/// Sub-maps over sliding windows of consecutive poses.
///
/// Window `w` covers poses `w * stride .. w * stride + window` and is
/// expressed in the frame of its first pose. Windows stop at the end of the
/// trajectory.
pub fn window_submaps(
    map: &ForestMap,
    poses: &[Se2Transform],
    window: usize,
    stride: usize,
    cfg: &SimConfig,
    seed: u64,
) -> Result<Vec<Observation>> {
    if window == 0 || stride == 0 {
        return Err(Error::InvalidConfig("window and stride must be at least 1".into()));
    }
    let grid = map.grid(query_cell(cfg));
    let mut out = Vec::new();
    let mut start = 0;
    while start + window <= poses.len() {
        let span = &poses[start..start + window];
        let centers: Vec<Point2> = span.iter().map(|p| p.translation()).collect();
        let mut sub = observe_region(map, &grid, &span[0], &centers, cfg, mix_seed(seed, out.len() as u64));
        sub.time_index = start;
        out.push(sub);
        start += stride;
    }
    Ok(out)
}
