use std::f64::consts::PI;

use urquhart_core::geometry::Point2;
use urquhart_core::registration::Se2Transform;
use urquhart_core::simulator::{
    bridson_poisson_disc, generate_forest, observe, query_cell, ForestMap, SimConfig, Simulation,
};

fn disc_map(n: usize, radius: f64) -> ForestMap {
    // Sunflower layout: n distinct points inside the disc.
    let golden = PI * (3.0 - 5f64.sqrt());
    let landmarks = (0..n)
        .map(|k| {
            let r = radius * ((k as f64 + 0.5) / n as f64).sqrt();
            let a = k as f64 * golden;
            Point2::new(100.0 + r * a.cos(), 100.0 + r * a.sin())
        })
        .collect();
    ForestMap { landmarks, extent: [200.0, 200.0] }
}

#[test]
fn full_scale_forest_size_band() {
    let pts = bridson_poisson_disc([1000.0, 1000.0], 7.0, 0);
    assert!((12_000..=18_000).contains(&pts.len()), "{} points", pts.len());
}

#[test]
fn unjittered_forest_keeps_minimum_spacing() {
    let cfg = SimConfig { jitter_sigma: 0.0, ..SimConfig::desk_scale() };
    assert!(generate_forest(&cfg).mean_nearest_neighbor_distance() >= 7.0);
}

#[test]
fn seeds_change_layout_but_not_guarantees() {
    let a = bridson_poisson_disc([100.0, 100.0], 7.0, 1);
    let b = bridson_poisson_disc([100.0, 100.0], 7.0, 2);
    assert_ne!(a, b);
    for pts in [&a, &b] {
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                assert!(pts[i].dist(pts[j]) >= 7.0);
            }
        }
    }
}

#[test]
fn simulation_is_deterministic() {
    let cfg = SimConfig { sigma: 0.2, omega: 0.9, laps: 1, ..SimConfig::desk_scale() };
    let a = Simulation::run(&cfg).unwrap();
    let b = Simulation::run(&cfg).unwrap();
    assert_eq!(a.map, b.map);
    assert_eq!(a.observations, b.observations);
    let c = Simulation::run(&SimConfig { seed: 1, ..cfg }).unwrap();
    assert_ne!(a.map, c.map);
}

#[test]
fn full_scale_observation_size_band() {
    let cfg = SimConfig { laps: 1, ..SimConfig::full_scale() };
    let sim = Simulation::run(&cfg).unwrap();
    let mut sizes: Vec<usize> = sim.observations.iter().map(|o| o.len()).collect();
    sizes.sort_unstable();
    let median = sizes[sizes.len() / 2];
    assert!((60..=100).contains(&median), "median observation size {median}");
}

#[test]
fn detection_dropout_is_binomial() {
    let map = disc_map(100, 40.0);
    let cfg = SimConfig { omega: 0.9, sigma: 0.0, ..SimConfig::desk_scale() };
    let grid = map.grid(query_cell(&cfg));
    let pose = Se2Transform::new(0.0, 100.0, 100.0);
    let trials = 10_000;
    let mut kept = vec![0usize; map.len()];
    for t in 0..trials {
        for &id in &observe(&map, &grid, &pose, &cfg, t).landmark_ids {
            kept[id] += 1;
        }
    }
    let p = cfg.omega;
    let sd = (trials as f64 * p * (1.0 - p)).sqrt();
    let mean = kept.iter().sum::<usize>() as f64 / kept.len() as f64;
    assert!((mean - trials as f64 * p).abs() <= 3.0 * sd, "mean kept count {mean}");
}

#[test]
fn position_noise_matches_configured_sigma() {
    let map = disc_map(100, 40.0);
    let clean = SimConfig { omega: 1.0, sigma: 0.0, ..SimConfig::desk_scale() };
    let noisy = SimConfig { sigma: 0.25, ..clean.clone() };
    let grid = map.grid(query_cell(&clean));
    let mut residuals = [Vec::new(), Vec::new()];
    for t in 0..200 {
        let pose = Se2Transform::new(t as f64 * 0.1, 100.0, 100.0);
        let a = observe(&map, &grid, &pose, &clean, t);
        let b = observe(&map, &grid, &pose, &noisy, t);
        assert_eq!(a.landmark_ids, b.landmark_ids);
        for (p, q) in a.points.iter().zip(&b.points) {
            residuals[0].push(q.x - p.x);
            residuals[1].push(q.y - p.y);
        }
    }
    for axis in residuals {
        let n = axis.len() as f64;
        let mean = axis.iter().sum::<f64>() / n;
        let sd = (axis.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((sd / noisy.sigma - 1.0).abs() < 0.05, "per-axis std {sd}");
    }
}

#[test]
fn noiseless_full_detection_is_rigid() {
    let cfg = SimConfig { omega: 1.0, sigma: 0.0, ..SimConfig::desk_scale() };
    let map = generate_forest(&cfg);
    let grid = map.grid(query_cell(&cfg));
    let pose = Se2Transform::new(1.0, 200.0, 180.0);
    let obs = observe(&map, &grid, &pose, &cfg, 9);
    let expected = grid.within(&map.landmarks, pose.translation(), cfg.sensor_radius);
    assert_eq!(obs.landmark_ids, expected);
    let to_obs = obs.frame_pose().inverse();
    for (p, &id) in obs.points.iter().zip(&obs.landmark_ids) {
        assert!(p.dist(to_obs.apply(map.landmarks[id])) < 1e-9);
    }
}
