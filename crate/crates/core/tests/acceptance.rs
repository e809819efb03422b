//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! The process exits non-zero on a failed criterion only when
//! `ACCEPTANCE_STRICT` is set; otherwise failures are reported and the run
//! succeeds so the rest of the workspace tests still execute.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use urquhart_core::descriptor::{describe, descriptor_distance, DescriptorConfig};
use urquhart_core::evaluation::{
    benchmark_timings, merge_submaps, run_loop_closure_experiment, ExperimentConfig, ExperimentReport, MergeConfig,
};
use urquhart_core::geometry::{delaunay_triangulate, Point2};
use urquhart_core::matching::MatchConfig;
use urquhart_core::registration::{angle_difference, ransac_se2, RansacConfig, Se2Transform};
use urquhart_core::simulator::{generate_forest, trajectory, window_submaps, SimConfig, Simulation};
use urquhart_core::urquhart::build_urquhart;

struct Suite {
    failed: Vec<String>,
}

impl Suite {
    fn record(&mut self, id: &str, pass: bool, detail: String) {
        println!("{} {id}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(id.to_string());
        }
    }
}

fn grid(match_cfg: &MatchConfig) -> (ExperimentReport, f64) {
    let start = Instant::now();
    let report = run_loop_closure_experiment(
        &SimConfig::desk_scale(),
        &ExperimentConfig::default(),
        &DescriptorConfig::default(),
        match_cfg,
        &RansacConfig::default(),
    )
    .expect("experiment runs");
    (report, start.elapsed().as_secs_f64())
}

fn grid_mean(report: &ExperimentReport) -> f64 {
    report.cells.iter().map(|c| c.f1).sum::<f64>() / report.cells.len() as f64
}

fn format_grid(report: &ExperimentReport) -> String {
    let mut s = format!("sigma\\omega {:?}", report.omegas);
    for (sigma, row) in report.sigmas.iter().zip(report.f1_grid()) {
        let cells: Vec<String> = row.iter().map(|f| format!("{f:.3}")).collect();
        s += &format!("\n      {sigma:.1}: {}", cells.join(" "));
    }
    s
}

fn table_reproduction(suite: &mut Suite, report: &ExperimentReport, seconds: f64) {
    let f1 = |o: f64, s: f64| report.cell(o, s).expect("cell present").f1;
    let checks = [
        (1.0, 0.0, f1(1.0, 0.0) >= 0.98, ">= 0.98"),
        (1.0, 0.1, f1(1.0, 0.1) >= 0.95, ">= 0.95"),
        (1.0, 0.3, f1(1.0, 0.3) >= 0.85, ">= 0.85"),
        (0.8, 0.4, f1(0.8, 0.4) <= 0.15, "<= 0.15"),
    ];
    for (o, s, pass, bound) in checks {
        suite.record(&format!("C1 F1(sigma={s}, omega={o})"), pass, format!("{:.3} {bound}", f1(o, s)));
    }
    suite.record("C1 runtime", seconds < 600.0, format!("{seconds:.1} s for the 4x5 grid at 5 seeds"));
    println!("      {}", format_grid(report));
}

fn trends(suite: &mut Suite, report: &ExperimentReport) {
    let g = report.f1_grid();
    let mut worst: f64 = 0.0;
    for (si, row) in g.iter().enumerate() {
        for (oi, &f) in row.iter().enumerate() {
            if si + 1 < g.len() {
                worst = worst.max(g[si + 1][oi] - f);
            }
            if oi + 1 < row.len() {
                worst = worst.max(f - row[oi + 1]);
            }
        }
    }
    suite.record("C2 monotone trends", worst <= 0.05, format!("largest increase against the trend {worst:.3} (<= 0.05)"));
}

fn tau_sweep(suite: &mut Suite, default_grid: &ExperimentReport) {
    let taus = [1.0, 2.0, 5.0, 10.0, 20.0];
    let default_tau = MatchConfig::default().tau;
    let means: Vec<f64> = taus
        .iter()
        .map(|&tau| {
            if tau == default_tau {
                grid_mean(default_grid)
            } else {
                grid_mean(&grid(&MatchConfig { tau, ..MatchConfig::default() }).0)
            }
        })
        .collect();
    let peak = (0..means.len()).fold(0, |b, k| if means[k] > means[b] { k } else { b });
    let chosen = taus.iter().position(|&t| t == default_tau).expect("default tau in sweep");
    let interior = peak > 0 && peak + 1 < taus.len();
    let pass = interior && peak.abs_diff(chosen) <= 1;
    let curve: Vec<String> = taus.iter().zip(&means).map(|(t, f)| format!("{t}:{f:.3}")).collect();
    suite.record(
        "C3 tau sweep peak",
        pass,
        format!("grid-mean F1 {} (peak at tau={}, default {default_tau})", curve.join(" "), taus[peak]),
    );
}

fn gamma_cap(suite: &mut Suite, default_grid: &ExperimentReport) {
    let capped = grid_mean(&grid(&MatchConfig { gamma: Some(10), ..MatchConfig::default() }).0);
    let full = grid_mean(default_grid);
    suite.record("C4 gamma cap", capped < full, format!("grid-mean F1 {capped:.3} at gamma=10 vs {full:.3} unlimited"));
}

fn geometry(suite: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut errors = Vec::new();
    for _ in 0..1000 {
        let n = rng.random_range(10..=200);
        let pts = common::random_points(&mut rng, n, 100.0);
        match delaunay_triangulate(&pts) {
            Ok(tri) => {
                if let Err(e) = common::check_triangulation(&pts, &tri) {
                    errors.push(e);
                }
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    suite.record("C5 Delaunay oracles", errors.is_empty(), format!("1000 sets, {} failures {:?}", errors.len(), errors.first()));

    let mut mismatches = 0;
    let mut polygons = 0;
    for _ in 0..200 {
        let n = rng.random_range(6..=30);
        let pts = common::random_points(&mut rng, n, 50.0);
        let tri = delaunay_triangulate(&pts).expect("triangulation");
        let (_, h) = build_urquhart(&tri);
        let got: BTreeSet<Vec<(usize, usize)>> = h.h2.iter().map(common::edge_set).collect();
        polygons += got.len();
        if got != common::urquhart_polygons_oracle(&pts, &tri) {
            mismatches += 1;
        }
    }
    suite.record(
        "C5 Urquhart faces",
        mismatches == 0,
        format!("200 sets, {polygons} polygons, {mismatches} mismatching sets"),
    );
}

fn descriptors(suite: &mut Suite) {
    let cfg = DescriptorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = [0.0f64; 3];
    for _ in 0..1000 {
        let n = rng.random_range(3..=15);
        let ring = common::random_star_polygon(&mut rng, n, 2.0, 8.0);
        let base = describe(&ring, &cfg).expect("descriptor");
        let t = Se2Transform::new(rng.random_range(-PI..PI), rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0));
        let moved: Vec<Point2> = ring.iter().map(|&p| t.apply(p)).collect();
        let mut shifted = ring.clone();
        shifted.rotate_left(rng.random_range(0..n));
        let mut reversed = ring.clone();
        reversed.reverse();
        for (k, variant) in [moved, shifted, reversed].iter().enumerate() {
            let d = descriptor_distance(&base, &describe(variant, &cfg).expect("descriptor")).expect("same length");
            worst[k] = worst[k].max(d);
        }
    }
    for (name, w) in ["rigid motion", "circular shift", "reversal"].iter().zip(worst) {
        suite.record(&format!("C6 {name} invariance"), w < 1e-9, format!("max distance {w:.2e} over 1000 polygons"));
    }

    let noise = Normal::new(0.0, 0.1).expect("valid std");
    let tau = MatchConfig::default().tau;
    let trials = 1000;
    let mut under = 0;
    for _ in 0..trials {
        let n = rng.random_range(4..=10);
        let ring = common::random_star_polygon(&mut rng, n, 4.0, 6.0);
        let noisy: Vec<Point2> = ring
            .iter()
            .map(|&p| p + Point2::new(noise.sample(&mut rng), noise.sample(&mut rng)))
            .collect();
        let d = descriptor_distance(&describe(&ring, &cfg).expect("descriptor"), &describe(&noisy, &cfg).expect("descriptor"))
            .expect("same length");
        if d < tau {
            under += 1;
        }
    }
    let rate = under as f64 / trials as f64;
    suite.record("C6 noisy self-match", rate >= 0.95, format!("{:.1}% under tau={tau} at sigma=0.1", rate * 100.0));
}

fn registration(suite: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = RansacConfig::default();
    let mut worst_exact: f64 = 0.0;
    for seed in 0..20 {
        let truth = Se2Transform::new(rng.random_range(-PI..PI), rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let corrs: Vec<(Point2, Point2)> = common::random_points(&mut rng, 30, 60.0)
            .into_iter()
            .map(|p| (p, truth.apply(p)))
            .collect();
        let out = ransac_se2(&corrs, &RansacConfig { seed, ..cfg }).expect("noiseless consensus");
        for &(s, t) in &corrs {
            worst_exact = worst_exact.max(out.transform.apply(s).dist(t));
        }
    }
    suite.record("C7 noiseless recovery", worst_exact < 1e-9, format!("max residual {worst_exact:.2e} m"));

    let noise = Normal::new(0.0, 0.05).expect("valid std");
    let (mut worst_t, mut worst_r): (f64, f64) = (0.0, 0.0);
    let mut failures = 0;
    for seed in 0..20 {
        let truth = Se2Transform::new(rng.random_range(-PI..PI), rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let corrs: Vec<(Point2, Point2)> = common::random_points(&mut rng, 100, 60.0)
            .into_iter()
            .enumerate()
            .map(|(k, p)| {
                let target = if k % 10 < 3 {
                    Point2::new(rng.random_range(-80.0..80.0), rng.random_range(-80.0..80.0))
                } else {
                    truth.apply(p) + Point2::new(noise.sample(&mut rng), noise.sample(&mut rng))
                };
                (p, target)
            })
            .collect();
        match ransac_se2(&corrs, &RansacConfig { seed, ..cfg }) {
            Ok(out) => {
                worst_t = worst_t.max(out.transform.translation().dist(truth.translation()));
                worst_r = worst_r.max(angle_difference(out.transform.theta, truth.theta).abs());
            }
            Err(_) => failures += 1,
        }
    }
    suite.record(
        "C7 30% outliers",
        failures == 0 && worst_t <= 0.3 && worst_r.to_degrees() <= 1.0,
        format!("20 seeds, {failures} failures, max error {worst_t:.3} m / {:.3} deg", worst_r.to_degrees()),
    );

    let mut worst_law: f64 = 0.0;
    for _ in 0..1000 {
        let mut t = || Se2Transform::new(rng.random_range(-PI..PI), rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0));
        let (a, b) = (t(), t());
        let p = Point2::new(rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0));
        worst_law = worst_law
            .max(a.compose(&b).apply(p).dist(a.apply(b.apply(p))))
            .max(a.inverse().apply(a.apply(p)).dist(p))
            .max(Se2Transform::identity().apply(p).dist(p));
    }
    suite.record("C7 group laws", worst_law < 1e-12, format!("max deviation {worst_law:.2e}"));
}

fn merging(suite: &mut Suite) {
    let cfg = SimConfig { sigma: 0.1, laps: 1, ..SimConfig::desk_scale() };
    let map = generate_forest(&cfg);
    let poses = trajectory(&cfg).expect("trajectory");
    let subs = window_submaps(&map, &poses, 6, 3, &cfg, 7).expect("sub-maps");
    let points: Vec<Vec<Point2>> = subs.iter().map(|s| s.points.clone()).collect();
    let out = merge_submaps(
        &points,
        &DescriptorConfig::default(),
        &MatchConfig::default(),
        &RansacConfig::default(),
        &MergeConfig::default(),
    )
    .expect("merge runs");

    let mut copies: HashMap<usize, Vec<Point2>> = HashMap::new();
    for (s, (sub, t)) in subs.iter().zip(&out.map.transforms).enumerate() {
        let Some(t) = t else { continue };
        for (p, &id) in points[s].iter().zip(&sub.landmark_ids) {
            copies.entry(id).or_default().push(t.apply(*p));
        }
    }
    let (mut total, mut pairs) = (0.0, 0usize);
    for c in copies.values() {
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                total += c[i].dist(c[j]);
                pairs += 1;
            }
        }
    }
    let mean = total / pairs.max(1) as f64;
    suite.record(
        "C8 merge succeeds",
        out.failures.is_empty(),
        format!("{} sub-maps, failures {:?}, {} merged landmarks", subs.len(), out.failures, out.map.landmarks.len()),
    );
    suite.record(
        "C8 duplicate distance",
        pairs > 0 && mean <= 0.3,
        format!("mean {mean:.3} m over {pairs} duplicate pairs (<= 0.3)"),
    );
}

fn performance(suite: &mut Suite) {
    let cfg = SimConfig { laps: 1, ..SimConfig::desk_scale() };
    let sim = Simulation::run(&cfg).expect("simulation");
    let observations: Vec<Vec<Point2>> = sim
        .observations
        .iter()
        .filter(|o| o.len() >= 80)
        .map(|o| {
            let mut pts = o.points.clone();
            pts.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
            pts.truncate(80);
            pts
        })
        .collect();
    let timings = benchmark_timings(&observations, &DescriptorConfig::default(), &MatchConfig::default()).expect("timings");
    let median = timings.descriptor_median_ms();
    suite.record(
        "C9 descriptor build time",
        median <= 16.0,
        format!("median {median:.3} ms over {} observations of 80 landmarks", observations.len()),
    );
    let bounded = timings.comparisons.iter().all(|&(c, ga, gb)| c <= ga * gb);
    suite.record("C9 comparison budget", bounded, format!("{} pairs checked against g_i*g_j", timings.comparisons.len()));
}

fn forest_spacing(suite: &mut Suite) {
    let nn = generate_forest(&SimConfig::full_scale()).mean_nearest_neighbor_distance();
    suite.record("S1 forest nearest-neighbour distance", (3.0..=3.8).contains(&nn), format!("{nn:.2} m, band [3.0, 3.8]"));
}

fn main() {
    let mut suite = Suite { failed: Vec::new() };
    let (default_grid, seconds) = grid(&MatchConfig::default());
    table_reproduction(&mut suite, &default_grid, seconds);
    trends(&mut suite, &default_grid);
    tau_sweep(&mut suite, &default_grid);
    gamma_cap(&mut suite, &default_grid);
    geometry(&mut suite);
    descriptors(&mut suite);
    registration(&mut suite);
    merging(&mut suite);
    performance(&mut suite);
    forest_spacing(&mut suite);

    if suite.failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: {} failed: {}", suite.failed.len(), suite.failed.join(", "));
        if std::env::var_os("ACCEPTANCE_STRICT").is_some() {
            std::process::exit(1);
        }
    }
}
