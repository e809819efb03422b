//! Shared inputs for the benchmarks.

use urquhart_core::simulator::Simulation;
use urquhart_core::{Point2, SimConfig};

/// Observations of a noiseless desk-scale run, each cut to the `n` points
/// closest to the sensor.
pub fn observations(n: usize) -> Vec<Vec<Point2>> {
    let sim = Simulation::run(&SimConfig::desk_scale()).expect("default config is valid");
    sim.observations
        .into_iter()
        .filter(|o| o.len() >= n)
        .map(|o| {
            let mut pts = o.points;
            pts.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
            pts.truncate(n);
            pts
        })
        .collect()
}
