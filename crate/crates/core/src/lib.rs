//! Place recognition for sets of indistinguishable planar landmarks.
//!
//! Landmarks are triangulated, the triangulation is coarsened into an
//! Urquhart tessellation, and every resulting polygon gets a rotation and
//! start-point invariant shape descriptor. Two observations are matched
//! polygon to polygon, then triangle to triangle, and finally landmark to
//! landmark, after which a rigid transform is estimated with RANSAC.

// Negated comparisons also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod descriptor;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod matching;
pub mod registration;
pub mod simulator;
pub mod urquhart;

pub use descriptor::{describe, descriptor_distance, DescriptorConfig, DftScaling, PolygonDescriptor};
pub use error::{Error, Result};
pub use geometry::{delaunay_triangulate, Edge, Point2, Triangle, Triangulation};
pub use matching::{match_observations, CorrespondenceSet, MatchConfig, ObservationFeatures};
pub use registration::{ransac_se2, RansacConfig, RansacOutcome, Se2Transform};
pub use urquhart::{build_urquhart, Cycle, Hierarchy, UrquhartGraph};
pub use simulator::{generate_forest, observe, ForestMap, Observation, SimConfig, Simulation};
pub use evaluation::{classify_match, dbscan, merge_submaps, run_loop_closure_experiment, ExperimentConfig, ExperimentReport, Label, MergedMap, PrPoint};
