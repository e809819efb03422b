//! Cascade matcher between two observations.
//!
//! Polygons are paired by descriptor distance, each polygon pair is confirmed
//! by matching the triangles it is made of, triangle pairs are aligned edge by
//! edge, and the edge assignment is turned into landmark correspondences.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::descriptor::{describe, squared_distance, DescriptorConfig, PolygonDescriptor};
use crate::error::{Error, Result};
use crate::geometry::{delaunay_triangulate, Point2, Triangle, Triangulation};
use crate::urquhart::{build_urquhart, Cycle, Hierarchy};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MatchConfig {
    /// Maximum descriptor distance for a polygon or triangle match.
    pub tau: f64,
    /// A polygon pair is kept when more than this fraction of its triangles
    /// find a partner.
    pub eta: f64,
    /// Optional cap on the number of polygons used per observation.
    pub gamma: Option<usize>,
    /// Largest allowed difference in vertex count between paired polygons.
    pub vertex_gap: usize,
    /// Base seed for polygon sampling when `gamma` is set.
    pub seed: u64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            tau: 5.0,
            eta: 0.5,
            gamma: None,
            vertex_gap: 3,
            seed: 0,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(Error::InvalidConfig(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidConfig(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        if self.gamma == Some(0) {
            return Err(Error::InvalidConfig("gamma must be at least 1".into()));
        }
        Ok(())
    }
}

/// Everything the matcher needs to know about one observation.
#[derive(Clone, Debug)]
pub struct ObservationFeatures {
    pub landmarks: Vec<Point2>,
    /// `None` when the observation has too few points or is degenerate.
    pub triangulation: Option<Triangulation>,
    pub hierarchy: Option<Hierarchy>,
    /// One descriptor per `hierarchy.h2` polygon.
    pub polygon_descriptors: Vec<PolygonDescriptor>,
    /// One descriptor per `hierarchy.h1` triangle.
    pub triangle_descriptors: Vec<PolygonDescriptor>,
    /// Seed used when this observation's polygons are subsampled.
    pub sample_seed: u64,
}

impl ObservationFeatures {
    /// Triangulates `landmarks`, builds the polygon hierarchy and describes
    /// every polygon and triangle.
    ///
    /// Degenerate input (fewer than three points, all collinear) yields a
    /// feature set without polygons. Duplicate and non-finite points are
    /// errors.
    pub fn build(landmarks: &[Point2], cfg: &DescriptorConfig) -> Result<Self> {
        cfg.validate()?;
        let triangulation = match delaunay_triangulate(landmarks) {
            Ok(t) => t,
            Err(Error::DegenerateInput(_)) => return Ok(Self::empty(landmarks)),
            Err(e) => return Err(e),
        };
        let (_, hierarchy) = build_urquhart(&triangulation);
        let polygon_descriptors = hierarchy
            .h2
            .iter()
            .map(|c| describe(&c.points(landmarks), cfg))
            .collect::<Result<_>>()?;
        let triangle_descriptors = hierarchy
            .h1
            .iter()
            .map(|t| describe(&t.corners(landmarks), cfg))
            .collect::<Result<_>>()?;
        Ok(Self {
            landmarks: landmarks.to_vec(),
            triangulation: Some(triangulation),
            hierarchy: Some(hierarchy),
            polygon_descriptors,
            triangle_descriptors,
            sample_seed: 0,
        })
    }

    pub fn empty(landmarks: &[Point2]) -> Self {
        Self {
            landmarks: landmarks.to_vec(),
            triangulation: None,
            hierarchy: None,
            polygon_descriptors: Vec::new(),
            triangle_descriptors: Vec::new(),
            sample_seed: 0,
        }
    }

    pub fn with_sample_seed(mut self, seed: u64) -> Self {
        self.sample_seed = seed;
        self
    }

    pub fn polygons(&self) -> &[Cycle] {
        self.hierarchy.as_ref().map_or(&[], |h| &h.h2)
    }

    pub fn triangles(&self) -> &[Triangle] {
        self.hierarchy.as_ref().map_or(&[], |h| &h.h1)
    }

    /// Polygons taking part in matching under the given budget.
    pub fn selected_polygons(&self, gamma: Option<usize>, base_seed: u64) -> Vec<usize> {
        sample_polygons(self.polygons(), gamma, mix_seed(base_seed, self.sample_seed))
    }
}

/// SplitMix64 finaliser, used to derive independent seeds.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Picks at most `gamma` polygons: those with 4 to 9 vertices first, then
/// larger ones, then triangles, drawing at random within each tier. Without a
/// budget every polygon is returned in order.
pub fn sample_polygons(h2: &[Cycle], gamma: Option<usize>, seed: u64) -> Vec<usize> {
    let Some(budget) = gamma else {
        return (0..h2.len()).collect();
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tiers: [Vec<usize>; 3] = Default::default();
    for (i, c) in h2.iter().enumerate() {
        let n = c.vertex_count();
        let tier = match n {
            4..=9 => 0,
            n if n > 9 => 1,
            _ => 2,
        };
        tiers[tier].push(i);
    }
    let mut picked = Vec::with_capacity(budget.min(h2.len()));
    for mut tier in tiers {
        if picked.len() == budget {
            break;
        }
        tier.shuffle(&mut rng);
        let take = (budget - picked.len()).min(tier.len());
        picked.extend_from_slice(&tier[..take]);
    }
    picked
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoredPair {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
}

/// Greedy one-to-one assignment by ascending distance. Candidates must be
/// listed in a deterministic order; equal distances keep that order.
fn assign_one_to_one(mut candidates: Vec<ScoredPair>) -> Vec<ScoredPair> {
    candidates.sort_by(|x, y| x.distance.total_cmp(&y.distance));
    let mut used_a = std::collections::HashSet::new();
    let mut used_b = std::collections::HashSet::new();
    candidates
        .into_iter()
        .filter(|p| {
            if used_a.contains(&p.a) || used_b.contains(&p.b) {
                return false;
            }
            used_a.insert(p.a);
            used_b.insert(p.b);
            true
        })
        .collect()
}

/// Polygon pairs that pass the vertex-count and descriptor gates, plus the
/// number of descriptor comparisons made.
pub fn match_polygons(
    a: &ObservationFeatures,
    b: &ObservationFeatures,
    cfg: &MatchConfig,
) -> (Vec<ScoredPair>, usize) {
    let sel_a = a.selected_polygons(cfg.gamma, cfg.seed);
    let sel_b = b.selected_polygons(cfg.gamma, cfg.seed);
    let mut comparisons = 0;
    let mut candidates = Vec::new();
    for &i in &sel_a {
        let da = &a.polygon_descriptors[i];
        for &j in &sel_b {
            let db = &b.polygon_descriptors[j];
            if da.vertex_count.abs_diff(db.vertex_count) > cfg.vertex_gap {
                continue;
            }
            comparisons += 1;
            let distance = squared_distance(&da.magnitudes, &db.magnitudes);
            if distance < cfg.tau {
                candidates.push(ScoredPair { a: i, b: j, distance });
            }
        }
    }
    (assign_one_to_one(candidates), comparisons)
}

/// Matches the triangles of polygon `pair.a` against those of `pair.b`.
/// Returns the triangle pairs when more than `eta` of the source polygon's
/// triangles found a partner, `None` otherwise.
pub fn validate_via_triangles(
    pair: &ScoredPair,
    a: &ObservationFeatures,
    b: &ObservationFeatures,
    cfg: &MatchConfig,
) -> Option<Vec<(usize, usize)>> {
    let tris_a = &a.polygons()[pair.a].triangles;
    let tris_b = &b.polygons()[pair.b].triangles;
    let mut candidates = Vec::new();
    for &ta in tris_a {
        for &tb in tris_b {
            let distance = squared_distance(
                &a.triangle_descriptors[ta].magnitudes,
                &b.triangle_descriptors[tb].magnitudes,
            );
            if distance < cfg.tau {
                candidates.push(ScoredPair { a: ta, b: tb, distance });
            }
        }
    }
    let matched = assign_one_to_one(candidates);
    let ratio = matched.len() as f64 / tris_a.len() as f64;
    (ratio > cfg.eta).then(|| matched.into_iter().map(|p| (p.a, p.b)).collect())
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Assigns the edges of `t_l` to the edges of `t_k` by the permutation of
/// edge lengths with the smallest squared difference. Entry `i` of the
/// result is the edge of `t_l` matched to edge `i` of `t_k`. Exact ties go
/// to the earliest permutation in lexicographic order.
pub fn match_triangle_edges(t_k: &Triangle, t_l: &Triangle) -> [usize; 3] {
    let lk = t_k.edge_lengths();
    let ll = t_l.edge_lengths();
    let mut best = PERMUTATIONS[0];
    let mut best_cost = f64::INFINITY;
    for perm in PERMUTATIONS {
        let cost: f64 = (0..3).map(|i| (lk[i] - ll[perm[i]]).powi(2)).sum();
        if cost < best_cost {
            best_cost = cost;
            best = perm;
        }
    }
    best
}

/// Vertex pairs implied by an edge assignment: a vertex of `t_k` maps to the
/// vertex shared by the partners of its two incident edges.
pub fn triangle_vertex_pairs(t_k: &Triangle, t_l: &Triangle, edge_map: [usize; 3]) -> [(usize, usize); 3] {
    [0, 1, 2].map(|v| {
        // Vertex v of t_k joins edges v - 1 and v.
        let prev = (v + 2) % 3;
        let e1 = t_l.edges[edge_map[prev]];
        let e2 = t_l.edges[edge_map[v]];
        let w = e1.shared_vertex(&e2).expect("distinct triangle edges share a vertex");
        (t_k.vertices[v], w)
    })
}

/// Landmark correspondences from matched triangle pairs.
///
/// Each pair votes for three vertex pairs. Conflicts are resolved greedily by
/// vote count, earlier pairs winning ties, so the result is one-to-one.
pub fn derive_point_correspondences(
    triangle_pairs: &[(usize, usize)],
    a: &ObservationFeatures,
    b: &ObservationFeatures,
) -> Vec<(usize, usize)> {
    let mut votes: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let mut order = 0;
    for &(ta, tb) in triangle_pairs {
        let (t_k, t_l) = (&a.triangles()[ta], &b.triangles()[tb]);
        let edge_map = match_triangle_edges(t_k, t_l);
        for pair in triangle_vertex_pairs(t_k, t_l, edge_map) {
            let entry = votes.entry(pair).or_insert((0, order));
            entry.0 += 1;
            order += 1;
        }
    }
    let mut ranked: Vec<((usize, usize), (usize, usize))> = votes.into_iter().collect();
    ranked.sort_by(|x, y| y.1 .0.cmp(&x.1 .0).then(x.1 .1.cmp(&y.1 .1)));
    let mut used_a = std::collections::HashSet::new();
    let mut used_b = std::collections::HashSet::new();
    ranked
        .into_iter()
        .filter_map(|((pa, pb), _)| {
            if used_a.contains(&pa) || used_b.contains(&pb) {
                return None;
            }
            used_a.insert(pa);
            used_b.insert(pb);
            Some((pa, pb))
        })
        .collect()
}

/// Output of the full matching cascade.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorrespondenceSet {
    pub polygon_pairs: Vec<(usize, usize)>,
    pub triangle_pairs: Vec<(usize, usize)>,
    /// Landmark index in `a`, landmark index in `b`.
    pub point_pairs: Vec<(usize, usize)>,
    /// Polygon descriptor comparisons performed.
    pub comparisons: usize,
}

/// Runs the whole cascade from polygon candidates to landmark pairs.
pub fn match_observations(a: &ObservationFeatures, b: &ObservationFeatures, cfg: &MatchConfig) -> CorrespondenceSet {
    let (pairs, comparisons) = match_polygons(a, b, cfg);
    let mut polygon_pairs = Vec::new();
    let mut triangle_pairs = Vec::new();
    for pair in &pairs {
        if let Some(tris) = validate_via_triangles(pair, a, b, cfg) {
            polygon_pairs.push((pair.a, pair.b));
            triangle_pairs.extend(tris);
        }
    }
    let point_pairs = derive_point_correspondences(&triangle_pairs, a, b);
    CorrespondenceSet {
        polygon_pairs,
        triangle_pairs,
        point_pairs,
        comparisons,
    }
}
