//! Urquhart graph and polygon hierarchy.
//!
//! Every Delaunay triangle drops its longest edge. Triangles on both sides of
//! a dropped edge are merged into one cycle by a symmetric difference of
//! their boundary walks, so after one pass over the triangles the surviving
//! cycles are exactly the faces of the Urquhart graph. Faces whose walk
//! doubles back over an edge (a hanging edge) are cleaned up afterwards, and
//! faces touching the triangulation boundary are discarded.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{edge_key, signed_area, Edge, Point2, Triangle, Triangulation};

/// A closed walk over triangulation vertices.
///
/// `vertices` repeats the first vertex at the end, so a walk with `n` edges
/// stores `n + 1` vertices. `triangles` lists the Delaunay triangles merged
/// into the cycle, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub vertices: Vec<usize>,
    pub triangles: Vec<usize>,
}

impl Cycle {
    /// Cycle of a single counter-clockwise triangle.
    pub fn from_triangle(index: usize, tri: &Triangle) -> Self {
        let [a, b, c] = tri.vertices;
        Self {
            vertices: vec![a, b, c, a],
            triangles: vec![index],
        }
    }

    /// Builds a cycle from an open vertex ring.
    pub fn from_ring(ring: &[usize], triangles: Vec<usize>) -> Self {
        let mut vertices = ring.to_vec();
        if let Some(&first) = ring.first() {
            vertices.push(first);
        }
        Self { vertices, triangles }
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    /// The walk without its closing vertex.
    pub fn ring(&self) -> &[usize] {
        &self.vertices[..self.edge_count()]
    }

    /// Directed edges in walk order.
    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn edge_keys(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.directed_edges().map(|(a, b)| edge_key(a, b))
    }

    pub fn contains_edge(&self, key: (usize, usize)) -> bool {
        self.edge_keys().any(|k| k == key)
    }

    /// Number of distinct vertices, |N| in descriptor terms.
    pub fn vertex_count(&self) -> usize {
        self.ring().iter().collect::<HashSet<_>>().len()
    }

    /// True when a vertex is visited more than once (pinch or hanging edge).
    pub fn has_repeated_vertex(&self) -> bool {
        self.vertex_count() != self.edge_count()
    }

    /// True when an edge is traversed more than once.
    pub fn has_doubled_edge(&self) -> bool {
        let mut seen = HashSet::new();
        self.edge_keys().any(|k| !seen.insert(k))
    }

    pub fn is_simple(&self) -> bool {
        self.edge_count() >= 3 && !self.has_repeated_vertex()
    }

    pub fn points(&self, points: &[Point2]) -> Vec<Point2> {
        self.ring().iter().map(|&v| points[v]).collect()
    }

    /// Shoelace area of the walk. Out-and-back spikes contribute nothing.
    pub fn area(&self, points: &[Point2]) -> f64 {
        signed_area(&self.points(points))
    }

    /// Same walk started at a different vertex.
    pub fn rotated(&self, offset: usize) -> Self {
        let ring = self.ring();
        let n = ring.len();
        let rotated: Vec<usize> = (0..n).map(|i| ring[(i + offset) % n]).collect();
        Self::from_ring(&rotated, self.triangles.clone())
    }

    /// Same walk traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self {
            vertices,
            triangles: self.triangles.clone(),
        }
    }

    fn position_of(&self, key: (usize, usize)) -> Option<usize> {
        self.edge_keys().position(|k| k == key)
    }
}

/// Merges two cycles that share `shared`, removing it from both.
///
/// `c_a` is rotated so the shared edge comes last and `c_b` so it comes
/// first; concatenating them without the shared edge yields a closed walk
/// that keeps the boundary order of both inputs.
pub fn symmetric_difference_merge(c_a: &Cycle, c_b: &Cycle, shared: (usize, usize)) -> Result<Cycle> {
    let key = edge_key(shared.0, shared.1);
    let missing = Error::SharedEdgeMissing(key.0, key.1);
    let i = c_a.position_of(key).ok_or(missing.clone())?;
    c_b.position_of(key).ok_or(missing.clone())?;

    // c_a with the shared edge last: a path from y to x, shared edge is x -> y.
    let ring_a = c_a.ring();
    let n = ring_a.len();
    let path_a: Vec<usize> = (0..n).map(|k| ring_a[(i + 1 + k) % n]).collect();
    let (x, y) = (ring_a[i], ring_a[(i + 1) % n]);

    // c_b must traverse the shared edge as y -> x; flip it otherwise.
    let b = if c_b.directed_edges().any(|e| e == (y, x)) {
        c_b.clone()
    } else {
        c_b.reversed()
    };
    let j = b.position_of(key).ok_or(missing)?;
    let ring_b = b.ring();
    let m = ring_b.len();
    // Path from x back to y, skipping the shared edge.
    let path_b: Vec<usize> = (0..m).map(|k| ring_b[(j + 1 + k) % m]).collect();
    debug_assert_eq!(path_b[0], x);

    let mut vertices = path_a;
    vertices.extend_from_slice(&path_b[1..]);
    debug_assert_eq!(vertices.last(), Some(&y));

    let triangles: BTreeSet<usize> = c_a.triangles.iter().chain(&c_b.triangles).copied().collect();
    Ok(Cycle {
        vertices,
        triangles: triangles.into_iter().collect(),
    })
}

/// Outcome of [`filter_hanging_edges`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Filtered {
    Simple(Cycle),
    Rejected,
}

/// Removes every edge traversed twice and re-closes the walk.
///
/// The cycle is rejected when what remains is not a single simple cycle with
/// at least three edges.
pub fn filter_hanging_edges(c: &Cycle) -> Filtered {
    let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
    for k in c.edge_keys() {
        *counts.entry(k).or_default() += 1;
    }
    if counts.values().all(|&n| n == 1) {
        return if c.is_simple() {
            Filtered::Simple(c.clone())
        } else {
            Filtered::Rejected
        };
    }

    let kept: Vec<(usize, usize)> = c
        .directed_edges()
        .filter(|&(a, b)| counts[&edge_key(a, b)] == 1)
        .collect();
    if kept.len() < 3 {
        return Filtered::Rejected;
    }
    let mut next: HashMap<usize, usize> = HashMap::new();
    for &(a, b) in &kept {
        if next.insert(a, b).is_some() {
            return Filtered::Rejected;
        }
    }
    let start = kept[0].0;
    let mut ring = vec![start];
    let mut v = next[&start];
    while v != start {
        if ring.len() > kept.len() {
            return Filtered::Rejected;
        }
        ring.push(v);
        v = match next.get(&v) {
            Some(&w) => w,
            None => return Filtered::Rejected,
        };
    }
    if ring.len() != kept.len() {
        return Filtered::Rejected;
    }
    Filtered::Simple(Cycle::from_ring(&ring, c.triangles.clone()))
}

/// Keeps only cycles with no edge on the triangulation boundary.
pub fn discard_boundary_polygons(h2: &[Cycle], hull: &[usize]) -> Vec<Cycle> {
    let hull_edges: HashSet<(usize, usize)> = (0..hull.len())
        .map(|i| edge_key(hull[i], hull[(i + 1) % hull.len()]))
        .collect();
    h2.iter()
        .filter(|c| !c.edge_keys().any(|k| hull_edges.contains(&k)))
        .cloned()
        .collect()
}

/// The Urquhart graph: the Delaunay edges minus every triangle's longest edge.
#[derive(Clone, Debug, PartialEq)]
pub struct UrquhartGraph {
    pub vertex_count: usize,
    /// Remaining edges, sorted by key.
    pub edges: Vec<(usize, usize)>,
    /// The removed longest edges, sorted by key.
    pub removed: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscardReason {
    /// The face touches the triangulation boundary.
    Boundary,
    /// The face is not a simple cycle once hanging edges are removed.
    NotSimple,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscardedPolygon {
    pub cycle: Cycle,
    pub reason: DiscardReason,
}

/// Element of one of the three hierarchy levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    Edge(usize),
    Triangle(usize),
    Polygon(usize),
}

/// Edges, triangles and Urquhart polygons of one point set.
#[derive(Clone, Debug, PartialEq)]
pub struct Hierarchy {
    /// Delaunay edges.
    pub h0: Vec<Edge>,
    /// Delaunay triangles.
    pub h1: Vec<Triangle>,
    /// Simple interior Urquhart polygons.
    pub h2: Vec<Cycle>,
    /// Faces that did not make it into `h2`.
    pub discarded: Vec<DiscardedPolygon>,
    phi0: Vec<[usize; 3]>,
}

impl Hierarchy {
    /// Triangles merged into polygon `polygon`.
    pub fn phi1(&self, polygon: usize) -> &[usize] {
        &self.h2[polygon].triangles
    }

    /// Edge indices (into `h0`) of triangle `triangle`.
    pub fn phi0(&self, triangle: usize) -> [usize; 3] {
        self.phi0[triangle]
    }

    /// Lower-level elements fully contained in `element`.
    pub fn phi(&self, element: Element) -> Vec<Element> {
        match element {
            Element::Polygon(p) => self.phi1(p).iter().map(|&t| Element::Triangle(t)).collect(),
            Element::Triangle(t) => self.phi0(t).iter().map(|&e| Element::Edge(e)).collect(),
            Element::Edge(_) => Vec::new(),
        }
    }

    /// All faces before filtering, h2 first.
    pub fn all_faces(&self) -> impl Iterator<Item = &Cycle> {
        self.h2.iter().chain(self.discarded.iter().map(|d| &d.cycle))
    }
}

/// Runs the longest-edge removal with cycle tracking over `tri`.
pub fn build_urquhart(tri: &Triangulation) -> (UrquhartGraph, Hierarchy) {
    let faces = merge_faces(tri);

    let mut removed: Vec<(usize, usize)> = faces.removed.into_iter().collect();
    removed.sort_unstable();
    let removed_set: HashSet<_> = removed.iter().copied().collect();
    let edges: Vec<(usize, usize)> = tri
        .edges
        .iter()
        .map(Edge::key)
        .filter(|k| !removed_set.contains(k))
        .collect();
    let graph = UrquhartGraph {
        vertex_count: tri.points.len(),
        edges,
        removed,
    };

    let hull_edges: HashSet<(usize, usize)> = tri.hull_edges().into_iter().collect();
    let mut h2 = Vec::new();
    let mut discarded = Vec::new();
    for (cycle, open) in faces.cycles {
        match filter_hanging_edges(&cycle) {
            Filtered::Rejected => discarded.push(DiscardedPolygon {
                cycle,
                reason: DiscardReason::NotSimple,
            }),
            Filtered::Simple(simple) => {
                if open || simple.edge_keys().any(|k| hull_edges.contains(&k)) {
                    discarded.push(DiscardedPolygon {
                        cycle: simple,
                        reason: DiscardReason::Boundary,
                    });
                } else {
                    h2.push(simple);
                }
            }
        }
    }

    let phi0 = tri
        .triangles
        .iter()
        .map(|t| t.edges.map(|e| tri.edge_id(e.a, e.b).expect("triangle edge in edge list")))
        .collect();
    let hierarchy = Hierarchy {
        h0: tri.edges.clone(),
        h1: tri.triangles.clone(),
        h2,
        discarded,
        phi0,
    };
    (graph, hierarchy)
}

struct Faces {
    /// Faces ordered by their smallest triangle, with an "open" flag for
    /// faces that lost a hull edge.
    cycles: Vec<(Cycle, bool)>,
    removed: HashSet<(usize, usize)>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn merge_faces(tri: &Triangulation) -> Faces {
    let n = tri.triangles.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut cycles: Vec<Option<Cycle>> = tri
        .triangles
        .iter()
        .enumerate()
        .map(|(i, t)| Some(Cycle::from_triangle(i, t)))
        .collect();
    let mut open = vec![false; n];
    let mut removed: HashSet<(usize, usize)> = HashSet::new();

    for (ti, t) in tri.triangles.iter().enumerate() {
        let e = t.longest_edge().key();
        if !removed.insert(e) {
            // Already dropped as the longest edge of the neighbour.
            continue;
        }
        let root = find(&mut parent, ti);
        match tri.neighbor(ti, e.0, e.1) {
            None => open[root] = true,
            Some(nb) => {
                let other = find(&mut parent, nb);
                if other == root {
                    // Both sides already belong to one face; the edge stays
                    // in the walk twice and is handled by the filter.
                    continue;
                }
                let a = cycles[root].take().expect("live cycle");
                let b = cycles[other].take().expect("live cycle");
                let merged = symmetric_difference_merge(&a, &b, e).expect("edge shared by adjacent faces");
                let keep = root.min(other);
                let gone = root.max(other);
                parent[gone] = keep;
                open[keep] = open[root] || open[other];
                cycles[keep] = Some(merged);
            }
        }
    }

    let cycles = cycles
        .into_iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|c| (c, open[i])))
        .collect();
    Faces { cycles, removed }
}
