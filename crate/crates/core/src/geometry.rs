//! Planar primitives, convex hulls and Delaunay triangulation.
//!
//! The triangulation is an incremental Bowyer–Watson construction. Instead of
//! a finite super-triangle, the exterior is covered by ghost triangles that
//! share a single vertex at infinity, so hull edges never depend on how large
//! an enclosing triangle was chosen. All orientation and in-circle decisions
//! go through Shewchuk's adaptive-precision predicates.
//!
//! Cocircular configurations are resolved by the strict in-circle test: a
//! point lying exactly on a circumcircle does not conflict with that
//! triangle, which makes the result a function of insertion order.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

use robust::Coord;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points closer than this are treated as the same landmark and rejected.
pub const DUPLICATE_TOLERANCE: f64 = 1e-9;

/// Edge lengths closer than this are considered equal when picking the
/// longest edge of a triangle.
pub const LENGTH_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }

    pub fn dist2(self, other: Self) -> f64 {
        (self - other).norm2()
    }

    pub fn lerp(self, other: Self, t: f64) -> Self {
        self + (other - self) * t
    }

    fn coord(self) -> Coord<f64> {
        Coord { x: self.x, y: self.y }
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Self) -> Self {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Self) -> Self {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Self {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Self {
        Point2::new(-self.x, -self.y)
    }
}

/// Exact orientation test: positive when `a, b, c` turn counter-clockwise,
/// negative when clockwise, zero when collinear.
pub fn orient2d(a: Point2, b: Point2, c: Point2) -> f64 {
    robust::orient2d(a.coord(), b.coord(), c.coord())
}

/// Exact in-circle test for a counter-clockwise triangle. Positive when `p`
/// lies strictly inside the circumcircle of `a, b, c`.
pub fn incircle(a: Point2, b: Point2, c: Point2, p: Point2) -> f64 {
    robust::incircle(a.coord(), b.coord(), c.coord(), p.coord())
}

/// True iff `p` is strictly inside the circumcircle of the triangle `a, b, c`
/// (given in either orientation).
pub fn circumcircle_contains(a: Point2, b: Point2, c: Point2, p: Point2) -> bool {
    let o = orient2d(a, b, c);
    if o > 0.0 {
        incircle(a, b, c, p) > 0.0
    } else if o < 0.0 {
        incircle(a, c, b, p) > 0.0
    } else {
        false
    }
}

/// Signed area of a closed ring given by its vertices (the closing vertex is
/// implicit). Positive for counter-clockwise rings.
pub fn signed_area(ring: &[Point2]) -> f64 {
    if ring.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (i, p) in ring.iter().enumerate() {
        let q = ring[(i + 1) % ring.len()];
        acc += p.cross(q);
    }
    0.5 * acc
}

/// Perimeter of a closed ring.
pub fn perimeter(ring: &[Point2]) -> f64 {
    ring.iter()
        .enumerate()
        .map(|(i, p)| p.dist(ring[(i + 1) % ring.len()]))
        .sum()
}

/// Canonical undirected key of an edge: `(min, max)`.
pub fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// An undirected segment between two vertices with its cached length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    /// Smaller endpoint index.
    pub a: usize,
    /// Larger endpoint index.
    pub b: usize,
    pub length: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, points: &[Point2]) -> Self {
        assert_ne!(u, v, "edge endpoints must differ");
        let (a, b) = edge_key(u, v);
        Self {
            a,
            b,
            length: points[a].dist(points[b]),
        }
    }

    pub fn key(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.a == v || self.b == v
    }

    /// Vertex shared with `other`, if any.
    pub fn shared_vertex(&self, other: &Edge) -> Option<usize> {
        if other.contains(self.a) {
            Some(self.a)
        } else if other.contains(self.b) {
            Some(self.b)
        } else {
            None
        }
    }
}

/// A Delaunay triangle. `edges[k]` joins `vertices[k]` and `vertices[k + 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub edges: [Edge; 3],
}

impl Triangle {
    /// Builds a triangle, reordering the vertices counter-clockwise.
    pub fn new(vertices: [usize; 3], points: &[Point2]) -> Self {
        let [a, b, c] = vertices;
        let vertices = if orient2d(points[a], points[b], points[c]) < 0.0 {
            [a, c, b]
        } else {
            vertices
        };
        let edges = [0, 1, 2].map(|k| Edge::new(vertices[k], vertices[(k + 1) % 3], points));
        Self { vertices, edges }
    }

    pub fn corners(&self, points: &[Point2]) -> [Point2; 3] {
        self.vertices.map(|v| points[v])
    }

    pub fn area(&self, points: &[Point2]) -> f64 {
        let [a, b, c] = self.corners(points);
        0.5 * orient2d(a, b, c)
    }

    pub fn circumcircle_contains(&self, points: &[Point2], p: Point2) -> bool {
        let [a, b, c] = self.corners(points);
        incircle(a, b, c, p) > 0.0
    }

    /// The longest edge. Lengths within [`LENGTH_TIE_TOLERANCE`] tie, and
    /// ties go to the lexicographically smaller endpoint pair.
    pub fn longest_edge(&self) -> &Edge {
        let mut best = &self.edges[0];
        for e in &self.edges[1..] {
            if e.length > best.length + LENGTH_TIE_TOLERANCE
                || ((e.length - best.length).abs() <= LENGTH_TIE_TOLERANCE && e.key() < best.key())
            {
                best = e;
            }
        }
        best
    }

    pub fn edge_lengths(&self) -> [f64; 3] {
        self.edges.map(|e| e.length)
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }
}

/// Longest edge of `tri`; see [`Triangle::longest_edge`].
pub fn longest_edge(tri: &Triangle) -> Edge {
    *tri.longest_edge()
}

/// Delaunay triangulation of a planar point set.
#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    pub points: Vec<Point2>,
    /// Counter-clockwise triangles, each rotated so its smallest vertex index
    /// comes first, sorted lexicographically.
    pub triangles: Vec<Triangle>,
    /// Unique edges sorted by endpoint key.
    pub edges: Vec<Edge>,
    /// For each entry of `edges`, the incident triangles. The second slot is
    /// `None` for hull edges.
    pub edge_triangles: Vec<(usize, Option<usize>)>,
    /// Boundary of the triangulation as a counter-clockwise vertex cycle,
    /// starting at its smallest index. Points lying on a straight hull side
    /// are included.
    pub hull: Vec<usize>,
    edge_index: HashMap<(usize, usize), usize>,
}

impl Triangulation {
    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&edge_key(a, b)).copied()
    }

    /// Triangles incident to the undirected edge `a-b`.
    pub fn triangles_of_edge(&self, a: usize, b: usize) -> Option<(usize, Option<usize>)> {
        self.edge_id(a, b).map(|e| self.edge_triangles[e])
    }

    /// The triangle across edge `a-b` from triangle `t`.
    pub fn neighbor(&self, t: usize, a: usize, b: usize) -> Option<usize> {
        let (t0, t1) = self.triangles_of_edge(a, b)?;
        if t0 == t {
            t1
        } else if t1 == Some(t) {
            Some(t0)
        } else {
            None
        }
    }

    pub fn is_hull_edge(&self, a: usize, b: usize) -> bool {
        matches!(self.triangles_of_edge(a, b), Some((_, None)))
    }

    /// Hull edges as canonical keys.
    pub fn hull_edges(&self) -> Vec<(usize, usize)> {
        (0..self.hull.len())
            .map(|i| edge_key(self.hull[i], self.hull[(i + 1) % self.hull.len()]))
            .collect()
    }

    pub fn hull_area(&self) -> f64 {
        let ring: Vec<Point2> = self.hull.iter().map(|&v| self.points[v]).collect();
        signed_area(&ring)
    }
}

/// Convex hull in counter-clockwise order, starting at the lowest-leftmost
/// point. Points on hull sides are excluded.
pub fn convex_hull(points: &[Point2]) -> Result<Vec<usize>> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput("at least 3 points are required"));
    }
    check_finite(points)?;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[i]
            .x
            .total_cmp(&points[j].x)
            .then(points[i].y.total_cmp(&points[j].y))
    });

    let mut lower: Vec<usize> = Vec::new();
    for &i in &order {
        while lower.len() >= 2
            && orient2d(points[lower[lower.len() - 2]], points[lower[lower.len() - 1]], points[i]) <= 0.0
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in order.iter().rev() {
        while upper.len() >= 2
            && orient2d(points[upper[upper.len() - 2]], points[upper[upper.len() - 1]], points[i]) <= 0.0
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::DegenerateInput("all points are collinear"));
    }
    Ok(lower)
}

fn check_finite(points: &[Point2]) -> Result<()> {
    match points.iter().position(|p| !p.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

fn check_duplicates(points: &[Point2]) -> Result<()> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i].x.total_cmp(&points[j].x));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if points[j].x - points[i].x > DUPLICATE_TOLERANCE {
                break;
            }
            if points[i].dist(points[j]) < DUPLICATE_TOLERANCE {
                return Err(Error::DuplicatePoint(i.min(j), i.max(j)));
            }
        }
    }
    Ok(())
}

const GHOST: usize = usize::MAX;

/// Working state of the incremental construction. Triangles are stored as
/// counter-clockwise vertex triples; ghost triangles carry [`GHOST`] in the
/// last slot and have the exterior on the left of their finite edge.
struct Builder<'a> {
    points: &'a [Point2],
    tris: Vec<[usize; 3]>,
    alive: Vec<bool>,
    free: Vec<usize>,
    /// Directed edge -> triangle that contains it in counter-clockwise order.
    owner: HashMap<(usize, usize), usize>,
    last: usize,
    visit: Vec<u32>,
    stamp: u32,
}

impl<'a> Builder<'a> {
    fn new(points: &'a [Point2]) -> Self {
        Self {
            points,
            tris: Vec::new(),
            alive: Vec::new(),
            free: Vec::new(),
            owner: HashMap::with_capacity(points.len() * 9),
            last: 0,
            visit: Vec::new(),
            stamp: 0,
        }
    }

    fn add(&mut self, t: [usize; 3]) -> usize {
        let id = match self.free.pop() {
            Some(id) => {
                self.tris[id] = t;
                self.alive[id] = true;
                id
            }
            None => {
                self.tris.push(t);
                self.alive.push(true);
                self.visit.push(0);
                self.tris.len() - 1
            }
        };
        for k in 0..3 {
            self.owner.insert((t[k], t[(k + 1) % 3]), id);
        }
        id
    }

    fn remove(&mut self, id: usize) {
        let t = self.tris[id];
        for k in 0..3 {
            self.owner.remove(&(t[k], t[(k + 1) % 3]));
        }
        self.alive[id] = false;
        self.free.push(id);
    }

    fn is_ghost(&self, id: usize) -> bool {
        self.tris[id][2] == GHOST
    }

    fn in_conflict(&self, id: usize, p: Point2) -> bool {
        let [a, b, c] = self.tris[id];
        let pts = self.points;
        if c == GHOST {
            let o = orient2d(pts[a], pts[b], p);
            if o != 0.0 {
                return o > 0.0;
            }
            // On the supporting line: conflicts only inside the open segment.
            let (pa, pb) = (pts[a], pts[b]);
            (p - pa).dot(pb - pa) > 0.0 && (p - pb).dot(pa - pb) > 0.0
        } else {
            incircle(pts[a], pts[b], pts[c], p) > 0.0
        }
    }

    fn seed(&mut self, a: usize, b: usize, c: usize) {
        let real = self.add([a, b, c]);
        for (u, v) in [(a, b), (b, c), (c, a)] {
            self.add([v, u, GHOST]);
        }
        self.last = real;
    }

    /// Finds a triangle in conflict with `p` by walking from the last
    /// created triangle.
    fn locate(&self, p: Point2) -> usize {
        let pts = self.points;
        let mut t = self.last;
        if !self.alive[t] {
            t = (0..self.tris.len()).find(|&i| self.alive[i]).expect("empty triangulation");
        }
        if self.is_ghost(t) {
            let [a, b, _] = self.tris[t];
            if self.in_conflict(t, p) {
                return t;
            }
            t = self.owner[&(b, a)];
        }
        let limit = 4 * self.tris.len() + 16;
        let mut steps = 0;
        'walk: loop {
            steps += 1;
            if steps > limit {
                break;
            }
            let tri = self.tris[t];
            // Rotate the starting edge to avoid cycling on degenerate layouts.
            for k in 0..3 {
                let k = (k + steps) % 3;
                let (u, v) = (tri[k], tri[(k + 1) % 3]);
                if orient2d(pts[u], pts[v], p) < 0.0 {
                    let next = self.owner[&(v, u)];
                    if self.is_ghost(next) {
                        return next;
                    }
                    t = next;
                    continue 'walk;
                }
            }
            return t;
        }
        (0..self.tris.len())
            .find(|&i| self.alive[i] && self.in_conflict(i, p))
            .expect("point outside every circumcircle")
    }

    fn insert(&mut self, vi: usize) {
        let p = self.points[vi];
        let start = self.locate(p);

        self.stamp = self.stamp.wrapping_add(1);
        let stamp = self.stamp;
        let mut cavity = vec![start];
        let mut stack = vec![start];
        self.visit[start] = stamp;
        let mut boundary: Vec<(usize, usize)> = Vec::new();
        while let Some(t) = stack.pop() {
            let tri = self.tris[t];
            for k in 0..3 {
                let (u, v) = (tri[k], tri[(k + 1) % 3]);
                let n = self.owner[&(v, u)];
                if self.visit[n] == stamp {
                    continue;
                }
                if self.in_conflict(n, p) {
                    self.visit[n] = stamp;
                    cavity.push(n);
                    stack.push(n);
                } else {
                    boundary.push((u, v));
                }
            }
        }
        // A boundary edge may have been recorded before its far side joined
        // the cavity.
        boundary.retain(|&(u, v)| {
            let n = self.owner[&(v, u)];
            self.visit[n] != stamp
        });

        for &t in &cavity {
            self.remove(t);
        }
        for (u, v) in boundary {
            let tri = if u == GHOST {
                [v, vi, GHOST]
            } else if v == GHOST {
                [vi, u, GHOST]
            } else {
                debug_assert!(orient2d(self.points[u], self.points[v], p) > 0.0);
                [u, v, vi]
            };
            let id = self.add(tri);
            if tri[2] != GHOST {
                self.last = id;
            }
        }
    }
}

/// Delaunay triangulation of `points`.
///
/// Fails with [`Error::DegenerateInput`] for fewer than three points or a
/// collinear set, and with [`Error::DuplicatePoint`] when two inputs are
/// closer than [`DUPLICATE_TOLERANCE`].
pub fn delaunay_triangulate(points: &[Point2]) -> Result<Triangulation> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput("at least 3 points are required"));
    }
    check_finite(points)?;
    check_duplicates(points)?;

    let third = (2..points.len())
        .find(|&k| orient2d(points[0], points[1], points[k]) != 0.0)
        .ok_or(Error::DegenerateInput("all points are collinear"))?;

    let mut builder = Builder::new(points);
    if orient2d(points[0], points[1], points[third]) > 0.0 {
        builder.seed(0, 1, third);
    } else {
        builder.seed(0, third, 1);
    }
    for v in 2..points.len() {
        if v != third {
            builder.insert(v);
        }
    }
    Ok(finish(points, &builder))
}

fn finish(points: &[Point2], builder: &Builder<'_>) -> Triangulation {
    let mut triples: Vec<[usize; 3]> = Vec::new();
    let mut hull_next: HashMap<usize, usize> = HashMap::new();
    for (id, t) in builder.tris.iter().enumerate() {
        if !builder.alive[id] {
            continue;
        }
        if t[2] == GHOST {
            // Ghost [a, b] has the exterior on its left, so the
            // counter-clockwise boundary runs b -> a.
            hull_next.insert(t[1], t[0]);
        } else {
            let r = (0..3).min_by_key(|&k| t[k]).unwrap();
            triples.push([t[r], t[(r + 1) % 3], t[(r + 2) % 3]]);
        }
    }
    triples.sort_unstable();
    let triangles: Vec<Triangle> = triples
        .iter()
        .map(|&vertices| {
            let edges = [0, 1, 2].map(|k| Edge::new(vertices[k], vertices[(k + 1) % 3], points));
            Triangle { vertices, edges }
        })
        .collect();

    let mut incidence: HashMap<(usize, usize), (usize, Option<usize>)> = HashMap::new();
    for (ti, t) in triangles.iter().enumerate() {
        for e in &t.edges {
            incidence
                .entry(e.key())
                .and_modify(|slot| slot.1 = Some(ti))
                .or_insert((ti, None));
        }
    }
    let mut keys: Vec<(usize, usize)> = incidence.keys().copied().collect();
    keys.sort_unstable();
    let edges: Vec<Edge> = keys.iter().map(|&(a, b)| Edge::new(a, b, points)).collect();
    let edge_triangles = keys.iter().map(|k| incidence[k]).collect();
    let edge_index = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();

    let start = *hull_next.keys().min().expect("triangulation without hull");
    let mut hull = vec![start];
    let mut v = hull_next[&start];
    while v != start {
        hull.push(v);
        v = hull_next[&v];
    }

    Triangulation {
        points: points.to_vec(),
        triangles,
        edges,
        edge_triangles,
        hull,
        edge_index,
    }
}
