//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use urquhart_core::geometry::{Point2, Triangulation};
use urquhart_core::urquhart::Cycle;

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, side: f64) -> Vec<Point2> {
    (0..n)
        .map(|_| Point2::new(rng.random_range(0.0..side), rng.random_range(0.0..side)))
        .collect()
}

/// Star-shaped polygon with `n` vertices at radii in `[r_lo, r_hi]`.
pub fn random_star_polygon(rng: &mut ChaCha8Rng, n: usize, r_lo: f64, r_hi: f64) -> Vec<Point2> {
    let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    angles.sort_by(f64::total_cmp);
    let c = Point2::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
    angles
        .into_iter()
        .map(|a| {
            let r = rng.random_range(r_lo..r_hi);
            c + Point2::new(r * a.cos(), r * a.sin())
        })
        .collect()
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Positive when `d` is inside the circle through the CCW triangle `a, b, c`.
fn in_circle_f64(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    let row = |p: Point2| [p.x - d.x, p.y - d.y, (p.x - d.x).powi(2) + (p.y - d.y).powi(2)];
    det3([row(a), row(b), row(c)])
}

/// Area of the convex hull and the number of input points on its boundary.
pub fn hull_oracle(points: &[Point2]) -> (f64, usize) {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| points[i].x.total_cmp(&points[j].x).then(points[i].y.total_cmp(&points[j].y)));
    let build = |order: &mut dyn Iterator<Item = usize>| {
        let mut chain: Vec<usize> = Vec::new();
        for i in order {
            while chain.len() >= 2 && cross(points[chain[chain.len() - 2]], points[chain[chain.len() - 1]], points[i]) <= 0.0 {
                chain.pop();
            }
            chain.push(i);
        }
        chain
    };
    let mut lower = build(&mut idx.iter().copied());
    let mut upper = build(&mut idx.iter().rev().copied());
    lower.pop();
    upper.pop();
    let hull: Vec<usize> = lower.into_iter().chain(upper).collect();
    let area = 0.5
        * (0..hull.len())
            .map(|k| {
                let (p, q) = (points[hull[k]], points[hull[(k + 1) % hull.len()]]);
                p.x * q.y - q.x * p.y
            })
            .sum::<f64>();
    let scale = points.iter().map(|p| p.x.abs().max(p.y.abs())).fold(1.0, f64::max);
    let on_boundary = (0..points.len())
        .filter(|&i| {
            (0..hull.len()).any(|k| {
                let (a, b) = (points[hull[k]], points[hull[(k + 1) % hull.len()]]);
                let p = points[i];
                cross(a, b, p).abs() <= 1e-12 * scale * scale
                    && (p - a).dot(b - a) >= 0.0
                    && (p - b).dot(a - b) >= 0.0
            })
        })
        .count();
    (area, on_boundary)
}

/// Checks Delaunay emptiness, edge manifoldness, the triangle count and
/// area conservation.
pub fn check_triangulation(points: &[Point2], tri: &Triangulation) -> Result<(), String> {
    let scale = points.iter().map(|p| p.x.abs().max(p.y.abs())).fold(1.0, f64::max);
    let eps = 1e-9 * scale.powi(4);
    for (t, triangle) in tri.triangles.iter().enumerate() {
        let [a, b, c] = triangle.vertices.map(|v| points[v]);
        if cross(a, b, c) <= 0.0 {
            return Err(format!("triangle {t} is not counter-clockwise"));
        }
        for (i, &p) in points.iter().enumerate() {
            if !triangle.vertices.contains(&i) && in_circle_f64(a, b, c, p) > eps {
                return Err(format!("point {i} inside the circumcircle of triangle {t}"));
            }
        }
    }

    let mut uses: HashMap<(usize, usize), usize> = HashMap::new();
    for triangle in &tri.triangles {
        let v = triangle.vertices;
        for k in 0..3 {
            let (a, b) = (v[k], v[(k + 1) % 3]);
            *uses.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    if let Some((e, n)) = uses.iter().find(|(_, &n)| n > 2) {
        return Err(format!("edge {e:?} used by {n} triangles"));
    }
    let boundary = uses.values().filter(|&&n| n == 1).count();

    let (hull_area, b) = hull_oracle(points);
    if boundary != b {
        return Err(format!("{boundary} boundary edges but {b} hull points"));
    }
    let expected = 2 * points.len() - 2 - b;
    if tri.triangles.len() != expected {
        return Err(format!("{} triangles, expected 2n-2-b = {expected}", tri.triangles.len()));
    }
    let area: f64 = tri
        .triangles
        .iter()
        .map(|t| {
            let [a, b, c] = t.vertices.map(|v| points[v]);
            0.5 * cross(a, b, c)
        })
        .sum();
    if (area - hull_area).abs() > 1e-9 * hull_area.max(1.0) {
        return Err(format!("triangle area {area} differs from hull area {hull_area}"));
    }
    Ok(())
}

/// Urquhart graph edges: the triangulation edges minus each triangle's
/// longest edge, with exact ties broken toward the smaller vertex pair.
pub fn urquhart_edges_oracle(points: &[Point2], tri: &Triangulation) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    let mut removed = BTreeSet::new();
    for t in &tri.triangles {
        let v = t.vertices;
        let mut sides: Vec<((usize, usize), f64)> = (0..3)
            .map(|k| {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                ((a.min(b), a.max(b)), points[a].dist(points[b]))
            })
            .collect();
        sides.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        removed.insert(sides[0].0);
        edges.extend(sides.iter().map(|s| s.0));
    }
    edges.retain(|e| !removed.contains(e));
    edges
}

/// Bounded faces of the planar graph, each as the closed vertex walk that
/// keeps the face on its left.
pub fn bounded_faces(points: &[Point2], edges: &BTreeSet<(usize, usize)>) -> Vec<Vec<usize>> {
    let mut around: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(a, b) in edges {
        around.entry(a).or_default().push(b);
        around.entry(b).or_default().push(a);
    }
    for (&v, nbrs) in around.iter_mut() {
        let o = points[v];
        nbrs.sort_by(|&p, &q| {
            let (dp, dq) = (points[p] - o, points[q] - o);
            dp.y.atan2(dp.x).total_cmp(&dq.y.atan2(dq.x))
        });
    }
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut faces = Vec::new();
    for &(a, b) in edges {
        for start in [(a, b), (b, a)] {
            if seen.contains(&start) {
                continue;
            }
            let mut walk = vec![start.0];
            let (mut u, mut v) = start;
            loop {
                seen.insert((u, v));
                walk.push(v);
                // Turn as far clockwise as possible: the neighbour preceding
                // `u` in counter-clockwise order around `v`.
                let nbrs = &around[&v];
                let k = nbrs.iter().position(|&w| w == u).expect("half-edge in rotation system");
                let w = nbrs[(k + nbrs.len() - 1) % nbrs.len()];
                (u, v) = (v, w);
                if (u, v) == start {
                    break;
                }
            }
            let area: f64 = walk.windows(2).map(|e| points[e[0]].cross(points[e[1]])).sum();
            if area > 0.0 {
                faces.push(walk);
            }
        }
    }
    faces
}

pub fn edge_set(c: &Cycle) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> = c.edge_keys().collect();
    e.sort_unstable();
    e
}

/// Edges walked exactly once, if they form one simple cycle of length >= 3.
fn simple_remainder(walk: &[usize]) -> Option<Vec<(usize, usize)>> {
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for e in walk.windows(2) {
        *count.entry((e[0].min(e[1]), e[0].max(e[1]))).or_default() += 1;
    }
    let mut kept: Vec<(usize, usize)> = count.into_iter().filter(|&(_, n)| n == 1).map(|(e, _)| e).collect();
    kept.sort_unstable();
    if kept.len() < 3 {
        return None;
    }
    let mut degree: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(a, b) in &kept {
        degree.entry(a).or_default().push(b);
        degree.entry(b).or_default().push(a);
    }
    if degree.values().any(|n| n.len() != 2) {
        return None;
    }
    // Connected: walking from one vertex must visit every edge.
    let start = kept[0].0;
    let (mut prev, mut v, mut steps) = (start, degree[&start][0], 1);
    while v != start {
        let n = &degree[&v];
        let next = if n[0] == prev { n[1] } else { n[0] };
        (prev, v) = (v, next);
        steps += 1;
    }
    (steps == kept.len()).then_some(kept)
}

/// Interior Urquhart polygons predicted by face traversal: bounded faces
/// that are simple once doubled edges are dropped and that avoid the hull.
pub fn urquhart_polygons_oracle(points: &[Point2], tri: &Triangulation) -> BTreeSet<Vec<(usize, usize)>> {
    let edges = urquhart_edges_oracle(points, tri);
    let hull: BTreeSet<(usize, usize)> = tri.hull_edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
    bounded_faces(points, &edges)
        .into_iter()
        .filter_map(|walk| simple_remainder(&walk))
        .filter(|e| !e.iter().any(|k| hull.contains(k)))
        .collect()
}
