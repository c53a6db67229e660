//! Delaunay triangulation of finite planar point sets: incremental
//! construction on exact predicates, validation of the empty-circumcircle
//! property, and the ordered triangle sequence crossed by a segment.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geom::{incircle_test, orientation, InCircle, Orientation, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DelaunayError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("all input points are collinear")]
    AllCollinear,
    #[error("duplicate point at index {0}")]
    DuplicatePoint(usize),
    #[error("point coordinates must be finite (index {0})")]
    NonFinite(usize),
    #[error("vertex index {0} out of range")]
    BadVertex(usize),
    #[error("segment from {0} to {1} passes exactly through vertex {2}")]
    SegmentThroughVertex(usize, usize, usize),
    #[error("internal walk failure between {0} and {1}")]
    WalkFailed(usize, usize),
}

/// A triangulation: points, counterclockwise vertex triples, and per-triangle
/// neighbors. `adjacency[t][k]` is the triangle across the edge opposite
/// vertex `k` of triangle `t`, or `None` on the hull.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    pub points: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub adjacency: Vec<[Option<usize>; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Triangle is not counterclockwise.
    Orientation { triangle: usize },
    /// Neighbor links disagree across an edge.
    Adjacency { triangle: usize, edge: usize },
    /// A point lies strictly inside a triangle's circumcircle.
    Circumcircle { triangle: usize, point: usize },
}

const GHOST: usize = usize::MAX;

#[derive(Debug, Clone)]
struct MeshTri {
    v: [usize; 3],
    n: [Option<usize>; 3],
    alive: bool,
}

impl MeshTri {
    fn is_ghost(&self) -> bool {
        self.v[2] == GHOST
    }

    /// Slot whose opposite edge equals the directed edge `(a, b)`.
    fn slot_of_edge(&self, a: usize, b: usize) -> Option<usize> {
        (0..3).find(|&k| self.v[(k + 1) % 3] == a && self.v[(k + 2) % 3] == b)
    }
}

struct Mesh<'a> {
    pts: &'a [Point],
    tris: Vec<MeshTri>,
}

impl<'a> Mesh<'a> {
    fn point(&self, v: usize) -> Point {
        self.pts[v]
    }

    /// Whether inserting `p` must remove triangle `t`.
    fn conflicts(&self, t: &MeshTri, p: Point) -> bool {
        if t.is_ghost() {
            // Stored as (u, v, GHOST) where (v, u) is the hull edge with the
            // interior on its left. Conflict when p is strictly beyond the
            // edge, or exactly on the hull edge line within the open segment.
            let u = self.point(t.v[0]);
            let v = self.point(t.v[1]);
            match orientation(u, v, p) {
                Orientation::CounterClockwise => true,
                Orientation::Clockwise => false,
                Orientation::Collinear => strictly_between(v, u, p),
            }
        } else {
            let a = self.point(t.v[0]);
            let b = self.point(t.v[1]);
            let c = self.point(t.v[2]);
            incircle_test(a, b, c, p) == Ok(InCircle::Inside)
        }
    }

    /// Walk from `start` toward `p` across real triangles; returns a
    /// triangle in conflict with `p` (stepping out of the hull lands on the
    /// ghost owning the crossed hull edge, which conflicts by construction).
    fn locate<R: rand::Rng>(&self, mut current: usize, p: Point, rng: &mut R) -> Option<usize> {
        let mut steps = 0usize;
        let cap = 4 * self.tris.len() + 16;
        loop {
            steps += 1;
            if steps > cap {
                return None;
            }
            let tri = &self.tris[current];
            if tri.is_ghost() {
                return Some(current);
            }
            // Collect edges with p strictly on the outside.
            let mut exits = [0usize; 3];
            let mut n_exits = 0;
            for k in 0..3 {
                let u = self.point(tri.v[(k + 1) % 3]);
                let v = self.point(tri.v[(k + 2) % 3]);
                if orientation(u, v, p) == Orientation::Clockwise {
                    exits[n_exits] = k;
                    n_exits += 1;
                }
            }
            if n_exits == 0 {
                // Inside or on the boundary: p is strictly inside the
                // circumcircle, so this triangle conflicts.
                return Some(current);
            }
            // Stochastic choice among exits avoids degenerate walk cycles.
            let k = exits[if n_exits == 1 {
                0
            } else {
                rng.random_range(0..n_exits)
            }];
            current = self.tris[current].n[k].expect("ghost ring closes the mesh");
        }
    }

    /// All conflicting triangles, grown from a seed by adjacency (the
    /// conflict region of a point in a Delaunay mesh is connected).
    fn cavity_from(&self, seed: usize, p: Point) -> Vec<usize> {
        let mut cavity = Vec::new();
        let mut seen = vec![false; self.tris.len()];
        let mut stack = vec![seed];
        seen[seed] = true;
        while let Some(ti) = stack.pop() {
            if !self.tris[ti].alive || !self.conflicts(&self.tris[ti], p) {
                continue;
            }
            cavity.push(ti);
            for k in 0..3 {
                if let Some(n) = self.tris[ti].n[k] {
                    if !seen[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
        }
        cavity
    }

    fn insert<R: rand::Rng>(&mut self, p_idx: usize, start: usize, rng: &mut R) -> usize {
        let p = self.pts[p_idx];
        let cavity: Vec<usize> = match self.locate(start, p, rng) {
            Some(seed) if self.conflicts(&self.tris[seed], p) => self.cavity_from(seed, p),
            // Walk cap exhausted or a non-conflicting seed: fall back to a
            // full scan rather than corrupt the mesh.
            _ => (0..self.tris.len())
                .filter(|&i| self.tris[i].alive && self.conflicts(&self.tris[i], p))
                .collect(),
        };
        debug_assert!(!cavity.is_empty(), "every point conflicts with something");
        debug_assert_eq!(
            {
                let mut c = cavity.clone();
                c.sort_unstable();
                c
            },
            (0..self.tris.len())
                .filter(|&i| self.tris[i].alive && self.conflicts(&self.tris[i], p))
                .collect::<Vec<_>>(),
            "walk+BFS cavity must equal the full conflict scan"
        );
        for &ti in &cavity {
            self.tris[ti].alive = false;
        }

        // Boundary edges of the cavity, each with its surviving outer neighbor.
        let mut boundary: Vec<(usize, usize, Option<usize>)> = Vec::new();
        for &ti in &cavity {
            for k in 0..3 {
                let a = self.tris[ti].v[(k + 1) % 3];
                let b = self.tris[ti].v[(k + 2) % 3];
                let outer = self.tris[ti].n[k];
                if outer.map(|o| self.tris[o].alive).unwrap_or(true) {
                    boundary.push((a, b, outer));
                }
            }
        }

        // One new triangle per boundary edge, with the new point replacing
        // the removed interior. Ghost triangles stay canonical: GHOST last.
        let mut edge_map: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        let mut first_real = None;
        for (a, b, outer) in boundary {
            let verts = if a == GHOST {
                [b, p_idx, GHOST]
            } else if b == GHOST {
                [p_idx, a, GHOST]
            } else {
                [a, b, p_idx]
            };
            let id = self.tris.len();
            self.tris.push(MeshTri {
                v: verts,
                n: [None; 3],
                alive: true,
            });
            if verts[2] != GHOST && first_real.is_none() {
                first_real = Some(id);
            }
            let slot = self.tris[id].slot_of_edge(a, b).expect("edge preserved");
            self.tris[id].n[slot] = outer;
            if let Some(o) = outer {
                let oslot = self.tris[o].slot_of_edge(b, a).expect("outer edge");
                self.tris[o].n[oslot] = Some(id);
            }
            // Pair the remaining two edges with sibling new triangles.
            for k in 0..3 {
                if k == slot {
                    continue;
                }
                let ea = self.tris[id].v[(k + 1) % 3];
                let eb = self.tris[id].v[(k + 2) % 3];
                if let Some(&(t2, k2)) = edge_map.get(&(eb, ea)) {
                    self.tris[id].n[k] = Some(t2);
                    self.tris[t2].n[k2] = Some(id);
                } else {
                    edge_map.insert((ea, eb), (id, k));
                }
            }
        }
        first_real.expect("a cavity always exposes at least one real edge")
    }
}

fn strictly_between(a: Point, b: Point, p: Point) -> bool {
    // Assumes p collinear with a, b; compares along the dominant axis.
    if (b.x - a.x).abs() >= (b.y - a.y).abs() {
        (a.x < p.x && p.x < b.x) || (b.x < p.x && p.x < a.x)
    } else {
        (a.y < p.y && p.y < b.y) || (b.y < p.y && p.y < a.y)
    }
}

/// Build a Delaunay triangulation by randomized incremental insertion.
pub fn triangulate(points: &[Point]) -> Result<Triangulation, DelaunayError> {
    if points.len() < 3 {
        return Err(DelaunayError::TooFewPoints(points.len()));
    }
    for (i, p) in points.iter().enumerate() {
        if !p.is_finite() {
            return Err(DelaunayError::NonFinite(i));
        }
    }
    {
        let mut seen: HashMap<(u64, u64), usize> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if seen.insert((p.x.to_bits(), p.y.to_bits()), i).is_some() {
                return Err(DelaunayError::DuplicatePoint(i));
            }
        }
    }

    let mut order: Vec<usize> = (0..points.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    order.shuffle(&mut rng);

    // Seed triangle: the first two points plus the first non-collinear third.
    let i0 = order[0];
    let i1 = order[1];
    let third = order[2..]
        .iter()
        .position(|&i| orientation(points[i0], points[i1], points[i]) != Orientation::Collinear);
    let Some(third) = third else {
        return Err(DelaunayError::AllCollinear);
    };
    let i2 = order.remove(2 + third);

    let (a, b) = if orientation(points[i0], points[i1], points[i2]) == Orientation::CounterClockwise
    {
        (i0, i1)
    } else {
        (i1, i0)
    };
    let mut mesh = Mesh {
        pts: points,
        tris: Vec::with_capacity(points.len() * 4),
    };
    // Real triangle 0 plus one ghost per hull edge.
    mesh.tris.push(MeshTri {
        v: [a, b, i2],
        n: [Some(3), Some(2), Some(1)],
        alive: true,
    });
    mesh.tris.push(MeshTri {
        v: [b, a, GHOST],
        n: [Some(2), Some(3), Some(0)],
        alive: true,
    });
    mesh.tris.push(MeshTri {
        v: [a, i2, GHOST],
        n: [Some(3), Some(1), Some(0)],
        alive: true,
    });
    mesh.tris.push(MeshTri {
        v: [i2, b, GHOST],
        n: [Some(1), Some(2), Some(0)],
        alive: true,
    });

    let mut start = 0usize;
    for &i in order[2..].iter() {
        start = mesh.insert(i, start, &mut rng);
    }

    // Drop ghosts, compact, and rebuild adjacency from scratch.
    let mut triangles = Vec::new();
    for t in mesh.tris.iter().filter(|t| t.alive && !t.is_ghost()) {
        triangles.push(t.v);
    }
    let adjacency = build_adjacency(&triangles);
    Ok(Triangulation {
        points: points.to_vec(),
        triangles,
        adjacency,
    })
}

fn build_adjacency(triangles: &[[usize; 3]]) -> Vec<[Option<usize>; 3]> {
    let mut map: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            map.insert((tri[(k + 1) % 3], tri[(k + 2) % 3]), t);
        }
    }
    triangles
        .iter()
        .map(|tri| {
            [0, 1, 2].map(|k| {
                let a = tri[(k + 1) % 3];
                let b = tri[(k + 2) % 3];
                map.get(&(b, a)).copied()
            })
        })
        .collect()
}

/// Empty-circumcircle and structural validation. Empty result means the
/// triangulation is Delaunay; points exactly on a circumcircle are legal.
pub fn validate_delaunay(t: &Triangulation) -> Vec<Violation> {
    let mut out = Vec::new();
    for (ti, tri) in t.triangles.iter().enumerate() {
        let (a, b, c) = (t.points[tri[0]], t.points[tri[1]], t.points[tri[2]]);
        if orientation(a, b, c) != Orientation::CounterClockwise {
            out.push(Violation::Orientation { triangle: ti });
            continue;
        }
        for k in 0..3 {
            if let Some(n) = t.adjacency[ti][k] {
                let va = tri[(k + 1) % 3];
                let vb = tri[(k + 2) % 3];
                let back = t
                    .triangles
                    .get(n)
                    .map(|ntri| (0..3).any(|j| ntri[(j + 1) % 3] == vb && ntri[(j + 2) % 3] == va))
                    .unwrap_or(false);
                let links_back = back && t.adjacency[n].contains(&Some(ti));
                if !links_back {
                    out.push(Violation::Adjacency {
                        triangle: ti,
                        edge: k,
                    });
                }
            }
        }
        for (pi, p) in t.points.iter().enumerate() {
            if tri.contains(&pi) {
                continue;
            }
            if incircle_test(a, b, c, *p) == Ok(InCircle::Inside) {
                out.push(Violation::Circumcircle {
                    triangle: ti,
                    point: pi,
                });
            }
        }
    }
    out
}

impl Triangulation {
    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.triangles.iter().any(|tri| {
            (0..3).any(|k| {
                (tri[k] == x && tri[(k + 1) % 3] == y) || (tri[k] == y && tri[(k + 1) % 3] == x)
            })
        })
    }

    /// Convex-hull vertex count, via boundary edges of the triangulation.
    pub fn hull_len(&self) -> usize {
        self.adjacency
            .iter()
            .map(|n| n.iter().filter(|x| x.is_none()).count())
            .sum()
    }
}

/// Triangles whose interiors the open segment `x -> y` crosses, in crossing
/// order. Returns an empty list when `xy` is an edge of the triangulation.
pub fn crossed_triangles(
    t: &Triangulation,
    x: usize,
    y: usize,
) -> Result<Vec<usize>, DelaunayError> {
    let n = t.points.len();
    if x >= n {
        return Err(DelaunayError::BadVertex(x));
    }
    if y >= n || x == y {
        return Err(DelaunayError::BadVertex(y));
    }
    if t.has_edge(x, y) {
        return Ok(Vec::new());
    }
    let px = t.points[x];
    let py = t.points[y];
    for (w, pw) in t.points.iter().enumerate() {
        if w == x || w == y {
            continue;
        }
        if orientation(px, py, *pw) == Orientation::Collinear && strictly_between(px, py, *pw) {
            return Err(DelaunayError::SegmentThroughVertex(x, y, w));
        }
    }

    // Start triangle: the one whose wedge at x strictly contains direction
    // x -> y.
    let side = |v: usize| orientation(px, py, t.points[v]);
    let mut current = None;
    for (ti, tri) in t.triangles.iter().enumerate() {
        let Some(k) = (0..3).find(|&k| tri[k] == x) else {
            continue;
        };
        let b = tri[(k + 1) % 3];
        let c = tri[(k + 2) % 3];
        if orientation(px, t.points[b], py) == Orientation::CounterClockwise
            && orientation(px, t.points[c], py) == Orientation::Clockwise
        {
            current = Some(ti);
            break;
        }
    }
    let Some(mut current) = current else {
        return Err(DelaunayError::WalkFailed(x, y));
    };

    let mut out = Vec::new();
    for _ in 0..t.triangles.len() + 1 {
        out.push(current);
        let tri = t.triangles[current];
        if tri.contains(&y) {
            return Ok(out);
        }
        // Exit edge: its CCW-directed endpoints strictly straddle the segment
        // line, start on the right, end on the left.
        let exit = (0..3).find(|&k| {
            let u = tri[(k + 1) % 3];
            let v = tri[(k + 2) % 3];
            side(u) == Orientation::Clockwise && side(v) == Orientation::CounterClockwise
        });
        let Some(exit) = exit else {
            return Err(DelaunayError::WalkFailed(x, y));
        };
        let Some(next) = t.adjacency[current][exit] else {
            return Err(DelaunayError::WalkFailed(x, y));
        };
        current = next;
    }
    Err(DelaunayError::WalkFailed(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn single_triangle() {
        let t = triangulate(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])).unwrap();
        assert_eq!(t.triangles.len(), 1);
        assert!(validate_delaunay(&t).is_empty());
    }

    #[test]
    fn cocircular_square_two_triangles() {
        let t = triangulate(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)])).unwrap();
        assert_eq!(t.triangles.len(), 2);
        assert!(validate_delaunay(&t).is_empty());
    }

    #[test]
    fn interior_point_three_triangles() {
        let t = triangulate(&pts(&[(0.0, 0.0), (3.0, 0.0), (0.0, 3.0), (1.0, 1.0)])).unwrap();
        assert_eq!(t.triangles.len(), 3);
        // Brute-force empty-circumcircle check of every point against every
        // triangle, independent of validate_delaunay.
        for tri in &t.triangles {
            for (pi, p) in t.points.iter().enumerate() {
                if tri.contains(&pi) {
                    continue;
                }
                let r = incircle_test(t.points[tri[0]], t.points[tri[1]], t.points[tri[2]], *p)
                    .unwrap();
                assert_ne!(r, InCircle::Inside);
            }
        }
        assert!(validate_delaunay(&t).is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            triangulate(&pts(&[(0.0, 0.0), (1.0, 0.0)])),
            Err(DelaunayError::TooFewPoints(2))
        );
        assert_eq!(
            triangulate(&pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (3.0, 3.0)])),
            Err(DelaunayError::AllCollinear)
        );
        assert!(matches!(
            triangulate(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 0.0)])),
            Err(DelaunayError::DuplicatePoint(_))
        ));
    }

    /// The kite A(0,0) B(10,0) C(5,1) D(5,-1): the CD diagonal is the
    /// Delaunay choice, AB is not.
    fn kite() -> Vec<Point> {
        pts(&[(0.0, 0.0), (10.0, 0.0), (5.0, 1.0), (5.0, -1.0)])
    }

    #[test]
    fn kite_flagged_and_fixed() {
        let points = kite();
        // Hand-built wrong diagonal: both triangles violate the circle test
        // (circumcircle of ABC is centered (5,-12) with radius 13 and
        // contains D; symmetric for ABD).
        let bad = Triangulation {
            points: points.clone(),
            triangles: vec![[0, 1, 2], [0, 3, 1]],
            adjacency: build_adjacency(&[[0, 1, 2], [0, 3, 1]]),
        };
        let v = validate_delaunay(&bad);
        let flagged: Vec<usize> = v
            .iter()
            .filter_map(|x| match x {
                Violation::Circumcircle { triangle, .. } => Some(*triangle),
                _ => None,
            })
            .collect();
        assert!(flagged.contains(&0) && flagged.contains(&1));

        // Correct diagonal (CCW triples): circumcircle of ACD is centered
        // (2.6, 0) with radius 2.6 and excludes B.
        let good = Triangulation {
            points: points.clone(),
            triangles: vec![[0, 3, 2], [1, 2, 3]],
            adjacency: build_adjacency(&[[0, 3, 2], [1, 2, 3]]),
        };
        assert!(validate_delaunay(&good).is_empty());

        let t = triangulate(&points).unwrap();
        assert_eq!(t.triangles.len(), 2);
        assert!(validate_delaunay(&t).is_empty());
        assert!(t.has_edge(2, 3));
        assert!(!t.has_edge(0, 1));
    }

    #[test]
    fn structural_defects_get_distinct_kinds() {
        let points = kite();
        // Clockwise triple.
        let cw = Triangulation {
            points: points.clone(),
            triangles: vec![[0, 2, 3]],
            adjacency: vec![[None; 3]],
        };
        assert!(matches!(
            validate_delaunay(&cw)[0],
            Violation::Orientation { triangle: 0 }
        ));
        // Dangling neighbor link.
        let broken = Triangulation {
            points,
            triangles: vec![[0, 3, 2]],
            adjacency: vec![[Some(0), None, None]],
        };
        assert!(validate_delaunay(&broken)
            .iter()
            .any(|v| matches!(v, Violation::Adjacency { triangle: 0, .. })));
    }

    #[test]
    fn crossed_triangles_kite() {
        let t = triangulate(&kite()).unwrap();
        let seq = crossed_triangles(&t, 0, 1).unwrap();
        assert_eq!(seq.len(), 2);
        // First triangle contains A, second contains B.
        assert!(t.triangles[seq[0]].contains(&0));
        assert!(t.triangles[seq[1]].contains(&1));
        // Reversed query gives the reversed sequence.
        let rev = crossed_triangles(&t, 1, 0).unwrap();
        assert_eq!(rev, vec![seq[1], seq[0]]);
    }

    #[test]
    fn crossed_triangles_edge_is_empty() {
        let t = triangulate(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])).unwrap();
        assert_eq!(crossed_triangles(&t, 0, 1).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn crossed_triangles_through_vertex_is_degenerate() {
        // Segment from (0,0) to (2,0) passes exactly through (1,0).
        let t = triangulate(&pts(&[
            (0.0, 0.0),
            (1.0, 0.0),
            (2.0, 0.0),
            (1.0, 1.0),
            (1.0, -1.0),
        ]))
        .unwrap();
        assert_eq!(
            crossed_triangles(&t, 0, 2),
            Err(DelaunayError::SegmentThroughVertex(0, 2, 1))
        );
    }
}
