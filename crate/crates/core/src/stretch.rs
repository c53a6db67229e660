//! Exact graph shortest paths on triangulation edges and the stretch factor
//! over all vertex pairs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::delaunay::Triangulation;
use crate::geom::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StretchError {
    #[error("vertex index {0} out of range")]
    BadVertex(usize),
    #[error("no path between {0} and {1}")]
    Unreachable(usize, usize),
    #[error("need at least 2 points")]
    TooFewPoints,
}

/// Undirected weighted graph on the triangulation's vertices; weights are
/// Euclidean edge lengths.
#[derive(Debug, Clone)]
pub struct EdgeGraph {
    pub adjacency: Vec<Vec<(usize, f64)>>,
}

impl EdgeGraph {
    pub fn from_triangulation(t: &Triangulation) -> Self {
        let mut adjacency = vec![Vec::new(); t.points.len()];
        let mut seen = std::collections::HashSet::new();
        for tri in &t.triangles {
            for k in 0..3 {
                let a = tri[k];
                let b = tri[(k + 1) % 3];
                let key = (a.min(b), a.max(b));
                if seen.insert(key) {
                    let w = t.points[a].dist(t.points[b]);
                    adjacency[a].push((b, w));
                    adjacency[b].push((a, w));
                }
            }
        }
        for list in &mut adjacency {
            list.sort_by_key(|x| x.0);
        }
        EdgeGraph { adjacency }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }
}

#[derive(Copy, Clone, PartialEq)]
struct HeapEntry {
    cost: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed, so the BinaryHeap pops the cheapest entry first.
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest path distances; unreachable nodes get infinity.
pub fn dijkstra(g: &EdgeGraph, src: usize) -> Vec<f64> {
    let n = g.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(HeapEntry {
        cost: 0.0,
        node: src,
    });
    while let Some(HeapEntry { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        for &(next, w) in &g.adjacency[node] {
            let c = cost + w;
            if c < dist[next] {
                dist[next] = c;
                heap.push(HeapEntry {
                    cost: c,
                    node: next,
                });
            }
        }
    }
    dist
}

pub fn shortest_path_length(g: &EdgeGraph, src: usize, dst: usize) -> Result<f64, StretchError> {
    if src >= g.len() {
        return Err(StretchError::BadVertex(src));
    }
    if dst >= g.len() {
        return Err(StretchError::BadVertex(dst));
    }
    let d = dijkstra(g, src)[dst];
    if d.is_finite() {
        Ok(d)
    } else {
        Err(StretchError::Unreachable(src, dst))
    }
}

/// Stretch factor of a triangulation with the pair attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StretchReport {
    pub stretch: f64,
    pub witness: [usize; 2],
    pub n: usize,
}

fn best_from_source(points: &[Point], g: &EdgeGraph, src: usize) -> (f64, [usize; 2]) {
    let dist = dijkstra(g, src);
    let mut best = (1.0, [src, src]);
    for dst in src + 1..points.len() {
        let euclid = points[src].dist(points[dst]);
        let ratio = dist[dst] / euclid;
        if ratio > best.0 {
            best = (ratio, [src, dst]);
        }
    }
    best
}

fn merge(a: (f64, [usize; 2]), b: (f64, [usize; 2])) -> (f64, [usize; 2]) {
    // Max by value; lexicographic witness tie-break keeps the merge
    // deterministic regardless of evaluation order.
    if a.0 > b.0 || (a.0 == b.0 && a.1 <= b.1) {
        a
    } else {
        b
    }
}

/// Sequential all-pairs stretch factor: one Dijkstra per source.
pub fn stretch_factor_serial(t: &Triangulation) -> Result<StretchReport, StretchError> {
    if t.points.len() < 2 {
        return Err(StretchError::TooFewPoints);
    }
    let g = EdgeGraph::from_triangulation(t);
    let best = (0..t.points.len())
        .map(|src| best_from_source(&t.points, &g, src))
        .fold((1.0, [0, 0]), merge);
    Ok(StretchReport {
        stretch: best.0,
        witness: best.1,
        n: t.points.len(),
    })
}

/// All-pairs stretch factor; per-source searches run in parallel when the
/// `parallel` feature is enabled.
pub fn stretch_factor(t: &Triangulation) -> Result<StretchReport, StretchError> {
    #[cfg(feature = "parallel")]
    {
        if t.points.len() < 2 {
            return Err(StretchError::TooFewPoints);
        }
        let g = EdgeGraph::from_triangulation(t);
        let best = (0..t.points.len())
            .into_par_iter()
            .map(|src| best_from_source(&t.points, &g, src))
            .reduce(|| (1.0, [0, 0]), merge);
        Ok(StretchReport {
            stretch: best.0,
            witness: best.1,
            n: t.points.len(),
        })
    }
    #[cfg(not(feature = "parallel"))]
    {
        stretch_factor_serial(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::triangulate;

    fn kite() -> Triangulation {
        let pts = [(0.0, 0.0), (10.0, 0.0), (5.0, 1.0), (5.0, -1.0)]
            .iter()
            .map(|&(x, y)| Point::new(x, y))
            .collect::<Vec<_>>();
        triangulate(&pts).unwrap()
    }

    /// Brute-force shortest path by enumerating all simple paths.
    fn brute_shortest(g: &EdgeGraph, src: usize, dst: usize) -> f64 {
        fn rec(g: &EdgeGraph, at: usize, dst: usize, seen: &mut Vec<bool>, acc: f64) -> f64 {
            if at == dst {
                return acc;
            }
            let mut best = f64::INFINITY;
            for &(next, w) in &g.adjacency[at] {
                if !seen[next] {
                    seen[next] = true;
                    best = best.min(rec(g, next, dst, seen, acc + w));
                    seen[next] = false;
                }
            }
            best
        }
        let mut seen = vec![false; g.len()];
        seen[src] = true;
        rec(g, src, dst, &mut seen, 0.0)
    }

    #[test]
    fn direct_edge_and_self() {
        let pts: Vec<Point> = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
            .iter()
            .map(|&(x, y)| Point::new(x, y))
            .collect();
        let t = triangulate(&pts).unwrap();
        let g = EdgeGraph::from_triangulation(&t);
        assert_eq!(shortest_path_length(&g, 0, 1).unwrap(), 1.0);
        assert_eq!(shortest_path_length(&g, 2, 2).unwrap(), 0.0);
    }

    #[test]
    fn kite_path_matches_brute_force() {
        let t = kite();
        let g = EdgeGraph::from_triangulation(&t);
        let d = shortest_path_length(&g, 0, 1).unwrap();
        let expected = 2.0 * 26.0_f64.sqrt();
        assert!((d - expected).abs() < 1e-12, "got {d}");
        assert!((d - brute_shortest(&g, 0, 1)).abs() < 1e-12);
    }

    #[test]
    fn kite_stretch_report() {
        let t = kite();
        let r = stretch_factor(&t).unwrap();
        assert!((r.stretch - 2.0 * 26.0_f64.sqrt() / 10.0).abs() < 1e-12);
        assert_eq!(r.witness, [0, 1]);
        assert_eq!(r.n, 4);
        let s = stretch_factor_serial(&t).unwrap();
        assert_eq!(s, r);
    }

    #[test]
    fn single_triangle_stretch_is_one() {
        let pts: Vec<Point> = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
            .iter()
            .map(|&(x, y)| Point::new(x, y))
            .collect();
        let t = triangulate(&pts).unwrap();
        assert_eq!(stretch_factor(&t).unwrap().stretch, 1.0);
    }

    #[test]
    fn unreachable_is_reported() {
        let g = EdgeGraph {
            adjacency: vec![vec![], vec![]],
        };
        assert_eq!(
            shortest_path_length(&g, 0, 1),
            Err(StretchError::Unreachable(0, 1))
        );
    }

    #[test]
    fn report_serializes_to_expected_shape() {
        let r = StretchReport {
            stretch: 1.25,
            witness: [2, 7],
            n: 9,
        };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"stretch":1.25,"witness":[2,7],"n":9}"#);
    }
}
