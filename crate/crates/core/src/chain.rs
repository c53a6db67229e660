//! Chains of circles: validation, gate/arc decomposition, the rubber-band
//! polyline threading the gates, the arc shortest path, chain stretch, and
//! extraction of a chain from a triangulation.
//!
//! A chain is an ordered list of distinct circles where consecutive circles
//! intersect and, on each interior circle, the two boundary arcs lying inside
//! the neighbors share at most a boundary point. The intersection points of
//! joint `i` are labeled `a_i`, `b_i` with all `a`s on one side.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::delaunay::{crossed_triangles, DelaunayError, Triangulation};
use crate::geom::{
    ccw_sweep, circle_intersection, circumcircle, cross2, Circle, CircleIntersection, GeomError,
    Point,
};

/// Relative tolerance for coincident points, gate degeneracy, and obstruction
/// witnesses. Scaled by a local radius wherever it is used.
pub const CHAIN_EPS: f64 = 1e-9;

const ANG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("a chain needs at least one circle")]
    Empty,
    #[error("circles {0} and {1} are identical")]
    DuplicateCircles(usize, usize),
    #[error("consecutive circles {0} and {1} do not share boundary points")]
    Property1(usize, usize),
    #[error("connecting arcs overlap on circle {0}")]
    Property2(usize),
    #[error("could not make the a-side labels consistent at circle {0}")]
    LabelRepairFailed(usize),
    #[error("terminal {0} is not on the boundary of its end circle")]
    TerminalNotOnCircle(&'static str),
    #[error("terminal {0} lies strictly inside the neighboring circle")]
    TerminalInsideNeighbor(&'static str),
    #[error("stab order is only defined for unobstructed terminals")]
    Obstructed,
    #[error("no usable terminal sample")]
    NoSample,
    #[error("extracted circle sequence failed chain validation: {0}")]
    ExtractionInconsistent(Box<ChainError>),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Delaunay(#[from] DelaunayError),
}

/// Labeled intersection of two consecutive circles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Joint {
    pub a: Point,
    pub b: Point,
    pub tangent: bool,
}

impl Joint {
    pub fn gate_length(&self) -> f64 {
        self.a.dist(self.b)
    }
}

/// A validated chain of circles.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    circles: Vec<Circle>,
    joints: Vec<Joint>,
}

/// A terminal pair: `u` on the first circle's boundary outside the second,
/// `v` symmetrically on the last.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalPair {
    pub u: Point,
    pub v: Point,
}

/// Construct and validate a chain; see [`Chain::new`].
pub fn make_chain(circles: Vec<Circle>) -> Result<Chain, ChainError> {
    Chain::new(circles)
}

impl Chain {
    pub fn new(circles: Vec<Circle>) -> Result<Self, ChainError> {
        if circles.is_empty() {
            return Err(ChainError::Empty);
        }
        for i in 0..circles.len() {
            for j in i + 1..circles.len() {
                if circles[i] == circles[j] {
                    return Err(ChainError::DuplicateCircles(i, j));
                }
            }
        }
        let mut joints = Vec::with_capacity(circles.len().saturating_sub(1));
        for i in 0..circles.len().saturating_sub(1) {
            match circle_intersection(circles[i], circles[i + 1])? {
                CircleIntersection::Disjoint => return Err(ChainError::Property1(i, i + 1)),
                CircleIntersection::Tangent(p) => joints.push(Joint {
                    a: p,
                    b: p,
                    tangent: true,
                }),
                CircleIntersection::Pair(left, right) => joints.push(Joint {
                    a: left,
                    b: right,
                    tangent: false,
                }),
            }
        }
        let mut chain = Chain { circles, joints };
        chain.check_property2()?;
        chain.repair_labels()?;
        Ok(chain)
    }

    pub fn circles(&self) -> &[Circle] {
        &self.circles
    }

    pub fn joints(&self) -> &[Joint] {
        &self.joints
    }

    pub fn len(&self) -> usize {
        self.circles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    /// The sub-chain of the first `k` circles.
    pub fn prefix(&self, k: usize) -> Result<Chain, ChainError> {
        Chain::new(self.circles[..k].to_vec())
    }

    /// The chain with circle labels reversed.
    pub fn reversed(&self) -> Chain {
        let mut circles = self.circles.clone();
        circles.reverse();
        Chain::new(circles).expect("reversal preserves chain validity")
    }

    /// Validate a terminal pair against this chain.
    pub fn terminals(&self, u: Point, v: Point) -> Result<TerminalPair, ChainError> {
        let first = self.circles[0];
        let last = *self.circles.last().unwrap();
        let on = |c: Circle, p: Point| (c.center.dist(p) - c.radius).abs() <= CHAIN_EPS * c.radius;
        if !on(first, u) {
            return Err(ChainError::TerminalNotOnCircle("u"));
        }
        if !on(last, v) {
            return Err(ChainError::TerminalNotOnCircle("v"));
        }
        if self.len() >= 2 {
            if self.circles[1].strictly_contains(u, CHAIN_EPS) {
                return Err(ChainError::TerminalInsideNeighbor("u"));
            }
            if self.circles[self.len() - 2].strictly_contains(v, CHAIN_EPS) {
                return Err(ChainError::TerminalInsideNeighbor("v"));
            }
        }
        Ok(TerminalPair { u, v })
    }

    /// The boundary arc of `circles[i]` lying inside its neighbor across
    /// `joints[joint]`, as a CCW angular interval `(start, sweep)`. Zero
    /// sweep at tangency.
    pub(crate) fn connecting_interval(&self, i: usize, joint: usize) -> (f64, f64) {
        let c = self.circles[i];
        let j = &self.joints[joint];
        let other = if joint == i {
            self.circles[i + 1]
        } else {
            self.circles[i - 1]
        };
        if j.tangent || j.gate_length() <= CHAIN_EPS * c.radius {
            return (c.angle_of(j.a), 0.0);
        }
        let ta = c.angle_of(j.a);
        let tb = c.angle_of(j.b);
        let sweep_ab = ccw_sweep(ta, tb);
        let mid_ab = c.at_angle(ta + sweep_ab / 2.0);
        if other.contains(mid_ab) {
            (ta, sweep_ab)
        } else {
            (tb, TAU - sweep_ab)
        }
    }

    fn conn_midpoint(&self, i: usize, joint: usize) -> Option<f64> {
        if self.joints[joint].tangent {
            return None;
        }
        let (s, w) = self.connecting_interval(i, joint);
        if w <= ANG_TOL {
            None
        } else {
            Some(s + w / 2.0)
        }
    }

    fn check_property2(&self) -> Result<(), ChainError> {
        for i in 1..self.len().saturating_sub(1) {
            let prev = self.connecting_interval(i, i - 1);
            let next = self.connecting_interval(i, i);
            if intervals_share_interior(prev, next) {
                return Err(ChainError::Property2(i));
            }
        }
        Ok(())
    }

    /// Reorder `a`/`b` per joint so that on every interior circle the four
    /// boundary points appear in the cyclic order (a_prev, a_next, b_next,
    /// b_prev). The seed labeling (a left of the directed center line) is
    /// usually already consistent; exotic but valid chains may need flips.
    fn repair_labels(&mut self) -> Result<(), ChainError> {
        for i in 1..self.len().saturating_sub(1) {
            if self.joints[i - 1].tangent || self.joints[i].tangent {
                continue;
            }
            let frame = |chain: &Chain| {
                circle_frame(
                    chain.circles[i],
                    chain.joints[i - 1].a,
                    chain.joints[i - 1].b,
                    chain.joints[i].a,
                    chain.joints[i].b,
                    chain.conn_midpoint(i, i - 1),
                    chain.conn_midpoint(i, i),
                )
            };
            if frame(self).is_some() {
                continue;
            }
            {
                let j = &mut self.joints[i];
                std::mem::swap(&mut j.a, &mut j.b);
            }
            if frame(self).is_none() {
                return Err(ChainError::LabelRepairFailed(i));
            }
        }
        Ok(())
    }
}

/// Whether points coincide relative to a local radius.
fn coincident(p: Point, q: Point, r: f64) -> bool {
    p.dist(q) <= CHAIN_EPS * r
}

/// Orientation and angular offsets of one circle's boundary points.
///
/// Positions are sweeps from `pa` in the frame direction (`ccw` flag). In a
/// consistent frame the boundary reads `pa, na, nb, pb` and, when present,
/// the connecting-arc midpoints fall inside their spans: the next one in
/// `[d_na, d_nb]`, the previous one in `[d_pb, 2*pi]`.
struct CircleFrame {
    ccw: bool,
    d_na: f64,
    d_nb: f64,
    d_pb: f64,
    theta_pa: f64,
    theta_pb: f64,
}

fn circle_frame(
    c: Circle,
    pa: Point,
    pb: Point,
    na: Point,
    nb: Point,
    mid_prev: Option<f64>,
    mid_next: Option<f64>,
) -> Option<CircleFrame> {
    let tp = c.angle_of(pa);
    let prev_degenerate = coincident(pb, pa, c.radius);
    for ccw in [true, false] {
        let pos = |theta: f64| {
            if ccw {
                ccw_sweep(tp, theta)
            } else {
                ccw_sweep(theta, tp)
            }
        };
        // Coincidence with pa is snapped order-aware: na closes the A arc at
        // 0, pb closes the cycle at 2*pi, and nb follows na unless the whole
        // next gate sits at pa.
        let d_na = if coincident(na, pa, c.radius) {
            0.0
        } else {
            pos(c.angle_of(na))
        };
        let d_nb = if coincident(nb, pa, c.radius) {
            if coincident(na, pa, c.radius) {
                0.0
            } else {
                TAU
            }
        } else {
            pos(c.angle_of(nb))
        };
        let d_pb = if prev_degenerate {
            TAU
        } else {
            pos(c.angle_of(pb))
        };
        if d_na > d_nb + ANG_TOL || d_nb > d_pb + ANG_TOL {
            continue;
        }
        if let Some(m) = mid_next {
            let dm = pos(m);
            if dm + ANG_TOL < d_na || dm > d_nb + ANG_TOL {
                continue;
            }
        }
        if let Some(m) = mid_prev {
            if pos(m) + ANG_TOL < d_pb {
                continue;
            }
        }
        return Some(CircleFrame {
            ccw,
            d_na,
            d_nb,
            d_pb,
            theta_pa: tp,
            theta_pb: if prev_degenerate { tp } else { c.angle_of(pb) },
        });
    }
    None
}

/// Whether two CCW angular intervals on the same circle share interior points.
fn intervals_share_interior(x: (f64, f64), y: (f64, f64)) -> bool {
    if x.1 <= ANG_TOL || y.1 <= ANG_TOL {
        return false;
    }
    let strictly_inside = |(start, sweep): (f64, f64), theta: f64| {
        let d = ccw_sweep(start, theta);
        d > ANG_TOL && d < sweep - ANG_TOL
    };
    let probes_y = [y.0, y.0 + y.1, y.0 + y.1 / 2.0];
    let probes_x = [x.0, x.0 + x.1, x.0 + x.1 / 2.0];
    probes_y.iter().any(|&t| strictly_inside(x, t))
        || probes_x.iter().any(|&t| strictly_inside(y, t))
}

/// One boundary arc of a chain circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainArc {
    pub circle: usize,
    pub start: Point,
    pub end: Point,
    pub theta_start: f64,
    /// Signed sweep in radians; positive is counterclockwise.
    pub sweep: f64,
    pub length: f64,
}

/// The A/B arc decomposition of a chain with terminals, plus the gates.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcDecomposition {
    pub a_arcs: Vec<ChainArc>,
    pub b_arcs: Vec<ChainArc>,
    pub gates: Vec<(Point, Point)>,
}

/// Decompose the chain boundary into the side paths `A_1..A_n`, `B_1..B_n`
/// and the gate chords. Arcs may degenerate to points.
pub fn arcs(chain: &Chain, t: &TerminalPair) -> Result<ArcDecomposition, ChainError> {
    let t = chain.terminals(t.u, t.v)?;
    let n = chain.len();
    let mut a_arcs = Vec::with_capacity(n);
    let mut b_arcs = Vec::with_capacity(n);
    for i in 0..n {
        let c = chain.circles[i];
        let (pa, pb) = if i == 0 {
            (t.u, t.u)
        } else {
            (chain.joints[i - 1].a, chain.joints[i - 1].b)
        };
        let (na, nb) = if i == n - 1 {
            (t.v, t.v)
        } else {
            (chain.joints[i].a, chain.joints[i].b)
        };
        let mid_prev = if i == 0 {
            None
        } else {
            chain.conn_midpoint(i, i - 1)
        };
        let mid_next = if i == n - 1 {
            None
        } else {
            chain.conn_midpoint(i, i)
        };
        let frame = circle_frame(c, pa, pb, na, nb, mid_prev, mid_next)
            .ok_or(ChainError::LabelRepairFailed(i))?;
        let sign = if frame.ccw { 1.0 } else { -1.0 };
        let arc = |start: Point, end: Point, theta_start: f64, sweep: f64| ChainArc {
            circle: i,
            start,
            end,
            theta_start,
            sweep,
            length: c.radius * sweep.abs(),
        };
        a_arcs.push(arc(pa, na, frame.theta_pa, sign * frame.d_na));
        b_arcs.push(arc(
            pb,
            nb,
            frame.theta_pb,
            -sign * (frame.d_pb - frame.d_nb).max(0.0),
        ));
    }
    let gates = chain.joints.iter().map(|j| (j.a, j.b)).collect();
    Ok(ArcDecomposition {
        a_arcs,
        b_arcs,
        gates,
    })
}

/// The shortest polyline from `u` to `v` whose i-th vertex lies on gate `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RubberBand {
    /// `u`, one point per gate, `v`.
    pub vertices: Vec<Point>,
    pub length: f64,
    pub obstructed: bool,
    /// Gate indices (0-based) where the polyline touches a gate endpoint.
    pub witnesses: Vec<usize>,
}

/// Taut shortest polyline threading the ordered gates (funnel algorithm).
pub fn rubber_band(chain: &Chain, t: &TerminalPair) -> Result<RubberBand, ChainError> {
    let t = chain.terminals(t.u, t.v)?;
    let n = chain.len();
    if n == 1 {
        return Ok(RubberBand {
            vertices: vec![t.u, t.v],
            length: t.u.dist(t.v),
            obstructed: false,
            witnesses: Vec::new(),
        });
    }
    // Orient each gate (left, right) relative to the forward crossing
    // direction, which has a positive component along the center line.
    let portals: Vec<(Point, Point)> = chain
        .joints
        .iter()
        .enumerate()
        .map(|(i, j)| {
            let o1 = chain.circles[i].center;
            let o2 = chain.circles[i + 1].center;
            let dx = o2.x - o1.x;
            let dy = o2.y - o1.y;
            let abx = j.a.x - j.b.x;
            let aby = j.a.y - j.b.y;
            if dx * aby - dy * abx > 0.0 {
                (j.a, j.b)
            } else {
                (j.b, j.a)
            }
        })
        .collect();
    let m = portals.len();

    let bends = funnel(t.u, &portals, t.v);

    // Anchor points (u, interior bends, v) tagged with gate positions; gates
    // strictly between consecutive anchors are crossed straight.
    let mut anchors: Vec<(Point, i64)> = Vec::with_capacity(bends.len() + 2);
    anchors.push((t.u, -1));
    anchors.extend(bends.iter().map(|&(p, i)| (p, i as i64)));
    anchors.push((t.v, m as i64));

    let mut vertices = Vec::with_capacity(m + 2);
    vertices.push(t.u);
    for w in anchors.windows(2) {
        let (p, ip) = w[0];
        let (q, iq) = w[1];
        for g in (ip + 1)..iq {
            let g = g as usize;
            vertices.push(gate_point(p, q, portals[g], chain.circles[g].radius));
        }
        // The bend itself sits on gate iq (skip the goal anchor, and skip a
        // duplicate bend on the same gate).
        if iq < m as i64 && vertices.len() as i64 == iq + 1 {
            vertices.push(q);
        }
    }
    vertices.push(t.v);
    debug_assert_eq!(vertices.len(), m + 2);

    let mut length = 0.0;
    for w in anchors.windows(2) {
        length += w[0].0.dist(w[1].0);
    }

    let mut witnesses = Vec::new();
    for (g, j) in chain.joints.iter().enumerate() {
        let scale = chain.circles[g].radius.max(chain.circles[g + 1].radius);
        let p = vertices[g + 1];
        if p.dist(j.a) <= CHAIN_EPS * scale || p.dist(j.b) <= CHAIN_EPS * scale {
            witnesses.push(g);
        }
    }
    Ok(RubberBand {
        vertices,
        length,
        obstructed: !witnesses.is_empty(),
        witnesses,
    })
}

/// Intersection of segment `p -> q` with a gate, clamped to the gate.
fn gate_point(p: Point, q: Point, gate: (Point, Point), scale: f64) -> Point {
    let (a, b) = gate;
    let glen_sq = a.dist_sq(b);
    if glen_sq <= (CHAIN_EPS * scale) * (CHAIN_EPS * scale) {
        return a;
    }
    let denom = cross2(p, q, b) - cross2(p, q, a);
    let mut s = if denom != 0.0 {
        -cross2(p, q, a) / denom
    } else {
        0.5
    };
    s = s.clamp(0.0, 1.0);
    Point::new(a.x + s * (b.x - a.x), a.y + s * (b.y - a.y))
}

/// String-pulling over ordered portals. Returns the interior bend points,
/// each tagged with the portal index it lies on.
fn funnel(start: Point, portals: &[(Point, Point)], goal: Point) -> Vec<(Point, usize)> {
    let m = portals.len();
    let mut bends: Vec<(Point, usize)> = Vec::new();
    let (mut apex, mut left, mut right) = (start, start, start);
    let (mut left_i, mut right_i) = (0usize, 0usize);
    let mut i = 0usize;
    while i <= m {
        let (pl, pr) = if i < m { portals[i] } else { (goal, goal) };
        // Tighten the right boundary.
        if cross2(apex, right, pr) >= 0.0 {
            if apex == right || cross2(apex, left, pr) <= 0.0 {
                right = pr;
                right_i = i;
            } else {
                // Right crossed over left: the path turns at the left point.
                bends.push((left, left_i));
                apex = left;
                right = apex;
                right_i = left_i;
                i = left_i + 1;
                continue;
            }
        }
        // Tighten the left boundary.
        if cross2(apex, left, pl) <= 0.0 {
            if apex == left || cross2(apex, right, pl) >= 0.0 {
                left = pl;
                left_i = i;
            } else {
                bends.push((right, right_i));
                apex = right;
                left = apex;
                left_i = right_i;
                i = right_i + 1;
                continue;
            }
        }
        i += 1;
    }
    bends
}

/// Whether the segment `u -> v` enters and exits the chain circles in order.
/// Entry/exit parameters along the segment are compared with a small slack.
pub fn stab_order(chain: &Chain, t: &TerminalPair) -> Result<bool, ChainError> {
    let band = rubber_band(chain, t)?;
    if band.obstructed {
        return Err(ChainError::Obstructed);
    }
    let dx = t.v.x - t.u.x;
    let dy = t.v.y - t.u.y;
    let len_sq = dx * dx + dy * dy;
    if len_sq == 0.0 {
        return Ok(true);
    }
    let mut entries = Vec::with_capacity(chain.len());
    let mut exits = Vec::with_capacity(chain.len());
    for c in chain.circles() {
        let ux = t.u.x - c.center.x;
        let uy = t.u.y - c.center.y;
        let b = 2.0 * (dx * ux + dy * uy);
        let e = ux * ux + uy * uy - c.radius * c.radius;
        let disc = b * b - 4.0 * len_sq * e;
        if disc < -CHAIN_EPS * c.radius * c.radius {
            return Ok(false);
        }
        let s = disc.max(0.0).sqrt();
        entries.push((-b - s) / (2.0 * len_sq));
        exits.push((-b + s) / (2.0 * len_sq));
    }
    let tol = 1e-9;
    for i in 0..chain.len() {
        for j in i + 1..chain.len() {
            if entries[i] > entries[j] + tol || exits[i] > exits[j] + tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Edge of an arc path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcPathEdge {
    ArcA(usize),
    ArcB(usize),
    Gate(usize),
}

/// Shortest route from `u` to `v` along boundary arcs and gate chords.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcPath {
    pub length: f64,
    pub edges: Vec<ArcPathEdge>,
    pub vertices: Vec<Point>,
}

/// Dijkstra over the finite graph with vertices `{u, v, a_i, b_i}` and edges
/// `{A_i, B_i, gates}`.
pub fn arc_path(chain: &Chain, t: &TerminalPair) -> Result<ArcPath, ChainError> {
    let dec = arcs(chain, t)?;
    let n = chain.len();
    // Node ids: 0 = u; 2j+1 = a_j, 2j+2 = b_j for gate j; the last id = v.
    let node_count = 2 * (n - 1) + 2;
    let last = node_count - 1;
    let a_node = |i: usize| if i == 0 { 0 } else { 2 * (i - 1) + 1 };
    let b_node = |i: usize| if i == 0 { 0 } else { 2 * (i - 1) + 2 };
    let mut points = vec![Point::new(0.0, 0.0); node_count];
    points[0] = t.u;
    points[last] = t.v;
    for (j, joint) in chain.joints.iter().enumerate() {
        points[2 * j + 1] = joint.a;
        points[2 * j + 2] = joint.b;
    }

    let mut edges: Vec<(usize, usize, f64, ArcPathEdge)> = Vec::new();
    for i in 0..n {
        let (to_a, to_b) = if i == n - 1 {
            (last, last)
        } else {
            (2 * i + 1, 2 * i + 2)
        };
        edges.push((a_node(i), to_a, dec.a_arcs[i].length, ArcPathEdge::ArcA(i)));
        edges.push((b_node(i), to_b, dec.b_arcs[i].length, ArcPathEdge::ArcB(i)));
    }
    for (j, gate) in dec.gates.iter().enumerate() {
        edges.push((
            2 * j + 1,
            2 * j + 2,
            gate.0.dist(gate.1),
            ArcPathEdge::Gate(j),
        ));
    }

    let mut adj: Vec<Vec<(usize, f64, ArcPathEdge)>> = vec![Vec::new(); node_count];
    for &(x, y, w, label) in &edges {
        adj[x].push((y, w, label));
        adj[y].push((x, w, label));
    }

    // Dense Dijkstra with deterministic scan order; the graph is tiny.
    let mut dist = vec![f64::INFINITY; node_count];
    let mut pred: Vec<Option<(usize, ArcPathEdge)>> = vec![None; node_count];
    let mut done = vec![false; node_count];
    dist[0] = 0.0;
    for _ in 0..node_count {
        let mut cur = None;
        for k in 0..node_count {
            if !done[k]
                && dist[k].is_finite()
                && cur.map(|c: usize| dist[k] < dist[c]).unwrap_or(true)
            {
                cur = Some(k);
            }
        }
        let Some(cur) = cur else { break };
        done[cur] = true;
        for &(next, w, label) in &adj[cur] {
            if dist[cur] + w < dist[next] {
                dist[next] = dist[cur] + w;
                pred[next] = Some((cur, label));
            }
        }
    }

    let mut path_edges = Vec::new();
    let mut vertices = vec![points[last]];
    let mut at = last;
    while let Some((prev, label)) = pred[at] {
        path_edges.push(label);
        vertices.push(points[prev]);
        at = prev;
    }
    path_edges.reverse();
    vertices.reverse();
    Ok(ArcPath {
        length: dist[last],
        edges: path_edges,
        vertices,
    })
}

/// Sampled lower-bound estimate of the chain stretch factor
/// `max |P|/|D|` over terminal pairs, with local golden-section refinement.
pub fn chain_stretch(
    chain: &Chain,
    samples_per_arc: usize,
    refine_iters: usize,
) -> Result<(f64, TerminalPair), ChainError> {
    let samples = samples_per_arc.max(8);
    let n = chain.len();
    let first = chain.circles[0];
    let last = chain.circles[n - 1];

    // Permissible terminal arcs: the boundary minus the open connecting arc
    // toward the neighbor (the whole circle when n = 1).
    let u_arc = permissible_arc_of(chain, true);
    let v_arc = permissible_arc_of(chain, false);

    let ratio = |tu: f64, tv: f64| -> Result<Option<(f64, TerminalPair)>, ChainError> {
        let u = first.at_angle(tu);
        let v = last.at_angle(tv);
        let t = TerminalPair { u, v };
        let d = rubber_band(chain, &t)?;
        if d.length <= 1e-9 * first.radius {
            return Ok(None);
        }
        let p = arc_path(chain, &t)?;
        Ok(Some((p.length / d.length, t)))
    };

    let u_angles = sample_angles(u_arc, samples, n == 1);
    let v_angles = sample_angles(v_arc, samples, n == 1);
    // Grid cells are independent; evaluate them in parallel when enabled and
    // pick the best sequentially so the result is order-independent.
    #[cfg(feature = "parallel")]
    let evaluated: Result<Vec<Option<(f64, TerminalPair)>>, ChainError> = {
        use rayon::prelude::*;
        (0..u_angles.len() * v_angles.len())
            .into_par_iter()
            .map(|k| ratio(u_angles[k / v_angles.len()], v_angles[k % v_angles.len()]))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let evaluated: Result<Vec<Option<(f64, TerminalPair)>>, ChainError> = (0..u_angles.len()
        * v_angles.len())
        .map(|k| ratio(u_angles[k / v_angles.len()], v_angles[k % v_angles.len()]))
        .collect();
    let mut best: Option<(f64, TerminalPair, f64, f64)> = None;
    for (k, cell) in evaluated?.into_iter().enumerate() {
        if let Some((r, t)) = cell {
            if best.as_ref().map(|b| r > b.0).unwrap_or(true) {
                best = Some((
                    r,
                    t,
                    u_angles[k / v_angles.len()],
                    v_angles[k % v_angles.len()],
                ));
            }
        }
    }
    let Some((mut best_r, mut best_t, mut tu, mut tv)) = best else {
        return Err(ChainError::NoSample);
    };

    // Coordinate-wise golden-section around the best grid pair; the best seen
    // is kept, so refinement can only improve the estimate.
    let step_u = u_arc.1 / (samples as f64 - 1.0);
    let step_v = v_arc.1 / (samples as f64 - 1.0);
    for pass in 0..refine_iters {
        let refine_u = pass % 2 == 0;
        let (lo, hi) = if refine_u {
            (tu - step_u, tu + step_u)
        } else {
            (tv - step_v, tv + step_v)
        };
        let eval = |x: f64| -> Result<Option<(f64, TerminalPair)>, ChainError> {
            if refine_u {
                ratio(x, tv)
            } else {
                ratio(tu, x)
            }
        };
        let (x, r, t) = golden_max(lo, hi, 40, eval)?;
        if let (Some(r), Some(t)) = (r, t) {
            if r > best_r {
                best_r = r;
                best_t = t;
                if refine_u {
                    tu = x;
                } else {
                    tv = x;
                }
            }
        }
    }
    Ok((best_r, best_t))
}

/// The CCW angular interval of permissible terminals on the first (`front`)
/// or last circle: the boundary minus the open connecting arc.
pub(crate) fn permissible_arc_of(chain: &Chain, front: bool) -> (f64, f64) {
    if chain.len() == 1 {
        return (0.0, TAU);
    }
    let (circle_idx, joint_idx) = if front {
        (0, 0)
    } else {
        (chain.len() - 1, chain.len() - 2)
    };
    let conn = chain.connecting_interval(circle_idx, joint_idx);
    (conn.0 + conn.1, TAU - conn.1)
}

fn sample_angles(arc: (f64, f64), k: usize, full_circle: bool) -> Vec<f64> {
    if full_circle {
        (0..k)
            .map(|i| arc.0 + arc.1 * i as f64 / k as f64)
            .collect()
    } else {
        (0..k)
            .map(|i| arc.0 + arc.1 * i as f64 / (k as f64 - 1.0))
            .collect()
    }
}

fn golden_max<F>(
    mut lo: f64,
    mut hi: f64,
    iters: usize,
    eval: F,
) -> Result<(f64, Option<f64>, Option<TerminalPair>), ChainError>
where
    F: Fn(f64) -> Result<Option<(f64, TerminalPair)>, ChainError>,
{
    const INV_PHI: f64 = 0.6180339887498949;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    for _ in 0..iters {
        let v1 = f1.as_ref().map(|x| x.0).unwrap_or(f64::NEG_INFINITY);
        let v2 = f2.as_ref().map(|x| x.0).unwrap_or(f64::NEG_INFINITY);
        if v1 >= v2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2)?;
        }
    }
    let v1 = f1.as_ref().map(|x| x.0).unwrap_or(f64::NEG_INFINITY);
    let v2 = f2.as_ref().map(|x| x.0).unwrap_or(f64::NEG_INFINITY);
    let (x, f) = if v1 >= v2 { (x1, f1) } else { (x2, f2) };
    match f {
        Some((r, t)) => Ok((x, Some(r), Some(t))),
        None => Ok((x, None, None)),
    }
}

/// Circumcircles of the triangles crossed by segment `x -> y`, as a chain
/// with `(x, y)` as terminals. `None` when `xy` is a triangulation edge.
pub fn chain_from_triangulation(
    t: &Triangulation,
    x: usize,
    y: usize,
) -> Result<Option<(Chain, TerminalPair)>, ChainError> {
    let crossed = crossed_triangles(t, x, y)?;
    if crossed.is_empty() {
        return Ok(None);
    }
    let mut circles: Vec<Circle> = Vec::with_capacity(crossed.len());
    for &ti in &crossed {
        let tri = t.triangles[ti];
        let c = circumcircle(t.points[tri[0]], t.points[tri[1]], t.points[tri[2]])?;
        // Collapse consecutive duplicates from co-circular neighbors.
        if let Some(prev) = circles.last() {
            let scale = prev.radius.max(c.radius);
            if prev.center.dist(c.center) <= CHAIN_EPS * scale
                && (prev.radius - c.radius).abs() <= CHAIN_EPS * scale
            {
                continue;
            }
        }
        circles.push(c);
    }
    let chain = Chain::new(circles).map_err(|e| ChainError::ExtractionInconsistent(Box::new(e)))?;
    let terminals = chain.terminals(t.points[x], t.points[y])?;
    Ok(Some((chain, terminals)))
}
