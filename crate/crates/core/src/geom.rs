//! Planar primitives: points, circles, signed angles, circle-circle
//! intersection, circumcircles, and the incircle predicate.
//!
//! Sign-sensitive predicates (`orientation`, `incircle_test`) go through
//! adaptive-precision determinant evaluation with an exact fallback, so their
//! results are exact for the given coordinates. Everything else is plain
//! double arithmetic.

use std::f64::consts::{PI, TAU};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("degenerate angle: ray endpoint coincides with the apex")]
    DegenerateAngle,
    #[error("circles are identical")]
    IdenticalCircles,
    #[error("points are collinear")]
    CollinearPoints,
    #[error("invalid circle: radius must be positive and finite")]
    InvalidCircle,
    #[error("coordinates must be finite")]
    NonFinite,
}

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, other: Point) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn dist_sq(&self, other: Point) -> f64 {
        let dx = other.x - self.x;
        let dy = other.y - self.y;
        dx * dx + dy * dy
    }
}

/// A circle, understood as a closed disk where containment matters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Result<Self, GeomError> {
        if !center.is_finite() {
            return Err(GeomError::NonFinite);
        }
        if radius <= 0.0 || !radius.is_finite() {
            return Err(GeomError::InvalidCircle);
        }
        Ok(Circle { center, radius })
    }

    /// Closed-disk membership.
    pub fn contains(&self, p: Point) -> bool {
        self.center.dist(p) <= self.radius
    }

    /// Strict interior membership with a relative slack of `eps * radius`.
    pub fn strictly_contains(&self, p: Point, eps: f64) -> bool {
        self.center.dist(p) < self.radius * (1.0 - eps)
    }

    /// Point on the boundary at angle `theta` measured from the +x axis.
    pub fn at_angle(&self, theta: f64) -> Point {
        Point::new(
            self.center.x + self.radius * theta.cos(),
            self.center.y + self.radius * theta.sin(),
        )
    }

    /// Angle of `p` around the center, in `(-pi, pi]`.
    pub fn angle_of(&self, p: Point) -> f64 {
        normalize_angle((p.y - self.center.y).atan2(p.x - self.center.x))
    }
}

/// An angle in radians, normalized to `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub fn from_radians(r: f64) -> Self {
        Angle(normalize_angle(r))
    }

    pub fn radians(&self) -> f64 {
        self.0
    }
}

/// Normalize to `(-pi, pi]`. The fast path returns in-range inputs untouched,
/// which makes normalization exactly idempotent.
pub fn normalize_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    if r == -PI {
        r = PI;
    }
    r
}

/// Counterclockwise angular sweep from `from` to `to`, in `[0, 2*pi)`.
pub fn ccw_sweep(from: f64, to: f64) -> f64 {
    let d = (to - from).rem_euclid(TAU);
    if d == TAU {
        0.0
    } else {
        d
    }
}

/// Twice the signed area of triangle `(a, b, c)`; positive when `c` is to the
/// left of the directed line `a -> b`. Plain double arithmetic.
pub fn cross2(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

/// Exact orientation of `c` relative to the directed line `a -> b`.
pub fn orientation(a: Point, b: Point, c: Point) -> Orientation {
    let v = robust::orient2d(coord(a), coord(b), coord(c));
    if v > 0.0 {
        Orientation::CounterClockwise
    } else if v < 0.0 {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

fn coord(p: Point) -> robust::Coord<f64> {
    robust::Coord { x: p.x, y: p.y }
}

/// Counterclockwise angle from ray `o -> p` to ray `o -> q`, in `(-pi, pi]`.
pub fn signed_angle(p: Point, o: Point, q: Point) -> Result<Angle, GeomError> {
    if p == o || q == o {
        return Err(GeomError::DegenerateAngle);
    }
    let ux = p.x - o.x;
    let uy = p.y - o.y;
    let vx = q.x - o.x;
    let vy = q.y - o.y;
    let cross = ux * vy - uy * vx;
    let dot = ux * vx + uy * vy;
    let mut theta = cross.atan2(dot);
    if theta == -PI {
        theta = PI;
    }
    Ok(Angle::from_radians(theta))
}

/// Result of intersecting two distinct circle boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircleIntersection {
    /// Boundaries share no point (separate or nested).
    Disjoint,
    Tangent(Point),
    /// Two proper intersection points; the first lies to the left of the
    /// directed line `c1.center -> c2.center`.
    Pair(Point, Point),
}

/// Relative tolerance for declaring two circles tangent.
pub const TANGENCY_EPS: f64 = 1e-9;

pub fn circle_intersection(c1: Circle, c2: Circle) -> Result<CircleIntersection, GeomError> {
    if c1.center == c2.center && c1.radius == c2.radius {
        return Err(GeomError::IdenticalCircles);
    }
    let d = c1.center.dist(c2.center);
    let (r1, r2) = (c1.radius, c2.radius);
    let tol = TANGENCY_EPS * r1.max(r2);
    if d <= tol {
        // Concentric with different radii.
        return Ok(CircleIntersection::Disjoint);
    }
    let ux = (c2.center.x - c1.center.x) / d;
    let uy = (c2.center.y - c1.center.y) / d;
    // Signed distance from c1.center to the radical chord along the center line.
    let x = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    if (d - (r1 + r2)).abs() <= tol || (d - (r1 - r2).abs()).abs() <= tol {
        let p = Point::new(c1.center.x + ux * x, c1.center.y + uy * x);
        return Ok(CircleIntersection::Tangent(p));
    }
    if d > r1 + r2 || d < (r1 - r2).abs() {
        return Ok(CircleIntersection::Disjoint);
    }
    let y2 = r1 * r1 - x * x;
    let y = y2.max(0.0).sqrt();
    let mx = c1.center.x + ux * x;
    let my = c1.center.y + uy * x;
    // Left of the directed center line means offset along (-uy, ux).
    let left = Point::new(mx - uy * y, my + ux * y);
    let right = Point::new(mx + uy * y, my - ux * y);
    Ok(CircleIntersection::Pair(left, right))
}

/// Unique circle through three non-collinear points.
pub fn circumcircle(p: Point, q: Point, r: Point) -> Result<Circle, GeomError> {
    if orientation(p, q, r) == Orientation::Collinear {
        return Err(GeomError::CollinearPoints);
    }
    // Translate to p for conditioning.
    let bx = q.x - p.x;
    let by = q.y - p.y;
    let cx = r.x - p.x;
    let cy = r.y - p.y;
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    let center = Point::new(p.x + ux, p.y + uy);
    let radius = (ux * ux + uy * uy).sqrt();
    Ok(Circle { center, radius })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InCircle {
    Inside,
    On,
    Outside,
}

/// Exact position of `d` relative to the circumcircle of `(a, b, c)`.
///
/// The sign convention is orientation-independent: `Inside` means strictly
/// interior to the circle through the three points regardless of their
/// winding order.
pub fn incircle_test(a: Point, b: Point, c: Point, d: Point) -> Result<InCircle, GeomError> {
    let orient = robust::orient2d(coord(a), coord(b), coord(c));
    if orient == 0.0 {
        return Err(GeomError::CollinearPoints);
    }
    let raw = robust::incircle(coord(a), coord(b), coord(c), coord(d));
    let v = if orient > 0.0 { raw } else { -raw };
    Ok(if v > 0.0 {
        InCircle::Inside
    } else if v < 0.0 {
        InCircle::Outside
    } else {
        InCircle::On
    })
}
