//! The potential function machinery: peaks, green/red arc coloring, the
//! per-joint horizontal/vertical travels, the chain potential, and the
//! target function combining arc path, rubber band, and potential.

use thiserror::Error;

use crate::chain::{arc_path, rubber_band, Chain, ChainError, TerminalPair};
use crate::constants::{phi, LAMBDA};
use crate::geom::{Circle, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("circles do not intersect")]
    NonIntersecting,
    #[error("point is not a shared boundary point of the two circles")]
    NotAnIntersection,
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Arc color: green arcs lie outside the neighboring circle and contribute
/// positively to the travels, red arcs lie inside and contribute negatively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcColor {
    Green,
    Red,
}

impl ArcColor {
    fn sign(self) -> f64 {
        match self {
            ArcColor::Green => 1.0,
            ArcColor::Red => -1.0,
        }
    }
}

/// Peaks, colors, and signed travels for one consecutive circle pair,
/// computed in the frame where the center line is horizontal and the chosen
/// intersection point lies on or above it.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakDecomposition {
    pub q_prev: Point,
    pub q_next: Point,
    pub color_prev: ArcColor,
    pub color_next: ArcColor,
    /// Signed horizontal travel; equals the center distance for valid pairs.
    pub h: f64,
    /// Signed vertical travel; at least the radius difference in magnitude.
    pub v: f64,
    /// Whether the local frame was flipped to put the point above the line.
    pub flipped: bool,
    /// Tangent pair: the intersection point sits on the center line.
    pub degenerate: bool,
}

/// Weights shared by the potential function and the verifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialConstants {
    pub lambda: f64,
    pub rho: f64,
    pub phi: f64,
}

impl Default for PotentialConstants {
    fn default() -> Self {
        PotentialConstants {
            lambda: LAMBDA,
            rho: crate::constants::RHO,
            phi: phi(),
        }
    }
}

/// Decompose one joint into peaks, colors, and travels.
pub fn peak_decomposition(
    o_prev: Circle,
    o_cur: Circle,
    a_point: Point,
) -> Result<PeakDecomposition, PotentialError> {
    let d = o_prev.center.dist(o_cur.center);
    let rmax = o_prev.radius.max(o_cur.radius);
    let tol = 1e-9 * rmax;
    if d > o_prev.radius + o_cur.radius + tol
        || d < (o_prev.radius - o_cur.radius).abs() - tol
        || d <= tol
    {
        return Err(PotentialError::NonIntersecting);
    }
    let on = |c: Circle, p: Point| (c.center.dist(p) - c.radius).abs() <= 1e-6 * c.radius;
    if !on(o_prev, a_point) || !on(o_cur, a_point) {
        return Err(PotentialError::NotAnIntersection);
    }

    // Local frame: x along the center line, y toward the side holding a.
    let xhat = Point::new(
        (o_cur.center.x - o_prev.center.x) / d,
        (o_cur.center.y - o_prev.center.y) / d,
    );
    let mut yhat = Point::new(-xhat.y, xhat.x);
    let local =
        |p: Point, axis: Point| (p.x - o_prev.center.x) * axis.x + (p.y - o_prev.center.y) * axis.y;
    let mut flipped = false;
    if local(a_point, yhat) < 0.0 {
        yhat = Point::new(-yhat.x, -yhat.y);
        flipped = true;
    }
    let ya = local(a_point, yhat);
    let degenerate = ya.abs() <= tol;

    let q_prev = Point::new(
        o_prev.center.x + o_prev.radius * yhat.x,
        o_prev.center.y + o_prev.radius * yhat.y,
    );
    let q_next = Point::new(
        o_cur.center.x + o_cur.radius * yhat.x,
        o_cur.center.y + o_cur.radius * yhat.y,
    );

    // Color an upper arc by probing its midpoint against the other circle;
    // quarter probes guard against a misclassified degenerate arc.
    let color_of = |circle: Circle, other: Circle| -> ArcColor {
        let xc = local(circle.center, xhat);
        let theta_a =
            (local(a_point, yhat) - local(circle.center, yhat)).atan2(local(a_point, xhat) - xc);
        let probe = |t: f64| {
            let theta = std::f64::consts::FRAC_PI_2 * (1.0 - t) + theta_a * t;
            Point::new(
                circle.center.x + circle.radius * (theta.cos() * xhat.x + theta.sin() * yhat.x),
                circle.center.y + circle.radius * (theta.cos() * xhat.y + theta.sin() * yhat.y),
            )
        };
        let inside = |p: Point| other.center.dist(p) <= other.radius * (1.0 + 1e-12);
        let mid = inside(probe(0.5));
        debug_assert!(
            {
                let q1 = inside(probe(0.25));
                let q3 = inside(probe(0.75));
                q1 == mid && q3 == mid
            } || degenerate
                || theta_a.abs() < 1e-6
                || (theta_a - std::f64::consts::PI).abs() < 1e-6
        );
        if mid {
            ArcColor::Red
        } else {
            ArcColor::Green
        }
    };
    let color_prev = color_of(o_prev, o_cur);
    let color_next = color_of(o_cur, o_prev);

    // Peak-to-a arcs are monotone in both local coordinates, so each travel
    // is the absolute coordinate difference, signed by the color.
    let xa = local(a_point, xhat);
    let x_qprev = 0.0;
    let x_qnext = d;
    let h = color_prev.sign() * (xa - x_qprev).abs() + color_next.sign() * (x_qnext - xa).abs();
    let v = color_prev.sign() * (o_prev.radius - ya).abs()
        + color_next.sign() * (o_cur.radius - ya).abs();

    Ok(PeakDecomposition {
        q_prev,
        q_next,
        color_prev,
        color_next,
        h,
        v,
        flipped,
        degenerate,
    })
}

/// Per-joint decompositions of a chain, in order.
pub fn joint_decompositions(chain: &Chain) -> Result<Vec<PeakDecomposition>, PotentialError> {
    (0..chain.len().saturating_sub(1))
        .map(|i| {
            peak_decomposition(
                chain.circles()[i],
                chain.circles()[i + 1],
                chain.joints()[i].a,
            )
        })
        .collect()
}

/// The chain potential
/// `phi * (r_n - r_1) - (phi/3) * sum_i (2 H_i + V_i)`; zero for one circle.
pub fn potential(chain: &Chain) -> Result<f64, PotentialError> {
    if chain.len() == 1 {
        return Ok(0.0);
    }
    let p = phi();
    let r_first = chain.circles()[0].radius;
    let r_last = chain.circles().last().unwrap().radius;
    let mut sum = 0.0;
    for dec in joint_decompositions(chain)? {
        sum += 2.0 * dec.h + dec.v;
    }
    Ok(p * (r_last - r_first) - (p / 3.0) * sum)
}

/// The target function `|P| - lambda * |D| + Phi` for a chain and terminals.
pub fn upsilon(chain: &Chain, t: &TerminalPair) -> Result<f64, PotentialError> {
    let p = arc_path(chain, t)?;
    let d = rubber_band(chain, t)?;
    Ok(p.length - LAMBDA * d.length + potential(chain)?)
}
