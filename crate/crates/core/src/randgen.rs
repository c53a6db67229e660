//! Seeded random instances for experiments and property suites: point sets,
//! valid chains (rejection sampling against the chain validator), and
//! terminal pairs on their permissible arcs.

use rand::Rng;

use crate::chain::{Chain, TerminalPair};
use crate::geom::{Circle, Point};

/// Uniform points in the unit square.
pub fn random_points_square<R: Rng>(rng: &mut R, n: usize) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)))
        .collect()
}

/// Rejection cap per attached circle.
pub const MAX_REJECTIONS_PER_LINK: usize = 1000;

/// Grow a random valid chain up to `target` circles. Consecutive circles
/// intersect by construction; candidates violating the connecting-arc
/// condition are rejected and redrawn, up to the per-link cap (the chain is
/// returned shorter if a link cannot be attached).
pub fn random_chain<R: Rng>(rng: &mut R, target: usize) -> Chain {
    let target = target.max(1);
    let first = Circle::new(
        Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        rng.random_range(0.5..2.0),
    )
    .expect("radius in range");
    let mut circles = vec![first];
    'links: while circles.len() < target {
        let prev = *circles.last().unwrap();
        for _ in 0..MAX_REJECTIONS_PER_LINK {
            let radius = prev.radius * 2f64.powf(rng.random_range(-1.0..1.0));
            let rmax = prev.radius.max(radius);
            let lo = (prev.radius - radius).abs() + 0.02 * rmax;
            let hi = prev.radius + radius - 0.02 * rmax;
            if lo >= hi {
                continue;
            }
            let d = rng.random_range(lo..hi);
            let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let center = Point::new(
                prev.center.x + d * theta.cos(),
                prev.center.y + d * theta.sin(),
            );
            let Ok(candidate) = Circle::new(center, radius) else {
                continue;
            };
            let mut attempt = circles.clone();
            attempt.push(candidate);
            if let Ok(chain) = Chain::new(attempt) {
                circles = chain.circles().to_vec();
                continue 'links;
            }
        }
        break;
    }
    Chain::new(circles).expect("incrementally validated")
}

/// A terminal pair drawn uniformly from the permissible arcs, occasionally
/// pinned to an arc endpoint to exercise the obstructed boundary cases.
pub fn sample_terminal_pair<R: Rng>(rng: &mut R, chain: &Chain) -> TerminalPair {
    let pick = |rng: &mut R, front: bool| {
        let (start, sweep) = crate::chain::permissible_arc_of(chain, front);
        let t = match rng.random_range(0..20) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random_range(0.0..1.0),
        };
        start + sweep * t
    };
    let tu = pick(rng, true);
    let tv = pick(rng, false);
    let u = chain.circles()[0].at_angle(tu);
    let v = chain.circles()[chain.len() - 1].at_angle(tv);
    TerminalPair { u, v }
}
