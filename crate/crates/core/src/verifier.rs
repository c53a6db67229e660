//! Machine-checked negativity of the four inequalities behind the stretch
//! bound: endpoint evaluation plus a global Lipschitz constant give an upper
//! bound (apex) on each subinterval; bisection refines until the apex clears
//! a negative guard margin.

use serde::Serialize;
use thiserror::Error;

use crate::constants::{phi_for, LAMBDA, LIPSCHITZ_L, RHO};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifierError {
    #[error("inequality index {0} out of range 1..=4")]
    BadIndex(u8),
    #[error("alpha {0} outside the inequality's interval")]
    OutOfInterval(f64),
    #[error("arcsin argument {0} outside [-1, 1]; lambda is misconfigured")]
    ArcsinDomain(f64),
    #[error("empty interval: {0} >= {1}")]
    EmptyInterval(f64, f64),
}

/// Parameters of a certification run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifierConfig {
    pub lambda: f64,
    pub rho: f64,
    /// Global slope bound used by the apex formula.
    pub lipschitz: f64,
    /// Certification requires apex <= guard (a strictly negative margin).
    pub guard: f64,
    pub max_depth: u32,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        VerifierConfig {
            lambda: LAMBDA,
            rho: RHO,
            lipschitz: LIPSCHITZ_L,
            guard: -1e-6,
            max_depth: 64,
        }
    }
}

impl VerifierConfig {
    pub fn phi(&self) -> f64 {
        phi_for(self.lambda, self.rho)
    }
}

/// The threshold angle separating the two certified regimes.
///
/// At zero the limit `asin(1/lambda)` is used directly.
pub fn gamma_plus(alpha: f64, lambda: f64) -> Result<f64, VerifierError> {
    if alpha == 0.0 {
        let arg = 1.0 / lambda;
        if !(-1.0..=1.0).contains(&arg) {
            return Err(VerifierError::ArcsinDomain(arg));
        }
        return Ok(arg.asin());
    }
    let z = (alpha + alpha.sin()) / 4.0;
    let arg = (alpha + alpha.sin()) / (4.0 * lambda * z.sin());
    if !(-1.0..=1.0).contains(&arg) {
        return Err(VerifierError::ArcsinDomain(arg));
    }
    Ok((3.0 * alpha.sin() - alpha) / 4.0 + arg.asin())
}

/// `f(alpha, beta, gamma) =
/// -lambda (cos gamma - cos alpha (cos(beta-gamma) + beta sin(beta-gamma)))`.
pub fn f_eval(alpha: f64, beta: f64, gamma: f64, lambda: f64) -> f64 {
    -lambda * (gamma.cos() - alpha.cos() * ((beta - gamma).cos() + beta * (beta - gamma).sin()))
}

/// Closed interval of inequality `i`.
pub fn interval_of(i: u8) -> Result<(f64, f64), VerifierError> {
    match i {
        1 | 2 => Ok((FRAC_PI_2, PI)),
        3 | 4 => Ok((0.0, FRAC_PI_2)),
        _ => Err(VerifierError::BadIndex(i)),
    }
}

/// Evaluate inequality `i` at `alpha`. Values at the interval ends use the
/// continuous extension (the formulas already evaluate to the limits).
pub fn g_eval(i: u8, alpha: f64, cfg: &VerifierConfig) -> Result<f64, VerifierError> {
    let (s, t) = interval_of(i)?;
    if alpha < s - 1e-12 || alpha > t + 1e-12 {
        return Err(VerifierError::OutOfInterval(alpha));
    }
    let phi = cfg.phi();
    let lambda = cfg.lambda;
    let base = alpha.sin() - alpha * alpha.cos() - 2.0 * phi / 3.0;
    Ok(match i {
        1 => base - (2.0 * phi / 3.0) * alpha.cos() + f_eval(alpha, 0.0, 0.0, lambda),
        2 => {
            base - (2.0 * phi / 3.0) * alpha.cos()
                + f_eval(alpha, 0.0, gamma_plus(alpha, lambda)?, lambda)
        }
        3 => base - (4.0 * phi / 3.0) * alpha.cos() + f_eval(alpha, alpha.sin(), 0.0, lambda),
        4 => {
            base - (4.0 * phi / 3.0) * alpha.cos()
                + f_eval(alpha, alpha.sin(), gamma_plus(alpha, lambda)?, lambda)
        }
        _ => unreachable!(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    CertifiedNegative,
    ViolationFound,
    DepthExhausted,
}

/// Result of bounding one function over one interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundOutcome {
    pub status: BoundStatus,
    /// Upper bound on the function over the interval (exact maxima of the
    /// evaluated endpoints plus the Lipschitz slack).
    pub apex: f64,
    pub evaluations: u64,
    /// A point with a nonnegative value, when one was found.
    pub violation: Option<f64>,
}

fn merge(a: BoundOutcome, b: BoundOutcome) -> BoundOutcome {
    use BoundStatus::*;
    let status = match (a.status, b.status) {
        (ViolationFound, _) | (_, ViolationFound) => ViolationFound,
        (DepthExhausted, _) | (_, DepthExhausted) => DepthExhausted,
        _ => CertifiedNegative,
    };
    BoundOutcome {
        status,
        apex: a.apex.max(b.apex),
        evaluations: a.evaluations + b.evaluations,
        violation: a.violation.or(b.violation),
    }
}

/// Recursive bounding of an arbitrary function. Refines while the apex sits
/// above the guard; when an evaluated value already exceeds the guard the
/// guard is unreachable, so refinement only continues to rule out a sign
/// change (the plain `apex >= 0` rule).
pub fn bound_fn<F>(g: &F, s: f64, t: f64, cfg: &VerifierConfig) -> BoundOutcome
where
    F: Fn(f64) -> f64,
{
    fn rec<F: Fn(f64) -> f64>(
        g: &F,
        s: f64,
        t: f64,
        cfg: &VerifierConfig,
        depth: u32,
    ) -> BoundOutcome {
        let gs = g(s);
        let gt = g(t);
        let top = gs.max(gt);
        if gs >= 0.0 || gt >= 0.0 {
            return BoundOutcome {
                status: BoundStatus::ViolationFound,
                apex: top,
                evaluations: 2,
                violation: Some(if gs >= gt { s } else { t }),
            };
        }
        let apex = top + cfg.lipschitz * (t - s) / 2.0;
        if apex <= cfg.guard {
            return BoundOutcome {
                status: BoundStatus::CertifiedNegative,
                apex,
                evaluations: 2,
                violation: None,
            };
        }
        if (top > cfg.guard && apex < 0.0) || depth >= cfg.max_depth {
            return BoundOutcome {
                status: BoundStatus::DepthExhausted,
                apex,
                evaluations: 2,
                violation: None,
            };
        }
        let mid = 0.5 * (s + t);
        let left = rec(g, s, mid, cfg, depth + 1);
        let right = rec(g, mid, t, cfg, depth + 1);
        let mut out = merge(left, right);
        out.evaluations += 2;
        out
    }
    rec(g, s, t, cfg, 0)
}

/// Bound inequality `i` over `[s, t]`.
pub fn bound(i: u8, s: f64, t: f64, cfg: &VerifierConfig) -> Result<BoundOutcome, VerifierError> {
    let (lo, hi) = interval_of(i)?;
    if s >= t {
        return Err(VerifierError::EmptyInterval(s, t));
    }
    if s < lo - 1e-12 || t > hi + 1e-12 {
        return Err(VerifierError::OutOfInterval(if s < lo { s } else { t }));
    }
    // Evaluation failures (arcsin domain) surface before the recursion runs.
    g_eval(i, s, cfg)?;
    g_eval(i, t, cfg)?;
    let g = |alpha: f64| g_eval(i, alpha, cfg).expect("interval pre-validated");
    Ok(bound_fn(&g, s, t, cfg))
}

/// Per-inequality result in a certification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub i: u8,
    pub interval: [f64; 2],
    pub apex: f64,
    pub status: BoundStatus,
    pub evals: u64,
}

/// The full certification output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub pass: bool,
    pub inequalities: Vec<InequalityReport>,
    pub lambda: f64,
    pub rho: f64,
    pub phi: f64,
    #[serde(rename = "L")]
    pub lipschitz: f64,
}

/// Certify all four inequalities over their intervals.
pub fn certify(cfg: &VerifierConfig) -> Result<CertificateReport, VerifierError> {
    let mut inequalities = Vec::with_capacity(4);
    for i in 1..=4u8 {
        let (s, t) = interval_of(i)?;
        let outcome = bound(i, s, t, cfg)?;
        inequalities.push(InequalityReport {
            i,
            interval: [s, t],
            apex: outcome.apex,
            status: outcome.status,
            evals: outcome.evaluations,
        });
    }
    let pass = inequalities
        .iter()
        .all(|r| r.status == BoundStatus::CertifiedNegative);
    Ok(CertificateReport {
        pass,
        inequalities,
        lambda: cfg.lambda,
        rho: cfg.rho,
        phi: cfg.phi(),
        lipschitz: cfg.lipschitz,
    })
}

/// Maximum central finite-difference slope of inequality `i` over seeded
/// uniform samples of its interval.
pub fn lipschitz_spot_check(
    i: u8,
    sample_count: usize,
    seed: u64,
    cfg: &VerifierConfig,
) -> Result<f64, VerifierError> {
    let (s, t) = interval_of(i)?;
    let h = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_slope: f64 = 0.0;
    for _ in 0..sample_count {
        let alpha = rng.random_range(s + h..t - h);
        let hi = g_eval(i, alpha + h, cfg)?;
        let lo = g_eval(i, alpha - h, cfg)?;
        max_slope = max_slope.max(((hi - lo) / (2.0 * h)).abs());
    }
    Ok(max_slope)
}

/// Same probe for the threshold angle itself (bounded by 1.15).
pub fn gamma_plus_slope_check(
    sample_count: usize,
    seed: u64,
    lambda: f64,
) -> Result<f64, VerifierError> {
    let h = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_slope: f64 = 0.0;
    for _ in 0..sample_count {
        let alpha = rng.random_range(h..PI - h);
        let hi = gamma_plus(alpha + h, lambda)?;
        let lo = gamma_plus(alpha - h, lambda)?;
        max_slope = max_slope.max(((hi - lo) / (2.0 * h)).abs());
    }
    Ok(max_slope)
}
