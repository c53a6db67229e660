//! Shared numeric parameters of the potential function and the verifier.
//!
//! `phi` is derived from `lambda` and `rho` in one place so the potential
//! machinery and the inequality verifier can never disagree about it.

/// Weight of the rubber-band term in the target function.
pub const LAMBDA: f64 = 1.8;

/// The stretch-factor bound the library validates empirically.
pub const RHO: f64 = 1.998;

/// Lipschitz constant used by the bounding recursion.
pub const LIPSCHITZ_L: f64 = 16.0;

/// Potential weight for arbitrary `(lambda, rho)`.
pub fn phi_for(lambda: f64, rho: f64) -> f64 {
    (3.0 / 5.0_f64.sqrt()) * (1.0 - lambda / rho)
}

/// Potential weight for the default parameters, `phi ≈ 0.13296`.
pub fn phi() -> f64 {
    phi_for(LAMBDA, RHO)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_matches_closed_form() {
        assert!((phi() - 0.13295539325674424).abs() < 1e-15);
        assert!(phi() > 0.0);
    }
}
