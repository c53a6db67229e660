//! Chains of circles, Delaunay triangulations, stretch factors, and a
//! Lipschitz-certified negativity verifier for the inequalities behind the
//! 1.998 stretch bound.
//!
//! The library is organized around the chain model: ordered circles whose
//! consecutive members intersect. The rubber band through the gate chords
//! plays the role of the straight segment between two triangulation
//! vertices, the arc path plays the role of the graph shortest path, and the
//! potential/target functions tie the two together. The `verifier` module
//! machine-checks the four closing inequalities, and `delaunay`/`stretch`
//! provide the triangulation side for empirical validation.
//!
//! Data-parallel paths (all-pairs stretch, terminal-grid sweeps) run on
//! rayon when the `parallel` feature (default) is enabled and fall back to
//! sequential loops otherwise.

pub mod chain;
pub mod constants;
pub mod delaunay;
pub mod fileio;
pub mod geom;
pub mod potential;
pub mod randgen;
pub mod stretch;
pub mod verifier;

pub use chain::{
    arc_path, arcs, chain_from_triangulation, chain_stretch, make_chain, rubber_band, stab_order,
    ArcPath, Chain, ChainError, RubberBand, TerminalPair,
};
pub use delaunay::{crossed_triangles, triangulate, validate_delaunay, Triangulation};
pub use geom::{
    circle_intersection, circumcircle, incircle_test, signed_angle, Angle, Circle, Point,
};
pub use potential::{peak_decomposition, potential, upsilon, PeakDecomposition};
pub use stretch::{
    shortest_path_length, stretch_factor, stretch_factor_serial, EdgeGraph, StretchReport,
};
pub use verifier::{certify, CertificateReport, VerifierConfig};
