//! Simulation lab for hidden-set reconstruction games.
//!
//! A codemaker hides a set of points (on the hypercube or the unit sphere);
//! a codebreaker must recover the whole set through one of three query
//! models: nearest point under Hamming distance, nearest point under
//! Euclidean distance, or minimum restricted Hamming distance. The crate
//! provides the oracles with adversarial tie-breaking and exact query/round
//! accounting, solvers for all three models, generators for adversarial
//! instances that blind non-adaptive solvers, and a CLI harness for seeded,
//! reproducible experiments.

pub mod cube;
pub mod error;
pub mod geometry;
pub mod hardgen;
pub mod harness;
pub mod oracle;
pub mod solvers;

pub use cube::{hamming_ball, BinaryPoint};
pub use error::{Error, Result};
pub use geometry::{
    affine_dimension, enumerate_query_normals, orthonormal_complement_basis, rank_of,
    supporting_hyperplane_test, FacetNormalSet, SpherePoint, Tolerances, Vector,
};
pub use hardgen::hamming_sphere;
pub use oracle::{
    BinaryNearestOracle, HiddenPoints, HiddenSet, LedgerReport, RestrictedQuery,
    SphereNearestOracle, StrongOracle, TernaryPattern, TieBreakPolicy,
};
