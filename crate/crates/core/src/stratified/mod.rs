//! Stratified spaces: strata posets, cones, products and joins, smooth
//! structures by embedding, quotient or resolution, and bump functions.

mod bump;
mod fibration;
mod poset;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeffring::CoeffError;

pub use bump::{
    bump_diagnostics, bump_function, bump_profile, chi, partition_of_unity, separates_points, BumpDiagnostics, BumpSpec,
    PartitionOfUnity, SeparationWitness,
};
pub use fibration::{
    cotangent_growth_witness, fiber_constancy_membership, FibrationSpec, GrowthReport, Membership, MembershipCertificate,
};
pub use poset::{cone, isomorphic, join, product, OrderPair, StratifiedModel, StratumRecord};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StratifiedError {
    #[error("invalid stratification order: {0}")]
    InvalidOrder(String),
    #[error("unknown stratum index {0}")]
    UnknownStratum(usize),
    #[error("order pair {0} < {1} has no witness")]
    MissingWitness(String, String),
    #[error("cone requires a compact link")]
    NotCompact,
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("need l <= k <= n, got n={n}, k={k}, l={l}")]
    BadFibration { n: usize, k: usize, l: usize },
    #[error("fibration has no fiber coordinate")]
    NoFiberCoordinate,
    #[error("epsilon must be positive")]
    NonpositiveEpsilon,
    #[error("cover leaves a gap at {0}")]
    CoverGap(String),
    #[error("empty cover or sample set")]
    EmptyCover,
    #[error("points are identical")]
    IdenticalPoints,
}

/// How the smooth functions of a stratified space are given.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Presentation {
    /// Restrictions of smooth functions on `ℝ^ambient_dimension` to the zero
    /// set of `defining`.
    Embedded { ambient_dimension: usize, defining: Vec<String> },
    /// Invariant functions of a group action, generated by the listed
    /// polynomial invariants.
    Quotient { action: String, invariant_generators: Vec<String> },
    /// Functions constant along the fibers of a resolution.
    Resolvable { fibration: FibrationSpec },
}
