//! Differential forms with polynomial coefficients on coordinate and
//! Chevalley–Eilenberg charts.
//!
//! A wedge monomial `dx_{i_1} ∧ … ∧ dx_{i_k}` with `i_1 < … < i_k` is stored
//! as the bitmask with bits `i_1, …, i_k` set; every other ordering is
//! brought to this representative with its permutation sign.

mod chart;
mod form;

use thiserror::Error;

pub use chart::{bits, ChartKind, ChartSpec, ModelChart, StructureConstant};
pub use form::{contract_bivector, mask_from_increasing, Bivector, Form};
pub(crate) use form::same_chart;

/// Strictly increasing index set, as a bitmask.
pub type Wedge = u32;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExteriorError {
    #[error("forms live on different charts")]
    ChartMismatch,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("structure constants violate d∘d = 0 on d({generator})")]
    JacobiViolation { generator: String },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("bivector matrix is not antisymmetric")]
    NotAntisymmetric,
    #[error("index list {0:?} is not strictly increasing within the chart")]
    BadIndexSet(Vec<usize>),
    #[error("coefficient uses variables outside the chart")]
    ForeignCoefficient,
}

/// Sign of `dx_a ∧ dx_b` relative to the increasing representative of
/// `a | b`, or `None` when the index sets overlap.
pub fn wedge_sign(a: Wedge, b: Wedge) -> Option<i8> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> j).count_ones();
    }
    Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
}
