//! Exact coefficient rings: rational polynomials, quotient presentations and
//! smooth-expression trees.

mod parse;
mod poly;
mod presentation;
mod smooth;

use thiserror::Error;

pub use parse::parse_scalar;
pub use poly::{fmt_scalar, int, rat, scalar_to_f64, vars_from, Monomial, Poly, Vars};
pub use presentation::{poly_reduce, AlgebraPresentation, MonomialOrder};
pub use smooth::{
    normalized_step, smooth_eval, smooth_invert, smooth_step, step_denominator_bound, Elementary, Point, SmoothExpr,
};

/// Arbitrary-precision rational; numerator and denominator are kept coprime
/// with a positive denominator.
pub type Scalar = num_rational::BigRational;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CoeffError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("reciprocal bound must be positive")]
    NonpositiveBound,
    #[error("reciprocal guard violated: |{value}| < {bound}")]
    GuardViolated { value: f64, bound: f64 },
    #[error("generator `{0}` has no value")]
    UnboundGenerator(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("monomial order must be a permutation of the generators")]
    BadOrder,
    #[error("relation with constant leading term")]
    TrivialRelation,
    #[error("relations have overlapping leading monomials; reduction would not be confluent")]
    NonConfluent,
}

/// Partial derivative by variable name.
pub fn poly_partial(p: &Poly, var: &str) -> Result<Poly, CoeffError> {
    p.partial_by_name(var)
}
