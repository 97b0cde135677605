//! Expression trees for elements of a germ-defined C∞-ring presentation.
//!
//! Trees close the generator algebra under sums, products and composition
//! with three elementary smooth functions: `exp`, the flat step
//! `s(t) = exp(-1/t)` (zero for `t <= 0`), and a reciprocal that is only
//! legal where its argument stays at least a declared positive bound away
//! from zero.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::poly::{fmt_scalar, rat, scalar_to_f64};
use super::{CoeffError, Scalar};

/// Generator name to value.
pub type Point = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq)]
pub enum Elementary {
    Exp,
    SmoothStep,
    /// `1/t`, contracted to `|t| >= bound` on the working domain.
    GuardedReciprocal { bound: Scalar },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SmoothExpr {
    Generator(String),
    Constant(Scalar),
    Sum(Vec<Arc<SmoothExpr>>),
    Product(Vec<Arc<SmoothExpr>>),
    Compose { outer: Elementary, inner: Arc<SmoothExpr> },
}

/// `s(t) = exp(-1/t)` for `t > 0`, else `0`.
pub fn smooth_step(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// `n(t) = s(t) / (s(t) + s(1 - t))`: zero for `t <= 0`, one for `t >= 1`.
pub fn normalized_step(t: f64) -> f64 {
    let a = smooth_step(t);
    let b = smooth_step(1.0 - t);
    a / (a + b)
}

/// Lower bound for `s(t) + s(1 - t)` on the whole line (its minimum is
/// `2 exp(-2) ≈ 0.2707`, attained at `t = 1/2`).
pub fn step_denominator_bound() -> Scalar {
    rat(1, 4)
}

impl SmoothExpr {
    pub fn generator(name: &str) -> Arc<Self> {
        Arc::new(SmoothExpr::Generator(name.to_string()))
    }

    pub fn constant(c: Scalar) -> Arc<Self> {
        Arc::new(SmoothExpr::Constant(c))
    }

    pub fn sum(parts: Vec<Arc<Self>>) -> Arc<Self> {
        Arc::new(SmoothExpr::Sum(parts))
    }

    pub fn product(parts: Vec<Arc<Self>>) -> Arc<Self> {
        Arc::new(SmoothExpr::Product(parts))
    }

    /// `a*x + b` for a subtree `x`.
    pub fn affine(x: Arc<Self>, a: Scalar, b: Scalar) -> Arc<Self> {
        let scaled = if a.is_one() { x } else { Self::product(vec![Self::constant(a), x]) };
        if b.is_zero() {
            scaled
        } else {
            Self::sum(vec![scaled, Self::constant(b)])
        }
    }

    pub fn exp(inner: Arc<Self>) -> Arc<Self> {
        Arc::new(SmoothExpr::Compose { outer: Elementary::Exp, inner })
    }

    pub fn step(inner: Arc<Self>) -> Arc<Self> {
        Arc::new(SmoothExpr::Compose { outer: Elementary::SmoothStep, inner })
    }

    /// The two-sided normalized step `n(inner)`, assembled from `s` and a
    /// guarded reciprocal whose guard holds everywhere.
    pub fn normalized_step(inner: Arc<Self>) -> Arc<Self> {
        let up = Self::step(inner.clone());
        let flipped = Self::step(Self::affine(inner, -Scalar::one(), Scalar::one()));
        let denom = Self::sum(vec![up.clone(), flipped]);
        let inv = smooth_invert(denom, &step_denominator_bound()).expect("positive bound");
        Self::product(vec![up, inv])
    }

    /// Evaluates in double precision. Fails if a generator is unbound or a
    /// reciprocal guard is violated at `point`.
    pub fn eval(&self, point: &Point) -> Result<f64, CoeffError> {
        match self {
            SmoothExpr::Generator(g) => {
                point.get(g).copied().ok_or_else(|| CoeffError::UnboundGenerator(g.clone()))
            }
            SmoothExpr::Constant(c) => Ok(scalar_to_f64(c)),
            SmoothExpr::Sum(parts) => parts.iter().try_fold(0.0, |acc, p| Ok(acc + p.eval(point)?)),
            SmoothExpr::Product(parts) => parts.iter().try_fold(1.0, |acc, p| Ok(acc * p.eval(point)?)),
            SmoothExpr::Compose { outer, inner } => {
                let t = inner.eval(point)?;
                match outer {
                    Elementary::Exp => Ok(t.exp()),
                    Elementary::SmoothStep => Ok(smooth_step(t)),
                    Elementary::GuardedReciprocal { bound } => {
                        let b = scalar_to_f64(bound);
                        if !(t.abs() >= b) {
                            return Err(CoeffError::GuardViolated { value: t, bound: b });
                        }
                        Ok(1.0 / t)
                    }
                }
            }
        }
    }

    /// Generator names referenced by the tree, sorted.
    pub fn generators(&self) -> Vec<String> {
        fn walk(e: &SmoothExpr, out: &mut Vec<String>) {
            match e {
                SmoothExpr::Generator(g) => out.push(g.clone()),
                SmoothExpr::Constant(_) => {}
                SmoothExpr::Sum(ps) | SmoothExpr::Product(ps) => ps.iter().for_each(|p| walk(p, out)),
                SmoothExpr::Compose { inner, .. } => walk(inner, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }
}

/// `1/f`, valid wherever `|f| >= bound`.
pub fn smooth_invert(f: Arc<SmoothExpr>, bound: &Scalar) -> Result<Arc<SmoothExpr>, CoeffError> {
    if !bound.is_positive() {
        return Err(CoeffError::NonpositiveBound);
    }
    Ok(Arc::new(SmoothExpr::Compose {
        outer: Elementary::GuardedReciprocal { bound: bound.clone() },
        inner: f,
    }))
}

pub fn smooth_eval(f: &SmoothExpr, point: &Point) -> Result<f64, CoeffError> {
    f.eval(point)
}

impl fmt::Display for SmoothExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, ps: &[Arc<SmoothExpr>], sep: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, p) in ps.iter().enumerate() {
                if i > 0 {
                    write!(f, "{sep}")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")
        };
        match self {
            SmoothExpr::Generator(g) => write!(f, "{g}"),
            SmoothExpr::Constant(c) => write!(f, "{}", fmt_scalar(c)),
            SmoothExpr::Sum(ps) => join(f, ps, " + "),
            SmoothExpr::Product(ps) => join(f, ps, "*"),
            SmoothExpr::Compose { outer, inner } => match outer {
                Elementary::Exp => write!(f, "exp({inner})"),
                Elementary::SmoothStep => write!(f, "step({inner})"),
                Elementary::GuardedReciprocal { bound } => write!(f, "recip[{}]({inner})", fmt_scalar(bound)),
            },
        }
    }
}
