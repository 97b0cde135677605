//! Exact ranks of `(Ω, d)` and `(Ω, δ)` on finite graded pieces, de Rham /
//! Brylinski–Poisson duality, hard Lefschetz and harmonic representatives.
//!
//! On a CE chart the whole complex is finite. On a coordinate chart the
//! d-complex at selector `t` is the family of pieces `(k, t − k)` (form
//! degree, polynomial degree) and the δ-complex at selector `t` is
//! `(k, t − 2n + k)`; the star operator maps the first onto the second.

mod piece;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeffring::Scalar;
use crate::exterior::{ChartKind, Form};
use crate::linalg::{complement_basis, span_dim, Matrix};
use crate::symplectic::{SymplecticError, SymplecticModel};

pub use piece::GradedPieceBasis;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum HomologyError {
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error("form does not lie in the graded piece")]
    OutsidePiece,
    #[error("selector does not fit the chart kind")]
    SelectorMismatch,
    #[error("operation needs a Chevalley–Eilenberg chart")]
    RequiresCompact,
    #[error("form is not homogeneous")]
    NonHomogeneous,
    #[error("class is not d-closed")]
    NotClosed,
    #[error("{operator:?} does not square to zero out of degree {degree}")]
    NotAComplex { operator: Operator, degree: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    D,
    Delta,
}

/// Which finite subcomplex to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    /// All degrees of a CE chart.
    Compact,
    /// Total-degree piece `t` of a coordinate chart.
    TotalDegree(usize),
}

impl Selector {
    /// The natural selector(s) for a model: `Compact` on CE charts and
    /// `TotalDegree(0..=max_total)` on coordinate charts.
    pub fn for_model(model: &SymplecticModel, max_total: usize) -> Vec<Selector> {
        match model.chart().kind() {
            ChartKind::ChevalleyEilenberg => vec![Selector::Compact],
            ChartKind::Coordinate => (0..=max_total).map(Selector::TotalDegree).collect(),
        }
    }
}

/// Polynomial degree of the form-degree-`k` piece, `None` when empty.
fn poly_degree(model: &SymplecticModel, op: Operator, sel: Selector, k: usize) -> Result<Option<usize>, HomologyError> {
    match (model.chart().kind(), sel) {
        (ChartKind::ChevalleyEilenberg, Selector::Compact) => Ok(Some(0)),
        (ChartKind::Coordinate, Selector::TotalDegree(t)) => Ok(match op {
            Operator::D => t.checked_sub(k),
            Operator::Delta => (t + k).checked_sub(2 * model.n()),
        }),
        _ => Err(HomologyError::SelectorMismatch),
    }
}

/// Pieces in form degrees `0..=2n`.
pub fn complex_pieces(model: &SymplecticModel, op: Operator, sel: Selector) -> Result<Vec<GradedPieceBasis>, HomologyError> {
    let chart = model.chart();
    (0..=model.dimension())
        .map(|k| {
            Ok(match poly_degree(model, op, sel, k)? {
                Some(p) => GradedPieceBasis::new(chart, k, p),
                None => GradedPieceBasis::empty(chart, k),
            })
        })
        .collect()
}

fn apply(model: &SymplecticModel, op: Operator, a: &Form) -> Form {
    match op {
        Operator::D => a.d(),
        Operator::Delta => model.delta(a),
    }
}

fn target_degree(op: Operator, k: usize, top: usize) -> Option<usize> {
    match op {
        Operator::D if k < top => Some(k + 1),
        Operator::Delta if k > 0 => Some(k - 1),
        _ => None,
    }
}

/// Matrices of `op` out of every degree (`None` where the target is outside
/// `0..=2n`).
fn operator_matrices(
    model: &SymplecticModel,
    op: Operator,
    pieces: &[GradedPieceBasis],
) -> Result<Vec<Option<Matrix>>, HomologyError> {
    let top = model.dimension();
    (0..pieces.len())
        .into_par_iter()
        .map(|k| match target_degree(op, k, top) {
            Some(t) => pieces[k].operator_matrix(&pieces[t], |a| apply(model, op, a)).map(Some),
            None => Ok(None),
        })
        .collect()
}

/// Per-degree homology ranks of one finite complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub operator: Operator,
    pub selector: Selector,
    /// Dimension of each chain space, by form degree.
    pub dims: Vec<usize>,
    /// Homology rank, by form degree.
    pub ranks: Vec<usize>,
}

impl BettiTable {
    /// `Σ (−1)^k dim C_k = Σ (−1)^k rank H_k`.
    pub fn euler_consistent(&self) -> bool {
        let alt = |v: &[usize]| v.iter().enumerate().map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) }).sum::<i64>();
        alt(&self.dims) == alt(&self.ranks)
    }
}

/// Homology ranks by exact elimination; re-checks `op² = 0` on the basis.
pub fn betti(model: &SymplecticModel, op: Operator, sel: Selector) -> Result<BettiTable, HomologyError> {
    let pieces = complex_pieces(model, op, sel)?;
    let mats = operator_matrices(model, op, &pieces)?;
    let top = model.dimension();
    for k in 0..=top {
        if let (Some(a), Some(t)) = (&mats[k], target_degree(op, k, top)) {
            if let Some(b) = &mats[t] {
                if !b.mul(a).is_zero() {
                    return Err(HomologyError::NotAComplex { operator: op, degree: k });
                }
            }
        }
    }
    let out_rank: Vec<usize> = mats.par_iter().map(|m| m.as_ref().map_or(0, Matrix::rank)).collect();
    let mut in_rank = vec![0; top + 1];
    for k in 0..=top {
        if let Some(t) = target_degree(op, k, top) {
            in_rank[t] = out_rank[k];
        }
    }
    let dims: Vec<usize> = pieces.iter().map(GradedPieceBasis::dim).collect();
    let ranks = (0..=top).map(|k| dims[k] - out_rank[k] - in_rank[k]).collect();
    Ok(BettiTable { operator: op, selector: sel, dims, ranks })
}

/// Cocycles of degree `k` whose classes form a basis of `H^k(d)`.
pub fn cohomology_representatives(model: &SymplecticModel, sel: Selector, k: usize) -> Result<Vec<Form>, HomologyError> {
    if k > model.dimension() {
        return Ok(Vec::new());
    }
    let chart = model.chart();
    let here = match poly_degree(model, Operator::D, sel, k)? {
        Some(p) => GradedPieceBasis::new(chart, k, p),
        None => return Ok(Vec::new()),
    };
    let cycles = if k < model.dimension() {
        let next = match poly_degree(model, Operator::D, sel, k + 1)? {
            Some(p) => GradedPieceBasis::new(chart, k + 1, p),
            None => GradedPieceBasis::empty(chart, k + 1),
        };
        here.operator_matrix(&next, Form::d)?.kernel()
    } else {
        Matrix::identity(here.dim()).to_rows()
    };
    let boundaries = boundary_columns(model, sel, &here)?;
    Ok(complement_basis(here.dim(), &boundaries, &cycles).iter().map(|c| here.form(c)).collect())
}

/// Spanning set of `d(previous piece)` inside `here`.
fn boundary_columns(model: &SymplecticModel, sel: Selector, here: &GradedPieceBasis) -> Result<Vec<Vec<Scalar>>, HomologyError> {
    let k = here.degree();
    if k == 0 {
        return Ok(Vec::new());
    }
    let Some(p) = poly_degree(model, Operator::D, sel, k - 1)? else { return Ok(Vec::new()) };
    let prev = GradedPieceBasis::new(model.chart(), k - 1, p);
    Ok(prev.operator_matrix(here, Form::d)?.column_basis())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityVerdict {
    pub selector: Selector,
    pub d_betti: Vec<usize>,
    pub delta_betti: Vec<usize>,
    /// Degrees `k` with `rank H_k(δ) ≠ rank H^{2n−k}(d)`.
    pub mismatches: Vec<usize>,
    pub pass: bool,
}

/// Compares `rank H_k(δ)` with `rank H^{2n−k}(d)` for `k` in `degrees`;
/// degrees outside `0..=2n` are skipped.
pub fn hodge_duality_check(
    model: &SymplecticModel,
    sel: Selector,
    degrees: std::ops::RangeInclusive<usize>,
) -> Result<DualityVerdict, HomologyError> {
    let (d, delta) = rayon::join(|| betti(model, Operator::D, sel), || betti(model, Operator::Delta, sel));
    let (d, delta) = (d?, delta?);
    let top = model.dimension();
    let mismatches: Vec<usize> =
        degrees.filter(|&k| k <= top).filter(|&k| delta.ranks[k] != d.ranks[top - k]).collect();
    Ok(DualityVerdict {
        selector: sel,
        pass: mismatches.is_empty(),
        d_betti: d.ranks,
        delta_betti: delta.ranks,
        mismatches,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardLefschetzVerdict {
    pub k: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    /// Rank of `[ω^k]: H^{n−k} → H^{n+k}`.
    pub rank: usize,
    pub pass: bool,
}

fn require_compact(model: &SymplecticModel) -> Result<(), HomologyError> {
    match model.chart().kind() {
        ChartKind::ChevalleyEilenberg => Ok(()),
        ChartKind::Coordinate => Err(HomologyError::RequiresCompact),
    }
}

/// Surjectivity of `[ω^k]: H^{n−k} → H^{n+k}` for `k = 0..=n`.
pub fn hard_lefschetz_check(model: &SymplecticModel) -> Result<Vec<HardLefschetzVerdict>, HomologyError> {
    require_compact(model)?;
    let n = model.n();
    (0..=n)
        .into_par_iter()
        .map(|k| {
            let source = cohomology_representatives(model, Selector::Compact, n - k)?;
            let target = GradedPieceBasis::new(model.chart(), n + k, 0);
            let target_dim = cohomology_representatives(model, Selector::Compact, n + k)?.len();
            let boundaries = boundary_columns(model, Selector::Compact, &target)?;
            let mut all = boundaries.clone();
            for z in &source {
                all.push(target.coords(&model.l_pow(z, k))?);
            }
            let rank = span_dim(target.dim(), &all) - span_dim(target.dim(), &boundaries);
            Ok(HardLefschetzVerdict { k, source_dim: source.len(), target_dim, rank, pass: rank == target_dim })
        })
        .collect()
}

/// Finds `θ` with `δ(class + dθ) = 0`, returning `class + dθ`, or `None`
/// when the affine system has no solution.
pub fn harmonic_representative_search(model: &SymplecticModel, class: &Form) -> Result<Option<Form>, HomologyError> {
    require_compact(model)?;
    if class.is_zero() {
        return Ok(Some(class.clone()));
    }
    let j = class.homogeneous_degree().ok_or(HomologyError::NonHomogeneous)?;
    if !class.d().is_zero() {
        return Err(HomologyError::NotClosed);
    }
    let dc = model.delta(class);
    if dc.is_zero() {
        return Ok(Some(class.clone()));
    }
    let chart = model.chart();
    let theta_space = GradedPieceBasis::new(chart, j - 1, 0);
    let m = theta_space.operator_matrix(&theta_space, |t| model.delta(&t.d()))?;
    let rhs: Vec<Scalar> = theta_space.coords(&dc)?.into_iter().map(|c| -c).collect();
    Ok(m.solve(&rhs).map(|x| class + &theta_space.form(&x).d()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicClassReport {
    pub degree: usize,
    pub classes: usize,
    pub found: usize,
    /// Text of each representative found.
    pub representatives: Vec<String>,
}

/// Runs the harmonic search on a cohomology basis in every degree.
pub fn harmonic_classes(model: &SymplecticModel) -> Result<Vec<HarmonicClassReport>, HomologyError> {
    require_compact(model)?;
    (0..=model.dimension())
        .into_par_iter()
        .map(|k| {
            let reps = cohomology_representatives(model, Selector::Compact, k)?;
            let mut found = Vec::new();
            for z in &reps {
                if let Some(h) = harmonic_representative_search(model, z)? {
                    found.push(h.to_string());
                }
            }
            Ok(HarmonicClassReport { degree: k, classes: reps.len(), found: found.len(), representatives: found })
        })
        .collect()
}
