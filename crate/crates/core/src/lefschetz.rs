//! Primitive forms, the Lefschetz decomposition, harmonicity and the
//! Cavalcanti identity `Im δ ∩ ker d = Im d ∩ Im δ`.

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeffring::Scalar;
use crate::exterior::{ChartKind, Form};
use crate::homology::{GradedPieceBasis, HomologyError, Selector};
use crate::linalg::intersection_dim;
use crate::symplectic::SymplecticModel;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LefschetzError {
    #[error("degree {degree} exceeds the middle degree {n}")]
    DegreeAboveMiddle { degree: usize, n: usize },
    #[error("form is not homogeneous")]
    NonHomogeneous,
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// `c_{n,k} = 1/(k!)²`, the constant with `γ = c_{n,k} (L*)^k L^k γ` for
/// primitive `γ` of degree `n − k`. It does not depend on `n`.
pub fn lefschetz_constant(k: usize) -> Scalar {
    let mut f = Scalar::one();
    for j in 1..=k {
        f *= Scalar::from_integer((j as i64).into());
    }
    (&f * &f).recip()
}

/// `L^{k+1} a = 0` for `a` of degree `n − k`.
pub fn is_primitive(a: &Form, model: &SymplecticModel) -> Result<bool, LefschetzError> {
    let n = model.n();
    let Some(j) = a.homogeneous_degree() else {
        return if a.is_zero() { Ok(true) } else { Err(LefschetzError::NonHomogeneous) };
    };
    if j > n {
        return Err(LefschetzError::DegreeAboveMiddle { degree: j, n });
    }
    Ok(model.l_pow(a, n - j + 1).is_zero())
}

/// The dual test `L* a = 0`.
pub fn is_primitive_dual(a: &Form, model: &SymplecticModel) -> bool {
    model.lstar(a).is_zero()
}

/// `a = Σ_r L^r p_r` with each `p_r` primitive of degree `input_degree − 2r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveDecomposition {
    pub input_degree: usize,
    /// `(r, p_r)` with `p_r ≠ 0`, increasing in `r`.
    pub components: Vec<(usize, Form)>,
}

impl PrimitiveDecomposition {
    pub fn reconstruct(&self, model: &SymplecticModel) -> Form {
        self.components
            .iter()
            .fold(Form::zero(model.chart()), |acc, (r, p)| &acc + &model.l_pow(p, *r))
    }
}

/// Peels primitive components off from the top: with residual `Σ_{r ≤ R} L^r p_r`
/// of degree `j`, `L^{n−j+R}` kills every `r < R` and
/// `p_R = c_{n,n−m} (L*)^{n−m} L^{n−j+R}(residual)` with `m = j − 2R`.
pub fn lef_decompose(a: &Form, model: &SymplecticModel) -> Result<PrimitiveDecomposition, LefschetzError> {
    let n = model.n();
    let Some(j) = a.homogeneous_degree() else {
        return if a.is_zero() {
            Ok(PrimitiveDecomposition { input_degree: 0, components: Vec::new() })
        } else {
            Err(LefschetzError::NonHomogeneous)
        };
    };
    let mut residual = a.clone();
    let mut components = Vec::new();
    let lowest = j.saturating_sub(n);
    for r in (lowest..=j / 2).rev() {
        let m = j - 2 * r;
        let k = n - m;
        let lifted = model.l_pow(&residual, n + r - j);
        let p = model.lstar_pow(&lifted, k).scale(&lefschetz_constant(k));
        if !p.is_zero() {
            residual = &residual - &model.l_pow(&p, r);
            components.push((r, p));
        }
    }
    debug_assert!(residual.is_zero());
    components.reverse();
    Ok(PrimitiveDecomposition { input_degree: j, components })
}

/// `d a = 0 = δ a`.
pub fn is_harmonic(a: &Form, model: &SymplecticModel) -> bool {
    a.d().is_zero() && model.delta(a).is_zero()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CavalcantiDegree {
    pub degree: usize,
    pub im_delta_cap_ker_d: usize,
    pub im_d_cap_im_delta: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CavalcantiReport {
    pub selector: Selector,
    pub degrees: Vec<CavalcantiDegree>,
    pub holds: bool,
}

/// Compares `dim(Im δ ∩ ker d)` with `dim(Im d ∩ Im δ)` in every form
/// degree. The inclusion `Im d ∩ Im δ ⊆ Im δ ∩ ker d` always holds, so equal
/// dimensions mean equal subspaces. On coordinate charts the target piece
/// in degree `k` is `(k, t − k)`.
pub fn cavalcanti_check(model: &SymplecticModel, sel: Selector) -> Result<CavalcantiReport, LefschetzError> {
    let chart = model.chart();
    let top = model.dimension();
    let piece = |k: usize, p: Option<usize>| -> GradedPieceBasis {
        match p {
            Some(p) if k <= top => GradedPieceBasis::new(chart, k, p),
            _ => GradedPieceBasis::empty(chart, k),
        }
    };
    let poly = |k: usize| -> Result<Option<usize>, LefschetzError> {
        match (chart.kind(), sel) {
            (ChartKind::ChevalleyEilenberg, Selector::Compact) => Ok(Some(0)),
            (ChartKind::Coordinate, Selector::TotalDegree(t)) => Ok(t.checked_sub(k)),
            _ => Err(HomologyError::SelectorMismatch.into()),
        }
    };
    // d and δ change the polynomial degree by one on coordinate charts only
    let shift = usize::from(chart.kind() == ChartKind::Coordinate);
    let mut degrees = Vec::new();
    for k in 0..=top {
        let here = piece(k, poly(k)?);
        let p = poly(k)?;
        let from_below = if k == 0 { GradedPieceBasis::empty(chart, 0) } else { piece(k - 1, poly(k - 1)?) };
        let from_above = piece(k + 1, p.map(|p| p + shift));
        let next = piece(k + 1, p.and_then(|p| p.checked_sub(shift)));
        let ker_d = here.operator_matrix(&next, Form::d).map_err(LefschetzError::from)?.kernel();
        let im_d = from_below.operator_matrix(&here, Form::d)?.column_basis();
        let im_delta = from_above.operator_matrix(&here, |a| model.delta(a))?.column_basis();
        let len = here.dim();
        let a = intersection_dim(len, &im_delta, &ker_d);
        let b = intersection_dim(len, &im_d, &im_delta);
        degrees.push(CavalcantiDegree { degree: k, im_delta_cap_ker_d: a, im_d_cap_im_delta: b, holds: a == b });
    }
    let holds = degrees.iter().all(|d| d.holds);
    Ok(CavalcantiReport { selector: sel, degrees, holds })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::coeffring::int;
    use crate::exterior::ModelChart;
    use crate::homology::GradedPieceBasis;
    use crate::sample::random_homogeneous_form;

    #[test]
    fn primitivity_examples() {
        let m = SymplecticModel::standard(2).unwrap();
        let c = m.chart().clone();
        assert!(is_primitive(&Form::constant(&c, int(3)), &m).unwrap());
        assert!(!is_primitive(m.omega_form(), &m).unwrap());
        // x1, y1, x2, y2 → dx1∧dx2 is bit 0 and bit 2
        let dx1dx2 = Form::scalar_monomial(&c, 0b0101, int(1));
        assert!(is_primitive(&dx1dx2, &m).unwrap());
        assert!(is_primitive_dual(&dx1dx2, &m));
        assert_eq!(is_primitive(m.volume(), &m), Err(LefschetzError::DegreeAboveMiddle { degree: 4, n: 2 }));
    }

    #[test]
    fn constants_match_brute_force() {
        for n in 1..=3usize {
            let m = SymplecticModel::standard(n).unwrap();
            for k in 0..=n {
                let piece = GradedPieceBasis::new(m.chart(), n - k, 0);
                let prims = if n - k < 2 {
                    crate::linalg::Matrix::identity(piece.dim()).to_rows()
                } else {
                    let target = GradedPieceBasis::new(m.chart(), n - k - 2, 0);
                    piece.operator_matrix(&target, |a| m.lstar(a)).unwrap().kernel()
                };
                assert!(!prims.is_empty());
                for v in prims {
                    let p = piece.form(&v);
                    let img = m.lstar_pow(&m.l_pow(&p, k), k);
                    // img = λ p; solve for λ from any nonzero coordinate
                    let iv = piece.coords(&img).unwrap();
                    let (i, pv) = v.iter().enumerate().find(|(_, x)| !x.is_zero()).unwrap();
                    let lambda = &iv[i] / pv;
                    assert_eq!(img, p.scale(&lambda));
                    assert_eq!(lambda.recip(), lefschetz_constant(k), "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn decomposition_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=3usize {
            let m = SymplecticModel::standard(n).unwrap();
            for j in 0..=2 * n {
                for _ in 0..5 {
                    let a = random_homogeneous_form(&mut rng, m.chart(), j, 2, 4);
                    let dec = lef_decompose(&a, &m).unwrap();
                    assert_eq!(dec.reconstruct(&m), a);
                    if j <= n {
                        assert_eq!(is_primitive(&a, &m).unwrap(), is_primitive_dual(&a, &m));
                    }
                    for (r, p) in &dec.components {
                        assert_eq!(p.homogeneous_degree(), Some(j - 2 * r));
                        assert!(is_primitive(p, &m).unwrap());
                        assert!(is_primitive_dual(p, &m));
                    }
                }
            }
        }
    }

    #[test]
    fn decomposition_is_unique() {
        let m = SymplecticModel::standard(2).unwrap();
        let c = m.chart().clone();
        let p0 = Form::scalar_monomial(&c, 0b0101, int(2));
        assert_eq!(lef_decompose(&p0, &m).unwrap().components, vec![(0, p0.clone())]);
        // a degree-n primitive is killed by L, so lift a 1-form instead
        assert!(m.l(&p0).is_zero());
        let dx1 = Form::basis_one_form(&c, 0);
        assert_eq!(lef_decompose(&m.l(&dx1), &m).unwrap().components, vec![(1, dx1)]);
        let one = Form::constant(&c, int(1));
        let mixed = &p0 + m.omega_form();
        let dec = lef_decompose(&mixed, &m).unwrap();
        assert_eq!(dec.components, vec![(0, p0), (1, one)]);
        assert!(lef_decompose(&Form::zero(&c), &m).unwrap().components.is_empty());
    }

    #[test]
    fn harmonic_examples() {
        let torus = Arc::new(ModelChart::chevalley_eilenberg::<&str>(&["e1", "e2", "e3", "e4"], &[]).unwrap());
        let t = SymplecticModel::from_entries(torus, &[(0, 2, int(1)), (1, 3, int(1))]).unwrap();
        assert!(is_harmonic(&Form::constant(t.chart(), int(1)), &t));
        assert!(is_harmonic(t.volume(), &t));
        let kt = Arc::new(ModelChart::chevalley_eilenberg(&["e1", "e2", "e3", "e4"], &[(3, 0, 1, int(1))]).unwrap());
        let k = SymplecticModel::from_entries(kt, &[(0, 2, int(1)), (1, 3, int(1))]).unwrap();
        assert!(!is_harmonic(&Form::basis_one_form(k.chart(), 3), &k));
    }

    #[test]
    fn cavalcanti_on_kodaira_thurston() {
        let kt = Arc::new(ModelChart::chevalley_eilenberg(&["e1", "e2", "e3", "e4"], &[(3, 0, 1, int(1))]).unwrap());
        let m = SymplecticModel::from_entries(kt.clone(), &[(0, 2, int(1)), (1, 3, int(1))]).unwrap();
        let r = cavalcanti_check(&m, Selector::Compact).unwrap();
        for d in &r.degrees {
            assert!(d.im_d_cap_im_delta <= d.im_delta_cap_ker_d);
        }
        // δ(e3∧e4) is a closed 1-form while Im d vanishes in degree 1
        let b = Form::scalar_monomial(&kt, 0b1100, int(1));
        let db = m.delta(&b);
        assert!(!db.is_zero() && db.d().is_zero());
        assert_eq!(r.degrees[1].im_d_cap_im_delta, 0);
        assert!(!r.degrees[1].holds && !r.holds);
    }

    #[test]
    fn cavalcanti_torus_and_trivial_piece() {
        let torus = Arc::new(ModelChart::chevalley_eilenberg::<&str>(&["e1", "e2", "e3", "e4"], &[]).unwrap());
        let t = SymplecticModel::from_entries(torus, &[(0, 2, int(1)), (1, 3, int(1))]).unwrap();
        assert!(cavalcanti_check(&t, Selector::Compact).unwrap().holds);
        let r2 = SymplecticModel::standard(1).unwrap();
        let rep = cavalcanti_check(&r2, Selector::TotalDegree(0)).unwrap();
        assert!(rep.degrees[1].holds && rep.degrees[2].holds);
        assert_eq!((rep.degrees[1].im_delta_cap_ker_d, rep.degrees[2].im_delta_cap_ker_d), (0, 0));
        // constants are δ-exact (δ(x dy) = 1) but not d-exact on the plane
        assert_eq!((rep.degrees[0].im_delta_cap_ker_d, rep.degrees[0].im_d_cap_im_delta), (1, 0));
        assert_eq!(cavalcanti_check(&r2, Selector::Compact), Err(LefschetzError::Homology(HomologyError::SelectorMismatch)));
    }
}
