//! Constant symplectic structures on model charts, the operators `δ`, `*`,
//! `L`, `L*`, `A`, and Poisson brackets on quotient presentations.
//!
//! Conventions: `ω = Σ dx_i∧dy_i` on the standard chart, `G = -Ω⁻¹` so that
//! `{x_i, y_j} = δ_ij`, and `A = [L*, L]`, which acts on degree-`k` forms as
//! `(n − k)·Id`.

mod model;
mod poisson;

use thiserror::Error;

use crate::coeffring::{CoeffError, Poly};
use crate::exterior::{ExteriorError, Form};

pub use model::{standard_bivector, SymplecticModel, SymplecticSpec};
pub use poisson::{PoissonPresentation, PoissonSpec};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SymplecticError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("omega must be a {expected}x{expected} matrix")]
    OmegaShape { expected: usize },
    #[error("invalid omega entry ({i}, {j})")]
    OmegaEntry { i: usize, j: usize },
    #[error("omega is not antisymmetric")]
    NotAntisymmetric,
    #[error("omega is degenerate")]
    Degenerate,
    #[error("omega is not closed")]
    NotClosed,
    #[error("form is not homogeneous")]
    NonHomogeneous,
    #[error("operation needs a coordinate chart")]
    NotCoordinateChart,
    #[error("bracket table: {0}")]
    BracketTable(String),
    #[error("Jacobi identity fails on ({a}, {b}, {c})")]
    JacobiViolation { a: String, b: String, c: String },
    #[error("bracket of relation {relation} with {generator} does not reduce to zero")]
    RelationNotPoisson { relation: String, generator: String },
}

/// Anything that carries a Poisson bracket on polynomials.
pub trait Bracket {
    fn bracket(&self, f: &Poly, g: &Poly) -> Result<Poly, SymplecticError>;
}

impl Bracket for SymplecticModel {
    fn bracket(&self, f: &Poly, g: &Poly) -> Result<Poly, SymplecticError> {
        SymplecticModel::bracket(self, f, g)
    }
}

impl Bracket for PoissonPresentation {
    fn bracket(&self, f: &Poly, g: &Poly) -> Result<Poly, SymplecticError> {
        PoissonPresentation::bracket(self, f, g)
    }
}

pub fn poisson_bracket<B: Bracket>(f: &Poly, g: &Poly, model: &B) -> Result<Poly, SymplecticError> {
    model.bracket(f, g)
}

pub fn delta_formula(a: &Form, model: &SymplecticModel) -> Result<Form, SymplecticError> {
    model.delta_formula(a)
}

pub fn delta_commutator(a: &Form, model: &SymplecticModel) -> Form {
    model.delta(a)
}

pub fn star(a: &Form, model: &SymplecticModel) -> Result<Form, SymplecticError> {
    model.star(a)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::coeffring::{int, vars_from, AlgebraPresentation, MonomialOrder, Scalar};
    use crate::exterior::ModelChart;
    use crate::sample::{random_form, random_homogeneous_form, random_poly};

    fn kt() -> SymplecticModel {
        let chart = ModelChart::chevalley_eilenberg(&["e1", "e2", "e3", "e4"], &[(3, 0, 1, int(1))]).unwrap();
        SymplecticModel::from_entries(Arc::new(chart), &[(0, 2, int(1)), (1, 3, int(1))]).unwrap()
    }

    fn torus() -> SymplecticModel {
        let chart = ModelChart::chevalley_eilenberg::<&str>(&["e1", "e2", "e3", "e4"], &[]).unwrap();
        SymplecticModel::from_entries(Arc::new(chart), &[(0, 2, int(1)), (1, 3, int(1))]).unwrap()
    }

    fn poly(m: &SymplecticModel, s: &str) -> Poly {
        Poly::parse(s, m.chart().coeff_vars()).unwrap()
    }

    #[test]
    fn standard_bracket_normalization() {
        let m = SymplecticModel::standard(1).unwrap();
        assert_eq!(m.bracket(&poly(&m, "x1"), &poly(&m, "y1")).unwrap(), poly(&m, "1"));
        assert_eq!(*m.bivector(), standard_bivector(1));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m2 = SymplecticModel::standard(2).unwrap();
        for _ in 0..20 {
            let f = random_poly(&mut rng, m2.chart().coeff_vars(), 4, 4);
            assert!(m2.bracket(&f, &f).unwrap().is_zero());
        }
        let foreign = Poly::parse("z", &vars_from(&["z"])).unwrap();
        assert!(matches!(m.bracket(&foreign, &foreign), Err(SymplecticError::Coeff(CoeffError::UnknownVariable(_)))));
    }

    #[test]
    fn construction_errors() {
        let chart = Arc::new(ModelChart::standard(1).unwrap());
        assert_eq!(SymplecticModel::new(chart.clone(), vec![vec![int(0); 2]; 2]).unwrap_err(), SymplecticError::Degenerate);
        let nonanti = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
        assert_eq!(SymplecticModel::new(chart, nonanti).unwrap_err(), SymplecticError::NotAntisymmetric);
        // e3∧e4 on the KT chart has d(e3∧e4) = e1∧e2∧e3
        let k = Arc::new(ModelChart::chevalley_eilenberg(&["e1", "e2", "e3", "e4"], &[(3, 0, 1, int(1))]).unwrap());
        let bad = SymplecticModel::from_entries(k, &[(0, 1, int(1)), (2, 3, int(1))]);
        assert_eq!(bad.unwrap_err(), SymplecticError::NotClosed);
    }

    #[test]
    fn delta_examples() {
        let m = SymplecticModel::standard(1).unwrap();
        let c = m.chart().clone();
        let f = Form::function(&c, poly(&m, "x1^2*y1 + 3")).unwrap();
        assert!(m.delta(&f).is_zero());
        assert!(m.delta_formula(&f).unwrap().is_zero());
        let x_dy = Form::monomial(&c, 0b10, poly(&m, "x1")).unwrap();
        assert_eq!(m.delta(&x_dy), Form::constant(&c, int(1)));
        assert_eq!(m.delta_formula(&x_dy).unwrap(), Form::constant(&c, int(1)));
        let vol = Form::scalar_monomial(&c, 0b11, int(1));
        assert!(m.delta(&vol).is_zero());
        assert!(m.delta_formula(&vol).unwrap().is_zero());
        let m4 = SymplecticModel::standard(2).unwrap();
        assert!(m4.delta(m4.omega_form()).is_zero());
        assert_eq!(kt().delta_formula(kt().omega_form()), Err(SymplecticError::NotCoordinateChart));
    }

    #[test]
    fn star_examples() {
        let m = SymplecticModel::standard(1).unwrap();
        let c = m.chart().clone();
        assert_eq!(m.star(&Form::constant(&c, int(1))).unwrap(), *m.volume());
        assert_eq!(m.star(m.volume()).unwrap(), Form::constant(&c, int(1)));
        // pairing oracle: β ∧ *dx = G(β, dx) vol for β ∈ {dx, dy}
        let dx = Form::basis_one_form(&c, 0);
        let dy = Form::basis_one_form(&c, 1);
        let sdx = m.star(&dx).unwrap();
        assert!(dx.wedge(&sdx).unwrap().is_zero());
        assert_eq!(dy.wedge(&sdx).unwrap(), m.volume().scale(m.bivector().entry(1, 0)));
        assert_eq!(sdx, dx);
        assert_eq!(m.star(&dy).unwrap(), dy);
        assert_eq!(m.star(&(&dx + &m.volume().clone())), Err(SymplecticError::NonHomogeneous));
    }

    #[test]
    fn star_pairing_identity_on_r4_basis() {
        let m = SymplecticModel::standard(2).unwrap();
        let c = m.chart().clone();
        for a in 0..16u32 {
            let alpha = Form::scalar_monomial(&c, a, int(1));
            let sa = m.star(&alpha).unwrap();
            for b in (0..16u32).filter(|b| b.count_ones() == a.count_ones()) {
                let beta = Form::scalar_monomial(&c, b, int(1));
                let ai: Vec<usize> = crate::exterior::bits(a).collect();
                let bi: Vec<usize> = crate::exterior::bits(b).collect();
                let gram = crate::linalg::Matrix::from_rows(
                    bi.iter().map(|&x| ai.iter().map(|&y| m.bivector().entry(x, y).clone()).collect()).collect(),
                );
                let det = if ai.is_empty() { int(1) } else { gram.det() };
                assert_eq!(beta.wedge(&sa).unwrap(), m.volume().scale(&det));
            }
        }
    }

    #[test]
    fn three_way_delta_agreement_and_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = SymplecticModel::standard(2).unwrap();
        for _ in 0..60 {
            let a = random_form(&mut rng, m.chart(), 3, 4);
            let d1 = m.delta(&a);
            assert_eq!(m.delta_formula(&a).unwrap(), d1);
            for k in a.degrees() {
                let ak = a.homogeneous_part(k);
                assert_eq!(m.delta_via_star(&ak).unwrap(), m.delta(&ak));
                assert_eq!(m.star(&m.star(&ak).unwrap()).unwrap(), ak);
            }
            assert!(m.delta(&d1).is_zero());
        }
        for model in [kt(), torus()] {
            for _ in 0..60 {
                let a = random_form(&mut rng, model.chart(), 0, 6);
                assert!(model.delta(&model.delta(&a)).is_zero());
                for k in a.degrees() {
                    let ak = a.homogeneous_part(k);
                    assert_eq!(model.delta_via_star(&ak).unwrap(), model.delta(&ak));
                    assert_eq!(model.star(&model.star(&ak).unwrap()).unwrap(), ak);
                }
            }
        }
    }

    #[test]
    fn a_acts_by_n_minus_k() {
        let m = SymplecticModel::standard(2).unwrap();
        let c = m.chart().clone();
        let f = Form::function(&c, poly(&m, "x1*y2 - 2")).unwrap();
        assert_eq!(m.a(&f), f.scale(&int(2)));
        assert_eq!(m.a(m.volume()), m.volume().scale(&int(-2)));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3usize {
            let m = SymplecticModel::standard(n).unwrap();
            for k in 0..=2 * n {
                for _ in 0..4 {
                    let a = random_homogeneous_form(&mut rng, m.chart(), k, 2, 3);
                    let lam = Scalar::from_integer((n as i64 - k as i64).into());
                    assert_eq!(m.a(&a), a.scale(&lam));
                }
            }
        }
    }

    #[test]
    fn l_commutes_with_d_and_rec_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = SymplecticModel::standard(2).unwrap();
        let n = 2i64;
        for _ in 0..20 {
            let a = random_form(&mut rng, m.chart(), 3, 4);
            assert_eq!(m.l(&a).d(), m.l(&a.d()));
            for k in a.degrees() {
                let ak = a.homogeneous_part(k);
                for r in 1..=4usize {
                    let lhs = &m.l_pow(&m.lstar(&ak), r) - &m.lstar(&m.l_pow(&ak, r));
                    let r_i = r as i64;
                    let coeff = r_i * (k as i64 - n) + r_i * (r_i - 1);
                    let rhs = m.l_pow(&ak, r - 1).scale(&int(coeff));
                    assert_eq!(lhs, rhs, "r={r} k={k}");
                }
            }
        }
    }

    fn cz2() -> PoissonPresentation {
        let v = vars_from(&["u", "v", "w"]);
        let rel = Poly::parse("w^2 - u*v", &v).unwrap();
        let pres =
            AlgebraPresentation::new(v.clone(), vec![2, 2, 2], vec![rel], MonomialOrder::graded_lex_with(vec![2, 0, 1]).unwrap())
                .unwrap();
        let p = |s: &str| Poly::parse(s, &v).unwrap();
        PoissonPresentation::new(pres, &[(0, 1, p("4*w")), (0, 2, p("2*u")), (1, 2, p("-2*v"))]).unwrap()
    }

    #[test]
    fn cz2_table_matches_pullback() {
        let pp = cz2();
        let plane = SymplecticModel::standard(1).unwrap();
        let xy = plane.chart().coeff_vars().clone();
        let images: Vec<Poly> =
            ["x1^2", "y1^2", "x1*y1"].iter().map(|s| Poly::parse(s, &xy).unwrap()).collect();
        let gens = pp.vars().clone();
        for i in 0..3 {
            for j in 0..3 {
                let direct = plane.bracket(&images[i], &images[j]).unwrap();
                let table = pp.bracket(&Poly::var(&gens, i), &Poly::var(&gens, j)).unwrap();
                assert_eq!(table.compose(&images), direct);
            }
        }
        let spec = pp.to_spec();
        assert_eq!(PoissonPresentation::from_spec(&spec).unwrap(), pp);
    }

    #[test]
    fn poisson_validation() {
        let v = vars_from(&["a", "b", "c"]);
        let p = |s: &str| Poly::parse(s, &v).unwrap();
        let free = AlgebraPresentation::free(v.clone());
        let bad = PoissonPresentation::new(free.clone(), &[(0, 1, p("a")), (0, 2, p("b"))]);
        assert!(matches!(bad, Err(SymplecticError::JacobiViolation { .. })));
        let so3 = PoissonPresentation::new(free.clone(), &[(0, 1, p("c")), (1, 2, p("a")), (2, 0, p("b"))]);
        assert!(so3.is_ok());
        let conflict = PoissonPresentation::new(free, &[(0, 1, p("c")), (0, 1, p("a"))]);
        assert!(matches!(conflict, Err(SymplecticError::BracketTable(_))));

        let xy = vars_from(&["x", "y"]);
        let pres = AlgebraPresentation::new(
            xy.clone(),
            vec![1, 1],
            vec![Poly::parse("x", &xy).unwrap()],
            MonomialOrder::graded_lex(2),
        )
        .unwrap();
        let r = PoissonPresentation::new(pres, &[(0, 1, Poly::parse("1", &xy).unwrap())]);
        assert!(matches!(r, Err(SymplecticError::RelationNotPoisson { .. })));
    }

    #[test]
    fn spec_round_trip() {
        let m = kt();
        let back = SymplecticModel::from_spec(&m.to_spec()).unwrap();
        assert_eq!(back.omega_form().to_string(), m.omega_form().to_string());
        assert!(back.volume().coefficient(0b1111).constant_term() != Scalar::zero());
    }
}
