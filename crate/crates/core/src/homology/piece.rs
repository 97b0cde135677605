use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;

use super::HomologyError;
use crate::coeffring::{Monomial, Poly, Scalar};
use crate::exterior::{ChartKind, Form, ModelChart, Wedge};
use crate::linalg::Matrix;

/// Basis `x^α dx_I` of the forms with `|I| = k` and `|α| = p`. On CE charts
/// only `p = 0` is nonempty.
#[derive(Debug, Clone)]
pub struct GradedPieceBasis {
    chart: Arc<ModelChart>,
    degree: usize,
    poly_degree: usize,
    elements: Vec<(Wedge, Monomial)>,
    index: HashMap<(Wedge, Monomial), usize>,
}

fn monomials(nvars: usize, degree: usize) -> Vec<Monomial> {
    fn rec(i: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i + 1 == cur.len() {
            cur[i] = left as u32;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e as u32;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, degree, &mut vec![0; nvars], &mut out);
    out
}

impl GradedPieceBasis {
    pub fn new(chart: &Arc<ModelChart>, degree: usize, poly_degree: usize) -> Self {
        let mut elements = Vec::new();
        let dim = chart.dimension();
        let polys = match chart.kind() {
            ChartKind::Coordinate => monomials(dim, poly_degree),
            ChartKind::ChevalleyEilenberg if poly_degree == 0 => vec![Vec::new()],
            ChartKind::ChevalleyEilenberg => Vec::new(),
        };
        if degree <= dim {
            for mask in (0..=chart.full_mask()).filter(|m| m.count_ones() as usize == degree) {
                for m in &polys {
                    elements.push((mask, m.clone()));
                }
            }
        }
        let index = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        GradedPieceBasis { chart: chart.clone(), degree, poly_degree, elements, index }
    }

    /// The zero space in form degree `degree`.
    pub fn empty(chart: &Arc<ModelChart>, degree: usize) -> Self {
        GradedPieceBasis { chart: chart.clone(), degree, poly_degree: 0, elements: Vec::new(), index: HashMap::new() }
    }

    pub fn chart(&self) -> &Arc<ModelChart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn poly_degree(&self) -> usize {
        self.poly_degree
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> Form {
        let (mask, m) = &self.elements[i];
        let p = Poly::monomial(self.chart.coeff_vars(), m.clone(), Scalar::from_integer(1.into()));
        Form::monomial(&self.chart, *mask, p).expect("chart variables")
    }

    pub fn basis(&self) -> Vec<Form> {
        (0..self.dim()).map(|i| self.element(i)).collect()
    }

    /// Coordinates of `a`, which must lie in this piece.
    pub fn coords(&self, a: &Form) -> Result<Vec<Scalar>, HomologyError> {
        let mut v = vec![Scalar::zero(); self.dim()];
        for (mask, p) in a.terms() {
            for (m, c) in p.terms() {
                let i = self.index.get(&(mask, m.clone())).ok_or(HomologyError::OutsidePiece)?;
                v[*i] = c.clone();
            }
        }
        Ok(v)
    }

    pub fn form(&self, coords: &[Scalar]) -> Form {
        let mut f = Form::zero(&self.chart);
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                let (mask, m) = &self.elements[i];
                f.add_term(*mask, Poly::monomial(self.chart.coeff_vars(), m.clone(), c.clone()));
            }
        }
        f
    }

    /// Matrix of `op` from `self` to `target`; columns are images of basis
    /// elements.
    pub fn operator_matrix(&self, target: &GradedPieceBasis, op: impl Fn(&Form) -> Form) -> Result<Matrix, HomologyError> {
        let cols: Vec<Vec<Scalar>> =
            (0..self.dim()).map(|i| target.coords(&op(&self.element(i)))).collect::<Result<_, _>>()?;
        Ok(Matrix::from_columns(target.dim(), &cols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(4, 2).len(), 10);
        assert_eq!(monomials(2, 0), vec![vec![0, 0]]);
        assert_eq!(monomials(0, 0), vec![Vec::<u32>::new()]);
        assert!(monomials(0, 1).is_empty());
    }

    #[test]
    fn coords_round_trip() {
        let chart = Arc::new(ModelChart::standard(1).unwrap());
        let piece = GradedPieceBasis::new(&chart, 1, 2);
        assert_eq!(piece.dim(), 6);
        let f = Form::monomial(&chart, 0b01, Poly::parse("x1*y1 - 2*y1^2", chart.coeff_vars()).unwrap()).unwrap();
        let c = piece.coords(&f).unwrap();
        assert_eq!(piece.form(&c), f);
        let wrong = Form::monomial(&chart, 0b01, Poly::parse("x1", chart.coeff_vars()).unwrap()).unwrap();
        assert_eq!(piece.coords(&wrong), Err(HomologyError::OutsidePiece));
    }
}
