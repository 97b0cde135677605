use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use super::chart::{bits, ChartKind, ModelChart};
use super::{wedge_sign, ExteriorError, Wedge};
use crate::coeffring::{Poly, Scalar};

/// A differential form `Σ p_I dx_I` with polynomial coefficients.
#[derive(Clone)]
pub struct Form {
    chart: Arc<ModelChart>,
    terms: BTreeMap<Wedge, Poly>,
}

impl PartialEq for Form {
    fn eq(&self, other: &Self) -> bool {
        same_chart(&self.chart, &other.chart) && self.terms == other.terms
    }
}

impl Eq for Form {}

pub(crate) fn same_chart(a: &Arc<ModelChart>, b: &Arc<ModelChart>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Form {
    pub fn zero(chart: &Arc<ModelChart>) -> Self {
        Form { chart: chart.clone(), terms: BTreeMap::new() }
    }

    /// The 0-form `p`.
    pub fn function(chart: &Arc<ModelChart>, p: Poly) -> Result<Self, ExteriorError> {
        Self::monomial(chart, 0, p)
    }

    pub fn constant(chart: &Arc<ModelChart>, c: Scalar) -> Self {
        Self::scalar_monomial(chart, 0, c)
    }

    /// `p · dx_I` for the index set encoded by `mask`.
    pub fn monomial(chart: &Arc<ModelChart>, mask: Wedge, p: Poly) -> Result<Self, ExteriorError> {
        let p = p.with_vars(chart.coeff_vars()).map_err(|_| ExteriorError::ForeignCoefficient)?;
        let mut f = Self::zero(chart);
        f.add_term(mask, p);
        Ok(f)
    }

    pub fn scalar_monomial(chart: &Arc<ModelChart>, mask: Wedge, c: Scalar) -> Self {
        assert_eq!(mask & !chart.full_mask(), 0, "index out of range");
        let mut f = Self::zero(chart);
        f.add_term(mask, Poly::constant(chart.coeff_vars(), c));
        f
    }

    /// The basis 1-form with index `i`.
    pub fn basis_one_form(chart: &Arc<ModelChart>, i: usize) -> Self {
        Self::scalar_monomial(chart, 1 << i, Scalar::one())
    }

    /// Builds a form from indices given as strictly increasing lists.
    pub fn from_index_terms<I>(chart: &Arc<ModelChart>, terms: I) -> Result<Self, ExteriorError>
    where
        I: IntoIterator<Item = (Vec<usize>, Poly)>,
    {
        let mut f = Self::zero(chart);
        for (idx, p) in terms {
            let mask = mask_from_increasing(&idx, chart.dimension())?;
            let p = p.with_vars(chart.coeff_vars()).map_err(|_| ExteriorError::ForeignCoefficient)?;
            f.add_term(mask, p);
        }
        Ok(f)
    }

    pub fn chart(&self) -> &Arc<ModelChart> {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (Wedge, &Poly)> {
        self.terms.iter().map(|(m, p)| (*m, p))
    }

    pub fn coefficient(&self, mask: Wedge) -> Poly {
        self.terms.get(&mask).cloned().unwrap_or_else(|| Poly::zero(self.chart.coeff_vars()))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, mask: Wedge, p: Poly) {
        if p.is_zero() {
            return;
        }
        match self.terms.entry(mask) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &p;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub(crate) fn add_scaled_term(&mut self, mask: Wedge, p: &Poly, sign: i8) {
        if sign > 0 {
            self.add_term(mask, p.clone());
        } else {
            self.add_term(mask, -p);
        }
    }

    /// Form degrees that occur, increasing.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|m| m.count_ones() as usize).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// `Some(k)` when every term has form degree `k`; the zero form is
    /// homogeneous of every degree and reports `None`.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        match self.degrees().as_slice() {
            [k] => Some(*k),
            _ => None,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degrees().len() <= 1
    }

    pub fn homogeneous_part(&self, k: usize) -> Form {
        Form {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.count_ones() as usize == k)
                .map(|(m, p)| (*m, p.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        if c.is_zero() {
            return Form::zero(&self.chart);
        }
        Form { chart: self.chart.clone(), terms: self.terms.iter().map(|(m, p)| (*m, p.scale(c))).collect() }
    }

    /// Multiplies by a 0-form coefficient.
    pub fn mul_poly(&self, q: &Poly) -> Form {
        let mut out = Form::zero(&self.chart);
        for (m, p) in &self.terms {
            out.add_term(*m, p * q);
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> Form {
        let mut out = Form::zero(&self.chart);
        for (m, p) in &self.terms {
            out.add_term(*m, f(p));
        }
        out
    }

    fn check_chart(&self, other: &Form) -> Result<(), ExteriorError> {
        if same_chart(&self.chart, &other.chart) {
            Ok(())
        } else {
            Err(ExteriorError::ChartMismatch)
        }
    }

    pub fn try_add(&self, other: &Form) -> Result<Form, ExteriorError> {
        self.check_chart(other)?;
        let mut out = self.clone();
        for (m, p) in &other.terms {
            out.add_term(*m, p.clone());
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Form) -> Result<Form, ExteriorError> {
        self.check_chart(other)?;
        let mut out = Form::zero(&self.chart);
        for (ma, pa) in &self.terms {
            for (mb, pb) in &other.terms {
                if let Some(s) = wedge_sign(*ma, *mb) {
                    let p = pa * pb;
                    out.add_scaled_term(ma | mb, &p, s);
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative.
    pub fn d(&self) -> Form {
        let mut out = Form::zero(&self.chart);
        match self.chart.kind() {
            ChartKind::Coordinate => {
                let dim = self.chart.dimension();
                for (&mask, p) in &self.terms {
                    for j in 0..dim {
                        if mask & (1 << j) != 0 {
                            continue;
                        }
                        let dp = p.partial(j);
                        if dp.is_zero() {
                            continue;
                        }
                        let below = (mask & ((1u32 << j) - 1)).count_ones();
                        out.add_scaled_term(mask | (1 << j), &dp, if below.is_multiple_of(2) { 1 } else { -1 });
                    }
                }
            }
            ChartKind::ChevalleyEilenberg => {
                for (&mask, p) in &self.terms {
                    let single: BTreeMap<Wedge, Scalar> = [(mask, Scalar::one())].into_iter().collect();
                    for (m2, c) in self.chart.ce_d_terms(&single) {
                        out.add_term(m2, p.scale(&c));
                    }
                }
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

/// Encodes a strictly increasing index list as a mask.
pub fn mask_from_increasing(idx: &[usize], dim: usize) -> Result<Wedge, ExteriorError> {
    let mut mask = 0u32;
    for (k, &i) in idx.iter().enumerate() {
        if i >= dim || (k > 0 && idx[k - 1] >= i) {
            return Err(ExteriorError::BadIndexSet(idx.to_vec()));
        }
        mask |= 1 << i;
    }
    Ok(mask)
}

/// Constant antisymmetric bivector `G = Σ_{i<j} G^{ij} ∂_i ∧ ∂_j`, stored
/// as its full matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Bivector {
    matrix: Vec<Vec<Scalar>>,
}

impl Bivector {
    pub fn new(matrix: Vec<Vec<Scalar>>) -> Result<Self, ExteriorError> {
        let n = matrix.len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(ExteriorError::DimensionMismatch { expected: n, found: row.len() });
            }
            for j in 0..n {
                if row[j] != -matrix[j][i].clone() {
                    return Err(ExteriorError::NotAntisymmetric);
                }
            }
        }
        Ok(Bivector { matrix })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        &self.matrix[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Scalar>] {
        &self.matrix
    }
}

/// Contraction with a constant bivector, lowering degree by two:
/// `i(G)(f dx_{a_1}∧…∧dx_{a_k}) = Σ_{p<q} (-1)^{p+q+1} G^{a_p a_q} f dx_{…â_p…â_q…}`.
pub fn contract_bivector(g: &Bivector, a: &Form) -> Result<Form, ExteriorError> {
    let dim = a.chart.dimension();
    if g.dimension() != dim {
        return Err(ExteriorError::DimensionMismatch { expected: dim, found: g.dimension() });
    }
    let mut out = Form::zero(&a.chart);
    for (&mask, p) in &a.terms {
        let idx: Vec<usize> = bits(mask).collect();
        for pi in 0..idx.len() {
            for qi in pi + 1..idx.len() {
                let gv = g.entry(idx[pi], idx[qi]);
                if gv.is_zero() {
                    continue;
                }
                // positions are 1-based in the sign; parity of p+q+1 is unchanged
                let c = if (pi + qi + 1) % 2 == 0 { gv.clone() } else { -gv.clone() };
                out.add_term(mask & !(1 << idx[pi]) & !(1 << idx[qi]), p.scale(&c));
            }
        }
    }
    Ok(out)
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        self.try_add(rhs).expect("forms on different charts")
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self.try_add(&-rhs).expect("forms on different charts")
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        Form { chart: self.chart.clone(), terms: self.terms.iter().map(|(m, p)| (*m, -p)).collect() }
    }
}

impl Add for Form {
    type Output = Form;
    fn add(self, rhs: Form) -> Form {
        &self + &rhs
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        &self - &rhs
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        -&self
    }
}

impl fmt::Display for Form {
    /// `(coeff) b1^b2 + …`, lowest degree first; `b` are basis 1-form labels
    /// (`dx` on coordinate charts, the generator name on CE charts).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<Wedge> = self.terms.keys().copied().collect();
        keys.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
        for (k, m) in keys.into_iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", self.terms[&m])?;
            if m != 0 {
                let labels: Vec<String> = bits(m).map(|i| self.chart.basis_label(i)).collect();
                write!(f, " {}", labels.join("^"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[{}]", self)
    }
}
