use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::SymplecticError;
use crate::coeffring::{fmt_scalar, parse_scalar, Poly, Scalar};
use crate::exterior::{bits, contract_bivector, wedge_sign, Bivector, ChartKind, ChartSpec, Form, ModelChart, Wedge};
use crate::linalg::Matrix;

const STAR_CACHE_MAX_DIM: usize = 14;

/// A chart with a constant symplectic form `ω = Σ_{i<j} Ω_{ij} e^i∧e^j`
/// and its Poisson bivector `G = -Ω⁻¹`, so that `G·Ωᵀ = I`.
#[derive(Debug, Clone)]
pub struct SymplecticModel {
    chart: Arc<ModelChart>,
    omega: Matrix,
    g: Bivector,
    omega_form: Form,
    volume: Form,
    vol_coeff: Scalar,
    star_cache: Vec<OnceLock<BTreeMap<Wedge, Scalar>>>,
}

impl SymplecticModel {
    /// `omega` is the full antisymmetric matrix `Ω`.
    pub fn new(chart: Arc<ModelChart>, omega: Vec<Vec<Scalar>>) -> Result<Self, SymplecticError> {
        let dim = chart.dimension();
        if omega.len() != dim || omega.iter().any(|r| r.len() != dim) {
            return Err(SymplecticError::OmegaShape { expected: dim });
        }
        let bivector_check = Bivector::new(omega.clone()).map_err(|_| SymplecticError::NotAntisymmetric)?;
        let omega = Matrix::from_rows(bivector_check.matrix().to_vec());
        let inv = omega.inverse().ok_or(SymplecticError::Degenerate)?;
        let g_rows: Vec<Vec<Scalar>> =
            (0..dim).map(|i| (0..dim).map(|j| -inv.get(i, j).clone()).collect()).collect();
        let g = Bivector::new(g_rows).expect("inverse of antisymmetric is antisymmetric");

        let mut omega_form = Form::zero(&chart);
        for i in 0..dim {
            for j in i + 1..dim {
                let c = omega.get(i, j);
                if !c.is_zero() {
                    omega_form = &omega_form + &Form::scalar_monomial(&chart, (1 << i) | (1 << j), c.clone());
                }
            }
        }
        if !omega_form.d().is_zero() {
            return Err(SymplecticError::NotClosed);
        }
        let n = chart.n();
        let mut power = Form::constant(&chart, Scalar::one());
        let mut factorial = Scalar::one();
        for k in 1..=n {
            power = omega_form.wedge(&power)?;
            factorial *= Scalar::from_integer((k as i64).into());
        }
        let volume = power.scale(&factorial.recip());
        let vol_coeff = volume.coefficient(chart.full_mask()).constant_term();
        debug_assert!(!vol_coeff.is_zero());
        let cache_len = if dim <= STAR_CACHE_MAX_DIM { 1usize << dim } else { 0 };
        Ok(SymplecticModel {
            chart,
            omega,
            g,
            omega_form,
            volume,
            vol_coeff,
            star_cache: (0..cache_len).map(|_| OnceLock::new()).collect(),
        })
    }

    /// Builds `Ω` from 0-based upper-triangle entries `(i, j, Ω_{ij})`;
    /// entries with `i > j` are folded in by antisymmetry.
    pub fn from_entries(chart: Arc<ModelChart>, entries: &[(usize, usize, Scalar)]) -> Result<Self, SymplecticError> {
        let dim = chart.dimension();
        let mut m = vec![vec![Scalar::zero(); dim]; dim];
        for (i, j, v) in entries {
            let (i, j) = (*i, *j);
            if i >= dim || j >= dim || i == j {
                return Err(SymplecticError::OmegaEntry { i, j });
            }
            m[i][j] += v.clone();
            m[j][i] -= v.clone();
        }
        Self::new(chart, m)
    }

    /// `ℝ^{2n}` with `ω = Σ dx_i∧dy_i`.
    pub fn standard(n: usize) -> Result<Self, SymplecticError> {
        let chart = Arc::new(ModelChart::standard(n)?);
        let entries: Vec<_> = (0..n).map(|i| (2 * i, 2 * i + 1, Scalar::one())).collect();
        Self::from_entries(chart, &entries)
    }

    pub fn chart(&self) -> &Arc<ModelChart> {
        &self.chart
    }

    pub fn n(&self) -> usize {
        self.chart.n()
    }

    pub fn dimension(&self) -> usize {
        self.chart.dimension()
    }

    pub fn omega_matrix(&self) -> &Matrix {
        &self.omega
    }

    pub fn bivector(&self) -> &Bivector {
        &self.g
    }

    pub fn omega_form(&self) -> &Form {
        &self.omega_form
    }

    /// `ω^n / n!`.
    pub fn volume(&self) -> &Form {
        &self.volume
    }

    fn check(&self, a: &Form) -> Result<(), SymplecticError> {
        if crate::exterior::same_chart(a.chart(), &self.chart) {
            Ok(())
        } else {
            Err(SymplecticError::Exterior(crate::exterior::ExteriorError::ChartMismatch))
        }
    }

    /// `{f, g} = Σ G^{ij} ∂_i f ∂_j g` over the chart coordinates.
    pub fn bracket(&self, f: &Poly, g: &Poly) -> Result<Poly, SymplecticError> {
        let vars = self.chart.coeff_vars();
        let f = f.with_vars(vars)?;
        let g = g.with_vars(vars)?;
        let mut out = Poly::zero(vars);
        if self.chart.kind() != ChartKind::Coordinate {
            return Ok(out);
        }
        let dim = self.dimension();
        let df: Vec<Poly> = (0..dim).map(|i| f.partial(i)).collect();
        let dg: Vec<Poly> = (0..dim).map(|j| g.partial(j)).collect();
        for i in 0..dim {
            if df[i].is_zero() {
                continue;
            }
            for j in 0..dim {
                let gij = self.g.entry(i, j);
                if gij.is_zero() || dg[j].is_zero() {
                    continue;
                }
                out = &out + &(&df[i] * &dg[j]).scale(gij);
            }
        }
        Ok(out)
    }

    /// `L(a) = ω ∧ a`.
    pub fn l(&self, a: &Form) -> Form {
        self.omega_form.wedge(a).expect("form on the model chart")
    }

    /// `L*(a) = i(G) a`.
    pub fn lstar(&self, a: &Form) -> Form {
        contract_bivector(&self.g, a).expect("form on the model chart")
    }

    /// `A = [L*, L] = L*L − LL*`.
    pub fn a(&self, a: &Form) -> Form {
        &self.lstar(&self.l(a)) - &self.l(&self.lstar(a))
    }

    pub fn l_pow(&self, a: &Form, r: usize) -> Form {
        (0..r).fold(a.clone(), |acc, _| self.l(&acc))
    }

    pub fn lstar_pow(&self, a: &Form, r: usize) -> Form {
        (0..r).fold(a.clone(), |acc, _| self.lstar(&acc))
    }

    /// `δ = i(G)∘d − d∘i(G)`.
    pub fn delta(&self, a: &Form) -> Form {
        &self.lstar(&a.d()) - &self.lstar(a).d()
    }

    /// Explicit two-sum formula on the expansion `p dx_{a_1}∧…∧dx_{a_k}`:
    /// `Σ_i (−1)^{i+1} {p, x_{a_i}} dx_{…â_i…} + Σ_{i<j} (−1)^{i+j} p d{x_{a_i}, x_{a_j}} ∧ dx_{…â_i…â_j…}`.
    /// Needs exact coordinate 1-forms, so coordinate charts only.
    pub fn delta_formula(&self, a: &Form) -> Result<Form, SymplecticError> {
        self.check(a)?;
        if self.chart.kind() != ChartKind::Coordinate {
            return Err(SymplecticError::NotCoordinateChart);
        }
        let vars = self.chart.coeff_vars();
        let mut out = Form::zero(&self.chart);
        for (mask, p) in a.terms() {
            let idx: Vec<usize> = bits(mask).collect();
            for (i, &ai) in idx.iter().enumerate() {
                let br = self.bracket(p, &Poly::var(vars, ai))?;
                let sign = if i % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                out = &out + &Form::monomial(&self.chart, mask & !(1 << ai), br.scale(&sign))?;
            }
            for i in 0..idx.len() {
                for j in i + 1..idx.len() {
                    let br = self.bracket(&Poly::var(vars, idx[i]), &Poly::var(vars, idx[j]))?;
                    let dbr = Form::function(&self.chart, br)?.d();
                    if dbr.is_zero() {
                        continue;
                    }
                    let rest = Form::monomial(&self.chart, mask & !(1 << idx[i]) & !(1 << idx[j]), p.clone())?;
                    let sign = if (i + j) % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                    out = &out + &dbr.wedge(&rest)?.scale(&sign);
                }
            }
        }
        Ok(out)
    }

    /// `*e_A = Σ_B c_B e_B`, determined by `e_B ∧ *e_A = G^k(e_B, e_A) vol` for
    /// every `|B| = k`.
    pub fn star_basis(&self, mask: Wedge) -> BTreeMap<Wedge, Scalar> {
        match self.star_cache.get(mask as usize) {
            Some(cell) => cell.get_or_init(|| self.compute_star_basis(mask)).clone(),
            None => self.compute_star_basis(mask),
        }
    }

    fn compute_star_basis(&self, a: Wedge) -> BTreeMap<Wedge, Scalar> {
        let full = self.chart.full_mask();
        let k = a.count_ones();
        let aidx: Vec<usize> = bits(a).collect();
        let mut out = BTreeMap::new();
        for b in (0..=full).filter(|m| m.count_ones() == k) {
            let bidx: Vec<usize> = bits(b).collect();
            let gram = Matrix::from_rows(
                bidx.iter().map(|&bi| aidx.iter().map(|&aj| self.g.entry(bi, aj).clone()).collect()).collect(),
            );
            let det = if k == 0 { Scalar::one() } else { gram.det() };
            if det.is_zero() {
                continue;
            }
            let comp = full & !b;
            let sign = wedge_sign(b, comp).expect("disjoint");
            let c = det * &self.vol_coeff;
            out.insert(comp, if sign > 0 { c } else { -c });
        }
        out
    }

    /// Symplectic star on a homogeneous form.
    pub fn star(&self, a: &Form) -> Result<Form, SymplecticError> {
        self.check(a)?;
        if !a.is_homogeneous() {
            return Err(SymplecticError::NonHomogeneous);
        }
        let mut out = Form::zero(&self.chart);
        for (mask, p) in a.terms() {
            for (m2, c) in self.star_basis(mask) {
                out.add_term(m2, p.scale(&c));
            }
        }
        Ok(out)
    }

    /// `(−1)^{k+1} * d *` on a homogeneous degree-`k` form.
    pub fn delta_via_star(&self, a: &Form) -> Result<Form, SymplecticError> {
        let Some(k) = a.homogeneous_degree() else {
            return if a.is_zero() { Ok(a.clone()) } else { Err(SymplecticError::NonHomogeneous) };
        };
        let s = self.star(&self.star(a)?.d())?;
        Ok(if k % 2 == 1 { s } else { -s })
    }

    pub fn to_spec(&self) -> SymplecticSpec {
        let dim = self.dimension();
        let mut omega = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                let c = self.omega.get(i, j);
                if !c.is_zero() {
                    omega.push((i + 1, j + 1, fmt_scalar(c)));
                }
            }
        }
        SymplecticSpec { chart: self.chart.to_spec(), omega }
    }

    pub fn from_spec(spec: &SymplecticSpec) -> Result<Self, SymplecticError> {
        let chart = Arc::new(ModelChart::from_spec(&spec.chart)?);
        let mut entries = Vec::with_capacity(spec.omega.len());
        for (i, j, v) in &spec.omega {
            if *i == 0 || *j == 0 {
                return Err(SymplecticError::OmegaEntry { i: *i, j: *j });
            }
            entries.push((i - 1, j - 1, parse_scalar(v)?));
        }
        Self::from_entries(chart, &entries)
    }
}

/// File form: a chart plus 1-based entries `(i, j, Ω_{ij})` with `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpec {
    pub chart: ChartSpec,
    pub omega: Vec<(usize, usize, String)>,
}

/// Poisson bivector of `Σ dx_i∧dy_i` on `ℝ^{2n}` in the ordering
/// `x1, y1, …, xn, yn`.
pub fn standard_bivector(n: usize) -> Bivector {
    let dim = 2 * n;
    let mut m = vec![vec![Scalar::zero(); dim]; dim];
    for i in 0..n {
        m[2 * i][2 * i + 1] = Scalar::one();
        m[2 * i + 1][2 * i] = -Scalar::one();
    }
    Bivector::new(m).expect("antisymmetric")
}
