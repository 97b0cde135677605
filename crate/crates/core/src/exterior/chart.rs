use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{wedge_sign, ExteriorError, Wedge};
use crate::coeffring::{fmt_scalar, vars_from, Scalar, Vars};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    /// Linear coordinates on ℝ^{2n}; form coefficients are polynomials.
    Coordinate,
    /// Left-invariant forms on a Lie group given by structure constants;
    /// coefficients are constants.
    ChevalleyEilenberg,
}

/// One structure constant `c^k_{ij}` (0-based, `i < j`).
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstant {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub value: Scalar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelChart {
    kind: ChartKind,
    names: Vec<String>,
    structure: Vec<StructureConstant>,
    coeff_vars: Vars,
    /// `d` of each basis 1-form (empty on coordinate charts).
    de: Vec<BTreeMap<Wedge, Scalar>>,
}

impl ModelChart {
    pub fn coordinate<S: AsRef<str>>(names: &[S]) -> Result<Self, ExteriorError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        check_dimension(names.len())?;
        check_names(&names)?;
        let n = names.len();
        Ok(ModelChart {
            kind: ChartKind::Coordinate,
            coeff_vars: vars_from(&names),
            names,
            structure: Vec::new(),
            de: vec![BTreeMap::new(); n],
        })
    }

    /// Standard coordinates `x1, y1, …, xn, yn` on ℝ^{2n}.
    pub fn standard(n: usize) -> Result<Self, ExteriorError> {
        let names: Vec<String> = (1..=n).flat_map(|i| [format!("x{i}"), format!("y{i}")]).collect();
        Self::coordinate(&names)
    }

    /// Chevalley–Eilenberg chart with `d e^k = -Σ_{i<j} c^k_{ij} e^i ∧ e^j`.
    /// Triples with `i > j` are folded in by antisymmetry. Fails with
    /// `JacobiViolation` unless `d∘d` vanishes on every basis 1-form.
    pub fn chevalley_eilenberg<S: AsRef<str>>(
        names: &[S],
        constants: &[(usize, usize, usize, Scalar)],
    ) -> Result<Self, ExteriorError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let dim = names.len();
        check_dimension(dim)?;
        check_names(&names)?;
        let mut table: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
        for (k, i, j, v) in constants {
            let (k, i, j) = (*k, *i, *j);
            if k >= dim || i >= dim || j >= dim {
                return Err(ExteriorError::InvalidChart(format!("structure index out of range: ({k}, {i}, {j})")));
            }
            if i == j {
                if v.is_zero() {
                    continue;
                }
                return Err(ExteriorError::InvalidChart(format!("c^{k}_{{{i}{i}}} must vanish")));
            }
            let (key, val) = if i < j { ((k, i, j), v.clone()) } else { ((k, j, i), -v.clone()) };
            *table.entry(key).or_insert_with(Scalar::zero) += val;
        }
        let structure: Vec<StructureConstant> = table
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((k, i, j), value)| StructureConstant { k, i, j, value })
            .collect();
        let mut de = vec![BTreeMap::new(); dim];
        for c in &structure {
            let mask: Wedge = (1 << c.i) | (1 << c.j);
            let e: &mut BTreeMap<Wedge, Scalar> = &mut de[c.k];
            *e.entry(mask).or_insert_with(Scalar::zero) -= c.value.clone();
        }
        for e in &mut de {
            e.retain(|_, v| !v.is_zero());
        }
        let chart = ModelChart {
            kind: ChartKind::ChevalleyEilenberg,
            names,
            structure,
            coeff_vars: vars_from::<&str>(&[]),
            de,
        };
        for k in 0..dim {
            if !chart.ce_d_terms(&chart.de[k]).is_empty() {
                return Err(ExteriorError::JacobiViolation { generator: chart.names[k].clone() });
            }
        }
        Ok(chart)
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.names.len()
    }

    /// Half the dimension.
    pub fn n(&self) -> usize {
        self.names.len() / 2
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn structure(&self) -> &[StructureConstant] {
        &self.structure
    }

    /// Variables of coefficient polynomials (empty for CE charts).
    pub fn coeff_vars(&self) -> &Vars {
        &self.coeff_vars
    }

    pub fn d_basis(&self, k: usize) -> &BTreeMap<Wedge, Scalar> {
        &self.de[k]
    }

    /// Text label of the basis 1-form with index `i`.
    pub fn basis_label(&self, i: usize) -> String {
        match self.kind {
            ChartKind::Coordinate => format!("d{}", self.names[i]),
            ChartKind::ChevalleyEilenberg => self.names[i].clone(),
        }
    }

    pub fn full_mask(&self) -> Wedge {
        if self.dimension() == 32 {
            u32::MAX
        } else {
            (1u32 << self.dimension()) - 1
        }
    }

    /// CE differential of a constant-coefficient form.
    pub(crate) fn ce_d_terms(&self, terms: &BTreeMap<Wedge, Scalar>) -> BTreeMap<Wedge, Scalar> {
        let mut out: BTreeMap<Wedge, Scalar> = BTreeMap::new();
        for (&mask, c) in terms {
            for (pos, i) in bits(mask).enumerate() {
                let below = mask & ((1u32 << i) - 1);
                let above = mask & !((1u32 << (i + 1)) - 1);
                for (&m2, c2) in &self.de[i] {
                    let Some(s1) = wedge_sign(below, m2) else { continue };
                    let Some(s2) = wedge_sign(below | m2, above) else { continue };
                    let sign = if pos % 2 == 0 { s1 * s2 } else { -s1 * s2 };
                    let v = c * c2;
                    let e = out.entry(below | m2 | above).or_insert_with(Scalar::zero);
                    if sign > 0 {
                        *e += v;
                    } else {
                        *e -= v;
                    }
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn to_spec(&self) -> ChartSpec {
        ChartSpec {
            kind: self.kind,
            dimension: self.dimension(),
            names: self.names.clone(),
            structure: self
                .structure
                .iter()
                .map(|c| (c.k + 1, c.i + 1, c.j + 1, fmt_scalar(&c.value)))
                .collect(),
        }
    }

    pub fn from_spec(spec: &ChartSpec) -> Result<Self, ExteriorError> {
        if spec.names.len() != spec.dimension {
            return Err(ExteriorError::InvalidChart(format!(
                "dimension {} but {} names",
                spec.dimension,
                spec.names.len()
            )));
        }
        match spec.kind {
            ChartKind::Coordinate => {
                if !spec.structure.is_empty() {
                    return Err(ExteriorError::InvalidChart("coordinate charts take no structure constants".into()));
                }
                Self::coordinate(&spec.names)
            }
            ChartKind::ChevalleyEilenberg => {
                let mut consts = Vec::with_capacity(spec.structure.len());
                for (k, i, j, v) in &spec.structure {
                    if *k == 0 || *i == 0 || *j == 0 {
                        return Err(ExteriorError::InvalidChart("structure indices are 1-based".into()));
                    }
                    let value = crate::coeffring::parse_scalar(v)
                        .map_err(|e| ExteriorError::InvalidChart(format!("structure value {v:?}: {e}")))?;
                    consts.push((k - 1, i - 1, j - 1, value));
                }
                Self::chevalley_eilenberg(&spec.names, &consts)
            }
        }
    }
}

/// File form of a chart: kind, dimension, names and 1-based nonzero
/// structure constants `(k, i, j, value)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub dimension: usize,
    pub names: Vec<String>,
    #[serde(default)]
    pub structure: Vec<(usize, usize, usize, String)>,
}

fn check_dimension(dim: usize) -> Result<(), ExteriorError> {
    if dim == 0 || !dim.is_multiple_of(2) || dim > 32 {
        return Err(ExteriorError::InvalidChart(format!("dimension must be even, positive and at most 32, got {dim}")));
    }
    Ok(())
}

fn check_names(names: &[String]) -> Result<(), ExteriorError> {
    for (i, n) in names.iter().enumerate() {
        let ok = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(ExteriorError::InvalidChart(format!("bad coordinate name {n:?}")));
        }
        if names[..i].contains(n) {
            return Err(ExteriorError::InvalidChart(format!("duplicate coordinate name {n:?}")));
        }
    }
    Ok(())
}

/// Set bit indices of `mask`, increasing.
pub fn bits(mask: Wedge) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}
