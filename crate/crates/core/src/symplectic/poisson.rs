use serde::{Deserialize, Serialize};

use super::SymplecticError;
use crate::coeffring::{vars_from, AlgebraPresentation, MonomialOrder, Poly, Vars};

/// A Poisson bracket on a quotient of a polynomial ring, given by its values
/// on pairs of generators.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonPresentation {
    presentation: AlgebraPresentation,
    /// Full antisymmetric table of reduced brackets `{g_i, g_j}`.
    table: Vec<Vec<Poly>>,
}

impl PoissonPresentation {
    /// Brackets are 0-based triples `(i, j, {g_i, g_j})`; unlisted pairs are
    /// zero and `(j, i)` is filled in by antisymmetry. Validates the Jacobi
    /// identity on all generator triples and compatibility with every
    /// relation, both modulo the relations.
    pub fn new(presentation: AlgebraPresentation, brackets: &[(usize, usize, Poly)]) -> Result<Self, SymplecticError> {
        let vars = presentation.vars().clone();
        let n = vars.len();
        let mut table = vec![vec![Poly::zero(&vars); n]; n];
        let mut set = vec![vec![false; n]; n];
        for (i, j, p) in brackets {
            let (i, j) = (*i, *j);
            if i >= n || j >= n {
                return Err(SymplecticError::BracketTable(format!("generator index out of range: ({i}, {j})")));
            }
            let p = presentation.reduce(p)?;
            if i == j {
                if !p.is_zero() {
                    return Err(SymplecticError::BracketTable(format!("{{{0}, {0}}} must vanish", vars[i])));
                }
                continue;
            }
            if set[i][j] && table[i][j] != p {
                return Err(SymplecticError::BracketTable(format!("conflicting values for {{{}, {}}}", vars[i], vars[j])));
            }
            set[i][j] = true;
            set[j][i] = true;
            table[j][i] = -&p;
            table[i][j] = p;
        }
        let out = PoissonPresentation { presentation, table };
        out.validate()?;
        Ok(out)
    }

    fn validate(&self) -> Result<(), SymplecticError> {
        let vars = self.vars().clone();
        let n = vars.len();
        let g = |i: usize| Poly::var(&vars, i);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let a = self.bracket(&g(i), &self.table[j][k])?;
                    let b = self.bracket(&g(j), &self.table[k][i])?;
                    let c = self.bracket(&g(k), &self.table[i][j])?;
                    if !self.presentation.reduce(&(&(&a + &b) + &c))?.is_zero() {
                        return Err(SymplecticError::JacobiViolation {
                            a: vars[i].clone(),
                            b: vars[j].clone(),
                            c: vars[k].clone(),
                        });
                    }
                }
            }
        }
        for r in self.presentation.relations() {
            for i in 0..n {
                if !self.bracket(r, &g(i))?.is_zero() {
                    return Err(SymplecticError::RelationNotPoisson { relation: r.to_string(), generator: vars[i].clone() });
                }
            }
        }
        Ok(())
    }

    pub fn presentation(&self) -> &AlgebraPresentation {
        &self.presentation
    }

    pub fn vars(&self) -> &Vars {
        self.presentation.vars()
    }

    pub fn table_entry(&self, i: usize, j: usize) -> &Poly {
        &self.table[i][j]
    }

    /// Leibniz extension `{f, g} = Σ ∂_i f ∂_j g {g_i, g_j}`, reduced.
    pub fn bracket(&self, f: &Poly, g: &Poly) -> Result<Poly, SymplecticError> {
        let vars = self.vars();
        let f = f.with_vars(vars)?;
        let g = g.with_vars(vars)?;
        let n = vars.len();
        let df: Vec<Poly> = (0..n).map(|i| f.partial(i)).collect();
        let dg: Vec<Poly> = (0..n).map(|j| g.partial(j)).collect();
        let mut out = Poly::zero(vars);
        for i in 0..n {
            if df[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if i == j || dg[j].is_zero() || self.table[i][j].is_zero() {
                    continue;
                }
                out = &out + &(&(&df[i] * &dg[j]) * &self.table[i][j]);
            }
        }
        Ok(self.presentation.reduce(&out)?)
    }

    pub fn to_spec(&self) -> PoissonSpec {
        let vars = self.vars();
        let n = vars.len();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if !self.table[i][j].is_zero() {
                    brackets.push((vars[i].clone(), vars[j].clone(), self.table[i][j].to_string()));
                }
            }
        }
        PoissonSpec {
            generators: vars.to_vec(),
            weights: self.presentation.weights().to_vec(),
            order: self.presentation.order().precedence().iter().map(|&i| vars[i].clone()).collect(),
            relations: self.presentation.relations().iter().map(|r| r.to_string()).collect(),
            brackets,
        }
    }

    pub fn from_spec(spec: &PoissonSpec) -> Result<Self, SymplecticError> {
        let vars = vars_from(&spec.generators);
        let index = |name: &str| {
            spec.generators
                .iter()
                .position(|g| g == name)
                .ok_or_else(|| SymplecticError::BracketTable(format!("unknown generator {name:?}")))
        };
        let order = if spec.order.is_empty() {
            MonomialOrder::graded_lex(vars.len())
        } else {
            let prec = spec.order.iter().map(|s| index(s)).collect::<Result<Vec<_>, _>>()?;
            MonomialOrder::graded_lex_with(prec)?
        };
        let weights = if spec.weights.is_empty() { vec![1; vars.len()] } else { spec.weights.clone() };
        let relations = spec.relations.iter().map(|r| Poly::parse(r, &vars)).collect::<Result<Vec<_>, _>>()?;
        let pres = AlgebraPresentation::new(vars.clone(), weights, relations, order)?;
        let mut brackets = Vec::new();
        for (a, b, p) in &spec.brackets {
            brackets.push((index(a)?, index(b)?, Poly::parse(p, &vars)?));
        }
        Self::new(pres, &brackets)
    }
}

/// File form of a Poisson presentation: generator names, optional weights and
/// monomial precedence, relation literals and bracket triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonSpec {
    pub generators: Vec<String>,
    #[serde(default)]
    pub weights: Vec<u32>,
    #[serde(default)]
    pub order: Vec<String>,
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default)]
    pub brackets: Vec<(String, String, String)>,
}
