use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::poly::{Monomial, Poly, Vars};
use super::{CoeffError, Scalar};

/// Graded lexicographic order. Ties in total degree are broken by comparing
/// exponents variable by variable in `precedence` order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialOrder {
    precedence: Vec<usize>,
}

impl MonomialOrder {
    pub fn graded_lex(nvars: usize) -> Self {
        MonomialOrder { precedence: (0..nvars).collect() }
    }

    pub fn graded_lex_with(precedence: Vec<usize>) -> Result<Self, CoeffError> {
        let mut seen = vec![false; precedence.len()];
        for &i in &precedence {
            if i >= seen.len() || seen[i] {
                return Err(CoeffError::BadOrder);
            }
            seen[i] = true;
        }
        Ok(MonomialOrder { precedence })
    }

    pub fn precedence(&self) -> &[usize] {
        &self.precedence
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        let da: u32 = a.iter().sum();
        let db: u32 = b.iter().sum();
        da.cmp(&db).then_with(|| {
            for &i in &self.precedence {
                match a[i].cmp(&b[i]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

/// Generators with grading weights, polynomial relations and the monomial
/// order used for normal forms.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraPresentation {
    vars: Vars,
    weights: Vec<u32>,
    relations: Vec<Poly>,
    order: MonomialOrder,
    leads: Vec<(Monomial, Scalar)>,
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

impl AlgebraPresentation {
    /// Validates the presentation. Relations must have pairwise coprime
    /// leading monomials, which makes them a Gröbner basis and the reduction
    /// confluent; principal presentations always qualify.
    pub fn new(
        vars: Vars,
        weights: Vec<u32>,
        relations: Vec<Poly>,
        order: MonomialOrder,
    ) -> Result<Self, CoeffError> {
        if weights.len() != vars.len() || order.precedence.len() != vars.len() {
            return Err(CoeffError::BadOrder);
        }
        let mut rels = Vec::with_capacity(relations.len());
        let mut leads = Vec::with_capacity(relations.len());
        for r in relations {
            let r = r.with_vars(&vars)?;
            let Some((m, c)) = r.leading_term(&order) else {
                continue;
            };
            if m.iter().all(|&e| e == 0) {
                return Err(CoeffError::TrivialRelation);
            }
            leads.push((m.clone(), c.clone()));
            rels.push(r);
        }
        for i in 0..leads.len() {
            for j in i + 1..leads.len() {
                if !coprime(&leads[i].0, &leads[j].0) {
                    return Err(CoeffError::NonConfluent);
                }
            }
        }
        Ok(AlgebraPresentation { vars, weights, relations: rels, order, leads })
    }

    /// A free presentation: no relations, unit weights.
    pub fn free(vars: Vars) -> Self {
        let n = vars.len();
        AlgebraPresentation::new(vars, vec![1; n], Vec::new(), MonomialOrder::graded_lex(n))
            .expect("free presentation is valid")
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    /// Normal form of `p` modulo the relations (multivariate division).
    pub fn reduce(&self, p: &Poly) -> Result<Poly, CoeffError> {
        let p = p.with_vars(&self.vars)?;
        Ok(self.reduce_aligned(p))
    }

    pub(crate) fn reduce_aligned(&self, mut p: Poly) -> Poly {
        if self.relations.is_empty() {
            return p;
        }
        let mut rem = Poly::zero(&self.vars);
        while let Some((m, c)) = p.leading_term(&self.order).map(|(m, c)| (m.clone(), c.clone())) {
            let hit = self.leads.iter().position(|(lm, _)| divides(lm, &m));
            match hit {
                Some(k) => {
                    let (lm, lc) = &self.leads[k];
                    let shift: Vec<u32> = m.iter().zip(lm).map(|(a, b)| a - b).collect();
                    let q = &c / lc;
                    p = &p - &self.relations[k].mul_monomial(&shift, &q);
                }
                None => {
                    rem.add_term(m.clone(), c.clone());
                    p.add_term(m, -c);
                }
            }
        }
        rem
    }

    /// True when `p` lies in the ideal generated by the relations.
    pub fn is_zero_mod(&self, p: &Poly) -> Result<bool, CoeffError> {
        Ok(self.reduce(p)?.is_zero())
    }

    /// Weighted degree of a monomial.
    pub fn weighted_degree(&self, m: &[u32]) -> u32 {
        m.iter().zip(&self.weights).map(|(e, w)| e * w).sum()
    }
}

/// Free-function form of [`AlgebraPresentation::reduce`].
pub fn poly_reduce(p: &Poly, pres: &AlgebraPresentation) -> Result<Poly, CoeffError> {
    pres.reduce(p)
}
