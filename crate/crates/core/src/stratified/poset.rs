use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Presentation, StratifiedError};
use crate::exterior::ModelChart;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumRecord {
    pub id: String,
    pub dimension: usize,
    pub is_regular: bool,
}

/// `lower < upper` means `lower` lies in the frontier of `upper`; the witness
/// is the declared reason the closure relation holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderPair {
    pub lower: usize,
    pub upper: usize,
    pub witness: String,
}

/// Finite poset of strata with its smooth-structure presentation.
#[derive(Debug, Clone)]
pub struct StratifiedModel {
    strata: Vec<StratumRecord>,
    order: BTreeMap<(usize, usize), String>,
    compact: bool,
    depth: usize,
    charts: BTreeMap<usize, Arc<ModelChart>>,
    presentation: Option<Presentation>,
}

impl PartialEq for StratifiedModel {
    fn eq(&self, other: &Self) -> bool {
        self.strata == other.strata
            && self.order == other.order
            && self.compact == other.compact
            && self.presentation == other.presentation
            && self.charts.len() == other.charts.len()
            && self.charts.iter().zip(&other.charts).all(|(a, b)| a.0 == b.0 && **a.1 == **b.1)
    }
}

impl StratifiedModel {
    /// Validates the strict order: indices in range, nonempty witnesses,
    /// irreflexive, transitive (hence antisymmetric), dimensions strictly
    /// increasing along the order, and regular strata maximal.
    pub fn new(strata: Vec<StratumRecord>, order: Vec<OrderPair>, compact: bool) -> Result<Self, StratifiedError> {
        let n = strata.len();
        if n == 0 {
            return Err(StratifiedError::InvalidOrder("no strata".into()));
        }
        let mut ids = BTreeSet::new();
        for s in &strata {
            if !ids.insert(s.id.as_str()) {
                return Err(StratifiedError::InvalidOrder(format!("duplicate stratum id {:?}", s.id)));
            }
        }
        let mut rel = BTreeMap::new();
        for p in order {
            if p.lower >= n || p.upper >= n {
                return Err(StratifiedError::UnknownStratum(p.lower.max(p.upper)));
            }
            if p.lower == p.upper {
                return Err(StratifiedError::InvalidOrder(format!("{} < itself", strata[p.lower].id)));
            }
            if p.witness.trim().is_empty() {
                return Err(StratifiedError::MissingWitness(strata[p.lower].id.clone(), strata[p.upper].id.clone()));
            }
            rel.insert((p.lower, p.upper), p.witness);
        }
        for &(a, b) in rel.keys() {
            if rel.contains_key(&(b, a)) {
                return Err(StratifiedError::InvalidOrder(format!("{} and {} are mutually below", strata[a].id, strata[b].id)));
            }
            if strata[a].dimension >= strata[b].dimension {
                return Err(StratifiedError::InvalidOrder(format!(
                    "{} < {} but dimensions do not increase",
                    strata[a].id, strata[b].id
                )));
            }
            if strata[a].is_regular {
                return Err(StratifiedError::InvalidOrder(format!("regular stratum {} is not maximal", strata[a].id)));
            }
            for &(c, d) in rel.keys() {
                if c == b && !rel.contains_key(&(a, d)) {
                    return Err(StratifiedError::InvalidOrder(format!(
                        "not transitive: {} < {} < {}",
                        strata[a].id, strata[b].id, strata[d].id
                    )));
                }
            }
        }
        let mut m = StratifiedModel { strata, order: rel, compact, depth: 0, charts: BTreeMap::new(), presentation: None };
        m.depth = m.longest_chain();
        Ok(m)
    }

    /// A single point.
    pub fn point() -> Self {
        Self::new(vec![StratumRecord { id: "pt".into(), dimension: 0, is_regular: true }], Vec::new(), true)
            .expect("valid")
    }

    /// A closed manifold of dimension `d`, one regular stratum.
    pub fn manifold(id: &str, dimension: usize) -> Self {
        Self::new(vec![StratumRecord { id: id.into(), dimension, is_regular: true }], Vec::new(), true).expect("valid")
    }

    pub fn with_presentation(mut self, p: Presentation) -> Self {
        self.presentation = Some(p);
        self
    }

    /// Attaches a chart to a regular stratum of matching dimension.
    pub fn with_chart(mut self, stratum: usize, chart: Arc<ModelChart>) -> Result<Self, StratifiedError> {
        let s = self.strata.get(stratum).ok_or(StratifiedError::UnknownStratum(stratum))?;
        if !s.is_regular || s.dimension != chart.dimension() {
            return Err(StratifiedError::InvalidOrder(format!("chart does not fit stratum {}", s.id)));
        }
        self.charts.insert(stratum, chart);
        Ok(self)
    }

    fn longest_chain(&self) -> usize {
        // strata sorted by dimension form a topological order
        let mut idx: Vec<usize> = (0..self.strata.len()).collect();
        idx.sort_by_key(|&i| self.strata[i].dimension);
        let mut best = vec![0usize; self.strata.len()];
        for &j in &idx {
            for &(a, b) in self.order.keys() {
                if b == j {
                    best[j] = best[j].max(best[a] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    pub fn strata(&self) -> &[StratumRecord] {
        &self.strata
    }

    pub fn order_pairs(&self) -> Vec<OrderPair> {
        self.order.iter().map(|(&(lower, upper), w)| OrderPair { lower, upper, witness: w.clone() }).collect()
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.order.contains_key(&(a, b))
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_compact(&self) -> bool {
        self.compact
    }

    pub fn charts(&self) -> &BTreeMap<usize, Arc<ModelChart>> {
        &self.charts
    }

    pub fn presentation(&self) -> Option<&Presentation> {
        self.presentation.as_ref()
    }

    pub fn top_dimension(&self) -> usize {
        self.strata.iter().map(|s| s.dimension).max().unwrap_or(0)
    }
}

/// Closed cone `L × [0,1] / L × {0}`: an apex below every stratum `S × (0,1)`.
pub fn cone(m: &StratifiedModel) -> Result<StratifiedModel, StratifiedError> {
    if !m.compact {
        return Err(StratifiedError::NotCompact);
    }
    let mut strata = vec![StratumRecord { id: format!("apex({})", cone_label(m)), dimension: 0, is_regular: false }];
    for s in &m.strata {
        strata.push(StratumRecord { id: format!("{}×(0,1)", s.id), dimension: s.dimension + 1, is_regular: s.is_regular });
    }
    let mut order: Vec<OrderPair> = (1..strata.len())
        .map(|j| OrderPair { lower: 0, upper: j, witness: "apex lies in the closure of every ray".into() })
        .collect();
    for (&(a, b), w) in &m.order {
        order.push(OrderPair { lower: a + 1, upper: b + 1, witness: format!("{w} (times the ray)") });
    }
    StratifiedModel::new(strata, order, true)
}

fn cone_label(m: &StratifiedModel) -> String {
    m.strata.iter().map(|s| s.id.as_str()).collect::<Vec<_>>().join(",")
}

/// Strata are pairs; `(a, b) < (a', b')` iff `a ≤ a'`, `b ≤ b'` and the pairs differ.
pub fn product(m1: &StratifiedModel, m2: &StratifiedModel) -> Result<StratifiedModel, StratifiedError> {
    let n2 = m2.strata.len();
    let mut strata = Vec::new();
    for a in &m1.strata {
        for b in &m2.strata {
            strata.push(StratumRecord {
                id: format!("{}×{}", a.id, b.id),
                dimension: a.dimension + b.dimension,
                is_regular: a.is_regular && b.is_regular,
            });
        }
    }
    let le1 = |a: usize, b: usize| a == b || m1.less(a, b);
    let le2 = |a: usize, b: usize| a == b || m2.less(a, b);
    let mut order = Vec::new();
    for i in 0..strata.len() {
        for j in 0..strata.len() {
            let (a, b) = (i / n2, i % n2);
            let (c, d) = (j / n2, j % n2);
            if i != j && le1(a, c) && le2(b, d) {
                order.push(OrderPair { lower: i, upper: j, witness: "closure of a product is the product of closures".into() });
            }
        }
    }
    StratifiedModel::new(strata, order, m1.compact && m2.compact)
}

/// Join `L₁ * L₂`: strata of `L₁`, strata of `L₂`, and `S × T × (0,1)`, with
/// `S' < S × T × (0,1)` for `S' ≤ S` and likewise on the other side.
pub fn join(l1: &StratifiedModel, l2: &StratifiedModel) -> Result<StratifiedModel, StratifiedError> {
    let (n1, n2) = (l1.strata.len(), l2.strata.len());
    // the ends of the join segments are no longer open in the join
    let mut strata: Vec<StratumRecord> =
        l1.strata.iter().chain(&l2.strata).map(|s| StratumRecord { is_regular: false, ..s.clone() }).collect();
    for a in &l1.strata {
        for b in &l2.strata {
            strata.push(StratumRecord {
                id: format!("{}×{}×(0,1)", a.id, b.id),
                dimension: a.dimension + b.dimension + 1,
                is_regular: a.is_regular && b.is_regular,
            });
        }
    }
    let mid = |a: usize, b: usize| n1 + n2 + a * n2 + b;
    let le1 = |a: usize, b: usize| a == b || l1.less(a, b);
    let le2 = |a: usize, b: usize| a == b || l2.less(a, b);
    let mut order = Vec::new();
    let w = |s: &str| s.to_string();
    for (&(a, b), wit) in &l1.order {
        order.push(OrderPair { lower: a, upper: b, witness: wit.clone() });
    }
    for (&(a, b), wit) in &l2.order {
        order.push(OrderPair { lower: n1 + a, upper: n1 + b, witness: wit.clone() });
    }
    for a in 0..n1 {
        for b in 0..n2 {
            for a2 in 0..n1 {
                if le1(a2, a) {
                    order.push(OrderPair { lower: a2, upper: mid(a, b), witness: w("end of the join segment") });
                }
            }
            for b2 in 0..n2 {
                if le2(b2, b) {
                    order.push(OrderPair { lower: n1 + b2, upper: mid(a, b), witness: w("end of the join segment") });
                }
            }
            for c in 0..n1 {
                for d in 0..n2 {
                    if (a, b) != (c, d) && le1(a, c) && le2(b, d) {
                        order.push(OrderPair { lower: mid(a, b), upper: mid(c, d), witness: w("product of closures") });
                    }
                }
            }
        }
    }
    StratifiedModel::new(strata, order, l1.compact && l2.compact)
}

/// Poset isomorphism preserving dimension and regularity, by backtracking.
pub fn isomorphic(a: &StratifiedModel, b: &StratifiedModel) -> bool {
    let n = a.strata.len();
    if n != b.strata.len() || a.order.len() != b.order.len() {
        return false;
    }
    fn extend(a: &StratifiedModel, b: &StratifiedModel, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let i = map.len();
        if i == a.strata.len() {
            return true;
        }
        for j in 0..b.strata.len() {
            if used[j] {
                continue;
            }
            let (sa, sb) = (&a.strata[i], &b.strata[j]);
            if sa.dimension != sb.dimension || sa.is_regular != sb.is_regular {
                continue;
            }
            let ok = (0..i).all(|p| a.less(p, i) == b.less(map[p], j) && a.less(i, p) == b.less(j, map[p]));
            if ok {
                map.push(j);
                used[j] = true;
                if extend(a, b, map, used) {
                    return true;
                }
                map.pop();
                used[j] = false;
            }
        }
        false
    }
    extend(a, b, &mut Vec::with_capacity(n), &mut vec![false; n])
}
