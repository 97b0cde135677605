use std::collections::BTreeSet;

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::StratifiedError;
use crate::coeffring::{vars_from, Monomial, Poly, Scalar, Vars};
use crate::linalg::span_dim;

/// Local coordinates `(x̃, ỹ, z̃)` on `ℝⁿ` near a resolved stratum: `x̃` are
/// normal to `ℝᵏ`, `ỹ` run along the fibers of `ℝᵏ → ℝˡ` and `z̃` along the
/// base. Variables are named `x1.., y1.., z1..`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibrationSpec {
    pub normal: usize,
    pub fiber: usize,
    pub base: usize,
}

impl FibrationSpec {
    /// From `(n, k, l)` with `l ≤ k ≤ n`.
    pub fn from_dims(n: usize, k: usize, l: usize) -> Result<Self, StratifiedError> {
        if l > k || k > n {
            return Err(StratifiedError::BadFibration { n, k, l });
        }
        Ok(FibrationSpec { normal: n - k, fiber: k - l, base: l })
    }

    pub fn ambient_dimension(&self) -> usize {
        self.normal + self.fiber + self.base
    }

    pub fn vars(&self) -> Vars {
        let names: Vec<String> = (1..=self.normal)
            .map(|i| format!("x{i}"))
            .chain((1..=self.fiber).map(|i| format!("y{i}")))
            .chain((1..=self.base).map(|i| format!("z{i}")))
            .collect();
        vars_from(&names)
    }

    fn is_normal(&self, i: usize) -> bool {
        i < self.normal
    }

    fn is_fiber(&self, i: usize) -> bool {
        (self.normal..self.normal + self.fiber).contains(&i)
    }
}

/// `g = Σ x̃ⁱ g_i + c(z̃)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipCertificate {
    pub normal_parts: Vec<Poly>,
    pub base_part: Poly,
}

impl MembershipCertificate {
    pub fn reassemble(&self, spec: &FibrationSpec) -> Poly {
        let vars = self.base_part.vars().clone();
        let mut g = self.base_part.clone();
        for (i, gi) in self.normal_parts.iter().enumerate() {
            debug_assert!(spec.is_normal(i));
            g = &g + &(&Poly::var(&vars, i) * gi);
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// Present iff `member`.
    pub certificate: Option<MembershipCertificate>,
    /// `g(0, ỹ, z̃)`.
    pub restriction: Poly,
}

/// Fiber-constancy test: every term containing some `x̃ⁱ` goes to `g_i` for
/// the first such `i`; the rest is `g(0, ỹ, z̃)`, which must not involve `ỹ`.
pub fn fiber_constancy_membership(g: &Poly, spec: &FibrationSpec) -> Result<Membership, StratifiedError> {
    let vars = spec.vars();
    let g = g.with_vars(&vars)?;
    let mut parts = vec![Poly::zero(&vars); spec.normal];
    let mut rest = Poly::zero(&vars);
    for (m, c) in g.terms() {
        match (0..spec.normal).find(|&i| m[i] > 0) {
            Some(i) => {
                let mut q = m.clone();
                q[i] -= 1;
                parts[i] = &parts[i] + &Poly::monomial(&vars, q, c.clone());
            }
            None => rest = &rest + &Poly::monomial(&vars, m.clone(), c.clone()),
        }
    }
    let member = rest.terms().all(|(m, _)| m.iter().enumerate().all(|(i, &e)| e == 0 || !spec.is_fiber(i)));
    let certificate = member.then(|| MembershipCertificate { normal_parts: parts, base_part: rest.clone() });
    Ok(Membership { member, certificate, restriction: rest })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub m_max: usize,
    pub truncation_degree: usize,
    /// Dimension of the truncated polynomial space.
    pub ambient_dim: usize,
    /// Dimension of `m_s²` inside it.
    pub square_dim: usize,
    /// Rank of `{x̃¹(ỹ¹)^m : 1 ≤ m ≤ m_max}` modulo `m_s²`.
    pub rank: usize,
    pub independent: bool,
}

fn monomials_up_to(nvars: usize, max_degree: usize) -> Vec<Monomial> {
    let mut out = vec![vec![0u32; nvars]];
    let mut frontier = out.clone();
    for _ in 0..max_degree {
        let mut next = BTreeSet::new();
        for m in &frontier {
            for i in 0..nvars {
                let mut q = m.clone();
                q[i] += 1;
                next.insert(q);
            }
        }
        frontier = next.into_iter().collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

/// Linear independence of `x̃¹(ỹ¹)^m`, `m = 1..=m_max`, in `m_s / m_s²`
/// truncated to polynomial degree `m_max + 2`. `m_s` is spanned by the
/// fiber-constant monomials vanishing at the origin, `m_s²` by their
/// pairwise products.
pub fn cotangent_growth_witness(spec: &FibrationSpec, m_max: usize) -> Result<GrowthReport, StratifiedError> {
    if spec.fiber == 0 {
        return Err(StratifiedError::NoFiberCoordinate);
    }
    if spec.normal == 0 {
        return Err(StratifiedError::BadFibration {
            n: spec.ambient_dimension(),
            k: spec.ambient_dimension(),
            l: spec.base,
        });
    }
    let vars = spec.vars();
    let nv = vars.len();
    let top = m_max + 2;
    let basis = monomials_up_to(nv, top);
    let index = |m: &Monomial| basis.iter().position(|b| b == m).expect("within truncation");
    let unit = |m: &Monomial| {
        let mut v = vec![Scalar::from_integer(0.into()); basis.len()];
        v[index(m)] = Scalar::one();
        v
    };
    let mut generators = Vec::new();
    for m in &basis {
        if m.iter().all(|&e| e == 0) {
            continue;
        }
        let p = Poly::monomial(&vars, m.clone(), Scalar::one());
        if fiber_constancy_membership(&p, spec)?.member {
            generators.push(m.clone());
        }
    }
    let mut square: BTreeSet<Monomial> = BTreeSet::new();
    for (i, a) in generators.iter().enumerate() {
        for b in &generators[i..] {
            let prod: Monomial = a.iter().zip(b).map(|(x, y)| x + y).collect();
            if prod.iter().sum::<u32>() as usize <= top {
                square.insert(prod);
            }
        }
    }
    let square_vecs: Vec<_> = square.iter().map(&unit).collect();
    let mut witness = Vec::new();
    for m in 1..=m_max {
        let mut mono = vec![0u32; nv];
        mono[0] = 1;
        mono[spec.normal] = m as u32;
        debug_assert!(generators.contains(&mono));
        witness.push(unit(&mono));
    }
    let len = basis.len();
    let square_dim = span_dim(len, &square_vecs);
    let all: Vec<_> = square_vecs.into_iter().chain(witness).collect();
    let rank = span_dim(len, &all) - square_dim;
    Ok(GrowthReport { m_max, truncation_degree: top, ambient_dim: len, square_dim, rank, independent: rank == m_max })
}
