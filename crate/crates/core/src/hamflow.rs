//! Hamiltonian vector fields on Poisson presentations and their numeric flows.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeffring::{CoeffError, Poly, Vars};
use crate::symplectic::{PoissonPresentation, SymplecticError};

/// Absolute tolerance for the equalities of a stratum predicate.
pub const STRATUM_TOLERANCE: f64 = 1e-10;

/// Allowed relation residual of an initial state.
pub const INITIAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum HamflowError {
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("{{H, {relation}}} does not reduce to zero")]
    NotConserved { relation: String },
    #[error("initial state has {expected} entries, expected {got}")]
    StateLength { expected: usize, got: usize },
    #[error("initial state violates relation {relation}: residual {residual}")]
    OffVariety { relation: String, residual: f64 },
    #[error("time step and horizon must be positive and finite")]
    InvalidStep,
    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("state {0:?} matches no stratum")]
    Unclassified(Vec<f64>),
    #[error("state {state:?} matches strata {first} and {second}")]
    AmbiguousStratum { state: Vec<f64>, first: String, second: String },
}

/// A stratum in generator space: every `zero` polynomial vanishes and, when
/// `nonzero` is nonempty, at least one of those does not.
#[derive(Debug, Clone, PartialEq)]
pub struct StratumPredicate {
    pub id: String,
    pub zero: Vec<Poly>,
    pub nonzero: Vec<Poly>,
}

impl StratumPredicate {
    pub fn contains(&self, state: &[f64]) -> bool {
        self.zero.iter().all(|p| p.eval_f64(state).abs() <= STRATUM_TOLERANCE)
            && (self.nonzero.is_empty() || self.nonzero.iter().any(|p| p.eval_f64(state).abs() > STRATUM_TOLERANCE))
    }

    pub fn to_spec(&self) -> PredicateSpec {
        PredicateSpec {
            id: self.id.clone(),
            zero: self.zero.iter().map(|p| p.to_string()).collect(),
            nonzero: self.nonzero.iter().map(|p| p.to_string()).collect(),
        }
    }

    pub fn from_spec(spec: &PredicateSpec, vars: &Vars) -> Result<Self, HamflowError> {
        let parse = |v: &[String]| v.iter().map(|s| Poly::parse(s, vars)).collect::<Result<Vec<_>, _>>();
        Ok(StratumPredicate { id: spec.id.clone(), zero: parse(&spec.zero)?, nonzero: parse(&spec.nonzero)? })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateSpec {
    pub id: String,
    #[serde(default)]
    pub zero: Vec<String>,
    #[serde(default)]
    pub nonzero: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct HamiltonianSystem {
    poisson: Arc<PoissonPresentation>,
    h: Poly,
    strata: Vec<StratumPredicate>,
    field: Vec<Poly>,
}

impl HamiltonianSystem {
    /// Checks `{H, r} ≡ 0` modulo the relations for every relation `r`.
    pub fn new(poisson: Arc<PoissonPresentation>, h: Poly, strata: Vec<StratumPredicate>) -> Result<Self, HamflowError> {
        let vars = poisson.vars().clone();
        let h = poisson.presentation().reduce(&h.with_vars(&vars)?)?;
        for r in poisson.presentation().relations() {
            if !poisson.presentation().reduce(&poisson.bracket(&h, r)?)?.is_zero() {
                return Err(HamflowError::NotConserved { relation: r.to_string() });
            }
        }
        let field = (0..vars.len())
            .map(|i| Ok(poisson.presentation().reduce(&poisson.bracket(&h, &Poly::var(&vars, i))?)?))
            .collect::<Result<Vec<_>, HamflowError>>()?;
        Ok(HamiltonianSystem { poisson, h, strata, field })
    }

    pub fn poisson(&self) -> &Arc<PoissonPresentation> {
        &self.poisson
    }

    pub fn hamiltonian(&self) -> &Poly {
        &self.h
    }

    pub fn strata(&self) -> &[StratumPredicate] {
        &self.strata
    }

    pub fn vars(&self) -> &Vars {
        self.poisson.vars()
    }

    pub fn relations(&self) -> &[Poly] {
        self.poisson.presentation().relations()
    }

    /// Index of the unique stratum containing `state`.
    pub fn classify(&self, state: &[f64]) -> Result<usize, HamflowError> {
        let mut hit: Option<usize> = None;
        for (i, s) in self.strata.iter().enumerate() {
            if s.contains(state) {
                if let Some(j) = hit {
                    return Err(HamflowError::AmbiguousStratum {
                        state: state.to_vec(),
                        first: self.strata[j].id.clone(),
                        second: s.id.clone(),
                    });
                }
                hit = Some(i);
            }
        }
        hit.ok_or_else(|| HamflowError::Unclassified(state.to_vec()))
    }

    fn rhs(&self, state: &[f64]) -> Vec<f64> {
        self.field.iter().map(|p| p.eval_f64(state)).collect()
    }
}

/// `X_H(g_i) = {H, g_i}`, reduced modulo the relations.
pub fn ham_vector_field(sys: &HamiltonianSystem) -> Vec<Poly> {
    sys.field.clone()
}

/// Exact conservation data: `{H, H}` and `{H, r}` for each relation, reduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicConservation {
    pub h_h_vanishes: bool,
    pub relations_conserved: Vec<bool>,
}

pub fn symbolic_conservation(sys: &HamiltonianSystem) -> Result<SymbolicConservation, HamflowError> {
    let pres = sys.poisson.presentation();
    let h_h_vanishes = pres.reduce(&sys.poisson.bracket(&sys.h, &sys.h)?)?.is_zero();
    let relations_conserved = sys
        .relations()
        .iter()
        .map(|r| Ok(pres.reduce(&sys.poisson.bracket(&sys.h, r)?)?.is_zero()))
        .collect::<Result<Vec<_>, HamflowError>>()?;
    Ok(SymbolicConservation { h_h_vanishes, relations_conserved })
}

/// Whether every component of `X_H` vanishes identically once the generators
/// listed among the stratum's `zero` predicates are set to zero.
pub fn field_tangent_to_generator_stratum(sys: &HamiltonianSystem, stratum: usize) -> bool {
    let vars = sys.vars();
    let s = &sys.strata[stratum];
    let images: Vec<Poly> = (0..vars.len())
        .map(|i| {
            let g = Poly::var(vars, i);
            if s.zero.contains(&g) {
                Poly::zero(vars)
            } else {
                g
            }
        })
        .collect();
    sys.field.iter().all(|p| p.compose(&images).is_zero())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub generators: Vec<String>,
    pub relations: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub hamiltonian: Vec<f64>,
    pub residuals: Vec<Vec<f64>>,
    pub stratum_ids: Vec<String>,
}

impl Trajectory {
    /// Columns `t`, generators, `H`, one residual per relation, stratum id.
    pub fn csv_header(&self) -> Vec<String> {
        let mut h = vec!["t".to_string()];
        h.extend(self.generators.iter().cloned());
        h.push("H".into());
        h.extend((1..=self.relations.len()).map(|i| format!("relation{i}")));
        h.push("stratum".into());
        h
    }

    pub fn csv_rows(&self) -> impl Iterator<Item = Vec<String>> + '_ {
        (0..self.times.len()).map(move |i| {
            let mut row = vec![self.times[i].to_string()];
            row.extend(self.states[i].iter().map(|x| x.to_string()));
            row.push(self.hamiltonian[i].to_string());
            row.extend(self.residuals[i].iter().map(|x| x.to_string()));
            row.push(self.stratum_ids[i].clone());
            row
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Classical fixed-step RK4 from `initial` over `[0, t_end]`; the last step
/// is shortened to land on `t_end`.
pub fn integrate(sys: &HamiltonianSystem, initial: &[f64], t_end: f64, dt: f64) -> Result<Trajectory, HamflowError> {
    let n = sys.vars().len();
    if initial.len() != n {
        return Err(HamflowError::StateLength { expected: n, got: initial.len() });
    }
    if !(dt > 0.0 && dt.is_finite() && t_end >= 0.0 && t_end.is_finite()) {
        return Err(HamflowError::InvalidStep);
    }
    for r in sys.relations() {
        let residual = r.eval_f64(initial);
        if !(residual.abs() <= INITIAL_TOLERANCE) {
            return Err(HamflowError::OffVariety { relation: r.to_string(), residual });
        }
    }
    let steps = (t_end / dt).ceil() as usize;
    let mut traj = Trajectory {
        generators: sys.vars().iter().cloned().collect(),
        relations: sys.relations().iter().map(|r| r.to_string()).collect(),
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        hamiltonian: Vec::with_capacity(steps + 1),
        residuals: Vec::with_capacity(steps + 1),
        stratum_ids: Vec::with_capacity(steps + 1),
    };
    let mut x = initial.to_vec();
    let mut t = 0.0;
    record(sys, &mut traj, t, &x)?;
    let axpy = |x: &[f64], k: &[f64], c: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + c * b).collect() };
    for i in 0..steps {
        let next_t = ((i + 1) as f64 * dt).min(t_end);
        let h = next_t - t;
        let k1 = sys.rhs(&x);
        let k2 = sys.rhs(&axpy(&x, &k1, h / 2.0));
        let k3 = sys.rhs(&axpy(&x, &k2, h / 2.0));
        let k4 = sys.rhs(&axpy(&x, &k3, h));
        for j in 0..n {
            x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        t = next_t;
        record(sys, &mut traj, t, &x)?;
    }
    Ok(traj)
}

fn record(sys: &HamiltonianSystem, traj: &mut Trajectory, t: f64, x: &[f64]) -> Result<(), HamflowError> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(HamflowError::NonFiniteState { t });
    }
    let s = sys.classify(x)?;
    traj.times.push(t);
    traj.states.push(x.to_vec());
    traj.hamiltonian.push(sys.h.eval_f64(x));
    traj.residuals.push(sys.relations().iter().map(|r| r.eval_f64(x)).collect());
    traj.stratum_ids.push(sys.strata[s].id.clone());
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    /// `max |H(x_i) − H(x_0)|`, recomputed from the stored states.
    pub h_drift: f64,
    /// `max |r(x_i) − r(x_0)|` per relation.
    pub relation_drifts: Vec<f64>,
    pub stratum_changes: usize,
}

impl ConservationReport {
    pub fn max_drift(&self) -> f64 {
        self.relation_drifts.iter().cloned().fold(self.h_drift, f64::max)
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_drift() < tolerance && self.stratum_changes == 0
    }
}

pub fn conservation_report(traj: &Trajectory, sys: &HamiltonianSystem) -> ConservationReport {
    let Some(x0) = traj.states.first() else {
        return ConservationReport { h_drift: 0.0, relation_drifts: vec![0.0; sys.relations().len()], stratum_changes: 0 };
    };
    let h0 = sys.h.eval_f64(x0);
    let r0: Vec<f64> = sys.relations().iter().map(|r| r.eval_f64(x0)).collect();
    let mut h_drift: f64 = 0.0;
    let mut relation_drifts = vec![0.0f64; r0.len()];
    for x in &traj.states {
        h_drift = h_drift.max((sys.h.eval_f64(x) - h0).abs());
        for (d, (r, r0)) in relation_drifts.iter_mut().zip(sys.relations().iter().zip(&r0)) {
            *d = d.max((r.eval_f64(x) - r0).abs());
        }
    }
    let stratum_changes = traj.stratum_ids.windows(2).filter(|w| w[0] != w[1]).count();
    ConservationReport { h_drift, relation_drifts, stratum_changes }
}
