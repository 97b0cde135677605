use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::StratifiedError;
use crate::coeffring::{normalized_step, rat, scalar_to_f64, smooth_invert, Point, Scalar, SmoothExpr};

/// A bump on the local model `B(ε) × cL(ε)`: `rho_b` and `rho_cl` are the
/// defining functions of the two factors, written in the ambient generators.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpSpec {
    pub epsilon: Scalar,
    pub rho_b: Arc<SmoothExpr>,
    pub rho_cl: Arc<SmoothExpr>,
}

impl BumpSpec {
    pub fn new(epsilon: Scalar, rho_b: Arc<SmoothExpr>, rho_cl: Arc<SmoothExpr>) -> Result<Self, StratifiedError> {
        if epsilon <= Scalar::zero() {
            return Err(StratifiedError::NonpositiveEpsilon);
        }
        Ok(BumpSpec { epsilon, rho_b, rho_cl })
    }

    /// Bump at the apex of a cone with radial coordinate `t`: `ρ_B = 0`, `ρ_cL = t`.
    pub fn apex(epsilon: Scalar, t: &str) -> Result<Self, StratifiedError> {
        Self::new(epsilon, SmoothExpr::constant(Scalar::zero()), SmoothExpr::generator(t))
    }

    /// Bump at a regular point `c`: `ρ_B = |x − c|² / ε`, `ρ_cL = 0`, which is
    /// smooth and below `ε` exactly on the `ε`-ball.
    pub fn regular_point(epsilon: Scalar, center: &[(String, Scalar)]) -> Result<Self, StratifiedError> {
        if epsilon <= Scalar::zero() {
            return Err(StratifiedError::NonpositiveEpsilon);
        }
        let inv = epsilon.recip();
        let squares: Vec<Arc<SmoothExpr>> = center
            .iter()
            .map(|(name, c)| {
                let diff = SmoothExpr::affine(SmoothExpr::generator(name), Scalar::one(), -c.clone());
                SmoothExpr::product(vec![SmoothExpr::constant(inv.clone()), diff.clone(), diff])
            })
            .collect();
        let rho_b = if squares.is_empty() { SmoothExpr::constant(Scalar::zero()) } else { SmoothExpr::sum(squares) };
        Self::new(epsilon, rho_b, SmoothExpr::constant(Scalar::zero()))
    }

    /// `a = (ρ_B + ρ_cL) / 2`.
    pub fn radius(&self) -> Arc<SmoothExpr> {
        SmoothExpr::product(vec![
            SmoothExpr::constant(rat(1, 2)),
            SmoothExpr::sum(vec![self.rho_b.clone(), self.rho_cl.clone()]),
        ])
    }

    pub fn epsilon_f64(&self) -> f64 {
        scalar_to_f64(&self.epsilon)
    }
}

/// `χ(a) = n((a − ε/5)/(ε/5)) · n((4ε/5 − a)/(ε/5))`: zero up to `ε/5`, one on
/// `[2ε/5, 3ε/5]`, zero from `4ε/5`.
pub fn chi(epsilon: &Scalar, a: Arc<SmoothExpr>) -> Arc<SmoothExpr> {
    let s = Scalar::from_integer(5.into()) / epsilon;
    let rise = SmoothExpr::normalized_step(SmoothExpr::affine(a.clone(), s.clone(), -Scalar::one()));
    let fall = SmoothExpr::normalized_step(SmoothExpr::affine(a, -s, Scalar::from_integer(4.into())));
    SmoothExpr::product(vec![rise, fall])
}

/// `f = 1 − ψ(a)` with `ψ = χ` for `2a ≤ 4ε/5` and `ψ = 1` beyond. Since
/// `χ = 1` on `[2ε/5, 3ε/5]`, this equals `1 − n(5a/ε − 1) = n(2 − 5a/ε)`.
pub fn bump_profile(epsilon: &Scalar, a: Arc<SmoothExpr>) -> Arc<SmoothExpr> {
    let s = Scalar::from_integer(5.into()) / epsilon;
    // 1 − n(t) = n(1 − t), which vanishes exactly past the seam
    SmoothExpr::normalized_step(SmoothExpr::affine(a, -s, Scalar::from_integer(2.into())))
}

pub fn bump_function(spec: &BumpSpec) -> Arc<SmoothExpr> {
    bump_profile(&spec.epsilon, spec.radius())
}

fn chi_f64(eps: f64, a: f64) -> f64 {
    normalized_step((a - eps / 5.0) / (eps / 5.0)) * normalized_step((4.0 * eps / 5.0 - a) / (eps / 5.0))
}

/// Numeric checks of a bump on its profile variable `a ∈ [0, ε]` and on
/// sample points of the ambient model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpDiagnostics {
    pub epsilon: f64,
    pub center_value: f64,
    pub min_value: f64,
    pub max_value: f64,
    /// `f = 0` wherever `ρ_B + ρ_cL ≥ 4ε/5` among the sample points.
    pub support_ok: bool,
    /// The five interval conditions on `χ`, in order.
    pub chi_conditions: [bool; 5],
    /// `max |f − (1 − ψ_piecewise)|` over the profile grid.
    pub piecewise_error: f64,
    /// One-sided difference-quotient jumps at `a = ε/5, 2ε/5, 3ε/5, 4ε/5`.
    pub seam_jumps: Vec<f64>,
    pub pass: bool,
}

/// Evaluates the profile on `profile_points` equispaced values of `a` and the
/// assembled bump on `samples`.
pub fn bump_diagnostics(spec: &BumpSpec, samples: &[Point], profile_points: usize) -> Result<BumpDiagnostics, StratifiedError> {
    let eps = spec.epsilon_f64();
    let profile = bump_profile(&spec.epsilon, SmoothExpr::generator("a"));
    let at = |a: f64| -> Result<f64, StratifiedError> {
        let p: Point = [("a".to_string(), a)].into_iter().collect();
        Ok(profile.eval(&p)?)
    };
    let fifth = eps / 5.0;
    let mut chi_ok = [true; 5];
    let mut piecewise_error: f64 = 0.0;
    let steps = profile_points.max(2);
    for i in 1..steps {
        let a = eps * i as f64 / steps as f64;
        let c = chi_f64(eps, a);
        let cond = if a <= fifth {
            (0, c == 0.0)
        } else if a < 2.0 * fifth {
            (1, c > 0.0 && c < 1.0)
        } else if a <= 3.0 * fifth {
            (2, c == 1.0)
        } else if a < 4.0 * fifth {
            (3, c > 0.0 && c < 1.0)
        } else {
            (4, c == 0.0)
        };
        // float rounding makes χ saturate within one ulp-scale band of the ends
        let near_seam = [1.0, 2.0, 3.0, 4.0].iter().any(|k| (a - k * fifth).abs() < 1e-9 * eps);
        if !cond.1 && !(near_seam || saturated(c)) {
            chi_ok[cond.0] = false;
        }
        let psi = if 2.0 * a <= 4.0 * fifth { c } else { 1.0 };
        piecewise_error = piecewise_error.max((at(a)? - (1.0 - psi)).abs());
    }
    let h = 1e-4 * eps;
    let mut seam_jumps = Vec::new();
    for k in 1..=4 {
        let a = k as f64 * fifth;
        let left = (at(a)? - at(a - h)?) / h;
        let right = (at(a + h)? - at(a)?) / h;
        seam_jumps.push((right - left).abs());
    }
    let bump = bump_function(spec);
    let values: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|p| -> Result<(f64, f64), StratifiedError> {
            let r = spec.rho_b.eval(p)? + spec.rho_cl.eval(p)?;
            Ok((r, bump.eval(p)?))
        })
        .collect::<Result<_, _>>()?;
    let (mut lo, mut hi) = (at(0.0)?, at(0.0)?);
    let mut support_ok = true;
    for &(r, f) in &values {
        lo = lo.min(f);
        hi = hi.max(f);
        if r >= 4.0 * fifth && f != 0.0 {
            support_ok = false;
        }
    }
    let center_value = at(0.0)?;
    let pass = center_value == 1.0
        && lo >= 0.0
        && hi <= 1.0
        && support_ok
        && chi_ok.iter().all(|&b| b)
        && piecewise_error < 1e-12
        && seam_jumps.iter().all(|&j| j < 1e-6);
    Ok(BumpDiagnostics {
        epsilon: eps,
        center_value,
        min_value: lo,
        max_value: hi,
        support_ok,
        chi_conditions: chi_ok,
        piecewise_error,
        seam_jumps,
        pass,
    })
}

fn saturated(c: f64) -> bool {
    // strictly inside (0,1) in exact arithmetic but rounded to an endpoint
    c == 0.0 || c == 1.0
}

#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    pub functions: Vec<Arc<SmoothExpr>>,
    /// Lower bound used for the reciprocal guard: half the smallest sampled sum.
    pub bound: Scalar,
    /// `max |Σ f_i − 1|` over the sample points.
    pub max_sum_error: f64,
    pub min_value: f64,
    /// `f_i = 0` wherever `g_i = 0` on the samples.
    pub supports_ok: bool,
}

/// `f_i = g_i / Σ g_j` with the reciprocal guarded by half the smallest sum
/// seen on `samples`. Fails with `CoverGap` where the sum vanishes.
pub fn partition_of_unity(cover: &[BumpSpec], samples: &[Point]) -> Result<PartitionOfUnity, StratifiedError> {
    if cover.is_empty() || samples.is_empty() {
        return Err(StratifiedError::EmptyCover);
    }
    let bumps: Vec<Arc<SmoothExpr>> = cover.iter().map(bump_function).collect();
    let values: Vec<Vec<f64>> = samples
        .par_iter()
        .map(|p| bumps.iter().map(|g| g.eval(p)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    let mut min_sum = f64::INFINITY;
    for (p, vals) in samples.iter().zip(&values) {
        let s: f64 = vals.iter().sum();
        if s <= 0.0 {
            return Err(StratifiedError::CoverGap(format_point(p)));
        }
        min_sum = min_sum.min(s);
    }
    let bound = Scalar::from_float(min_sum / 2.0).expect("finite");
    let total = SmoothExpr::sum(bumps.clone());
    let inv = smooth_invert(total, &bound)?;
    let functions: Vec<Arc<SmoothExpr>> = bumps.iter().map(|g| SmoothExpr::product(vec![g.clone(), inv.clone()])).collect();
    let checks: Vec<(f64, f64, bool)> = samples
        .par_iter()
        .zip(&values)
        .map(|(p, gs)| -> Result<(f64, f64, bool), StratifiedError> {
            let fs = functions.iter().map(|f| f.eval(p)).collect::<Result<Vec<_>, _>>()?;
            let sum: f64 = fs.iter().sum();
            let min = fs.iter().cloned().fold(f64::INFINITY, f64::min);
            let supp = fs.iter().zip(gs).all(|(f, g)| *g != 0.0 || *f == 0.0);
            Ok(((sum - 1.0).abs(), min, supp))
        })
        .collect::<Result<_, _>>()?;
    Ok(PartitionOfUnity {
        functions,
        bound,
        max_sum_error: checks.iter().map(|c| c.0).fold(0.0, f64::max),
        min_value: checks.iter().map(|c| c.1).fold(f64::INFINITY, f64::min),
        supports_ok: checks.iter().all(|c| c.2),
    })
}

fn format_point(p: &Point) -> String {
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone)]
pub struct SeparationWitness {
    pub function: Arc<SmoothExpr>,
    pub epsilon: Scalar,
    pub value_at_x1: f64,
    pub value_at_x2: f64,
}

/// A bump centred at `x2` whose neighbourhood misses `x1`, halving `ε`
/// until `f(x1) = 0`. When `apex` names a radial coordinate and `x2` sits at
/// its zero, the apex bump is used; the remaining coordinates feed `ρ_B`.
pub fn separates_points(x1: &Point, x2: &Point, apex: Option<&str>) -> Result<SeparationWitness, StratifiedError> {
    if x1 == x2 {
        return Err(StratifiedError::IdenticalPoints);
    }
    let at_apex = apex.is_some_and(|t| x2.get(t) == Some(&0.0));
    let mut eps = Scalar::one();
    for _ in 0..200 {
        let center: Vec<(String, Scalar)> = x2
            .iter()
            .filter(|(k, _)| !(at_apex && Some(k.as_str()) == apex))
            .map(|(k, v)| (k.clone(), Scalar::from_float(*v).expect("finite")))
            .collect();
        let mut spec = BumpSpec::regular_point(eps.clone(), &center)?;
        if at_apex {
            spec.rho_cl = SmoothExpr::generator(apex.expect("apex"));
        }
        let f = bump_function(&spec);
        let v1 = f.eval(x1)?;
        if v1 == 0.0 {
            let v2 = f.eval(x2)?;
            return Ok(SeparationWitness { function: f, epsilon: eps, value_at_x1: v1, value_at_x2: v2 });
        }
        eps /= Scalar::from_integer(2.into());
    }
    Err(StratifiedError::IdenticalPoints)
}
