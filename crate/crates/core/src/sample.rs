//! Seeded random polynomials and forms for property checks.
//!
//! Everything here takes an explicit RNG so runs are reproducible; the
//! default seed used by reports is [`DEFAULT_SEED`].

use std::sync::Arc;

use rand::Rng;

use crate::coeffring::{rat, Monomial, Poly, Vars};
use crate::exterior::{ChartKind, Form, ModelChart, Wedge};

pub const DEFAULT_SEED: u64 = 0x5eed_2011;

fn random_scalar<R: Rng>(rng: &mut R) -> crate::coeffring::Scalar {
    let mut num = rng.gen_range(-6i64..=6);
    if num == 0 {
        num = 1;
    }
    rat(num, rng.gen_range(1i64..=3))
}

fn random_monomial<R: Rng>(rng: &mut R, nvars: usize, max_degree: u32) -> Monomial {
    let target = rng.gen_range(0..=max_degree);
    let mut m = vec![0u32; nvars];
    if nvars > 0 {
        for _ in 0..target {
            m[rng.gen_range(0..nvars)] += 1;
        }
    }
    m
}

/// Up to `max_terms` terms of total degree at most `max_degree`.
pub fn random_poly<R: Rng>(rng: &mut R, vars: &Vars, max_degree: u32, max_terms: usize) -> Poly {
    let count = rng.gen_range(1..=max_terms.max(1));
    Poly::from_terms(vars, (0..count).map(|_| (random_monomial(rng, vars.len(), max_degree), random_scalar(rng))))
}

/// A mixed-degree form. On CE charts coefficients are constants.
pub fn random_form<R: Rng>(rng: &mut R, chart: &Arc<ModelChart>, max_poly_degree: u32, max_terms: usize) -> Form {
    let dim = chart.dimension();
    let count = rng.gen_range(1..=max_terms.max(1));
    let mut f = Form::zero(chart);
    for _ in 0..count {
        let mask: Wedge = rng.gen_range(0..=chart.full_mask());
        let deg = if chart.kind() == ChartKind::Coordinate { max_poly_degree } else { 0 };
        let p = random_poly(rng, chart.coeff_vars(), deg, 3);
        f.add_term(mask & ((1u64 << dim) - 1) as u32, p);
    }
    f
}

/// A form whose terms all have `poly degree + form degree <= max_total`.
pub fn random_form_total_degree<R: Rng>(rng: &mut R, chart: &Arc<ModelChart>, max_total: u32, max_terms: usize) -> Form {
    let count = rng.gen_range(1..=max_terms.max(1));
    let mut f = Form::zero(chart);
    for _ in 0..count {
        let mask: Wedge = rng.gen_range(0..=chart.full_mask());
        let k = mask.count_ones();
        if k > max_total {
            continue;
        }
        let deg = if chart.kind() == ChartKind::Coordinate { max_total - k } else { 0 };
        f.add_term(mask, random_poly(rng, chart.coeff_vars(), deg, 3));
    }
    f
}

/// A form homogeneous of form degree `k`.
pub fn random_homogeneous_form<R: Rng>(
    rng: &mut R,
    chart: &Arc<ModelChart>,
    k: usize,
    max_poly_degree: u32,
    max_terms: usize,
) -> Form {
    let dim = chart.dimension();
    let masks: Vec<Wedge> = (0..=chart.full_mask()).filter(|m| m.count_ones() as usize == k).collect();
    let mut f = Form::zero(chart);
    if masks.is_empty() || k > dim {
        return f;
    }
    let count = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..count {
        let mask = masks[rng.gen_range(0..masks.len())];
        let deg = if chart.kind() == ChartKind::Coordinate { max_poly_degree } else { 0 };
        f.add_term(mask, random_poly(rng, chart.coeff_vars(), deg, 3));
    }
    f
}
