//! Sparse multivariate polynomials over the rationals.
//!
//! A [`Poly`] carries its ordered variable list; every exponent vector has
//! exactly one entry per variable and no zero coefficient is ever stored.
//! Arithmetic between polynomials requires identical variable lists (the
//! variable list is shared through an `Arc`, so the common case is a pointer
//! comparison).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{CoeffError, Scalar};

/// Shared, ordered variable names.
pub type Vars = Arc<[String]>;

/// Exponent vector aligned with a [`Vars`] list.
pub type Monomial = Vec<u32>;

pub fn vars_from<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

pub fn rat(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    vars: Vars,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero(vars: &Vars) -> Self {
        Poly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Scalar::one())
    }

    pub fn constant(vars: &Vars, c: Scalar) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    /// The coordinate function for variable `index`.
    pub fn var(vars: &Vars, index: usize) -> Self {
        assert!(index < vars.len(), "variable index {index} out of range");
        let mut exps = vec![0; vars.len()];
        exps[index] = 1;
        Self::monomial(vars, exps, Scalar::one())
    }

    pub fn var_named(vars: &Vars, name: &str) -> Result<Self, CoeffError> {
        let idx = index_of(vars, name)?;
        Ok(Self::var(vars, idx))
    }

    pub fn monomial(vars: &Vars, exps: Monomial, c: Scalar) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Builds a polynomial from possibly repeated, possibly zero terms.
    pub fn from_terms<I>(vars: &Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Scalar)>,
    {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms.get(&vec![0; self.vars.len()]).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coefficient(&self, m: &[u32]) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn is_homogeneous_of(&self, degree: u32) -> bool {
        self.terms.keys().all(|m| m.iter().sum::<u32>() == degree)
    }

    pub fn degree_in(&self, index: usize) -> u32 {
        self.terms.keys().map(|m| m[index]).max().unwrap_or(0)
    }

    /// Indices of variables that occur with positive exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| self.terms.keys().any(|m| m[i] > 0)).collect()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Scalar) {
        debug_assert_eq!(m.len(), self.vars.len());
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, exps: &[u32], c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.iter().zip(exps).map(|(a, b)| a + b).collect(), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to the variable at `index`.
    pub fn partial(&self, index: usize) -> Self {
        assert!(index < self.vars.len(), "variable index {index} out of range");
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m[index];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm[index] -= 1;
            out.add_term(dm, c * Scalar::from_integer(BigInt::from(e)));
        }
        out
    }

    pub fn partial_by_name(&self, name: &str) -> Result<Self, CoeffError> {
        let idx = index_of(&self.vars, name)?;
        Ok(self.partial(idx))
    }

    /// Substitutes `images[i]` for variable `i`. All images share one
    /// variable list, which becomes the variable list of the result.
    pub fn compose(&self, images: &[Poly]) -> Self {
        assert_eq!(images.len(), self.vars.len(), "one image per variable");
        let target = images
            .first()
            .map(|p| p.vars.clone())
            .unwrap_or_else(|| self.vars.clone());
        let mut out = Poly::zero(&target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(&target, c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = &t * &images[i].pow(e);
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Re-expresses the polynomial over a larger (or reordered) variable list.
    pub fn with_vars(&self, target: &Vars) -> Result<Self, CoeffError> {
        if Arc::ptr_eq(&self.vars, target) || self.vars == *target {
            return Ok(Poly { vars: target.clone(), terms: self.terms.clone() });
        }
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, name) in self.vars.iter().enumerate() {
            match target.iter().position(|t| t == name) {
                Some(j) => map.push(Some(j)),
                None if self.degree_in(i) == 0 => map.push(None),
                None => return Err(CoeffError::UnknownVariable(name.clone())),
            }
        }
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut tm = vec![0; target.len()];
            for (i, &e) in m.iter().enumerate() {
                if let Some(j) = map[i] {
                    tm[j] += e;
                }
            }
            out.add_term(tm, c.clone());
        }
        Ok(out)
    }

    /// Sets variable `index` to zero.
    pub fn restrict_zero(&self, index: usize) -> Self {
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m[index] == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.vars.len());
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = scalar_to_f64(c);
                for (x, &e) in point.iter().zip(m) {
                    if e > 0 {
                        v *= x.powi(e as i32);
                    }
                }
                v
            })
            .sum()
    }

    pub fn eval_exact(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(m) {
                for _ in 0..e {
                    v *= x;
                }
            }
            acc += v;
        }
        acc
    }

    /// Leading monomial under `order`, with its coefficient.
    pub fn leading_term(&self, order: &super::MonomialOrder) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    fn check_vars(&self, other: &Poly) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variable lists: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }
}

pub(crate) fn index_of(vars: &Vars, name: &str) -> Result<usize, CoeffError> {
    vars.iter()
        .position(|v| v == name)
        .ok_or_else(|| CoeffError::UnknownVariable(name.to_string()))
}

pub fn scalar_to_f64(c: &Scalar) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.check_vars(rhs);
        let (mut big, small) =
            if self.terms.len() >= rhs.terms.len() { (self.clone(), rhs) } else { (rhs.clone(), self) };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_vars(rhs);
        let mut out = Poly::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Writes a scalar in the `p/q` literal form accepted by the parser.
pub fn fmt_scalar(c: &Scalar) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    /// Highest total degree first; inside a degree, reverse lexicographic on
    /// the exponent vector. The output re-parses to the same polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let factors: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], e)
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", fmt_scalar(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_scalar(&mag), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}
