//! Sparse multivariate polynomials over an exact [`Field`], together with the
//! affine-invariant Hasse calculus in [`calculus`].
//!
//! Polynomials are kept canonical: a map from exponent vectors to nonzero
//! coefficients, so structural equality is polynomial equality.

pub mod calculus;
mod text;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

use crate::field::{Field, FieldError, FieldValue};
use crate::linalg::LinalgError;

pub use calculus::*;
pub use text::parse_poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("expected {expected} variables, found {found}")]
    VariableCount { expected: usize, found: usize },
    #[error("polynomials over different fields ({0} and {1})")]
    FieldMismatch(Field, Field),
    #[error("direction vectors are linearly dependent")]
    RankDeficient,
    #[error("transverse vectors do not complete the plane to a basis")]
    NotTransverse,
    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Exponent vector `a ∈ N^n`, ordered graded-lexicographically
/// (total degree first, then `x1 > x2 > … > xn`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn new(exps: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.0[i] = 1;
        m
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self − other`, if nonnegative.
    pub fn checked_sub(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Monomial(out))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<&[u32]> for Monomial {
    fn from(v: &[u32]) -> Self {
        Monomial::new(v)
    }
}

/// Total degree; the zero polynomial sits below every natural number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }

    /// Degree as an integer, with the zero polynomial mapped to `0`.
    pub fn or_zero(self) -> u32 {
        self.finite().unwrap_or(0)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Monomial, FieldValue>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly<{}, n={}>({})", self.field, self.nvars, self)
    }
}

impl MultiPoly {
    pub fn zero(field: Field, nvars: usize) -> Self {
        MultiPoly {
            field,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: Field, nvars: usize, c: FieldValue) -> Self {
        Self::monomial(field, Monomial::one(nvars), c)
    }

    pub fn one(field: Field, nvars: usize) -> Self {
        Self::constant(field, nvars, field.one())
    }

    /// The coordinate function `x_{i+1}` (zero-based `i`).
    pub fn var(field: Field, nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        Self::monomial(field, Monomial::unit(nvars, i), field.one())
    }

    pub fn monomial(field: Field, m: Monomial, c: FieldValue) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { field, nvars, terms }
    }

    /// Sums duplicate exponents and drops zero coefficients.
    pub fn from_terms<I>(field: Field, nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Monomial, FieldValue)>,
    {
        let mut p = Self::zero(field, nvars);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(PolyError::VariableCount {
                    expected: nvars,
                    found: m.nvars(),
                });
            }
            if c.field() != field {
                return Err(PolyError::FieldMismatch(field, c.field()));
            }
            p.add_term(m, &c);
        }
        Ok(p)
    }

    /// Linear form `c₀ + Σ cᵢ xᵢ`.
    pub fn affine_form(field: Field, constant: &FieldValue, coeffs: &[FieldValue]) -> Self {
        let n = coeffs.len();
        let mut p = Self::constant(field, n, constant.clone());
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::unit(n, i), c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: &FieldValue) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.degree() <= Degree::Finite(0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &FieldValue)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> FieldValue {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn constant_term(&self) -> FieldValue {
        self.coefficient(&Monomial::one(self.nvars))
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .next_back()
            .map_or(Degree::NegInfinity, |m| Degree::Finite(m.total_degree()))
    }

    /// Smallest total degree in the support; `None` for the zero polynomial.
    pub fn min_total_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::total_degree)
    }

    /// Largest exponent of each variable.
    pub fn var_degrees(&self) -> Vec<u32> {
        let mut out = vec![0; self.nvars];
        for m in self.terms.keys() {
            for (o, e) in out.iter_mut().zip(m.exponents()) {
                *o = (*o).max(*e);
            }
        }
        out
    }

    /// Graded-lex leading term.
    pub fn leading_term(&self) -> Option<(&Monomial, &FieldValue)> {
        self.terms.iter().next_back()
    }

    /// Rescaled so the graded-lex leading coefficient is 1.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("leading coefficient is nonzero")),
        }
    }

    fn compatible(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::VariableCount {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        if self.field != other.field {
            return Err(PolyError::FieldMismatch(self.field, other.field));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.compatible(other)?;
        let mut acc: BTreeMap<Monomial, FieldValue> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prod = ca * cb;
                if prod.is_zero() {
                    continue;
                }
                acc.entry(ma.mul(mb)).and_modify(|v| *v += &prod).or_insert(prod);
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(MultiPoly {
            field: self.field,
            nvars: self.nvars,
            terms: acc,
        })
    }

    pub fn scale(&self, c: &FieldValue) -> Self {
        if c.is_zero() {
            return Self::zero(self.field, self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, v)| {
                let w = v * c;
                (!w.is_zero()).then(|| (m.clone(), w))
            })
            .collect();
        MultiPoly {
            field: self.field,
            nvars: self.nvars,
            terms,
        }
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), -v)).collect();
        MultiPoly {
            field: self.field,
            nvars: self.nvars,
            terms,
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.field, self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn evaluate(&self, x: &[FieldValue]) -> Result<FieldValue, PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::VariableCount {
                expected: self.nvars,
                found: x.len(),
            });
        }
        if let Some(v) = x.iter().find(|v| v.field() != self.field) {
            return Err(PolyError::FieldMismatch(self.field, v.field()));
        }
        let degs = self.var_degrees();
        let powers: Vec<Vec<FieldValue>> = x
            .iter()
            .zip(&degs)
            .map(|(xi, &d)| {
                let mut pw = Vec::with_capacity(d as usize + 1);
                pw.push(self.field.one());
                for k in 0..d as usize {
                    pw.push(&pw[k] * xi);
                }
                pw
            })
            .collect();
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t *= &powers[i][e as usize];
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Same polynomial viewed in `nvars + extra` variables.
    pub fn extend_vars(&self, extra: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e: SmallVec<[u32; 4]> = m.0.clone();
                e.extend(std::iter::repeat(0).take(extra));
                (Monomial(e), c.clone())
            })
            .collect();
        MultiPoly {
            field: self.field,
            nvars: self.nvars + extra,
            terms,
        }
    }
}

impl std::ops::Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    /// Panics on mismatched variable counts or fields.
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("compatible polynomials")
    }
}

impl std::ops::Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("compatible polynomials")
    }
}

impl std::ops::Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("compatible polynomials")
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly::neg(self)
    }
}
