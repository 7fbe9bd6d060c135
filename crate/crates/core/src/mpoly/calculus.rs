//! Hasse derivatives, directional derivatives, restrictions to affine planes
//! and multiplicities.
//!
//! `D^a p` is the coefficient of `y^a` in `p(x + y)`; on monomials
//! `D^a x^c = binom(c, a) x^(c−a)`, with the binomial formed as an exact
//! integer before it is mapped into the field. Directional derivatives for a
//! basis `ω` (the columns of `L`) are `D^a(p∘L)(L⁻¹x)`. They are also
//! available through the expansion
//!
//! ```text
//! (ω·∇)^a p = Σ_{α_1..α_n, |α_i| = a_i} (b; α_1, …, α_n)! · D^b p · ω_1^{α_1} ⋯ ω_n^{α_n},
//! b = α_1 + ⋯ + α_n,
//! ```
//!
//! where `(b; α)!` is the multi-index multinomial `b! / (α_1! ⋯ α_n!)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use super::{Degree, Monomial, MultiPoly, PolyError};
use crate::field::{Field, FieldValue};
use crate::linalg::{Matrix, Vector};

/// Exact binomial coefficient.
pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    if let Some(v) = binomial_u128(n, k) {
        return BigUint::from(v);
    }
    let k = k.min(n - k);
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

fn binomial_u128(n: u32, k: u32) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(r)
}

/// `Π binom(c_i, a_i)` mapped into `field`; zero unless `a ≤ c` componentwise.
pub fn multi_binomial_in(field: Field, c: &[u32], a: &[u32]) -> FieldValue {
    let mut small: Option<u128> = Some(1);
    for (&ci, &ai) in c.iter().zip(a) {
        if ai > ci {
            return field.zero();
        }
        small = small.and_then(|s| s.checked_mul(binomial_u128(ci, ai)?));
    }
    match small {
        Some(v) => field.from_u128(v),
        None => {
            let big = c
                .iter()
                .zip(a)
                .fold(BigUint::one(), |acc, (&ci, &ai)| acc * binomial(ci, ai));
            field.from_biguint(&big)
        }
    }
}

/// All `a ∈ N^nvars` with `|a| = order`, in ascending lexicographic order.
pub fn multiindices(nvars: usize, order: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, left: usize, rem: u32, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            prefix.push(rem);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in 0..=rem {
            prefix.push(v);
            rec(prefix, left - 1, rem - v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if order == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(&mut Vec::with_capacity(nvars), nvars, order, &mut out);
    out
}

/// All multi-indices with `|a| ≤ max_order`, by increasing order then lex.
pub fn multiindices_up_to(nvars: usize, max_order: u32) -> Vec<Vec<u32>> {
    (0..=max_order).flat_map(|o| multiindices(nvars, o)).collect()
}

fn check_nvars(p: &MultiPoly, found: usize) -> Result<(), PolyError> {
    if p.nvars() != found {
        return Err(PolyError::VariableCount {
            expected: p.nvars(),
            found,
        });
    }
    Ok(())
}

fn check_field(p: &MultiPoly, other: Field) -> Result<(), PolyError> {
    if p.field() != other {
        return Err(PolyError::FieldMismatch(p.field(), other));
    }
    Ok(())
}

/// The Hasse derivative `D^a p`.
pub fn hasse_derivative(p: &MultiPoly, a: &[u32]) -> Result<MultiPoly, PolyError> {
    check_nvars(p, a.len())?;
    let field = p.field();
    let order: u32 = a.iter().sum();
    let mut out = MultiPoly::zero(field, p.nvars());
    if Degree::Finite(order) > p.degree() {
        return Ok(out);
    }
    let am = Monomial::new(a);
    for (m, c) in p.terms() {
        let Some(rest) = m.checked_sub(&am) else {
            continue;
        };
        let b = multi_binomial_in(field, m.exponents(), a);
        if b.is_zero() {
            continue;
        }
        out.add_term(rest, &(c * &b));
    }
    Ok(out)
}

/// `q(t) = p(M t + b)` for an `n × m` matrix `M`; the result has `m` variables.
pub fn compose_affine(p: &MultiPoly, m: &Matrix, b: &[FieldValue]) -> Result<MultiPoly, PolyError> {
    check_nvars(p, m.rows())?;
    check_nvars(p, b.len())?;
    check_field(p, m.field())?;
    let field = p.field();
    if let Some(v) = b.iter().find(|v| v.field() != field) {
        return Err(PolyError::FieldMismatch(field, v.field()));
    }
    let out_vars = m.cols();
    let degs = p.var_degrees();
    let powers: Vec<Vec<MultiPoly>> = (0..p.nvars())
        .map(|i| {
            let form = MultiPoly::affine_form(field, &b[i], m.row(i));
            let mut pw = vec![MultiPoly::one(field, out_vars)];
            for e in 0..degs[i] as usize {
                let next = &pw[e] * &form;
                pw.push(next);
            }
            pw
        })
        .collect();
    let mut out = MultiPoly::zero(field, out_vars);
    for (mon, c) in p.terms() {
        let mut t = MultiPoly::constant(field, out_vars, c.clone());
        for (i, &e) in mon.exponents().iter().enumerate() {
            if e > 0 {
                t = &t * &powers[i][e as usize];
            }
        }
        for (tm, tc) in t.terms() {
            out.add_term(tm.clone(), tc);
        }
    }
    Ok(out)
}

/// `p(x + x0)`: its coefficient of `x^a` is `D^a p(x0)`.
pub fn taylor_shift(p: &MultiPoly, x0: &[FieldValue]) -> Result<MultiPoly, PolyError> {
    compose_affine(p, &Matrix::identity(p.field(), p.nvars()), x0)
}

/// A full-rank `n × n` matrix whose columns are the directions `ω_1, …, ω_n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Basis {
    matrix: Matrix,
    inverse: Matrix,
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Basis({:?})", self.matrix)
    }
}

impl Basis {
    pub fn new(matrix: Matrix) -> Result<Self, PolyError> {
        if matrix.rows() != matrix.cols() {
            return Err(PolyError::RankDeficient);
        }
        let inverse = matrix.inverse().map_err(|_| PolyError::RankDeficient)?;
        Ok(Basis { matrix, inverse })
    }

    pub fn from_columns(field: Field, columns: &[Vector]) -> Result<Self, PolyError> {
        let n = columns.len();
        Self::new(Matrix::from_columns(field, n, columns)?)
    }

    pub fn standard(field: Field, n: usize) -> Self {
        let m = Matrix::identity(field, n);
        Basis {
            matrix: m.clone(),
            inverse: m,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn field(&self) -> Field {
        self.matrix.field()
    }
}

/// `(ω·∇)^a p = D^a(p∘L)(L⁻¹x)`.
pub fn directional_hasse(p: &MultiPoly, basis: &Basis, a: &[u32]) -> Result<MultiPoly, PolyError> {
    check_nvars(p, basis.dim())?;
    check_nvars(p, a.len())?;
    let zero = vec![p.field().zero(); p.nvars()];
    let pl = compose_affine(p, basis.matrix(), &zero)?;
    let d = hasse_derivative(&pl, a)?;
    compose_affine(&d, basis.inverse(), &zero)
}

/// The differential operator `Σ_b w_b D^b` equal to
/// `(ω_1·∇)^{a_1} ⋯ (ω_k·∇)^{a_k}` for directions `ω_l` in `F^n`.
///
/// Depends only on the listed directions, so it also gives transverse
/// derivatives without choosing a completion.
pub fn directional_operator(
    field: Field,
    n: usize,
    directions: &[Vector],
    orders: &[u32],
) -> BTreeMap<Monomial, FieldValue> {
    assert_eq!(directions.len(), orders.len());
    let per_dir: Vec<Vec<Vec<u32>>> = orders.iter().map(|&o| multiindices(n, o)).collect();
    let mut out: BTreeMap<Monomial, FieldValue> = BTreeMap::new();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        field: Field,
        l: usize,
        directions: &[Vector],
        per_dir: &[Vec<Vec<u32>>],
        sum: &mut Vec<u32>,
        multinom: BigUint,
        weight: FieldValue,
        out: &mut BTreeMap<Monomial, FieldValue>,
    ) {
        if l == directions.len() {
            let w = &weight * &field.from_biguint(&multinom);
            if !w.is_zero() {
                let key = Monomial::new(sum);
                let e = out.entry(key).or_insert_with(|| field.zero());
                *e += &w;
            }
            return;
        }
        'alpha: for alpha in &per_dir[l] {
            let mut w = weight.clone();
            let mut mn = multinom.clone();
            for (j, &e) in alpha.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = &directions[l][j];
                if base.is_zero() {
                    continue 'alpha;
                }
                w *= &base.pow(e as u64);
                mn *= binomial(sum[j] + e, e);
            }
            for (s, &e) in sum.iter_mut().zip(alpha) {
                *s += e;
            }
            rec(field, l + 1, directions, per_dir, sum, mn, w, out);
            for (s, &e) in sum.iter_mut().zip(alpha) {
                *s -= e;
            }
        }
    }

    rec(
        field,
        0,
        directions,
        &per_dir,
        &mut vec![0; n],
        BigUint::one(),
        field.one(),
        &mut out,
    );
    out.retain(|_, v| !v.is_zero());
    out
}

/// Applies `Σ_b w_b D^b` to `p`.
pub fn apply_operator(p: &MultiPoly, op: &BTreeMap<Monomial, FieldValue>) -> MultiPoly {
    let field = p.field();
    let mut out = MultiPoly::zero(field, p.nvars());
    for (m, c) in p.terms() {
        for (b, w) in op {
            let Some(rest) = m.checked_sub(b) else {
                continue;
            };
            let bin = multi_binomial_in(field, m.exponents(), b.exponents());
            if bin.is_zero() {
                continue;
            }
            out.add_term(rest, &(&(c * w) * &bin));
        }
    }
    out
}

/// Directional derivative through the expansion in standard Hasse derivatives.
pub fn directional_hasse_expansion(p: &MultiPoly, basis: &Basis, a: &[u32]) -> Result<MultiPoly, PolyError> {
    check_nvars(p, basis.dim())?;
    check_nvars(p, a.len())?;
    let op = directional_operator(p.field(), p.nvars(), &basis.matrix().columns(), a);
    Ok(apply_operator(p, &op))
}

/// Computes both routes and fails loudly if they disagree.
pub fn directional_hasse_verified(p: &MultiPoly, basis: &Basis, a: &[u32]) -> Result<MultiPoly, PolyError> {
    let by_change_of_basis = directional_hasse(p, basis, a)?;
    let by_expansion = directional_hasse_expansion(p, basis, a)?;
    assert_eq!(
        by_change_of_basis, by_expansion,
        "directional derivative routes disagree for index {a:?}"
    );
    Ok(by_change_of_basis)
}

fn check_plane(p: &MultiPoly, x0: &[FieldValue], omega: &Matrix) -> Result<(), PolyError> {
    check_nvars(p, x0.len())?;
    check_nvars(p, omega.rows())?;
    check_field(p, omega.field())?;
    if omega.rank() != omega.cols() {
        return Err(PolyError::RankDeficient);
    }
    Ok(())
}

/// `p(x0 + Ω t)` as a polynomial in `t ∈ F^k`.
pub fn restrict_to_plane(p: &MultiPoly, x0: &[FieldValue], omega: &Matrix) -> Result<MultiPoly, PolyError> {
    check_plane(p, x0, omega)?;
    compose_affine(p, omega, x0)
}

/// `(ν_1·∇)^{λ_1} ⋯ (ν_r·∇)^{λ_r} p` for linearly independent `ν` (the
/// columns of `nu`), as a polynomial in the original `n` variables.
pub fn transverse_derivative(p: &MultiPoly, nu: &Matrix, lambda: &[u32]) -> Result<MultiPoly, PolyError> {
    check_nvars(p, nu.rows())?;
    check_field(p, nu.field())?;
    if lambda.len() != nu.cols() {
        return Err(PolyError::VariableCount {
            expected: nu.cols(),
            found: lambda.len(),
        });
    }
    if nu.rank() != nu.cols() {
        return Err(PolyError::RankDeficient);
    }
    let op = directional_operator(p.field(), p.nvars(), &nu.columns(), lambda);
    Ok(apply_operator(p, &op))
}

/// Precomputed data for derivatives transverse to the plane `x0 + span Ω`.
struct TransverseFrame {
    composed: MultiPoly,
    shift: Vector,
    embed: Matrix,
    k: usize,
}

impl TransverseFrame {
    fn new(p: &MultiPoly, x0: &[FieldValue], omega: &Matrix, nu: &Matrix) -> Result<Self, PolyError> {
        check_plane(p, x0, omega)?;
        let n = p.nvars();
        let k = omega.cols();
        if nu.rows() != n || nu.cols() + k != n {
            return Err(PolyError::NotTransverse);
        }
        let l = omega.hstack(nu)?;
        let basis = Basis::new(l).map_err(|_| PolyError::NotTransverse)?;
        let zero = vec![p.field().zero(); n];
        let composed = compose_affine(p, basis.matrix(), &zero)?;
        let shift = basis.inverse().mul_vec(x0)?;
        let mut embed = Matrix::zeros(p.field(), n, k);
        for i in 0..k {
            embed.set(i, i, p.field().one());
        }
        Ok(TransverseFrame {
            composed,
            shift,
            embed,
            k,
        })
    }

    fn restricted(&self, lambda: &[u32]) -> Result<MultiPoly, PolyError> {
        let mut a = vec![0; self.k];
        a.extend_from_slice(lambda);
        let d = hasse_derivative(&self.composed, &a)?;
        compose_affine(&d, &self.embed, &self.shift)
    }
}

/// `((ν·∇)^λ p)(x0 + Ω t) ∈ F[t_1, …, t_k]`, where `[Ω | ν]` must be a basis.
pub fn restricted_transverse_derivative(
    p: &MultiPoly,
    x0: &[FieldValue],
    omega: &Matrix,
    nu: &Matrix,
    lambda: &[u32],
) -> Result<MultiPoly, PolyError> {
    let frame = TransverseFrame::new(p, x0, omega, nu)?;
    if lambda.len() != nu.cols() {
        return Err(PolyError::VariableCount {
            expected: nu.cols(),
            found: lambda.len(),
        });
    }
    frame.restricted(lambda)
}

/// Order of vanishing; `Infinite` only for the zero polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Multiplicity {
    Finite(u32),
    Infinite,
}

impl Multiplicity {
    pub fn finite(self) -> Option<u32> {
        match self {
            Multiplicity::Finite(m) => Some(m),
            Multiplicity::Infinite => None,
        }
    }

    /// `true` iff `self ≥ m`.
    pub fn at_least(self, m: u32) -> bool {
        self >= Multiplicity::Finite(m)
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(m) => write!(f, "{m}"),
            Multiplicity::Infinite => write!(f, "inf"),
        }
    }
}

/// Least `|a|` with `D^a p(x0) ≠ 0`.
pub fn multiplicity(p: &MultiPoly, x0: &[FieldValue]) -> Result<Multiplicity, PolyError> {
    let shifted = taylor_shift(p, x0)?;
    Ok(shifted
        .min_total_degree()
        .map_or(Multiplicity::Infinite, Multiplicity::Finite))
}

/// Least `|a|` with `(ω·∇)^a p(x0) ≠ 0`, read off the Taylor coefficients of
/// `p(x0 + L s)`, together with every index attaining it (ascending lex).
pub fn directional_multiplicity(
    p: &MultiPoly,
    basis: &Basis,
    x0: &[FieldValue],
) -> Result<(Multiplicity, Vec<Vec<u32>>), PolyError> {
    check_nvars(p, basis.dim())?;
    let shifted = compose_affine(p, basis.matrix(), x0)?;
    let Some(m) = shifted.min_total_degree() else {
        return Ok((Multiplicity::Infinite, Vec::new()));
    };
    let mut idx: Vec<Vec<u32>> = shifted
        .terms()
        .filter(|(mon, _)| mon.total_degree() == m)
        .map(|(mon, _)| mon.exponents().to_vec())
        .collect();
    idx.sort();
    Ok((Multiplicity::Finite(m), idx))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalDerivative {
    /// `λ ∈ N^{n−k}`.
    pub index: Vec<u32>,
    pub order: u32,
    /// The nonzero restriction `((ν·∇)^λ p)(x0 + Ω t)`.
    pub restriction: MultiPoly,
}

/// Lowest-order transverse derivative whose restriction to the plane is a
/// nonzero polynomial. Orders are tried from 0 upward, lexicographically
/// within each order.
pub fn minimal_transverse_derivative(
    p: &MultiPoly,
    x0: &[FieldValue],
    omega: &Matrix,
    nu: &Matrix,
) -> Result<MinimalDerivative, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let frame = TransverseFrame::new(p, x0, omega, nu)?;
    let deg = p.degree().or_zero();
    for order in 0..=deg {
        for lambda in multiindices(nu.cols(), order) {
            let r = frame.restricted(&lambda)?;
            if !r.is_zero() {
                return Ok(MinimalDerivative {
                    index: lambda,
                    order,
                    restriction: r,
                });
            }
        }
    }
    unreachable!("a nonzero polynomial has a transverse derivative of order ≤ deg p that survives restriction")
}
