//! Randomized checks of the Hasse-derivative calculus against oracles that
//! are written independently of the library routes. Shared by the property
//! tests and the acceptance suite.

#![allow(dead_code)]

use joints_core::field::{Field, FieldValue};
use joints_core::linalg::{Matrix, Vector};
use joints_core::mpoly::{
    binomial, compose_affine, directional_hasse, directional_hasse_expansion, hasse_derivative,
    minimal_transverse_derivative, multiindices, multiplicity, restrict_to_plane, restricted_transverse_derivative,
    taylor_shift, Basis, Monomial, MultiPoly, Multiplicity,
};
use num_bigint::BigUint;
use rand::Rng;

pub const IDENTITIES: [&str; 11] = [
    "first derivative of a monomial",
    "composition of Hasse derivatives",
    "translation invariance",
    "derivative of a restriction (single direction, as printed)",
    "derivative of a restriction (multinomial-weighted)",
    "directional derivative routes agree",
    "derivative of a restricted transverse derivative",
    "multiplicity is basis invariant",
    "restricted transverse derivative multiplicity bound",
    "minimal transverse derivative multiplicity bound",
    "minimal transverse order is canonical",
];

pub type Outcome = Result<(), String>;

fn scalar(field: Field, rng: &mut impl Rng) -> FieldValue {
    match field.size() {
        Some(q) => field.from_u64(rng.random_range(0..q)),
        None => field.from_i64(rng.random_range(-3..=3)),
    }
}

fn nonzero_scalar(field: Field, rng: &mut impl Rng) -> FieldValue {
    loop {
        let c = scalar(field, rng);
        if !c.is_zero() {
            return c;
        }
    }
}

fn vector(field: Field, n: usize, rng: &mut impl Rng) -> Vector {
    (0..n).map(|_| scalar(field, rng)).collect()
}

fn independent(field: Field, n: usize, count: usize, start: &[Vector], rng: &mut impl Rng) -> Vec<Vector> {
    loop {
        let mut cols = start.to_vec();
        cols.extend((0..count).map(|_| vector(field, n, rng)));
        if Matrix::from_columns(field, n, &cols).unwrap().rank() == cols.len() {
            return cols[start.len()..].to_vec();
        }
    }
}

fn sparse_poly(field: Field, n: usize, max_deg: u32, rng: &mut impl Rng) -> MultiPoly {
    let terms = rng.random_range(1..=6);
    let mut p = MultiPoly::zero(field, n);
    for _ in 0..terms {
        let deg = rng.random_range(0..=max_deg);
        let mut exps = vec![0u32; n];
        for _ in 0..deg {
            exps[rng.random_range(0..n)] += 1;
        }
        p = &p + &MultiPoly::monomial(field, Monomial::new(&exps), nonzero_scalar(field, rng));
    }
    p
}

/// `w · (x − x0)` as a polynomial.
fn linear_form(field: Field, w: &[FieldValue], x0: &[FieldValue]) -> MultiPoly {
    let c = w.iter().zip(x0).fold(field.zero(), |acc, (a, b)| &acc - &(a * b));
    MultiPoly::affine_form(field, &c, w)
}

/// A nonzero polynomial of degree ≤ 6 vanishing at `x0` to a random order,
/// times a random power of `normal · (x − x0)` when a normal is given.
fn test_poly(
    field: Field,
    n: usize,
    x0: &[FieldValue],
    normal: Option<&[FieldValue]>,
    rng: &mut impl Rng,
) -> MultiPoly {
    loop {
        let mut budget = 6u32;
        let mut p = MultiPoly::one(field, n);
        if let Some(w) = normal {
            let e = rng.random_range(0..=2);
            p = &p * &linear_form(field, w, x0).pow(e);
            budget -= e;
        }
        let e = rng.random_range(0..=budget.min(3));
        for _ in 0..e {
            let w = vector(field, n, rng);
            p = &p * &linear_form(field, &w, x0);
        }
        budget -= e;
        p = &p * &sparse_poly(field, n, budget, rng);
        if !p.is_zero() {
            return p;
        }
    }
}

/// A functional vanishing on the columns of `omega`, if `k < n`.
fn normal_of(field: Field, omega: &[Vector], n: usize) -> Option<Vector> {
    if omega.len() >= n {
        return None;
    }
    let m = Matrix::from_rows(field, omega).unwrap();
    m.kernel().into_iter().next()
}

fn mat(field: Field, n: usize, cols: &[Vector]) -> Matrix {
    Matrix::from_columns(field, n, cols).unwrap()
}

/// `ω^α = Π_j ω_j^{α_j}`.
fn power_product(field: Field, w: &[FieldValue], alpha: &[u32]) -> FieldValue {
    w.iter()
        .zip(alpha)
        .fold(field.one(), |acc, (wi, &e)| &acc * &wi.pow(e as u64))
}

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, i| acc * i)
}

fn index(n: usize, max: u32, rng: &mut impl Rng) -> Vec<u32> {
    let order = rng.random_range(0..=max);
    let all = multiindices(n, order);
    all[rng.random_range(0..all.len())].clone()
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn monomial_rule(field: Field, n: usize, rng: &mut impl Rng) -> Outcome {
    let exps: Vec<u32> = (0..n).map(|_| rng.random_range(0..=6)).collect();
    let i = rng.random_range(0..n);
    let p = MultiPoly::monomial(field, Monomial::new(&exps), field.one());
    let mut e = vec![0; n];
    e[i] = 1;
    let d = hasse_derivative(&p, &e).unwrap();
    let expected = if exps[i] == 0 {
        MultiPoly::zero(field, n)
    } else {
        let mut lower = exps.clone();
        lower[i] -= 1;
        MultiPoly::monomial(field, Monomial::new(&lower), field.from_u64(exps[i] as u64))
    };
    check(d == expected, || format!("D^e{i} of x^{exps:?}: {d:?}"))
}

fn composition(field: Field, p: &MultiPoly, rng: &mut impl Rng) -> Outcome {
    let n = p.nvars();
    let i = index(n, 3, rng);
    let j = index(n, 3, rng);
    let sum: Vec<u32> = i.iter().zip(&j).map(|(a, b)| a + b).collect();
    let c = i
        .iter()
        .zip(&j)
        .fold(BigUint::from(1u32), |acc, (&a, &b)| acc * binomial(a + b, b));
    let ij = hasse_derivative(&hasse_derivative(p, &j).unwrap(), &i).unwrap();
    let ji = hasse_derivative(&hasse_derivative(p, &i).unwrap(), &j).unwrap();
    let direct = hasse_derivative(p, &sum).unwrap().scale(&field.from_biguint(&c));
    check(ij == direct && ji == direct, || format!("i={i:?} j={j:?}"))
}

fn translation(field: Field, p: &MultiPoly, rng: &mut impl Rng) -> Outcome {
    let n = p.nvars();
    let y = vector(field, n, rng);
    let a = index(n, 4, rng);
    let lhs = hasse_derivative(&taylor_shift(p, &y).unwrap(), &a).unwrap();
    let rhs = taylor_shift(&hasse_derivative(p, &a).unwrap(), &y).unwrap();
    check(lhs == rhs, || format!("a={a:?}"))
}

/// `Σ_{α_1,…,α_k} w(α) · D^{Σα} p(x0 + Ω t) · Π ω_i^{α_i}`, with weight
/// `Π_j a_j! / Π_{i,j} α_{ij}!` or 1.
fn restriction_expansion(
    field: Field,
    p: &MultiPoly,
    x0: &[FieldValue],
    omega: &[Vector],
    m: &[u32],
    weighted: bool,
) -> MultiPoly {
    let n = p.nvars();
    let k = omega.len();
    let om = mat(field, n, omega);
    let choices: Vec<Vec<Vec<u32>>> = m.iter().map(|&mi| multiindices(n, mi)).collect();
    let mut total = MultiPoly::zero(field, k);
    let mut pick = vec![0usize; k];
    loop {
        let alphas: Vec<&Vec<u32>> = (0..k).map(|i| &choices[i][pick[i]]).collect();
        let a: Vec<u32> = (0..n).map(|j| alphas.iter().map(|al| al[j]).sum()).collect();
        let mut coeff = field.one();
        for (i, al) in alphas.iter().enumerate() {
            coeff = &coeff * &power_product(field, &omega[i], al);
        }
        if weighted {
            let num = a.iter().fold(BigUint::from(1u32), |acc, &x| acc * factorial(x));
            let den = alphas
                .iter()
                .flat_map(|al| al.iter())
                .fold(BigUint::from(1u32), |acc, &x| acc * factorial(x));
            coeff = &coeff * &field.from_biguint(&(num / den));
        }
        if !coeff.is_zero() {
            let d = restrict_to_plane(&hasse_derivative(p, &a).unwrap(), x0, &om).unwrap();
            total = &total + &d.scale(&coeff);
        }
        let mut i = 0;
        loop {
            if i == k {
                return total;
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

fn restriction_rule(field: Field, p: &MultiPoly, k: usize, weighted: bool, rng: &mut impl Rng) -> Outcome {
    let n = p.nvars();
    let x0 = vector(field, n, rng);
    let omega = independent(field, n, k, &[], rng);
    let m: Vec<u32> = (0..k).map(|_| rng.random_range(0..=2)).collect();
    let lhs = hasse_derivative(&restrict_to_plane(p, &x0, &mat(field, n, &omega)).unwrap(), &m).unwrap();
    let rhs = restriction_expansion(field, p, &x0, &omega, &m, weighted);
    check(lhs == rhs, || format!("k={k} m={m:?}: {lhs:?} vs {rhs:?}"))
}

fn routes(field: Field, p: &MultiPoly, rng: &mut impl Rng) -> Outcome {
    let n = p.nvars();
    let basis = Basis::from_columns(field, &independent(field, n, n, &[], rng)).unwrap();
    let a = index(n, 3, rng);
    let one = directional_hasse(p, &basis, &a).unwrap();
    let two = directional_hasse_expansion(p, &basis, &a).unwrap();
    check(one == two, || format!("a={a:?}"))
}

struct Frame {
    k: usize,
    x0: Vector,
    omega: Vec<Vector>,
    nu: Vec<Vector>,
    p: MultiPoly,
}

fn frame(field: Field, n: usize, rng: &mut impl Rng) -> Frame {
    let k = rng.random_range(1..n);
    let x0 = vector(field, n, rng);
    let omega = independent(field, n, k, &[], rng);
    let nu = independent(field, n, n - k, &omega, rng);
    let normal = normal_of(field, &omega, n);
    let p = test_poly(field, n, &x0, normal.as_deref(), rng);
    Frame { k, x0, omega, nu, p }
}

fn restricted_derivative_rule(field: Field, f: &Frame, rng: &mut impl Rng) -> Outcome {
    let n = f.p.nvars();
    let a = index(n, 3, rng);
    let om = mat(field, n, &f.omega);
    let mut all = f.omega.clone();
    all.extend(f.nu.iter().cloned());
    let basis = Basis::from_columns(field, &all).unwrap();
    let inner = restricted_transverse_derivative(&f.p, &f.x0, &om, &mat(field, n, &f.nu), &a[f.k..]).unwrap();
    let lhs = hasse_derivative(&inner, &a[..f.k]).unwrap();
    let rhs = restrict_to_plane(&directional_hasse(&f.p, &basis, &a).unwrap(), &f.x0, &om).unwrap();
    check(lhs == rhs, || format!("a={a:?}"))
}

/// Least `|a|` with `(ω·∇)^a p(x) ≠ 0`, and every index attaining it, read
/// off `p(x + L y) = Σ_a (ω·∇)^a p(x) y^a`.
fn directional_order(p: &MultiPoly, basis: &Basis, x: &[FieldValue]) -> Option<(u32, Vec<Vec<u32>>)> {
    let q = compose_affine(p, basis.matrix(), x).unwrap();
    let order = q.min_total_degree()?;
    let hits = q
        .terms()
        .filter(|(m, _)| m.total_degree() == order)
        .map(|(m, _)| m.exponents().to_vec())
        .collect();
    Some((order, hits))
}

fn multiplicity_invariance(field: Field, rng: &mut impl Rng, n: usize) -> Outcome {
    let x0 = vector(field, n, rng);
    let p = test_poly(field, n, &x0, None, rng);
    let basis = Basis::from_columns(field, &independent(field, n, n, &[], rng)).unwrap();
    let m = multiplicity(&p, &x0).unwrap();
    let (order, _) = directional_order(&p, &basis, &x0).expect("p is nonzero");
    check(m == Multiplicity::Finite(order), || {
        format!("mult {m} vs directional {order}")
    })
}

fn point_on_plane(field: Field, f: &Frame, rng: &mut impl Rng) -> (Vector, Vector) {
    let t = vector(field, f.k, rng);
    let y: Vector = (0..f.x0.len())
        .map(|j| {
            f.omega
                .iter()
                .zip(&t)
                .fold(f.x0[j].clone(), |acc, (w, ti)| &acc + &(&w[j] * ti))
        })
        .collect();
    (t, y)
}

fn restriction_multiplicity(field: Field, f: &Frame, rng: &mut impl Rng) -> Outcome {
    let n = f.p.nvars();
    let (t, y) = if rng.random_bool(0.5) {
        (vec![field.zero(); f.k], f.x0.clone())
    } else {
        point_on_plane(field, f, rng)
    };
    let lambda = index(n - f.k, 2, rng);
    let r = restricted_transverse_derivative(&f.p, &f.x0, &mat(field, n, &f.omega), &mat(field, n, &f.nu), &lambda)
        .unwrap();
    let lhs = multiplicity(&r, &t).unwrap();
    let my = multiplicity(&f.p, &y).unwrap().finite().expect("p is nonzero");
    let bound = my.saturating_sub(lambda.iter().sum());
    check(lhs.at_least(bound), || format!("λ={lambda:?}: {lhs} < {bound}"))
}

fn minimal_bound(field: Field, f: &Frame, rng: &mut impl Rng) -> Outcome {
    let n = f.p.nvars();
    let (t, y) = if rng.random_bool(0.5) {
        (vec![field.zero(); f.k], f.x0.clone())
    } else {
        point_on_plane(field, f, rng)
    };
    let om = mat(field, n, &f.omega);
    let md = minimal_transverse_derivative(&f.p, &f.x0, &om, &mat(field, n, &f.nu)).unwrap();
    let mut all = f.omega.clone();
    all.extend(f.nu.iter().cloned());
    let basis = Basis::from_columns(field, &all).unwrap();
    let (_, minimal) = directional_order(&f.p, &basis, &y).expect("p is nonzero");
    let m = multiplicity(&md.restriction, &t).unwrap();
    for a in minimal {
        let need: u32 = a[..f.k].iter().sum();
        if !m.at_least(need) {
            return Err(format!("a={a:?}: mult {m} < {need}"));
        }
    }
    Ok(())
}

fn minimal_order_canonical(field: Field, f: &Frame, rng: &mut impl Rng) -> Outcome {
    let n = f.p.nvars();
    let om = mat(field, n, &f.omega);
    let other = independent(field, n, n - f.k, &f.omega, rng);
    let a = minimal_transverse_derivative(&f.p, &f.x0, &om, &mat(field, n, &f.nu)).unwrap();
    let b = minimal_transverse_derivative(&f.p, &f.x0, &om, &mat(field, n, &other)).unwrap();
    let brute = (0..=f.p.degree().or_zero())
        .find(|&o| {
            multiindices(n - f.k, o).iter().any(|l| {
                !restricted_transverse_derivative(&f.p, &f.x0, &om, &mat(field, n, &other), l)
                    .unwrap()
                    .is_zero()
            })
        })
        .expect("some order survives");
    check(a.order == b.order && b.order == brute, || {
        format!("orders {} / {} / {brute}", a.order, b.order)
    })
}

/// Runs every identity once on fresh random data in dimension `n`.
pub fn run_case(field: Field, n: usize, rng: &mut impl Rng) -> Vec<(&'static str, Outcome)> {
    assert!((2..=4).contains(&n));
    let x0 = vector(field, n, rng);
    let p = test_poly(field, n, &x0, None, rng);
    let k = rng.random_range(1..=n);
    let f = frame(field, n, rng);
    vec![
        (IDENTITIES[0], monomial_rule(field, n, rng)),
        (IDENTITIES[1], composition(field, &p, rng)),
        (IDENTITIES[2], translation(field, &p, rng)),
        (IDENTITIES[3], restriction_rule(field, &p, 1, false, rng)),
        (IDENTITIES[4], restriction_rule(field, &p, k, true, rng)),
        (IDENTITIES[5], routes(field, &p, rng)),
        (IDENTITIES[6], restricted_derivative_rule(field, &f, rng)),
        (IDENTITIES[7], multiplicity_invariance(field, rng, n)),
        (IDENTITIES[8], restriction_multiplicity(field, &f, rng)),
        (IDENTITIES[9], minimal_bound(field, &f, rng)),
        (IDENTITIES[10], minimal_order_canonical(field, &f, rng)),
    ]
}

/// The printed expansion of a restricted derivative without multinomial
/// weights, on the smallest input where the weights matter. Returns
/// `(weighted, unweighted, true value)`.
pub fn unweighted_expansion_counterexample() -> (MultiPoly, MultiPoly, MultiPoly) {
    let q = Field::rational();
    let p = MultiPoly::var(q, 2, 0).pow(2);
    let omega = vec![vec![q.one(), q.zero()], vec![q.one(), q.one()]];
    let x0 = vec![q.zero(), q.zero()];
    let truth = hasse_derivative(&restrict_to_plane(&p, &x0, &mat(q, 2, &omega)).unwrap(), &[1, 1]).unwrap();
    (
        restriction_expansion(q, &p, &x0, &omega, &[1, 1], true),
        restriction_expansion(q, &p, &x0, &omega, &[1, 1], false),
        truth,
    )
}
