//! Low-degree polynomials with prescribed vanishing, found by parameter
//! counting, together with the checks that go with them: exceptional planes,
//! minimal derivatives along lines and root counting on lines.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affine::{complete_transverse, AffineError, AffineSubspace, Line, Point, SubspaceRepr};
use crate::field::{Field, FieldError, FieldValue};
use crate::incidence::{LineFamily, MultijointRecord};
use crate::limits::{CapExceeded, Limits};
use crate::linalg::{rank_of, LinalgError, Matrix, Vector};
use crate::mpoly::{
    binomial, compose_affine, directional_operator, minimal_transverse_derivative, multiindices_up_to, multiplicity,
    restrict_to_plane, restricted_transverse_derivative, transverse_derivative, Basis, MinimalDerivative, Monomial,
    MultiPoly, Multiplicity, PolyError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VanishingError {
    #[error("plane conditions sample a grid of {needed} values per parameter but the field has only {size} elements (needs |F| > D)")]
    FieldTooSmall { size: u64, needed: u64 },
    #[error("degree budget exhausted: no nonzero polynomial of degree ≤ {0}")]
    BudgetExhausted(u32),
    #[error("constraint {0}: subplane is not contained in its plane")]
    NotContained(usize),
    #[error("constraint {0}: directions are not transverse to the plane")]
    NotTransverse(usize),
    #[error("constraint {index}: {detail}")]
    BadConstraint { index: usize, detail: String },
    #[error("marked point {0} is not on the line")]
    OffLine(usize),
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Affine(#[from] AffineError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Cap(#[from] CapExceeded),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    /// Every Hasse derivative of order `< order` vanishes at `point`.
    PointOrder { point: Point, order: u32 },
    /// `((ν·∇)^λ p)|_sub ≡ 0` for all `|λ| ≤ max_order`, where `sub` is a
    /// hyperplane of `plane` and `nu` is transverse to `plane`.
    PlaneTransverse {
        sub: AffineSubspace,
        plane: AffineSubspace,
        nu: Vec<Vector>,
        max_order: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanishingSpec {
    field: Field,
    n: usize,
    constraints: Vec<Constraint>,
}

impl VanishingSpec {
    pub fn new(field: Field, n: usize, constraints: Vec<Constraint>) -> Result<Self, VanishingError> {
        for (i, c) in constraints.iter().enumerate() {
            let bad = |detail: &str| VanishingError::BadConstraint {
                index: i,
                detail: detail.into(),
            };
            match c {
                Constraint::PointOrder { point, .. } => {
                    if point.len() != n {
                        return Err(bad("point has the wrong dimension"));
                    }
                    if point.iter().any(|v| v.field() != field) {
                        return Err(bad("point is over another field"));
                    }
                }
                Constraint::PlaneTransverse { sub, plane, nu, .. } => {
                    if plane.ambient_dim() != n || sub.ambient_dim() != n {
                        return Err(bad("plane has the wrong ambient dimension"));
                    }
                    if plane.field() != field || sub.field() != field {
                        return Err(bad("plane is over another field"));
                    }
                    if sub.dim() + 1 != plane.dim() || !plane.contains_subspace(sub)? {
                        return Err(VanishingError::NotContained(i));
                    }
                    let mut all = plane.directions().to_vec();
                    all.extend(nu.iter().cloned());
                    if nu.len() + plane.dim() != n || nu.iter().any(|v| v.len() != n) || rank_of(field, n, &all) != n {
                        return Err(VanishingError::NotTransverse(i));
                    }
                }
            }
        }
        Ok(VanishingSpec { field, n, constraints })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    fn has_plane_constraints(&self) -> bool {
        self.constraints
            .iter()
            .any(|c| matches!(c, Constraint::PlaneTransverse { .. }))
    }
}

/// Linear conditions on the coefficients of a polynomial of degree `≤ D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionMatrix {
    pub degree: u32,
    /// Column monomials in ascending graded-lex order.
    pub monomials: Vec<Monomial>,
    pub matrix: Matrix,
}

fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    let mut m: Vec<Monomial> = multiindices_up_to(n, d).iter().map(|a| Monomial::new(a)).collect();
    m.sort();
    m
}

/// `x^e` for every exponent up to `d`, per coordinate.
fn power_table(field: Field, x: &[FieldValue], d: u32) -> Vec<Vec<FieldValue>> {
    x.iter()
        .map(|xi| {
            let mut pw = vec![field.one()];
            for e in 0..d as usize {
                let next = &pw[e] * xi;
                pw.push(next);
            }
            pw
        })
        .collect()
}

/// Row of the functional `p ↦ (Σ_b w_b D^b p)(x)` on the given columns.
fn evaluation_row(
    field: Field,
    columns: &[Monomial],
    op: &[(Monomial, FieldValue)],
    powers: &[Vec<FieldValue>],
) -> Vector {
    columns
        .iter()
        .map(|c| {
            let mut acc = field.zero();
            for (b, w) in op {
                let Some(rest) = c.checked_sub(b) else {
                    continue;
                };
                let mut coeff = field.one();
                for (&ci, &bi) in c.exponents().iter().zip(b.exponents()) {
                    if bi > 0 {
                        coeff *= &field.from_biguint(&binomial(ci, bi));
                    }
                }
                if coeff.is_zero() {
                    continue;
                }
                let mut term = &coeff * w;
                for (i, &e) in rest.exponents().iter().enumerate() {
                    if e > 0 {
                        term *= &powers[i][e as usize];
                    }
                }
                acc += &term;
            }
            acc
        })
        .collect()
}

/// Every vector of `(0..=d)^k` as field elements, last coordinate fastest.
fn parameter_grid(field: Field, k: usize, d: u32) -> Vec<Vector> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * (d as usize + 1));
        for prefix in &out {
            for v in 0..=d {
                let mut p = prefix.clone();
                p.push(field.from_u64(v as u64));
                next.push(p);
            }
        }
        out = next;
    }
    out
}

pub fn build_conditions(spec: &VanishingSpec, degree: u32) -> Result<ConditionMatrix, VanishingError> {
    let field = spec.field;
    let n = spec.n;
    if spec.has_plane_constraints() {
        if let Some(size) = field.size() {
            if size <= degree as u64 {
                return Err(VanishingError::FieldTooSmall {
                    size,
                    needed: degree as u64 + 1,
                });
            }
        }
    }
    let columns = monomials_up_to(n, degree);
    let mut rows: Vec<Vector> = Vec::new();
    for c in &spec.constraints {
        match c {
            Constraint::PointOrder { point, order } => {
                if *order == 0 {
                    continue;
                }
                let powers = power_table(field, point, degree);
                for a in multiindices_up_to(n, order - 1) {
                    let op = [(Monomial::new(&a), field.one())];
                    rows.push(evaluation_row(field, &columns, &op, &powers));
                }
            }
            Constraint::PlaneTransverse { sub, nu, max_order, .. } => {
                let grid = parameter_grid(field, sub.dim(), degree);
                for lambda in multiindices_up_to(nu.len(), *max_order) {
                    let op: Vec<(Monomial, FieldValue)> =
                        directional_operator(field, n, nu, &lambda).into_iter().collect();
                    for t in &grid {
                        let y = sub.point_at(t)?;
                        let powers = power_table(field, &y, degree);
                        rows.push(evaluation_row(field, &columns, &op, &powers));
                    }
                }
            }
        }
    }
    let matrix = if rows.is_empty() {
        Matrix::zeros(field, 0, columns.len())
    } else {
        Matrix::from_rows(field, &rows)?
    };
    Ok(ConditionMatrix {
        degree,
        monomials: columns,
        matrix,
    })
}

/// Smallest `D ≤ d_max` admitting a nonzero polynomial that satisfies the
/// spec, and the first kernel vector at that degree, scaled so its leading
/// graded-lex coefficient is 1.
pub fn min_degree_annihilator(
    spec: &VanishingSpec,
    d_max: u32,
    limits: &Limits,
) -> Result<(u32, MultiPoly), VanishingError> {
    limits.check_degree(d_max)?;
    for d in 0..=d_max {
        let cm = build_conditions(spec, d)?;
        let kernel = cm.matrix.kernel();
        let Some(v) = kernel.into_iter().next() else {
            continue;
        };
        let terms = cm.monomials.into_iter().zip(v);
        let p = MultiPoly::from_terms(spec.field, spec.n, terms)?;
        return Ok((d, p.monic()));
    }
    Err(VanishingError::BudgetExhausted(d_max))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VanishingViolation {
    pub constraint: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VanishingReport {
    pub checked: usize,
    pub violations: Vec<VanishingViolation>,
}

impl VanishingReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every constraint directly: multiplicities for point conditions,
/// coefficientwise zero tests for plane conditions.
pub fn verify_vanishing(p: &MultiPoly, spec: &VanishingSpec) -> Result<VanishingReport, VanishingError> {
    if p.is_zero() {
        return Err(VanishingError::ZeroPolynomial);
    }
    let mut violations = Vec::new();
    for (i, c) in spec.constraints.iter().enumerate() {
        match c {
            Constraint::PointOrder { point, order } => {
                let m = multiplicity(p, point)?;
                if !m.at_least(*order) {
                    violations.push(VanishingViolation {
                        constraint: i,
                        detail: format!("multiplicity {m} < {order}"),
                    });
                }
            }
            Constraint::PlaneTransverse { sub, nu, max_order, .. } => {
                let nu_m = Matrix::from_columns(spec.field, spec.n, nu)?;
                let omega = sub.direction_matrix();
                for lambda in multiindices_up_to(nu.len(), *max_order) {
                    let d = transverse_derivative(p, &nu_m, &lambda)?;
                    if !restrict_to_plane(&d, sub.base(), &omega)?.is_zero() {
                        violations.push(VanishingViolation {
                            constraint: i,
                            detail: format!("transverse derivative {lambda:?} does not vanish"),
                        });
                    }
                }
            }
        }
    }
    Ok(VanishingReport {
        checked: spec.constraints.len(),
        violations,
    })
}

fn columns_matrix(field: Field, n: usize, cols: &[Vector]) -> Result<Matrix, VanishingError> {
    Ok(Matrix::from_columns(field, n, cols)?)
}

/// Lowest-order derivative of `p`, transverse to `l`, that does not vanish
/// identically on `l`, restricted to `l` as a polynomial in its parameter.
pub fn minimal_line_derivative(p: &MultiPoly, l: &Line) -> Result<MinimalDerivative, VanishingError> {
    if p.is_zero() {
        return Err(VanishingError::ZeroPolynomial);
    }
    let field = p.field();
    let n = p.nvars();
    let nu = columns_matrix(field, n, &complete_transverse(l.space()))?;
    Ok(minimal_transverse_derivative(
        p,
        l.base(),
        &l.space().direction_matrix(),
        &nu,
    )?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkedRoot {
    pub parameter: String,
    pub claimed: u32,
    pub multiplicity: u32,
    pub claim_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootAccounting {
    pub derivative_order: u32,
    pub restricted_degree: u32,
    pub poly_degree: u32,
    pub roots: Vec<MarkedRoot>,
    pub multiplicity_sum: u64,
    /// `Σ mult ≤ deg q ≤ deg p`.
    pub bezout_holds: bool,
    pub slack: i64,
}

impl RootAccounting {
    pub fn ok(&self) -> bool {
        self.bezout_holds && self.roots.iter().all(|r| r.claim_holds)
    }
}

pub fn line_root_accounting(
    p: &MultiPoly,
    l: &Line,
    marked: &[(Point, u32)],
) -> Result<RootAccounting, VanishingError> {
    let md = minimal_line_derivative(p, l)?;
    let q = &md.restriction;
    let mut seen = BTreeMap::new();
    for (i, (x, claimed)) in marked.iter().enumerate() {
        let t = l.parameter_of(x)?.ok_or(VanishingError::OffLine(i))?;
        let e = seen.entry(t).or_insert(0u32);
        *e = (*e).max(*claimed);
    }
    let mut roots = Vec::new();
    let mut sum = 0u64;
    for (t, claimed) in seen {
        let m = match multiplicity(q, std::slice::from_ref(&t))? {
            Multiplicity::Finite(m) => m,
            Multiplicity::Infinite => unreachable!("the restriction is nonzero"),
        };
        sum += m as u64;
        roots.push(MarkedRoot {
            parameter: t.to_string(),
            claimed,
            multiplicity: m,
            claim_holds: m >= claimed,
        });
    }
    let restricted_degree = q.degree().or_zero();
    let poly_degree = p.degree().or_zero();
    Ok(RootAccounting {
        derivative_order: md.order,
        restricted_degree,
        poly_degree,
        roots,
        multiplicity_sum: sum,
        bezout_holds: sum <= restricted_degree as u64 && restricted_degree <= poly_degree,
        slack: poly_degree as i64 - sum as i64,
    })
}

/// Whether some transverse derivative of order `≤ budget` survives on the
/// plane, decided through the minimal transverse derivative.
pub fn exceptional_plane_test(
    p: &MultiPoly,
    plane: &AffineSubspace,
    nu: &[Vector],
    budget: u32,
) -> Result<bool, VanishingError> {
    if p.is_zero() {
        return Err(VanishingError::ZeroPolynomial);
    }
    let nu_m = columns_matrix(p.field(), p.nvars(), nu)?;
    let md = minimal_transverse_derivative(p, plane.base(), &plane.direction_matrix(), &nu_m)?;
    Ok(md.order <= budget)
}

/// The same test by trying every `|λ| ≤ budget`.
pub fn exceptional_plane_test_direct(
    p: &MultiPoly,
    plane: &AffineSubspace,
    nu: &[Vector],
    budget: u32,
) -> Result<bool, VanishingError> {
    if p.is_zero() {
        return Err(VanishingError::ZeroPolynomial);
    }
    let nu_m = columns_matrix(p.field(), p.nvars(), nu)?;
    let omega = plane.direction_matrix();
    for lambda in multiindices_up_to(nu.len(), budget) {
        if !restricted_transverse_derivative(p, plane.base(), &omega, &nu_m, &lambda)?.is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum JointType {
    /// Transverse part of `a(x)` exceeds the budget; the line of family
    /// `family` carries a root of multiplicity at least `required`.
    Type1 {
        family: usize,
        line: usize,
        required: u32,
        multiplicity: u32,
    },
    /// The chosen plane is exceptional.
    Exceptional {
        plane: usize,
        transverse_order: u32,
    },
    Unclassified {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineBezout {
    pub family: usize,
    pub line: usize,
    pub multiplicity_sum: u64,
    pub restricted_degree: u32,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DichotomyReport {
    pub budget: u32,
    pub poly_degree: u32,
    pub index: Vec<Vec<u32>>,
    pub classes: Vec<JointType>,
    pub lines: Vec<LineBezout>,
    pub type1: usize,
    pub exceptional: usize,
    pub unclassified: usize,
}

/// First (plane, one line per family) tuple at `x` whose directions span.
fn first_tuple(
    rec: &MultijointRecord,
    planes: &[AffineSubspace],
    families: &[LineFamily],
) -> Option<(usize, Vec<usize>)> {
    fn rec_pick(
        j: usize,
        families: &[LineFamily],
        ids: &[Vec<usize>],
        span: &crate::linalg::SpanBasis,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if j == families.len() {
            return span.rank() == span.dim();
        }
        for &id in &ids[j] {
            let dir = families[j].get(id).expect("known id").direction();
            let mut next = span.clone();
            if next.insert(dir) {
                chosen.push(id);
                if rec_pick(j + 1, families, ids, &next, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    for &pi in &rec.planes {
        let plane = &planes[pi];
        let mut span = crate::linalg::SpanBasis::new(plane.field(), plane.ambient_dim());
        for d in plane.directions() {
            span.insert(d);
        }
        let mut chosen = Vec::new();
        if rec_pick(0, families, &rec.lines, &span, &mut chosen) {
            return Some((pi, chosen));
        }
    }
    None
}

/// Sorts every multijoint into type 1 or the exceptional class for the
/// polynomial `p` and transverse budget `budget`, checking the root bound
/// on lines and the exceptional-plane test along the way.
pub fn multijoint_dichotomy(
    p: &MultiPoly,
    planes: &[AffineSubspace],
    families: &[LineFamily],
    multijoints: &[MultijointRecord],
    budget: u32,
) -> Result<DichotomyReport, VanishingError> {
    if p.is_zero() {
        return Err(VanishingError::ZeroPolynomial);
    }
    let field = p.field();
    let n = p.nvars();
    let mut classes = Vec::with_capacity(multijoints.len());
    let mut indices = Vec::with_capacity(multijoints.len());
    let mut per_line: BTreeMap<(usize, usize), (u64, u32)> = BTreeMap::new();
    let mut line_derivs: BTreeMap<(usize, usize), MultiPoly> = BTreeMap::new();

    for rec in multijoints {
        let Some((pi, line_ids)) = first_tuple(rec, planes, families) else {
            classes.push(JointType::Unclassified {
                reason: "no spanning tuple".into(),
            });
            indices.push(Vec::new());
            continue;
        };
        let plane = &planes[pi];
        let k = plane.dim();
        let mut cols = plane.directions().to_vec();
        for (j, &id) in line_ids.iter().enumerate() {
            cols.push(families[j].get(id).expect("known id").direction().clone());
        }
        let basis = Basis::from_columns(field, &cols)?;
        let shifted = compose_affine(p, basis.matrix(), &rec.point)?;
        let order = shifted.min_total_degree().expect("p is nonzero");
        let a: Vec<u32> = shifted
            .terms()
            .filter(|(m, _)| m.total_degree() == order)
            .map(|(m, _)| m.exponents().to_vec())
            .min()
            .expect("some term has minimal degree");
        let transverse: u32 = a[k..].iter().sum();
        indices.push(a.clone());

        if transverse > budget {
            let (i, &required) = a[k..].iter().enumerate().rev().max_by_key(|(_, v)| **v).expect("n > k");
            let line = families[i].get(line_ids[i]).expect("known id");
            let key = (i, line.id);
            if let std::collections::btree_map::Entry::Vacant(e) = line_derivs.entry(key) {
                e.insert(minimal_line_derivative(p, line)?.restriction);
            }
            let q = &line_derivs[&key];
            let t = line.parameter_of(&rec.point)?.expect("multijoint lies on its line");
            let m = multiplicity(q, std::slice::from_ref(&t))?
                .finite()
                .expect("restriction is nonzero");
            let entry = per_line.entry(key).or_insert((0, q.degree().or_zero()));
            entry.0 += m as u64;
            if m >= required {
                classes.push(JointType::Type1 {
                    family: i,
                    line: line.id,
                    required,
                    multiplicity: m,
                });
            } else {
                classes.push(JointType::Unclassified {
                    reason: format!("root multiplicity {m} below {required} on line {}", line.id),
                });
            }
        } else {
            let nu = complete_transverse(plane);
            let nu_m = columns_matrix(field, n, &nu)?;
            let md = minimal_transverse_derivative(p, plane.base(), &plane.direction_matrix(), &nu_m)?;
            if md.order <= budget {
                classes.push(JointType::Exceptional {
                    plane: pi,
                    transverse_order: md.order,
                });
            } else {
                classes.push(JointType::Unclassified {
                    reason: format!("plane {pi} has minimal transverse order {} > {budget}", md.order),
                });
            }
        }
    }

    let poly_degree = p.degree().or_zero();
    let lines: Vec<LineBezout> = per_line
        .into_iter()
        .map(|((family, line), (sum, deg))| LineBezout {
            family,
            line,
            multiplicity_sum: sum,
            restricted_degree: deg,
            holds: sum <= deg as u64 && deg <= poly_degree,
        })
        .collect();
    let count = |f: fn(&JointType) -> bool| classes.iter().filter(|c| f(c)).count();
    let type1 = count(|c| matches!(c, JointType::Type1 { .. }));
    let exceptional = count(|c| matches!(c, JointType::Exceptional { .. }));
    let unclassified = count(|c| matches!(c, JointType::Unclassified { .. }));
    Ok(DichotomyReport {
        budget,
        poly_degree,
        index: indices,
        classes,
        lines,
        type1,
        exceptional,
        unclassified,
    })
}

/// Point conditions of order `order` at every multijoint, plus, for each
/// multijoint, plane conditions of order `budget` on up to `per_joint`
/// hyperplanes of its chosen plane through it (spanned by subsets of the
/// plane's canonical directions).
pub fn multijoint_spec(
    field: Field,
    planes: &[AffineSubspace],
    families: &[LineFamily],
    multijoints: &[MultijointRecord],
    order: u32,
    budget: u32,
    per_joint: usize,
) -> Result<VanishingSpec, VanishingError> {
    let n = planes.first().map_or(0, AffineSubspace::ambient_dim);
    let mut constraints = Vec::new();
    let mut seen_subs = std::collections::BTreeSet::new();
    for rec in multijoints {
        constraints.push(Constraint::PointOrder {
            point: rec.point.clone(),
            order,
        });
        if per_joint == 0 {
            continue;
        }
        let Some((pi, _)) = first_tuple(rec, planes, families) else {
            continue;
        };
        let plane = &planes[pi];
        let dirs = plane.directions();
        let nu = complete_transverse(plane);
        for skip in 0..dirs.len().min(per_joint) {
            let sub_dirs: Vec<Vector> = dirs
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, d)| d.clone())
                .collect();
            let sub = AffineSubspace::new(field, &rec.point, &sub_dirs)?;
            if !seen_subs.insert(sub.clone()) {
                continue;
            }
            constraints.push(Constraint::PlaneTransverse {
                sub,
                plane: plane.clone(),
                nu: nu.clone(),
                max_order: budget,
            });
        }
    }
    VanishingSpec::new(field, n, constraints)
}

/// JSON form of a vanishing spec.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecRepr {
    pub field: String,
    pub n: usize,
    pub constraints: Vec<ConstraintRepr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintRepr {
    PointOrder {
        point: Vec<String>,
        order: u32,
    },
    PlaneTransverse {
        sub: SubspaceRepr,
        plane: SubspaceRepr,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nu: Option<Vec<Vec<String>>>,
        max_order: u32,
    },
}

impl SpecRepr {
    pub fn to_spec(&self) -> Result<VanishingSpec, VanishingError> {
        let field: Field = self.field.parse().map_err(|e: FieldError| VanishingError::Field(e))?;
        let parse_vec = |v: &[String]| -> Result<Vector, VanishingError> {
            v.iter()
                .map(|s| field.parse_value(s).map_err(VanishingError::from))
                .collect()
        };
        let mut constraints = Vec::new();
        for c in &self.constraints {
            constraints.push(match c {
                ConstraintRepr::PointOrder { point, order } => Constraint::PointOrder {
                    point: parse_vec(point)?,
                    order: *order,
                },
                ConstraintRepr::PlaneTransverse {
                    sub,
                    plane,
                    nu,
                    max_order,
                } => {
                    let plane = AffineSubspace::from_repr(field, plane)?;
                    let nu = match nu {
                        Some(v) => v.iter().map(|d| parse_vec(d)).collect::<Result<_, _>>()?,
                        None => complete_transverse(&plane),
                    };
                    Constraint::PlaneTransverse {
                        sub: AffineSubspace::from_repr(field, sub)?,
                        plane,
                        nu,
                        max_order: *max_order,
                    }
                }
            });
        }
        VanishingSpec::new(field, self.n, constraints)
    }

    pub fn from_spec(spec: &VanishingSpec) -> Self {
        let strs = |v: &[FieldValue]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        SpecRepr {
            field: spec.field.to_string(),
            n: spec.n,
            constraints: spec
                .constraints
                .iter()
                .map(|c| match c {
                    Constraint::PointOrder { point, order } => ConstraintRepr::PointOrder {
                        point: strs(point),
                        order: *order,
                    },
                    Constraint::PlaneTransverse {
                        sub,
                        plane,
                        nu,
                        max_order,
                    } => ConstraintRepr::PlaneTransverse {
                        sub: sub.to_repr(),
                        plane: plane.to_repr(),
                        nu: Some(nu.iter().map(|d| strs(d)).collect()),
                        max_order: *max_order,
                    },
                })
                .collect(),
        }
    }
}
