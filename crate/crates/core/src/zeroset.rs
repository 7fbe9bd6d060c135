//! Zero sets of factored polynomials in three variables: critical, regular
//! and flat points, critical and flat lines, and planar structures on
//! joint sets.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::affine::{direction_rank, plane_through_lines, AffineError, AffineSubspace, Line, Point};
use crate::field::{Field, FieldValue};
use crate::incidence::{dyadic_level, JointRecord, LineFamily};
use crate::linalg::Matrix;
use crate::mpoly::{hasse_derivative, restrict_to_plane, MultiPoly, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZeroSetError {
    #[error("factor {0} is a constant")]
    ScalarFactor(usize),
    #[error("varieties live in three variables, got {0}")]
    NotThreeVariables(usize),
    #[error("factors over different fields")]
    FieldMismatch,
    #[error("point is not on the zero set")]
    PointNotOnZ,
    #[error("line {0} does not lie in the zero set")]
    LineNotInZ(usize),
    #[error("line {0} does not pass through the point")]
    LineMissesPoint(usize),
    #[error("joint {0} is not assigned to any plane")]
    Uncovered(usize),
    #[error("joint {joint} listed for level {level} has m = {m}")]
    SubsetOutsideLevel { joint: usize, level: usize, m: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Affine(#[from] AffineError),
}

/// `p = Π f_i^{e_i}` with monic, pairwise non-proportional factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredVariety {
    field: Field,
    factors: Vec<(MultiPoly, u32)>,
    product: MultiPoly,
    square_free: MultiPoly,
}

impl FactoredVariety {
    pub fn new(factors: Vec<(MultiPoly, u32)>) -> Result<Self, ZeroSetError> {
        let field = factors
            .first()
            .map(|(f, _)| f.field())
            .ok_or_else(|| ZeroSetError::Parameter("at least one factor is required".into()))?;
        let mut merged: Vec<(MultiPoly, u32)> = Vec::new();
        for (i, (f, e)) in factors.into_iter().enumerate() {
            if f.nvars() != 3 {
                return Err(ZeroSetError::NotThreeVariables(f.nvars()));
            }
            if f.field() != field {
                return Err(ZeroSetError::FieldMismatch);
            }
            if f.is_constant() {
                return Err(ZeroSetError::ScalarFactor(i));
            }
            if e == 0 {
                return Err(ZeroSetError::Parameter(format!("factor {i} has multiplicity 0")));
            }
            let m = f.monic();
            match merged.iter_mut().find(|(g, _)| *g == m) {
                Some((_, total)) => *total += e,
                None => merged.push((m, e)),
            }
        }
        let factors = merged;
        let mut product = MultiPoly::one(field, 3);
        let mut square_free = MultiPoly::one(field, 3);
        for (f, e) in &factors {
            product = &product * &f.pow(*e);
            square_free = &square_free * f;
        }
        Ok(FactoredVariety {
            field,
            factors,
            product,
            square_free,
        })
    }

    /// Product of the given linear forms, each with multiplicity 1.
    pub fn from_planes(planes: Vec<MultiPoly>) -> Result<Self, ZeroSetError> {
        Self::new(planes.into_iter().map(|p| (p, 1)).collect())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn factors(&self) -> &[(MultiPoly, u32)] {
        &self.factors
    }

    pub fn product(&self) -> &MultiPoly {
        &self.product
    }

    pub fn square_free(&self) -> &MultiPoly {
        &self.square_free
    }

    /// `d = deg p`.
    pub fn degree(&self) -> u32 {
        self.product.degree().or_zero()
    }

    /// The planes cut out by the degree-one factors.
    pub fn plane_factors(&self) -> Vec<AffineSubspace> {
        self.factors
            .iter()
            .filter(|(f, _)| f.degree().finite() == Some(1))
            .map(|(f, _)| linear_zero_set(f))
            .collect()
    }

    pub fn contains_point(&self, x: &[FieldValue]) -> Result<bool, ZeroSetError> {
        Ok(self.square_free.evaluate(x)?.is_zero())
    }

    pub fn contains_line(&self, l: &Line) -> Result<bool, ZeroSetError> {
        let r = restrict_to_plane(&self.square_free, l.base(), &l.space().direction_matrix())?;
        Ok(r.is_zero())
    }

    /// First-order Hasse partials of `p_sf`.
    pub fn gradient(&self) -> [MultiPoly; 3] {
        let d = |i: usize| {
            let mut a = [0u32; 3];
            a[i] = 1;
            hasse_derivative(&self.square_free, &a).expect("three variables")
        };
        [d(0), d(1), d(2)]
    }
}

/// The plane `{x : f(x) = 0}` of a degree-one polynomial in three variables.
fn linear_zero_set(f: &MultiPoly) -> AffineSubspace {
    let field = f.field();
    let n = f.nvars();
    let coeffs: Vec<FieldValue> = (0..n)
        .map(|i| f.coefficient(&crate::mpoly::Monomial::unit(n, i)))
        .collect();
    let pivot = coeffs.iter().position(|c| !c.is_zero()).expect("degree one");
    let mut base = vec![field.zero(); n];
    base[pivot] = &(-&f.constant_term()) / &coeffs[pivot];
    let row = Matrix::from_rows(field, &[coeffs]).expect("one row");
    AffineSubspace::new(field, &base, &row.kernel()).expect("kernel is independent")
}

pub fn square_free_part(v: &FactoredVariety) -> MultiPoly {
    v.square_free().clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointClass {
    Critical,
    Regular,
    Flat,
}

impl PointClass {
    pub fn is_regular(self) -> bool {
        self != PointClass::Critical
    }
}

/// Critical if `∇p_sf(x) = 0`; flat if regular and three of the given lines
/// (all in `Z`, all through `x`) lie in a common plane.
pub fn classify_point(v: &FactoredVariety, x: &[FieldValue], lines: &[Line]) -> Result<PointClass, ZeroSetError> {
    if !v.contains_point(x)? {
        return Err(ZeroSetError::PointNotOnZ);
    }
    let mut distinct: Vec<&Line> = Vec::new();
    for l in lines {
        if !l.contains(x)? {
            return Err(ZeroSetError::LineMissesPoint(l.id));
        }
        if !v.contains_line(l)? {
            return Err(ZeroSetError::LineNotInZ(l.id));
        }
        if !distinct.iter().any(|d| d.space() == l.space()) {
            distinct.push(l);
        }
    }
    let mut critical = true;
    for g in v.gradient() {
        if !g.evaluate(x)?.is_zero() {
            critical = false;
            break;
        }
    }
    if critical {
        return Ok(PointClass::Critical);
    }
    for (i, a) in distinct.iter().enumerate() {
        for (j, b) in distinct.iter().enumerate().skip(i + 1) {
            for c in distinct.iter().skip(j + 1) {
                if direction_rank([a.space(), b.space(), c.space()]) <= 2 {
                    return Ok(PointClass::Flat);
                }
            }
        }
    }
    Ok(PointClass::Regular)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LineClass {
    CriticalLine,
    FlatLine,
    Generic,
}

/// A point on a line together with lines of `Z` through it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatWitness {
    pub point: Point,
    pub lines: Vec<Line>,
}

/// Flat witnesses required to call a line flat in a variety of degree `d`.
pub fn flat_witness_threshold(d: u32) -> usize {
    (3 * d as usize).saturating_sub(3).max(1)
}

pub fn classify_line(v: &FactoredVariety, l: &Line, witnesses: &[FlatWitness]) -> Result<LineClass, ZeroSetError> {
    if !v.contains_line(l)? {
        return Err(ZeroSetError::LineNotInZ(l.id));
    }
    let omega = l.space().direction_matrix();
    let mut critical = true;
    for g in v.gradient() {
        if !restrict_to_plane(&g, l.base(), &omega)?.is_zero() {
            critical = false;
            break;
        }
    }
    if critical {
        return Ok(LineClass::CriticalLine);
    }
    let mut flat_points: BTreeSet<&Point> = BTreeSet::new();
    for w in witnesses {
        if !l.contains(&w.point)? {
            continue;
        }
        if classify_point(v, &w.point, &w.lines)? == PointClass::Flat {
            flat_points.insert(&w.point);
        }
    }
    if flat_points.len() >= flat_witness_threshold(v.degree()) {
        Ok(LineClass::FlatLine)
    } else {
        Ok(LineClass::Generic)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineCensus {
    pub degree: u32,
    pub critical: usize,
    pub flat: usize,
    pub flat_not_in_plane: usize,
    pub generic: usize,
    /// `d²`.
    pub critical_bound: u64,
    /// `max(3d² − 4d, 0)`.
    pub flat_bound: u64,
    pub critical_ok: bool,
    pub flat_ok: bool,
}

pub fn line_census(v: &FactoredVariety, candidates: &[(Line, Vec<FlatWitness>)]) -> Result<LineCensus, ZeroSetError> {
    let d = v.degree() as i64;
    let planes = v.plane_factors();
    let (mut critical, mut flat, mut flat_not_in_plane, mut generic) = (0, 0, 0, 0);
    for (l, w) in candidates {
        match classify_line(v, l, w)? {
            LineClass::CriticalLine => critical += 1,
            LineClass::FlatLine => {
                flat += 1;
                let mut in_plane = false;
                for p in &planes {
                    if p.contains_subspace(l.space())? {
                        in_plane = true;
                        break;
                    }
                }
                if !in_plane {
                    flat_not_in_plane += 1;
                }
            }
            LineClass::Generic => generic += 1,
        }
    }
    let critical_bound = (d * d) as u64;
    let flat_bound = (3 * d * d - 4 * d).max(0) as u64;
    Ok(LineCensus {
        degree: d as u32,
        critical,
        flat,
        flat_not_in_plane,
        generic,
        critical_bound,
        flat_bound,
        critical_ok: critical as u64 <= critical_bound,
        flat_ok: flat_not_in_plane as u64 <= flat_bound,
    })
}

/// Planes and the plane each joint is assigned to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub planes: Vec<AffineSubspace>,
    pub assignment: BTreeMap<Point, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A joint assigned to a plane that does not contain it.
    JointOffPlane { joint: usize, plane: usize },
    /// Too few of the joint's lines are in its plane's line set.
    P1 {
        joint: usize,
        plane: usize,
        in_plane: usize,
        total: usize,
    },
    /// A line belongs to the line sets of two planes.
    P2 { line: usize, planes: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureCertificate {
    pub c1: String,
    pub planes: Vec<AffineSubspace>,
    /// Per plane, indices into the joint list.
    pub joint_sets: Vec<Vec<usize>>,
    /// Per plane, ids of the lines in `L_Π`.
    pub line_sets: Vec<Vec<usize>>,
    pub violations: Vec<Violation>,
    pub accepted: bool,
}

fn check_c(c: Rational64, name: &str) -> Result<(), ZeroSetError> {
    if !c.is_positive() || c > Rational64::from_integer(1) {
        return Err(ZeroSetError::Parameter(format!("{name} must lie in (0, 1]")));
    }
    Ok(())
}

/// `in_plane ≥ c · total`, exactly.
fn meets_fraction(in_plane: usize, total: usize, c: Rational64) -> bool {
    (in_plane as i128) * (*c.denom() as i128) >= (*c.numer() as i128) * (total as i128)
}

/// Checks properties P1 and P2 of a proposed planar structure.
pub fn planar_structure_verify(
    joints: &[JointRecord],
    family: &LineFamily,
    partition: &Partition,
    c1: Rational64,
) -> Result<StructureCertificate, ZeroSetError> {
    check_c(c1, "c1")?;
    let np = partition.planes.len();
    let mut joint_sets = vec![Vec::new(); np];
    for (i, j) in joints.iter().enumerate() {
        let &p = partition.assignment.get(&j.point).ok_or(ZeroSetError::Uncovered(i))?;
        if p >= np {
            return Err(ZeroSetError::Parameter(format!(
                "joint {i} assigned to missing plane {p}"
            )));
        }
        joint_sets[p].push(i);
    }
    let mut violations = Vec::new();
    let mut line_sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); np];
    for (p, members) in joint_sets.iter().enumerate() {
        let plane = &partition.planes[p];
        for &i in members {
            if !plane.contains(&joints[i].point)? {
                violations.push(Violation::JointOffPlane { joint: i, plane: p });
                continue;
            }
            for &id in &joints[i].incident_lines {
                let l = family
                    .get(id)
                    .ok_or_else(|| ZeroSetError::Parameter(format!("unknown line id {id}")))?;
                if plane.contains_subspace(l.space())? {
                    line_sets[p].insert(id);
                }
            }
        }
    }
    for (p, members) in joint_sets.iter().enumerate() {
        for &i in members {
            let j = &joints[i];
            let in_plane = j.incident_lines.iter().filter(|id| line_sets[p].contains(id)).count();
            if !meets_fraction(in_plane, j.m, c1) {
                violations.push(Violation::P1 {
                    joint: i,
                    plane: p,
                    in_plane,
                    total: j.m,
                });
            }
        }
    }
    let mut owners: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (p, ls) in line_sets.iter().enumerate() {
        for &id in ls {
            owners.entry(id).or_default().push(p);
        }
    }
    for (line, planes) in owners {
        if planes.len() > 1 {
            violations.push(Violation::P2 { line, planes });
        }
    }
    Ok(StructureCertificate {
        c1: c1.to_string(),
        planes: partition.planes.clone(),
        joint_sets,
        line_sets: line_sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        accepted: violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub success: bool,
    /// Largest `c1` for which P1 holds on the final partition.
    pub best_c1: String,
    pub certificate: StructureCertificate,
    pub partition_rounds: usize,
}

fn best_plane(joint: &JointRecord, family: &LineFamily) -> Result<Option<(AffineSubspace, usize)>, ZeroSetError> {
    let lines: Vec<&Line> = joint.incident_lines.iter().filter_map(|&id| family.get(id)).collect();
    let mut best: Option<(AffineSubspace, usize)> = None;
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            let Some(plane) = plane_through_lines(a, b) else {
                continue;
            };
            let mut score = 0;
            for l in &lines {
                if plane.contains_subspace(l.space())? {
                    score += 1;
                }
            }
            let better = match &best {
                None => true,
                Some((bp, bs)) => score > *bs || (score == *bs && plane < *bp),
            };
            if better {
                best = Some((plane, score));
            }
        }
    }
    Ok(best)
}

/// Greedy search for a planar structure: each joint takes the plane through
/// two of its lines that holds the most of them; lines claimed by two
/// planes are then released by moving the joints on them to the plane that
/// already holds more of those joints.
pub fn planar_structure_search(
    joints: &[JointRecord],
    family: &LineFamily,
    c1: Rational64,
) -> Result<SearchOutcome, ZeroSetError> {
    check_c(c1, "c1")?;
    let mut planes: Vec<AffineSubspace> = Vec::new();
    let mut index: BTreeMap<AffineSubspace, usize> = BTreeMap::new();
    let mut assignment: BTreeMap<Point, usize> = BTreeMap::new();
    let mut plane_of = |p: AffineSubspace, planes: &mut Vec<AffineSubspace>| -> usize {
        *index.entry(p.clone()).or_insert_with(|| {
            planes.push(p);
            planes.len() - 1
        })
    };
    for j in joints {
        let plane = match best_plane(j, family)? {
            Some((p, _)) => p,
            None => {
                // all incident lines parallel or fewer than two: any plane
                // through the point and its first line
                let l = family
                    .get(j.incident_lines[0])
                    .ok_or_else(|| ZeroSetError::Parameter("unknown line id".into()))?;
                let extra = crate::affine::complete_transverse(l.space())[0].clone();
                AffineSubspace::new(l.space().field(), &j.point, &[l.direction().clone(), extra])?
            }
        };
        let p = plane_of(plane, &mut planes);
        assignment.insert(j.point.clone(), p);
    }

    let max_rounds = 2 * joints.len() + 8;
    let mut rounds = 0;
    let mut cert;
    loop {
        let partition = Partition {
            planes: planes.clone(),
            assignment: assignment.clone(),
        };
        cert = planar_structure_verify(joints, family, &partition, c1)?;
        let conflict = cert.violations.iter().find_map(|v| match v {
            Violation::P2 { line, planes } => Some((*line, planes.clone())),
            _ => None,
        });
        let Some((line, owners)) = conflict else {
            break;
        };
        if rounds >= max_rounds {
            break;
        }
        rounds += 1;
        let l = family.get(line).expect("violation names a known line");
        let mut on_line: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, j) in joints.iter().enumerate() {
            let p = assignment[&j.point];
            if owners.contains(&p) && l.contains(&j.point)? {
                on_line.entry(p).or_default().push(i);
            }
        }
        let keep = owners
            .iter()
            .copied()
            .max_by_key(|p| (on_line.get(p).map_or(0, Vec::len), std::cmp::Reverse(*p)))
            .expect("at least two owners");
        for (&p, members) in &on_line {
            if p == keep {
                continue;
            }
            for &i in members {
                assignment.insert(joints[i].point.clone(), keep);
            }
        }
    }

    let best_c1 = best_fraction(&cert, joints);
    Ok(SearchOutcome {
        success: cert.accepted,
        best_c1,
        certificate: cert,
        partition_rounds: rounds,
    })
}

fn best_fraction(cert: &StructureCertificate, joints: &[JointRecord]) -> String {
    if cert
        .violations
        .iter()
        .any(|v| matches!(v, Violation::P2 { .. } | Violation::JointOffPlane { .. }))
    {
        return "0".into();
    }
    let mut best: Option<Rational64> = None;
    for (p, members) in cert.joint_sets.iter().enumerate() {
        for &i in members {
            let j = &joints[i];
            let in_plane = j
                .incident_lines
                .iter()
                .filter(|id| cert.line_sets[p].contains(id))
                .count();
            let r = Rational64::new(in_plane as i64, j.m as i64);
            best = Some(best.map_or(r, |b| b.min(r)));
        }
    }
    best.map_or_else(|| "1".into(), |b| b.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NearlyPlanarVerdict {
    pub accepted: bool,
    /// Levels with `|J_k′| < c2 |J_k|`.
    pub thin_levels: Vec<usize>,
    pub certificate: StructureCertificate,
}

/// `subsets[k]` lists indices of joints chosen from level `k`.
pub fn nearly_planar_verify(
    joints: &[JointRecord],
    family: &LineFamily,
    subsets: &BTreeMap<usize, Vec<usize>>,
    partition: &Partition,
    c1: Rational64,
    c2: Rational64,
) -> Result<NearlyPlanarVerdict, ZeroSetError> {
    check_c(c2, "c2")?;
    let mut level_sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for j in joints {
        *level_sizes.entry(dyadic_level(j.m)).or_insert(0) += 1;
    }
    let mut chosen = BTreeSet::new();
    for (&k, members) in subsets {
        for &i in members {
            let j = joints
                .get(i)
                .ok_or_else(|| ZeroSetError::Parameter(format!("joint index {i} out of range")))?;
            if dyadic_level(j.m) != k {
                return Err(ZeroSetError::SubsetOutsideLevel {
                    joint: i,
                    level: k,
                    m: j.m,
                });
            }
            chosen.insert(i);
        }
    }
    let mut thin_levels = Vec::new();
    for (&k, &size) in &level_sizes {
        let picked = subsets.get(&k).map_or(0, |m| m.iter().collect::<BTreeSet<_>>().len());
        if !meets_fraction(picked, size, c2) {
            thin_levels.push(k);
        }
    }
    let union: Vec<JointRecord> = chosen.iter().map(|&i| joints[i].clone()).collect();
    let certificate = planar_structure_verify(&union, family, partition, c1)?;
    Ok(NearlyPlanarVerdict {
        accepted: thin_levels.is_empty() && certificate.accepted,
        thin_levels,
        certificate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaneKakeya {
    pub plane: usize,
    /// `Σ_k |J_{k,Π}| k^{3/2}`.
    pub sum: f64,
    pub lines: usize,
    /// `sum / (L_Π L^{1/2})`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerPlaneReport {
    pub planes: Vec<PlaneKakeya>,
    pub total_plane_lines: usize,
    pub total_lines: usize,
    /// `Σ_Π L_Π ≤ L`.
    pub lines_fit: bool,
}

pub fn per_plane_kakeya_report(
    cert: &StructureCertificate,
    joints: &[JointRecord],
    total_lines: usize,
) -> PerPlaneReport {
    let sqrt_l = (total_lines as f64).sqrt();
    let planes: Vec<PlaneKakeya> = cert
        .joint_sets
        .iter()
        .zip(&cert.line_sets)
        .enumerate()
        .map(|(p, (members, lines))| {
            let sum: f64 = members
                .iter()
                .map(|&i| (dyadic_level(joints[i].m) as f64).powf(1.5))
                .sum();
            let denom = lines.len() as f64 * sqrt_l;
            PlaneKakeya {
                plane: p,
                sum,
                lines: lines.len(),
                ratio: if denom > 0.0 { sum / denom } else { 0.0 },
            }
        })
        .collect();
    let total_plane_lines = planes.iter().map(|p| p.lines).sum();
    PerPlaneReport {
        planes,
        total_plane_lines,
        total_lines,
        lines_fit: total_plane_lines <= total_lines,
    }
}

/// Parses a constant such as `c1` from `"1/2"`.
pub fn parse_fraction(s: &str) -> Result<Rational64, ZeroSetError> {
    crate::incidence::parse_rational(s).map_err(|e| ZeroSetError::Parameter(e.to_string()))
}

pub fn fraction_to_f64(r: Rational64) -> f64 {
    r.to_f64().expect("finite")
}
