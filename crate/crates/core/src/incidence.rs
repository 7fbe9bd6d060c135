//! Joints and multijoints with their multiplicities, dyadic levels, Kakeya
//! sums and point–line incidence counts in a plane.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affine::{
    direction_rank, intersect_line_plane, intersect_lines, AffineError, AffineSubspace, Line, LineIntersection,
    LinePlaneIntersection, Point,
};
use crate::field::Field;
use crate::limits::{CapExceeded, Limits};
use crate::linalg::{SpanBasis, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IncidenceError {
    #[error("lines {first} and {second} are the same line")]
    DuplicateLine { first: usize, second: usize },
    #[error("line id {0} is used twice")]
    DuplicateId(usize),
    #[error("object lives in dimension {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("object over {found}, expected {expected}")]
    FieldMismatch { expected: Field, found: Field },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("input is not contained in the given plane")]
    NotCoplanar,
    #[error(transparent)]
    Affine(#[from] AffineError),
    #[error(transparent)]
    Cap(#[from] CapExceeded),
}

/// Pairwise distinct lines in `F^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineFamily {
    field: Field,
    n: usize,
    lines: Vec<Line>,
}

impl LineFamily {
    pub fn new(field: Field, n: usize, lines: Vec<Line>) -> Result<Self, IncidenceError> {
        let mut seen: BTreeMap<&AffineSubspace, usize> = BTreeMap::new();
        let mut ids = BTreeSet::new();
        for l in &lines {
            if l.space().ambient_dim() != n {
                return Err(IncidenceError::Dimension {
                    expected: n,
                    found: l.space().ambient_dim(),
                });
            }
            if l.space().field() != field {
                return Err(IncidenceError::FieldMismatch {
                    expected: field,
                    found: l.space().field(),
                });
            }
            if !ids.insert(l.id) {
                return Err(IncidenceError::DuplicateId(l.id));
            }
            if let Some(&first) = seen.get(l.space()) {
                return Err(IncidenceError::DuplicateLine { first, second: l.id });
            }
            seen.insert(l.space(), l.id);
        }
        Ok(LineFamily { field, n, lines })
    }

    /// Numbers the given lines `0, 1, …` in order.
    pub fn from_subspaces(field: Field, n: usize, spaces: Vec<AffineSubspace>) -> Result<Self, IncidenceError> {
        let lines = spaces
            .into_iter()
            .enumerate()
            .map(|(i, s)| Line::from_subspace(i, s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(field, n, lines)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&Line> {
        self.lines.iter().find(|l| l.id == id)
    }

    /// Ids of the lines through `x`.
    pub fn lines_through(&self, x: &[crate::field::FieldValue]) -> Result<Vec<usize>, AffineError> {
        let mut ids = Vec::new();
        for l in &self.lines {
            if l.contains(x)? {
                ids.push(l.id);
            }
        }
        ids.sort_unstable();
        Ok(ids)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointRecord {
    pub point: Point,
    /// Sorted line ids.
    pub incident_lines: Vec<usize>,
    /// `m(x)`, the number of lines through the point.
    pub m: usize,
    /// `N(x)`, ordered `n`-tuples of incident lines with independent directions.
    pub tuples: u64,
}

/// Every point where at least two lines of the family meet, with the ids of
/// all lines through it.
pub fn intersection_points(family: &LineFamily) -> BTreeMap<Point, BTreeSet<usize>> {
    let lines = family.lines();
    let mut map: BTreeMap<Point, BTreeSet<usize>> = BTreeMap::new();
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            if let LineIntersection::Point(x) = intersect_lines(a, b) {
                let e = map.entry(x).or_default();
                e.insert(a.id);
                e.insert(b.id);
            }
        }
    }
    map
}

/// Number of ordered `n`-tuples of the given directions that form a basis of
/// `F^n`. Unordered subsets are enumerated with prefix rank pruning.
pub fn count_spanning_tuples(
    field: Field,
    n: usize,
    directions: &[&Vector],
    limits: &Limits,
) -> Result<u64, CapExceeded> {
    fn rec(
        dirs: &[&Vector],
        start: usize,
        need: usize,
        span: &SpanBasis,
        visited: &mut u64,
        limits: &Limits,
    ) -> Result<u64, CapExceeded> {
        if need == 0 {
            return Ok(1);
        }
        let mut total = 0;
        for i in start..dirs.len() {
            if dirs.len() - i < need {
                break;
            }
            *visited += 1;
            limits.check_tuples(*visited)?;
            let mut next = span.clone();
            if next.insert(dirs[i]) {
                total += rec(dirs, i + 1, need - 1, &next, visited, limits)?;
            }
        }
        Ok(total)
    }
    if n == 0 {
        return Ok(1);
    }
    let mut visited = 0;
    let subsets = rec(directions, 0, n, &SpanBasis::new(field, n), &mut visited, limits)?;
    let factorial: u64 = (1..=n as u64).product();
    Ok(subsets * factorial)
}

/// `N(x)` for the lines with the given ids.
pub fn joint_tuple_multiplicity(
    family: &LineFamily,
    incident: &[usize],
    limits: &Limits,
) -> Result<u64, IncidenceError> {
    let dirs: Vec<&Vector> = incident
        .iter()
        .map(|&id| {
            family
                .get(id)
                .map(Line::direction)
                .ok_or_else(|| IncidenceError::Parameter(format!("unknown line id {id}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(count_spanning_tuples(
        family.field(),
        family.ambient_dim(),
        &dirs,
        limits,
    )?)
}

/// All joints of the family, sorted by point.
pub fn find_joints(family: &LineFamily, limits: &Limits) -> Result<Vec<JointRecord>, IncidenceError> {
    limits.check_lines(family.len())?;
    let n = family.ambient_dim();
    let mut out = Vec::new();
    for (point, ids) in intersection_points(family) {
        let ids: Vec<usize> = ids.into_iter().collect();
        if ids.len() < n {
            continue;
        }
        let rank = direction_rank(ids.iter().map(|&id| family.get(id).expect("known id").space()));
        if rank < n {
            continue;
        }
        let tuples = joint_tuple_multiplicity(family, &ids, limits)?;
        out.push(JointRecord {
            point,
            m: ids.len(),
            incident_lines: ids,
            tuples,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultijointRecord {
    pub point: Point,
    /// Indices of the planes through the point.
    pub planes: Vec<usize>,
    /// For each line family, sorted ids of its lines through the point.
    pub lines: Vec<Vec<usize>>,
    /// `N′(x)`: tuples (plane, one line per family) whose directions span `F^n`.
    pub tuples: u64,
}

fn multijoint_tuples(
    planes: &[&AffineSubspace],
    families: &[Vec<&Vector>],
    n: usize,
    limits: &Limits,
) -> Result<u64, CapExceeded> {
    fn rec(
        families: &[Vec<&Vector>],
        j: usize,
        span: &SpanBasis,
        visited: &mut u64,
        limits: &Limits,
    ) -> Result<u64, CapExceeded> {
        if j == families.len() {
            return Ok(u64::from(span.rank() == span.dim()));
        }
        let mut total = 0;
        for d in &families[j] {
            *visited += 1;
            limits.check_tuples(*visited)?;
            let mut next = span.clone();
            if next.insert(d) {
                total += rec(families, j + 1, &next, visited, limits)?;
            }
        }
        Ok(total)
    }
    let mut visited = 0;
    let mut total = 0;
    for p in planes {
        let mut span = SpanBasis::new(p.field(), n);
        for d in p.directions() {
            span.insert(d);
        }
        total += rec(families, 0, &span, &mut visited, limits)?;
    }
    Ok(total)
}

/// Multijoints formed by a family of k-planes and `n − k` line families.
pub fn find_multijoints(
    planes: &[AffineSubspace],
    families: &[LineFamily],
    limits: &Limits,
) -> Result<Vec<MultijointRecord>, IncidenceError> {
    let Some(first) = planes.first() else {
        return Ok(Vec::new());
    };
    let (field, n, k) = (first.field(), first.ambient_dim(), first.dim());
    if n < 3 || k < 2 || families.len() + k != n {
        return Err(IncidenceError::Parameter(format!(
            "need n ≥ 3, k ≥ 2 and n − k line families; got n = {n}, k = {k}, {} families",
            families.len()
        )));
    }
    for p in planes {
        if p.ambient_dim() != n || p.dim() != k {
            return Err(IncidenceError::Parameter("planes differ in dimension".into()));
        }
        if p.field() != field {
            return Err(IncidenceError::FieldMismatch {
                expected: field,
                found: p.field(),
            });
        }
    }
    for fam in families {
        if fam.ambient_dim() != n {
            return Err(IncidenceError::Dimension {
                expected: n,
                found: fam.ambient_dim(),
            });
        }
        if fam.field() != field {
            return Err(IncidenceError::FieldMismatch {
                expected: field,
                found: fam.field(),
            });
        }
    }
    let total_lines: usize = families.iter().map(LineFamily::len).sum();
    limits.check_lines(total_lines)?;

    let all: Vec<&Line> = families.iter().flat_map(|f| f.lines()).collect();
    let mut candidates: BTreeSet<Point> = BTreeSet::new();
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            if let LineIntersection::Point(x) = intersect_lines(a, b) {
                candidates.insert(x);
            }
        }
        for p in planes {
            if let LinePlaneIntersection::Point(x) = intersect_line_plane(a, p) {
                candidates.insert(x);
            }
        }
    }

    let mut out = Vec::new();
    'points: for x in candidates {
        let mut through_planes = Vec::new();
        for (i, p) in planes.iter().enumerate() {
            if p.contains(&x)? {
                through_planes.push(i);
            }
        }
        if through_planes.is_empty() {
            continue;
        }
        let mut through_lines = Vec::with_capacity(families.len());
        for fam in families {
            let ids = fam.lines_through(&x)?;
            if ids.is_empty() {
                continue 'points;
            }
            through_lines.push(ids);
        }
        let plane_refs: Vec<&AffineSubspace> = through_planes.iter().map(|&i| &planes[i]).collect();
        let dirs: Vec<Vec<&Vector>> = families
            .iter()
            .zip(&through_lines)
            .map(|(fam, ids)| {
                ids.iter()
                    .map(|&id| fam.get(id).expect("known id").direction())
                    .collect()
            })
            .collect();
        let tuples = multijoint_tuples(&plane_refs, &dirs, n, limits)?;
        if tuples > 0 {
            out.push(MultijointRecord {
                point: x,
                planes: through_planes,
                lines: through_lines,
                tuples,
            });
        }
    }
    Ok(out)
}

/// Parses `"3/2"`, `"2"` or `"-1/4"`.
pub fn parse_rational(s: &str) -> Result<Rational64, IncidenceError> {
    let s = s.trim();
    let r = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (i64, i64) = (
                a.trim()
                    .parse()
                    .map_err(|_| IncidenceError::Parameter(format!("bad rational {s:?}")))?,
                b.trim()
                    .parse()
                    .map_err(|_| IncidenceError::Parameter(format!("bad rational {s:?}")))?,
            );
            if b == 0 {
                return Err(IncidenceError::Parameter(format!("zero denominator in {s:?}")));
            }
            Rational64::new(a, b)
        }
        None => Rational64::from_integer(
            s.parse()
                .map_err(|_| IncidenceError::Parameter(format!("bad rational {s:?}")))?,
        ),
    };
    Ok(r)
}

pub fn rational_to_f64(r: &Rational64) -> f64 {
    r.to_f64().expect("finite")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KakeyaReport {
    /// `m ↦ number of joints with m(x) = m`.
    pub multiset: BTreeMap<usize, usize>,
    pub exponent: String,
    pub sum: f64,
    /// `sum / L^s`.
    pub ratio: f64,
}

/// `Σ_x m(x)^s` and its ratio against `L^s`.
pub fn kakeya_sum<I>(ms: I, num_lines: usize, s: Rational64) -> Result<KakeyaReport, IncidenceError>
where
    I: IntoIterator<Item = usize>,
{
    if !s.is_positive() {
        return Err(IncidenceError::Parameter(format!("exponent {s} must be positive")));
    }
    let mut multiset = BTreeMap::new();
    for m in ms {
        *multiset.entry(m).or_insert(0) += 1;
    }
    let sf = rational_to_f64(&s);
    let sum: f64 = multiset.iter().map(|(&m, &c)| c as f64 * (m as f64).powf(sf)).sum();
    let ratio = if num_lines == 0 {
        0.0
    } else {
        sum / (num_lines as f64).powf(sf)
    };
    Ok(KakeyaReport {
        multiset,
        exponent: s.to_string(),
        sum,
        ratio,
    })
}

/// Largest power of two not exceeding `m ≥ 1`.
pub fn dyadic_level(m: usize) -> usize {
    assert!(m >= 1, "levels start at 1");
    1 << (usize::BITS - 1 - m.leading_zeros())
}

/// Dyadic `k ↦` indices of the joints with `k ≤ m < 2k`.
pub type LevelTable = BTreeMap<usize, Vec<usize>>;

pub fn dyadic_levels(joints: &[JointRecord]) -> LevelTable {
    let mut t = LevelTable::new();
    for (i, j) in joints.iter().enumerate() {
        t.entry(dyadic_level(j.m)).or_default().push(i);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelParams {
    /// Small/large threshold constant `c`.
    pub c: Rational64,
    /// Goodness constant `C`.
    pub big_c: Rational64,
    pub eps: Rational64,
}

impl Default for LevelParams {
    fn default() -> Self {
        LevelParams {
            c: Rational64::from_integer(1),
            big_c: Rational64::from_integer(10),
            eps: Rational64::new(1, 4),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelClass {
    pub count: usize,
    pub good: bool,
    pub large: bool,
}

fn big(v: i64) -> BigUint {
    BigUint::from(v as u64)
}

/// Good: `|J_k| k^{2−ε/2} ≤ C L^{3/2}`. Large: `k > c L^{1/2}`. Both are
/// decided on integers after raising to a common power.
pub fn classify_levels(
    table: &LevelTable,
    num_lines: usize,
    params: &LevelParams,
) -> Result<BTreeMap<usize, LevelClass>, IncidenceError> {
    let half = Rational64::new(1, 2);
    if !params.eps.is_positive() || params.eps >= half {
        return Err(IncidenceError::Parameter("ε must lie in (0, 1/2)".into()));
    }
    if !params.big_c.is_positive() || !params.c.is_positive() {
        return Err(IncidenceError::Parameter("c and C must be positive".into()));
    }
    let (a, b) = (*params.eps.numer() as u32, *params.eps.denom() as u32);
    let (cn, cd) = (big(*params.big_c.numer()), big(*params.big_c.denom()));
    let (sn, sd) = (big(*params.c.numer()), big(*params.c.denom()));
    let l = BigUint::from(num_lines);
    let rhs_good = cn.pow(2 * b) * l.pow(3 * b);
    let rhs_large = &sn * &sn * &l;
    let mut out = BTreeMap::new();
    for (&k, members) in table {
        let kb = BigUint::from(k);
        let lhs_good = BigUint::from(members.len()).pow(2 * b) * kb.pow(4 * b - a) * cd.pow(2 * b);
        let lhs_large = &kb * &kb * &sd * &sd;
        out.insert(
            k,
            LevelClass {
                count: members.len(),
                good: lhs_good <= rhs_good,
                large: lhs_large > rhs_large,
            },
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StLevel {
    pub k: usize,
    pub count: usize,
    /// `|S_k| / (L²/k³ + L/k)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StReport {
    pub points: usize,
    pub lines: usize,
    pub incidences: usize,
    /// `I / (|S|^{2/3} |L|^{2/3} + |L| + |S|)`.
    pub ratio: f64,
    pub levels: Vec<StLevel>,
}

/// Incidences between points and lines lying in a common 2-plane.
pub fn st_incidences(plane: &AffineSubspace, points: &[Point], lines: &[Line]) -> Result<StReport, IncidenceError> {
    if plane.dim() != 2 {
        return Err(IncidenceError::Parameter(
            "incidence plane must be 2-dimensional".into(),
        ));
    }
    for x in points {
        if !plane.contains(x)? {
            return Err(IncidenceError::NotCoplanar);
        }
    }
    for l in lines {
        if !plane.contains_subspace(l.space())? {
            return Err(IncidenceError::NotCoplanar);
        }
    }
    let distinct: BTreeSet<&Point> = points.iter().collect();
    let mut incidences = 0;
    let mut per_level: BTreeMap<usize, usize> = BTreeMap::new();
    for x in &distinct {
        let mut r = 0;
        for l in lines {
            if l.contains(x)? {
                r += 1;
            }
        }
        incidences += r;
        if r >= 2 {
            *per_level.entry(dyadic_level(r)).or_insert(0) += 1;
        }
    }
    let (s, l) = (distinct.len() as f64, lines.len() as f64);
    let denom = (s * l).powf(2.0 / 3.0) + l + s;
    let ratio = if denom.is_zero() {
        0.0
    } else {
        incidences as f64 / denom
    };
    let levels = per_level
        .into_iter()
        .map(|(k, count)| {
            let kf = k as f64;
            StLevel {
                k,
                count,
                ratio: count as f64 / (l * l / (kf * kf * kf) + l / kf),
            }
        })
        .collect();
    Ok(StReport {
        points: distinct.len(),
        lines: lines.len(),
        incidences,
        ratio,
        levels,
    })
}
