//! Points, lines and k-planes in `F^n`, stored canonically so that equal
//! subspaces have identical representations.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldError, FieldValue};
use crate::linalg::{rank_of, LinalgError, Matrix, SpanBasis, Vector};

pub type Point = Vec<FieldValue>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AffineError {
    #[error("direction vectors are linearly dependent")]
    DependentDirections,
    #[error("subspace needs between 1 and {ambient} directions, got {found}")]
    BadDimension { ambient: usize, found: usize },
    #[error("expected a vector of length {expected}, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `x0 + span(Ω)`, with `Ω` in reduced echelon form (as rows) and `x0`
/// zero in every pivot coordinate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineSubspace {
    field: Field,
    pivots: Vec<usize>,
    dirs: Vec<Vector>,
    base: Point,
}

impl fmt::Debug for AffineSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_vec = |v: &[FieldValue]| {
            let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
            format!("({})", parts.join(", "))
        };
        write!(f, "{}", fmt_vec(&self.base))?;
        for d in &self.dirs {
            write!(f, " + t{}", fmt_vec(d))?;
        }
        Ok(())
    }
}

fn check_len(v: &[FieldValue], n: usize) -> Result<(), AffineError> {
    if v.len() != n {
        return Err(AffineError::Dimension {
            expected: n,
            found: v.len(),
        });
    }
    Ok(())
}

fn check_field(field: Field, v: &[FieldValue]) -> Result<(), AffineError> {
    if let Some(x) = v.iter().find(|x| x.field() != field) {
        return Err(FieldError::MixedFields {
            left: field,
            right: x.field(),
        }
        .into());
    }
    Ok(())
}

impl AffineSubspace {
    pub fn new(field: Field, x0: &[FieldValue], dirs: &[Vector]) -> Result<Self, AffineError> {
        let n = x0.len();
        if dirs.is_empty() || dirs.len() > n {
            return Err(AffineError::BadDimension {
                ambient: n,
                found: dirs.len(),
            });
        }
        check_field(field, x0)?;
        let mut span = SpanBasis::new(field, n);
        for d in dirs {
            check_len(d, n)?;
            check_field(field, d)?;
            if !span.insert(d) {
                return Err(AffineError::DependentDirections);
            }
        }
        let base = span.reduce(x0);
        let (pivots, dirs) = span.echelon_rows().into_iter().unzip();
        Ok(AffineSubspace {
            field,
            pivots,
            dirs,
            base,
        })
    }

    /// The affine span of `points`, which must be affinely independent.
    pub fn through_points(field: Field, points: &[Point]) -> Result<Self, AffineError> {
        let Some((first, rest)) = points.split_first() else {
            return Err(AffineError::BadDimension { ambient: 0, found: 0 });
        };
        let dirs: Vec<Vector> = rest
            .iter()
            .map(|p| {
                check_len(p, first.len())?;
                Ok(p.iter().zip(first).map(|(a, b)| a - b).collect())
            })
            .collect::<Result<_, AffineError>>()?;
        Self::new(field, first, &dirs)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    pub fn dim(&self) -> usize {
        self.dirs.len()
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn directions(&self) -> &[Vector] {
        &self.dirs
    }

    /// `n × k` matrix with the directions as columns.
    pub fn direction_matrix(&self) -> Matrix {
        Matrix::from_columns(self.field, self.ambient_dim(), &self.dirs)
            .expect("directions share the ambient dimension")
    }

    fn residual(&self, v: &[FieldValue]) -> Vector {
        let mut w = v.to_vec();
        for (&p, row) in self.pivots.iter().zip(&self.dirs) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (wi, ri) in w.iter_mut().zip(row) {
                if !ri.is_zero() {
                    *wi -= &(&f * ri);
                }
            }
        }
        w
    }

    /// Whether `v` lies in the direction space.
    pub fn contains_direction(&self, v: &[FieldValue]) -> Result<bool, AffineError> {
        check_len(v, self.ambient_dim())?;
        check_field(self.field, v)?;
        Ok(self.residual(v).iter().all(FieldValue::is_zero))
    }

    pub fn contains(&self, x: &[FieldValue]) -> Result<bool, AffineError> {
        check_len(x, self.ambient_dim())?;
        check_field(self.field, x)?;
        let diff: Vector = x.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        Ok(self.residual(&diff).iter().all(FieldValue::is_zero))
    }

    pub fn contains_subspace(&self, other: &AffineSubspace) -> Result<bool, AffineError> {
        if !self.contains(&other.base)? {
            return Ok(false);
        }
        for d in &other.dirs {
            if !self.contains_direction(d)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `x0 + Σ t_i ω_i` in the canonical parameterization.
    pub fn point_at(&self, t: &[FieldValue]) -> Result<Point, AffineError> {
        check_len(t, self.dim())?;
        let mut x = self.base.clone();
        for (ti, d) in t.iter().zip(&self.dirs) {
            if ti.is_zero() {
                continue;
            }
            for (xi, di) in x.iter_mut().zip(d) {
                *xi += &(ti * di);
            }
        }
        Ok(x)
    }

    /// Canonical parameters of a point known to lie in the subspace: the
    /// coordinates at the pivot positions.
    pub fn parameters_of(&self, x: &[FieldValue]) -> Result<Option<Vector>, AffineError> {
        if !self.contains(x)? {
            return Ok(None);
        }
        Ok(Some(self.pivots.iter().map(|&p| &x[p] - &self.base[p]).collect()))
    }

    pub fn to_repr(&self) -> SubspaceRepr {
        SubspaceRepr {
            x0: self.base.iter().map(ToString::to_string).collect(),
            dirs: self
                .dirs
                .iter()
                .map(|d| d.iter().map(ToString::to_string).collect())
                .collect(),
        }
    }

    pub fn from_repr(field: Field, repr: &SubspaceRepr) -> Result<Self, AffineError> {
        let parse = |s: &String| field.parse_value(s).map_err(AffineError::from);
        let x0 = repr.x0.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
        let dirs = repr
            .dirs
            .iter()
            .map(|d| d.iter().map(parse).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(field, &x0, &dirs)
    }
}

impl Serialize for AffineSubspace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_repr().serialize(serializer)
    }
}

/// JSON form `{ "x0": [..], "dirs": [[..], ..] }` with decimal-string entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceRepr {
    pub x0: Vec<String>,
    pub dirs: Vec<Vec<String>>,
}

/// A line with an identifier that is stable within its family.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    pub id: usize,
    space: AffineSubspace,
}

impl Line {
    pub fn new(id: usize, field: Field, x0: &[FieldValue], dir: &[FieldValue]) -> Result<Self, AffineError> {
        Self::from_subspace(id, AffineSubspace::new(field, x0, &[dir.to_vec()])?)
    }

    pub fn from_subspace(id: usize, space: AffineSubspace) -> Result<Self, AffineError> {
        if space.dim() != 1 {
            return Err(AffineError::BadDimension {
                ambient: space.ambient_dim(),
                found: space.dim(),
            });
        }
        Ok(Line { id, space })
    }

    pub fn space(&self) -> &AffineSubspace {
        &self.space
    }

    pub fn base(&self) -> &Point {
        self.space.base()
    }

    /// Canonical direction, scaled so its first nonzero entry is 1.
    pub fn direction(&self) -> &Vector {
        &self.space.directions()[0]
    }

    pub fn contains(&self, x: &[FieldValue]) -> Result<bool, AffineError> {
        self.space.contains(x)
    }

    pub fn point_at(&self, t: &FieldValue) -> Point {
        self.space.point_at(std::slice::from_ref(t)).expect("one parameter")
    }

    /// The parameter `t` with `point_at(t) = x`, if `x` is on the line.
    pub fn parameter_of(&self, x: &[FieldValue]) -> Result<Option<FieldValue>, AffineError> {
        Ok(self.space.parameters_of(x)?.map(|mut v| v.remove(0)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineIntersection {
    Point(Point),
    Disjoint,
    Identical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinePlaneIntersection {
    Point(Point),
    Contained,
    Disjoint,
}

pub fn intersect_lines(l1: &Line, l2: &Line) -> LineIntersection {
    if l1.space == l2.space {
        return LineIntersection::Identical;
    }
    if l1.space.field() != l2.space.field() || l1.space.ambient_dim() != l2.space.ambient_dim() {
        return LineIntersection::Disjoint;
    }
    let (d1, d2) = (l1.direction(), l2.direction());
    if d1 == d2 {
        return LineIntersection::Disjoint;
    }
    let field = l1.space.field();
    let n = l1.space.ambient_dim();
    // The canonical base point of a line is zero at the pivot of its
    // direction, so solve d1 s − d2 t = b2 − b1 directly.
    let neg_d2: Vector = d2.iter().map(|v| -v).collect();
    let m = Matrix::from_columns(field, n, &[d1.clone(), neg_d2]).expect("same dimension");
    let rhs: Vector = l2.base().iter().zip(l1.base()).map(|(a, b)| a - b).collect();
    match m.solve(&rhs).expect("shapes agree") {
        Some(st) => LineIntersection::Point(l1.point_at(&st[0])),
        None => LineIntersection::Disjoint,
    }
}

pub fn intersect_line_plane(l: &Line, plane: &AffineSubspace) -> LinePlaneIntersection {
    let field = plane.field();
    let n = plane.ambient_dim();
    if l.space.field() != field || l.space.ambient_dim() != n {
        return LinePlaneIntersection::Disjoint;
    }
    let parallel = plane.contains_direction(l.direction()).expect("dimensions checked");
    if parallel {
        return if plane.contains(l.base()).expect("dimensions checked") {
            LinePlaneIntersection::Contained
        } else {
            LinePlaneIntersection::Disjoint
        };
    }
    let mut cols = plane.directions().to_vec();
    cols.push(l.direction().iter().map(|v| -v).collect());
    let m = Matrix::from_columns(field, n, &cols).expect("same dimension");
    let rhs: Vector = l.base().iter().zip(plane.base()).map(|(a, b)| a - b).collect();
    match m.solve(&rhs).expect("shapes agree") {
        Some(sol) => {
            let t = sol.last().expect("nonempty");
            LinePlaneIntersection::Point(l.point_at(t))
        }
        None => LinePlaneIntersection::Disjoint,
    }
}

/// `A ∩ B` as a point and independent directions, or `None` if empty.
pub fn intersect_subspaces(a: &AffineSubspace, b: &AffineSubspace) -> Option<(Point, Vec<Vector>)> {
    let field = a.field();
    let n = a.ambient_dim();
    if b.field() != field || b.ambient_dim() != n {
        return None;
    }
    let k = a.dim();
    let mut cols = a.directions().to_vec();
    cols.extend(b.directions().iter().map(|d| d.iter().map(|v| -v).collect::<Vector>()));
    let m = Matrix::from_columns(field, n, &cols).expect("same dimension");
    let rhs: Vector = b.base().iter().zip(a.base()).map(|(x, y)| x - y).collect();
    let sol = m.solve(&rhs).expect("shapes agree")?;
    let point = a.point_at(&sol[..k]).expect("k parameters");
    let dirs = m
        .kernel()
        .into_iter()
        .map(|w| a.point_at(&w[..k]).expect("k parameters"))
        .map(|p| p.iter().zip(a.base()).map(|(x, y)| x - y).collect())
        .collect();
    Some((point, dirs))
}

/// Rank of all direction vectors of `objects` taken together.
pub fn direction_rank<'a, I>(objects: I) -> usize
where
    I: IntoIterator<Item = &'a AffineSubspace>,
{
    let mut it = objects.into_iter().peekable();
    let Some(first) = it.peek() else {
        return 0;
    };
    let (field, n) = (first.field(), first.ambient_dim());
    let vectors: Vec<Vector> = it.flat_map(|s| s.directions().iter().cloned()).collect();
    rank_of(field, n, &vectors)
}

/// Standard basis vectors completing the plane's directions to a basis,
/// chosen greedily from `e_1, …, e_n`.
pub fn complete_transverse(plane: &AffineSubspace) -> Vec<Vector> {
    let field = plane.field();
    let n = plane.ambient_dim();
    let mut span = SpanBasis::new(field, n);
    for d in plane.directions() {
        span.insert(d);
    }
    let mut out = Vec::new();
    for i in 0..n {
        if span.rank() == n {
            break;
        }
        let mut e = vec![field.zero(); n];
        e[i] = field.one();
        if span.insert(&e) {
            out.push(e);
        }
    }
    out
}

/// The plane spanned by two distinct intersecting lines, if they are not
/// parallel and do meet.
pub fn plane_through_lines(l1: &Line, l2: &Line) -> Option<AffineSubspace> {
    match intersect_lines(l1, l2) {
        LineIntersection::Point(x) => {
            AffineSubspace::new(l1.space.field(), &x, &[l1.direction().clone(), l2.direction().clone()]).ok()
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> Field {
        Field::rational()
    }

    fn v(f: Field, xs: &[i64]) -> Vector {
        xs.iter().map(|&x| f.from_i64(x)).collect()
    }

    fn line(f: Field, x0: &[i64], d: &[i64]) -> Line {
        Line::new(0, f, &v(f, x0), &v(f, d)).unwrap()
    }

    #[test]
    fn canonical_forms_collide() {
        let f = q();
        assert_eq!(line(f, &[0, 0, 0], &[2, 0, 0]), line(f, &[1, 0, 0], &[1, 0, 0]));
        let a = AffineSubspace::new(f, &v(f, &[5, 7, 0]), &[v(f, &[1, 0, 0]), v(f, &[1, 1, 0])]).unwrap();
        let b = AffineSubspace::new(f, &v(f, &[0, 0, 0]), &[v(f, &[1, 0, 0]), v(f, &[0, 1, 0])]).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            AffineSubspace::new(f, &v(f, &[0, 0]), &[v(f, &[1, 0]), v(f, &[2, 0])]),
            Err(AffineError::DependentDirections)
        );
    }

    #[test]
    fn containment() {
        let f = q();
        let z0 = AffineSubspace::new(f, &v(f, &[0, 0, 0]), &[v(f, &[1, 0, 0]), v(f, &[0, 1, 0])]).unwrap();
        assert!(z0.contains(&v(f, &[1, 2, 0])).unwrap());
        assert!(!z0.contains(&v(f, &[0, 0, 1])).unwrap());
        let s = AffineSubspace::new(f, &v(f, &[3, 1, 4]), &[v(f, &[1, 5, 9])]).unwrap();
        assert!(s.contains(&v(f, &[3, 1, 4])).unwrap());
        assert!(z0.contains(&v(f, &[0, 0])).is_err());
    }

    #[test]
    fn line_intersections() {
        let f = q();
        let x = line(f, &[0, 0, 0], &[1, 0, 0]);
        let y = line(f, &[0, 0, 0], &[0, 1, 0]);
        assert_eq!(intersect_lines(&x, &y), LineIntersection::Point(v(f, &[0, 0, 0])));
        let x2 = line(f, &[0, 1, 0], &[1, 0, 0]);
        assert_eq!(intersect_lines(&x, &x2), LineIntersection::Disjoint);
        let skew = line(f, &[0, 1, 1], &[0, 1, 0]);
        assert_eq!(intersect_lines(&x, &skew), LineIntersection::Disjoint);
        assert_eq!(intersect_lines(&x, &x), LineIntersection::Identical);
        let a = line(f, &[1, 2, 3], &[1, 1, 0]);
        let b = line(f, &[4, 0, 3], &[0, 1, 0]);
        assert_eq!(intersect_lines(&a, &b), LineIntersection::Point(v(f, &[4, 5, 3])));
    }

    #[test]
    fn line_plane_intersections() {
        let f = q();
        let z0 = AffineSubspace::new(f, &v(f, &[0, 0, 0]), &[v(f, &[1, 0, 0]), v(f, &[0, 1, 0])]).unwrap();
        let zaxis = line(f, &[0, 0, 0], &[0, 0, 1]);
        assert_eq!(
            intersect_line_plane(&zaxis, &z0),
            LinePlaneIntersection::Point(v(f, &[0, 0, 0]))
        );
        assert_eq!(
            intersect_line_plane(&line(f, &[0, 0, 0], &[1, 0, 0]), &z0),
            LinePlaneIntersection::Contained
        );
        assert_eq!(
            intersect_line_plane(&line(f, &[0, 0, 1], &[1, 0, 0]), &z0),
            LinePlaneIntersection::Disjoint
        );
        let slanted = line(f, &[1, 1, 2], &[1, 2, 1]);
        assert_eq!(
            intersect_line_plane(&slanted, &z0),
            LinePlaneIntersection::Point(v(f, &[-1, -3, 0]))
        );
    }

    #[test]
    fn ranks_and_transverse() {
        let f = Field::prime(5).unwrap();
        let axes: Vec<Line> = (0..3)
            .map(|i| {
                let mut d = vec![0; 3];
                d[i] = 1;
                line(f, &[0, 0, 0], &d)
            })
            .collect();
        assert_eq!(direction_rank(axes.iter().map(Line::space)), 3);
        let coplanar = [
            line(f, &[0, 0, 0], &[1, 0, 0]),
            line(f, &[0, 0, 0], &[1, 1, 0]),
            line(f, &[0, 0, 0], &[1, 2, 0]),
        ];
        assert_eq!(direction_rank(coplanar.iter().map(Line::space)), 2);
        let z0 = AffineSubspace::new(f, &v(f, &[0, 0, 0]), &[v(f, &[1, 0, 0]), v(f, &[0, 1, 0])]).unwrap();
        assert_eq!(direction_rank([&z0, axes[2].space()]), 3);
        assert_eq!(complete_transverse(&z0), vec![v(f, &[0, 0, 1])]);
        assert_eq!(
            complete_transverse(axes[0].space()),
            vec![v(f, &[0, 1, 0]), v(f, &[0, 0, 1])]
        );
        let full = AffineSubspace::new(f, &v(f, &[0, 0]), &[v(f, &[1, 0]), v(f, &[0, 1])]).unwrap();
        assert!(complete_transverse(&full).is_empty());
        assert_eq!(direction_rank(std::iter::empty()), 0);
    }

    #[test]
    fn subspace_intersections() {
        let f = q();
        let z0 = AffineSubspace::new(f, &v(f, &[0, 0, 0]), &[v(f, &[1, 0, 0]), v(f, &[0, 1, 0])]).unwrap();
        let x1 = AffineSubspace::new(f, &v(f, &[1, 0, 0]), &[v(f, &[0, 1, 0]), v(f, &[0, 0, 1])]).unwrap();
        let (x, dirs) = intersect_subspaces(&z0, &x1).unwrap();
        let l = AffineSubspace::new(f, &x, &dirs).unwrap();
        assert_eq!(
            l,
            AffineSubspace::new(f, &v(f, &[1, 5, 0]), &[v(f, &[0, 1, 0])]).unwrap()
        );
        let z1 = AffineSubspace::new(f, &v(f, &[0, 0, 1]), &[v(f, &[1, 0, 0]), v(f, &[0, 1, 0])]).unwrap();
        assert!(intersect_subspaces(&z0, &z1).is_none());
        let zaxis = AffineSubspace::new(f, &v(f, &[0, 0, 0]), &[v(f, &[0, 0, 1])]).unwrap();
        assert_eq!(intersect_subspaces(&z0, &zaxis), Some((v(f, &[0, 0, 0]), vec![])));
    }

    #[test]
    fn json_round_trip() {
        let f = q();
        let half = f.from_ratio(&1.into(), &2.into()).unwrap();
        let s = AffineSubspace::new(f, &[half.clone(), f.zero(), f.one()], &[vec![f.one(), half, f.zero()]]).unwrap();
        let repr = s.to_repr();
        assert_eq!(repr.dirs[0], vec!["1", "1/2", "0"]);
        assert_eq!(AffineSubspace::from_repr(f, &repr).unwrap(), s);
    }

    fn arb_line() -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
        (
            proptest::collection::vec(-5i64..5, 3),
            proptest::collection::vec(-5i64..5, 3).prop_filter("nonzero", |d| d.iter().any(|&x| x != 0)),
        )
    }

    proptest! {
        #[test]
        fn reparameterization_is_invisible((x0, d) in arb_line(), s in -4i64..4, c in 1i64..5) {
            let f = q();
            let l = line(f, &x0, &d);
            let moved: Vec<i64> = x0.iter().zip(&d).map(|(a, b)| a + s * b).collect();
            let scaled: Vec<i64> = d.iter().map(|x| -c * x).collect();
            let l2 = line(f, &moved, &scaled);
            prop_assert_eq!(&l, &l2);
            let again = Line::from_subspace(0, AffineSubspace::new(f, l.base(), &[l.direction().clone()]).unwrap()).unwrap();
            prop_assert_eq!(l, again);
        }

        #[test]
        fn intersection_is_symmetric(a in arb_line(), b in arb_line()) {
            let f = q();
            let (l1, l2) = (line(f, &a.0, &a.1), line(f, &b.0, &b.1));
            let ab = intersect_lines(&l1, &l2);
            prop_assert_eq!(&ab, &intersect_lines(&l2, &l1));
            if let LineIntersection::Point(x) = ab {
                prop_assert!(l1.contains(&x).unwrap() && l2.contains(&x).unwrap());
            }
        }

        #[test]
        fn transverse_completion_spans(dirs in proptest::collection::vec(proptest::collection::vec(-3i64..3, 4), 1..4)) {
            let f = Field::prime(7).unwrap();
            let dirs: Vec<Vector> = dirs.iter().map(|d| v(f, d)).collect();
            if let Ok(p) = AffineSubspace::new(f, &v(f, &[0, 0, 0, 0]), &dirs) {
                let t = complete_transverse(&p);
                prop_assert_eq!(t.len(), 4 - p.dim());
                let mut all = p.directions().to_vec();
                all.extend(t);
                prop_assert_eq!(rank_of(f, 4, &all), 4);
            }
        }
    }
}
