//! Reproducible builders for the standard line and plane configurations.
//! Each builder records the counts it expects and checks them against the
//! incidence routines before returning.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affine::{AffineError, AffineSubspace, Line, Point};
use crate::field::{Field, FieldError, FieldValue};
use crate::incidence::{
    find_joints, find_multijoints, kakeya_sum, IncidenceError, JointRecord, LineFamily, MultijointRecord,
};
use crate::limits::{CapExceeded, Limits};
use crate::linalg::Vector;
use crate::zeroset::Partition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("{field} is too small: {detail}")]
    FieldTooSmall { field: Field, detail: String },
    #[error("self-check failed for {kind}: expected {expected} {what}, found {found}")]
    SelfCheck {
        kind: String,
        what: &'static str,
        expected: u64,
        found: u64,
    },
    #[error(transparent)]
    Incidence(#[from] IncidenceError),
    #[error(transparent)]
    Affine(#[from] AffineError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Cap(#[from] CapExceeded),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigParams {
    pub field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub side: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub bush_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coplanar: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transverse: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Counts known in closed form for a configuration. Absent fields are not
/// checked.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedCounts {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lines: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joints: Option<u64>,
    /// Common value of `m(x)` at every joint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    /// Common value of `N(x)` (or `N′(x)`) at every joint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planes: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigDescriptor {
    pub kind: String,
    pub params: ConfigParams,
    pub expected: ExpectedCounts,
}

impl ConfigDescriptor {
    fn check(&self, what: &'static str, expected: Option<u64>, found: u64) -> Result<(), GeneratorError> {
        match expected {
            Some(e) if e != found => Err(GeneratorError::SelfCheck {
                kind: self.kind.clone(),
                what,
                expected: e,
                found,
            }),
            _ => Ok(()),
        }
    }

    fn check_uniform<I>(&self, what: &'static str, expected: Option<u64>, values: I) -> Result<(), GeneratorError>
    where
        I: IntoIterator<Item = u64>,
    {
        if let Some(e) = expected {
            for v in values {
                self.check(what, Some(e), v)?;
            }
        }
        Ok(())
    }
}

/// A line family with its descriptor and the joints found by the self-check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineConfig {
    pub descriptor: ConfigDescriptor,
    pub family: LineFamily,
    pub joints: Vec<JointRecord>,
}

impl LineConfig {
    fn build(descriptor: ConfigDescriptor, family: LineFamily, limits: &Limits) -> Result<Self, GeneratorError> {
        limits.check_lines(family.len())?;
        let joints = find_joints(&family, limits)?;
        let d = &descriptor;
        d.check("lines", d.expected.lines, family.len() as u64)?;
        d.check("joints", d.expected.joints, joints.len() as u64)?;
        d.check_uniform("lines per joint", d.expected.m, joints.iter().map(|j| j.m as u64))?;
        d.check_uniform(
            "spanning tuples per joint",
            d.expected.tuples,
            joints.iter().map(|j| j.tuples),
        )?;
        Ok(LineConfig {
            descriptor,
            family,
            joints,
        })
    }
}

fn vecf(field: Field, xs: &[i64]) -> Vector {
    xs.iter().map(|&x| field.from_i64(x)).collect()
}

fn unit(field: Field, n: usize, i: usize) -> Vector {
    (0..n)
        .map(|j| if i == j { field.one() } else { field.zero() })
        .collect()
}

/// All points of `[0, side)^dim`, last coordinate fastest.
fn lattice(side: usize, dim: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..side).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

fn lattice_fits(field: Field, side: usize) -> Result<(), GeneratorError> {
    match field.size() {
        Some(q) if (side as u64) > q => Err(GeneratorError::FieldTooSmall {
            field,
            detail: format!("lattice side {side} exceeds the field size"),
        }),
        _ => Ok(()),
    }
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn choose(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn axis_family(field: Field, n: usize, side: usize) -> Result<LineFamily, GeneratorError> {
    let mut lines = Vec::new();
    for axis in 0..n {
        for rest in lattice(side, n - 1) {
            let mut x0 = Vec::with_capacity(n);
            let mut it = rest.iter();
            for j in 0..n {
                let c = if j == axis {
                    0
                } else {
                    *it.next().expect("n − 1 coordinates")
                };
                x0.push(field.from_u64(c as u64));
            }
            lines.push(Line::new(lines.len(), field, &x0, &unit(field, n, axis))?);
        }
    }
    Ok(LineFamily::new(field, n, lines)?)
}

/// Axis-parallel lines through the lattice `[0, N)^n`, `n·N^{n−1}` of them.
pub fn axis_grid(field: Field, n: usize, side: usize, limits: &Limits) -> Result<LineConfig, GeneratorError> {
    if n < 2 || side < 1 {
        return Err(GeneratorError::Parameter("axis grid needs n ≥ 2 and N ≥ 1".into()));
    }
    lattice_fits(field, side)?;
    let per_axis = (side as u64).checked_pow(n as u32 - 1).unwrap_or(u64::MAX);
    limits.check_lines((per_axis.saturating_mul(n as u64)).min(usize::MAX as u64) as usize)?;
    let descriptor = ConfigDescriptor {
        kind: "axis-grid".into(),
        params: ConfigParams {
            field: field.to_string(),
            n: Some(n),
            side: Some(side),
            ..Default::default()
        },
        expected: ExpectedCounts {
            lines: Some(per_axis * n as u64),
            joints: Some(per_axis * side as u64),
            m: Some(n as u64),
            tuples: Some(factorial(n as u64)),
            planes: None,
        },
    };
    LineConfig::build(descriptor, axis_family(field, n, side)?, limits)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoomisWhitney {
    pub config: LineConfig,
    /// Horizontal planes `z = c`, each joint assigned to the one containing it.
    pub hint: Partition,
    /// For each plane, the ids of the family lines it contains.
    pub plane_lines: Vec<Vec<usize>>,
}

/// The three-dimensional axis grid over Q with its horizontal-plane partition.
pub fn loomis_whitney_grid(side: usize, limits: &Limits) -> Result<LoomisWhitney, GeneratorError> {
    let field = Field::rational();
    let mut config = axis_grid(field, 3, side, limits)?;
    config.descriptor.kind = "loomis-whitney".into();
    config.descriptor.expected.planes = Some(side as u64);
    let planes: Vec<AffineSubspace> = (0..side)
        .map(|c| {
            AffineSubspace::new(
                field,
                &vecf(field, &[0, 0, c as i64]),
                &[unit(field, 3, 0), unit(field, 3, 1)],
            )
        })
        .collect::<Result<_, _>>()?;
    let mut assignment = BTreeMap::new();
    for j in &config.joints {
        let c = planes
            .iter()
            .position(|p| p.contains(&j.point).unwrap_or(false))
            .expect("every lattice point has a horizontal plane");
        assignment.insert(j.point.clone(), c);
    }
    let mut plane_lines = Vec::with_capacity(side);
    for p in &planes {
        let mut ids = Vec::new();
        for l in config.family.lines() {
            if p.contains_subspace(l.space())? {
                ids.push(l.id);
            }
        }
        config
            .descriptor
            .check("lines per plane", Some(2 * side as u64), ids.len() as u64)?;
        plane_lines.push(ids);
    }
    let d = &config.descriptor;
    d.check("planes", d.expected.planes, planes.len() as u64)?;
    let mut per_plane = vec![0u64; side];
    for &c in assignment.values() {
        per_plane[c] += 1;
    }
    d.check_uniform("joints per plane", Some((side * side) as u64), per_plane)?;
    Ok(LoomisWhitney {
        config,
        hint: Partition { planes, assignment },
        plane_lines,
    })
}

/// `M` lines through `center` in distinct directions, `(1, i, 0)` when
/// coplanar and `(1, i, i²)` otherwise, optionally with the line in
/// direction `(0, 0, 1)`.
pub fn bush(
    field: Field,
    size: usize,
    center: &[FieldValue],
    coplanar: bool,
    transverse: bool,
    limits: &Limits,
) -> Result<LineConfig, GeneratorError> {
    if size < 2 {
        return Err(GeneratorError::Parameter("a bush needs M ≥ 2".into()));
    }
    if center.len() != 3 {
        return Err(GeneratorError::Parameter("bush center must be a point of F³".into()));
    }
    lattice_fits(field, size)?;
    let mut lines = Vec::with_capacity(size + 1);
    for i in 0..size {
        let i = i as i64;
        let dir = if coplanar {
            vecf(field, &[1, i, 0])
        } else {
            vecf(field, &[1, i, i * i])
        };
        lines.push(Line::new(lines.len(), field, center, &dir)?);
    }
    if transverse {
        lines.push(Line::new(lines.len(), field, center, &unit(field, 3, 2))?);
    }
    let family = LineFamily::new(field, 3, lines)?;
    let m = (size + usize::from(transverse)) as u64;
    // Any three of the moment-curve directions and (0, 0, 1) are independent.
    let tuples = match (coplanar, transverse) {
        (true, true) => 6 * choose(size as u64, 2),
        (true, false) => 0,
        (false, _) => 6 * choose(m, 3),
    };
    let is_joint = tuples > 0;
    let descriptor = ConfigDescriptor {
        kind: "bush".into(),
        params: ConfigParams {
            field: field.to_string(),
            n: Some(3),
            bush_size: Some(size),
            coplanar: Some(coplanar),
            transverse: Some(transverse),
            ..Default::default()
        },
        expected: ExpectedCounts {
            lines: Some(m),
            joints: Some(u64::from(is_joint)),
            m: is_joint.then_some(m),
            tuples: is_joint.then_some(tuples),
            planes: None,
        },
    };
    LineConfig::build(descriptor, family, limits)
}

/// Every line of the plane `F_p² × {0}` together with one vertical line
/// through each of its points.
pub fn finite_field_counterexample(p: u64, limits: &Limits) -> Result<LineConfig, GeneratorError> {
    let field = Field::prime(p)?;
    let elems = field.elements()?;
    let zero = field.zero();
    let mut lines = Vec::new();
    for s in &elems {
        for b in &elems {
            let x0 = vec![zero.clone(), b.clone(), zero.clone()];
            let dir = vec![field.one(), s.clone(), zero.clone()];
            lines.push(Line::new(lines.len(), field, &x0, &dir)?);
        }
    }
    for a in &elems {
        let x0 = vec![a.clone(), zero.clone(), zero.clone()];
        lines.push(Line::new(lines.len(), field, &x0, &unit(field, 3, 1))?);
    }
    for a in &elems {
        for b in &elems {
            let x0 = vec![a.clone(), b.clone(), zero.clone()];
            lines.push(Line::new(lines.len(), field, &x0, &unit(field, 3, 2))?);
        }
    }
    limits.check_lines(lines.len())?;
    let family = LineFamily::new(field, 3, lines)?;
    // p + 1 plane lines and one vertical through each base point.
    let descriptor = ConfigDescriptor {
        kind: "ff-counterexample".into(),
        params: ConfigParams {
            field: field.to_string(),
            n: Some(3),
            p: Some(p),
            ..Default::default()
        },
        expected: ExpectedCounts {
            lines: Some(2 * p * p + p),
            joints: Some(p * p),
            m: Some(p + 2),
            tuples: Some(6 * choose(p + 1, 2)),
            planes: None,
        },
    };
    LineConfig::build(descriptor, family, limits)
}

/// `p²(p+2)^{3/2} / (2p²+p)^{3/2}`, the exponent-3/2 Kakeya ratio of the
/// finite-field example in closed form.
pub fn counterexample_ratio(p: u64) -> f64 {
    let p = p as f64;
    p * p * (p + 2.0).powf(1.5) / (2.0 * p * p + p).powf(1.5)
}

fn random_value(field: Field, rng: &mut ChaCha8Rng) -> FieldValue {
    match field.size() {
        Some(q) => field.from_u64(rng.random_range(0..q)),
        None => field.from_i64(rng.random_range(-10..=10)),
    }
}

fn line_capacity(field: Field, n: usize) -> Option<u128> {
    let q = field.size()? as u128;
    let qn = q.checked_pow(n as u32)?;
    Some(q.checked_pow(n as u32 - 1)? * (qn - 1) / (q - 1))
}

/// `count` pairwise distinct lines with uniform coordinates (in `[−10, 10]`
/// over Q), deterministic in `seed`.
pub fn random_lines(
    field: Field,
    n: usize,
    count: usize,
    seed: u64,
    limits: &Limits,
) -> Result<LineConfig, GeneratorError> {
    if n < 2 || count < 1 {
        return Err(GeneratorError::Parameter(
            "random lines need n ≥ 2 and count ≥ 1".into(),
        ));
    }
    limits.check_lines(count)?;
    if let Some(cap) = line_capacity(field, n) {
        if count as u128 > cap {
            return Err(GeneratorError::FieldTooSmall {
                field,
                detail: format!("only {cap} lines exist in dimension {n}"),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut lines = Vec::with_capacity(count);
    while lines.len() < count {
        let x0: Point = (0..n).map(|_| random_value(field, &mut rng)).collect();
        let dir: Vector = (0..n).map(|_| random_value(field, &mut rng)).collect();
        if dir.iter().all(FieldValue::is_zero) {
            continue;
        }
        let line = Line::new(lines.len(), field, &x0, &dir)?;
        if seen.insert(line.space().clone()) {
            lines.push(line);
        }
    }
    let descriptor = ConfigDescriptor {
        kind: "random-lines".into(),
        params: ConfigParams {
            field: field.to_string(),
            n: Some(n),
            count: Some(count),
            seed: Some(seed),
            ..Default::default()
        },
        expected: ExpectedCounts {
            lines: Some(count as u64),
            ..Default::default()
        },
    };
    LineConfig::build(descriptor, LineFamily::new(field, n, lines)?, limits)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultijointConfig {
    pub descriptor: ConfigDescriptor,
    pub planes: Vec<AffineSubspace>,
    pub families: Vec<LineFamily>,
    pub multijoints: Vec<MultijointRecord>,
}

impl MultijointConfig {
    /// Largest line family.
    pub fn max_family(&self) -> usize {
        self.families.iter().map(LineFamily::len).max().unwrap_or(0)
    }

    /// `|J| / (L · |P|^{1/(n−k)})` with `L` the largest family size.
    pub fn theorem_ratio(&self) -> f64 {
        multijoint_ratio(
            self.multijoints.len(),
            self.max_family(),
            self.planes.len(),
            self.families.len(),
        )
    }
}

/// `|J| / (L · |P|^{1/(d−1)})` for `d − 1` line families.
pub fn multijoint_ratio(joints: usize, max_family: usize, planes: usize, line_families: usize) -> f64 {
    if max_family == 0 || planes == 0 || line_families == 0 {
        return 0.0;
    }
    joints as f64 / (max_family as f64 * (planes as f64).powf(1.0 / line_families as f64))
}

/// Coordinate k-planes `x_{k+1..n} = c` over `c ∈ [0, N)^{n−k}` and, for
/// each `j`, the lines parallel to `e_{k+j}` through the lattice `[0, N)^n`.
pub fn multijoint_grid(
    field: Field,
    n: usize,
    k: usize,
    side: usize,
    limits: &Limits,
) -> Result<MultijointConfig, GeneratorError> {
    if k < 2 || n <= k || side < 1 {
        return Err(GeneratorError::Parameter(
            "multijoint grid needs k ≥ 2, n > k and N ≥ 1".into(),
        ));
    }
    lattice_fits(field, side)?;
    let per_family = (side as u64).checked_pow(n as u32 - 1).unwrap_or(u64::MAX);
    limits.check_lines(per_family.min(usize::MAX as u64) as usize)?;
    let plane_dirs: Vec<Vector> = (0..k).map(|i| unit(field, n, i)).collect();
    let planes: Vec<AffineSubspace> = lattice(side, n - k)
        .into_iter()
        .map(|c| {
            let mut x0 = vec![field.zero(); k];
            x0.extend(c.iter().map(|&v| field.from_u64(v as u64)));
            AffineSubspace::new(field, &x0, &plane_dirs)
        })
        .collect::<Result<_, _>>()?;
    let mut families = Vec::with_capacity(n - k);
    for j in 0..n - k {
        let axis = k + j;
        let mut lines = Vec::new();
        for rest in lattice(side, n - 1) {
            let mut it = rest.iter();
            let x0: Point = (0..n)
                .map(|i| {
                    let c = if i == axis {
                        0
                    } else {
                        *it.next().expect("n − 1 coordinates")
                    };
                    field.from_u64(c as u64)
                })
                .collect();
            lines.push(Line::new(lines.len(), field, &x0, &unit(field, n, axis))?);
        }
        families.push(LineFamily::new(field, n, lines)?);
    }
    let multijoints = find_multijoints(&planes, &families, limits)?;
    let descriptor = ConfigDescriptor {
        kind: "multijoint-grid".into(),
        params: ConfigParams {
            field: field.to_string(),
            n: Some(n),
            k: Some(k),
            side: Some(side),
            ..Default::default()
        },
        expected: ExpectedCounts {
            lines: Some(per_family),
            joints: Some(per_family * side as u64),
            m: None,
            tuples: Some(1),
            planes: Some((side as u64).pow((n - k) as u32)),
        },
    };
    let d = &descriptor;
    d.check("planes", d.expected.planes, planes.len() as u64)?;
    d.check_uniform(
        "lines per family",
        d.expected.lines,
        families.iter().map(|f| f.len() as u64),
    )?;
    d.check("multijoints", d.expected.joints, multijoints.len() as u64)?;
    d.check_uniform(
        "spanning tuples per multijoint",
        d.expected.tuples,
        multijoints.iter().map(|j| j.tuples),
    )?;
    Ok(MultijointConfig {
        descriptor,
        planes,
        families,
        multijoints,
    })
}

/// Points and lines in a common plane, for incidence counting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarIncidenceConfig {
    pub plane: AffineSubspace,
    pub points: Vec<Point>,
    pub lines: Vec<Line>,
}

/// The `N × N` lattice in Q² with the lines `y = a x + b` for
/// `a ∈ [0, N)`, `b ∈ [0, N)` and the `N` vertical lines `x = c`.
pub fn st_grid(side: usize) -> Result<PlanarIncidenceConfig, GeneratorError> {
    if side < 1 {
        return Err(GeneratorError::Parameter("incidence grid needs N ≥ 1".into()));
    }
    let field = Field::rational();
    let plane = AffineSubspace::new(field, &vecf(field, &[0, 0]), &[unit(field, 2, 0), unit(field, 2, 1)])?;
    let points = lattice(side, 2)
        .into_iter()
        .map(|p| vecf(field, &[p[0] as i64, p[1] as i64]))
        .collect();
    let s = side as i64;
    let mut lines = Vec::new();
    for a in 0..s {
        for b in 0..s {
            lines.push(Line::new(
                lines.len(),
                field,
                &vecf(field, &[0, b]),
                &vecf(field, &[1, a]),
            )?);
        }
    }
    for c in 0..s {
        lines.push(Line::new(
            lines.len(),
            field,
            &vecf(field, &[c, 0]),
            &vecf(field, &[0, 1]),
        )?);
    }
    Ok(PlanarIncidenceConfig { plane, points, lines })
}

/// Kakeya ratio of a line configuration at exponent `s`.
pub fn config_kakeya(config: &LineConfig, s: num_rational::Rational64) -> Result<f64, GeneratorError> {
    Ok(kakeya_sum(config.joints.iter().map(|j| j.m), config.family.len(), s)?.ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::{parse_rational, st_incidences};
    use crate::linalg::rank_of;

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn axis_grid_examples() {
        let q = Field::rational();
        let c = axis_grid(q, 3, 3, &lim()).unwrap();
        assert_eq!((c.family.len(), c.joints.len()), (27, 27));
        let c = axis_grid(q, 3, 1, &lim()).unwrap();
        assert_eq!((c.family.len(), c.joints.len()), (3, 1));
        let c = axis_grid(q, 4, 2, &lim()).unwrap();
        assert_eq!((c.family.len(), c.joints.len()), (32, 16));
        assert!(matches!(
            axis_grid(Field::prime(3).unwrap(), 3, 4, &lim()),
            Err(GeneratorError::FieldTooSmall { .. })
        ));
        let small = Limits { max_lines: 10, ..lim() };
        assert!(matches!(axis_grid(q, 3, 3, &small), Err(GeneratorError::Cap(_))));
    }

    #[test]
    fn loomis_whitney_examples() {
        let lw = loomis_whitney_grid(2, &lim()).unwrap();
        assert_eq!(lw.hint.planes.len(), 2);
        assert!(lw.plane_lines.iter().all(|ids| ids.len() == 4));
        let lw = loomis_whitney_grid(1, &lim()).unwrap();
        assert_eq!(
            (lw.hint.planes.len(), lw.config.joints.len(), lw.plane_lines[0].len()),
            (1, 1, 2)
        );
    }

    #[test]
    fn bush_examples() {
        let q = Field::rational();
        let o = vecf(q, &[0, 0, 0]);
        let b = bush(q, 5, &o, true, true, &lim()).unwrap();
        assert_eq!((b.joints.len(), b.joints[0].m, b.joints[0].tuples), (1, 6, 60));
        assert!(bush(q, 5, &o, true, false, &lim()).unwrap().joints.is_empty());
        let b = bush(q, 2, &o, false, true, &lim()).unwrap();
        assert_eq!((b.joints[0].m, b.joints[0].tuples), (3, 6));
        let b = bush(q, 10, &vecf(q, &[1, 2, 3]), false, false, &lim()).unwrap();
        assert_eq!((b.joints[0].m, b.joints[0].tuples), (10, 720));
    }

    /// Independent joint count: scan every point of `F_q³`.
    fn scan_joints(field: Field, family: &LineFamily) -> Vec<(Point, usize)> {
        let elems = field.elements().unwrap();
        let mut out = Vec::new();
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    let x = vec![a.clone(), b.clone(), c.clone()];
                    let through: Vec<Vector> = family
                        .lines()
                        .iter()
                        .filter(|l| l.contains(&x).unwrap())
                        .map(|l| l.direction().clone())
                        .collect();
                    if rank_of(field, 3, &through) == 3 {
                        out.push((x, through.len()));
                    }
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn counterexample_examples() {
        for p in [3, 5] {
            let c = finite_field_counterexample(p, &lim()).unwrap();
            assert_eq!(c.family.len() as u64, 2 * p * p + p);
            let oracle = scan_joints(c.family.field(), &c.family);
            let found: Vec<(Point, usize)> = c.joints.iter().map(|j| (j.point.clone(), j.m)).collect();
            assert_eq!(found, oracle);
            assert!(oracle.iter().all(|(_, m)| *m as u64 == p + 2));
        }
        assert!(finite_field_counterexample(9, &lim()).is_err());
        let s = parse_rational("3/2").unwrap();
        let ratios: Vec<f64> = [3, 5, 7, 11]
            .iter()
            .map(|&p| config_kakeya(&finite_field_counterexample(p, &lim()).unwrap(), s).unwrap())
            .collect();
        for (w, &p) in ratios.iter().zip(&[3u64, 5, 7, 11]) {
            assert!((w - counterexample_ratio(p)).abs() < 1e-9);
        }
        assert!(ratios.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn random_lines_are_deterministic() {
        let f = Field::prime(101).unwrap();
        let a = random_lines(f, 3, 20, 7, &lim()).unwrap();
        let b = random_lines(f, 3, 20, 7, &lim()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.family, random_lines(f, 3, 20, 8, &lim()).unwrap().family);
        let one = random_lines(Field::rational(), 3, 1, 0, &lim()).unwrap();
        assert!(one.joints.is_empty());
        let f2 = Field::prime(2).unwrap();
        assert!(random_lines(f2, 2, 6, 0, &lim()).is_ok());
        assert!(matches!(
            random_lines(f2, 2, 7, 0, &lim()),
            Err(GeneratorError::FieldTooSmall { .. })
        ));
    }

    #[test]
    fn random_lines_match_scan() {
        let f = Field::prime(5).unwrap();
        for seed in 0..4 {
            let c = random_lines(f, 3, 30, seed, &lim()).unwrap();
            let found: Vec<(Point, usize)> = c.joints.iter().map(|j| (j.point.clone(), j.m)).collect();
            assert_eq!(found, scan_joints(f, &c.family));
        }
    }

    #[test]
    fn multijoint_grid_examples() {
        let q = Field::rational();
        let g = multijoint_grid(q, 3, 2, 2, &lim()).unwrap();
        assert_eq!((g.planes.len(), g.families[0].len(), g.multijoints.len()), (2, 4, 8));
        let g = multijoint_grid(q, 3, 2, 1, &lim()).unwrap();
        assert_eq!((g.planes.len(), g.families[0].len(), g.multijoints.len()), (1, 1, 1));
        let g = multijoint_grid(Field::prime(5).unwrap(), 4, 2, 2, &lim()).unwrap();
        assert_eq!(g.multijoints.len(), 16);
        assert!((g.theorem_ratio() - 1.0).abs() < 1e-12);
        assert!(multijoint_grid(q, 2, 2, 2, &lim()).is_err());
    }

    #[test]
    fn st_grid_counts() {
        let g = st_grid(4).unwrap();
        let r = st_incidences(&g.plane, &g.points, &g.lines).unwrap();
        assert_eq!((r.points, r.lines), (16, 20));
        // Each point (x, y) lies on one vertical and on y = a x + b for every
        // a with 0 ≤ y − a x < 4.
        let mut expected = 0;
        for x in 0..4i64 {
            for y in 0..4i64 {
                expected += 1 + (0..4).filter(|a| (0..4).contains(&(y - a * x))).count();
            }
        }
        assert_eq!(r.incidences, expected);
    }

    #[test]
    fn descriptor_json() {
        let c = axis_grid(Field::rational(), 3, 2, &lim()).unwrap();
        let json = serde_json::to_value(&c.descriptor).unwrap();
        assert_eq!(json["params"]["N"], 2);
        assert_eq!(json["expected"]["joints"], 8);
        let back: ConfigDescriptor = serde_json::from_value(json).unwrap();
        assert_eq!(back, c.descriptor);
    }
}
