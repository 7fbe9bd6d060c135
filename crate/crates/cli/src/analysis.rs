//! Analyses over loaded configurations. Each returns a JSON section and the
//! exact assertions it checked.

use std::collections::BTreeMap;
use std::path::Path;

use joints_core::affine::intersect_subspaces;
use joints_core::generators::multijoint_ratio;
use joints_core::incidence::{
    classify_levels, dyadic_levels, find_joints, find_multijoints, kakeya_sum, parse_rational, st_incidences,
    LevelParams,
};
use joints_core::mpoly::parse_poly;
use joints_core::vanishing::{
    min_degree_annihilator, multijoint_dichotomy, multijoint_spec, verify_vanishing, SpecRepr,
};
use joints_core::zeroset::{
    classify_line, classify_point, line_census, nearly_planar_verify, per_plane_kakeya_report, planar_structure_search,
    planar_structure_verify, FlatWitness,
};
use joints_core::{FactoredVariety, Field, JointRecord, Limits, Line, MultijointRecord};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::document::{point_strings, LineRepr, Loaded};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Assertion {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn equal(name: &str, expected: u64, found: u64) -> Self {
        Assertion::new(name, expected == found, format!("expected {expected}, found {found}"))
    }
}

fn default_kakeya() -> Vec<String> {
    vec!["3/2".into()]
}

/// Numeric constants of an experiment, as given by the user (fractions as
/// strings such as `"1/2"`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Constants {
    pub c: String,
    #[serde(rename = "C")]
    pub big_c: String,
    pub eps: String,
    pub c1: String,
    pub c2: String,
    /// Transverse order budget `A`.
    pub budget: u32,
    /// Vanishing order imposed at each multijoint.
    pub order: u32,
    /// Hyperplanes of the chosen plane constrained per multijoint.
    pub per_joint: usize,
    pub d_max: u32,
    #[serde(default = "default_kakeya")]
    pub kakeya: Vec<String>,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            c: "1".into(),
            big_c: "10".into(),
            eps: "1/4".into(),
            c1: "1/2".into(),
            c2: "1/2".into(),
            budget: 1,
            order: 2,
            per_joint: 1,
            d_max: 16,
            kakeya: default_kakeya(),
        }
    }
}

/// Constants parsed and range-checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub levels: LevelParams,
    pub c1: Rational64,
    pub c2: Rational64,
    pub budget: u32,
    pub order: u32,
    pub per_joint: usize,
    pub d_max: u32,
    pub kakeya: Vec<Rational64>,
}

fn fraction(name: &str, s: &str) -> CliResult<Rational64> {
    parse_rational(s).map_err(|e| CliError::Usage(format!("{name}: {e}")))
}

impl Constants {
    pub fn parse(&self) -> CliResult<Parsed> {
        let zero = Rational64::from_integer(0);
        let one = Rational64::from_integer(1);
        let half = Rational64::new(1, 2);
        let c = fraction("c", &self.c)?;
        let big_c = fraction("C", &self.big_c)?;
        let eps = fraction("eps", &self.eps)?;
        let c1 = fraction("c1", &self.c1)?;
        let c2 = fraction("c2", &self.c2)?;
        if c <= zero || big_c <= zero {
            return Err(CliError::Usage("c and C must be positive".into()));
        }
        if eps <= zero || eps >= half {
            return Err(CliError::Usage("eps must lie in (0, 1/2)".into()));
        }
        for (name, v) in [("c1", c1), ("c2", c2)] {
            if v <= zero || v > one {
                return Err(CliError::Usage(format!("{name} must lie in (0, 1]")));
            }
        }
        let kakeya = self
            .kakeya
            .iter()
            .map(|s| {
                let r = fraction("kakeya exponent", s)?;
                if r <= zero {
                    return Err(CliError::Usage(format!("kakeya exponent {s} must be positive")));
                }
                Ok(r)
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(Parsed {
            levels: LevelParams { c, big_c, eps },
            c1,
            c2,
            budget: self.budget,
            order: self.order,
            per_joint: self.per_joint,
            d_max: self.d_max,
            kakeya,
        })
    }
}

/// One section of a report.
#[derive(Debug, Clone)]
pub struct Section {
    pub name: &'static str,
    pub value: Value,
    pub assertions: Vec<Assertion>,
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Debug, Serialize)]
struct JointOut {
    point: Vec<String>,
    m: usize,
    tuples: u64,
    lines: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct MultijointOut {
    point: Vec<String>,
    planes: Vec<usize>,
    lines: Vec<Vec<usize>>,
    tuples: u64,
}

/// Runs analyses on one loaded configuration, caching the joint list.
pub struct Analyzer<'a> {
    pub loaded: &'a Loaded,
    pub limits: Limits,
    pub constants: Parsed,
    joints: Option<Vec<JointRecord>>,
    multijoints: Option<Vec<MultijointRecord>>,
}

impl<'a> Analyzer<'a> {
    pub fn new(loaded: &'a Loaded, limits: Limits, constants: Parsed) -> Self {
        Analyzer {
            loaded,
            limits,
            constants,
            joints: None,
            multijoints: None,
        }
    }

    pub fn joint_records(&mut self) -> CliResult<&[JointRecord]> {
        if self.joints.is_none() {
            let family = self.loaded.require_family()?;
            self.joints = Some(find_joints(family, &self.limits).map_err(runtime)?);
        }
        Ok(self.joints.as_deref().expect("just computed"))
    }

    pub fn multijoint_records(&mut self) -> CliResult<&[MultijointRecord]> {
        if self.multijoints.is_none() {
            if self.loaded.families.is_empty() {
                return Err(CliError::Usage(format!(
                    "{} configuration has no plane and line families",
                    self.loaded.descriptor.kind
                )));
            }
            self.multijoints =
                Some(find_multijoints(&self.loaded.planes, &self.loaded.families, &self.limits).map_err(runtime)?);
        }
        Ok(self.multijoints.as_deref().expect("just computed"))
    }

    fn line_count(&self) -> CliResult<usize> {
        Ok(self.loaded.require_family()?.len())
    }

    pub fn joints(&mut self) -> CliResult<Section> {
        let lines = self.line_count()?;
        let expected = self.loaded.descriptor.expected.clone();
        let joints = self.joint_records()?;
        let mut assertions = Vec::new();
        if let Some(e) = expected.lines {
            assertions.push(Assertion::equal("line count", e, lines as u64));
        }
        if let Some(e) = expected.joints {
            assertions.push(Assertion::equal("joint count", e, joints.len() as u64));
        }
        if let Some(e) = expected.m {
            let bad = joints.iter().filter(|j| j.m as u64 != e).count();
            assertions.push(Assertion::new(
                "lines per joint",
                bad == 0,
                format!("{bad} joints with m ≠ {e}"),
            ));
        }
        if let Some(e) = expected.tuples {
            let bad = joints.iter().filter(|j| j.tuples != e).count();
            assertions.push(Assertion::new(
                "spanning tuples per joint",
                bad == 0,
                format!("{bad} joints with N ≠ {e}"),
            ));
        }
        let records: Vec<JointOut> = joints
            .iter()
            .map(|j| JointOut {
                point: point_strings(&j.point),
                m: j.m,
                tuples: j.tuples,
                lines: j.incident_lines.clone(),
            })
            .collect();
        Ok(Section {
            name: "joints",
            value: json!({ "lines": lines, "count": joints.len(), "records": records }),
            assertions,
        })
    }

    pub fn kakeya(&mut self) -> CliResult<Section> {
        let lines = self.line_count()?;
        let exps = self.constants.kakeya.clone();
        let joints = self.joint_records()?;
        let reports = exps
            .into_iter()
            .map(|s| kakeya_sum(joints.iter().map(|j| j.m), lines, s).map_err(CliError::usage))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(Section {
            name: "kakeya",
            value: serde_json::to_value(reports)?,
            assertions: Vec::new(),
        })
    }

    pub fn levels(&mut self) -> CliResult<Section> {
        let lines = self.line_count()?;
        let params = self.constants.levels;
        let joints = self.joint_records()?;
        let table = dyadic_levels(joints);
        let classes = classify_levels(&table, lines, &params).map_err(CliError::usage)?;
        Ok(Section {
            name: "levels",
            value: json!({
                "c": params.c.to_string(),
                "C": params.big_c.to_string(),
                "eps": params.eps.to_string(),
                "levels": classes,
            }),
            assertions: Vec::new(),
        })
    }

    pub fn multijoints(&mut self) -> CliResult<Section> {
        let expected = self.loaded.descriptor.expected.clone();
        let planes = self.loaded.planes.len();
        let families: Vec<usize> = self.loaded.families.iter().map(|f| f.len()).collect();
        let records = self.multijoint_records()?;
        let max_family = families.iter().copied().max().unwrap_or(0);
        let ratio = multijoint_ratio(records.len(), max_family, planes, families.len());
        let mut assertions = Vec::new();
        if let Some(e) = expected.joints {
            assertions.push(Assertion::equal("multijoint count", e, records.len() as u64));
        }
        if let Some(e) = expected.planes {
            assertions.push(Assertion::equal("plane count", e, planes as u64));
        }
        if let Some(e) = expected.tuples {
            let bad = records.iter().filter(|j| j.tuples != e).count();
            assertions.push(Assertion::new(
                "spanning tuples per multijoint",
                bad == 0,
                format!("{bad} multijoints with N′ ≠ {e}"),
            ));
        }
        let out: Vec<MultijointOut> = records
            .iter()
            .map(|r| MultijointOut {
                point: point_strings(&r.point),
                planes: r.planes.clone(),
                lines: r.lines.clone(),
                tuples: r.tuples,
            })
            .collect();
        Ok(Section {
            name: "multijoints",
            value: json!({
                "planes": planes,
                "family_sizes": families,
                "count": out.len(),
                "theorem_ratio": ratio,
                "records": out,
            }),
            assertions,
        })
    }

    pub fn structure_verify(&mut self) -> CliResult<Section> {
        let c1 = self.constants.c1;
        let partition = self
            .loaded
            .partition
            .clone()
            .ok_or_else(|| CliError::Usage("configuration carries no partition to verify".into()))?;
        let family = self.loaded.require_family()?.clone();
        let joints = self.joint_records()?.to_vec();
        let cert = planar_structure_verify(&joints, &family, &partition, c1).map_err(CliError::usage)?;
        let per_plane = per_plane_kakeya_report(&cert, &joints, family.len());
        let passed = cert.accepted;
        Ok(Section {
            name: "structure_verify",
            value: json!({ "certificate": cert, "per_plane": per_plane }),
            assertions: vec![Assertion::new(
                "planar structure accepted",
                passed,
                format!("c1 = {c1}"),
            )],
        })
    }

    pub fn nearly_planar(&mut self, subsets: Option<&Path>) -> CliResult<Section> {
        let (c1, c2) = (self.constants.c1, self.constants.c2);
        let partition = self
            .loaded
            .partition
            .clone()
            .ok_or_else(|| CliError::Usage("configuration carries no partition to verify".into()))?;
        let family = self.loaded.require_family()?.clone();
        let joints = self.joint_records()?.to_vec();
        let subsets: BTreeMap<usize, Vec<usize>> = match subsets {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                let raw: BTreeMap<String, Vec<usize>> = serde_json::from_str(&text)?;
                raw.into_iter()
                    .map(|(k, v)| {
                        k.parse()
                            .map(|k| (k, v))
                            .map_err(|_| CliError::Usage(format!("level key {k} is not an integer")))
                    })
                    .collect::<CliResult<_>>()?
            }
            None => dyadic_levels(&joints),
        };
        let verdict = nearly_planar_verify(&joints, &family, &subsets, &partition, c1, c2).map_err(CliError::usage)?;
        let passed = verdict.accepted;
        Ok(Section {
            name: "nearly_planar",
            value: serde_json::to_value(&verdict)?,
            assertions: vec![Assertion::new(
                "nearly planar structure accepted",
                passed,
                format!("c1 = {c1}, c2 = {c2}"),
            )],
        })
    }

    pub fn structure_search(&mut self) -> CliResult<Section> {
        let c1 = self.constants.c1;
        let family = self.loaded.require_family()?.clone();
        let joints = self.joint_records()?.to_vec();
        let outcome = planar_structure_search(&joints, &family, c1).map_err(CliError::usage)?;
        Ok(Section {
            name: "structure_search",
            value: serde_json::to_value(&outcome)?,
            assertions: Vec::new(),
        })
    }

    pub fn st_report(&mut self) -> CliResult<Section> {
        let plane = self
            .loaded
            .planes
            .first()
            .ok_or_else(|| CliError::Usage("incidence report needs a plane".into()))?;
        let family = self.loaded.require_family()?;
        let report = st_incidences(plane, &self.loaded.points, family.lines()).map_err(CliError::usage)?;
        Ok(Section {
            name: "st_report",
            value: serde_json::to_value(&report)?,
            assertions: Vec::new(),
        })
    }

    /// Annihilator for the multijoints of the configuration and the type
    /// classification of each multijoint.
    pub fn dichotomy(&mut self) -> CliResult<Section> {
        let c = self.constants.clone();
        let limits = self.limits;
        let field = self.loaded.field;
        let records = self.multijoint_records()?.to_vec();
        let (planes, families) = (&self.loaded.planes, &self.loaded.families);
        let spec = multijoint_spec(field, planes, families, &records, c.order, c.budget, c.per_joint)
            .map_err(CliError::usage)?;
        let (degree, p) = min_degree_annihilator(&spec, c.d_max, &limits).map_err(runtime)?;
        let check = verify_vanishing(&p, &spec).map_err(runtime)?;
        let report = multijoint_dichotomy(&p, planes, families, &records, c.budget).map_err(runtime)?;
        let assertions = vec![
            Assertion::new(
                "annihilator satisfies its conditions",
                check.ok(),
                format!("{} violations", check.violations.len()),
            ),
            Assertion::new(
                "every multijoint is type 1 or exceptional",
                report.unclassified == 0,
                format!("{} unclassified", report.unclassified),
            ),
            Assertion::new(
                "root counts on lines within degree",
                report.lines.iter().all(|l| l.holds),
                format!("{} lines checked", report.lines.len()),
            ),
        ];
        Ok(Section {
            name: "dichotomy",
            value: json!({
                "constraints": spec.constraints().len(),
                "degree": degree,
                "polynomial": p.to_string(),
                "verification": check,
                "classification": report,
            }),
            assertions,
        })
    }
}

/// Annihilator for a vanishing spec read from JSON.
pub fn vanish_spec(path: &Path, d_max: u32, limits: &Limits) -> CliResult<Section> {
    let text = std::fs::read_to_string(path)?;
    let repr: SpecRepr = serde_json::from_str(&text)?;
    let spec = repr.to_spec().map_err(CliError::usage)?;
    let (degree, p) = min_degree_annihilator(&spec, d_max, limits).map_err(runtime)?;
    let check = verify_vanishing(&p, &spec).map_err(runtime)?;
    let ok = check.ok();
    Ok(Section {
        name: "annihilator",
        value: json!({
            "field": spec.field().to_string(),
            "n": spec.nvars(),
            "degree": degree,
            "polynomial": p.to_string(),
            "verification": check,
        }),
        assertions: vec![Assertion::new(
            "annihilator satisfies its conditions",
            ok,
            format!("degree {degree}"),
        )],
    })
}

fn default_multiplicity() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorRepr {
    pub poly: String,
    #[serde(default = "default_multiplicity")]
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessRepr {
    pub point: Vec<String>,
    /// Ids of lines from `lines` through the point.
    pub lines: Vec<usize>,
}

/// Input of `census`: a factored surface in three variables, candidate
/// lines (pairwise intersections of plane factors when absent) and points
/// with lines through them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarietyDocument {
    pub field: String,
    pub factors: Vec<FactorRepr>,
    #[serde(default)]
    pub lines: Option<Vec<LineRepr>>,
    #[serde(default)]
    pub witnesses: Vec<WitnessRepr>,
}

#[derive(Debug, Serialize)]
struct ClassOut<T: Serialize> {
    id: T,
    class: String,
}

pub fn census(path: &Path) -> CliResult<Section> {
    let text = std::fs::read_to_string(path)?;
    let doc: VarietyDocument = serde_json::from_str(&text)?;
    let field: Field = doc.field.parse().map_err(CliError::usage)?;
    let factors = doc
        .factors
        .iter()
        .map(|f| Ok((parse_poly(field, 3, &f.poly).map_err(CliError::usage)?, f.multiplicity)))
        .collect::<CliResult<Vec<_>>>()?;
    let v = FactoredVariety::new(factors).map_err(CliError::usage)?;
    let lines: Vec<Line> = match &doc.lines {
        Some(ls) => ls
            .iter()
            .map(|l| {
                let s = joints_core::AffineSubspace::from_repr(field, &l.space).map_err(CliError::usage)?;
                Line::from_subspace(l.id, s).map_err(CliError::usage)
            })
            .collect::<CliResult<_>>()?,
        None => {
            let planes = v.plane_factors();
            let mut seen = std::collections::BTreeSet::new();
            let mut out = Vec::new();
            for (i, a) in planes.iter().enumerate() {
                for b in &planes[i + 1..] {
                    if let Some((x0, dirs)) = intersect_subspaces(a, b) {
                        if dirs.len() == 1 {
                            let l = Line::new(out.len(), field, &x0, &dirs[0]).map_err(runtime)?;
                            if seen.insert(l.space().clone()) {
                                out.push(l);
                            }
                        }
                    }
                }
            }
            out
        }
    };
    let by_id: BTreeMap<usize, &Line> = lines.iter().map(|l| (l.id, l)).collect();
    let mut witnesses = Vec::new();
    for w in &doc.witnesses {
        let point = w
            .point
            .iter()
            .map(|s| field.parse_value(s).map_err(CliError::usage))
            .collect::<CliResult<Vec<_>>>()?;
        let ls = w
            .lines
            .iter()
            .map(|id| {
                by_id
                    .get(id)
                    .map(|l| (*l).clone())
                    .ok_or_else(|| CliError::Usage(format!("witness refers to unknown line {id}")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        witnesses.push(FlatWitness { point, lines: ls });
    }
    let mut point_classes = Vec::new();
    for w in &witnesses {
        let c = classify_point(&v, &w.point, &w.lines).map_err(CliError::usage)?;
        point_classes.push(ClassOut {
            id: point_strings(&w.point),
            class: format!("{c:?}"),
        });
    }
    let mut candidates = Vec::new();
    let mut line_classes = Vec::new();
    for l in &lines {
        let mine: Vec<FlatWitness> = witnesses
            .iter()
            .filter(|w| l.contains(&w.point).unwrap_or(false))
            .cloned()
            .collect();
        let c = classify_line(&v, l, &mine).map_err(CliError::usage)?;
        line_classes.push(ClassOut {
            id: l.id,
            class: format!("{c:?}"),
        });
        candidates.push((l.clone(), mine));
    }
    let report = line_census(&v, &candidates).map_err(CliError::usage)?;
    let assertions = vec![
        Assertion::new(
            "critical lines within d²",
            report.critical_ok,
            format!("{} ≤ {}", report.critical, report.critical_bound),
        ),
        Assertion::new(
            "flat lines outside plane factors within 3d²−4d",
            report.flat_ok,
            format!("{} ≤ {}", report.flat_not_in_plane, report.flat_bound),
        ),
    ];
    Ok(Section {
        name: "census",
        value: json!({
            "degree": v.degree(),
            "square_free": v.square_free().to_string(),
            "census": report,
            "lines": line_classes,
            "points": point_classes,
        }),
        assertions,
    })
}
