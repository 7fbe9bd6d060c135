//! Parameter sweeps: one CSV row per value.

use std::path::Path;

use joints_core::incidence::{
    classify_levels, dyadic_levels, find_joints, find_multijoints, kakeya_sum, st_incidences,
};
use joints_core::Limits;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::analysis::{Constants, Parsed};
use crate::document::{build, Built, GeneratorSpec};
use crate::error::{CliError, CliResult, EXIT_ASSERTION, EXIT_OK};
use crate::provenance::Provenance;
use crate::report::write_output;

pub const HEADER: [&str; 15] = [
    "kind",
    "param",
    "value",
    "status",
    "lines",
    "joints",
    "planes",
    "multijoints",
    "kakeya_3_2",
    "kakeya_2_minus_eps",
    "theorem_ratio",
    "incidences",
    "st_ratio",
    "levels",
    "detail",
];

/// Values taken by the swept parameter: an explicit list or an inclusive
/// range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub param: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<u64>>,
}

impl SweepRange {
    pub fn values(&self) -> CliResult<Vec<u64>> {
        let mut v = match (&self.values, self.from, self.to) {
            (Some(v), None, None) => v.clone(),
            (None, Some(a), Some(b)) => (a..=b).collect(),
            _ => {
                return Err(CliError::Usage(
                    "a sweep needs either `values` or both `from` and `to`".into(),
                ))
            }
        };
        v.sort_unstable();
        v.dedup();
        Ok(v)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Row {
    pub kind: String,
    pub param: String,
    pub value: u64,
    pub status: String,
    pub lines: Option<usize>,
    pub joints: Option<usize>,
    pub planes: Option<usize>,
    pub multijoints: Option<usize>,
    pub kakeya_3_2: Option<f64>,
    pub kakeya_2_minus_eps: Option<f64>,
    pub theorem_ratio: Option<f64>,
    pub incidences: Option<usize>,
    pub st_ratio: Option<f64>,
    /// `k:count:class` per dyadic level, `;`-separated.
    pub levels: String,
    pub detail: String,
}

/// Everything that determines a sweep's output.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPlan {
    pub generator: GeneratorSpec,
    pub range: SweepRange,
    pub constants: Constants,
}

fn measure(built: &Built, constants: &Parsed, limits: &Limits, row: &mut Row) -> CliResult<()> {
    let runtime = CliError::runtime;
    match built {
        Built::Lines { config, .. } => {
            let family = &config.family;
            let l = family.len();
            let joints = find_joints(family, limits).map_err(runtime)?;
            let ms = || joints.iter().map(|j| j.m);
            let two_minus_eps = Rational64::from_integer(2) - constants.levels.eps;
            row.lines = Some(l);
            row.joints = Some(joints.len());
            row.kakeya_3_2 = Some(kakeya_sum(ms(), l, Rational64::new(3, 2)).map_err(runtime)?.ratio);
            row.kakeya_2_minus_eps = Some(kakeya_sum(ms(), l, two_minus_eps).map_err(runtime)?.ratio);
            let classes = classify_levels(&dyadic_levels(&joints), l, &constants.levels).map_err(CliError::usage)?;
            row.levels = classes
                .iter()
                .map(|(k, c)| {
                    format!(
                        "{k}:{}:{}/{}",
                        c.count,
                        if c.good { "good" } else { "bad" },
                        if c.large { "large" } else { "small" }
                    )
                })
                .collect::<Vec<_>>()
                .join(";");
        }
        Built::Multi(m) => {
            let records = find_multijoints(&m.planes, &m.families, limits).map_err(runtime)?;
            row.lines = Some(m.max_family());
            row.planes = Some(m.planes.len());
            row.multijoints = Some(records.len());
            row.theorem_ratio = Some(joints_core::generators::multijoint_ratio(
                records.len(),
                m.max_family(),
                m.planes.len(),
                m.families.len(),
            ));
        }
        Built::Planar { config, .. } => {
            let r = st_incidences(&config.plane, &config.points, &config.lines).map_err(runtime)?;
            row.lines = Some(r.lines);
            row.incidences = Some(r.incidences);
            row.st_ratio = Some(r.ratio);
        }
    }
    Ok(())
}

/// Computes one row. Cap overruns give a `skipped` row, invalid parameter
/// values an `invalid` row and failed generator self-checks a `failed` row.
pub fn row(plan: &SweepPlan, constants: &Parsed, limits: &Limits, value: u64) -> CliResult<Row> {
    let mut spec = plan.generator.clone();
    spec.set(&plan.range.param, value)?;
    let mut row = Row {
        kind: spec.kind.name().into(),
        param: plan.range.param.clone(),
        value,
        status: "ok".into(),
        ..Row::default()
    };
    let result = build(&spec, limits).and_then(|b| measure(&b, constants, limits, &mut row));
    if let Err(e) = result {
        let status = match e {
            CliError::Runtime(_) => "skipped",
            CliError::Usage(_) => "invalid",
            CliError::Assertion(_) => "failed",
        };
        row = Row {
            kind: row.kind,
            param: row.param,
            value,
            status: status.into(),
            detail: e.to_string(),
            ..Row::default()
        };
    }
    Ok(row)
}

pub fn run(plan: &SweepPlan, limits: &Limits, out: Option<&Path>) -> CliResult<i32> {
    let constants = plan.constants.parse()?;
    plan.generator.field()?;
    let values = plan.range.values()?;
    let provenance = Provenance::for_config(plan);
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(HEADER).map_err(CliError::runtime)?;
    let mut failed = false;
    for v in values {
        let r = row(plan, &constants, limits, v)?;
        failed |= r.status == "failed";
        w.serialize(&r).map_err(CliError::runtime)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(CliError::runtime)?).map_err(CliError::runtime)?;
    write_output(out, &format!("{}\n{body}", provenance.csv_comment()))?;
    Ok(if failed { EXIT_ASSERTION } else { EXIT_OK })
}
