//! Configuration documents: the JSON written by `generate` and read by the
//! analyses.

use std::collections::BTreeMap;

use clap::ValueEnum;
use joints_core::generators::{
    self, ConfigDescriptor, ConfigParams, ExpectedCounts, GeneratorError, LineConfig, MultijointConfig,
};
use joints_core::{AffineSubspace, Field, Limits, Line, LineFamily, Partition, Point, SubspaceRepr};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::provenance::Provenance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    AxisGrid,
    LoomisWhitney,
    Bush,
    FfCounterexample,
    RandomLines,
    MultijointGrid,
    StGrid,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::AxisGrid => "axis-grid",
            Kind::LoomisWhitney => "loomis-whitney",
            Kind::Bush => "bush",
            Kind::FfCounterexample => "ff-counterexample",
            Kind::RandomLines => "random-lines",
            Kind::MultijointGrid => "multijoint-grid",
            Kind::StGrid => "st-grid",
        }
    }
}

fn default_field() -> String {
    "Q".into()
}

/// Generator kind and parameters. Unset parameters take the defaults listed
/// in the README.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: Kind,
    #[serde(default = "default_field")]
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

impl GeneratorSpec {
    pub fn new(kind: Kind) -> Self {
        GeneratorSpec {
            kind,
            field: default_field(),
            n: None,
            k: None,
            side: None,
            p: None,
            bush_size: None,
            coplanar: None,
            transverse: None,
            count: None,
            seed: None,
        }
    }

    /// Sets the parameter called `name` (as spelled on the command line).
    pub fn set(&mut self, name: &str, value: u64) -> CliResult<()> {
        let v = value as usize;
        match name {
            "n" => self.n = Some(v),
            "k" => self.k = Some(v),
            "N" => self.side = Some(v),
            "p" => self.p = Some(value),
            "M" => self.bush_size = Some(v),
            "count" => self.count = Some(v),
            "seed" => self.seed = Some(value),
            _ => return Err(CliError::Usage(format!("unknown sweep parameter {name}"))),
        }
        Ok(())
    }

    pub fn field(&self) -> CliResult<Field> {
        self.field.parse().map_err(CliError::usage)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineRepr {
    pub id: usize,
    #[serde(flatten)]
    pub space: SubspaceRepr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentRepr {
    pub point: Vec<String>,
    pub plane: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionRepr {
    pub planes: Vec<SubspaceRepr>,
    pub assignment: Vec<AssignmentRepr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub descriptor: ConfigDescriptor,
    pub field: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lines: Vec<LineRepr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub planes: Vec<SubspaceRepr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<Vec<LineRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionRepr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<String>>,
}

pub fn point_strings(x: &[joints_core::FieldValue]) -> Vec<String> {
    x.iter().map(ToString::to_string).collect()
}

fn line_repr(l: &Line) -> LineRepr {
    LineRepr {
        id: l.id,
        space: l.space().to_repr(),
    }
}

fn parse_point(field: Field, x: &[String]) -> CliResult<Point> {
    x.iter()
        .map(|s| field.parse_value(s).map_err(CliError::usage))
        .collect()
}

fn parse_family(field: Field, n: usize, lines: &[LineRepr]) -> CliResult<LineFamily> {
    let lines = lines
        .iter()
        .map(|l| {
            let space = AffineSubspace::from_repr(field, &l.space).map_err(CliError::usage)?;
            Line::from_subspace(l.id, space).map_err(CliError::usage)
        })
        .collect::<CliResult<Vec<_>>>()?;
    LineFamily::new(field, n, lines).map_err(CliError::usage)
}

/// A configuration document with every geometric object parsed.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub descriptor: ConfigDescriptor,
    pub field: Field,
    pub n: usize,
    pub family: Option<LineFamily>,
    pub planes: Vec<AffineSubspace>,
    pub families: Vec<LineFamily>,
    pub partition: Option<Partition>,
    pub points: Vec<Point>,
}

impl ConfigDocument {
    pub fn load(&self) -> CliResult<Loaded> {
        let field: Field = self.field.parse().map_err(CliError::usage)?;
        let n = self.n;
        let family = if self.lines.is_empty() {
            None
        } else {
            Some(parse_family(field, n, &self.lines)?)
        };
        let planes = self
            .planes
            .iter()
            .map(|p| AffineSubspace::from_repr(field, p).map_err(CliError::usage))
            .collect::<CliResult<Vec<_>>>()?;
        let families = self
            .families
            .iter()
            .map(|f| parse_family(field, n, f))
            .collect::<CliResult<Vec<_>>>()?;
        let partition = match &self.partition {
            None => None,
            Some(p) => {
                let planes = p
                    .planes
                    .iter()
                    .map(|s| AffineSubspace::from_repr(field, s).map_err(CliError::usage))
                    .collect::<CliResult<Vec<_>>>()?;
                let mut assignment = BTreeMap::new();
                for a in &p.assignment {
                    if a.plane >= planes.len() {
                        return Err(CliError::Usage(format!(
                            "partition refers to missing plane {}",
                            a.plane
                        )));
                    }
                    assignment.insert(parse_point(field, &a.point)?, a.plane);
                }
                Some(Partition { planes, assignment })
            }
        };
        let points = self
            .points
            .iter()
            .map(|x| parse_point(field, x))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(Loaded {
            descriptor: self.descriptor.clone(),
            field,
            n,
            family,
            planes,
            families,
            partition,
            points,
        })
    }
}

impl Loaded {
    pub fn require_family(&self) -> CliResult<&LineFamily> {
        self.family
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("{} configuration has no line family", self.descriptor.kind)))
    }
}

fn partition_repr(p: &Partition) -> PartitionRepr {
    PartitionRepr {
        planes: p.planes.iter().map(AffineSubspace::to_repr).collect(),
        assignment: p
            .assignment
            .iter()
            .map(|(x, &plane)| AssignmentRepr {
                point: point_strings(x),
                plane,
            })
            .collect(),
    }
}

/// Output of a builder, before serialization.
#[derive(Debug, Clone)]
pub enum Built {
    Lines {
        config: LineConfig,
        partition: Option<Partition>,
    },
    Multi(MultijointConfig),
    Planar {
        descriptor: ConfigDescriptor,
        config: generators::PlanarIncidenceConfig,
    },
}

impl Built {
    pub fn descriptor(&self) -> &ConfigDescriptor {
        match self {
            Built::Lines { config, .. } => &config.descriptor,
            Built::Multi(m) => &m.descriptor,
            Built::Planar { descriptor, .. } => descriptor,
        }
    }

    pub fn document(&self) -> ConfigDocument {
        let descriptor = self.descriptor().clone();
        match self {
            Built::Lines { config, partition } => ConfigDocument {
                provenance: None,
                field: config.family.field().to_string(),
                n: config.family.ambient_dim(),
                lines: config.family.lines().iter().map(line_repr).collect(),
                planes: Vec::new(),
                families: Vec::new(),
                partition: partition.as_ref().map(partition_repr),
                points: Vec::new(),
                descriptor,
            },
            Built::Multi(m) => ConfigDocument {
                provenance: None,
                field: m.families[0].field().to_string(),
                n: m.families[0].ambient_dim(),
                lines: Vec::new(),
                planes: m.planes.iter().map(AffineSubspace::to_repr).collect(),
                families: m
                    .families
                    .iter()
                    .map(|f| f.lines().iter().map(line_repr).collect())
                    .collect(),
                partition: None,
                points: Vec::new(),
                descriptor,
            },
            Built::Planar { config, .. } => ConfigDocument {
                provenance: None,
                field: config.plane.field().to_string(),
                n: config.plane.ambient_dim(),
                lines: config.lines.iter().map(line_repr).collect(),
                planes: vec![config.plane.to_repr()],
                families: Vec::new(),
                partition: None,
                points: config.points.iter().map(|x| point_strings(x)).collect(),
                descriptor,
            },
        }
    }
}

pub fn generator_error(e: GeneratorError) -> CliError {
    match e {
        GeneratorError::SelfCheck { .. } => CliError::Assertion(e.to_string()),
        GeneratorError::Cap(_) | GeneratorError::Incidence(joints_core::incidence::IncidenceError::Cap(_)) => {
            CliError::Runtime(e.to_string())
        }
        _ => CliError::Usage(e.to_string()),
    }
}

/// Runs the builder named by `spec`.
pub fn build(spec: &GeneratorSpec, limits: &Limits) -> CliResult<Built> {
    let field = spec.field()?;
    let ge = generator_error;
    Ok(match spec.kind {
        Kind::AxisGrid => Built::Lines {
            config: generators::axis_grid(field, spec.n.unwrap_or(3), spec.side.unwrap_or(3), limits).map_err(ge)?,
            partition: None,
        },
        Kind::LoomisWhitney => {
            if field != Field::rational() {
                return Err(CliError::Usage("the Loomis–Whitney grid is built over Q".into()));
            }
            let lw = generators::loomis_whitney_grid(spec.side.unwrap_or(3), limits).map_err(ge)?;
            Built::Lines {
                config: lw.config,
                partition: Some(lw.hint),
            }
        }
        Kind::Bush => {
            let center = vec![field.zero(); 3];
            Built::Lines {
                config: generators::bush(
                    field,
                    spec.bush_size.unwrap_or(5),
                    &center,
                    spec.coplanar.unwrap_or(true),
                    spec.transverse.unwrap_or(true),
                    limits,
                )
                .map_err(ge)?,
                partition: None,
            }
        }
        Kind::FfCounterexample => {
            let p = match (spec.p, field.size()) {
                (Some(p), _) => p,
                (None, Some(q)) => q,
                (None, None) => 3,
            };
            Built::Lines {
                config: generators::finite_field_counterexample(p, limits).map_err(ge)?,
                partition: None,
            }
        }
        Kind::RandomLines => Built::Lines {
            config: generators::random_lines(
                field,
                spec.n.unwrap_or(3),
                spec.count.unwrap_or(20),
                spec.seed.unwrap_or(0),
                limits,
            )
            .map_err(ge)?,
            partition: None,
        },
        Kind::MultijointGrid => Built::Multi(
            generators::multijoint_grid(
                field,
                spec.n.unwrap_or(3),
                spec.k.unwrap_or(2),
                spec.side.unwrap_or(2),
                limits,
            )
            .map_err(ge)?,
        ),
        Kind::StGrid => {
            if field != Field::rational() {
                return Err(CliError::Usage("the incidence grid is built over Q".into()));
            }
            let side = spec.side.unwrap_or(4);
            let config = generators::st_grid(side).map_err(ge)?;
            limits.check_lines(config.lines.len()).map_err(CliError::runtime)?;
            let descriptor = ConfigDescriptor {
                kind: Kind::StGrid.name().into(),
                params: ConfigParams {
                    field: field.to_string(),
                    n: Some(2),
                    side: Some(side),
                    ..Default::default()
                },
                expected: ExpectedCounts {
                    lines: Some((side * side + side) as u64),
                    ..Default::default()
                },
            };
            Built::Planar { descriptor, config }
        }
    })
}
