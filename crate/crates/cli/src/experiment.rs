//! JSON experiment configurations: a generator, the analyses to run on its
//! output and the constants they use, or a sweep over one parameter.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use joints_core::Limits;
use serde::{Deserialize, Serialize};

use crate::analysis::{Analyzer, Constants, Parsed, Section};
use crate::document::{build, Built, GeneratorSpec, Loaded};
use crate::error::{CliError, CliResult};
use crate::report::Report;
use crate::sweep::{self, SweepPlan, SweepRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AnalysisName {
    Joints,
    Kakeya,
    Levels,
    Multijoints,
    StructureVerify,
    StructureSearch,
    NearlyPlanar,
    Dichotomy,
    StReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub analyses: Vec<AnalysisName>,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepRange>,
    /// Level subsets for the nearly planar check, keyed by dyadic level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsets: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Overrides `generator.seed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let mut config: ExperimentConfig = serde_json::from_str(&text)?;
        if let Some(seed) = config.seed {
            config.generator.seed = Some(seed);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.generator.field()?;
        self.constants.parse()?;
        if let Some(s) = &self.sweep {
            s.values()?;
            self.generator.clone().set(&s.param, 1)?;
            if !self.analyses.is_empty() {
                return Err(CliError::Usage(
                    "a sweep computes a fixed set of columns; drop `analyses`".into(),
                ));
            }
        }
        if let Some(p) = &self.subsets {
            if !p.exists() {
                return Err(CliError::Usage(format!("subsets file {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    pub fn run(&self, limits: &Limits, out: Option<&Path>) -> CliResult<i32> {
        let out = out.or(self.out.as_deref());
        if let Some(range) = &self.sweep {
            let plan = SweepPlan {
                generator: self.generator.clone(),
                range: range.clone(),
                constants: self.constants.clone(),
            };
            return sweep::run(&plan, limits, out);
        }
        let built = build(&self.generator, limits)?;
        let analyses = if self.analyses.is_empty() {
            default_analyses(&built)
        } else {
            self.analyses.clone()
        };
        let loaded = built.document().load()?;
        let mut report = Report::new("experiment", self, Some(loaded.descriptor.clone()));
        for s in run_analyses(
            &loaded,
            limits,
            self.constants.parse()?,
            &analyses,
            self.subsets.as_deref(),
        )? {
            report.add(s);
        }
        report.emit(out)
    }
}

pub fn default_analyses(built: &Built) -> Vec<AnalysisName> {
    use AnalysisName::*;
    match built {
        Built::Lines { partition: Some(_), .. } => vec![Joints, Kakeya, Levels, StructureVerify],
        Built::Lines { .. } => vec![Joints, Kakeya, Levels],
        Built::Multi(_) => vec![Multijoints],
        Built::Planar { .. } => vec![StReport],
    }
}

pub fn run_analyses(
    loaded: &Loaded,
    limits: &Limits,
    constants: Parsed,
    names: &[AnalysisName],
    subsets: Option<&Path>,
) -> CliResult<Vec<Section>> {
    let mut a = Analyzer::new(loaded, *limits, constants);
    names
        .iter()
        .map(|n| match n {
            AnalysisName::Joints => a.joints(),
            AnalysisName::Kakeya => a.kakeya(),
            AnalysisName::Levels => a.levels(),
            AnalysisName::Multijoints => a.multijoints(),
            AnalysisName::StructureVerify => a.structure_verify(),
            AnalysisName::StructureSearch => a.structure_search(),
            AnalysisName::NearlyPlanar => a.nearly_planar(subsets),
            AnalysisName::Dichotomy => a.dichotomy(),
            AnalysisName::StReport => a.st_report(),
        })
        .collect()
}
