use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use joints_core::Limits;
use serde_json::{json, Value};

use crate::analysis::{self, Constants};
use crate::document::{build, ConfigDocument, GeneratorSpec, Kind};
use crate::error::{CliError, CliResult, EXIT_OK};
use crate::experiment::{run_analyses, AnalysisName, ExperimentConfig};
use crate::provenance::{document_hash, Provenance};
use crate::report::{read_input, write_output, Report};
use crate::sweep::{self, SweepPlan, SweepRange};

const AFTER_HELP: &str = "\
Environment caps (exceeding one exits with status 1, or marks a sweep row skipped):
  JOINTS_MAX_LINES   lines per configuration (default 5000)
  JOINTS_MAX_TUPLES  spanning tuples enumerated per joint (default 10000000)
  JOINTS_MAX_DEGREE  annihilator degree (default 32)

Exit status: 0 success, 1 runtime error, 2 usage or configuration error, 3 failed assertion.";

#[derive(Debug, Parser)]
#[command(name = "joints", version, about = "Joint and multijoint configurations, exact polynomial checks", after_help = AFTER_HELP)]
pub struct Cli {
    /// JSON experiment configuration; runs it when no subcommand is given.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized generators.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a configuration and write it as JSON.
    Generate {
        kind: Kind,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Analyze a configuration document.
    Analyze {
        what: AnalyzeWhat,
        /// Configuration document (standard input when absent or `-`).
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        constants: ConstArgs,
    },
    /// Check a structure claim; a rejected claim exits with status 3.
    Verify {
        what: VerifyWhat,
        #[arg(long)]
        input: Option<PathBuf>,
        /// JSON object mapping dyadic level to joint indices.
        #[arg(long)]
        subsets: Option<PathBuf>,
        #[command(flatten)]
        constants: ConstArgs,
    },
    /// Minimal degree vanishing polynomial.
    Vanish {
        what: VanishWhat,
        /// Vanishing spec (`spec`) or multijoint configuration (`multijoints`).
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        constants: ConstArgs,
    },
    /// Classify points and lines of a factored surface in three variables.
    Census {
        #[arg(long)]
        input: PathBuf,
    },
    /// Sweep one generator parameter and write a CSV table.
    Sweep {
        /// Generator kind; required unless --config is given.
        kind: Option<Kind>,
        /// Parameter to sweep (n, k, N, p, M, count, seed).
        #[arg(long, default_value = "N")]
        param: String,
        #[arg(long)]
        from: Option<u64>,
        #[arg(long)]
        to: Option<u64>,
        /// Comma-separated values, instead of --from/--to.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<u64>>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        constants: ConstArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AnalyzeWhat {
    Joints,
    Multijoints,
    Levels,
    Structure,
    St,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VerifyWhat {
    Structure,
    NearlyPlanar,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VanishWhat {
    Spec,
    Multijoints,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// `Q` or `F<p>`.
    #[arg(long, default_value = "Q")]
    pub field: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Grid side length.
    #[arg(long = "N")]
    pub side: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    /// Lines per bush direction family.
    #[arg(long = "M")]
    pub bush_size: Option<usize>,
    #[arg(long, action = ArgAction::Set)]
    pub coplanar: Option<bool>,
    #[arg(long, action = ArgAction::Set)]
    pub transverse: Option<bool>,
    #[arg(long)]
    pub count: Option<usize>,
}

impl ParamArgs {
    fn spec(&self, kind: Kind, seed: Option<u64>) -> GeneratorSpec {
        GeneratorSpec {
            field: self.field.clone(),
            n: self.n,
            k: self.k,
            side: self.side,
            p: self.p,
            bush_size: self.bush_size,
            coplanar: self.coplanar,
            transverse: self.transverse,
            count: self.count,
            seed,
            ..GeneratorSpec::new(kind)
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConstArgs {
    /// Kakeya exponent, e.g. `3/2`; repeatable.
    #[arg(long)]
    pub kakeya: Vec<String>,
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long = "C")]
    pub big_c: Option<String>,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub c1: Option<String>,
    #[arg(long)]
    pub c2: Option<String>,
    /// Transverse order budget.
    #[arg(long)]
    pub budget: Option<u32>,
    /// Vanishing order at each multijoint.
    #[arg(long)]
    pub order: Option<u32>,
    /// Plane conditions per multijoint.
    #[arg(long)]
    pub per_joint: Option<usize>,
    /// Largest degree tried.
    #[arg(long)]
    pub dmax: Option<u32>,
}

impl ConstArgs {
    pub fn constants(&self) -> Constants {
        let d = Constants::default();
        Constants {
            c: self.c.clone().unwrap_or(d.c),
            big_c: self.big_c.clone().unwrap_or(d.big_c),
            eps: self.eps.clone().unwrap_or(d.eps),
            c1: self.c1.clone().unwrap_or(d.c1),
            c2: self.c2.clone().unwrap_or(d.c2),
            budget: self.budget.unwrap_or(d.budget),
            order: self.order.unwrap_or(d.order),
            per_joint: self.per_joint.unwrap_or(d.per_joint),
            d_max: self.dmax.unwrap_or(d.d_max),
            kakeya: if self.kakeya.is_empty() {
                d.kakeya
            } else {
                self.kakeya.clone()
            },
        }
    }
}

fn load_document(input: Option<&Path>) -> CliResult<(ConfigDocument, String)> {
    let text = read_input(input)?;
    let value: Value = serde_json::from_str(&text)?;
    let hash = document_hash(&value);
    Ok((serde_json::from_value(value)?, hash))
}

fn analyze_document(
    command: &str,
    input: Option<&Path>,
    constants: &Constants,
    names: &[AnalysisName],
    subsets: Option<&Path>,
    limits: &Limits,
    out: Option<&Path>,
) -> CliResult<i32> {
    let parsed = constants.parse()?;
    let (doc, hash) = load_document(input)?;
    let loaded = doc.load()?;
    let config = json!({ "command": command, "input_sha256": hash, "constants": constants });
    let mut report = Report::new(command, &config, Some(loaded.descriptor.clone()));
    for s in run_analyses(&loaded, limits, parsed, names, subsets)? {
        report.add(s);
    }
    report.emit(out)
}

pub fn dispatch(cli: Cli, limits: &Limits) -> CliResult<i32> {
    let out = cli.out.as_deref();
    let Some(command) = cli.command else {
        let Some(path) = &cli.config else {
            return Err(CliError::Usage("give a subcommand or --config (see --help)".into()));
        };
        let mut config = ExperimentConfig::load(path)?;
        if cli.seed.is_some() {
            config.generator.seed = cli.seed;
        }
        return config.run(limits, out);
    };
    if cli.config.is_some() && !matches!(command, Command::Sweep { .. }) {
        return Err(CliError::Usage(
            "--config is accepted only alone or with `sweep`".into(),
        ));
    }
    match command {
        Command::Generate { kind, params } => {
            let built = build(&params.spec(kind, cli.seed), limits)?;
            let mut doc = built.document();
            doc.provenance = Some(Provenance::for_config(built.descriptor()));
            write_output(out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
            Ok(EXIT_OK)
        }
        Command::Analyze { what, input, constants } => {
            use AnalysisName::*;
            let (name, names): (&str, &[AnalysisName]) = match what {
                AnalyzeWhat::Joints => ("analyze joints", &[Joints, Kakeya]),
                AnalyzeWhat::Multijoints => ("analyze multijoints", &[Multijoints]),
                AnalyzeWhat::Levels => ("analyze levels", &[Levels]),
                AnalyzeWhat::Structure => ("analyze structure", &[StructureSearch]),
                AnalyzeWhat::St => ("analyze st", &[StReport]),
            };
            analyze_document(name, input.as_deref(), &constants.constants(), names, None, limits, out)
        }
        Command::Verify {
            what,
            input,
            subsets,
            constants,
        } => {
            let (name, names): (&str, &[AnalysisName]) = match what {
                VerifyWhat::Structure => ("verify structure", &[AnalysisName::StructureVerify]),
                VerifyWhat::NearlyPlanar => ("verify nearly-planar", &[AnalysisName::NearlyPlanar]),
            };
            analyze_document(
                name,
                input.as_deref(),
                &constants.constants(),
                names,
                subsets.as_deref(),
                limits,
                out,
            )
        }
        Command::Vanish { what, input, constants } => match what {
            VanishWhat::Spec => {
                let path = input.ok_or_else(|| CliError::Usage("vanish spec needs --input".into()))?;
                let constants = constants.constants();
                let section = analysis::vanish_spec(&path, constants.d_max, limits)?;
                let config = json!({ "command": "vanish spec", "input": path, "d_max": constants.d_max });
                let mut report = Report::new("vanish spec", &config, None);
                report.add(section);
                report.emit(out)
            }
            VanishWhat::Multijoints => analyze_document(
                "vanish multijoints",
                input.as_deref(),
                &constants.constants(),
                &[AnalysisName::Dichotomy],
                None,
                limits,
                out,
            ),
        },
        Command::Census { input } => {
            let section = analysis::census(&input)?;
            let config = json!({ "command": "census", "input": input });
            let mut report = Report::new("census", &config, None);
            report.add(section);
            report.emit(out)
        }
        Command::Sweep {
            kind,
            param,
            from,
            to,
            values,
            params,
            constants,
        } => {
            if let Some(path) = &cli.config {
                let mut config = ExperimentConfig::load(path)?;
                if config.sweep.is_none() {
                    return Err(CliError::Usage(format!("{} has no `sweep` section", path.display())));
                }
                if cli.seed.is_some() {
                    config.generator.seed = cli.seed;
                }
                return config.run(limits, out);
            }
            let kind = kind.ok_or_else(|| CliError::Usage("sweep needs a generator kind or --config".into()))?;
            let plan = SweepPlan {
                generator: params.spec(kind, cli.seed),
                range: SweepRange {
                    param,
                    from,
                    to,
                    values,
                },
                constants: constants.constants(),
            };
            sweep::run(&plan, limits, out)
        }
    }
}
