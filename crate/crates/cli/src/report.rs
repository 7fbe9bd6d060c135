use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use joints_core::ConfigDescriptor;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::{Assertion, Section};
use crate::error::{CliResult, EXIT_ASSERTION, EXIT_OK};
use crate::provenance::Provenance;

/// JSON report written by every subcommand except `generate` and `sweep`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub provenance: Provenance,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<ConfigDescriptor>,
    pub results: BTreeMap<String, Value>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

impl Report {
    pub fn new<T: Serialize>(command: &str, config: &T, descriptor: Option<ConfigDescriptor>) -> Self {
        Report {
            provenance: Provenance::for_config(config),
            command: command.into(),
            descriptor,
            results: BTreeMap::new(),
            assertions: Vec::new(),
            passed: true,
        }
    }

    pub fn add(&mut self, section: Section) {
        self.passed &= section.assertions.iter().all(|a| a.passed);
        self.assertions.extend(section.assertions);
        self.results.insert(section.name.into(), section.value);
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_ASSERTION
        }
    }

    pub fn emit(&self, out: Option<&Path>) -> CliResult<i32> {
        write_output(out, &(serde_json::to_string_pretty(self)? + "\n"))?;
        for a in self.assertions.iter().filter(|a| !a.passed) {
            eprintln!("assertion failed: {}: {}", a.name, a.detail);
        }
        Ok(self.exit_code())
    }
}

/// Reads `path`, or standard input for `-` or no path.
pub fn read_input(path: Option<&Path>) -> CliResult<String> {
    match path {
        Some(p) if p != Path::new("-") => {
            Ok(std::fs::read_to_string(p)
                .map_err(|e| crate::error::CliError::Usage(format!("{}: {e}", p.display())))?)
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

/// Writes `text` to `path`, or standard output when absent.
pub fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, text)?,
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
