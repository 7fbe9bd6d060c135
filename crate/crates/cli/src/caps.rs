use joints_core::Limits;

use crate::error::{CliError, CliResult};

pub const ENV_MAX_LINES: &str = "JOINTS_MAX_LINES";
pub const ENV_MAX_TUPLES: &str = "JOINTS_MAX_TUPLES";
pub const ENV_MAX_DEGREE: &str = "JOINTS_MAX_DEGREE";

fn read<T: std::str::FromStr>(name: &str) -> CliResult<Option<T>> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{name}={v} is not a valid number"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Usage(format!("{name}: {e}"))),
    }
}

/// Default caps with any environment overrides applied.
pub fn limits_from_env() -> CliResult<Limits> {
    let mut l = Limits::default();
    if let Some(v) = read(ENV_MAX_LINES)? {
        l.max_lines = v;
    }
    if let Some(v) = read(ENV_MAX_TUPLES)? {
        l.max_tuples = v;
    }
    if let Some(v) = read(ENV_MAX_DEGREE)? {
        l.max_degree = v;
    }
    Ok(l)
}
