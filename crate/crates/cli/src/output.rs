use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use tourney_core::pipeline::{Params, DESK_PRESET};

pub enum CliError {
    /// Bad flags or unreadable input: exit 2.
    Usage(String),
    /// A proven bound failed during the run: exit 1.
    Violation(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Violation(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Violation(m) => write!(f, "invariant violation: {m}"),
        }
    }
}

impl From<tourney_core::Error> for CliError {
    fn from(e: tourney_core::Error) -> Self {
        match e {
            tourney_core::Error::BoundViolated(m) => CliError::Violation(m),
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// What a subcommand hands back: the deterministic result, whether every
/// check passed, and human summary lines.
pub struct Outcome {
    pub result: Value,
    pub ok: bool,
    pub summary: Vec<String>,
}

impl Outcome {
    pub fn new(result: impl Serialize, ok: bool, summary: Vec<String>) -> CliResult<Outcome> {
        let result = serde_json::to_value(result).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Outcome { result, ok, summary })
    }
}

#[derive(Serialize)]
struct PresetInfo<'a> {
    name: &'a str,
    version: u32,
    sha256: &'a str,
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    seed: u64,
    preset: PresetInfo<'a>,
    ok: bool,
    result: &'a Value,
}

pub struct Ctx {
    pub seed: u64,
    pub params: Params,
    preset_hash: String,
    json_out: Option<PathBuf>,
    start: Instant,
}

impl Ctx {
    pub fn new(seed: u64, preset: Option<&Path>, json_out: Option<PathBuf>) -> CliResult<Ctx> {
        let text = match preset {
            Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
            None => DESK_PRESET.to_string(),
        };
        let params = Params::from_json(&text)?;
        let preset_hash = hex::encode(Sha256::digest(text.as_bytes()));
        Ok(Ctx { seed, params, preset_hash, json_out, start: Instant::now() })
    }

    /// Writes the report and the stderr summary; returns whether every
    /// check passed.
    pub fn emit(&self, command: &str, out: Outcome) -> CliResult<bool> {
        let env = Envelope {
            command,
            seed: self.seed,
            preset: PresetInfo { name: &self.params.name, version: self.params.version, sha256: &self.preset_hash },
            ok: out.ok,
            result: &out.result,
        };
        let mut text = serde_json::to_string_pretty(&env).map_err(|e| CliError::Usage(e.to_string()))?;
        text.push('\n');
        match &self.json_out {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
            None => print!("{text}"),
        }
        for line in &out.summary {
            eprintln!("{line}");
        }
        eprintln!("wall time: {:.3} s", self.start.elapsed().as_secs_f64());
        Ok(out.ok)
    }
}

/// Writes `rows` as CSV with a header taken from the row type's fields.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Usage(e.to_string()))
}
