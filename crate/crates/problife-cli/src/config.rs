//! Settings resolution: flags over config file over environment over
//! defaults, then input loading and validation.

use std::fs;
use std::path::PathBuf;

use problife::grid::BoundaryPolicy;
use problife::{GridState, Ruleset};

pub const DEFAULT_STEPS: u64 = 1;
pub const DEFAULT_PRECISION: usize = 6;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SAMPLES: u64 = 1000;
pub const DEFAULT_CELL_SIZE: u32 = 10;
pub const DEFAULT_PPM_TEMPLATE: &str = "gen{:03}.ppm";
pub const CELL_LIMIT_ENV: &str = "PROBLIFE_CELL_LIMIT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Pattern,
    Ppm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Meanfield,
    Exact,
    Sample,
}

impl EngineChoice {
    pub fn name(self) -> &'static str {
        match self {
            EngineChoice::Meanfield => "meanfield",
            EngineChoice::Exact => "exact",
            EngineChoice::Sample => "sample",
        }
    }
}

/// An error carrying its process exit status.
#[derive(Debug)]
pub enum CliError {
    /// Invalid flag combinations or values — status 1.
    Usage(String),
    /// Malformed ruleset notation or pattern content — status 2.
    Parse(String),
    /// Grid exceeds the exact-inference cell limit — status 3.
    Limit(String),
    /// File read/write failure — status 4.
    Io(String),
}

impl CliError {
    pub fn status(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Limit(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Limit(m) | CliError::Io(m) => m,
        }
    }
}

/// Option-layered settings before resolution. `None` means "not given on
/// the command line"; the config file, environment, and defaults fill the
/// holes in that order.
#[derive(Debug, Default, Clone)]
pub struct RawSettings {
    pub rules: Option<String>,
    pub pattern: Option<PathBuf>,
    pub steps: Option<u64>,
    pub boundary: Option<BoundaryPolicy>,
    pub precision: Option<usize>,
    pub out: Option<String>,
    pub format: Option<OutputFormat>,
    pub config: Option<PathBuf>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub trajectory: bool,
    pub cell_limit: Option<usize>,
    pub cell_size: Option<u32>,
    pub gridlines: bool,
    pub engine: Option<EngineChoice>,
    /// Per-command fallback when neither flag nor config pick an engine.
    pub engine_default: Option<EngineChoice>,
}

/// Fully resolved, validated settings with inputs loaded.
#[derive(Debug, Clone)]
pub struct Settings {
    pub rules: Ruleset,
    /// Canonical notation, used in output headers.
    pub rules_text: String,
    pub start: GridState,
    pub steps: u64,
    pub boundary: BoundaryPolicy,
    pub precision: usize,
    pub out: Option<String>,
    pub format: OutputFormat,
    pub samples: u64,
    pub seed: u64,
    pub trajectory: bool,
    pub cell_limit: usize,
    pub cell_size: u32,
    pub gridlines: bool,
    pub engine: EngineChoice,
}

impl RawSettings {
    pub fn resolve(mut self) -> Result<Settings, CliError> {
        if let Some(path) = self.config.clone() {
            self.merge_config_file(&path)?;
        }

        let rules_text = self
            .rules
            .ok_or_else(|| CliError::Usage("missing --rules".into()))?;
        let rules: Ruleset = rules_text
            .parse()
            .map_err(|e| CliError::Parse(format!("ruleset '{rules_text}': {e}")))?;

        let pattern_path = self
            .pattern
            .ok_or_else(|| CliError::Usage("missing --pattern".into()))?;
        let pattern_text = fs::read_to_string(&pattern_path).map_err(|e| {
            CliError::Io(format!("reading '{}': {e}", pattern_path.display()))
        })?;
        let start = GridState::parse_pattern(&pattern_text).map_err(|e| {
            CliError::Parse(format!("pattern '{}': {e}", pattern_path.display()))
        })?;

        let precision = self.precision.unwrap_or(DEFAULT_PRECISION);
        if !(1..=17).contains(&precision) {
            return Err(CliError::Usage(format!(
                "precision {precision} is outside 1..=17"
            )));
        }

        let cell_limit = match self.cell_limit {
            Some(limit) => limit,
            None => cell_limit_from_env()?.unwrap_or(problife::exact::DEFAULT_CELL_LIMIT),
        };

        let samples = self.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples < 1 {
            return Err(CliError::Usage("samples must be at least 1".into()));
        }

        let cell_size = self.cell_size.unwrap_or(DEFAULT_CELL_SIZE);
        if cell_size < 1 {
            return Err(CliError::Usage("cell-size must be at least 1".into()));
        }

        Ok(Settings {
            rules_text: rules.to_string(),
            rules,
            start,
            steps: self.steps.unwrap_or(DEFAULT_STEPS),
            boundary: self.boundary.unwrap_or(BoundaryPolicy::Dead),
            precision,
            out: self.out,
            format: self.format.unwrap_or(OutputFormat::Csv),
            samples,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            trajectory: self.trajectory,
            cell_limit,
            cell_size,
            gridlines: self.gridlines,
            engine: self
                .engine
                .or(self.engine_default)
                .unwrap_or(EngineChoice::Meanfield),
        })
    }

    /// Fills unset fields from a `key = value` file. Keys match the flag
    /// names; `#` starts a comment.
    fn merge_config_file(&mut self, path: &PathBuf) -> Result<(), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading '{}': {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!(
                    "{}:{}: expected 'key = value'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            let invalid = |what: &str| {
                CliError::Usage(format!(
                    "{}:{}: invalid {what} '{value}'",
                    path.display(),
                    lineno + 1
                ))
            };
            match key {
                "rules" => {
                    self.rules.get_or_insert_with(|| value.to_string());
                }
                "pattern" => {
                    self.pattern.get_or_insert_with(|| PathBuf::from(value));
                }
                "steps" => {
                    let v = value.parse().map_err(|_| invalid("steps"))?;
                    self.steps.get_or_insert(v);
                }
                "boundary" => {
                    let v = match value {
                        "dead" => BoundaryPolicy::Dead,
                        "wrap" => BoundaryPolicy::Toroidal,
                        _ => return Err(invalid("boundary")),
                    };
                    self.boundary.get_or_insert(v);
                }
                "precision" => {
                    let v = value.parse().map_err(|_| invalid("precision"))?;
                    self.precision.get_or_insert(v);
                }
                "out" => {
                    self.out.get_or_insert_with(|| value.to_string());
                }
                "format" => {
                    let v = match value {
                        "csv" => OutputFormat::Csv,
                        "pattern" => OutputFormat::Pattern,
                        "ppm" => OutputFormat::Ppm,
                        _ => return Err(invalid("format")),
                    };
                    self.format.get_or_insert(v);
                }
                "samples" => {
                    let v = value.parse().map_err(|_| invalid("samples"))?;
                    self.samples.get_or_insert(v);
                }
                "seed" => {
                    let v = value.parse().map_err(|_| invalid("seed"))?;
                    self.seed.get_or_insert(v);
                }
                "trajectory" => {
                    self.trajectory |= parse_bool(value).ok_or_else(|| invalid("trajectory"))?;
                }
                "cell-limit" => {
                    let v = value.parse().map_err(|_| invalid("cell-limit"))?;
                    self.cell_limit.get_or_insert(v);
                }
                "cell-size" => {
                    let v = value.parse().map_err(|_| invalid("cell-size"))?;
                    self.cell_size.get_or_insert(v);
                }
                "gridlines" => {
                    self.gridlines |= parse_bool(value).ok_or_else(|| invalid("gridlines"))?;
                }
                "engine" => {
                    let v = match value {
                        "meanfield" => EngineChoice::Meanfield,
                        "exact" => EngineChoice::Exact,
                        "sample" => EngineChoice::Sample,
                        _ => return Err(invalid("engine")),
                    };
                    self.engine.get_or_insert(v);
                }
                _ => {
                    return Err(CliError::Usage(format!(
                        "{}:{}: unknown key '{key}'",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        Ok(())
    }
}

fn parse_bool(value: &str) -> Option<bool> {
    match value {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

fn cell_limit_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(CELL_LIMIT_ENV) {
        Ok(raw) => raw
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("invalid {CELL_LIMIT_ENV} value '{raw}'"))),
        Err(_) => Ok(None),
    }
}
