//! Named, seeded experiments with CSV tables and a JSON report.
//!
//! A recipe validates its parameters up front, runs deterministically for a
//! fixed (config, seed) pair, and emits verdicts only on quantities with an
//! explicit tolerance. Raw data always lands in CSV tables next to the
//! verdicts.

mod defs;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};

/// One declared parameter of a recipe.
pub struct ParamDef {
    pub name: &'static str,
    /// `None` marks a required parameter.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

/// A checked quantity with its tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance window, e.g. "in [-1.7, -1.3]" or "== 0".
    pub tolerance: String,
    pub pass: bool,
}

impl Verdict {
    pub fn in_range(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Verdict {
            name: name.into(),
            value,
            tolerance: format!("in [{lo}, {hi}]"),
            pass: value >= lo && value <= hi,
        }
    }

    pub fn at_most(name: &str, value: f64, max: f64) -> Self {
        Verdict {
            name: name.into(),
            value,
            tolerance: format!("<= {max}"),
            pass: value <= max,
        }
    }

    pub fn at_least(name: &str, value: f64, min: f64) -> Self {
        Verdict {
            name: name.into(),
            value,
            tolerance: format!(">= {min}"),
            pass: value >= min,
        }
    }

    pub fn exactly_zero(name: &str, value: f64) -> Self {
        Verdict {
            name: name.into(),
            value,
            tolerance: "== 0".into(),
            pass: value == 0.0,
        }
    }

    pub fn within_sigmas(name: &str, sigmas: f64, k: f64) -> Self {
        Verdict {
            name: name.into(),
            value: sigmas,
            tolerance: format!("<= {k} sigma"),
            pass: sigmas <= k,
        }
    }
}

/// Tables produced by a recipe run: (file name, CSV body).
pub type Tables = Vec<(String, String)>;

pub struct RecipeOutput {
    pub verdicts: Vec<Verdict>,
    pub tables: Tables,
}

type RunFn = fn(&ResolvedParams, u64) -> Result<RecipeOutput>;

/// A registered experiment.
pub struct RecipeDef {
    pub name: &'static str,
    pub description: &'static str,
    /// The claim the experiment probes, stated as mathematics.
    pub claim: &'static str,
    pub params: &'static [ParamDef],
    run: RunFn,
}

/// The registry, in stable order.
pub fn registry() -> &'static [RecipeDef] {
    defs::REGISTRY
}

pub fn find_recipe(name: &str) -> Result<&'static RecipeDef> {
    registry()
        .iter()
        .find(|r| r.name == name)
        .ok_or_else(|| Error::UnknownRecipe(name.into()))
}

/// Stable listing of (name, description, required params, claim).
pub fn list_recipes() -> Vec<(String, String, Vec<String>, String)> {
    registry()
        .iter()
        .map(|r| {
            (
                r.name.to_string(),
                r.description.to_string(),
                r.params
                    .iter()
                    .filter(|p| p.default.is_none())
                    .map(|p| p.name.to_string())
                    .collect(),
                r.claim.to_string(),
            )
        })
        .collect()
}

/// A recipe invocation: name, parameter map, seed and output directory.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub recipe: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(recipe: &str, seed: u64, out_dir: &Path) -> Self {
        ExperimentConfig {
            recipe: recipe.into(),
            params: BTreeMap::new(),
            seed,
            out_dir: out_dir.into(),
        }
    }

    pub fn set(mut self, key: &str, value: &str) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    /// Parses the flat `key = value` config format; `#` starts a comment.
    /// Recognized top-level keys: `recipe` (required), `seed`, `out`.
    pub fn from_str_config(text: &str, default_out: &Path) -> Result<Self> {
        let mut recipe = None;
        let mut seed = 0u64;
        let mut out_dir = default_out.to_path_buf();
        let mut params = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", ln + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(Error::Config(format!("line {}: empty value", ln + 1)));
            }
            match key {
                "recipe" => recipe = Some(value.to_string()),
                "seed" => {
                    seed = value
                        .parse()
                        .map_err(|e| Error::Config(format!("line {}: bad seed: {e}", ln + 1)))?
                }
                "out" => out_dir = PathBuf::from(value),
                _ => {
                    params.insert(key.to_string(), value.to_string());
                }
            }
        }
        Ok(ExperimentConfig {
            recipe: recipe.ok_or_else(|| Error::Config("missing `recipe = ...`".into()))?,
            params,
            seed,
            out_dir,
        })
    }

    pub fn from_file(path: &Path, default_out: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str_config(&text, default_out)
    }
}

/// Parameter map after defaults and validation.
pub struct ResolvedParams {
    values: BTreeMap<String, String>,
}

impl ResolvedParams {
    pub fn get_str(&self, key: &str) -> &str {
        &self.values[key]
    }

    pub fn get_f64(&self, key: &str) -> Result<f64> {
        self.values[key]
            .parse()
            .map_err(|e| Error::Config(format!("parameter `{key}`: {e}")))
    }

    pub fn get_u64(&self, key: &str) -> Result<u64> {
        self.values[key]
            .parse()
            .map_err(|e| Error::Config(format!("parameter `{key}`: {e}")))
    }

    pub fn get_usize(&self, key: &str) -> Result<usize> {
        self.values[key]
            .parse()
            .map_err(|e| Error::Config(format!("parameter `{key}`: {e}")))
    }

    pub fn echo(&self) -> BTreeMap<String, String> {
        self.values.clone()
    }
}

/// Validates a config against its recipe: unknown keys are errors, missing
/// required parameters are errors, defaults fill the rest.
pub fn resolve(config: &ExperimentConfig) -> Result<(&'static RecipeDef, ResolvedParams)> {
    let recipe = find_recipe(&config.recipe)?;
    for key in config.params.keys() {
        if !recipe.params.iter().any(|p| p.name == key) {
            return Err(Error::Config(format!(
                "unknown parameter `{key}` for recipe `{}`",
                recipe.name
            )));
        }
    }
    let mut values = BTreeMap::new();
    for p in recipe.params {
        match config.params.get(p.name) {
            Some(v) => {
                values.insert(p.name.to_string(), v.clone());
            }
            None => match p.default {
                Some(d) => {
                    values.insert(p.name.to_string(), d.to_string());
                }
                None => {
                    return Err(Error::Config(format!(
                        "missing required parameter `{}` for recipe `{}`",
                        p.name, recipe.name
                    )))
                }
            },
        }
    }
    Ok((recipe, ResolvedParams { values }))
}

/// The run record written as `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub recipe: String,
    pub params: BTreeMap<String, String>,
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<String>,
    pub elapsed_seconds: f64,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

/// Validates without running; used by dry runs.
pub fn validate(config: &ExperimentConfig) -> Result<()> {
    resolve(config).map(|_| ())
}

/// Runs a recipe in memory, without touching the filesystem.
pub fn run_in_memory(config: &ExperimentConfig) -> Result<(Report, Tables)> {
    let (recipe, params) = resolve(config)?;
    let start = Instant::now();
    let output = (recipe.run)(&params, config.seed)?;
    let elapsed = start.elapsed().as_secs_f64();
    let report = Report {
        recipe: recipe.name.to_string(),
        params: params.echo(),
        verdicts: output.verdicts,
        tables: output.tables.iter().map(|(n, _)| n.clone()).collect(),
        elapsed_seconds: elapsed,
    };
    Ok((report, output.tables))
}

/// Runs a recipe and writes `report.json` plus one CSV file per table into
/// the output directory.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let (report, tables) = run_in_memory(config)?;
    std::fs::create_dir_all(&config.out_dir)?;
    for (name, body) in &tables {
        std::fs::write(config.out_dir.join(name), body)?;
    }
    let json = serde_json::to_string_pretty(&report)?;
    std::fs::write(config.out_dir.join("report.json"), json)?;
    Ok(report)
}
