//! Run configuration, command execution and report emission.
//!
//! A configuration is a flat `key = value` text file; command-line flags are
//! applied on top of it. Everything is parsed and validated before any
//! computation starts.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::estimators::{
    criteria_compare, essential_bounds_with_floor, sigma_scan, BoundaryScan, ScanSettings,
};
use crate::norm::{SearchSettings, Searcher};
use crate::symbol::{parse_symbol, AnalyticMap};
use crate::weights::Weight;

pub const TOOL_NAME: &str = "bloch-scope";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Keys accepted in configuration files and `--set` overrides.
pub const CONFIG_KEYS: &[&str] = &[
    "symbol",
    "alpha",
    "beta",
    "weight",
    "format",
    "out",
    "depth",
    "eps_boundary",
    "max_angles",
    "rings_per_band",
    "angular_oversample",
    "refine_rounds",
    "shrink",
    "seeds",
    "rel_tol",
    "abs_tol",
    "radial_fast_path",
    "k_min",
    "k_max",
    "angles",
    "tail_window",
    "compact_tol",
    "noncompact_factor",
    "scan_rel_tol",
    "scan_abs_tol",
    "j_max",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" | "structured" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Config(format!(
                "unknown output format '{other}' (expected csv or json)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Norm,
    Essential,
    Compare,
    ScanDump,
    Selfcheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Essential => "essential",
            Command::Compare => "compare",
            Command::ScanDump => "scan-dump",
            Command::Selfcheck => "selfcheck",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub symbol: Option<String>,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub weight: Option<String>,
    pub search: SearchSettings,
    pub scan: ScanSettings,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            symbol: None,
            alpha: 1.0,
            beta: None,
            weight: None,
            search: SearchSettings::default(),
            scan: ScanSettings::default(),
            format: OutputFormat::default(),
            out: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for key '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "invalid boolean '{value}' for key '{key}'"
        ))),
    }
}

impl RunConfig {
    /// Sets one key; `-` and `_` are interchangeable in key names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let k = key.as_str();
        let v = value.trim();
        match k {
            "symbol" => self.symbol = Some(v.to_string()),
            "alpha" => self.alpha = parse_value(k, v)?,
            "beta" => self.beta = Some(parse_value(k, v)?),
            "weight" => self.weight = Some(v.to_string()),
            "format" => self.format = v.parse()?,
            "out" => self.out = Some(PathBuf::from(v)),
            "depth" => self.search.depth = parse_value(k, v)?,
            "eps_boundary" => self.search.eps_boundary = parse_value(k, v)?,
            "max_angles" => self.search.max_angles = parse_value(k, v)?,
            "rings_per_band" => self.search.rings_per_band = parse_value(k, v)?,
            "angular_oversample" => self.search.angular_oversample = parse_value(k, v)?,
            "refine_rounds" => self.search.refine_rounds = parse_value(k, v)?,
            "shrink" => self.search.shrink = parse_value(k, v)?,
            "seeds" => self.search.seeds = parse_value(k, v)?,
            "rel_tol" => self.search.rel_tol = parse_value(k, v)?,
            "abs_tol" => self.search.abs_tol = parse_value(k, v)?,
            "radial_fast_path" => self.search.radial_fast_path = parse_bool(k, v)?,
            "k_min" => self.scan.k_min = parse_value(k, v)?,
            "k_max" => self.scan.k_max = parse_value(k, v)?,
            "angles" => self.scan.angles = parse_value(k, v)?,
            "tail_window" => self.scan.tail_window = parse_value(k, v)?,
            "compact_tol" => self.scan.compact_tol = parse_value(k, v)?,
            "noncompact_factor" => self.scan.noncompact_factor = parse_value(k, v)?,
            "scan_rel_tol" => self.scan.rel_tol = parse_value(k, v)?,
            "scan_abs_tol" => self.scan.abs_tol = parse_value(k, v)?,
            "j_max" => self.scan.j_max = parse_value(k, v)?,
            _ => {
                return Err(Error::Config(format!(
                    "unknown configuration key '{key}' (known keys: {})",
                    CONFIG_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies a `key = value` document. Blank lines and `#` comments are
    /// ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected 'key = value', found '{line}'",
                    n + 1
                ))
            })?;
            self.set(key, value).map_err(|e| {
                Error::Config(format!("line {}: {}", n + 1, strip_config_prefix(&e)))
            })?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut config = RunConfig::default();
        config.apply_text(&text)?;
        Ok(config)
    }

    /// Parses the symbol and weight and validates every setting.
    pub fn resolve(&self, command: Command) -> Result<ResolvedConfig> {
        self.search.validate()?;
        self.scan.validate()?;
        crate::sigma::validate_alpha(self.alpha)?;
        let symbol = match (&self.symbol, command) {
            (_, Command::Selfcheck) => None,
            (Some(text), _) => Some(parse_symbol(text)?),
            (None, _) => return Err(Error::Config(format!("command '{command}' needs a symbol"))),
        };
        let weight = match (self.beta, &self.weight) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either beta or weight, not both".into()));
            }
            (Some(beta), None) => Weight::standard(beta)?,
            (None, Some(spec)) => Weight::parse(spec)?,
            (None, None) => Weight::standard(self.alpha)?,
        };
        Ok(ResolvedConfig {
            command,
            symbol,
            weight,
            config: self.clone(),
        })
    }
}

fn strip_config_prefix(e: &Error) -> String {
    match e {
        Error::Config(msg) => msg.clone(),
        other => other.to_string(),
    }
}

#[derive(Clone, Debug)]
pub struct ResolvedConfig {
    pub command: Command,
    pub symbol: Option<AnalyticMap>,
    pub weight: Weight,
    pub config: RunConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
    pub threads: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub config: RunConfig,
    pub results: Value,
    pub timing: Timing,
}

impl Report {
    /// Whether the command reported a failed check (only `selfcheck` can).
    pub fn failed(&self) -> bool {
        self.results.get("passed") == Some(&Value::Bool(false))
    }

    /// The report without its timing block.
    pub fn numeric_fields(&self) -> Value {
        json!({
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "config": self.config,
            "results": self.results,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// CSV rendering. `scan-dump` yields one row per `a`-grid cell; other
    /// commands yield `quantity,value` rows over the flattened report.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if let Some(rows) = self.results.get("rows").and_then(Value::as_array) {
            w.write_record(["radius", "theta", "norm", "seminorm", "radius_max"])?;
            for row in rows {
                let cells: Vec<String> = row
                    .as_array()
                    .map(|r| r.iter().map(scalar_text).collect())
                    .unwrap_or_default();
                w.write_record(&cells)?;
            }
        } else {
            w.write_record(["quantity", "value"])?;
            let mut flat = Vec::new();
            flatten("", &self.numeric_fields(), &mut flat);
            for (k, v) in flat {
                w.write_record([k, v])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => Ok(self.to_json()),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    /// Writes the rendered report to `out`, or stdout when `out` is `None`.
    pub fn emit(&self, format: OutputFormat, out: Option<&Path>) -> Result<()> {
        let text = self.render(format)?;
        match out {
            Some(path) => fs::write(path, text)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
            }
        }
        Ok(())
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&join(k), child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), child, out);
            }
        }
        scalar => out.push((prefix.to_string(), scalar_text(scalar))),
    }
}

fn scan_summary(scan: &BoundaryScan) -> Value {
    json!({
        "family": scan.family,
        "radii": scan.radii,
        "angles": scan.angles.len(),
        "cells": scan.cell_count(),
        "cells_converged": scan.cells_converged,
        "tail_max": scan.tail_max,
        "tail_max_seminorm": scan.tail_max_seminorm,
        "l": scan.l_estimate,
        "l_seminorm": scan.l_seminorm_estimate,
        "converged": scan.converged,
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

pub fn cmd_norm(config: &RunConfig) -> Result<Report> {
    execute(&config.resolve(Command::Norm)?)
}

pub fn cmd_essential(config: &RunConfig) -> Result<Report> {
    execute(&config.resolve(Command::Essential)?)
}

pub fn cmd_compare(config: &RunConfig) -> Result<Report> {
    execute(&config.resolve(Command::Compare)?)
}

pub fn cmd_scan_dump(config: &RunConfig) -> Result<Report> {
    execute(&config.resolve(Command::ScanDump)?)
}

pub fn cmd_selfcheck(config: &RunConfig) -> Result<Report> {
    execute(&config.resolve(Command::Selfcheck)?)
}

/// Executes a command on a resolved configuration.
pub fn execute(resolved: &ResolvedConfig) -> Result<Report> {
    let start = Instant::now();
    let cfg = &resolved.config;
    let results = match resolved.command {
        Command::Selfcheck => to_value(&crate::selfcheck::run_suite()),
        command => {
            let symbol = resolved.symbol.as_ref().expect("resolved symbol");
            let searcher = Searcher::new(&cfg.search)?;
            run_on_symbol(command, symbol, &resolved.weight, cfg, &searcher)?
        }
    };
    Ok(Report {
        tool: TOOL_NAME,
        version: VERSION,
        command: resolved.command,
        config: cfg.clone(),
        results,
        timing: Timing {
            elapsed_seconds: start.elapsed().as_secs_f64(),
            threads: rayon::current_num_threads(),
        },
    })
}

fn run_on_symbol(
    command: Command,
    symbol: &AnalyticMap,
    weight: &Weight,
    cfg: &RunConfig,
    searcher: &Searcher,
) -> Result<Value> {
    let mut results = Map::new();
    results.insert("symbol".into(), json!(symbol.to_string()));
    results.insert("weight".into(), json!(weight.to_string()));
    match command {
        Command::Norm => {
            let norm = searcher.bloch_norm(symbol, weight)?;
            results.insert("norm".into(), to_value(&norm));
        }
        Command::Essential => {
            let certificate = searcher
                .composed_field(symbol, weight)?
                .certificate()
                .clone();
            let scan = sigma_scan(symbol, cfg.alpha, weight, searcher, &cfg.scan)?;
            let phi_norm = searcher.bloch_norm(symbol, weight)?;
            let bounds = essential_bounds_with_floor(
                &scan,
                cfg.alpha,
                &phi_norm,
                cfg.scan.compact_tol,
                cfg.scan.noncompact_factor * cfg.scan.compact_tol,
            );
            results.insert("alpha".into(), json!(cfg.alpha));
            results.insert("certificate".into(), to_value(&certificate));
            results.insert("scan".into(), scan_summary(&scan));
            results.insert("bounds".into(), to_value(&bounds));
        }
        Command::Compare => {
            let beta = weight.standard_alpha().ok_or_else(|| {
                Error::UnsupportedWeight(format!(
                    "compare needs a standard weight valpha:<b>, got {weight}"
                ))
            })?;
            let report = criteria_compare(symbol, cfg.alpha, beta, searcher, &cfg.scan)?;
            results.insert("alpha".into(), json!(cfg.alpha));
            results.insert("beta".into(), json!(beta));
            results.insert("outcomes".into(), to_value(&report.outcomes));
            results.insert("bounds".into(), to_value(&report.bounds));
            results.insert("sigma_scan".into(), scan_summary(&report.sigma));
            results.insert("zhao".into(), to_value(&report.zhao));
            results.insert(
                "tjani_scan".into(),
                report.tjani.as_ref().map_or(Value::Null, scan_summary),
            );
            results.insert("agreement".into(), json!(report.agreement));
            results.insert("zhao_in_bounds".into(), json!(report.zhao_in_bounds));
            results.insert("disagreements".into(), json!(report.disagreements));
        }
        Command::ScanDump => {
            let scan = sigma_scan(symbol, cfg.alpha, weight, searcher, &cfg.scan)?;
            let mut rows = Vec::with_capacity(scan.cell_count());
            for (i, &r) in scan.radii.iter().enumerate() {
                for (j, &t) in scan.angles.iter().enumerate() {
                    rows.push(json!([
                        r,
                        t,
                        scan.values[i][j],
                        scan.seminorms[i][j],
                        scan.tail_max[i]
                    ]));
                }
            }
            results.insert("alpha".into(), json!(cfg.alpha));
            results.insert("rows".into(), Value::Array(rows));
        }
        Command::Selfcheck => unreachable!("handled by execute"),
    }
    Ok(Value::Object(results))
}
