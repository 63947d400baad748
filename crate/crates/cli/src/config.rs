use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Ionization,
    Lambda,
    #[value(name = "propagator_slice")]
    PropagatorSlice,
    Fig1,
    #[value(name = "oracle_report")]
    OracleReport,
}

impl fmt::Display for OutputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

/// Time grid `t_min..=t_max` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn step(&self) -> f64 {
        (self.t_max - self.t_min) / (self.steps - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.steps).map(|k| if k + 1 == self.steps { self.t_max } else { self.t_min + k as f64 * h }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub f_values: Vec<f64>,
    pub t_grid: TimeGrid,
    pub n_max: usize,
    pub tol: f64,
    pub outputs: Vec<OutputKind>,
    pub output_path: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            f_values: vec![1.0],
            t_grid: TimeGrid { t_min: 0.0, t_max: 6.0, steps: 200 },
            n_max: 24,
            tol: 1e-9,
            outputs: vec![OutputKind::Ionization],
            output_path: PathBuf::from("."),
        }
    }
}

/// Optional settings gathered from a config file or the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub f_values: Option<Vec<f64>>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub n_max: Option<usize>,
    pub tol: Option<f64>,
    pub outputs: Option<Vec<OutputKind>>,
    pub output_path: Option<PathBuf>,
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.trim().parse().map_err(|_| CliError::Config(format!("bad value for {key}: {raw:?}")))
}

fn parse_list<T, F: Fn(&str) -> Result<T, CliError>>(raw: &str, item: F) -> Result<Vec<T>, CliError> {
    raw.split(',').map(str::trim).filter(|s| !s.is_empty()).map(item).collect()
}

pub fn parse_output(raw: &str) -> Result<OutputKind, CliError> {
    OutputKind::from_str(raw.trim(), false).map_err(|_| CliError::Config(format!("unknown output {raw:?}")))
}

impl Overrides {
    /// Flat `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut o = Self::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
            let key = key.trim().replace('-', "_");
            match key.as_str() {
                "f" | "f_values" => o.f_values = Some(parse_list(value, |s| parse_value("f", s))?),
                "t_min" => o.t_min = Some(parse_value(&key, value)?),
                "t_max" => o.t_max = Some(parse_value(&key, value)?),
                "t_steps" | "steps" => o.steps = Some(parse_value(&key, value)?),
                "n_max" => o.n_max = Some(parse_value(&key, value)?),
                "tol" => o.tol = Some(parse_value(&key, value)?),
                "output" | "outputs" => o.outputs = Some(parse_list(value, parse_output)?),
                "out_dir" | "output_path" => o.output_path = Some(PathBuf::from(value.trim())),
                other => return Err(CliError::Config(format!("line {}: unknown key {other:?}", no + 1))),
            }
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Later settings win.
    pub fn layer(self, top: Self) -> Self {
        Self {
            f_values: top.f_values.or(self.f_values),
            t_min: top.t_min.or(self.t_min),
            t_max: top.t_max.or(self.t_max),
            steps: top.steps.or(self.steps),
            n_max: top.n_max.or(self.n_max),
            tol: top.tol.or(self.tol),
            outputs: top.outputs.or(self.outputs),
            output_path: top.output_path.or(self.output_path),
        }
    }

    pub fn resolve(self) -> Result<SweepConfig, CliError> {
        let d = SweepConfig::default();
        let mut outputs = self.outputs.unwrap_or(d.outputs);
        outputs.sort();
        outputs.dedup();
        let cfg = SweepConfig {
            f_values: self.f_values.unwrap_or(d.f_values),
            t_grid: TimeGrid {
                t_min: self.t_min.unwrap_or(d.t_grid.t_min),
                t_max: self.t_max.unwrap_or(d.t_grid.t_max),
                steps: self.steps.unwrap_or(d.t_grid.steps),
            },
            n_max: self.n_max.unwrap_or(d.n_max),
            tol: self.tol.unwrap_or(d.tol),
            outputs,
            output_path: self.output_path.unwrap_or(d.output_path),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.t_grid;
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if !(g.t_min >= 0.0) {
            return bad("t_min must be >= 0");
        }
        if !(g.t_max > g.t_min) || !g.t_max.is_finite() {
            return bad("t_max must be finite and exceed t_min");
        }
        if g.steps < 2 {
            return bad("t_steps must be >= 2");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be > 0");
        }
        if self.n_max < 2 {
            return bad("n_max must be >= 2");
        }
        if self.f_values.is_empty() || self.f_values.iter().any(|f| !f.is_finite()) {
            return bad("f needs at least one finite value");
        }
        if self.outputs.is_empty() {
            return bad("no output requested");
        }
        Ok(())
    }
}
