//! Flat key=value experiment configuration with CLI flag overrides.

use crate::CliError;
use geomkit::Rect;
use mgsolve::SmootherKind;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DegreeSpec {
    Uniform(usize),
    /// Coarsest level first; length must match the level count.
    PerLevel(Vec<usize>),
}

impl DegreeSpec {
    pub fn for_levels(&self, levels: usize) -> Result<Vec<usize>, CliError> {
        match self {
            DegreeSpec::Uniform(p) => Ok(vec![*p; levels]),
            DegreeSpec::PerLevel(v) => {
                if v.len() != levels {
                    return Err(CliError::Usage(format!(
                        "{} degrees listed for {} levels",
                        v.len(),
                        levels
                    )));
                }
                Ok(v.clone())
            }
        }
    }

    pub fn label(&self, levels: usize) -> String {
        match self {
            DegreeSpec::Uniform(p) => p.to_string(),
            DegreeSpec::PerLevel(v) => v
                .iter()
                .take(levels)
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join("/"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableId {
    T1,
    T2,
    T3,
    T4,
}

impl TableId {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_uppercase().as_str() {
            "T1" => Ok(TableId::T1),
            "T2" => Ok(TableId::T2),
            "T3" => Ok(TableId::T3),
            "T4" => Ok(TableId::T4),
            other => Err(CliError::Usage(format!("unknown table id {other} (use T1..T4)"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TableId::T1 => "T1",
            TableId::T2 => "T2",
            TableId::T3 => "T3",
            TableId::T4 => "T4",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub domain: Rect,
    /// Finest-level cell counts; several values mean a sweep.
    pub cells: Vec<usize>,
    pub levels: usize,
    /// True when the user set --levels explicitly (tables otherwise sweep
    /// their own default grid).
    pub levels_explicit: bool,
    pub degrees: DegreeSpec,
    /// True when the user set --p explicitly (table runners otherwise use
    /// their own defaults).
    pub degrees_explicit: bool,
    pub smoother: SmootherKind,
    pub m1: usize,
    pub m2: usize,
    pub c_sigma: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub cg_max_iters: usize,
    pub seed: u64,
    pub lloyd: usize,
    pub mms: bool,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            domain: Rect::UNIT,
            cells: vec![512],
            levels: 2,
            levels_explicit: false,
            degrees: DegreeSpec::Uniform(1),
            degrees_explicit: false,
            smoother: SmootherKind::Richardson,
            m1: 5,
            m2: 5,
            c_sigma: 10.0,
            tol: 1e-8,
            max_iters: 500,
            cg_max_iters: 20000,
            seed: 1,
            lloyd: 20,
            mms: false,
            out: PathBuf::from("out"),
        }
    }
}

fn parse_usize(key: &str, v: &str) -> Result<usize, CliError> {
    v.parse().map_err(|_| CliError::Usage(format!("bad integer for {key}: {v}")))
}

fn parse_f64(key: &str, v: &str) -> Result<f64, CliError> {
    v.parse().map_err(|_| CliError::Usage(format!("bad number for {key}: {v}")))
}

impl ExperimentConfig {
    /// Apply one `key value` setting (flag names without the leading `--`).
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "cells" => {
                self.cells = value
                    .split(',')
                    .map(|t| parse_usize("cells", t.trim()))
                    .collect::<Result<_, _>>()?;
                if self.cells.is_empty() {
                    return Err(CliError::Usage("empty cells list".into()));
                }
            }
            "levels" => {
                self.levels = parse_usize("levels", value)?;
                self.levels_explicit = true;
            }
            "p" => {
                self.degrees_explicit = true;
                if value.contains(',') {
                    let v: Vec<usize> = value
                        .split(',')
                        .map(|t| parse_usize("p", t.trim()))
                        .collect::<Result<_, _>>()?;
                    self.degrees = DegreeSpec::PerLevel(v);
                } else {
                    self.degrees = DegreeSpec::Uniform(parse_usize("p", value)?);
                }
            }
            "m" => {
                let m = parse_usize("m", value)?;
                self.m1 = m;
                self.m2 = m;
            }
            "m1" => self.m1 = parse_usize("m1", value)?,
            "m2" => self.m2 = parse_usize("m2", value)?,
            "smoother" => {
                self.smoother = match value.to_ascii_lowercase().as_str() {
                    "richardson" => SmootherKind::Richardson,
                    "as" | "schwarz" => SmootherKind::AdditiveSchwarz,
                    other => {
                        return Err(CliError::Usage(format!(
                            "unknown smoother {other} (richardson|as)"
                        )))
                    }
                };
            }
            "csigma" => self.c_sigma = parse_f64("csigma", value)?,
            "tol" => {
                self.tol = parse_f64("tol", value)?;
                if !(self.tol > 0.0 && self.tol < 1.0) {
                    return Err(CliError::Usage(format!("tol must be in (0,1): {value}")));
                }
            }
            "max-iters" | "max_iters" => self.max_iters = parse_usize("max-iters", value)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad seed: {value}")))?;
            }
            "lloyd" => self.lloyd = parse_usize("lloyd", value)?,
            "mms" => {
                self.mms = match value {
                    "true" | "1" | "" => true,
                    "false" | "0" => false,
                    other => return Err(CliError::Usage(format!("bad mms flag: {other}"))),
                };
            }
            "out" => self.out = PathBuf::from(value),
            other => return Err(CliError::Usage(format!("unknown option --{other}"))),
        }
        Ok(())
    }

    /// Load `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, path: &std::path::Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{path:?}: {e}")))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{path:?}:{}: expected key = value", lineno + 1))
            })?;
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }
}
