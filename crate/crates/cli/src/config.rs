//! Flat `key = value` run configuration.
//!
//! Keys are the long flag names without the leading dashes. Blank lines and
//! lines starting with `#` are ignored. [`RawConfig::to_text`] writes the set
//! keys in a fixed order, so parsing its output and writing again gives the
//! same bytes.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{config_error, CliError};

/// Subcommand selected for one invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    Simulate,
    Sample,
    Decompose,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Simulate => "simulate",
            Mode::Sample => "sample",
            Mode::Decompose => "decompose",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "simulate" => Ok(Mode::Simulate),
            "sample" => Ok(Mode::Sample),
            "decompose" => Ok(Mode::Decompose),
            _ => Err(format!("unknown mode '{s}' (analytic, simulate, sample, decompose)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (csv, json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Values a sweep axis takes: an evenly spaced range or an explicit list.
#[derive(Debug, Clone, PartialEq)]
pub enum AxisValues {
    Range { min: f64, max: f64, steps: usize },
    List(Vec<f64>),
}

/// One `--sweep` axis, written `param:min:max:steps` or `param:v1,v2,...`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: String,
    pub values: AxisValues,
}

impl SweepAxis {
    pub fn points(&self) -> Vec<f64> {
        match &self.values {
            AxisValues::Range { min, max, steps } => {
                let last = (*steps - 1) as f64;
                (0..*steps).map(|i| if i + 1 == *steps { *max } else { min + (max - min) * i as f64 / last }).collect()
            }
            AxisValues::List(v) => v.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match &self.values {
            AxisValues::Range { steps, .. } => *steps,
            AxisValues::List(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let number = |t: &str| -> Result<f64, String> {
            let v: f64 = t.trim().parse().map_err(|_| format!("'{t}' is not a number in axis '{s}'"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("axis '{s}' has a non-finite value"))
            }
        };
        let (param, values) = match parts.as_slice() {
            [p, min, max, steps] => {
                let steps: usize = steps.trim().parse().map_err(|_| format!("steps '{steps}' is not a count"))?;
                if steps < 2 {
                    return Err(format!("axis '{s}' needs at least 2 steps"));
                }
                (*p, AxisValues::Range { min: number(min)?, max: number(max)?, steps })
            }
            [p, list] if list.contains(',') => {
                let v = list.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
                (*p, AxisValues::List(v))
            }
            _ => return Err(format!("axis '{s}' is not param:min:max:steps or param:v1,v2,...")),
        };
        if !SWEEP_PARAMS.contains(&param) {
            return Err(format!("unknown sweep parameter '{param}' (one of {})", SWEEP_PARAMS.join(", ")));
        }
        Ok(SweepAxis { param: param.to_string(), values })
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.values {
            AxisValues::Range { min, max, steps } => write!(f, "{}:{min}:{max}:{steps}", self.param),
            AxisValues::List(v) => {
                let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}:{}", self.param, list.join(","))
            }
        }
    }
}

/// Parameters an analytic sweep may vary.
pub const SWEEP_PARAMS: &[&str] = &["n", "sources", "r", "eta", "eta-herald", "eta-out", "epsilon", "epsilon-prime"];

/// Every settable key, in the order they are written.
pub const KEYS: &[&str] = &[
    "mode",
    "preset",
    "formula",
    "n",
    "sources",
    "modes",
    "r",
    "eta",
    "eta-herald",
    "eta-out",
    "epsilon",
    "epsilon-prime",
    "seed",
    "trials",
    "workers",
    "sweep",
    "format",
    "out",
    "dump-trials",
];

/// Configuration as written by the user: every field optional. Defaults and
/// presets are applied later, when the run is resolved.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub mode: Option<Mode>,
    pub preset: Option<String>,
    pub formula: Option<String>,
    pub n: Option<u32>,
    pub sources: Option<u64>,
    pub modes: Option<usize>,
    pub r: Option<f64>,
    pub eta: Option<f64>,
    pub eta_herald: Option<f64>,
    pub eta_out: Option<f64>,
    pub epsilon: Option<f64>,
    pub epsilon_prime: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub workers: Option<usize>,
    pub sweep: Vec<SweepAxis>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub dump_trials: Option<PathBuf>,
}

fn parse_field<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| config_error(key, format!("cannot parse '{value}': {e}")))
}

impl RawConfig {
    /// Sets one key. `sweep` appends an axis; every other key replaces.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "mode" => self.mode = Some(parse_field(key, value)?),
            "preset" => self.preset = Some(value.to_string()),
            "formula" => self.formula = Some(value.to_string()),
            "n" => self.n = Some(parse_field(key, value)?),
            "sources" => self.sources = Some(parse_field(key, value)?),
            "modes" => self.modes = Some(parse_field(key, value)?),
            "r" => self.r = Some(parse_field(key, value)?),
            "eta" => self.eta = Some(parse_field(key, value)?),
            "eta-herald" => self.eta_herald = Some(parse_field(key, value)?),
            "eta-out" => self.eta_out = Some(parse_field(key, value)?),
            "epsilon" => self.epsilon = Some(parse_field(key, value)?),
            "epsilon-prime" => self.epsilon_prime = Some(parse_field(key, value)?),
            "seed" => self.seed = Some(parse_field(key, value)?),
            "trials" => self.trials = Some(parse_field(key, value)?),
            "workers" => self.workers = Some(parse_field(key, value)?),
            "sweep" => {
                if self.sweep.len() == 2 {
                    return Err(config_error("sweep", "at most two sweep axes"));
                }
                let axis: SweepAxis = parse_field(key, value)?;
                if self.sweep.iter().any(|a| a.param == axis.param) {
                    return Err(config_error("sweep", format!("parameter '{}' swept twice", axis.param)));
                }
                self.sweep.push(axis);
            }
            "format" => self.format = Some(parse_field(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "dump-trials" => self.dump_trials = Some(PathBuf::from(value)),
            _ => return Err(config_error(key, "unknown configuration key")),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(config_error("config", format!("line {}: expected 'key = value'", lineno + 1)));
            };
            cfg.set(key.trim(), value)?;
        }
        Ok(cfg)
    }

    /// Later settings win; sweep axes from `other` replace ours when present.
    pub fn overlay(&mut self, other: RawConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            mode,
            preset,
            formula,
            n,
            sources,
            modes,
            r,
            eta,
            eta_herald,
            eta_out,
            epsilon,
            epsilon_prime,
            seed,
            trials,
            workers,
            format,
            out,
            dump_trials
        );
        if !other.sweep.is_empty() {
            self.sweep = other.sweep;
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        for &key in KEYS {
            match key {
                "mode" => self.mode.map(|m| line(key, m.name().into())),
                "preset" => self.preset.clone().map(|v| line(key, v)),
                "formula" => self.formula.clone().map(|v| line(key, v)),
                "n" => self.n.map(|v| line(key, v.to_string())),
                "sources" => self.sources.map(|v| line(key, v.to_string())),
                "modes" => self.modes.map(|v| line(key, v.to_string())),
                "r" => self.r.map(|v| line(key, v.to_string())),
                "eta" => self.eta.map(|v| line(key, v.to_string())),
                "eta-herald" => self.eta_herald.map(|v| line(key, v.to_string())),
                "eta-out" => self.eta_out.map(|v| line(key, v.to_string())),
                "epsilon" => self.epsilon.map(|v| line(key, v.to_string())),
                "epsilon-prime" => self.epsilon_prime.map(|v| line(key, v.to_string())),
                "seed" => self.seed.map(|v| line(key, v.to_string())),
                "trials" => self.trials.map(|v| line(key, v.to_string())),
                "workers" => self.workers.map(|v| line(key, v.to_string())),
                "sweep" => {
                    for axis in &self.sweep {
                        line(key, axis.to_string());
                    }
                    Some(())
                }
                "format" => self.format.map(|v| line(key, v.to_string())),
                "out" => self.out.as_ref().map(|v| line(key, v.display().to_string())),
                "dump-trials" => self.dump_trials.as_ref().map(|v| line(key, v.display().to_string())),
                _ => unreachable!("key list and writer disagree"),
            };
        }
        out
    }
}
