//! Turns a [`RawConfig`] into a validated [`RunConfig`]: presets, defaults,
//! range checks and resource caps.

use std::path::PathBuf;

use spdc_boson::analytic::{ArchitectureParams, ConfidenceBounds, DetectorModel, SpdcParams};
use spdc_boson::distribution::DEFAULT_ENUMERATION_CAP;
use spdc_boson::permanent::DEFAULT_PERMANENT_CAP;
use spdc_boson::Caps;

use crate::config::{Format, Mode, RawConfig, SweepAxis};
use crate::error::{config_error, CliError};
use crate::formula::Formula;

pub const PERMANENT_CAP_ENV: &str = "SPDC_BOSON_PERMANENT_CAP";
pub const ENUMERATION_CAP_ENV: &str = "SPDC_BOSON_ENUMERATION_CAP";

/// Named bundles of settings. Explicit keys always win over a preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Preparation probability over source count and herald efficiency.
    Fig2,
    /// Bounded-fidelity limit over squeezing for four confidence levels.
    Fig4,
    /// Post-selection probability at fixed fidelity over squeezing and n.
    Fig5,
    /// Two-mode balanced beamsplitter with input (1,1).
    Beamsplitter,
    /// Identity interferometer.
    Identity,
}

impl Preset {
    pub const NAMES: &'static [&'static str] = &["fig2", "fig4", "fig5", "beamsplitter", "identity"];

    fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "fig2" => Preset::Fig2,
            "fig4" => Preset::Fig4,
            "fig5" => Preset::Fig5,
            "beamsplitter" => Preset::Beamsplitter,
            "identity" => Preset::Identity,
            _ => return Err(config_error("preset", format!("unknown preset '{s}' ({})", Self::NAMES.join(", ")))),
        })
    }

    fn modes_allowed(self) -> &'static [Mode] {
        match self {
            Preset::Fig2 | Preset::Fig4 | Preset::Fig5 => &[Mode::Analytic],
            Preset::Beamsplitter | Preset::Identity => &[Mode::Simulate, Mode::Sample, Mode::Decompose],
        }
    }

    fn settings(self) -> &'static str {
        match self {
            Preset::Fig2 => {
                "formula = prep_prob\nn = 20\nr = 0.5\nsweep = sources:20:2000:100\nsweep = eta-herald:0.1:1:10\n"
            }
            Preset::Fig4 => "formula = par_prob_limit\nsweep = epsilon:0.25,0.5,0.75,0.95\nsweep = r:0:3:61\n",
            Preset::Fig5 => {
                "formula = post_prob_given_fidelity\nepsilon-prime = 0.9\nsweep = r:0.04:2:50\nsweep = n:1:50:50\n"
            }
            Preset::Beamsplitter => "n = 2\nmodes = 2\n",
            Preset::Identity => "",
        }
    }
}

/// Which interferometer a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitarySource {
    Haar { modes: usize, seed: u64 },
    Beamsplitter,
    Identity { modes: usize },
}

impl UnitarySource {
    /// Header text from which the matrix can be rebuilt.
    pub fn describe(&self) -> String {
        match self {
            UnitarySource::Haar { modes, seed } => format!("haar(modes={modes}, seed={seed})"),
            UnitarySource::Beamsplitter => "beamsplitter".to_string(),
            UnitarySource::Identity { modes } => format!("identity(modes={modes})"),
        }
    }

    pub fn build(&self) -> Result<spdc_boson::Interferometer, CliError> {
        Ok(match *self {
            UnitarySource::Haar { modes, seed } => spdc_boson::unitary::haar_unitary(modes, seed)?,
            UnitarySource::Beamsplitter => spdc_boson::Interferometer::balanced_beamsplitter(),
            UnitarySource::Identity { modes } => spdc_boson::Interferometer::identity(modes)?,
        })
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    /// The effective configuration after presets, as it would be saved.
    pub effective: RawConfig,
    pub n: u32,
    pub sources: u64,
    pub modes: usize,
    pub r: f64,
    pub eta_herald: f64,
    pub eta_out: f64,
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub seed: u64,
    pub trials: u64,
    pub workers: Option<usize>,
    pub formula: Formula,
    pub sweep: Vec<SweepAxis>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub dump_trials: Option<PathBuf>,
    pub unitary: UnitarySource,
    pub caps: Caps,
}

fn check_unit(field: &str, v: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(config_error(field, format!("{v} is outside [0, 1]")))
    }
}

fn env_cap(var: &str, default: u128) -> Result<u128, CliError> {
    match std::env::var(var) {
        Ok(s) => match s.trim().parse::<u128>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(config_error(var, format!("'{s}' is not a positive integer"))),
        },
        Err(_) => Ok(default),
    }
}

impl RunConfig {
    pub fn resolve(mode: Mode, user: RawConfig) -> Result<Self, CliError> {
        if let Some(m) = user.mode {
            if m != mode {
                return Err(config_error(
                    "mode",
                    format!("config is for '{}' but '{}' was invoked", m.name(), mode.name()),
                ));
            }
        }
        let preset = user.preset.as_deref().map(Preset::parse).transpose()?;
        let mut raw = RawConfig::default();
        if let Some(p) = preset {
            if !p.modes_allowed().contains(&mode) {
                return Err(config_error(
                    "preset",
                    format!("preset '{}' does not apply to '{}'", user.preset.as_deref().unwrap_or(""), mode.name()),
                ));
            }
            raw = RawConfig::parse(p.settings()).expect("preset settings parse");
        }
        raw.overlay(user);
        raw.mode = Some(mode);

        let n = raw.n.unwrap_or(3);
        if n == 0 {
            return Err(config_error("n", "need at least one photon"));
        }
        let modes = raw.modes.unwrap_or((n as usize) * (n as usize));
        let sources = raw.sources.unwrap_or(40);
        let r = raw.r.unwrap_or(0.5);
        if !(r.is_finite() && r >= 0.0) {
            return Err(config_error("r", format!("{r} must be finite and non-negative")));
        }
        let eta = check_unit("eta", raw.eta.unwrap_or(0.9))?;
        let eta_herald = check_unit("eta-herald", raw.eta_herald.unwrap_or(eta))?;
        let eta_out = check_unit("eta-out", raw.eta_out.unwrap_or(eta))?;
        let epsilon = raw.epsilon.unwrap_or(spdc_boson::analytic::DEFAULT_EPSILON);
        let epsilon_prime = raw.epsilon_prime.unwrap_or(spdc_boson::analytic::DEFAULT_EPSILON_PRIME);
        ConfidenceBounds::new(epsilon, 0.5).map_err(|e| config_error("epsilon", e.to_string()))?;
        ConfidenceBounds::new(0.5, epsilon_prime).map_err(|e| config_error("epsilon-prime", e.to_string()))?;
        let trials = raw.trials.unwrap_or(100_000);
        if trials == 0 && matches!(mode, Mode::Simulate | Mode::Sample) {
            return Err(config_error("trials", "must be at least 1"));
        }
        if raw.workers == Some(0) {
            return Err(config_error("workers", "must be at least 1"));
        }
        let formula_name = raw.formula.clone().unwrap_or_else(|| "prep_prob".to_string());
        let formula = Formula::from_name(&formula_name).ok_or_else(|| {
            config_error("formula", format!("unknown formula '{formula_name}' ({})", Formula::names().join(", ")))
        })?;
        if mode != Mode::Analytic && !raw.sweep.is_empty() {
            return Err(config_error("sweep", format!("sweeps only apply to 'analytic', not '{}'", mode.name())));
        }
        if mode == Mode::Analytic {
            formula.check_axes(&raw.sweep)?;
        }
        if raw.dump_trials.is_some() && mode != Mode::Simulate {
            return Err(config_error("dump-trials", "only 'simulate' records trials"));
        }
        let seed = raw.seed.unwrap_or(1);
        let unitary = match preset {
            Some(Preset::Beamsplitter) => {
                if modes != 2 {
                    return Err(config_error("modes", "the beamsplitter preset has exactly 2 modes"));
                }
                UnitarySource::Beamsplitter
            }
            Some(Preset::Identity) => UnitarySource::Identity { modes },
            _ => UnitarySource::Haar { modes, seed },
        };
        if matches!(mode, Mode::Simulate | Mode::Sample) && modes < n as usize {
            return Err(config_error("modes", format!("{modes} modes cannot hold the {n}-photon input")));
        }
        if modes == 0 {
            return Err(config_error("modes", "need at least one mode"));
        }
        if mode == Mode::Simulate && sources < n as u64 {
            return Err(config_error("sources", format!("{sources} sources cannot supply {n} photons")));
        }
        let permanent = env_cap(PERMANENT_CAP_ENV, DEFAULT_PERMANENT_CAP as u128)?;
        let caps = Caps {
            permanent: usize::try_from(permanent).unwrap_or(usize::MAX),
            enumeration: env_cap(ENUMERATION_CAP_ENV, DEFAULT_ENUMERATION_CAP)?,
        };
        Ok(Self {
            mode,
            n,
            sources,
            modes,
            r,
            eta_herald,
            eta_out,
            epsilon,
            epsilon_prime,
            seed,
            trials,
            workers: raw.workers,
            formula,
            sweep: raw.sweep.clone(),
            format: raw.format.unwrap_or(Format::Csv),
            out: raw.out.clone(),
            dump_trials: raw.dump_trials.clone(),
            unitary,
            caps,
            effective: raw,
        })
    }

    pub fn architecture(&self) -> Result<ArchitectureParams, CliError> {
        let spdc = SpdcParams::new(self.r).map_err(|e| config_error("r", e.to_string()))?;
        let herald = DetectorModel::new(self.eta_herald).map_err(|e| config_error("eta-herald", e.to_string()))?;
        let out = DetectorModel::new(self.eta_out).map_err(|e| config_error("eta-out", e.to_string()))?;
        ArchitectureParams::with_modes(self.n, self.sources, self.modes, spdc, herald, out)
            .map_err(|e| config_error("n", e.to_string()))
    }
}
