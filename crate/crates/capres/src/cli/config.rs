//! Experiment configuration (TOML).

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::QuadratureConfig;
use crate::sl2::ktype::KTypeConfig;
use crate::sl2::model::ModelConfig;
use crate::sl2::orbital::OrbitalConfig;

/// The experiments exposed by the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum Experiment {
    /// Dilation (Mellin) inversion and the Plancherel pairing.
    MellinCheck,
    /// O(1,1) resolvent: continuation and the residue at zero.
    O11Resonance,
    /// Action of the element `s` on circle modes.
    O11Rep,
    /// Weil-representation relations and Θ².
    WeilCheck,
    /// SL(2,ℝ) model resolvent: continuation, resonances and residues.
    Sl2Model,
    /// SL(2,ℝ) from concrete test functions: f_ε, residues, K-type forms.
    Sl2Endtoend,
    /// Capelli identities and the stable-range table.
    CapelliCheck,
    /// Argument-principle resonance scans of the model resolvent.
    ResonanceScan,
}

impl Experiment {
    /// All experiments, in a fixed order.
    pub const ALL: [Experiment; 8] = [
        Experiment::MellinCheck,
        Experiment::O11Resonance,
        Experiment::O11Rep,
        Experiment::WeilCheck,
        Experiment::Sl2Model,
        Experiment::Sl2Endtoend,
        Experiment::CapelliCheck,
        Experiment::ResonanceScan,
    ];

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            Experiment::MellinCheck => "mellin-check",
            Experiment::O11Resonance => "o11-resonance",
            Experiment::O11Rep => "o11-rep",
            Experiment::WeilCheck => "weil-check",
            Experiment::Sl2Model => "sl2-model",
            Experiment::Sl2Endtoend => "sl2-endtoend",
            Experiment::CapelliCheck => "capelli-check",
            Experiment::ResonanceScan => "resonance-scan",
        }
    }

    /// Parses a command-line name.
    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|e| e.name() == name)
    }

    /// Whether the experiment continues the SL(2,ℝ) model resolvent, which
    /// requires a non-integer shift `L`.
    pub fn uses_sl2_shift(self) -> bool {
        matches!(
            self,
            Experiment::Sl2Model | Experiment::Sl2Endtoend | Experiment::ResonanceScan
        )
    }

    /// Whether the experiment works on `M_{2,p}`.
    pub fn is_sl2(self) -> bool {
        self.uses_sl2_shift() || self == Experiment::CapelliCheck
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Configuration file contents; every key is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    /// Experiment name; must match the command line when present.
    pub experiment: Option<String>,
    /// Adaptive quadrature tolerances.
    pub quadrature: Option<QuadratureConfig>,
    /// Angular truncation of dilation transforms.
    pub k_max: Option<usize>,
    /// Spectral cutoff of the inversion check.
    pub lambda_cutoff: Option<f64>,
    /// Contour shift.
    #[serde(rename = "L", alias = "l")]
    pub l: Option<f64>,
    /// Rank parameter of `O_{p,p}`.
    pub p: Option<usize>,
    /// Output directory.
    pub output_path: Option<PathBuf>,
    /// Seed of the sample-point generator.
    pub seed: Option<u64>,
    /// Record wall-clock runtimes (zero when false, for byte-identical tables).
    pub timing: Option<bool>,
    /// Model-resolvent discretisation.
    pub model: Option<ModelConfig>,
    /// Orbital-integral discretisation.
    pub orbital: Option<OrbitalConfig>,
    /// K-type table discretisation.
    pub ktype: Option<KTypeConfig>,
}

/// Validated configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// The experiment.
    pub experiment: Experiment,
    /// Adaptive quadrature tolerances.
    pub quadrature: QuadratureConfig,
    /// Angular truncation of dilation transforms.
    pub k_max: usize,
    /// Spectral cutoff of the inversion check.
    pub lambda_cutoff: f64,
    /// Contour shift (`N` for O(1,1), `L` for SL(2,ℝ)).
    #[serde(rename = "L")]
    pub l: f64,
    /// Rank parameter of `O_{p,p}`.
    pub p: usize,
    /// Output directory.
    pub output_path: PathBuf,
    /// Seed of the sample-point generator.
    pub seed: u64,
    /// Record wall-clock runtimes.
    pub timing: bool,
    /// Model-resolvent discretisation.
    pub model: ModelConfig,
    /// Orbital-integral discretisation.
    pub orbital: OrbitalConfig,
    /// K-type table discretisation.
    pub ktype: KTypeConfig,
}

/// Default seed.
pub const DEFAULT_SEED: u64 = 20_240_601;

impl ExperimentConfig {
    /// Defaults of `experiment`.
    pub fn defaults(experiment: Experiment) -> Self {
        let (l, model) = match experiment {
            Experiment::Sl2Endtoend => (
                1.5,
                ModelConfig {
                    tail: 1e-5,
                    max_cutoff: 40.0,
                    ..ModelConfig::default()
                },
            ),
            Experiment::Sl2Model | Experiment::ResonanceScan => (4.5, ModelConfig::default()),
            _ => (2.0, ModelConfig::default()),
        };
        Self {
            experiment,
            quadrature: QuadratureConfig::default(),
            k_max: 8,
            lambda_cutoff: 40.0,
            l,
            p: 2,
            output_path: PathBuf::from("results"),
            seed: DEFAULT_SEED,
            timing: true,
            model,
            orbital: OrbitalConfig::default(),
            ktype: KTypeConfig::default(),
        }
    }

    /// Parses TOML text for `experiment` and validates the result.
    pub fn from_toml(experiment: Experiment, text: &str) -> Result<Self> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("cannot parse configuration: {e}")))?;
        Self::from_file(experiment, file)
    }

    /// Reads and validates a configuration file.
    pub fn load(experiment: Experiment, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(experiment, &text)
    }

    /// Merges file values into the defaults and validates.
    pub fn from_file(experiment: Experiment, file: ConfigFile) -> Result<Self> {
        if let Some(name) = &file.experiment {
            match Experiment::from_name(name) {
                Some(e) if e == experiment => {}
                Some(e) => {
                    return Err(Error::InvalidConfig(format!(
                        "the configuration is for experiment {e}, but {experiment} was requested"
                    )))
                }
                None => return Err(Error::InvalidConfig(format!("unknown experiment {name:?}"))),
            }
        }
        let d = Self::defaults(experiment);
        let cfg = Self {
            experiment,
            quadrature: file.quadrature.unwrap_or(d.quadrature),
            k_max: file.k_max.unwrap_or(d.k_max),
            lambda_cutoff: file.lambda_cutoff.unwrap_or(d.lambda_cutoff),
            l: file.l.unwrap_or(d.l),
            p: file.p.unwrap_or(d.p),
            output_path: file.output_path.unwrap_or(d.output_path),
            seed: file.seed.unwrap_or(d.seed),
            timing: file.timing.unwrap_or(d.timing),
            model: file.model.unwrap_or(d.model),
            orbital: file.orbital.unwrap_or(d.orbital),
            ktype: file.ktype.unwrap_or(d.ktype),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the invariants of every field.
    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        if self.k_max > 256 {
            return Err(Error::InvalidConfig(format!("k_max must be at most 256, got {}", self.k_max)));
        }
        if !(self.lambda_cutoff > 0.0 && self.lambda_cutoff.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "lambda_cutoff must be positive and finite, got {}",
                self.lambda_cutoff
            )));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::InvalidConfig(format!("L must be positive and finite, got {}", self.l)));
        }
        if self.experiment.uses_sl2_shift() && self.l.fract() == 0.0 {
            return Err(Error::InvalidConfig(format!(
                "L must be a non-integer for {}: the shifted contour Im λ = −L would pass through the pole −{}i, got L = {}",
                self.experiment, self.l, self.l
            )));
        }
        if self.experiment == Experiment::O11Resonance && self.l < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "the O(1,1) contour shift must be at least 1, got {}",
                self.l
            )));
        }
        if self.experiment.is_sl2() && self.p < 2 {
            return Err(Error::InvalidConfig(format!("p must be at least 2 for {}, got {}", self.experiment, self.p)));
        }
        if self.experiment == Experiment::Sl2Endtoend && self.p != 2 {
            return Err(Error::InvalidConfig(format!(
                "sl2-endtoend works on M_{{2,2}}: p must be 2, got {}",
                self.p
            )));
        }
        if self.experiment == Experiment::CapelliCheck && self.p > 4 {
            return Err(Error::InvalidConfig(format!("capelli-check supports p ≤ 4, got {}", self.p)));
        }
        self.model.validate()?;
        self.orbital.validate()?;
        self.ktype.validate()?;
        Ok(())
    }
}
