//! Experiment configuration: flat `key = value` text with `#` comments.
//!
//! Every key except `n_y`, `n_z` and `n` has a default. Lists are
//! comma-separated. [`ExperimentConfig::to_text`] writes the resolved
//! configuration back in a fixed key order, so equal configs serialize to
//! equal bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::channel::{ElementGain, DEFAULT_SECTOR_GAIN};
use crate::codebook::{
    CodebookConfig, CodebookKind, DEFAULT_BUFFER_GAIN, DEFAULT_BUFFER_WIDTH, DEFAULT_PINV_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::metrics::SweepConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GainModel {
    Sector,
    Isotropic,
}

impl FromStr for GainModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sector" => Ok(GainModel::Sector),
            "isotropic" => Ok(GainModel::Isotropic),
            _ => Err(Error::config(format!(
                "gain_model must be 'sector' or 'isotropic', got '{s}'"
            ))),
        }
    }
}

impl GainModel {
    fn name(self) -> &'static str {
        match self {
            GainModel::Sector => "sector",
            GainModel::Isotropic => "isotropic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n_y: usize,
    pub n_z: usize,
    pub n: usize,
    pub buffer_width: usize,
    pub buffer_gain: f64,
    pub pinv_tolerance: f64,
    pub gain_model: GainModel,
    pub sector_gain: f64,
    pub transmit_power: f64,
    pub split_phase1_power: bool,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub codebooks: Vec<CodebookKind>,
    pub output_dir: PathBuf,
    pub pattern_resolution: usize,
    pub worstcase_n: Vec<usize>,
    pub worstcase_resolution: usize,
    pub worstcase_codebooks: Vec<CodebookKind>,
}

const KEYS: &[&str] = &[
    "n_y",
    "n_z",
    "n",
    "buffer_width",
    "buffer_gain",
    "pinv_tolerance",
    "gain_model",
    "sector_gain",
    "transmit_power",
    "split_phase1_power",
    "snr_db",
    "trials",
    "seed",
    "codebooks",
    "output_dir",
    "pattern_resolution",
    "worstcase_n",
    "worstcase_resolution",
    "worstcase_codebooks",
];

/// Raw key/value pairs, later entries overriding earlier ones.
#[derive(Debug, Clone, Default)]
pub struct ConfigSource {
    entries: BTreeMap<String, String>,
}

impl ConfigSource {
    pub fn parse(text: &str) -> Result<Self> {
        let mut src = ConfigSource::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected key = value, got '{line}'", lineno + 1)))?;
            src.set(key.trim(), value.trim())?;
        }
        Ok(src)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::config(format!("unknown config key '{key}'")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Apply a `key=value` override as given on the command line.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::config(format!("override must be key=value, got '{pair}'")))?;
        self.set(k.trim(), v.trim())
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::config(format!("cannot parse {key} = '{v}'")))
            })
            .transpose()
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| Error::config(format!("missing required key '{key}'")))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.entries
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<T>()
                            .map_err(|_| Error::config(format!("cannot parse {key} entry '{s}'")))
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let cfg = ExperimentConfig {
            n_y: self.require("n_y")?,
            n_z: self.require("n_z")?,
            n: self.require("n")?,
            buffer_width: self.get("buffer_width")?.unwrap_or(DEFAULT_BUFFER_WIDTH),
            buffer_gain: self.get("buffer_gain")?.unwrap_or(DEFAULT_BUFFER_GAIN),
            pinv_tolerance: self.get("pinv_tolerance")?.unwrap_or(DEFAULT_PINV_TOLERANCE),
            gain_model: self.get("gain_model")?.unwrap_or(GainModel::Sector),
            sector_gain: self.get("sector_gain")?.unwrap_or(DEFAULT_SECTOR_GAIN),
            transmit_power: self.get("transmit_power")?.unwrap_or(1.0),
            split_phase1_power: self.get("split_phase1_power")?.unwrap_or(false),
            snr_db: self
                .list("snr_db")?
                .unwrap_or_else(|| vec![-10.0, 0.0, 10.0, 20.0, 30.0, 40.0]),
            trials: self.get("trials")?.unwrap_or(500),
            seed: self.get("seed")?.unwrap_or(0),
            codebooks: self
                .list("codebooks")?
                .unwrap_or_else(|| vec![CodebookKind::Proposed, CodebookKind::InverseNoBuffer]),
            output_dir: self.get("output_dir")?.unwrap_or_else(|| PathBuf::from("out")),
            pattern_resolution: self.get("pattern_resolution")?.unwrap_or(129),
            worstcase_n: self.list("worstcase_n")?.unwrap_or_else(|| vec![2, 4, 8]),
            worstcase_resolution: self.get("worstcase_resolution")?.unwrap_or(512),
            worstcase_codebooks: self.list("worstcase_codebooks")?.unwrap_or_else(|| {
                vec![
                    CodebookKind::Proposed,
                    CodebookKind::UniformReal,
                    CodebookKind::UniformVirtual,
                ]
            }),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        ConfigSource::parse(text)?.resolve()
    }

    pub fn validate(&self) -> Result<()> {
        self.codebook_config()?;
        if self.trials < 1 {
            return Err(Error::config(format!("trials must be at least 1, got {}", self.trials)));
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::config("snr_db must be a non-empty list of finite values"));
        }
        if self.codebooks.is_empty() || self.worstcase_codebooks.is_empty() {
            return Err(Error::config("codebook lists must not be empty"));
        }
        if [self.sector_gain, self.transmit_power]
            .iter()
            .any(|v| v.is_nan() || *v <= 0.0)
        {
            return Err(Error::config("sector_gain and transmit_power must be positive"));
        }
        if self.pattern_resolution < 2 {
            return Err(Error::config("pattern_resolution must be at least 2"));
        }
        if self.worstcase_resolution < crate::metrics::MIN_WORST_CASE_RESOLUTION {
            return Err(Error::config(format!(
                "worstcase_resolution must be at least {}",
                crate::metrics::MIN_WORST_CASE_RESOLUTION
            )));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::new(self.n_y, self.n_z).map_err(|e| Error::config(e.to_string()))
    }

    pub fn codebook_config(&self) -> Result<CodebookConfig> {
        CodebookConfig::new(self.geometry()?, self.n)?
            .with_buffer(self.buffer_width, self.buffer_gain)?
            .with_pinv_tolerance(self.pinv_tolerance)
    }

    pub fn element_gain(&self) -> ElementGain {
        match self.gain_model {
            GainModel::Sector => ElementGain::IdealSector(self.sector_gain),
            GainModel::Isotropic => ElementGain::Isotropic(self.sector_gain),
        }
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let mut s = SweepConfig::new(self.codebook_config()?, self.seed);
        s.tx_gain = self.element_gain();
        s.rx_gain = self.element_gain();
        s.transmit_power = self.transmit_power;
        s.split_phase1_power = self.split_phase1_power;
        Ok(s)
    }

    /// Canonical `key = value` form, one key per line in a fixed order.
    pub fn to_text(&self) -> String {
        fn join<T: ToString>(xs: &[T]) -> String {
            xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
        }
        let values = [
            self.n_y.to_string(),
            self.n_z.to_string(),
            self.n.to_string(),
            self.buffer_width.to_string(),
            self.buffer_gain.to_string(),
            self.pinv_tolerance.to_string(),
            self.gain_model.name().to_string(),
            self.sector_gain.to_string(),
            self.transmit_power.to_string(),
            self.split_phase1_power.to_string(),
            join(&self.snr_db),
            self.trials.to_string(),
            self.seed.to_string(),
            join(&self.codebooks),
            self.output_dir.display().to_string(),
            self.pattern_resolution.to_string(),
            join(&self.worstcase_n),
            self.worstcase_resolution.to_string(),
            join(&self.worstcase_codebooks),
        ];
        let mut out = String::new();
        for (k, v) in KEYS.iter().zip(values) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}
