//! Experiment configuration. JSON with SI units throughout.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::crossbar::CS_MAX;
use crate::device::Environment;
use crate::error::{Error, Result};
use crate::puf::PufConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Uniformity, bit-aliasing, uniqueness, diffuseness (and BER if trials > 1).
    Metrics,
    /// Bit error rate over a grid of column counts and sense margins.
    Reliability,
    /// Selection-level avalanche maps and challenge-flip tests.
    Sac,
    /// Power-leakage SNR against dummy cell count.
    Snr,
}

/// Sample sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Counts {
    /// PUF instances (p).
    pub instances: usize,
    /// Challenge sets per instance (c); each set yields one response.
    pub challenges: usize,
    /// Repeated evaluations of every challenge (tr).
    pub trials: usize,
    /// Challenges per set, i.e. bits per response (n).
    pub response_bits: usize,
}

impl Default for Counts {
    fn default() -> Self {
        Self {
            instances: 10,
            challenges: 16,
            trials: 1,
            response_bits: 64,
        }
    }
}

/// Parameter grids for the sweeping experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub cs_values: Vec<usize>,
    /// Sense margins in A.
    pub sense_margins: Vec<f64>,
    pub dummy_counts: Vec<usize>,
    /// Bits per power trace.
    pub trace_length: usize,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            cs_values: (1..=CS_MAX).collect(),
            sense_margins: (1..=10).map(|k| k as f64 * 10e-9).collect(),
            dummy_counts: vec![0, 1, 2, 4, 8, 16, 32],
            trace_length: 2000,
        }
    }
}

/// Avalanche and worst-case settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SacSettings {
    /// Largest number of replaced columns in the map.
    pub max_j: usize,
    /// Largest number of replaced rows in the map (at most 2).
    pub max_k: usize,
    /// Perturbed selections per map cell.
    pub samples: usize,
    /// Reference selections averaged per instance.
    pub references: usize,
    /// Challenge-bit flip counts for the challenge-level test.
    pub hd_values: Vec<usize>,
    /// Base challenges per challenge-level test.
    pub base_challenges: usize,
    /// Clustered challenge sets per instance for worst-case uniformity.
    pub worst_case_sets: usize,
    /// Maximum distance of a clustered challenge from its set's base.
    pub worst_case_max_hd: usize,
}

impl Default for SacSettings {
    fn default() -> Self {
        Self {
            max_j: 5,
            max_k: 2,
            samples: 200,
            references: 8,
            hd_values: vec![1, 2, 3, 4, 5],
            base_challenges: 500,
            worst_case_sets: 20,
            worst_case_max_hd: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub master_seed: u64,
    #[serde(default)]
    pub puf: PufConfig,
    #[serde(default)]
    pub environment: Environment,
    #[serde(default)]
    pub counts: Counts,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default)]
    pub sac: SacSettings,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, master_seed: u64) -> Self {
        Self {
            kind,
            master_seed,
            puf: PufConfig::default(),
            environment: Environment::default(),
            counts: Counts::default(),
            sweep: Sweep::default(),
            sac: SacSettings::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.puf.validate()?;
        self.environment.validate()?;
        let c = &self.counts;
        for (v, name) in [
            (c.instances, "counts.instances"),
            (c.challenges, "counts.challenges"),
            (c.trials, "counts.trials"),
            (c.response_bits, "counts.response_bits"),
        ] {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be >= 1")));
            }
        }
        match self.kind {
            ExperimentKind::Metrics => {}
            ExperimentKind::Reliability => {
                if c.trials < 2 {
                    return Err(Error::invalid("reliability needs counts.trials >= 2"));
                }
                if self.sweep.cs_values.is_empty() || self.sweep.sense_margins.is_empty() {
                    return Err(Error::invalid("reliability needs cs_values and sense_margins"));
                }
                for &cs in &self.sweep.cs_values {
                    if cs == 0 || cs > CS_MAX || cs > self.puf.cols {
                        return Err(Error::invalid(format!("sweep cs value {cs} unsupported")));
                    }
                }
                if self.sweep.sense_margins.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
                    return Err(Error::invalid("sense margins must be >= 0"));
                }
            }
            ExperimentKind::Sac => {
                let s = &self.sac;
                if s.samples == 0 || s.references == 0 || s.base_challenges == 0 {
                    return Err(Error::invalid("sac samples, references and base_challenges must be >= 1"));
                }
                if s.max_j > self.puf.cs || s.max_j > self.puf.cols - self.puf.cs {
                    return Err(Error::invalid(format!("sac.max_j = {} exceeds cs", s.max_j)));
                }
                if s.max_k > 2 || s.max_k > self.puf.rows - 2 {
                    return Err(Error::invalid(format!("sac.max_k = {} exceeds 2", s.max_k)));
                }
                if s.hd_values.iter().any(|&h| h > 64) {
                    return Err(Error::invalid("hd values must be <= 64"));
                }
                if s.worst_case_max_hd == 0 || s.worst_case_max_hd > 64 {
                    return Err(Error::invalid("worst_case_max_hd must lie in 1..=64"));
                }
            }
            ExperimentKind::Snr => {
                let cells = self.puf.dummy_rows * self.puf.dummy_cols;
                if self.sweep.dummy_counts.is_empty() {
                    return Err(Error::invalid("snr needs dummy_counts"));
                }
                if let Some(&d) = self.sweep.dummy_counts.iter().find(|&&d| d > cells) {
                    return Err(Error::invalid(format!("dummy count {d} exceeds {cells} dummy cells")));
                }
                if self.sweep.trace_length < 3 {
                    return Err(Error::invalid("trace_length must be >= 3"));
                }
            }
        }
        Ok(())
    }
}
