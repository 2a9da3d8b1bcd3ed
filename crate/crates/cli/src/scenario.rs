//! Scenario files: strict JSON documents carrying every scalar parameter
//! of one system. Unknown keys are rejected so a typo cannot silently
//! corrupt a reproduction; SNRs are stored as exact linear values (the
//! bundled files note the dB conversion in `notes`).

use isac_rdb::channels::SystemConfig;
use isac_rdb::nakagami::NakagamiParams;
use isac_rdb::occupancy::OccupancyConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    /// Free-form commentary (e.g. dB-to-linear conversions).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub system: SystemSection,
    pub nakagami: NakagamiSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupancy: Option<OccupancySection>,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(rename = "M")]
    pub tx_antennas: usize,
    #[serde(rename = "N_s")]
    pub sensing_antennas: usize,
    #[serde(rename = "N_c")]
    pub comm_antennas: usize,
    #[serde(rename = "T")]
    pub coherence_length: usize,
    #[serde(rename = "P0")]
    pub avg_power: f64,
    pub sigma2_s: f64,
    pub sigma2_c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NakagamiSection {
    pub m_s: f64,
    pub omega_s: f64,
    pub m_c: f64,
    pub omega_c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OccupancySection {
    pub p1: f64,
    pub alpha_mag: f64,
    pub phi_deg: f64,
    #[serde(rename = "sigma2_W")]
    pub sigma2_diffuse: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_draws")]
    pub n_draws: u64,
    #[serde(default = "default_sweep")]
    pub n_sweep: usize,
}

fn default_seed() -> u64 {
    1789
}

fn default_draws() -> u64 {
    500
}

fn default_sweep() -> usize {
    25
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            n_draws: default_draws(),
            n_sweep: default_sweep(),
        }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid scenario: {e}"))
    }

    pub fn system_config(&self) -> Result<SystemConfig, String> {
        let s = &self.system;
        let n = &self.nakagami;
        SystemConfig::new(
            s.tx_antennas,
            s.sensing_antennas,
            s.comm_antennas,
            s.coherence_length,
            s.avg_power,
            s.sigma2_s,
            s.sigma2_c,
            NakagamiParams::new(n.m_s, n.omega_s).map_err(|e| e.to_string())?,
            NakagamiParams::new(n.m_c, n.omega_c).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())
    }

    pub fn occupancy_config(&self) -> Result<OccupancyConfig, String> {
        let occ = self
            .occupancy
            .as_ref()
            .ok_or("scenario has no `occupancy` section")?;
        OccupancyConfig::new(
            self.system_config()?,
            occ.p1,
            occ.alpha_mag,
            occ.phi_deg.to_radians(),
            occ.sigma2_diffuse,
        )
        .map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let text = r#"{
            "notes": ["hello"],
            "system": {"M": 4, "N_s": 4, "N_c": 4, "T": 16, "P0": 251.18864315095797,
                       "sigma2_s": 1.0, "sigma2_c": 1.0},
            "nakagami": {"m_s": 1.0, "omega_s": 1.0, "m_c": 1.0, "omega_c": 0.25},
            "run": {"seed": 7, "n_draws": 100, "n_sweep": 10}
        }"#;
        let parsed = ScenarioFile::parse(text).unwrap();
        let serialized = serde_json::to_string_pretty(&parsed).unwrap();
        let reparsed = ScenarioFile::parse(&serialized).unwrap();
        assert_eq!(parsed, reparsed);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{
            "system": {"M": 4, "N_s": 4, "N_c": 4, "T": 16, "P0": 1.0,
                       "sigma2_s": 1.0, "sigma2_c": 1.0, "sigma_s": 2.0},
            "nakagami": {"m_s": 1.0, "omega_s": 1.0, "m_c": 1.0, "omega_c": 0.25}
        }"#;
        assert!(ScenarioFile::parse(text).is_err());
        let text = r#"{
            "system": {"M": 4, "N_s": 4, "N_c": 4, "T": 16, "P0": 1.0,
                       "sigma2_s": 1.0, "sigma2_c": 1.0},
            "nakagami": {"m_s": 1.0, "omega_s": 1.0, "m_c": 1.0, "omega_c": 0.25},
            "extra": {}
        }"#;
        assert!(ScenarioFile::parse(text).is_err());
    }

    #[test]
    fn run_defaults_apply() {
        let text = r#"{
            "system": {"M": 2, "N_s": 2, "N_c": 2, "T": 8, "P0": 1.0,
                       "sigma2_s": 1.0, "sigma2_c": 1.0},
            "nakagami": {"m_s": 1.0, "omega_s": 1.0, "m_c": 1.0, "omega_c": 0.5}
        }"#;
        let parsed = ScenarioFile::parse(text).unwrap();
        assert_eq!(parsed.run.seed, 1789);
        assert_eq!(parsed.run.n_draws, 500);
        assert_eq!(parsed.run.n_sweep, 25);
        assert!(parsed.occupancy.is_none());
        assert!(parsed.system_config().is_ok());
        assert!(parsed.occupancy_config().is_err());
    }
}
