//! JSON configuration ingestion. The file carries a top-level `physical`
//! object whose keys match the physical parameter names with explicit SI
//! unit suffixes; unknown keys are rejected.

use crate::CliError;
use serde::Deserialize;
use sqz_core::params::PhysicalConfig;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub physical: PhysicalSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSection {
    pub pump_waist_m: f64,
    pub lo_waist_m: f64,
    pub pump_bandwidth_rad_s: f64,
    pub lo_bandwidth_rad_s: f64,
    pub pump_wavelength_m: f64,
    pub crystal_length_m: f64,
    pub pump_amplitude: f64,
    pub nonlinear_cross_section_m2: f64,
    pub index_pump: f64,
    pub index_degenerate: f64,
}

impl From<&PhysicalSection> for PhysicalConfig {
    fn from(s: &PhysicalSection) -> Self {
        PhysicalConfig {
            pump_waist: s.pump_waist_m,
            lo_waist: s.lo_waist_m,
            pump_bandwidth: s.pump_bandwidth_rad_s,
            lo_bandwidth: s.lo_bandwidth_rad_s,
            pump_wavelength: s.pump_wavelength_m,
            crystal_length: s.crystal_length_m,
            pump_amplitude: s.pump_amplitude,
            nonlinear_cross_section: s.nonlinear_cross_section_m2,
            index_pump: s.index_pump,
            index_degenerate: s.index_degenerate,
        }
    }
}

/// Load and validate a physical configuration.
pub fn load_config(path: &Path) -> Result<PhysicalConfig, CliError> {
    let raw = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let parsed: ConfigFile = serde_json::from_str(&raw)?;
    let cfg = PhysicalConfig::from(&parsed.physical);
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    pub(crate) const REFERENCE: &str = r#"{
  "physical": {
    "pump_waist_m": 1.0e-3,
    "lo_waist_m": 1.0e-4,
    "pump_bandwidth_rad_s": 1.0e11,
    "lo_bandwidth_rad_s": 1.0e12,
    "pump_wavelength_m": 4.0e-7,
    "crystal_length_m": 1.0e-3,
    "pump_amplitude": 2.5e6,
    "nonlinear_cross_section_m2": 1.2e-23,
    "index_pump": 1.6,
    "index_degenerate": 1.6
  }
}"#;

    fn write_temp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_reference_config() {
        let f = write_temp(REFERENCE);
        let cfg = load_config(f.path()).unwrap();
        assert_eq!(cfg.pump_waist, 1.0e-3);
        assert_eq!(cfg.index_degenerate, 1.6);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = REFERENCE.replace("\"index_degenerate\"", "\"index_degenerate_x\"");
        let f = write_temp(&bad);
        assert!(matches!(load_config(f.path()), Err(CliError::Parse(_))));
    }

    #[test]
    fn validation_error_names_field() {
        let bad = REFERENCE.replace("\"lo_waist_m\": 1.0e-4", "\"lo_waist_m\": 0.0");
        let f = write_temp(&bad);
        let err = load_config(f.path()).unwrap_err();
        assert!(err.to_string().contains("lo_waist"));
    }
}
