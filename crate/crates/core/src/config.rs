//! Run configuration shared by the command-line tool and the verification suite.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::derivative::TimeSchedule;
use crate::disc::TestFunctionFamily;
use crate::error::{Error, Result};
use crate::limits::Radial;
use crate::semigroup::FlowOptions;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Parameter(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid_size: usize,
    pub radial_k_max: u32,
    pub radial_tol: f64,
    pub ode_rtol: f64,
    pub ode_atol: f64,
    /// Exponents `k` of the times `t = 2^{-k}`.
    pub t_k_min: u32,
    pub t_k_max: u32,
    pub probe_radii: Vec<f64>,
    pub probe_angles: usize,
    pub fourier_degree: u32,
    pub format: OutputFormat,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid_size: 1024,
            radial_k_max: 40,
            radial_tol: 1e-9,
            ode_rtol: 1e-10,
            ode_atol: 1e-12,
            t_k_min: 2,
            t_k_max: 9,
            probe_radii: vec![0.5, 0.8, 0.95],
            probe_angles: 8,
            fourier_degree: 16,
            format: OutputFormat::Json,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let n = self.grid_size;
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::Parameter(format!("grid_size {n} must be a power of two ≥ 64")));
        }
        for (name, v) in [("radial_tol", self.radial_tol), ("ode_rtol", self.ode_rtol), ("ode_atol", self.ode_atol)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.radial_k_max < 5 || self.radial_k_max > 52 {
            return Err(Error::Parameter(format!("radial_k_max {} must lie in 5..=52", self.radial_k_max)));
        }
        TimeSchedule::new(self.t_k_min, self.t_k_max)?;
        self.family()?;
        Ok(())
    }

    /// Reads a JSON config; missing fields take their defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn radial(&self) -> Radial {
        Radial { k_max: self.radial_k_max, tol: self.radial_tol, ..Radial::default() }
    }

    pub fn flow_options(&self) -> FlowOptions {
        FlowOptions { rtol: self.ode_rtol, atol: self.ode_atol, ..FlowOptions::default() }
    }

    pub fn schedule(&self) -> TimeSchedule {
        TimeSchedule { k_min: self.t_k_min, k_max: self.t_k_max }
    }

    pub fn family(&self) -> Result<TestFunctionFamily> {
        TestFunctionFamily::polar(&self.probe_radii, self.probe_angles, Some(self.fourier_degree))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.radial(), Radial::default());
        assert_eq!(cfg.flow_options(), FlowOptions::default());
        assert_eq!(cfg.schedule(), TimeSchedule::default());
        assert_eq!(cfg.family().unwrap(), TestFunctionFamily::default());
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg = RunConfig::from_json(r#"{"grid_size": 256, "format": "csv"}"#).unwrap();
        assert_eq!(cfg.grid_size, 256);
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert_eq!(cfg.seed, 0);
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            r#"{"grid_size": 100}"#,
            r#"{"grid_size": 32}"#,
            r#"{"ode_rtol": 0}"#,
            r#"{"radial_tol": -1e-9}"#,
            r#"{"t_k_min": 5, "t_k_max": 3}"#,
            r#"{"probe_radii": [0.99]}"#,
            r#"{"format": "xml"}"#,
            r#"{"unknown": 1}"#,
        ] {
            assert!(RunConfig::from_json(text).is_err(), "{text}");
        }
    }
}
