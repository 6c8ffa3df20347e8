use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::Grid;
use crate::timestep::IntegratorConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Telegrapher,
    String,
    Maxwell,
    Fluid,
}

impl SystemKind {
    /// Spatial dimension and, for gauge-reduced systems, the form degree `k`.
    pub fn signature(self) -> (usize, Option<usize>) {
        match self {
            SystemKind::Telegrapher | SystemKind::String => (1, Some(0)),
            SystemKind::Maxwell => (3, Some(1)),
            SystemKind::Fluid => (3, None),
        }
    }

    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            SystemKind::Telegrapher => &["L", "C"],
            SystemKind::String => &["T_s", "mu_s"],
            SystemKind::Maxwell => &[],
            SystemKind::Fluid => &["K_g", "gamma"],
        }
    }
}

/// Grid description; spacings default to `2π / N`, the metric to the
/// identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacings: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<f64>>,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        let spacings = self
            .spacings
            .clone()
            .unwrap_or_else(|| self.sizes.iter().map(|&s| 2.0 * PI / s as f64).collect());
        let metric = self.metric.clone().unwrap_or_else(|| vec![1.0; self.sizes.len()]);
        Grid::new(self.sizes.clone(), spacings, metric)
    }
}

/// Seeded, band-limited initial data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_seed() -> u64 {
    42
}

fn default_amplitude() -> f64 {
    1.0
}

impl Default for InitialCondition {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            amplitude: default_amplitude(),
        }
    }
}

/// JSON system description, e.g.
/// `{"system": "maxwell", "grid": {"sizes": [8, 8, 8]}, "params": {}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub system: SystemKind,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub initial: InitialCondition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorConfig>,
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SystemSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let (n, k) = self.system.signature();
        let name = format!("{:?}", self.system).to_lowercase();
        if self.grid.sizes.len() != n {
            return Err(Error::Config(format!(
                "{name} needs a {n}-dimensional grid, got {} sizes",
                self.grid.sizes.len()
            )));
        }
        if let Some(given) = self.n {
            if given != n {
                return Err(Error::Config(format!("{name} has n = {n}, config says {given}")));
            }
        }
        match (self.k, k) {
            (Some(given), Some(k)) if given != k => {
                return Err(Error::Config(format!("{name} has k = {k}, config says {given}")));
            }
            (Some(_), None) => return Err(Error::Config(format!("{name} takes no k"))),
            _ => {}
        }
        let known = self.system.parameter_names();
        for (key, value) in &self.params {
            if !known.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "unknown parameter `{key}` for {name}; expected one of {known:?}"
                )));
            }
            if !value.is_finite() {
                return Err(Error::Config(format!("parameter `{key}` must be finite")));
            }
        }
        if !(self.initial.amplitude.is_finite()) {
            return Err(Error::Config("initial amplitude must be finite".into()));
        }
        if let Some(cfg) = &self.integrator {
            cfg.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses() {
        let spec = SystemSpec::from_json(r#"{"system": "maxwell", "grid": {"sizes": [8, 8, 8]}, "params": {}}"#).unwrap();
        assert_eq!(spec.system, SystemKind::Maxwell);
        assert_eq!(spec.initial, InitialCondition::default());
        let grid = spec.grid.build().unwrap();
        assert!((grid.spacings()[0] - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn missing_system_field_is_named() {
        let err = SystemSpec::from_json(r#"{"grid": {"sizes": [8]}}"#).unwrap_err();
        assert!(err.to_string().contains("system"), "{err}");
    }

    #[test]
    fn inconsistent_signature_rejected() {
        assert!(SystemSpec::from_json(r#"{"system": "maxwell", "grid": {"sizes": [8, 8]}}"#).is_err());
        assert!(SystemSpec::from_json(r#"{"system": "telegrapher", "grid": {"sizes": [8]}, "k": 1}"#).is_err());
        assert!(SystemSpec::from_json(r#"{"system": "fluid", "grid": {"sizes": [8, 8, 8]}, "k": 0}"#).is_err());
        assert!(SystemSpec::from_json(r#"{"system": "string", "grid": {"sizes": [8]}, "n": 1, "k": 0}"#).is_ok());
    }

    #[test]
    fn unknown_parameter_rejected() {
        let err = SystemSpec::from_json(r#"{"system": "string", "grid": {"sizes": [8]}, "params": {"L": 1}}"#).unwrap_err();
        assert!(err.to_string().contains("`L`"));
    }
}
