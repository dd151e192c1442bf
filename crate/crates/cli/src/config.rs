//! JSON run configuration.
//!
//! ```json
//! {
//!   "model": {"family": "pauli", "g1": 1, "g2": 1, "g3": "tanh-neg"},
//!   "sweep": {"x": {"name": "g1", "min": -1, "max": 1, "n": 101}, "y": {...}},
//!   "run": {"horizon": 10, "steps": 500, "epsilon": 0.02, "tolerance": 2e-9, "jobs": 4},
//!   "output": {"path": "out.csv", "format": "csv"}
//! }
//! ```
//!
//! Every section is optional and unknown keys are rejected. Model
//! parameters sit next to `family`; Pauli rates take either a number or one
//! of `const:c`, `tanh-neg`, `sin`, `sin-neg`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use kdivis::models::{PauliChannelModel, RateFn};
use kdivis::sweep::Axis;
use kdivis::{ModelFamily, ModelSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Default ceiling on the number of cells a single sweep may contain.
pub const DEFAULT_MAX_CELLS: usize = 100_000;

/// Named single-model presets.
pub const MODEL_PRESETS: [&str; 6] = ["hall", "sine", "pauli", "ad", "cnot", "superradiance"];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub run: RunSettings,
    #[serde(default)]
    pub output: OutputConfig,
}

/// A parameter value: a number, or a rate-function name for Pauli rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Number(v) => write!(f, "{v}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

/// `family` plus the family's parameters; absent ones take their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, ParamValue>", into = "BTreeMap<String, ParamValue>")]
pub struct ModelConfig {
    pub family: ModelFamily,
    pub params: BTreeMap<String, ParamValue>,
}

impl ModelConfig {
    pub fn new(family: ModelFamily) -> Self {
        Self { family, params: BTreeMap::new() }
    }

    pub fn preset(name: &str) -> CliResult<Self> {
        let pauli = |rates: [&str; 3]| {
            let mut m = ModelConfig::new(ModelFamily::Pauli);
            for (k, r) in rates.iter().enumerate() {
                m.params.insert(format!("g{}", k + 1), ParamValue::Text(r.to_string()));
            }
            m
        };
        Ok(match name {
            "hall" => pauli(["const:1", "const:1", "tanh-neg"]),
            "sine" => pauli(["const:1", "sin", "sin-neg"]),
            _ => match name.parse::<ModelFamily>() {
                Ok(family) => ModelConfig::new(family),
                Err(_) => {
                    return Err(CliError::Config(format!(
                        "unknown model preset `{name}` (expected one of {MODEL_PRESETS:?})"
                    )))
                }
            },
        })
    }

    /// Sets one parameter after checking that it belongs to the family and
    /// has the right kind of value.
    pub fn set(&mut self, name: &str, value: ParamValue) -> CliResult<()> {
        if !self.family.has_param(name) {
            return Err(CliError::Config(format!(
                "`{name}` is not a parameter of family {} (expected one of {:?})",
                self.family,
                self.family.param_names()
            )));
        }
        match (&value, self.family) {
            (ParamValue::Text(s), ModelFamily::Pauli) => {
                s.parse::<RateFn>().map_err(|e| CliError::Config(format!("{name}: {e}")))?;
            }
            (ParamValue::Text(s), family) => {
                return Err(CliError::Config(format!("{name}: expected a number for family {family}, got `{s}`")));
            }
            (ParamValue::Number(v), _) if !v.is_finite() => {
                return Err(CliError::Config(format!("{name}: value must be finite")));
            }
            _ => {}
        }
        self.params.insert(name.to_string(), value);
        Ok(())
    }

    /// Parameters as plain numbers, as needed for sweeps.
    pub fn numeric_params(&self) -> CliResult<BTreeMap<String, f64>> {
        self.params
            .iter()
            .map(|(k, v)| match v {
                ParamValue::Number(x) => Ok((k.clone(), *x)),
                ParamValue::Text(s) => match s.parse::<RateFn>() {
                    Ok(RateFn::Const(c)) => Ok((k.clone(), c)),
                    _ => Err(CliError::Config(format!("{k}: sweeps need constant parameters, got `{s}`"))),
                },
            })
            .collect()
    }

    pub fn build(&self) -> CliResult<ModelSpec> {
        if self.family != ModelFamily::Pauli {
            return Ok(ModelSpec::from_params(self.family, &self.numeric_params()?)?);
        }
        let rate = |name: &str| -> CliResult<RateFn> {
            match self.params.get(name) {
                None => Ok(RateFn::Const(1.0)),
                Some(ParamValue::Number(v)) => Ok(RateFn::Const(*v)),
                Some(ParamValue::Text(s)) => s.parse().map_err(|e| CliError::Config(format!("{name}: {e}"))),
            }
        };
        Ok(ModelSpec::Pauli(PauliChannelModel::new([rate("g1")?, rate("g2")?, rate("g3")?])))
    }
}

impl TryFrom<BTreeMap<String, ParamValue>> for ModelConfig {
    type Error = String;

    fn try_from(mut raw: BTreeMap<String, ParamValue>) -> Result<Self, String> {
        let family = match raw.remove("family") {
            Some(ParamValue::Text(name)) => name,
            Some(other) => return Err(format!("model.family must be a string, got {other}")),
            None => return Err("model.family is required".into()),
        };
        let mut model = ModelConfig::preset(&family).map_err(|e| e.detail())?;
        for (name, value) in raw {
            model.set(&name, value).map_err(|e| e.detail())?;
        }
        Ok(model)
    }
}

impl From<ModelConfig> for BTreeMap<String, ParamValue> {
    fn from(model: ModelConfig) -> Self {
        let mut raw = model.params;
        raw.insert("family".into(), ParamValue::Text(model.family.name().into()));
        raw
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl From<&Axis> for AxisConfig {
    fn from(a: &Axis) -> Self {
        Self { name: a.name.clone(), min: a.min, max: a.max, n: a.n }
    }
}

impl From<&AxisConfig> for Axis {
    fn from(a: &AxisConfig) -> Self {
        Axis::new(&a.name, a.min, a.max, a.n)
    }
}

/// Two swept parameters; the model section supplies the fixed ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub x: AxisConfig,
    pub y: AxisConfig,
    #[serde(default = "default_true")]
    pub measures: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_cells: Option<usize>,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Svg,
    Both,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| e.context(&path.display().to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Config that reproduces a grid specification.
    pub fn from_grid(spec: &kdivis::GridSpec) -> Self {
        let params = spec.fixed.iter().map(|(k, v)| (k.clone(), ParamValue::Number(*v))).collect();
        RunConfig {
            model: Some(ModelConfig { family: spec.family, params }),
            sweep: Some(SweepConfig {
                x: (&spec.x).into(),
                y: (&spec.y).into(),
                measures: true,
                pairs: Some(spec.n_pairs),
                directions: Some(spec.n_dirs),
                detection_threshold: Some(spec.detection_threshold),
                max_cells: None,
            }),
            run: RunSettings {
                horizon: spec.horizon,
                steps: Some(spec.n_steps),
                epsilon: spec.epsilon,
                tolerance: spec.tol,
                jobs: None,
            },
            output: OutputConfig::default(),
        }
    }

    pub fn model(&self) -> CliResult<&ModelConfig> {
        self.model.as_ref().ok_or_else(|| CliError::Config("no model given (use a preset or a config with a `model` section)".into()))
    }

    /// Grid specification of the `sweep` section, validated.
    pub fn grid(&self) -> CliResult<kdivis::GridSpec> {
        let model = self.model()?;
        let sweep = self.sweep.as_ref().ok_or_else(|| CliError::Config("config has no `sweep` section".into()))?;
        let mut spec = kdivis::GridSpec::new(model.family, (&sweep.x).into(), (&sweep.y).into());
        spec.fixed = model.numeric_params()?;
        spec.horizon = self.run.horizon;
        if let Some(n) = self.run.steps {
            spec.n_steps = n;
        }
        spec.epsilon = self.run.epsilon;
        spec.tol = self.run.tolerance;
        if let Some(p) = sweep.pairs {
            spec.n_pairs = p;
        }
        if let Some(d) = sweep.directions {
            spec.n_dirs = d;
        }
        if let Some(t) = sweep.detection_threshold {
            spec.detection_threshold = t;
        }
        spec.validate().map_err(|e| CliError::Config(format!("sweep: {}", e)))?;
        Ok(spec)
    }

    pub fn max_cells(&self) -> usize {
        self.sweep.as_ref().and_then(|s| s.max_cells).unwrap_or(DEFAULT_MAX_CELLS)
    }
}

/// Names accepted by [`preset_config`].
pub fn preset_config_names() -> Vec<String> {
    let grids = kdivis::sweep::presets::FIGURE_NAMES
        .iter()
        .flat_map(|f| kdivis::sweep::presets::figure(f).expect("known figure"))
        .map(|(name, _)| name);
    MODEL_PRESETS.iter().map(|s| s.to_string()).chain(grids).collect()
}

/// Config for a model preset or a named preset grid.
pub fn preset_config(name: &str) -> CliResult<RunConfig> {
    if MODEL_PRESETS.contains(&name) {
        return Ok(RunConfig { model: Some(ModelConfig::preset(name)?), ..RunConfig::default() });
    }
    kdivis::sweep::presets::FIGURE_NAMES
        .iter()
        .flat_map(|f| kdivis::sweep::presets::figure(f).expect("known figure"))
        .find(|(grid, _)| grid == name)
        .map(|(_, spec)| RunConfig::from_grid(&spec))
        .ok_or_else(|| CliError::Config(format!("unknown preset `{name}` (expected one of {:?})", preset_config_names())))
}
