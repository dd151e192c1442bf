use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{OutputFormat, ParamValue, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "kdivis", version, about = "k-divisibility classification of qubit dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one model as PD0, PD1 or PD2.
    Classify(ModelCommand),
    /// Trace-distance backflow measure of one model.
    Blp(ModelCommand),
    /// Choi trace-norm measure of one model.
    Rhp(ModelCommand),
    /// Run the two-parameter sweep described by a config file.
    Sweep(SweepCommand),
    /// Regenerate one of the phase-diagram presets (fig1 .. fig4).
    Figure(FigureCommand),
    /// Print the JSON config of a model or grid preset.
    Config(ConfigCommand),
}

#[derive(Debug, Args)]
pub struct ModelCommand {
    /// hall, sine, pauli, ad, cnot or superradiance.
    pub preset: Option<String>,
    #[command(flatten)]
    pub model: ModelFlags,
    #[command(flatten)]
    pub common: CommonFlags,
}

#[derive(Debug, Args)]
pub struct SweepCommand {
    #[command(flatten)]
    pub model: ModelFlags,
    #[command(flatten)]
    pub common: CommonFlags,
    /// Refuse sweeps with more cells than this.
    #[arg(long)]
    pub max_cells: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FigureCommand {
    /// fig1, fig2, fig3 or fig4.
    pub name: String,
    #[command(flatten)]
    pub common: CommonFlags,
    #[arg(long)]
    pub max_cells: Option<usize>,
    /// Points per axis instead of the preset resolution.
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ConfigCommand {
    /// A model preset, or fig1_g3_pos, fig1_g3_neg, fig2, fig3, fig4.
    pub preset: String,
}

/// Model parameters; each applies only to the families that have it.
#[derive(Debug, Default, Args)]
pub struct ModelFlags {
    /// Pauli rate: a number, const:c, tanh-neg, sin or sin-neg.
    #[arg(long, allow_hyphen_values = true)]
    pub g1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub g2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub g3: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// C-NOT coupling.
    #[arg(long = "J", allow_negative_numbers = true)]
    pub coupling: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct CommonFlags {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Worker threads for sweeps.
    #[arg(long, env = "KDIVIS_JOBS")]
    pub jobs: Option<usize>,
}

impl ModelFlags {
    fn entries(&self) -> Vec<(&'static str, ParamValue)> {
        let text = [("g1", &self.g1), ("g2", &self.g2), ("g3", &self.g3)];
        let numbers = [
            ("gamma0", self.gamma0),
            ("lambda", self.lambda),
            ("J", self.coupling),
            ("gamma", self.gamma),
            ("a", self.a),
            ("x", self.x),
        ];
        let rates = text.into_iter().filter_map(|(n, v)| {
            v.as_ref().map(|s| (n, s.parse::<f64>().map(ParamValue::Number).unwrap_or_else(|_| ParamValue::Text(s.clone()))))
        });
        let values = numbers.into_iter().filter_map(|(n, v)| v.map(|x| (n, ParamValue::Number(x))));
        rates.chain(values).collect()
    }

    pub fn apply(&self, config: &mut RunConfig) -> CliResult<()> {
        let entries = self.entries();
        if entries.is_empty() {
            return Ok(());
        }
        let model = config
            .model
            .as_mut()
            .ok_or_else(|| CliError::Config("model flags given without a model preset or config".into()))?;
        for (name, value) in entries {
            model.set(name, value).map_err(|e| e.context(&format!("--{name}")))?;
        }
        Ok(())
    }
}

impl CommonFlags {
    /// Loads `--config` (or an empty config) and lays the run and output
    /// flags over it.
    pub fn load(&self) -> CliResult<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let run = &mut config.run;
        run.horizon = self.horizon.or(run.horizon);
        run.steps = self.steps.or(run.steps);
        run.epsilon = self.epsilon.or(run.epsilon);
        run.tolerance = self.tol.or(run.tolerance);
        run.jobs = self.jobs.or(run.jobs);
        config.output.path = self.out.clone().or(config.output.path.take());
        config.output.format = self.format.or(config.output.format);
        Ok(config)
    }
}
