//! Parallel two-parameter sweeps producing phase-diagram grids.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;

use crate::divisibility::{
    complement_steps, verdict_from_steps, ClassifyOptions, DivisibilityClass, DEFAULT_POSITIVITY_DIRECTIONS,
    DEFAULT_STEPS, TOL_PER_EPSILON,
};
use crate::error::{Error, Result};
use crate::measures::{blp_measure, rhp_from_steps, DEFAULT_DETECTION_THRESHOLD, DEFAULT_PAIRS};
use crate::models::{ModelFamily, ModelSpec};

mod csv;
pub mod presets;
mod svg;

pub use csv::{encode_csv, format_sig9, parse_csv, CsvRow, CSV_HEADER};
pub use svg::{encode_svg, Palette};

/// One swept parameter: `n` evenly spaced values from `min` to `max`.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(name: &str, min: f64, max: f64, n: usize) -> Self {
        Self { name: name.to_string(), min, max, n }
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.n <= 1 {
            self.min
        } else if i + 1 == self.n {
            self.max
        } else {
            self.min + i as f64 * (self.max - self.min) / (self.n - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.value(i)).collect()
    }

    pub fn spacing(&self) -> f64 {
        if self.n <= 1 {
            0.0
        } else {
            (self.max - self.min) / (self.n - 1) as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub family: ModelFamily,
    pub x: Axis,
    pub y: Axis,
    pub fixed: BTreeMap<String, f64>,
    /// Per-cell model default when absent.
    pub horizon: Option<f64>,
    pub n_steps: usize,
    /// `horizon / n_steps` when absent.
    pub epsilon: Option<f64>,
    /// `1e-7 · ε` when absent.
    pub tol: Option<f64>,
    pub n_pairs: usize,
    pub n_dirs: usize,
    pub detection_threshold: f64,
}

impl GridSpec {
    pub fn new(family: ModelFamily, x: Axis, y: Axis) -> Self {
        Self {
            family,
            x,
            y,
            fixed: BTreeMap::new(),
            horizon: None,
            n_steps: DEFAULT_STEPS,
            epsilon: None,
            tol: None,
            n_pairs: DEFAULT_PAIRS,
            n_dirs: DEFAULT_POSITIVITY_DIRECTIONS,
            detection_threshold: DEFAULT_DETECTION_THRESHOLD,
        }
    }

    pub fn with_fixed(mut self, name: &str, value: f64) -> Self {
        self.fixed.insert(name.to_string(), value);
        self
    }

    pub fn cell_count(&self) -> usize {
        self.x.n * self.y.n
    }

    pub fn validate(&self) -> Result<()> {
        for axis in [&self.x, &self.y] {
            if axis.n < 2 {
                return Err(Error::InvalidParameters(format!("axis `{}` needs at least 2 points", axis.name)));
            }
            if !axis.min.is_finite() || !axis.max.is_finite() || axis.min >= axis.max {
                return Err(Error::InvalidParameters(format!("axis `{}` needs finite min < max", axis.name)));
            }
            if !self.family.has_param(&axis.name) {
                return Err(Error::InvalidParameters(format!(
                    "`{}` is not a parameter of family {} (expected one of {:?})",
                    axis.name,
                    self.family,
                    self.family.param_names()
                )));
            }
        }
        if self.x.name == self.y.name {
            return Err(Error::InvalidParameters("x and y must sweep different parameters".into()));
        }
        for name in self.fixed.keys() {
            if !self.family.has_param(name) {
                return Err(Error::InvalidParameters(format!("`{name}` is not a parameter of family {}", self.family)));
            }
            if *name == self.x.name || *name == self.y.name {
                return Err(Error::InvalidParameters(format!("`{name}` is both swept and fixed")));
            }
        }
        if self.n_pairs == 0 || self.n_dirs == 0 {
            return Err(Error::InvalidParameters("n_pairs and n_dirs must be positive".into()));
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParameters(format!("horizon must be positive, got {h}")));
            }
        }
        if self.n_steps < 2 {
            return Err(Error::InvalidParameters("n_steps must be at least 2".into()));
        }
        Ok(())
    }

    /// Model at grid point `(x, y)`.
    pub fn model_at(&self, x: f64, y: f64) -> Result<ModelSpec> {
        let mut params = self.fixed.clone();
        params.insert(self.x.name.clone(), x);
        params.insert(self.y.name.clone(), y);
        ModelSpec::from_params(self.family, &params)
    }

    /// Run options for one model, filling the defaults.
    pub fn options_for(&self, model: &ModelSpec) -> ClassifyOptions {
        let horizon = self.horizon.unwrap_or_else(|| model.default_horizon());
        let mut opts = ClassifyOptions::new(horizon, self.n_steps);
        if let Some(eps) = self.epsilon {
            opts.epsilon = eps;
            opts.tol = TOL_PER_EPSILON * eps;
        }
        if let Some(tol) = self.tol {
            opts.tol = tol;
        }
        opts.n_dirs = self.n_dirs;
        opts
    }
}

/// Outcome of one grid cell; `class` is `None` when the cell failed.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub x: f64,
    pub y: f64,
    pub class: Option<DivisibilityClass>,
    pub near_boundary: bool,
    pub blp: Option<f64>,
    pub rhp: Option<f64>,
    pub singular_count: usize,
    pub error: Option<String>,
}

impl Cell {
    fn failed(x: f64, y: f64, message: String) -> Self {
        Self { x, y, class: None, near_boundary: false, blp: None, rhp: None, singular_count: 0, error: Some(message) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseDiagramGrid {
    pub spec: GridSpec,
    /// Row-major: index `iy · n_x + ix`.
    pub cells: Vec<Cell>,
}

impl PhaseDiagramGrid {
    pub fn cell(&self, ix: usize, iy: usize) -> &Cell {
        &self.cells[iy * self.spec.x.n + ix]
    }

    pub fn count(&self, class: Option<DivisibilityClass>) -> usize {
        self.cells.iter().filter(|c| c.class == class).count()
    }
}

fn compute_cell(spec: &GridSpec, x: f64, y: f64, measures: bool) -> Result<Cell> {
    let model = spec.model_at(x, y)?;
    let opts = spec.options_for(&model);
    let steps = complement_steps(&model, &opts)?;
    let verdict = verdict_from_steps(&steps, &opts)?;
    let (blp, rhp) = if measures {
        let rhp = rhp_from_steps(&steps)?.measure;
        let blp = blp_measure(&model, opts.horizon, opts.n_steps, spec.n_pairs)?.measure;
        (Some(blp), Some(rhp))
    } else {
        (None, None)
    };
    Ok(Cell {
        x,
        y,
        class: Some(verdict.class),
        near_boundary: verdict.near_boundary,
        blp,
        rhp,
        singular_count: verdict.singular_times.len(),
        error: None,
    })
}

fn guarded_cell(spec: &GridSpec, index: usize, measures: bool) -> Cell {
    let (x, y) = (spec.x.value(index % spec.x.n), spec.y.value(index / spec.x.n));
    match catch_unwind(AssertUnwindSafe(|| compute_cell(spec, x, y, measures))) {
        Ok(Ok(cell)) => cell,
        Ok(Err(e)) => Cell::failed(x, y, e.to_string()),
        Err(_) => Cell::failed(x, y, "cell computation panicked".into()),
    }
}

/// Runs every cell on the global rayon pool.
pub fn run_sweep(spec: &GridSpec, compute_measures: bool) -> Result<PhaseDiagramGrid> {
    spec.validate()?;
    let cells = (0..spec.cell_count()).into_par_iter().map(|i| guarded_cell(spec, i, compute_measures)).collect();
    Ok(PhaseDiagramGrid { spec: spec.clone(), cells })
}

/// Runs every cell on a dedicated pool of `jobs` workers. The result does
/// not depend on `jobs`.
pub fn run_sweep_with_jobs(spec: &GridSpec, compute_measures: bool, jobs: usize) -> Result<PhaseDiagramGrid> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameters(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_sweep(spec, compute_measures))
}
