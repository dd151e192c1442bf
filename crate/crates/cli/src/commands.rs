use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use kdivis::divisibility::{ClassifyOptions, DEFAULT_STEPS, TOL_PER_EPSILON};
use kdivis::measures::{blp_detects, rhp_detects, DEFAULT_DETECTION_THRESHOLD, DEFAULT_PAIRS};
use kdivis::sweep::presets::{self, apply_pauli_predicates, pauli_predicate_check};
use kdivis::sweep::{encode_csv, encode_svg, format_sig9, Palette};
use kdivis::{blp_measure, classify_with, rhp_measure, run_sweep, run_sweep_with_jobs, GridSpec, ModelFamily};
use kdivis::{ModelSpec, PhaseDiagramGrid};

use crate::cli::{Command, ConfigCommand, FigureCommand, ModelCommand, SweepCommand};
use crate::config::{preset_config, ModelConfig, OutputFormat, RunConfig, RunSettings};
use crate::error::{CliError, CliResult};
use crate::output::{write_atomic, StagedFiles};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Classify(cmd) => classify(cmd),
        Command::Blp(cmd) => blp(cmd),
        Command::Rhp(cmd) => rhp(cmd),
        Command::Sweep(cmd) => sweep(cmd),
        Command::Figure(cmd) => figure(cmd),
        Command::Config(cmd) => dump_config(cmd),
    }
}

fn single_model(cmd: &ModelCommand) -> CliResult<(RunConfig, ModelSpec, ClassifyOptions)> {
    let mut config = cmd.common.load()?;
    if let Some(name) = &cmd.preset {
        config.model = Some(ModelConfig::preset(name)?);
    }
    cmd.model.apply(&mut config)?;
    let model = config.model()?.build()?;
    let opts = run_options(&config.run, &model)?;
    Ok((config, model, opts))
}

/// Options for one model: explicit settings first, then the model defaults.
fn run_options(run: &RunSettings, model: &ModelSpec) -> CliResult<ClassifyOptions> {
    let horizon = run.horizon.unwrap_or_else(|| model.default_horizon());
    let mut opts = ClassifyOptions::new(horizon, run.steps.unwrap_or(DEFAULT_STEPS));
    if let Some(eps) = run.epsilon {
        opts.epsilon = eps;
        opts.tol = TOL_PER_EPSILON * eps;
    }
    if let Some(tol) = run.tolerance {
        opts.tol = tol;
    }
    opts.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(opts)
}

fn describe(model: &ModelConfig, opts: &ClassifyOptions) -> String {
    let names = model.family.param_names();
    let params = names.iter().map(|name| match model.params.get(*name) {
        Some(v) => format!(" {name}={v}"),
        None => format!(" {name}=default"),
    });
    let mut out = format!("model: {}{}\n", model.family, params.collect::<String>());
    let _ = writeln!(
        out,
        "grid: horizon={} steps={} epsilon={} tol={}",
        format_sig9(opts.horizon),
        opts.n_steps,
        format_sig9(opts.epsilon),
        format_sig9(opts.tol)
    );
    out
}

fn format_times(times: &[f64]) -> String {
    if times.is_empty() {
        "none".into()
    } else {
        times.iter().map(|t| format_sig9(*t)).collect::<Vec<_>>().join(" ")
    }
}

fn classify(cmd: ModelCommand) -> CliResult<()> {
    let (config, model, opts) = single_model(&cmd)?;
    let verdict = classify_with(&model, &opts)?;
    let mut report = describe(config.model()?, &opts);
    let _ = writeln!(report, "class: {}", verdict.class);
    let _ = writeln!(report, "worst_cp_violation: {}", format_sig9(verdict.worst_cp_violation));
    let p = verdict.worst_p_violation.map(format_sig9).unwrap_or_else(|| "not evaluated".into());
    let _ = writeln!(report, "worst_p_violation: {p}");
    let _ = writeln!(report, "near_boundary: {}", verdict.near_boundary);
    let _ = writeln!(report, "singular_times: {}", format_times(&verdict.singular_times));
    emit(&report);
    if let Some(path) = &config.output.path {
        write_atomic(path, &report)?;
    }
    Ok(())
}

/// Writes a report to stdout, ignoring a closed reader.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn series_csv(header: &str, times: &[f64], values: &[f64]) -> String {
    let mut out = format!("t,{header}\n");
    for (t, v) in times.iter().zip(values) {
        let _ = writeln!(out, "{},{}", format_sig9(*t), format_sig9(*v));
    }
    out
}

fn series_path(config: &RunConfig) -> CliResult<Option<&Path>> {
    match config.output.format {
        Some(OutputFormat::Svg | OutputFormat::Both) => {
            Err(CliError::Config("measure series are written as CSV only".into()))
        }
        _ => Ok(config.output.path.as_deref()),
    }
}

fn blp(cmd: ModelCommand) -> CliResult<()> {
    let (config, model, opts) = single_model(&cmd)?;
    let out = series_path(&config)?;
    let result = blp_measure(&model, opts.horizon, opts.n_steps, DEFAULT_PAIRS)?;
    let mut report = describe(config.model()?, &opts);
    let _ = writeln!(report, "blp: {}", format_sig9(result.measure));
    let _ = writeln!(report, "detected: {}", blp_detects(&result, DEFAULT_DETECTION_THRESHOLD));
    let n = result.argmax_pair.0.map(format_sig9).join(" ");
    let _ = writeln!(report, "best_pair: +({n})");
    emit(&report);
    if let Some(path) = out {
        let best = result
            .sigma_series
            .iter()
            .max_by(|a, b| positive_area(a).total_cmp(&positive_area(b)))
            .expect("at least one pair");
        write_atomic(path, &series_csv("sigma", &result.times, best))?;
    }
    Ok(())
}

fn positive_area(sigma: &[f64]) -> f64 {
    sigma.iter().filter(|s| **s > 0.0).sum()
}

fn rhp(cmd: ModelCommand) -> CliResult<()> {
    let (config, model, opts) = single_model(&cmd)?;
    let out = series_path(&config)?;
    let result = rhp_measure(&model, opts.horizon, opts.n_steps, opts.epsilon)?;
    let mut report = describe(config.model()?, &opts);
    let _ = writeln!(report, "rhp: {}", format_sig9(result.measure));
    let _ = writeln!(report, "detected: {}", rhp_detects(&result, DEFAULT_DETECTION_THRESHOLD));
    let _ = writeln!(report, "singular_times: {}", format_times(&result.singular_times));
    emit(&report);
    if let Some(path) = out {
        write_atomic(path, &series_csv("g", &result.times, &result.g_series))?;
    }
    Ok(())
}

fn check_budget(name: &str, spec: &GridSpec, budget: usize) -> CliResult<()> {
    if spec.cell_count() > budget {
        return Err(CliError::Budget { name: name.into(), cells: spec.cell_count(), budget });
    }
    Ok(())
}

fn execute(spec: &GridSpec, measures: bool, jobs: Option<usize>) -> CliResult<PhaseDiagramGrid> {
    Ok(match jobs {
        Some(n) => run_sweep_with_jobs(spec, measures, n)?,
        None => run_sweep(spec, measures)?,
    })
}

fn summarize(name: &str, grid: &PhaseDiagramGrid) {
    use kdivis::DivisibilityClass::{PD0, PD1, PD2};
    let failed = grid.count(None);
    emit(&format!(
        "{name}: {} cells, PD2 {}, PD1 {}, PD0 {}, failed {failed}\n",
        grid.cells.len(),
        grid.count(Some(PD2)),
        grid.count(Some(PD1)),
        grid.count(Some(PD0)),
    ));
    if let Some(cell) = grid.cells.iter().find(|c| c.error.is_some()) {
        eprintln!("{name}: first failure at ({}, {}): {}", cell.x, cell.y, cell.error.as_deref().unwrap_or(""));
    }
}

fn stage_grid(files: &mut StagedFiles, grid: &PhaseDiagramGrid, path: &Path, format: OutputFormat) -> CliResult<()> {
    let (csv, svg) = match format {
        OutputFormat::Csv => (Some(path.to_path_buf()), None),
        OutputFormat::Svg => (None, Some(path.to_path_buf())),
        OutputFormat::Both => (Some(path.with_extension("csv")), Some(path.with_extension("svg"))),
    };
    if let Some(p) = csv {
        files.stage(&p, &encode_csv(grid))?;
    }
    if let Some(p) = svg {
        files.stage(&p, &encode_svg(grid, &Palette::default()))?;
    }
    Ok(())
}

fn report_written(paths: &[PathBuf]) {
    for p in paths {
        emit(&format!("wrote {}\n", p.display()));
    }
}

fn sweep(cmd: SweepCommand) -> CliResult<()> {
    let mut config = cmd.common.load()?;
    cmd.model.apply(&mut config)?;
    if let (Some(budget), Some(sweep)) = (cmd.max_cells, config.sweep.as_mut()) {
        sweep.max_cells = Some(budget);
    }
    let spec = config.grid()?;
    let path = config
        .output
        .path
        .clone()
        .ok_or_else(|| CliError::Config("sweep needs an output path (--out or output.path)".into()))?;
    check_budget("sweep", &spec, config.max_cells())?;
    let measures = config.sweep.as_ref().is_some_and(|s| s.measures);
    let grid = execute(&spec, measures, config.run.jobs)?;
    summarize("sweep", &grid);
    let mut files = StagedFiles::new();
    stage_grid(&mut files, &grid, &path, config.output.format.unwrap_or_default())?;
    report_written(&files.commit()?);
    Ok(())
}

fn figure(cmd: FigureCommand) -> CliResult<()> {
    let config = cmd.common.load()?;
    let grids = presets::figure(&cmd.name).map_err(|e| CliError::Config(e.to_string()))?;
    let budget = cmd.max_cells.unwrap_or_else(|| config.max_cells());
    let mut specs = Vec::with_capacity(grids.len());
    for (name, mut spec) in grids {
        if let Some(n) = cmd.resolution {
            spec.x.n = n;
            spec.y.n = n;
        }
        spec.horizon = config.run.horizon.or(spec.horizon);
        spec.n_steps = config.run.steps.unwrap_or(spec.n_steps);
        spec.epsilon = config.run.epsilon.or(spec.epsilon);
        spec.tol = config.run.tolerance.or(spec.tol);
        spec.validate().map_err(|e| CliError::Config(format!("{name}: {e}")))?;
        check_budget(&name, &spec, budget)?;
        specs.push((name, spec));
    }
    let dir = config.output.path.clone().unwrap_or_else(|| PathBuf::from("."));
    let format = config.output.format.unwrap_or(OutputFormat::Both);
    let mut results = Vec::with_capacity(specs.len());
    for (name, spec) in specs {
        let pauli = spec.family == ModelFamily::Pauli;
        let mut grid = execute(&spec, !pauli, config.run.jobs)?;
        if pauli {
            let check = pauli_predicate_check(&grid)?;
            emit(&format!(
                "{name}: predicate cross-check {} mismatches ({} near a boundary)\n",
                check.mismatches, check.near_boundary_mismatches
            ));
            if check.hard_mismatches() > 0 {
                return Err(CliError::Check(format!(
                    "{name}: {} cells disagree with the rate predicates away from any boundary",
                    check.hard_mismatches()
                )));
            }
            apply_pauli_predicates(&mut grid)?;
        }
        summarize(&name, &grid);
        results.push((name, grid));
    }
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
    let mut files = StagedFiles::new();
    for (name, grid) in &results {
        let base = dir.join(name);
        let path = match format {
            OutputFormat::Csv => base.with_extension("csv"),
            OutputFormat::Svg => base.with_extension("svg"),
            OutputFormat::Both => base,
        };
        stage_grid(&mut files, grid, &path, format)?;
    }
    report_written(&files.commit()?);
    Ok(())
}

fn dump_config(cmd: ConfigCommand) -> CliResult<()> {
    emit(&format!("{}\n", preset_config(&cmd.preset)?.to_json()));
    Ok(())
}
