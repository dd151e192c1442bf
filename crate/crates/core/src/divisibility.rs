//! Complement maps `Λ_{t+ε,t}` and the PD₀ / PD₁ / PD₂ classification.
//!
//! For qubits 2-positivity is complete positivity, so a process is PD₂ when
//! every complement step is CP, PD₁ when every step is at least positive, and
//! PD₀ otherwise.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::models::damping::damping_map;
use crate::models::{check_grid, ModelSpec};
use crate::qmat::{choi_of, SuperOperator, Tolerances};

/// Directions sampled by the general positivity search.
pub const DEFAULT_POSITIVITY_DIRECTIONS: usize = 128;
/// Default time steps over the horizon.
pub const DEFAULT_STEPS: usize = 500;
/// Default per-step violation tolerance in units of `ε`.
pub const TOL_PER_EPSILON: f64 = 1e-7;
/// Cells within this many tolerances of a class boundary are flagged.
pub const NEAR_BOUNDARY_FACTOR: f64 = 10.0;

/// Seeds of the positivity search that are refined locally.
const REFINED_SEEDS: usize = 8;
/// Smallest angular step of the local refinement.
const REFINE_STEP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DivisibilityClass {
    PD0,
    PD1,
    PD2,
}

impl DivisibilityClass {
    pub fn name(self) -> &'static str {
        match self {
            DivisibilityClass::PD0 => "PD0",
            DivisibilityClass::PD1 => "PD1",
            DivisibilityClass::PD2 => "PD2",
        }
    }
}

impl fmt::Display for DivisibilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DivisibilityClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "PD0" => Ok(DivisibilityClass::PD0),
            "PD1" => Ok(DivisibilityClass::PD1),
            "PD2" => Ok(DivisibilityClass::PD2),
            _ => Err(Error::InvalidParameters(format!("unknown class `{s}`"))),
        }
    }
}

/// One step `Λ_{t+ε,t}` of the process.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplementStep {
    pub t: f64,
    pub epsilon: f64,
    pub lambda_map: SuperOperator,
    pub structure: StepStructure,
}

/// Known structure of a complement step, enabling exact positivity tests.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepStructure {
    General,
    /// Unital and Pauli diagonal with these Bloch eigenvalues.
    PauliDiagonal([f64; 3]),
    /// Amplitude-damping form with coherence factor `r` and population factor `r²`.
    Damping(f64),
}

impl ComplementStep {
    /// `‖Λ ∘ E_t − E_{t+ε}‖_max`.
    pub fn composition_residual(&self, e_t: &SuperOperator, e_te: &SuperOperator) -> f64 {
        self.lambda_map.compose(e_t).max_abs_diff(e_te)
    }
}

/// `Λ = E_{t+ε} ∘ E_t⁻¹` with the default condition threshold.
pub fn complement_map(e_t: &SuperOperator, e_te: &SuperOperator, t: f64, epsilon: f64) -> Result<ComplementStep> {
    complement_map_with(e_t, e_te, t, epsilon, Tolerances::DEFAULT.max_condition)
}

pub fn complement_map_with(
    e_t: &SuperOperator,
    e_te: &SuperOperator,
    t: f64,
    epsilon: f64,
    max_condition: f64,
) -> Result<ComplementStep> {
    let inverse = e_t.invert(max_condition)?;
    Ok(ComplementStep { t, epsilon, lambda_map: e_te.compose(&inverse), structure: StepStructure::General })
}

/// CP test on the Choi spectrum; the witness is the smallest Choi eigenvalue.
pub fn is_cp(map: &SuperOperator, tol: f64) -> (bool, f64) {
    let w = choi_of(map).min_eigenvalue();
    (w >= -tol, w)
}

/// Positivity test over pure inputs; the witness is the smallest output
/// eigenvalue found.
pub fn is_positive(map: &SuperOperator, tol: f64, n_dirs: usize) -> (bool, f64) {
    let w = min_output_eigenvalue(map, n_dirs);
    (w >= -tol, w)
}

/// Unit-ball contraction test for a Pauli-diagonal map.
pub fn is_positive_pauli_diagonal(mu: [f64; 3], tol: f64) -> bool {
    mu.iter().all(|m| m.abs() <= 1.0 + tol)
}

/// Smallest output eigenvalue of a Pauli-diagonal map over pure inputs.
pub fn pauli_diagonal_positivity_witness(mu: [f64; 3]) -> f64 {
    0.5 * (1.0 - mu.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// Smallest output eigenvalue of the damping-form map with coherence factor
/// `r` over pure inputs: `0` for `|r| ≤ 1`, else `1 − r²` at the excited state.
pub fn damping_positivity_witness(r: f64) -> f64 {
    (1.0 - r * r).min(0.0)
}

/// Unit vectors spread over the sphere by the golden-angle spiral.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// The output of a pure input with Bloch vector `n` is `(τ I + v·σ)/2` with
/// `τ, v` affine in `n`; its smaller eigenvalue is `(τ − |v|)/2`.
struct AffineOutput {
    ptm: nalgebra::Matrix4<f64>,
}

impl AffineOutput {
    fn min_eigenvalue(&self, n: [f64; 3]) -> f64 {
        let r = &self.ptm;
        let row = |i: usize| r[(i, 0)] + r[(i, 1)] * n[0] + r[(i, 2)] * n[1] + r[(i, 3)] * n[2];
        let tau = row(0);
        let v = [row(1), row(2), row(3)];
        0.5 * (tau - (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt())
    }

    fn at_angles(&self, theta: f64, phi: f64) -> f64 {
        let s = theta.sin();
        self.min_eigenvalue([s * phi.cos(), s * phi.sin(), theta.cos()])
    }
}

fn min_output_eigenvalue(map: &SuperOperator, n_dirs: usize) -> f64 {
    let f = AffineOutput { ptm: map.pauli_transfer() };
    let n_dirs = n_dirs.max(1);
    let mut seeds: Vec<(f64, [f64; 3])> = fibonacci_sphere(n_dirs).into_iter().map(|n| (f.min_eigenvalue(n), n)).collect();
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let spacing = (4.0 * PI / n_dirs as f64).sqrt();
    let mut best = seeds[0].0;
    for &(value, n) in seeds.iter().take(REFINED_SEEDS) {
        let theta = n[2].clamp(-1.0, 1.0).acos();
        let phi = n[1].atan2(n[0]);
        best = best.min(refine(&f, theta, phi, value, spacing));
    }
    best
}

/// Coordinate pattern search on `(θ, φ)`, halving the step until it drops
/// below [`REFINE_STEP`].
fn refine(f: &AffineOutput, mut theta: f64, mut phi: f64, mut value: f64, start: f64) -> f64 {
    let mut step = start;
    let mut budget = 20_000;
    while step >= REFINE_STEP && budget > 0 {
        budget -= 1;
        let candidates = [(theta + step, phi), (theta - step, phi), (theta, phi + step), (theta, phi - step)];
        let mut moved = false;
        for (th, ph) in candidates {
            let v = f.at_angles(th, ph);
            if v < value {
                value = v;
                theta = th;
                phi = ph;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    value
}

/// Class of a constant-rate Pauli channel from its rates: PD₂ when every
/// rate is non-negative, PD₁ when every pairwise sum is, PD₀ otherwise.
pub fn pauli_rate_class(rates: [f64; 3]) -> DivisibilityClass {
    let [a, b, c] = rates;
    if a >= 0.0 && b >= 0.0 && c >= 0.0 {
        DivisibilityClass::PD2
    } else if a + b >= 0.0 && b + c >= 0.0 && c + a >= 0.0 {
        DivisibilityClass::PD1
    } else {
        DivisibilityClass::PD0
    }
}

/// Grid and tolerance settings of a classification run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyOptions {
    pub horizon: f64,
    pub n_steps: usize,
    pub epsilon: f64,
    pub tol: f64,
    pub n_dirs: usize,
    pub max_condition: f64,
}

impl ClassifyOptions {
    /// `ε = horizon / n_steps` and `tol = 1e-7 · ε`.
    pub fn new(horizon: f64, n_steps: usize) -> Self {
        let epsilon = horizon / n_steps as f64;
        Self {
            horizon,
            n_steps,
            epsilon,
            tol: TOL_PER_EPSILON * epsilon,
            n_dirs: DEFAULT_POSITIVITY_DIRECTIONS,
            max_condition: Tolerances::DEFAULT.max_condition,
        }
    }

    pub fn for_model(model: &ModelSpec) -> Self {
        Self::new(model.default_horizon(), DEFAULT_STEPS)
    }

    pub fn validate(&self) -> Result<()> {
        check_grid(self.horizon, self.n_steps)?;
        if self.n_steps < 2 {
            return Err(Error::InvalidParameters("n_steps must be at least 2".into()));
        }
        let dt = self.horizon / self.n_steps as f64;
        if !(self.epsilon > 0.0 && self.epsilon <= dt * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameters(format!(
                "epsilon must lie in (0, horizon/n_steps = {dt}], got {}",
                self.epsilon
            )));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameters(format!("tolerance must be non-negative, got {}", self.tol)));
        }
        if self.n_dirs == 0 {
            return Err(Error::InvalidParameters("positivity search needs at least one direction".into()));
        }
        Ok(())
    }
}

/// Complement steps at `t_k = k · horizon / n_steps`, `k < n_steps`. A step
/// whose propagator cannot be inverted is returned as its error.
pub fn complement_steps(model: &ModelSpec, opts: &ClassifyOptions) -> Result<Vec<(f64, Result<ComplementStep>)>> {
    opts.validate()?;
    let n = opts.n_steps;
    let dt = opts.horizon / n as f64;
    let eps = opts.epsilon;
    let times = (0..n).map(|k| k as f64 * dt);
    Ok(match model {
        ModelSpec::Pauli(m) => {
            let mut out = Vec::with_capacity(n);
            for t in times {
                let now = m.log_bloch_eigenvalues(t)?;
                let later = m.log_bloch_eigenvalues(t + eps)?;
                let mu = [(later[0] - now[0]).exp(), (later[1] - now[1]).exp(), (later[2] - now[2]).exp()];
                let step = if mu.iter().all(|x| x.is_finite()) {
                    Ok(ComplementStep {
                        t,
                        epsilon: eps,
                        lambda_map: SuperOperator::pauli_diagonal(mu),
                        structure: StepStructure::PauliDiagonal(mu),
                    })
                } else {
                    Err(Error::SingularMap { condition: f64::INFINITY })
                };
                out.push((t, step));
            }
            out
        }
        ModelSpec::AmplitudeDamping(m) => times
            .map(|t| {
                let ratio = m.coherence_factor(t + eps) / m.coherence_factor(t);
                let step = if ratio.is_finite() {
                    Ok(ComplementStep { t, epsilon: eps, lambda_map: damping_map(ratio), structure: StepStructure::Damping(ratio) })
                } else {
                    Err(Error::SingularMap { condition: f64::INFINITY })
                };
                (t, step)
            })
            .collect(),
        ModelSpec::Cnot(_) | ModelSpec::Superradiance(_) => {
            let dynamics = match model {
                ModelSpec::Cnot(m) => m.dynamics(),
                ModelSpec::Superradiance(m) => m.dynamics(),
                _ => unreachable!(),
            };
            dynamics
                .propagator_pairs(opts.horizon, n, eps)
                .into_iter()
                .map(|(t, e_t, e_te)| (t, complement_map_with(&e_t, &e_te, t, eps, opts.max_condition)))
                .collect()
        }
    })
}

/// CP and positivity diagnostics of one non-singular step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepDiagnostics {
    pub t: f64,
    pub cp_witness: f64,
    /// Positivity witness, evaluated only when the CP test failed.
    pub p_witness: Option<f64>,
    pub cp: bool,
    pub positive: bool,
}

/// Runs the CP test and, where it fails, the applicable positivity test.
pub fn diagnose_step(step: &ComplementStep, tol: f64, n_dirs: usize) -> StepDiagnostics {
    let (cp, cp_witness) = is_cp(&step.lambda_map, tol);
    let (positive, p_witness) = if cp {
        (true, None)
    } else {
        let (ok, w) = match step.structure {
            StepStructure::PauliDiagonal(mu) => (is_positive_pauli_diagonal(mu, tol), pauli_diagonal_positivity_witness(mu)),
            StepStructure::Damping(r) => {
                let w = damping_positivity_witness(r);
                (w >= -tol, w)
            }
            StepStructure::General => is_positive(&step.lambda_map, tol, n_dirs),
        };
        (ok, Some(w))
    };
    StepDiagnostics { t: step.t, cp_witness, p_witness, cp, positive }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivisibilityVerdict {
    pub class: DivisibilityClass,
    /// Smallest complement Choi eigenvalue over the horizon.
    pub worst_cp_violation: f64,
    /// Smallest output eigenvalue found on steps that failed the CP test.
    pub worst_p_violation: Option<f64>,
    pub singular_times: Vec<f64>,
    pub tol: f64,
    pub near_boundary: bool,
}

/// Classifies a process from its complement steps over `[0, horizon]`.
pub fn classify(model: &ModelSpec, horizon: f64, n_steps: usize, epsilon: f64, tol: f64) -> Result<DivisibilityVerdict> {
    let opts = ClassifyOptions { epsilon, tol, ..ClassifyOptions::new(horizon, n_steps) };
    classify_with(model, &opts)
}

pub fn classify_with(model: &ModelSpec, opts: &ClassifyOptions) -> Result<DivisibilityVerdict> {
    let steps = complement_steps(model, opts)?;
    verdict_from_steps(&steps, opts)
}

pub(crate) fn verdict_from_steps(
    steps: &[(f64, Result<ComplementStep>)],
    opts: &ClassifyOptions,
) -> Result<DivisibilityVerdict> {
    let tol = opts.tol;
    let mut singular_times = Vec::new();
    let mut cp_min = f64::INFINITY;
    let mut p_min: Option<f64> = None;
    let mut all_cp = true;
    let mut all_positive = true;
    for (t, step) in steps {
        match step {
            Err(Error::SingularMap { .. }) => singular_times.push(*t),
            Err(e) => return Err(e.clone()),
            Ok(step) => {
                let d = diagnose_step(step, tol, opts.n_dirs);
                cp_min = cp_min.min(d.cp_witness);
                if let Some(w) = d.p_witness {
                    p_min = Some(p_min.map_or(w, |m| m.min(w)));
                }
                all_cp &= d.cp;
                all_positive &= d.positive;
            }
        }
    }
    if singular_times.len() == steps.len() {
        return Err(Error::AllStepsSingular);
    }
    let class = if all_cp {
        DivisibilityClass::PD2
    } else if all_positive {
        DivisibilityClass::PD1
    } else {
        DivisibilityClass::PD0
    };
    let near = |w: f64| (w + tol).abs() <= NEAR_BOUNDARY_FACTOR * tol;
    let near_boundary = near(cp_min) || p_min.is_some_and(near);
    Ok(DivisibilityVerdict { class, worst_cp_violation: cp_min, worst_p_violation: p_min, singular_times, tol, near_boundary })
}
