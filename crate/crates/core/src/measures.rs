//! Trace-distance backflow (BLP) and Choi trace-norm (RHP) measures.

use std::f64::consts::PI;

use nalgebra::Matrix4;

use crate::divisibility::{complement_steps, ClassifyOptions, ComplementStep};
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::qmat::{choi_of, hermitian_trace_norm};

/// Default number of antipodal pairs sampled by the BLP measure.
pub const DEFAULT_PAIRS: usize = 64;
/// Default threshold above which a measure counts as a detection.
pub const DEFAULT_DETECTION_THRESHOLD: f64 = 1e-5;
/// Trace-distance increments below this are treated as round-off.
pub const BACKFLOW_FLOOR: f64 = 1e-12;
/// Choi trace-norm excesses below this are treated as round-off.
pub const RHP_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct BlpResult {
    /// Left end `t_k` of each increment.
    pub times: Vec<f64>,
    /// `σ = ΔD/Δt` indexed `[pair][k]`.
    pub sigma_series: Vec<Vec<f64>>,
    /// Largest accumulated positive variation of `D` over the pairs.
    pub measure: f64,
    /// Bloch directions of the best pair.
    pub argmax_pair: ([f64; 3], [f64; 3]),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhpResult {
    pub times: Vec<f64>,
    pub g_series: Vec<f64>,
    /// Trapezoidal integral of `g` over the non-singular times.
    pub measure: f64,
    pub singular_times: Vec<f64>,
}

/// Antipodal pure-state pairs `(n, −n)` with `n` on a Fibonacci lattice of
/// the upper hemisphere, pole and equator included.
pub fn antipodal_pairs(n_pairs: usize) -> Vec<([f64; 3], [f64; 3])> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n_pairs)
        .map(|i| {
            let z = if n_pairs == 1 { 1.0 } else { i as f64 / (n_pairs - 1) as f64 };
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            let n = [r * phi.cos(), r * phi.sin(), z];
            (n, n.map(|c| -c))
        })
        .collect()
}

/// Trace distance between the images of the pure states `±n` under the map
/// with Pauli transfer matrix `r`. The image of `ρ₁ − ρ₂ = n·σ` is
/// `a I + v·σ`, whose trace norm is `|a + |v|| + |a − |v||`.
fn pair_distance(r: &Matrix4<f64>, n: [f64; 3]) -> f64 {
    let row = |i: usize| r[(i, 1)] * n[0] + r[(i, 2)] * n[1] + r[(i, 3)] * n[2];
    let a = row(0);
    let (x, y, z) = (row(1), row(2), row(3));
    let v = (x * x + y * y + z * z).sqrt();
    0.5 * ((a + v).abs() + (a - v).abs())
}

/// BLP measure over `n_pairs` antipodal pairs on `t_k = k · horizon / n_steps`.
pub fn blp_measure(model: &ModelSpec, horizon: f64, n_steps: usize, n_pairs: usize) -> Result<BlpResult> {
    if n_pairs == 0 {
        return Err(Error::InvalidParameters("n_pairs must be at least 1".into()));
    }
    let transfers: Vec<_> = model.propagator_grid(horizon, n_steps)?.iter().map(|e| e.pauli_transfer()).collect();
    let dt = horizon / n_steps as f64;
    let pairs = antipodal_pairs(n_pairs);
    let mut sigma_series = Vec::with_capacity(n_pairs);
    let mut measure = 0.0;
    let mut argmax = 0;
    for (p, (n, _)) in pairs.iter().enumerate() {
        let distances: Vec<f64> = transfers.iter().map(|r| pair_distance(r, *n)).collect();
        let mut backflow = 0.0;
        let mut sigma = Vec::with_capacity(n_steps);
        for w in distances.windows(2) {
            let delta = w[1] - w[0];
            if delta > BACKFLOW_FLOOR {
                backflow += delta;
            }
            sigma.push(delta / dt);
        }
        if backflow > measure {
            measure = backflow;
            argmax = p;
        }
        sigma_series.push(sigma);
    }
    Ok(BlpResult {
        times: (0..n_steps).map(|k| k as f64 * dt).collect(),
        sigma_series,
        measure,
        argmax_pair: pairs[argmax],
    })
}

/// `g = (‖C(Λ)‖₁ − 1)/ε`, zero when the excess is below [`RHP_FLOOR`].
pub fn rhp_g(step: &ComplementStep) -> f64 {
    let excess = hermitian_trace_norm(choi_of(&step.lambda_map).elements()) - 1.0;
    if excess < RHP_FLOOR {
        0.0
    } else {
        excess / step.epsilon
    }
}

pub fn rhp_measure(model: &ModelSpec, horizon: f64, n_steps: usize, epsilon: f64) -> Result<RhpResult> {
    let opts = ClassifyOptions { epsilon, ..ClassifyOptions::new(horizon, n_steps) };
    rhp_from_steps(&complement_steps(model, &opts)?)
}

pub(crate) fn rhp_from_steps(steps: &[(f64, Result<ComplementStep>)]) -> Result<RhpResult> {
    let mut times = Vec::with_capacity(steps.len());
    let mut g_series = Vec::with_capacity(steps.len());
    let mut singular_times = Vec::new();
    for (t, step) in steps {
        match step {
            Ok(step) => {
                times.push(*t);
                g_series.push(rhp_g(step));
            }
            Err(Error::SingularMap { .. }) => singular_times.push(*t),
            Err(e) => return Err(e.clone()),
        }
    }
    if times.is_empty() {
        return Err(Error::AllStepsSingular);
    }
    let measure = times
        .windows(2)
        .zip(g_series.windows(2))
        .map(|(t, g)| 0.5 * (t[1] - t[0]) * (g[0] + g[1]))
        .sum();
    Ok(RhpResult { times, g_series, measure, singular_times })
}

pub fn blp_detects(result: &BlpResult, threshold: f64) -> bool {
    result.measure > threshold
}

pub fn rhp_detects(result: &RhpResult, threshold: f64) -> bool {
    result.measure > threshold
}
