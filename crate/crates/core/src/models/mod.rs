//! The four dynamics families and their propagators `E_{t,0}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

pub mod composite;
pub mod damping;
pub(crate) mod integrate;
pub mod pauli;

pub use composite::{
    default_steps, reduced_propagator, reduced_propagator_checked, sinc, CnotControlModel, JointDynamics, Mat16,
    SuperradianceModel,
};
pub use damping::{amplitude_damping_propagator, AmplitudeDampingModel};
pub use pauli::{pauli_generator, pauli_propagator_analytic, PauliChannelModel, RateFn};

use crate::error::{Error, Result};
use crate::qmat::{Mat4, SuperOperator, Tolerances};
use composite::{joint_hermiticity_preservation_error, joint_trace_annihilation_error};
use integrate::rk4_linear;

/// An instantaneous generator: single-qubit, or joint on system plus environment.
#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum GeneratorAt {
    Single(Mat4),
    Joint(Mat16),
}

impl GeneratorAt {
    /// Largest entry of `vec(I)† · L`.
    pub fn trace_annihilation_error(&self) -> f64 {
        match self {
            GeneratorAt::Single(l) => (0..4).map(|c| (l[(0, c)] + l[(3, c)]).norm()).fold(0.0, f64::max),
            GeneratorAt::Joint(l) => joint_trace_annihilation_error(l),
        }
    }

    pub fn hermiticity_preservation_error(&self) -> f64 {
        match self {
            GeneratorAt::Single(l) => SuperOperator::from_matrix(*l).hermiticity_preservation_error(),
            GeneratorAt::Joint(l) => joint_hermiticity_preservation_error(l),
        }
    }
}

/// Integrates `dE/dt = L_t E` from `E(0) = I` with fixed-step RK4.
pub fn propagate_rk4<F: Fn(f64) -> Mat4>(generator: F, t: f64, steps: usize) -> Result<SuperOperator> {
    if steps == 0 {
        return Err(Error::InvalidParameters("steps must be at least 1".into()));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameters(format!("time must be non-negative, got {t}")));
    }
    let e = SuperOperator::from_matrix(rk4_linear(generator, Mat4::identity(), t, steps));
    if e.matrix().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::IntegrationUnstable(format!("non-finite propagator at t = {t}")));
    }
    let tp = e.trace_preservation_error();
    if tp > Tolerances::DEFAULT.propagator_tp {
        return Err(Error::IntegrationUnstable(format!("trace preservation error {tp:.3e} at t = {t}")));
    }
    Ok(e)
}

/// [`propagate_rk4`] that also rejects results changing by more than `1e-6`
/// when the step is halved.
pub fn propagate_rk4_checked<F: Fn(f64) -> Mat4>(generator: F, t: f64, steps: usize) -> Result<SuperOperator> {
    let coarse = propagate_rk4(&generator, t, steps)?;
    let fine = propagate_rk4(&generator, t, 2 * steps)?;
    let change = coarse.max_abs_diff(&fine);
    if change > composite::STEP_CHECK_TOL {
        return Err(Error::IntegrationUnstable(format!(
            "halving the step changed the propagator by {change:.3e} at t = {t}"
        )));
    }
    Ok(fine)
}

/// Model family tags, as used in configs and sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelFamily {
    Pauli,
    AmplitudeDamping,
    Cnot,
    Superradiance,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 4] =
        [ModelFamily::Pauli, ModelFamily::AmplitudeDamping, ModelFamily::Cnot, ModelFamily::Superradiance];

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Pauli => "pauli",
            ModelFamily::AmplitudeDamping => "ad",
            ModelFamily::Cnot => "cnot",
            ModelFamily::Superradiance => "superradiance",
        }
    }

    /// Numeric parameters and their defaults.
    pub fn default_params(self) -> &'static [(&'static str, f64)] {
        match self {
            ModelFamily::Pauli => &[("g1", 1.0), ("g2", 1.0), ("g3", 1.0)],
            ModelFamily::AmplitudeDamping => &[("gamma0", 1.0), ("lambda", 1.0)],
            ModelFamily::Cnot => &[("J", 1.0), ("gamma", 0.01), ("a", 0.5)],
            ModelFamily::Superradiance => &[("gamma0", 1.0), ("x", PI / 2.0), ("a", 0.5)],
        }
    }

    pub fn param_names(self) -> Vec<&'static str> {
        self.default_params().iter().map(|(n, _)| *n).collect()
    }

    pub fn has_param(self, name: &str) -> bool {
        self.default_params().iter().any(|(n, _)| *n == name)
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pauli" => Ok(ModelFamily::Pauli),
            "ad" | "amplitude-damping" => Ok(ModelFamily::AmplitudeDamping),
            "cnot" => Ok(ModelFamily::Cnot),
            "superradiance" => Ok(ModelFamily::Superradiance),
            _ => Err(Error::InvalidModel(format!("unknown model family `{s}`"))),
        }
    }
}

/// One concrete model from any of the four families.
#[derive(Clone, Debug)]
pub enum ModelSpec {
    Pauli(PauliChannelModel),
    AmplitudeDamping(AmplitudeDampingModel),
    Cnot(CnotControlModel),
    Superradiance(SuperradianceModel),
}

impl ModelSpec {
    /// Builds a model from numeric parameters; missing ones take the family
    /// defaults and unknown names are rejected.
    pub fn from_params(family: ModelFamily, params: &BTreeMap<String, f64>) -> Result<Self> {
        if let Some(bad) = params.keys().find(|k| !family.has_param(k)) {
            return Err(Error::InvalidModel(format!(
                "unknown parameter `{bad}` for family {family} (expected one of {:?})",
                family.param_names()
            )));
        }
        let get = |name: &str| {
            params.get(name).copied().unwrap_or_else(|| {
                family.default_params().iter().find(|(n, _)| *n == name).map(|(_, v)| *v).unwrap()
            })
        };
        Ok(match family {
            ModelFamily::Pauli => {
                let g = [get("g1"), get("g2"), get("g3")];
                if g.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidModel("Pauli rates must be finite".into()));
                }
                ModelSpec::Pauli(PauliChannelModel::constant(g))
            }
            ModelFamily::AmplitudeDamping => {
                ModelSpec::AmplitudeDamping(AmplitudeDampingModel::new(get("gamma0"), get("lambda"))?)
            }
            ModelFamily::Cnot => ModelSpec::Cnot(CnotControlModel::new(get("J"), get("gamma"), get("a"))?),
            ModelFamily::Superradiance => {
                ModelSpec::Superradiance(SuperradianceModel::new(get("gamma0"), get("x"), get("a"))?)
            }
        })
    }

    pub fn family(&self) -> ModelFamily {
        match self {
            ModelSpec::Pauli(_) => ModelFamily::Pauli,
            ModelSpec::AmplitudeDamping(_) => ModelFamily::AmplitudeDamping,
            ModelSpec::Cnot(_) => ModelFamily::Cnot,
            ModelSpec::Superradiance(_) => ModelFamily::Superradiance,
        }
    }

    /// Horizon used when none is configured.
    pub fn default_horizon(&self) -> f64 {
        match self {
            ModelSpec::Pauli(m) => {
                if m.rates.iter().any(|r| matches!(r, RateFn::Sin | RateFn::SinNeg)) {
                    4.0 * PI
                } else {
                    10.0
                }
            }
            ModelSpec::AmplitudeDamping(_) => 100.0,
            ModelSpec::Cnot(m) if m.coupling() != 0.0 => 2.0 * PI / m.coupling().abs(),
            ModelSpec::Cnot(_) => 2.0 * PI,
            ModelSpec::Superradiance(m) => 10.0 / m.gamma0(),
        }
    }

    /// `E_{t,0}`: closed form for Pauli and amplitude damping, RK4 on the
    /// joint dynamics otherwise.
    pub fn propagator(&self, t: f64) -> Result<SuperOperator> {
        match self {
            ModelSpec::Pauli(m) => m.propagator(t),
            ModelSpec::AmplitudeDamping(m) => Ok(m.propagator(t)),
            ModelSpec::Cnot(m) => m.dynamics().propagator_rk4(t, default_steps(t)),
            ModelSpec::Superradiance(m) => m.dynamics().propagator_rk4(t, default_steps(t)),
        }
    }

    /// `E_{t_k,0}` at `t_k = k · horizon / n_steps`, `k = 0 ..= n_steps`.
    pub fn propagator_grid(&self, horizon: f64, n_steps: usize) -> Result<Vec<SuperOperator>> {
        check_grid(horizon, n_steps)?;
        let dt = horizon / n_steps as f64;
        match self {
            ModelSpec::Pauli(m) => (0..=n_steps).map(|k| m.propagator(k as f64 * dt)).collect(),
            ModelSpec::AmplitudeDamping(m) => Ok((0..=n_steps).map(|k| m.propagator(k as f64 * dt)).collect()),
            ModelSpec::Cnot(m) => Ok(m.dynamics().propagator_grid(horizon, n_steps)),
            ModelSpec::Superradiance(m) => Ok(m.dynamics().propagator_grid(horizon, n_steps)),
        }
    }
}

pub(crate) fn check_grid(horizon: f64, n_steps: usize) -> Result<()> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameters(format!("horizon must be positive, got {horizon}")));
    }
    if n_steps == 0 {
        return Err(Error::InvalidParameters("n_steps must be at least 1".into()));
    }
    Ok(())
}

impl From<PauliChannelModel> for ModelSpec {
    fn from(m: PauliChannelModel) -> Self {
        ModelSpec::Pauli(m)
    }
}

impl From<AmplitudeDampingModel> for ModelSpec {
    fn from(m: AmplitudeDampingModel) -> Self {
        ModelSpec::AmplitudeDamping(m)
    }
}

impl From<CnotControlModel> for ModelSpec {
    fn from(m: CnotControlModel) -> Self {
        ModelSpec::Cnot(m)
    }
}

impl From<SuperradianceModel> for ModelSpec {
    fn from(m: SuperradianceModel) -> Self {
        ModelSpec::Superradiance(m)
    }
}
