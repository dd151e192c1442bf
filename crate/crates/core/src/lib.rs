//! k-divisibility classification of qubit open-system dynamics.
//!
//! The crate builds propagators `E_{t,0}` for four model families, forms the
//! complement steps `Λ_{t+ε,t} = E_{t+ε} ∘ E_t⁻¹`, and sorts processes into
//! CP-divisible (PD₂), P-divisible only (PD₁) and neither (PD₀). It also
//! computes the trace-distance backflow and Choi trace-norm measures and runs
//! parallel parameter sweeps.

pub mod divisibility;
pub mod error;
pub mod measures;
pub mod models;
pub mod qmat;
pub mod sweep;

pub use divisibility::{classify, classify_with, ClassifyOptions, DivisibilityClass, DivisibilityVerdict};
pub use error::{Error, Result};
pub use measures::{blp_measure, rhp_measure, BlpResult, RhpResult};
pub use models::{ModelFamily, ModelSpec};
pub use qmat::{ChoiMatrix, DensityMatrix, SuperOperator, Tolerances};
pub use sweep::{run_sweep, run_sweep_with_jobs, GridSpec, PhaseDiagramGrid};
