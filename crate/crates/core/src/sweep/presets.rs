//! Grid presets for the four phase diagrams.

use std::f64::consts::PI;

use super::{Axis, GridSpec, PhaseDiagramGrid};
use crate::divisibility::{pauli_rate_class, DivisibilityClass};
use crate::error::{Error, Result};
use crate::models::{ModelFamily, ModelSpec};

pub const FIGURE_NAMES: [&str; 4] = ["fig1", "fig2", "fig3", "fig4"];

/// Constant-rate Pauli slices in the `(γ₁, γ₂)` plane at `γ₃ = ±0.5`.
pub fn fig1_slices() -> Vec<(String, GridSpec)> {
    [("fig1_g3_pos", 0.5), ("fig1_g3_neg", -0.5)]
        .into_iter()
        .map(|(name, g3)| {
            let mut spec = GridSpec::new(ModelFamily::Pauli, Axis::new("g1", -1.0, 1.0, 101), Axis::new("g2", -1.0, 1.0, 101))
                .with_fixed("g3", g3);
            // constant rates: the class does not depend on the horizon
            spec.horizon = Some(1.0);
            (name.to_string(), spec)
        })
        .collect()
}

/// C-NOT target: depolarizing rate against control population, `J = 1`.
pub fn fig2() -> GridSpec {
    GridSpec::new(ModelFamily::Cnot, Axis::new("gamma", 0.0, 1.0, 101), Axis::new("a", 0.0, 1.0, 101)).with_fixed("J", 1.0)
}

/// Amplitude damping in the `(γ₀, λ)` plane.
pub fn fig3() -> GridSpec {
    GridSpec::new(
        ModelFamily::AmplitudeDamping,
        Axis::new("gamma0", 0.05, 2.0, 101),
        Axis::new("lambda", 0.1, 2.0, 101),
    )
}

/// Superradiant pair: separation `x = qd` against environment population.
/// The `x` axis is `kπ/30`, `k = 1..=90`, so `π`, `2π`, `3π` are columns.
pub fn fig4() -> GridSpec {
    GridSpec::new(ModelFamily::Superradiance, Axis::new("x", PI / 30.0, 3.0 * PI, 90), Axis::new("a", 0.0, 1.0, 51))
        .with_fixed("gamma0", 1.0)
}

/// Named grids making up a figure.
pub fn figure(name: &str) -> Result<Vec<(String, GridSpec)>> {
    Ok(match name {
        "fig1" => fig1_slices(),
        "fig2" => vec![("fig2".into(), fig2())],
        "fig3" => vec![("fig3".into(), fig3())],
        "fig4" => vec![("fig4".into(), fig4())],
        _ => return Err(Error::InvalidParameters(format!("unknown figure `{name}` (expected one of {FIGURE_NAMES:?})"))),
    })
}

/// Agreement between the numeric classes of a constant-rate Pauli grid and
/// the rate-inequality predicate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PredicateCheck {
    pub mismatches: usize,
    /// Mismatches on cells flagged as near a class boundary.
    pub near_boundary_mismatches: usize,
}

impl PredicateCheck {
    /// Mismatches away from any boundary.
    pub fn hard_mismatches(&self) -> usize {
        self.mismatches - self.near_boundary_mismatches
    }
}

fn predicate_classes(grid: &PhaseDiagramGrid) -> Result<Vec<DivisibilityClass>> {
    if grid.spec.family != ModelFamily::Pauli {
        return Err(Error::InvalidParameters("predicate cross-check applies to Pauli grids only".into()));
    }
    grid.cells
        .iter()
        .map(|cell| match grid.spec.model_at(cell.x, cell.y)? {
            ModelSpec::Pauli(m) => Ok(pauli_rate_class(m.rates_at(0.0))),
            _ => unreachable!("Pauli family builds Pauli models"),
        })
        .collect()
}

pub fn pauli_predicate_check(grid: &PhaseDiagramGrid) -> Result<PredicateCheck> {
    let mut check = PredicateCheck::default();
    for (cell, expected) in grid.cells.iter().zip(predicate_classes(grid)?) {
        if cell.class != Some(expected) {
            check.mismatches += 1;
            if cell.near_boundary {
                check.near_boundary_mismatches += 1;
            }
        }
    }
    Ok(check)
}

/// Replaces every cell class by the predicate class.
pub fn apply_pauli_predicates(grid: &mut PhaseDiagramGrid) -> Result<()> {
    let classes = predicate_classes(grid)?;
    for (cell, class) in grid.cells.iter_mut().zip(classes) {
        cell.class = Some(class);
    }
    Ok(())
}
