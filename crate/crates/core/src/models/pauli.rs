//! Pauli dephasing channels with time-dependent rates.
//!
//! `dρ/dt = ½ Σ_j γ_j(t) (σ_j ρ σ_j − ρ)`. The map stays Pauli diagonal with
//! Bloch eigenvalues `λ_j(t) = exp(−Γ_k(t) − Γ_l(t))` for cyclic `(j, k, l)`,
//! where `Γ_j(t) = ∫₀ᵗ γ_j`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::integrate::adaptive_simpson;
use super::GeneratorAt;
use crate::error::{Error, Result};
use crate::qmat::{pauli, Mat4, SuperOperator, C64};

/// Absolute accuracy of the numerical rate integrals.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// A user supplied rate function, integrated numerically.
#[derive(Clone)]
pub struct CustomRate(pub Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl fmt::Debug for CustomRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomRate(..)")
    }
}

/// A decay rate `γ(t)`. The named variants have closed-form integrals.
#[derive(Clone, Debug)]
pub enum RateFn {
    Const(f64),
    /// `−tanh t`
    TanhNeg,
    /// `sin t`
    Sin,
    /// `−sin t`
    SinNeg,
    Custom(CustomRate),
}

impl RateFn {
    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        RateFn::Custom(CustomRate(Arc::new(f)))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            RateFn::Const(c) => *c,
            RateFn::TanhNeg => -t.tanh(),
            RateFn::Sin => t.sin(),
            RateFn::SinNeg => -t.sin(),
            RateFn::Custom(f) => (f.0)(t),
        }
    }

    /// `∫₀ᵗ γ(τ) dτ`.
    pub fn integral(&self, t: f64) -> Result<f64> {
        Ok(match self {
            RateFn::Const(c) => c * t,
            RateFn::TanhNeg => -ln_cosh(t),
            RateFn::Sin => 1.0 - t.cos(),
            RateFn::SinNeg => t.cos() - 1.0,
            RateFn::Custom(f) => adaptive_simpson(|s| (f.0)(s), 0.0, t, QUADRATURE_TOL)?,
        })
    }

    pub fn is_custom(&self) -> bool {
        matches!(self, RateFn::Custom(_))
    }
}

fn ln_cosh(t: f64) -> f64 {
    let a = t.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

impl fmt::Display for RateFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateFn::Const(c) => write!(f, "const:{c}"),
            RateFn::TanhNeg => f.write_str("tanh-neg"),
            RateFn::Sin => f.write_str("sin"),
            RateFn::SinNeg => f.write_str("sin-neg"),
            RateFn::Custom(_) => f.write_str("custom"),
        }
    }
}

impl FromStr for RateFn {
    type Err = Error;

    /// Parses `const:c`, `tanh-neg`, `sin`, `sin-neg`, or a bare number.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidModel(format!("unknown rate function `{s}`"));
        match s {
            "tanh-neg" => Ok(RateFn::TanhNeg),
            "sin" => Ok(RateFn::Sin),
            "sin-neg" => Ok(RateFn::SinNeg),
            _ => {
                let num = s.strip_prefix("const:").unwrap_or(s);
                let c: f64 = num.parse().map_err(|_| bad())?;
                if c.is_finite() {
                    Ok(RateFn::Const(c))
                } else {
                    Err(bad())
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct PauliChannelModel {
    pub rates: [RateFn; 3],
}

impl PauliChannelModel {
    pub fn new(rates: [RateFn; 3]) -> Self {
        Self { rates }
    }

    pub fn constant(g: [f64; 3]) -> Self {
        Self::new(g.map(RateFn::Const))
    }

    /// `γ₁ = γ₂ = 1, γ₃ = −tanh t`.
    pub fn hall() -> Self {
        Self::new([RateFn::Const(1.0), RateFn::Const(1.0), RateFn::TanhNeg])
    }

    /// `γ₁ = 1, γ₂ = −γ₃ = sin t`.
    pub fn sine() -> Self {
        Self::new([RateFn::Const(1.0), RateFn::Sin, RateFn::SinNeg])
    }

    pub fn rates_at(&self, t: f64) -> [f64; 3] {
        [self.rates[0].eval(t), self.rates[1].eval(t), self.rates[2].eval(t)]
    }

    /// `Γ_j(t)`.
    pub fn integrated_rates(&self, t: f64) -> Result<[f64; 3]> {
        Ok([
            self.rates[0].integral(t)?,
            self.rates[1].integral(t)?,
            self.rates[2].integral(t)?,
        ])
    }

    /// `ln λ_j(t) = −Γ_k(t) − Γ_l(t)`.
    pub fn log_bloch_eigenvalues(&self, t: f64) -> Result<[f64; 3]> {
        let g = self.integrated_rates(t)?;
        Ok([-(g[1] + g[2]), -(g[2] + g[0]), -(g[0] + g[1])])
    }

    pub fn bloch_eigenvalues(&self, t: f64) -> Result<[f64; 3]> {
        Ok(self.log_bloch_eigenvalues(t)?.map(f64::exp))
    }

    pub fn generator(&self, t: f64) -> GeneratorAt {
        pauli_generator(self, t)
    }

    pub fn propagator(&self, t: f64) -> Result<SuperOperator> {
        pauli_propagator_analytic(self, t)
    }
}

/// Superoperator of `½ Σ_j γ_j(t)(σ_j ρ σ_j − ρ)`.
pub fn pauli_generator(model: &PauliChannelModel, t: f64) -> GeneratorAt {
    GeneratorAt::Single(pauli_generator_matrix(model.rates_at(t)))
}

pub(crate) fn pauli_generator_matrix(gamma: [f64; 3]) -> Mat4 {
    let mut l = Mat4::zeros();
    for (j, g) in gamma.iter().enumerate() {
        if *g != 0.0 {
            let conj = SuperOperator::from_conjugation(&pauli(j + 1));
            l += (conj.matrix() - Mat4::identity()) * C64::new(0.5 * g, 0.0);
        }
    }
    l
}

/// Closed-form propagator `E_{t,0}` in the Pauli eigenbasis.
pub fn pauli_propagator_analytic(model: &PauliChannelModel, t: f64) -> Result<SuperOperator> {
    let lambda = model.bloch_eigenvalues(t)?;
    if lambda.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidModel(format!("propagator overflows at t = {t}")));
    }
    Ok(SuperOperator::pauli_diagonal(lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::propagate_rk4;
    use crate::qmat::pauli;

    #[test]
    fn rate_vocabulary_parses() {
        assert!(matches!("tanh-neg".parse::<RateFn>().unwrap(), RateFn::TanhNeg));
        assert!(matches!("sin".parse::<RateFn>().unwrap(), RateFn::Sin));
        assert!(matches!("sin-neg".parse::<RateFn>().unwrap(), RateFn::SinNeg));
        assert!(matches!("const:-0.5".parse::<RateFn>().unwrap(), RateFn::Const(c) if c == -0.5));
        assert!(matches!("2".parse::<RateFn>().unwrap(), RateFn::Const(c) if c == 2.0));
        assert!("cos".parse::<RateFn>().is_err());
        assert!("const:inf".parse::<RateFn>().is_err());
        for r in [RateFn::Const(0.25), RateFn::TanhNeg, RateFn::Sin, RateFn::SinNeg] {
            let back: RateFn = r.to_string().parse().unwrap();
            assert_eq!(back.to_string(), r.to_string());
        }
    }

    #[test]
    fn closed_form_integrals_match_quadrature() {
        for r in [RateFn::Const(-0.7), RateFn::TanhNeg, RateFn::Sin, RateFn::SinNeg] {
            let f = r.clone();
            let custom = RateFn::custom(move |t| f.eval(t));
            for t in [0.0, 0.3, 2.0, 9.5] {
                let exact = r.integral(t).unwrap();
                let numeric = custom.integral(t).unwrap();
                assert!((exact - numeric).abs() < 1e-9, "{r} at {t}");
            }
        }
        assert!((ln_cosh(800.0) - (800.0 - std::f64::consts::LN_2)).abs() < 1e-9);
    }

    #[test]
    fn zero_rates_give_zero_generator() {
        let g = pauli_generator(&PauliChannelModel::constant([0.0; 3]), 1.0);
        assert_eq!(g, GeneratorAt::Single(Mat4::zeros()));
    }

    #[test]
    fn single_sigma_z_rate_damps_sigma_x() {
        let g3 = 0.8;
        let GeneratorAt::Single(l) = pauli_generator(&PauliChannelModel::constant([0.0, 0.0, g3]), 0.0) else {
            unreachable!()
        };
        let out = SuperOperator::from_matrix(l).apply(&pauli(1));
        assert!((out + pauli(1) * C64::new(g3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hall_generator_at_zero_is_unit_rates() {
        let at_zero = pauli_generator(&PauliChannelModel::hall(), 0.0);
        let expected = pauli_generator(&PauliChannelModel::constant([1.0, 1.0, 0.0]), 0.0);
        assert_eq!(at_zero, expected);
    }

    #[test]
    fn analytic_propagator_examples() {
        let m = PauliChannelModel::constant([1.0, 1.0, 0.0]);
        assert!(m.propagator(0.0).unwrap().max_abs_diff(&SuperOperator::identity()) < 1e-15);
        let t = 0.7;
        let e = m.propagator(t).unwrap();
        let expected = SuperOperator::pauli_diagonal([(-t).exp(), (-t).exp(), (-2.0 * t).exp()]);
        assert!(e.max_abs_diff(&expected) < 1e-15);

        let hall = PauliChannelModel::hall();
        for t in [0.5, 2.0, 5.0] {
            let lam = hall.bloch_eigenvalues(t).unwrap();
            let l12 = (-t).exp() * t.cosh();
            assert!((lam[0] - l12).abs() < 1e-14);
            assert!((lam[1] - l12).abs() < 1e-14);
            assert!((lam[2] - (-2.0 * t).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn hall_rk4_matches_analytic() {
        let hall = PauliChannelModel::hall();
        for t in [1.0, 3.0, 5.0] {
            let steps = (200.0 * t) as usize;
            let rk = propagate_rk4(|s| pauli_generator_matrix(hall.rates_at(s)), t, steps).unwrap();
            let exact = hall.propagator(t).unwrap();
            assert!(rk.max_abs_diff(&exact) < 1e-6);
        }
    }

    #[test]
    fn rk4_of_zero_generator_is_identity() {
        let e = propagate_rk4(|_| Mat4::zeros(), 4.0, 10).unwrap();
        assert_eq!(e, SuperOperator::identity());
    }

    #[test]
    fn generator_is_trace_annihilating() {
        let g = pauli_generator(&PauliChannelModel::constant([0.3, -0.4, 1.1]), 0.0);
        assert!(g.trace_annihilation_error() < 1e-15);
        assert!(g.hermiticity_preservation_error() < 1e-15);
    }
}
