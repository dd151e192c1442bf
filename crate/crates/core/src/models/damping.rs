//! Resonant amplitude damping with a Lorentzian reservoir.
//!
//! The excited amplitude evolves as
//! `G(t) = e^{−λt/2} [cosh(dt/2) + (λ/d) sinh(dt/2)]` with `d = √(λ² − 2γ₀λ)`,
//! continued analytically to imaginary `d` when `γ₀ > λ/2`. The map keeps the
//! excited population times `|G|²`, scales coherences by `G`, and refills the
//! ground population. The time-local rate is `γ(t) = −2 Re(Ġ/G)`.

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::qmat::SuperOperator;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeDampingModel {
    gamma0: f64,
    lambda: f64,
}

impl AmplitudeDampingModel {
    pub fn new(gamma0: f64, lambda: f64) -> Result<Self> {
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(Error::InvalidModel(format!("gamma0 must be positive, got {gamma0}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidModel(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { gamma0, lambda })
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `d² = λ² − 2γ₀λ`; negative on the oscillatory branch.
    pub fn d_squared(&self) -> f64 {
        self.lambda * (self.lambda - 2.0 * self.gamma0)
    }

    /// Lorentzian spectral density `J(ω) = γ₀λ² / [2π(ω² + λ²)]`.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        let l2 = self.lambda * self.lambda;
        self.gamma0 * l2 / (2.0 * std::f64::consts::PI * (omega * omega + l2))
    }

    /// Excited-state amplitude `G(t)`.
    pub fn coherence_factor(&self, t: f64) -> f64 {
        let (value, _) = self.amplitude_and_derivative(t);
        value
    }

    /// `γ(t) = −2 Re(Ġ/G)`; infinite at zeros of `G`.
    pub fn rate(&self, t: f64) -> f64 {
        let (g, dg) = self.amplitude_and_derivative(t);
        -2.0 * dg / g
    }

    /// First positive zero of `G`, present only when `γ₀ > λ/2`.
    pub fn first_zero(&self) -> Option<f64> {
        let d2 = self.d_squared();
        if d2 >= 0.0 {
            return None;
        }
        let omega = (-d2).sqrt();
        // cos(ωt/2) + (λ/ω) sin(ωt/2) = 0
        Some(2.0 * (std::f64::consts::PI - (omega / self.lambda).atan()) / omega)
    }

    fn amplitude_and_derivative(&self, t: f64) -> (f64, f64) {
        let l = self.lambda;
        let d2 = self.d_squared();
        let (c, s) = cosh_sinhc(d2, t);
        // G = e^{−λt/2} (c + λ s),  Ġ = −λ/2 G + e^{−λt/2} (d² s + λ c)/2
        let env = (-0.5 * l * t).exp();
        let g = if d2 > 0.0 && 0.25 * d2 * t * t >= SERIES_CUTOFF {
            // split form avoids overflowing cosh for long times
            let d = d2.sqrt();
            0.5 * ((1.0 + l / d) * (-0.5 * (l - d) * t).exp()
                + (1.0 - l / d) * (-0.5 * (l + d) * t).exp())
        } else {
            env * (c + l * s)
        };
        let dg = -0.5 * l * g + 0.5 * env * (d2 * s + l * c);
        (g, dg)
    }

    pub fn propagator(&self, t: f64) -> SuperOperator {
        amplitude_damping_propagator(self, t)
    }
}

const SERIES_CUTOFF: f64 = 1e-4;

/// `(cosh(dt/2), sinh(dt/2)/d)` written in terms of `d²` so that both
/// branches and the critical point `d = 0` share one code path.
fn cosh_sinhc(d2: f64, t: f64) -> (f64, f64) {
    let u = 0.25 * d2 * t * t;
    if u.abs() < SERIES_CUTOFF {
        let c = 1.0 + u / 2.0 + u * u / 24.0 + u * u * u / 720.0;
        let s = 0.5 * t * (1.0 + u / 6.0 + u * u / 120.0 + u * u * u / 5040.0);
        (c, s)
    } else if d2 > 0.0 {
        let d = d2.sqrt();
        ((0.5 * d * t).cosh(), (0.5 * d * t).sinh() / d)
    } else {
        let w = (-d2).sqrt();
        ((0.5 * w * t).cos(), (0.5 * w * t).sin() / w)
    }
}

/// Amplitude-damping type map with excited-amplitude factor `g`.
pub(crate) fn damping_map(g: f64) -> SuperOperator {
    let p = g * g;
    #[rustfmt::skip]
    let ptm = Matrix4::new(
        1.0,     0.0, 0.0, 0.0,
        0.0,     g,   0.0, 0.0,
        0.0,     0.0, g,   0.0,
        1.0 - p, 0.0, 0.0, p,
    );
    // σz = |0⟩⟨0| − |1⟩⟨1| with |1⟩ excited, so decay pushes z towards +1
    SuperOperator::from_pauli_transfer(&ptm)
}

pub fn amplitude_damping_propagator(model: &AmplitudeDampingModel, t: f64) -> SuperOperator {
    damping_map(model.coherence_factor(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{choi_of, DensityMatrix, Mat2, C64};

    fn model(g0: f64, l: f64) -> AmplitudeDampingModel {
        AmplitudeDampingModel::new(g0, l).unwrap()
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(AmplitudeDampingModel::new(0.0, 1.0).is_err());
        assert!(AmplitudeDampingModel::new(1.0, -1.0).is_err());
        assert!(AmplitudeDampingModel::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn identity_at_time_zero() {
        for (g0, l) in [(0.2, 1.0), (0.5, 1.0), (3.0, 0.5)] {
            let e = model(g0, l).propagator(0.0);
            assert!(e.max_abs_diff(&SuperOperator::identity()) < 1e-15);
        }
    }

    #[test]
    fn excited_population_decays_into_ground() {
        let m = model(0.3, 1.0);
        let t = 1.7;
        let g = m.coherence_factor(t);
        let out = m.propagator(t).apply(DensityMatrix::excited().matrix());
        assert!((out[(1, 1)].re - g * g).abs() < 1e-14);
        assert!((out[(0, 0)].re - (1.0 - g * g)).abs() < 1e-14);
        let plus = Mat2::new(C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.5, 0.0));
        let out = m.propagator(t).apply(&plus);
        assert!((out[(0, 1)].re - 0.5 * g).abs() < 1e-14);
    }

    #[test]
    fn weak_coupling_rate_is_nonnegative() {
        for (g0, l) in [(0.1, 1.0), (0.49, 1.0), (0.5, 1.0), (0.05, 2.0), (0.9, 2.0)] {
            let m = model(g0, l);
            let mut prev = 1.0;
            for k in 1..=2000 {
                let t = 0.01 * k as f64;
                let g = m.coherence_factor(t);
                assert!(g > 0.0 && g <= prev, "G not decreasing at {t} for {g0},{l}");
                assert!(m.rate(t) >= -1e-12, "negative rate at {t} for {g0},{l}");
                prev = g;
            }
        }
    }

    #[test]
    fn matches_finite_difference_rate() {
        let m = model(1.3, 0.7);
        for t in [0.3, 1.1, 2.0] {
            let h = 1e-5;
            let fd = (m.coherence_factor(t + h) - m.coherence_factor(t - h)) / (2.0 * h);
            assert!((-2.0 * fd / m.coherence_factor(t) - m.rate(t)).abs() < 1e-6);
        }
    }

    #[test]
    fn branches_agree_near_critical_coupling() {
        let l = 1.0;
        for t in [0.5, 3.0, 20.0] {
            let below = model(0.5 - 1e-9, l).coherence_factor(t);
            let at = model(0.5, l).coherence_factor(t);
            let above = model(0.5 + 1e-9, l).coherence_factor(t);
            let exact = (-0.5 * l * t).exp() * (1.0 + 0.5 * l * t);
            assert!((at - exact).abs() < 1e-12);
            assert!((below - at).abs() < 1e-7 && (above - at).abs() < 1e-7);
        }
    }

    #[test]
    fn strong_coupling_has_a_singular_zero() {
        let m = model(2.0, 1.0);
        // independent bisection on G over the first sign change
        let (mut lo, mut hi) = (0.0, 0.0);
        let mut t = 0.0;
        while m.coherence_factor(t) > 0.0 {
            lo = t;
            t += 0.01;
            hi = t;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if m.coherence_factor(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        let closed = m.first_zero().unwrap();
        assert!((root - closed).abs() < 1e-10);
        let e = m.propagator(closed);
        assert!(matches!(e.invert(1e8), Err(Error::SingularMap { .. })));
        assert!(model(0.4, 1.0).first_zero().is_none());
    }

    #[test]
    fn propagator_is_cptp_on_both_branches() {
        for (g0, l) in [(0.2, 1.0), (0.5, 1.0), (2.0, 1.0), (5.0, 0.3)] {
            let m = model(g0, l);
            for k in 0..200 {
                let e = m.propagator(0.1 * k as f64);
                assert!(e.is_trace_preserving(1e-12));
                assert!(e.is_hermiticity_preserving(1e-12));
                assert!(choi_of(&e).min_eigenvalue() >= -1e-9);
            }
        }
    }

    #[test]
    fn spectral_density_peak() {
        let m = model(0.8, 2.0);
        let peak = m.spectral_density(0.0);
        assert!((peak - 0.8 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert!((m.spectral_density(2.0) - 0.5 * peak).abs() < 1e-15);
    }
}
