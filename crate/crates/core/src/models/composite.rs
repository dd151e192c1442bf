//! Two-qubit models where one qubit plays the environment of the other.
//!
//! Joint operators are 4x4 with index `2 a + b`, `a` on the first factor.
//! Joint superoperators act on column-stacked 4x4 operators (index `p + 4 q`),
//! so `vec(A X B) = (Bᵀ ⊗ A) vec(X)` as in the single-qubit layer.

use nalgebra::SMatrix;

use super::integrate::rk4_linear;
use crate::error::{Error, Result};
use crate::qmat::{partial_trace_env, pauli, vectorize, DensityMatrix, Factor, Mat2, Mat4, SuperOperator, C64};

pub type Mat16 = SMatrix<C64, 16, 16>;
type Block = SMatrix<C64, 16, 4>;

/// Largest step-halving change accepted by [`reduced_propagator_checked`].
pub const STEP_CHECK_TOL: f64 = 1e-6;
/// Default RK4 resolution for the reduced dynamics.
pub const STEPS_PER_UNIT_TIME: f64 = 200.0;

/// Steps used when the caller does not choose: 200 per unit time, at least one.
pub fn default_steps(t: f64) -> usize {
    ((STEPS_PER_UNIT_TIME * t).ceil() as usize).max(1)
}

fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    a.kronecker(b)
}

/// `X ↦ A X` on joint operators.
fn spre(a: &Mat4) -> Mat16 {
    Mat16::from_fn(|r, c| if r / 4 == c / 4 { a[(r % 4, c % 4)] } else { C64::new(0.0, 0.0) })
}

/// `X ↦ X B` on joint operators.
fn spost(b: &Mat4) -> Mat16 {
    Mat16::from_fn(|r, c| if r % 4 == c % 4 { b[(c / 4, r / 4)] } else { C64::new(0.0, 0.0) })
}

fn commutator_generator(h: &Mat4) -> Mat16 {
    (spre(h) - spost(h)) * C64::new(0.0, -1.0)
}

fn vec16(x: &Mat4) -> SMatrix<C64, 16, 1> {
    SMatrix::<C64, 16, 1>::from_fn(|k, _| x[(k % 4, k / 4)])
}

fn unvec16(v: &SMatrix<C64, 16, 1>) -> Mat4 {
    Mat4::from_fn(|r, c| v[r + 4 * c])
}

/// `|0⟩⟨1|`, lowering the excited level `|1⟩` to the ground level `|0⟩`.
fn lowering() -> Mat2 {
    Mat2::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0))
}

fn projector(level: usize) -> Mat2 {
    let mut p = Mat2::zeros();
    p[(level, level)] = C64::new(1.0, 0.0);
    p
}

/// Target qubit driven by a mixed control through a C-NOT coupling, plus
/// isotropic depolarizing noise on the target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CnotControlModel {
    coupling: f64,
    gamma: f64,
    a: f64,
}

impl CnotControlModel {
    pub fn new(coupling: f64, gamma: f64, a: f64) -> Result<Self> {
        if !coupling.is_finite() {
            return Err(Error::InvalidModel(format!("J must be finite, got {coupling}")));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidModel(format!("gamma must be non-negative, got {gamma}")));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidModel(format!("a must lie in [0, 1], got {a}")));
        }
        Ok(Self { coupling, gamma, a })
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `J/2 (|1⟩⟨1| ⊗ σx + |0⟩⟨0| ⊗ I)` with the control on the first factor.
    pub fn hamiltonian(&self) -> Mat4 {
        (kron(&projector(1), &pauli(1)) + kron(&projector(0), &pauli(0))) * C64::new(0.5 * self.coupling, 0.0)
    }

    pub fn joint_generator(&self) -> Mat16 {
        let mut l = commutator_generator(&self.hamiltonian());
        if self.gamma != 0.0 {
            let id16 = Mat16::identity();
            for k in 1..=3 {
                let s = kron(&Mat2::identity(), &pauli(k));
                l += (spre(&s) * spost(&s) - id16) * C64::new(0.5 * self.gamma, 0.0);
            }
        }
        l
    }

    /// `a |1⟩⟨1| + (1 − a) |0⟩⟨0|`.
    pub fn control_state(&self) -> DensityMatrix {
        DensityMatrix::diagonal(self.a).expect("a validated in [0, 1]")
    }

    pub fn dynamics(&self) -> JointDynamics {
        JointDynamics::new(self.joint_generator(), self.control_state(), Factor::First)
    }
}

/// `sin x / x`, snapped to exactly zero at multiples of π.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let turns = x / std::f64::consts::PI;
    if (turns - turns.round()).abs() <= 1e-12 * turns.abs().max(1.0) {
        return 0.0;
    }
    x.sin() / x
}

/// Two atoms sharing a photon reservoir; the second atom is traced out.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperradianceModel {
    gamma0: f64,
    x: f64,
    a: f64,
}

impl SuperradianceModel {
    pub fn new(gamma0: f64, x: f64, a: f64) -> Result<Self> {
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(Error::InvalidModel(format!("gamma0 must be positive, got {gamma0}")));
        }
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidModel(format!("x must be positive, got {x}")));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidModel(format!("a must lie in [0, 1], got {a}")));
        }
        Ok(Self { gamma0, x, a })
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `[[γ₀, γ₀ sinc x], [γ₀ sinc x, γ₀]]`.
    pub fn rate_matrix(&self) -> [[f64; 2]; 2] {
        let cross = self.gamma0 * sinc(self.x);
        [[self.gamma0, cross], [cross, self.gamma0]]
    }

    pub fn joint_generator(&self) -> Mat16 {
        let lower = [kron(&lowering(), &Mat2::identity()), kron(&Mat2::identity(), &lowering())];
        let rates = self.rate_matrix();
        let mut l = Mat16::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let g = rates[i][j];
                if g == 0.0 {
                    continue;
                }
                let raise_i = lower[i].adjoint();
                let number = raise_i * lower[j];
                let jump = spre(&lower[j]) * spost(&raise_i);
                l += (jump - (spre(&number) + spost(&number)) * C64::new(0.5, 0.0)) * C64::new(g, 0.0);
            }
        }
        l
    }

    /// `a |e⟩⟨e| + (1 − a) |g⟩⟨g|`.
    pub fn environment_state(&self) -> DensityMatrix {
        DensityMatrix::diagonal(self.a).expect("a validated in [0, 1]")
    }

    pub fn dynamics(&self) -> JointDynamics {
        JointDynamics::new(self.joint_generator(), self.environment_state(), Factor::Second)
    }
}

/// A time-independent joint generator together with the environment's
/// initial state, producing reduced maps on the system qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDynamics {
    generator: Mat16,
    env_state: DensityMatrix,
    env_factor: Factor,
}

impl JointDynamics {
    pub fn new(generator: Mat16, env_state: DensityMatrix, env_factor: Factor) -> Self {
        Self { generator, env_state, env_factor }
    }

    pub fn generator(&self) -> &Mat16 {
        &self.generator
    }

    /// Columns `vec(B_k ⊗ ρ_env)` for the system basis `B_k`, `k = a + 2 b`.
    fn initial_block(&self) -> Block {
        let env = self.env_state.matrix();
        let mut block = Block::zeros();
        for k in 0..4 {
            let mut basis = Mat2::zeros();
            basis[(k % 2, k / 2)] = C64::new(1.0, 0.0);
            let joint = match self.env_factor {
                Factor::Second => kron(&basis, env),
                Factor::First => kron(env, &basis),
            };
            block.set_column(k, &vec16(&joint));
        }
        block
    }

    fn reduce(&self, block: &Block) -> SuperOperator {
        let mut m = Mat4::zeros();
        for k in 0..4 {
            let joint = unvec16(&block.column(k).into_owned());
            let reduced = partial_trace_env(&joint, self.env_factor);
            m.set_column(k, &vectorize(&reduced));
        }
        SuperOperator::from_matrix(m)
    }

    /// Reduced map at time `t` by RK4 with `steps` steps.
    pub fn propagator_rk4(&self, t: f64, steps: usize) -> Result<SuperOperator> {
        if steps == 0 {
            return Err(Error::InvalidParameters("steps must be at least 1".into()));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameters(format!("time must be non-negative, got {t}")));
        }
        let l = self.generator;
        Ok(self.reduce(&rk4_linear(|_| l, self.initial_block(), t, steps)))
    }

    /// Reduced map at time `t` from the matrix exponential of the generator.
    pub fn propagator_exact(&self, t: f64) -> SuperOperator {
        let step = (self.generator * C64::new(t, 0.0)).exp();
        self.reduce(&(step * self.initial_block()))
    }

    /// Reduced maps at `t_k = k · horizon / n_steps`, `k = 0 ..= n_steps`.
    pub fn propagator_grid(&self, horizon: f64, n_steps: usize) -> Vec<SuperOperator> {
        let dt = horizon / n_steps as f64;
        let step = (self.generator * C64::new(dt, 0.0)).exp();
        let mut block = self.initial_block();
        let mut out = Vec::with_capacity(n_steps + 1);
        out.push(self.reduce(&block));
        for _ in 0..n_steps {
            block = step * block;
            out.push(self.reduce(&block));
        }
        out
    }

    /// Pairs `(E_t, E_{t+ε})` at `t_k = k · horizon / n_steps`, `k < n_steps`.
    pub fn propagator_pairs(&self, horizon: f64, n_steps: usize, epsilon: f64) -> Vec<(f64, SuperOperator, SuperOperator)> {
        let dt = horizon / n_steps as f64;
        let step = (self.generator * C64::new(dt, 0.0)).exp();
        let ahead = if epsilon == dt { step } else { (self.generator * C64::new(epsilon, 0.0)).exp() };
        let mut block = self.initial_block();
        let mut out = Vec::with_capacity(n_steps);
        for k in 0..n_steps {
            let next = ahead * block;
            out.push((k as f64 * dt, self.reduce(&block), self.reduce(&next)));
            block = if epsilon == dt { next } else { step * block };
        }
        out
    }
}

/// `ρ_S ↦ Tr_env[e^{L t}(ρ_S ⊗ ρ_env)]` integrated with RK4.
pub fn reduced_propagator(
    generator: &Mat16,
    env_state: &DensityMatrix,
    which_env: Factor,
    t: f64,
    steps: usize,
) -> Result<SuperOperator> {
    JointDynamics::new(*generator, *env_state, which_env).propagator_rk4(t, steps)
}

/// [`reduced_propagator`] with a step-halving convergence check and a trace
/// preservation check.
pub fn reduced_propagator_checked(
    generator: &Mat16,
    env_state: &DensityMatrix,
    which_env: Factor,
    t: f64,
    steps: usize,
) -> Result<SuperOperator> {
    let coarse = reduced_propagator(generator, env_state, which_env, t, steps)?;
    let fine = reduced_propagator(generator, env_state, which_env, t, 2 * steps)?;
    let change = coarse.max_abs_diff(&fine);
    if change.is_nan() || change > STEP_CHECK_TOL {
        return Err(Error::IntegrationUnstable(format!(
            "halving the step changed the propagator by {change:.3e} at t = {t}"
        )));
    }
    let tp = fine.trace_preservation_error();
    if tp.is_nan() || tp > crate::qmat::Tolerances::DEFAULT.propagator_tp {
        return Err(Error::IntegrationUnstable(format!("trace preservation error {tp:.3e} at t = {t}")));
    }
    Ok(fine)
}

/// Largest deviation of `vec(I₄)† · L` from zero.
pub(crate) fn joint_trace_annihilation_error(l: &Mat16) -> f64 {
    (0..16)
        .map(|c| (0..4).map(|p| l[(p + 4 * p, c)]).sum::<C64>().norm())
        .fold(0.0, f64::max)
}

/// Largest non-Hermiticity of `L(X)` over a Hermitian basis of joint operators.
pub(crate) fn joint_hermiticity_preservation_error(l: &Mat16) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..4 {
        for k in 0..4 {
            let x = kron(&pauli(j), &pauli(k));
            let y = unvec16(&(l * vec16(&x)));
            let dev = (y - y.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            worst = worst.max(dev);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::damping::damping_map;
    use crate::qmat::Spectral;

    #[test]
    fn super_operator_products_match_matrix_products() {
        let a = Mat4::from_fn(|r, c| C64::new(r as f64 - 0.5 * c as f64, (r * c) as f64 * 0.1));
        let b = Mat4::from_fn(|r, c| C64::new((r + 2 * c) as f64 * 0.3, 1.0 - r as f64));
        let x = Mat4::from_fn(|r, c| C64::new((r as f64).sin(), (c as f64).cos()));
        assert!((unvec16(&(spre(&a) * vec16(&x))) - a * x).norm() < 1e-12);
        assert!((unvec16(&(spost(&b) * vec16(&x))) - x * b).norm() < 1e-12);
    }

    #[test]
    fn zero_coupling_and_rate_give_zero_generator() {
        let m = CnotControlModel::new(0.0, 0.0, 0.3).unwrap();
        assert_eq!(m.joint_generator(), Mat16::zeros());
    }

    #[test]
    fn generators_are_trace_annihilating_and_hermiticity_preserving() {
        let gens = [
            CnotControlModel::new(1.0, 0.3, 0.4).unwrap().joint_generator(),
            SuperradianceModel::new(1.0, 1.3, 0.6).unwrap().joint_generator(),
        ];
        for l in gens {
            assert!(joint_trace_annihilation_error(&l) < 1e-14);
            assert!(joint_hermiticity_preservation_error(&l) < 1e-14);
        }
    }

    #[test]
    fn sinc_vanishes_at_multiples_of_pi() {
        for n in 1..=5 {
            assert_eq!(sinc(n as f64 * std::f64::consts::PI), 0.0);
        }
        assert!((sinc(0.5) - 0.5f64.sin() / 0.5).abs() < 1e-16);
        let m = SuperradianceModel::new(1.0, std::f64::consts::PI, 0.7).unwrap();
        assert_eq!(m.rate_matrix()[0][1], 0.0);
    }

    #[test]
    fn rate_matrix_is_positive_semidefinite() {
        for k in 1..400 {
            let x = 0.025 * k as f64;
            let r = SuperradianceModel::new(1.0, x, 0.5).unwrap().rate_matrix();
            let m = Mat2::new(
                C64::new(r[0][0], 0.0),
                C64::new(r[0][1], 0.0),
                C64::new(r[1][0], 0.0),
                C64::new(r[1][1], 0.0),
            );
            let ev = m.hermitian_eigenvalues();
            assert!(ev[0] >= -1e-15);
        }
    }

    #[test]
    fn pure_control_in_ground_state_leaves_target_alone() {
        let d = CnotControlModel::new(1.0, 0.0, 0.0).unwrap().dynamics();
        for t in [0.0, 0.7, 3.0] {
            let e = d.propagator_rk4(t, default_steps(t)).unwrap();
            assert!(e.max_abs_diff(&SuperOperator::identity()) < 1e-10);
        }
    }

    #[test]
    fn excited_control_rotates_the_target() {
        // with the control in |1⟩ the target sees exp(−i J t σx / 2)
        let d = CnotControlModel::new(1.0, 0.0, 1.0).unwrap().dynamics();
        let t: f64 = 1.2;
        let u = pauli(0) * C64::new((0.5 * t).cos(), 0.0) + pauli(1) * C64::new(0.0, -(0.5 * t).sin());
        let expected = SuperOperator::from_conjugation(&u);
        assert!(d.propagator_exact(t).max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn decoupled_atoms_reduce_to_amplitude_damping() {
        let g0 = 0.8;
        let d = SuperradianceModel::new(g0, std::f64::consts::PI, 0.0).unwrap().dynamics();
        for t in [0.0, 0.5, 2.0, 6.0] {
            let expected = damping_map((-0.5 * g0 * t).exp());
            let rk = d.propagator_rk4(t, default_steps(t)).unwrap();
            assert!(rk.max_abs_diff(&expected) < 1e-9, "rk4 at {t}");
            assert!(d.propagator_exact(t).max_abs_diff(&expected) < 1e-12, "exp at {t}");
        }
    }

    #[test]
    fn grid_and_pairs_agree_with_direct_exponentials() {
        let d = SuperradianceModel::new(1.0, 1.0, 0.6).unwrap().dynamics();
        let grid = d.propagator_grid(2.0, 8);
        assert_eq!(grid.len(), 9);
        for (k, e) in grid.iter().enumerate() {
            assert!(e.max_abs_diff(&d.propagator_exact(0.25 * k as f64)) < 1e-12);
        }
        let pairs = d.propagator_pairs(2.0, 8, 0.1);
        assert_eq!(pairs.len(), 8);
        for (t, e, ee) in &pairs {
            assert!(e.max_abs_diff(&d.propagator_exact(*t)) < 1e-12);
            assert!(ee.max_abs_diff(&d.propagator_exact(t + 0.1)) < 1e-12);
        }
    }

    #[test]
    fn checked_propagator_flags_coarse_steps() {
        let m = CnotControlModel::new(40.0, 0.0, 0.5).unwrap();
        let (l, env) = (m.joint_generator(), m.control_state());
        assert!(matches!(
            reduced_propagator_checked(&l, &env, Factor::First, 3.0, 10),
            Err(Error::IntegrationUnstable(_))
        ));
        assert!(reduced_propagator_checked(&l, &env, Factor::First, 3.0, 4000).is_ok());
    }

    #[test]
    fn parameter_validation() {
        assert!(CnotControlModel::new(1.0, -0.1, 0.5).is_err());
        assert!(CnotControlModel::new(1.0, 0.1, 1.5).is_err());
        assert!(SuperradianceModel::new(1.0, 0.0, 0.5).is_err());
        assert!(SuperradianceModel::new(0.0, 1.0, 0.5).is_err());
        assert!(SuperradianceModel::new(1.0, 1.0, -0.1).is_err());
    }
}
