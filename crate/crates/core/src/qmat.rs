//! Complex matrix and superoperator algebra for a single qubit.
//!
//! Vectorization is column-stacking everywhere in this crate: element
//! `X[(i, j)]` of a 2x2 operator sits at index `i + 2 j` of `vec(X)`. With that
//! convention `vec(A X B) = (Bᵀ ⊗ A) vec(X)`, so the conjugation map
//! `X ↦ K X K†` is represented by the 4x4 matrix `conj(K) ⊗ K`.
//!
//! Choi matrices use the normalized maximally entangled state
//! `|Ψ⟩ = (|00⟩ + |11⟩)/√2`, i.e. `C = (I ⊗ E)(|Ψ⟩⟨Ψ|)`, which has unit trace
//! whenever `E` is trace preserving. Two-qubit indices are `2 a + b` with `a`
//! on the first tensor factor.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Numerical tolerances shared by the whole crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Hermiticity and trace checks when constructing validated types.
    pub construct: f64,
    /// Hermiticity and trace checks on computed quantities.
    pub check: f64,
    /// Smallest eigenvalue a density matrix may have.
    pub psd: f64,
    /// Largest condition number accepted by [`invert`].
    pub max_condition: f64,
    /// Trace preservation of numerically built propagators.
    pub propagator_tp: f64,
    /// Eigen-residual bound `‖A v − λ v‖` verified in debug builds.
    pub eigen_residual: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        construct: 1e-12,
        check: 1e-10,
        psd: 1e-10,
        max_condition: 1e8,
        propagator_tp: 1e-8,
        eigen_residual: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Pauli matrices indexed `0 = I, 1 = σx, 2 = σy, 3 = σz`.
pub fn pauli(j: usize) -> Mat2 {
    match j {
        0 => Mat2::identity(),
        1 => Mat2::new(ZERO, ONE, ONE, ZERO),
        2 => Mat2::new(ZERO, -C64::i(), C64::i(), ZERO),
        3 => Mat2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index out of range: {j}"),
    }
}

pub fn vectorize(x: &Mat2) -> Vector4<C64> {
    Vector4::new(x[(0, 0)], x[(1, 0)], x[(0, 1)], x[(1, 1)])
}

pub fn unvectorize(v: &Vector4<C64>) -> Mat2 {
    Mat2::new(v[0], v[2], v[1], v[3])
}

/// Tensor factor of a two-qubit operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    First,
    Second,
}

impl Factor {
    pub fn other(self) -> Factor {
        match self {
            Factor::First => Factor::Second,
            Factor::Second => Factor::First,
        }
    }
}

/// Small dense square matrices with the spectral helpers this crate needs.
pub trait Spectral {
    /// Largest elementwise deviation `|A − A†|`.
    fn hermiticity_deviation(&self) -> f64;
    /// Sum of singular values.
    fn singular_value_sum(&self) -> f64;
    /// Eigenvalues of the Hermitian part, ascending.
    fn hermitian_eigenvalues(&self) -> Vec<f64>;
}

impl Spectral for Mat2 {
    fn hermiticity_deviation(&self) -> f64 {
        max_abs_diff(self.iter(), self.adjoint().iter())
    }

    fn singular_value_sum(&self) -> f64 {
        // (σ1 + σ2)² = ‖A‖_F² + 2 |det A|
        let fro2: f64 = self.iter().map(|z| z.norm_sqr()).sum();
        let det = self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)];
        (fro2 + 2.0 * det.norm()).max(0.0).sqrt()
    }

    fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let (lo, hi) = hermitian2_eigenvalues(self);
        vec![lo, hi]
    }
}

impl Spectral for Mat4 {
    fn hermiticity_deviation(&self) -> f64 {
        max_abs_diff(self.iter(), self.adjoint().iter())
    }

    fn singular_value_sum(&self) -> f64 {
        self.singular_values().iter().sum()
    }

    fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut v = hermitian4_eigenvalues(self).to_vec();
        v.sort_by(f64::total_cmp);
        v
    }
}

fn max_abs_diff<'a>(
    a: impl Iterator<Item = &'a C64>,
    b: impl Iterator<Item = &'a C64>,
) -> f64 {
    a.zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Closed-form eigenvalues `(low, high)` of the Hermitian part of a 2x2 matrix.
pub fn hermitian2_eigenvalues(m: &Mat2) -> (f64, f64) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean - radius, mean + radius)
}

/// Eigenvalues of the Hermitian part of a 4x4 matrix (unsorted).
///
/// Debug builds verify every eigenpair against `‖A v − λ v‖ ≤ 1e-9`.
pub fn hermitian4_eigenvalues(m: &Mat4) -> [f64; 4] {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    #[cfg(debug_assertions)]
    {
        let scale = h.norm().max(1.0);
        for k in 0..4 {
            let v = eig.eigenvectors.column(k);
            let residual = (h * v - v * C64::new(eig.eigenvalues[k], 0.0)).norm();
            debug_assert!(
                residual <= Tolerances::DEFAULT.eigen_residual * scale,
                "eigen residual {residual:e} exceeds bound"
            );
        }
    }
    [
        eig.eigenvalues[0],
        eig.eigenvalues[1],
        eig.eigenvalues[2],
        eig.eigenvalues[3],
    ]
}

/// Trace norm `Tr √(A†A)`, the sum of singular values.
pub fn trace_norm<M: Spectral>(a: &M) -> f64 {
    a.singular_value_sum()
}

/// Trace norm of a Hermitian matrix through its eigenvalues, `Σ |λ_i|`.
pub fn hermitian_trace_norm<M: Spectral>(h: &M) -> f64 {
    h.hermitian_eigenvalues().iter().map(|l| l.abs()).sum()
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<M: Spectral>(h: &M) -> Result<f64> {
    let dev = h.hermiticity_deviation();
    if dev > Tolerances::DEFAULT.check {
        return Err(Error::NotHermitian(dev));
    }
    Ok(h.hermitian_eigenvalues()[0])
}

/// Bloch vector of a qubit state, `ρ = (I + r·σ)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub fn new(r: [f64; 3]) -> Result<Self> {
        let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if !norm.is_finite() || norm > 1.0 + Tolerances::DEFAULT.construct {
            return Err(Error::InvalidState(format!("Bloch vector length {norm} exceeds 1")));
        }
        Ok(Self(r))
    }

    /// Unit vector at polar angle `theta` and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        DensityMatrix::from_bloch(*self)
    }
}

/// A qubit density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Mat2);

impl DensityMatrix {
    pub fn new(m: Mat2) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        let dev = m.hermiticity_deviation();
        if dev > tol.construct {
            return Err(Error::NotHermitian(dev));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > tol.construct {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let (lo, _) = hermitian2_eigenvalues(&m);
        if lo < -tol.psd {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo:e}")));
        }
        Ok(Self(m))
    }

    pub fn from_bloch(r: BlochVector) -> Self {
        let [x, y, z] = r.0;
        let half = 0.5;
        Self(Mat2::new(
            C64::new(half * (1.0 + z), 0.0),
            C64::new(half * x, -half * y),
            C64::new(half * x, half * y),
            C64::new(half * (1.0 - z), 0.0),
        ))
    }

    /// `p |1⟩⟨1| + (1 − p) |0⟩⟨0|`; `|1⟩` is the excited state.
    pub fn diagonal(p_excited: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_excited) {
            return Err(Error::InvalidState(format!(
                "excited population {p_excited} outside [0, 1]"
            )));
        }
        Ok(Self(Mat2::new(
            C64::new(1.0 - p_excited, 0.0),
            ZERO,
            ZERO,
            C64::new(p_excited, 0.0),
        )))
    }

    pub fn ground() -> Self {
        Self(Mat2::new(ONE, ZERO, ZERO, ZERO))
    }

    pub fn excited() -> Self {
        Self(Mat2::new(ZERO, ZERO, ZERO, ONE))
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat2::identity() * C64::new(0.5, 0.0))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn bloch(&self) -> BlochVector {
        let m = &self.0;
        let x = 2.0 * m[(1, 0)].re;
        let y = 2.0 * m[(1, 0)].im;
        let z = (m[(0, 0)] - m[(1, 1)]).re;
        BlochVector([x, y, z])
    }
}

/// A Hermitian 2x2 operator such as a difference of states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianOperator(Mat2);

impl HermitianOperator {
    pub fn new(m: Mat2) -> Result<Self> {
        let dev = m.hermiticity_deviation();
        if dev > Tolerances::DEFAULT.construct {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }
}

/// Trace distance `½ ‖ρ1 − ρ2‖₁`.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> f64 {
    0.5 * trace_norm(&(rho1.0 - rho2.0))
}

/// A linear map on 2x2 operators acting on column-stacked vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperOperator {
    matrix: Mat4,
}

impl SuperOperator {
    pub fn from_matrix(matrix: Mat4) -> Self {
        Self { matrix }
    }

    pub fn identity() -> Self {
        Self { matrix: Mat4::identity() }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    /// `X ↦ K X K†`.
    pub fn from_conjugation(k: &Mat2) -> Self {
        Self { matrix: k.map(|z| z.conj()).kronecker(k) }
    }

    /// Builds a map from its Pauli transfer matrix `R[r][c] = ½ Tr(σ_r E(σ_c))`.
    pub fn from_pauli_transfer(r: &Matrix4<f64>) -> Self {
        let vecs: Vec<Vector4<C64>> = (0..4).map(|j| vectorize(&pauli(j))).collect();
        let mut matrix = Mat4::zeros();
        for row in 0..4 {
            for col in 0..4 {
                let w = r[(row, col)];
                if w != 0.0 {
                    matrix += vecs[row] * vecs[col].adjoint() * C64::new(0.5 * w, 0.0);
                }
            }
        }
        Self { matrix }
    }

    /// Pauli transfer matrix; real for Hermiticity-preserving maps.
    pub fn pauli_transfer(&self) -> Matrix4<f64> {
        let images: Vec<Mat2> = (0..4).map(|c| self.apply(&pauli(c))).collect();
        Matrix4::from_fn(|row, col| 0.5 * (pauli(row) * images[col]).trace().re)
    }

    /// Unital map scaling the Bloch components by `mu`.
    pub fn pauli_diagonal(mu: [f64; 3]) -> Self {
        Self::from_pauli_transfer(&Matrix4::from_diagonal(&nalgebra::Vector4::new(
            1.0, mu[0], mu[1], mu[2],
        )))
    }

    /// `X ↦ Tr(X) I/2`.
    pub fn completely_depolarizing() -> Self {
        Self::pauli_diagonal([0.0; 3])
    }

    /// `X ↦ Xᵀ`: positive but not completely positive.
    pub fn transpose_map() -> Self {
        let mut matrix = Mat4::zeros();
        // vec index i + 2j  <->  j + 2i
        for i in 0..2 {
            for j in 0..2 {
                matrix[(j + 2 * i, i + 2 * j)] = ONE;
            }
        }
        Self { matrix }
    }

    pub fn apply(&self, x: &Mat2) -> Mat2 {
        unvectorize(&(self.matrix * vectorize(x)))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SuperOperator) -> SuperOperator {
        Self { matrix: self.matrix * inner.matrix }
    }

    /// Ratio of extreme singular values; infinite when the map is singular.
    pub fn condition_number(&self) -> f64 {
        let sv = self.matrix.singular_values();
        let max = sv.max();
        let min = sv.min();
        if min <= 0.0 || !min.is_finite() {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Inverse map, refusing maps whose condition number exceeds `max_condition`.
    pub fn invert(&self, max_condition: f64) -> Result<SuperOperator> {
        let condition = self.condition_number();
        if !condition.is_finite() || condition > max_condition {
            return Err(Error::SingularMap { condition });
        }
        self.matrix
            .try_inverse()
            .map(|matrix| Self { matrix })
            .ok_or(Error::SingularMap { condition })
    }

    /// Largest deviation of `vec(I)† · M` from `vec(I)†`.
    pub fn trace_preservation_error(&self) -> f64 {
        (0..4)
            .map(|col| (self.matrix[(0, col)] + self.matrix[(3, col)] - vectorize(&Mat2::identity())[col]).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_preservation_error() <= tol
    }

    /// Largest non-Hermiticity of the images of the Pauli basis.
    pub fn hermiticity_preservation_error(&self) -> f64 {
        (0..4)
            .map(|j| self.apply(&pauli(j)).hermiticity_deviation())
            .fold(0.0, f64::max)
    }

    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        self.hermiticity_preservation_error() <= tol
    }

    /// Largest elementwise difference to another map.
    pub fn max_abs_diff(&self, other: &SuperOperator) -> f64 {
        max_abs_diff(self.matrix.iter(), other.matrix.iter())
    }
}

pub fn apply(e: &SuperOperator, x: &Mat2) -> Mat2 {
    e.apply(x)
}

pub fn compose(a: &SuperOperator, b: &SuperOperator) -> SuperOperator {
    a.compose(b)
}

/// Inverse with the default condition-number threshold.
pub fn invert(e: &SuperOperator) -> Result<SuperOperator> {
    e.invert(Tolerances::DEFAULT.max_condition)
}

/// `(I ⊗ E)(|Ψ⟩⟨Ψ|)` as a 4x4 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChoiMatrix {
    elements: Mat4,
}

impl ChoiMatrix {
    pub fn from_matrix(elements: Mat4) -> Self {
        Self { elements }
    }

    pub fn elements(&self) -> &Mat4 {
        &self.elements
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut e = hermitian4_eigenvalues(&self.elements);
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn trace(&self) -> C64 {
        self.elements.trace()
    }
}

pub fn choi_of(e: &SuperOperator) -> ChoiMatrix {
    // C[(2i + a), (2j + b)] = ½ E(|i⟩⟨j|)[a, b] = ½ M[a + 2b, i + 2j]
    let m = e.matrix();
    let elements = Mat4::from_fn(|row, col| {
        let (i, a) = (row / 2, row % 2);
        let (j, b) = (col / 2, col % 2);
        m[(a + 2 * b, i + 2 * j)] * 0.5
    });
    ChoiMatrix { elements }
}

pub fn superop_of_choi(c: &ChoiMatrix) -> SuperOperator {
    let elements = c.elements();
    let matrix = Mat4::from_fn(|row, col| {
        let (a, b) = (row % 2, row / 2);
        let (i, j) = (col % 2, col / 2);
        elements[(2 * i + a, 2 * j + b)] * 2.0
    });
    SuperOperator { matrix }
}

/// Traces out the `which` factor of a two-qubit operator.
pub fn partial_trace_env(x: &Mat4, which: Factor) -> Mat2 {
    Mat2::from_fn(|i, j| match which {
        Factor::First => x[(i, j)] + x[(2 + i, 2 + j)],
        Factor::Second => x[(2 * i, 2 * j)] + x[(2 * i + 1, 2 * j + 1)],
    })
}
