#![allow(dead_code)]

use kdivis::qmat::{Mat2, Mat4, C64};
use kdivis::SuperOperator;
use nalgebra::{Matrix2, Matrix4};
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn mat2_from(v: &[f64]) -> Mat2 {
    Matrix2::from_fn(|i, j| c(v[2 * (2 * i + j)], v[2 * (2 * i + j) + 1]))
}

pub fn mat4_from(v: &[f64]) -> Mat4 {
    Matrix4::from_fn(|i, j| c(v[2 * (4 * i + j)], v[2 * (4 * i + j) + 1]))
}

pub fn hermitian4_from(v: &[f64]) -> Mat4 {
    let m = mat4_from(v);
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// `S^{-1/2}` of a positive-definite 2x2 Hermitian matrix.
fn inverse_sqrt(s: &Mat2) -> Mat2 {
    let eig = s.symmetric_eigen();
    let d = Matrix2::from_diagonal(&eig.eigenvalues.map(|l| c(1.0 / l.sqrt(), 0.0)));
    eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Normalised Kraus set `K_i S^{-1/2}` with `S = Σ K_i† K_i`, so that the
/// resulting map is CPTP.
pub fn cptp_from_kraus(raw: &[Mat2]) -> SuperOperator {
    let s = raw.iter().fold(Mat2::zeros(), |acc, k| acc + k.adjoint() * k);
    let fix = inverse_sqrt(&s);
    let m = raw.iter().fold(Mat4::zeros(), |acc, k| acc + SuperOperator::from_conjugation(&(k * fix)).matrix());
    SuperOperator::from_matrix(m)
}

/// Random CPTP map from three Kraus operators.
pub fn cptp_map() -> impl Strategy<Value = SuperOperator> {
    prop::collection::vec(-1.0..1.0f64, 24).prop_filter_map("degenerate Kraus set", |v| {
        let raw: Vec<Mat2> = v.chunks(8).map(mat2_from).collect();
        let s = raw.iter().fold(Mat2::zeros(), |acc, k| acc + k.adjoint() * k);
        (s.determinant().re > 1e-3).then(|| cptp_from_kraus(&raw))
    })
}

/// Random trace- and Hermiticity-preserving map through its Pauli transfer
/// matrix; entries of the Bloch block lie in `[-scale, scale]`.
pub fn tp_hermitian_map(scale: f64) -> impl Strategy<Value = SuperOperator> {
    prop::collection::vec(-scale..scale, 12).prop_map(|v| {
        let mut r = Matrix4::<f64>::zeros();
        r[(0, 0)] = 1.0;
        for i in 0..3 {
            r[(i + 1, 0)] = v[i];
            for j in 0..3 {
                r[(i + 1, j + 1)] = v[3 + 3 * i + j];
            }
        }
        SuperOperator::from_pauli_transfer(&r)
    })
}

pub fn bloch_point() -> impl Strategy<Value = [f64; 3]> {
    (0.0..1.0f64, -1.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, z, phi)| {
        let s = (1.0 - z * z).sqrt();
        let r = r.cbrt();
        [r * s * phi.cos(), r * s * phi.sin(), r * z]
    })
}

/// Density matrix `(I + r·σ)/2` built entrywise.
pub fn density(r: [f64; 3]) -> Mat2 {
    Matrix2::new(c(0.5 * (1.0 + r[2]), 0.0), c(0.5 * r[0], -0.5 * r[1]), c(0.5 * r[0], 0.5 * r[1]), c(0.5 * (1.0 - r[2]), 0.0))
}

/// Excited-amplitude damping map with factor `g` from its two Kraus
/// operators, `|1⟩` excited.
pub fn damping_kraus_map(g: f64) -> SuperOperator {
    let k0 = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(g, 0.0));
    let k1 = Matrix2::new(c(0.0, 0.0), c((1.0 - g * g).max(0.0).sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0));
    let m = SuperOperator::from_conjugation(&k0).matrix() + SuperOperator::from_conjugation(&k1).matrix();
    SuperOperator::from_matrix(m)
}

/// Constant-rate triples at least `margin` away from every hyperplane of the
/// rate predicates.
pub fn rates_with_margin(margin: f64) -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.0..1.0f64).prop_filter("too close to a class boundary", move |g| {
        let [a, b, c] = *g;
        [a, b, c, a + b, b + c, c + a].iter().all(|v| v.abs() >= margin)
    })
}
