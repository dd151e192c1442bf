mod common;

use common::*;
use kdivis::qmat::{choi_of, hermitian_trace_norm, superop_of_choi, trace_distance, trace_norm, vectorize, Mat4};
use kdivis::{ChoiMatrix, DensityMatrix, SuperOperator};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn choi_round_trip(v in prop::collection::vec(-1.0..1.0f64, 32)) {
        let e = SuperOperator::from_matrix(mat4_from(&v));
        prop_assert!(superop_of_choi(&choi_of(&e)).max_abs_diff(&e) < 1e-12);
        let choi = ChoiMatrix::from_matrix(mat4_from(&v));
        let back = choi_of(&superop_of_choi(&choi));
        let diff = (back.elements() - choi.elements()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-12);
    }

    #[test]
    fn cptp_maps_have_unit_trace_positive_choi(e in cptp_map()) {
        prop_assert!(e.is_trace_preserving(1e-10));
        prop_assert!(e.is_hermiticity_preserving(1e-10));
        let choi = choi_of(&e);
        prop_assert!((choi.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(choi.min_eigenvalue() >= -1e-12);
    }

    #[test]
    fn trace_preservation_is_detected(e in cptp_map(), row in 0usize..4, delta in 1e-6..1e-2f64) {
        let mut m = *e.matrix();
        // rows 0 and 3 of the column-stacked map carry the output trace
        let target = if row % 2 == 0 { 0 } else { 3 };
        m[(target, row)] += common::c(delta, 0.0);
        prop_assert!(!SuperOperator::from_matrix(m).is_trace_preserving(1e-7));
    }

    #[test]
    fn trace_norm_paths_agree(v in prop::collection::vec(-1.0..1.0f64, 32)) {
        let h = hermitian4_from(&v);
        let svd = trace_norm(&h);
        let eig = hermitian_trace_norm(&h);
        prop_assert!((svd - eig).abs() < 1e-10 * svd.max(1.0));
    }

    #[test]
    fn trace_distance_is_a_bounded_metric(a in bloch_point(), b in bloch_point(), c3 in bloch_point()) {
        let r = |p| DensityMatrix::new(density(p)).unwrap();
        let (ra, rb, rc) = (r(a), r(b), r(c3));
        let dab = trace_distance(&ra, &rb);
        prop_assert!((dab - trace_distance(&rb, &ra)).abs() < 1e-14);
        prop_assert!(trace_distance(&ra, &ra).abs() < 1e-14);
        prop_assert!(dab <= trace_distance(&ra, &rc) + trace_distance(&rc, &rb) + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&dab));
        let euclid = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
        prop_assert!((dab - 0.5 * euclid).abs() < 1e-12);
    }

    #[test]
    fn cptp_maps_contract_trace_distance(e in cptp_map(), a in bloch_point(), b in bloch_point()) {
        let r = |p| DensityMatrix::new(density(p)).unwrap();
        let (ra, rb) = (r(a), r(b));
        let (oa, ob) = (DensityMatrix::new(e.apply(ra.matrix())).unwrap(), DensityMatrix::new(e.apply(rb.matrix())).unwrap());
        prop_assert!(trace_distance(&oa, &ob) <= trace_distance(&ra, &rb) + 1e-12);
    }

    #[test]
    fn composition_is_associative_and_matches_application(
        a in cptp_map(), b in cptp_map(), c3 in cptp_map(), x in prop::collection::vec(-1.0..1.0f64, 8)
    ) {
        let left = a.compose(&b).compose(&c3);
        let right = a.compose(&b.compose(&c3));
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
        let x = mat2_from(&x);
        let stepwise = a.apply(&b.apply(&x));
        let composed = a.compose(&b).apply(&x);
        prop_assert!((stepwise - composed).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn inverse_undoes_the_map(e in cptp_map()) {
        if let Ok(inv) = e.invert(1e8) {
            prop_assert!(e.compose(&inv).max_abs_diff(&SuperOperator::identity()) < 1e-13 * e.condition_number());
        }
    }

    #[test]
    fn vectorization_maps_conjugation_to_superoperator(k in prop::collection::vec(-1.0..1.0f64, 8), x in prop::collection::vec(-1.0..1.0f64, 8)) {
        let (k, x) = (mat2_from(&k), mat2_from(&x));
        let direct = k * x * k.adjoint();
        let lifted = SuperOperator::from_conjugation(&k).matrix() * vectorize(&x);
        prop_assert!((vectorize(&direct) - lifted).iter().all(|z| z.norm() < 1e-12));
    }
}

#[test]
fn transpose_map_is_positive_but_not_cp() {
    let t = SuperOperator::transpose_map();
    assert!(kdivis::divisibility::is_positive(&t, 1e-12, 128).0);
    let choi = choi_of(&t);
    // normalised Choi matrix of the transpose is SWAP/2
    assert!((choi.min_eigenvalue() + 0.5).abs() < 1e-12);
    assert!((choi.trace().re - 1.0).abs() < 1e-12);
    let swap_half = Mat4::from_fn(|i, j| {
        let (a, b) = (i / 2, i % 2);
        let (c2, d) = (j / 2, j % 2);
        common::c(if a == d && b == c2 { 0.5 } else { 0.0 }, 0.0)
    });
    assert!((choi.elements() - swap_half).iter().all(|z| z.norm() < 1e-14));
}
