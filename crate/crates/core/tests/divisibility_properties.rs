mod common;

use common::*;
use kdivis::divisibility::{
    complement_steps, diagnose_step, is_cp, is_positive, is_positive_pauli_diagonal, pauli_diagonal_positivity_witness,
    pauli_rate_class, ClassifyOptions, DEFAULT_POSITIVITY_DIRECTIONS,
};
use kdivis::models::{AmplitudeDampingModel, CnotControlModel, PauliChannelModel};
use kdivis::qmat::choi_of;
use kdivis::{classify, classify_with, DivisibilityClass, ModelSpec, SuperOperator};
use proptest::prelude::*;

const DIRS: usize = DEFAULT_POSITIVITY_DIRECTIONS;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cp_implies_positive_on_channels(e in cptp_map()) {
        let (cp, w) = is_cp(&e, 1e-12);
        prop_assert!(cp, "CPTP map failed CP with witness {w}");
        prop_assert!(is_positive(&e, 1e-12, DIRS).0);
    }

    #[test]
    fn cp_implies_positive_on_general_maps(e in tp_hermitian_map(1.2), tol in 1e-12..1e-3f64) {
        let (cp, cp_w) = is_cp(&e, tol);
        let (pos, p_w) = is_positive(&e, tol, DIRS);
        if cp {
            prop_assert!(pos, "CP witness {cp_w} but positivity witness {p_w}");
        }
        // pure-state outputs are Choi compressions, so they bound it from above
        prop_assert!(p_w >= 2.0 * cp_w - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pauli_fast_path_matches_general_search(mu in prop::array::uniform3(-1.3..1.3f64)) {
        let witness = pauli_diagonal_positivity_witness(mu);
        let map = SuperOperator::pauli_diagonal(mu);
        let (_, general) = is_positive(&map, 0.0, DIRS);
        prop_assert!((general - witness).abs() < 1e-9, "fast {witness} vs search {general}");
        let max = mu.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if (max - 1.0).abs() > 1e-6 {
            let tol = 1e-9;
            prop_assert_eq!(is_positive_pauli_diagonal(mu, tol), is_positive(&map, tol, DIRS).0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constant_rates_follow_the_predicates(g in rates_with_margin(0.05)) {
        let model: ModelSpec = PauliChannelModel::constant(g).into();
        let verdict = classify(&model, 2.0, 100, 0.02, 2e-9).unwrap();
        prop_assert_eq!(verdict.class, pauli_rate_class(g));
        prop_assert!(!verdict.near_boundary);
    }

    #[test]
    fn larger_tolerance_never_lowers_the_class(g in prop::array::uniform3(-0.2..0.2f64), tol in 1e-10..1e-3f64) {
        let model: ModelSpec = PauliChannelModel::constant(g).into();
        let opts = ClassifyOptions::new(1.0, 50);
        let strict = classify_with(&model, &ClassifyOptions { tol, ..opts }).unwrap();
        let loose = classify_with(&model, &ClassifyOptions { tol: 10.0 * tol, ..opts }).unwrap();
        prop_assert!(loose.class >= strict.class);
    }

    #[test]
    fn larger_tolerance_never_lowers_the_damping_class(g0 in 0.05..2.0f64, l in 0.1..2.0f64, tol in 1e-10..1e-2f64) {
        let model: ModelSpec = AmplitudeDampingModel::new(g0, l).unwrap().into();
        let opts = ClassifyOptions::new(30.0, 100);
        let strict = classify_with(&model, &ClassifyOptions { tol, ..opts }).unwrap();
        let loose = classify_with(&model, &ClassifyOptions { tol: 100.0 * tol, ..opts }).unwrap();
        prop_assert!(loose.class >= strict.class);
    }

    #[test]
    fn cp_divisible_steps_have_nonnegative_choi(g in prop::array::uniform3(0.0..1.0f64), g0 in 0.05..0.49f64) {
        let models: [ModelSpec; 2] =
            [PauliChannelModel::constant(g).into(), AmplitudeDampingModel::new(g0, 1.0).unwrap().into()];
        for model in models {
            let opts = ClassifyOptions::new(5.0, 100);
            let verdict = classify_with(&model, &opts).unwrap();
            prop_assert_eq!(verdict.class, DivisibilityClass::PD2);
            for (_, step) in complement_steps(&model, &opts).unwrap() {
                let step = step.unwrap();
                prop_assert!(choi_of(&step.lambda_map).min_eigenvalue() >= -1e-8);
                let d = diagnose_step(&step, opts.tol, DIRS);
                prop_assert!(d.cp && d.positive);
            }
        }
    }
}

#[test]
fn cnot_classes_follow_the_closed_form_rate() {
    // ℓ_max = a(1−a)J/|1−2a| bounds the negative rate: PD2 for ℓ ≤ γ, PD1 for
    // γ < ℓ ≤ 2γ, PD0 beyond
    for (gamma, a) in [(0.5, 0.2), (0.1, 0.2), (0.2, 0.2), (0.3, 0.35), (0.05, 0.1)] {
        let ell = a * (1.0 - a) / (1.0f64 - 2.0 * a).abs();
        let margin = [ell - gamma, ell - 2.0 * gamma].iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        if margin < 0.02 {
            continue;
        }
        let expected = if ell <= gamma {
            DivisibilityClass::PD2
        } else if ell <= 2.0 * gamma {
            DivisibilityClass::PD1
        } else {
            DivisibilityClass::PD0
        };
        let model: ModelSpec = CnotControlModel::new(1.0, gamma, a).unwrap().into();
        let verdict = classify_with(&model, &ClassifyOptions::for_model(&model)).unwrap();
        assert_eq!(verdict.class, expected, "gamma {gamma}, a {a}, ell {ell}");
    }
}
