mod common;

use common::{apply, ket_from, local, qubit_unitary};
use proptest::prelude::*;
use qent_core::measures::{concurrence_pure, geometric_pure, purity_sum};
use qent_core::optimize::{det_m, f_closed_form, OptimizerOptions, HADAMARD_BOUND};
use qent_core::tensor::{
    max_abs_diff, partial_trace, partial_transpose, partial_transpose_matrix, tensor_product, DensityMatrix, Ket, Parties, C64,
};
use qent_core::upb::{genshifts_upb, rho_q, QubitKet};

fn ket8() -> impl Strategy<Value = Ket> {
    prop::array::uniform16(-1.0f64..1.0).prop_filter_map("nonzero", |a| ket_from(&a))
}

fn ket_n(n: usize) -> impl Strategy<Value = Ket> {
    prop::collection::vec(-1.0f64..1.0, 2 << n).prop_filter_map("nonzero", move |a| ket_from(&a))
}

fn angle() -> impl Strategy<Value = f64> {
    -10.0f64..10.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn tensor_norm_is_multiplicative(a in ket_n(1), b in ket_n(2)) {
        let t = tensor_product(&[a.clone(), b.clone()]).unwrap();
        prop_assert!((t.norm() - a.norm() * b.norm()).abs() < 1e-14);
        prop_assert_eq!(t.parties(), 3);
    }

    #[test]
    fn complementary_reductions_share_purity(psi in ket8()) {
        let rho = psi.density();
        for s in Parties::proper_subsets(3) {
            let p = partial_trace(&rho, s).unwrap().purity();
            let q = partial_trace(&rho, s.complement(3)).unwrap().purity();
            prop_assert!((p - q).abs() < 1e-12);
        }
        let singles: f64 = (0..3).map(|k| partial_trace(&rho, Parties::from_mask(1 << k)).unwrap().purity()).sum();
        prop_assert!((purity_sum(&psi).unwrap() - 2.0 * singles).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_is_an_involution(psi in ket8(), phi in ket8(), mask in 1u8..7, w in 0.0f64..1.0) {
        let m = psi.outer().scale(w) + phi.outer().scale(1.0 - w);
        let rho = DensityMatrix::new(m).unwrap();
        let pt = partial_transpose(&rho, Parties::from_mask(mask)).unwrap();
        let trace: C64 = (0..8).map(|i| pt[(i, i)]).sum();
        prop_assert!((trace.re - 1.0).abs() < 1e-12);
        let back = partial_transpose_matrix(&pt, 3, Parties::from_mask(mask));
        prop_assert!(max_abs_diff(&back, rho.matrix()) < 1e-15);
    }

    #[test]
    fn closed_form_identity_and_hadamard_bound(a in angle(), b in angle(), g in angle()) {
        let f = f_closed_form(a, b, g);
        prop_assert!((f.trig_sum - f.via_determinant).abs() < 1e-12);
        prop_assert!(det_m(a, b, g).abs() <= HADAMARD_BOUND + 1e-9);
    }

    #[test]
    fn kets_round_trip_through_json(psi in ket8()) {
        let s = serde_json::to_string(&psi).unwrap();
        let back: Ket = serde_json::from_str(&s).unwrap();
        prop_assert!(back.canonical().approx_eq(&psi.canonical(), 1e-14));
    }

    #[test]
    fn genshifts_spectrum(t in 0.0f64..std::f64::consts::PI, chi in 0.0f64..std::f64::consts::TAU) {
        let fam = genshifts_upb(QubitKet::from_angles(t, chi));
        let vals = rho_q(&fam).eigenvalues();
        for (i, v) in vals.iter().enumerate() {
            let e = if i < 4 { 0.0 } else { 0.25 };
            prop_assert!((v - e).abs() < 1e-10);
        }
    }

    #[test]
    fn complex_parameter_reduces_to_real(t in 0.05f64..3.1, chi in 0.0f64..std::f64::consts::TAU) {
        let complex = rho_q(&genshifts_upb(QubitKet::from_angles(t, chi)));
        let real = rho_q(&genshifts_upb(QubitKet::from_angles(t, 0.0)));
        let d = qubit_unitary(0.0, 0.0, -chi, 0.0);
        let u = local([&d, &d, &d]);
        let conj = &u * complex.matrix() * u.adjoint();
        prop_assert!(max_abs_diff(&conj, real.matrix()) < 1e-13);
        let r = QubitKet::from_angles(t, chi).real_representative().to_ket();
        prop_assert!(r.approx_eq(&QubitKet::from_angles(t, 0.0).to_ket(), 1e-15));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn measures_are_local_unitary_invariant(
        psi in ket8(),
        angles in prop::array::uniform12(angle()),
    ) {
        let us: Vec<_> = angles.chunks_exact(4).map(|a| qubit_unitary(a[0], a[1], a[2], a[3])).collect();
        let moved = apply(&local([&us[0], &us[1], &us[2]]), &psi);
        let opts = OptimizerOptions::default();
        prop_assert!((concurrence_pure(&psi).unwrap() - concurrence_pure(&moved).unwrap()).abs() < 1e-8);
        let (g0, g1) = (geometric_pure(&psi, &opts).unwrap(), geometric_pure(&moved, &opts).unwrap());
        prop_assert!((g0 - g1).abs() < 1e-8, "{} vs {}", g0, g1);
    }
}
