mod common;

use approx::assert_abs_diff_eq;
use qent_core::measures::{rho_q_entanglement, CertificateStatus, MeasureKind};
use qent_core::optimize::OptimizerOptions;
use qent_core::upb::{genshifts_upb, QubitKet};

#[test]
fn complex_parameter_gives_the_real_values() {
    let opts = OptimizerOptions::default().with_restarts(32);
    for (t, chi) in [(1.1, 0.9), (2.0, -2.4)] {
        let complex = genshifts_upb(QubitKet::from_angles(t, chi));
        let real = genshifts_upb(QubitKet::from_angles(t, 0.0));
        for kind in MeasureKind::ALL {
            let a = rho_q_entanglement(kind, &complex, &opts).unwrap();
            let b = rho_q_entanglement(kind, &real, &opts).unwrap();
            assert_abs_diff_eq!(a.value, b.value, epsilon = 1e-8);
            assert_eq!(a.status, CertificateStatus::Certified, "{kind} at ({t}, {chi})");
        }
    }
}

#[test]
fn overlap_mirror_symmetry() {
    let opts = OptimizerOptions::default().with_restarts(32);
    for t in [0.15, 0.35] {
        let lo = genshifts_upb(QubitKet::from_overlap(t).unwrap());
        let hi = genshifts_upb(QubitKet::from_overlap(1.0 - t).unwrap());
        for kind in MeasureKind::ALL {
            let a = rho_q_entanglement(kind, &lo, &opts).unwrap().value;
            let b = rho_q_entanglement(kind, &hi, &opts).unwrap().value;
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }
}

#[test]
fn near_endpoint_is_not_degenerate() {
    let fam = genshifts_upb(QubitKet::from_overlap(0.01).unwrap());
    assert!(!fam.degenerate());
    assert!(fam.probe_overlap() > 1e-8);
    let one = genshifts_upb(QubitKet::one());
    assert!(one.degenerate());
}
