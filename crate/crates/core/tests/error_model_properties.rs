use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use composite_pulse::error_model::{
    accumulate_delta_w, delta_w_commuting, distance, error_moment_integrals,
    error_moment_integrals_with_durations, first_order_oracle, interaction_error,
    interaction_error_quadrature, irreducible_decompose, pulse_error, st_decomposition,
    ErrorChannel,
};
use composite_pulse::sequences::{Pulse, PulseSequence};
use composite_pulse::su2::{frobenius, rotation, HermitianGen, RotationVector};

fn pulses(min: usize, max: usize) -> impl Strategy<Value = Vec<Pulse>> {
    prop::collection::vec(
        (0.05..(3.0 * PI), 0.0..(2.0 * PI)).prop_map(|(t, p)| Pulse::new(t, p).unwrap()),
        min..=max,
    )
}

fn sequence(min: usize, max: usize) -> impl Strategy<Value = PulseSequence> {
    pulses(min, max).prop_map(|p| PulseSequence::custom(p, 0.0, 0.0).unwrap())
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Time average of the Pauli vector v seen from a frame rotating about n by θ.
fn rotating_average(m: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    let theta = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
    let n = m.map(|x| x / theta);
    let along = n[0] * v[0] + n[1] * v[1] + n[2] * v[2];
    let nxv = cross(n, v);
    let (s, c) = (theta.sin() / theta, (1.0 - theta.cos()) / theta);
    std::array::from_fn(|k| along * n[k] + (v[k] - along * n[k]) * s - nxv[k] * c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_matches_quadrature(t in 0.0..(4.0 * PI), p in 0.0..(2.0 * PI),
                                      e in -0.3..0.3f64, ep in -0.3..0.3f64) {
        let m = RotationVector::in_plane(t, p);
        let ch = ErrorChannel::combined(e, ep);
        let quad = interaction_error_quadrature(&m, &pulse_error(&m, &ch), 64).unwrap();
        prop_assert!(distance(&interaction_error(&m, &ch), &quad) < 1e-10);
    }

    #[test]
    fn quadrature_matches_rotating_frame_average(
        mx in -6.0..6.0f64, my in -6.0..6.0f64, mz in 0.1..6.0f64,
        vx in -1.0..1.0f64, vy in -1.0..1.0f64, vz in -1.0..1.0f64,
    ) {
        let m = RotationVector::new(mx, my, mz);
        let quad = interaction_error_quadrature(&m, &HermitianGen::from_coefficients([vx, vy, vz]), 64)
            .unwrap();
        let expected = rotating_average(m.0, [vx, vy, vz]);
        let got = quad.coefficients();
        for k in 0..3 {
            prop_assert!((got[k] - expected[k]).abs() < 1e-11, "{:?} vs {:?}", got, expected);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn first_order_generator_is_traceless_hermitian(seq in sequence(1, 6),
                                                   e in -1.0..1.0f64, ep in -1.0..1.0f64) {
        let dw = accumulate_delta_w(&seq, &ErrorChannel::combined(e, ep)).unwrap().delta_w;
        prop_assert!(dw.hermiticity_defect() < 1e-13);
        prop_assert!(dw.matrix().trace().norm() < 1e-13);
    }

    #[test]
    fn first_order_generator_is_linear(seq in sequence(1, 6), e in -2.0..2.0f64, ep in -2.0..2.0f64) {
        let pl = accumulate_delta_w(&seq, &ErrorChannel::UNIT_PULSE_LENGTH).unwrap().delta_w;
        let or = accumulate_delta_w(&seq, &ErrorChannel::UNIT_OFF_RESONANCE).unwrap().delta_w;
        let both = accumulate_delta_w(&seq, &ErrorChannel::combined(e, ep)).unwrap().delta_w;
        prop_assert!(distance(&both, &pl.scale(e).add(&or.scale(ep))) < 1e-12);
    }

    #[test]
    fn commuting_channel_shortcut_agrees(seq in sequence(1, 6), e in -1.0..1.0f64) {
        let ch = ErrorChannel::PulseLength { eps: e };
        let direct = accumulate_delta_w(&seq, &ch).unwrap().delta_w;
        let shortcut = delta_w_commuting(&seq, &ch).unwrap();
        prop_assert!(distance(&direct, &shortcut) < 1e-12);
    }

    #[test]
    fn st_identity_holds(seq in sequence(3, 3), e in -1.0..1.0f64, ep in -1.0..1.0f64) {
        let st = st_decomposition(&seq).unwrap();
        let u = seq.ideal_product();
        let dw = accumulate_delta_w(&seq, &ErrorChannel::combined(e, ep)).unwrap().delta_w;
        let r3 = rotation(&seq.rotation_vectors()[2]);
        let lhs = u.matrix() * dw.matrix();
        let rhs = r3.matrix() * st.s * Complex64::new(e, 0.0) + st.t * Complex64::new(ep, 0.0);
        prop_assert!(frobenius(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn analytic_generator_matches_finite_difference(seq in sequence(1, 5)) {
        for ch in [ErrorChannel::UNIT_PULSE_LENGTH, ErrorChannel::UNIT_OFF_RESONANCE] {
            let analytic = accumulate_delta_w(&seq, &ch).unwrap().delta_w;
            let fd = first_order_oracle(&seq, &ch, 1e-5).unwrap();
            prop_assert!(distance(&analytic, &fd) < 1e-4);
        }
    }

    #[test]
    fn second_moment_ignores_durations(seq in sequence(1, 4), w in prop::collection::vec(0.1..3.0f64, 4)) {
        let a = error_moment_integrals(&seq, 64).unwrap();
        let b = error_moment_integrals_with_durations(&seq, &w[..seq.len()], 64).unwrap();
        for k in 0..3 {
            prop_assert!((a.second[k] - b.second[k]).abs().max() < 1e-10);
        }
        for parts in a.decompose_second() {
            prop_assert!(parts.symmetric_traceless.trace().abs() < 1e-12);
        }
    }

    #[test]
    fn irreducible_parts_reconstruct(v in prop::collection::vec(-10.0..10.0f64, 9)) {
        let m = nalgebra::Matrix3::from_row_slice(&v);
        let p = irreducible_decompose(&m);
        prop_assert!((p.reconstruct() - m).abs().max() < 1e-14);
        prop_assert!((p.antisymmetric + p.antisymmetric.transpose()).abs().max() < 1e-15);
        prop_assert!((p.symmetric_traceless - p.symmetric_traceless.transpose()).abs().max() < 1e-15);
    }
}

#[test]
fn rotating_average_oracle_checks_sign_convention() {
    let m = RotationVector::new(0.0, 0.0, PI);
    let avg =
        interaction_error_quadrature(&m, &HermitianGen::from_coefficients([1.0, 0.0, 0.0]), 64)
            .unwrap()
            .coefficients();
    assert!(avg[0].abs() < 1e-14);
    assert!((avg[1] + 2.0 / PI).abs() < 1e-14);
}
