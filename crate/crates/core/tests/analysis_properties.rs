use std::f64::consts::{FRAC_PI_2, PI, TAU};

use proptest::prelude::*;

use composite_pulse::analysis::{
    fidelity_under_error, infidelity_under_error, landscape, landscape_with_threads, linspace,
    phase_decomposition,
};
use composite_pulse::sequences::{
    alway_jones, bb1, cis_cccp, corpse, plain, scrofulous, scrofulous_in_corpse, PulseSequence,
    CIS_CCCP_WINDING, CORPSE_WINDING,
};
use composite_pulse::su2::wrap_phase;

fn families(theta: f64, phi: f64) -> Vec<PulseSequence> {
    vec![
        plain(theta, phi).unwrap(),
        corpse(theta, phi, CORPSE_WINDING).unwrap(),
        scrofulous(theta, phi).unwrap(),
        cis_cccp(theta, phi, CIS_CCCP_WINDING).unwrap(),
        bb1(theta, phi).unwrap(),
        alway_jones(phi).unwrap(),
    ]
}

fn max_over_grid(f: impl Fn(f64, f64) -> f64) -> f64 {
    let axis = linspace(-0.1, 0.1, 21);
    axis.iter()
        .flat_map(|&e| axis.iter().map(move |&ep| (e, ep)))
        .map(|(e, ep)| f(e, ep))
        .fold(0.0, f64::max)
}

#[test]
fn reflection_symmetry_in_off_resonance() {
    for theta in [PI, FRAC_PI_2, 2.0, 4.0] {
        for seq in [
            plain(theta, 0.0).unwrap(),
            corpse(theta, 0.0, CORPSE_WINDING).unwrap(),
            scrofulous(theta, 0.0).unwrap(),
            scrofulous_in_corpse(theta, 0.0, CIS_CCCP_WINDING).unwrap(),
        ] {
            let d = max_over_grid(|e, ep| {
                (fidelity_under_error(&seq, e, ep) - fidelity_under_error(&seq, e, -ep)).abs()
            });
            assert!(d < 1e-12, "{} at {theta}: {d:e}", seq.family());
        }
    }
}

#[test]
fn reflection_symmetry_fails_for_asymmetric_sequences() {
    for seq in [
        cis_cccp(PI, 0.0, CIS_CCCP_WINDING).unwrap(),
        bb1(PI, 0.0).unwrap(),
        alway_jones(0.0).unwrap(),
    ] {
        let d = max_over_grid(|e, ep| {
            (fidelity_under_error(&seq, e, ep) - fidelity_under_error(&seq, e, -ep)).abs()
        });
        assert!(d > 1e-6, "{}: {d:e}", seq.family());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pulse_length_infidelity_is_even(theta in 0.1..(TAU - 0.1), phi in 0.0..TAU, e in 0.0..0.1f64) {
        for seq in families(theta, phi) {
            let d = (infidelity_under_error(&seq, e, 0.0) - infidelity_under_error(&seq, -e, 0.0)).abs();
            prop_assert!(d < 1e-12, "{}: {d:e}", seq.family());
        }
    }

    #[test]
    fn phases_add_up(theta in 0.1..(TAU - 0.1), phi in 0.0..TAU) {
        for seq in families(theta, phi) {
            let report = phase_decomposition(&seq).unwrap();
            for st in report.states {
                let gap = wrap_phase(st.geometric + st.dynamical - st.total);
                prop_assert!(gap.abs() < 1e-12, "{}: {gap:e}", seq.family());
            }
        }
    }
}

#[test]
fn reverse_concatenation_breaks_evenness() {
    let seq = scrofulous_in_corpse(PI, 0.0, CIS_CCCP_WINDING).unwrap();
    let d =
        (infidelity_under_error(&seq, 0.1, 0.0) - infidelity_under_error(&seq, -0.1, 0.0)).abs();
    assert!(d > 1e-9, "{d:e}");
}

#[test]
fn landscape_independent_of_thread_count() {
    let seq = cis_cccp(PI, FRAC_PI_2, CIS_CCCP_WINDING).unwrap();
    let auto = landscape(&seq, (-0.1, 0.1), (-0.1, 0.1), 41).unwrap();
    for threads in [1, 3] {
        let fixed = landscape_with_threads(&seq, (-0.1, 0.1), (-0.1, 0.1), 41, threads).unwrap();
        assert_eq!(auto.to_csv(), fixed.to_csv());
    }
}
