use std::f64::consts::{FRAC_PI_2, PI, TAU};

use proptest::prelude::*;

use composite_pulse::error_model::{accumulate_delta_w, ErrorChannel};
use composite_pulse::sequences::{
    aj_product_reduce, alway_jones, bb1, cis_cccp, corpse, plain, product_of, scrofulous,
    solve_scrofulous, Family, Pulse, PulseSequence, CIS_CCCP_WINDING, CORPSE_WINDING,
};
use composite_pulse::su2::fidelity;
use composite_pulse::Error;

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// sinc⁻¹ on [π/2, π) by bisection; sinc is decreasing there.
fn inverse_sinc(y: f64) -> f64 {
    let (mut lo, mut hi) = (FRAC_PI_2, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid.sin() / mid > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn synthesize(family: Family, theta: f64, phi: f64) -> PulseSequence {
    match family {
        Family::Plain => plain(theta, phi),
        Family::Corpse => corpse(theta, phi, CORPSE_WINDING),
        Family::Scrofulous => scrofulous(theta, phi),
        Family::CisCccp => cis_cccp(theta, phi, CIS_CCCP_WINDING),
        Family::Bb1 => bb1(theta, phi),
        Family::AlwayJones => alway_jones(phi),
        _ => unreachable!(),
    }
    .unwrap()
}

const SYNTHESIZED: [Family; 6] = [
    Family::Plain,
    Family::Corpse,
    Family::Scrofulous,
    Family::CisCccp,
    Family::Bb1,
    Family::AlwayJones,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn products_hit_their_targets(theta in 0.05..(TAU - 0.05), phi in 0.0..TAU) {
        for f in SYNTHESIZED {
            let seq = synthesize(f, theta, phi);
            prop_assert!(seq.product_fidelity() >= 1.0 - 1e-11, "{f} at {theta}");
        }
    }

    #[test]
    fn declared_channels_cancel(theta in 0.05..(TAU - 0.05), phi in 0.0..TAU) {
        for f in SYNTHESIZED {
            let seq = synthesize(f, theta, phi);
            let (pl, or) = f.declared_robustness();
            let n_pl = accumulate_delta_w(&seq, &ErrorChannel::UNIT_PULSE_LENGTH).unwrap().delta_w.norm();
            let n_or = accumulate_delta_w(&seq, &ErrorChannel::UNIT_OFF_RESONANCE).unwrap().delta_w.norm();
            prop_assert!(!pl || n_pl <= 1e-10, "{f} pulse length {n_pl:e}");
            prop_assert!(!or || n_or <= 1e-10, "{f} off resonance {n_or:e}");
        }
    }

    #[test]
    fn synthesis_is_axis_covariant(theta in 0.05..(TAU - 0.05), phi in 0.0..TAU) {
        for f in SYNTHESIZED {
            let base = synthesize(f, theta, 0.0);
            let direct = synthesize(f, theta, phi);
            let moved = base.shifted(phi);
            let f_prod = fidelity(&direct.ideal_product(), &moved.ideal_product());
            prop_assert!(f_prod >= 1.0 - 1e-11, "{f}: {f_prod}");
            prop_assert!(moved.product_fidelity() >= 1.0 - 1e-11);
        }
    }

    #[test]
    fn corpse_leaves_only_the_target_pulse_length_error(
        theta in 0.05..TAU, phi in 0.0..TAU, n1 in 1i64..3, n3 in 0i64..3, e in -1.0..1.0f64, ep in -1.0..1.0f64,
    ) {
        let seq = corpse(theta, phi, [n1, n1 + n3, n3]).unwrap();
        let dw = accumulate_delta_w(&seq, &ErrorChannel::combined(e, ep)).unwrap().delta_w;
        let c = dw.coefficients();
        let expected = [e * theta * phi.cos(), e * theta * phi.sin(), 0.0];
        for k in 0..3 {
            prop_assert!((c[k] - expected[k]).abs() < 1e-10, "{c:?} vs {expected:?}");
        }
    }

    #[test]
    fn scrofulous_matches_closed_form(theta in 0.02..PI) {
        let sol = solve_scrofulous(theta).unwrap();
        let theta1 = inverse_sinc(2.0 * (0.5 * theta).cos() / PI);
        let phi1 = (-PI * theta1.cos() / (2.0 * theta1 * (0.5 * theta).sin())).acos();
        let phi2 = phi1 - (-PI / (2.0 * theta1)).acos();
        prop_assert!((sol.theta1 - theta1).abs() < 1e-9, "theta1 {} vs {}", sol.theta1, theta1);
        prop_assert!(angle_gap(sol.phi1, phi1) < 1e-9, "phi1 {} vs {}", sol.phi1, phi1);
        prop_assert!(angle_gap(sol.phi2, phi2) < 1e-9, "phi2 {} vs {}", sol.phi2, phi2);
        prop_assert!(sol.constraint_residual() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reduction_matches_direct_product(phases in prop::collection::vec(-TAU..TAU, 1..=8)) {
        let pulses: Vec<Pulse> = phases.iter().map(|&p| Pulse::new(PI, p).unwrap()).collect();
        let reduced = aj_product_reduce(&phases).unwrap();
        prop_assert!(fidelity(&reduced.rotation(), &product_of(&pulses)) >= 1.0 - 1e-10);
    }
}

#[test]
fn json_round_trip_preserves_sequences() {
    for f in SYNTHESIZED {
        let seq = synthesize(f, 2.0 * PI / 3.0, 0.7);
        let back = PulseSequence::from_json(&seq.to_json()).unwrap();
        assert_eq!(back, seq);
    }
}

#[test]
fn cis_cccp_rejects_unbalanced_winding() {
    assert!(cis_cccp(PI, 0.0, [1, 2, 0]).is_err());
    assert!(matches!(
        PulseSequence::from_json("{\"family\": \"plain\""),
        Err(Error::InvalidArgument(_))
    ));
}
