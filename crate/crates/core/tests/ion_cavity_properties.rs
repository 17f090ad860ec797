// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;

use ioncav::constants::TWO_PI;
use ioncav::estimation::{
    calibrate_repump_drive, fit_tau_decaying, lambda_decay_time, repump_time, Dataset,
    InversionOptions,
};
use ioncav::ion_cavity::{
    analytic_rates, simulate_excited_state_decay, simulate_lambda_sequence, PulseSequenceSpec,
    SequenceKind, SystemParams,
};
use ioncav::lindblad::Level;

const MHZ: f64 = TWO_PI * 1e6;

fn assert_monotone_and_bounded(p: &SystemParams) {
    let traj = simulate_lambda_sequence(p, &PulseSequenceSpec::lambda_default()).unwrap();
    let ps = traj.population(Level::S);
    assert!(ps.iter().all(|v| (-1e-8..=1.0 + 1e-8).contains(v)));
    for w in ps.windows(2) {
        assert!(w[1] <= w[0] + 1e-6, "P_S rose from {} to {}", w[0], w[1]);
    }
}

fn excited_decay_rate(p: &SystemParams) -> f64 {
    let times: Vec<f64> = (2..=41).map(|i| i as f64 * 5e-9).collect();
    let traj = simulate_excited_state_decay(p, &times).unwrap();
    let fit = fit_tau_decaying(&Dataset::new(times, traj.population(Level::E)).unwrap()).unwrap();
    1.0 / fit.value("tau")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cavity_free_ps_is_monotone(omega in 0.2f64..3.0, beta in 0.8f64..0.995) {
        assert_monotone_and_bounded(&SystemParams {
            omega_297: omega * MHZ,
            g: 0.0,
            beta,
            ..SystemParams::default()
        });
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn resonant_ps_is_monotone_and_faster(omega in 0.6f64..1.6, g in 1.0f64..5.0) {
        let on = SystemParams { omega_297: omega * MHZ, g: g * MHZ, ..SystemParams::default() };
        assert_monotone_and_bounded(&on);
        let opts = InversionOptions::default();
        let tau_on = lambda_decay_time(&on, &opts).unwrap();
        let tau_off = lambda_decay_time(&SystemParams { g: 0.0, ..on }, &opts).unwrap();
        prop_assert!(tau_on < tau_off);

        // bad-cavity regime: analytic estimate within 25 %
        let rates = analytic_rates(&on);
        prop_assert!(!rates.regime_warning);
        prop_assert!((rates.tau_on_estimate / tau_on - 1.0).abs() < 0.25);
        prop_assert!((rates.tau_off_estimate / tau_off - 1.0).abs() < 0.25);
    }
}

#[test]
fn analytic_estimates_track_simulation_for_default_set() {
    let p = SystemParams::default();
    let opts = InversionOptions::default();
    let rates = analytic_rates(&p);
    let tau_off = lambda_decay_time(&SystemParams { g: 0.0, ..p }, &opts).unwrap();
    let tau_on = lambda_decay_time(&p, &opts).unwrap();
    assert!((rates.tau_off_estimate / tau_off - 1.0).abs() < 0.25);
    assert!((rates.tau_on_estimate / tau_on - 1.0).abs() < 0.25);
}

#[test]
fn doubling_g_quadruples_cavity_induced_rate() {
    let p = SystemParams::default();
    let base = excited_decay_rate(&SystemParams { g: 0.0, ..p });
    let single = excited_decay_rate(&p) - base;
    let double = excited_decay_rate(&SystemParams { g: 2.0 * p.g, ..p }) - base;
    assert!(
        (double / single / 4.0 - 1.0).abs() < 0.10,
        "ratio {}",
        double / single
    );

    let a = analytic_rates(&p).purcell_pop_rate;
    let b = analytic_rates(&SystemParams { g: 2.0 * p.g, ..p }).purcell_pop_rate;
    assert!((b / a - 4.0).abs() < 1e-12);
}

#[test]
fn repump_calibrates_to_500_ns() {
    let p = SystemParams::default();
    let omega = calibrate_repump_drive(&p, 500e-9, 1e-4).unwrap();
    assert!(omega > 0.0 && omega < 50.0 * p.gamma_total);
    let q = SystemParams {
        omega_935: omega,
        ..p
    };
    let seq = PulseSequenceSpec::uniform(SequenceKind::CavityRepump, 2.5e-6, 40).unwrap();
    let tau = repump_time(&q, &seq, 1.0).unwrap().value("tau");
    assert!((tau / 500e-9 - 1.0).abs() < 1e-3, "{tau}");

    // weak drive: halving the intensity doubles the time constant
    let slow_seq = PulseSequenceSpec::uniform(SequenceKind::CavityRepump, 40e-6, 60).unwrap();
    let t1 = repump_time(&q, &slow_seq, 0.1).unwrap().value("tau");
    let t2 = repump_time(&q, &slow_seq, 0.05).unwrap().value("tau");
    assert!((t2 / t1 / 2.0 - 1.0).abs() < 0.10, "{t1} {t2}");
}
