// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ioncav::estimation::{fit_tau_decaying, Dataset};
use ioncav::ion_cavity::{build_system, simulate_lambda_sequence, PulseSequenceSpec, SystemParams};
use ioncav::lindblad::{
    build_liouvillian, build_operators, evolve, slowest_decay_rate, unvectorize, vectorize,
    CMatrix, DensityState, EvolveOptions, HilbertConfig, Level, Liouvillian, OperatorMatrix,
};

fn random_matrix(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
        )
    })
}

fn random_density(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let m = random_matrix(rng, d, 1.0);
    let rho = &m * m.adjoint();
    let tr = rho.trace();
    rho / tr
}

fn random_generator(rng: &mut ChaCha8Rng, d: usize, n_collapse: usize) -> Liouvillian {
    let m = random_matrix(rng, d, 1.0);
    let h = OperatorMatrix::new((&m + m.adjoint()) * Complex64::new(0.5, 0.0)).unwrap();
    let collapses: Vec<OperatorMatrix> = (0..n_collapse)
        .map(|_| OperatorMatrix::new(random_matrix(rng, d, 0.5)).unwrap())
        .collect();
    build_liouvillian(&h, &collapses).unwrap()
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vectorization_round_trips(seed in any::<u64>(), d in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, d, 3.0);
        prop_assert_eq!(unvectorize(&vectorize(&m), d), m);
    }

    #[test]
    fn random_generators_preserve_trace(seed in any::<u64>(), n_max in 0usize..4, k in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = HilbertConfig::new(n_max).dim();
        let l = random_generator(&mut rng, d, k);
        let rho = random_density(&mut rng, d);
        let drho = l.apply(&rho);
        prop_assert!(drho.trace().norm() <= 1e-12 * (1.0 + max_abs(&drho)));
        prop_assert!(max_abs(&(&drho - drho.adjoint())) <= 1e-12 * (1.0 + max_abs(&drho)));
    }

    #[test]
    fn ion_cavity_generator_preserves_trace(
        seed in any::<u64>(),
        omega in 0.0f64..5.0,
        g in 0.0f64..10.0,
        beta in 0.5f64..0.999,
        n_max in 1usize..3,
    ) {
        let tp = 2.0 * std::f64::consts::PI * 1e6;
        let p = SystemParams {
            omega_297: omega * tp,
            g: g * tp,
            beta,
            n_max,
            omega_935: 0.3 * tp,
            ..SystemParams::default()
        };
        let cfg = p.hilbert_config();
        let l = build_system(&p, cfg).unwrap().liouvillian().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(&mut rng, cfg.dim());
        // |d tr ρ / dt| measured in units of the fastest rate of the generator
        let drift = l.apply(&rho).trace().norm() / l.fastest_rate();
        prop_assert!(drift <= 1e-10, "drift {drift:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn evolve_matches_matrix_exponential(seed in any::<u64>(), n_max in 0usize..4, t in 0.05f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = HilbertConfig::new(n_max);
        let d = cfg.dim();
        let l = random_generator(&mut rng, d, 2);
        let rho0 = DensityState::new(random_density(&mut rng, d), cfg).unwrap();
        let opts = EvolveOptions { keep_states: true, ..EvolveOptions::default() };
        let traj = evolve(&rho0, &l, &[t], &opts).unwrap();
        let lt: DMatrix<Complex64> = l.matrix() * Complex64::new(t, 0.0);
        let exact = unvectorize(&(lt.exp() * vectorize(rho0.matrix())), d);
        let got = &traj.states.as_ref().unwrap()[0];
        prop_assert!(max_abs(&(got.matrix() - exact)) <= 1e-7);
        prop_assert!(traj.diagnostics.max_trace_error <= 1e-8);
        prop_assert!(traj.diagnostics.max_hermiticity_error <= 1e-10);
        prop_assert!(traj.diagnostics.min_eigenvalue >= -1e-8);
        prop_assert!(traj.population_sum_error() <= 1e-8);
    }
}

#[test]
fn empty_cavity_decay_rate_is_twice_kappa() {
    let kappa = 2.0 * std::f64::consts::PI * 320e6;
    let cfg = HilbertConfig::new(3);
    let ops = build_operators(cfg);
    let c = ops.a.scaled((2.0 * kappa).sqrt());
    let l = build_liouvillian(&OperatorMatrix::zeros(cfg.dim()), &[c]).unwrap();
    let rate = slowest_decay_rate(&l, &ops.number).unwrap();
    assert!((rate / (2.0 * kappa) - 1.0).abs() < 1e-9, "{rate}");
}

#[test]
fn resonant_slow_rate_matches_fitted_transfer_time() {
    let p = SystemParams::default();
    let cfg = p.hilbert_config();
    let l = build_system(&p, cfg).unwrap().liouvillian().unwrap();
    let ops = build_operators(cfg);
    let rate = slowest_decay_rate(&l, &ops.projector(Level::S)).unwrap();
    // measured 17.2 µs within 15 %
    assert!(
        ((1.0 / rate) / 17.2e-6 - 1.0).abs() < 0.15,
        "{}",
        1.0 / rate
    );

    let traj = simulate_lambda_sequence(&p, &PulseSequenceSpec::lambda_default()).unwrap();
    let fit =
        fit_tau_decaying(&Dataset::new(traj.times.clone(), traj.population(Level::S)).unwrap())
            .unwrap();
    assert!(
        (fit.value("tau") * rate - 1.0).abs() < 1e-3,
        "{} vs {}",
        fit.value("tau"),
        1.0 / rate
    );
}
