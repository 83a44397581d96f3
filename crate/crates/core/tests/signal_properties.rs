use proptest::prelude::*;
use ququart::bloch::{pair_projection, trajectory, Segment};
use ququart::hamiltonian::{free_eigenvalues, SpinParams, Sublevel};
use ququart::linalg::{ComplexMatrix4, QuartetState};
use ququart::pulse::{closed_form_elements, hard_pulse_propagator, PulseModel, PulseParams};
use ququart::ramsey::{
    analytic_decomposition, observable_projector, ramsey_signal_trace, InitialState, Observable,
    RamseySequence, RamseySettings, TauGrid,
};
use ququart::spectral::{dft_magnitude, fold_frequency, sweep_map, sweep_spectra, DeltaRange, DftOptions};
use ququart::Complex64;
use std::f64::consts::TAU;

fn idealized_settings(delta_mhz: f64) -> RamseySettings {
    let spin = SpinParams::from_mhz(2.25, delta_mhz, 5.0);
    RamseySettings::new(PulseParams::from_ns(spin, 50.0), TauGrid::from_ns(0.0, 10.0, 64))
        .with_initial_state(InitialState::PlusHalf)
}

#[test]
fn constant_offset_leaves_signal_unchanged() {
    let s = idealized_settings(-1.3);
    let seq = RamseySequence::new(&s).unwrap();
    let shift = 7.3;
    // A c·I shift multiplies each propagator by a phase; the energies shift uniformly.
    let shifted = RamseySequence {
        pulse_unitary: seq.pulse_unitary.scale(Complex64::from_polar(1.0, -shift * s.pulse.duration)),
        energies: seq.energies.map(|e| e + shift),
    };
    let obs = observable_projector(Observable::O2);
    let rho = s.initial_state.state().density_matrix();
    for tau in [0.0, 0.13, 1.7, 12.0] {
        assert!((seq.signal(&obs, &rho, tau) - shifted.signal(&obs, &rho, tau)).abs() < 1e-10);
    }
}

#[test]
fn global_phase_of_pulse_changes_nothing() {
    let s = idealized_settings(0.7);
    let u = hard_pulse_propagator(&s.pulse).unwrap();
    let psi = QuartetState::plus_half();
    let a = analytic_decomposition(&u, &psi, s.spin(), Observable::O2).unwrap();
    let b = analytic_decomposition(&u.scale(Complex64::from_polar(1.0, 1.234)), &psi, s.spin(), Observable::O2).unwrap();
    assert!((a.c0 - b.c0).abs() < 1e-14);
    for (x, y) in a.terms.iter().zip(&b.terms) {
        assert!((x.x.norm() - y.x.norm()).abs() < 1e-14);
    }
}

#[test]
fn decomposition_frequencies_are_branch_set() {
    let s = idealized_settings(-4.0);
    let u = hard_pulse_propagator(&s.pulse).unwrap();
    let d = analytic_decomposition(&u, &QuartetState::plus_half(), s.spin(), Observable::O2).unwrap();
    let mut got: Vec<f64> = d.terms.iter().map(|t| t.omega / TAU).collect();
    got.sort_by(f64::total_cmp);
    let mut want = vec![4.0, 0.5, 5.0, 3.5, 5.5, 1.5];
    want.sort_by(f64::total_cmp);
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn free_segment_precesses_at_detuning() {
    let s = idealized_settings(1.0);
    let step = 0.001;
    let traj = trajectory(&s, (Sublevel::PlusThreeHalves, Sublevel::PlusHalf), 0.5, step).unwrap();
    let free: Vec<_> = traj.iter().filter(|p| p.segment == Segment::FreeEvolution).collect();
    assert_eq!(free.len(), 500);
    let want = TAU * 1.0 * step;
    for w in free.windows(2) {
        let mut adv = w[1].vector.azimuth() - w[0].vector.azimuth();
        adv = (adv + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
        assert!((adv.abs() - want).abs() < 1e-6, "{adv}");
        assert!((w[1].vector.z - w[0].vector.z).abs() < 1e-12);
    }
}

#[test]
fn spectator_pair_excursion_smaller_than_addressed() {
    let s = idealized_settings(1.0).with_initial_state(InitialState::MixedHalf);
    let main = trajectory(&s, (Sublevel::PlusThreeHalves, Sublevel::PlusHalf), 0.3, 0.001).unwrap();
    let spec = trajectory(&s, (Sublevel::MinusHalf, Sublevel::MinusThreeHalves), 0.3, 0.001).unwrap();
    // excursion away from the starting point
    let exc = |t: &[ququart::bloch::TrajectoryPoint]| {
        let v0 = t[0].vector;
        t.iter()
            .map(|p| ((p.vector.x - v0.x).powi(2) + (p.vector.y - v0.y).powi(2) + (p.vector.z - v0.z).powi(2)).sqrt())
            .fold(0.0, f64::max)
    };
    let (a, b) = (exc(&main), exc(&spec));
    assert!(b > 1e-3 && b < a, "addressed {a}, spectator {b}");
}

#[test]
fn trajectory_endpoint_reproduces_signal() {
    let s = idealized_settings(-0.6).with_initial_state(InitialState::MixedHalf);
    let tau = 0.42;
    let traj = trajectory(&s, (Sublevel::PlusThreeHalves, Sublevel::MinusThreeHalves), tau, 0.001).unwrap();
    let end = traj.last().unwrap();
    let grid = RamseySettings { tau_grid: TauGrid::new(tau, 0.1, 2), ..s };
    let sig = ramsey_signal_trace(&grid).unwrap().samples[0];
    assert!((end.vector.pair_population - sig).abs() < 1e-12, "{} vs {sig}", end.vector.pair_population);
}

#[test]
fn single_point_sweep_matches_direct_run() {
    let spin = SpinParams::from_mhz(2.25, -4.0, 3.125);
    let s = RamseySettings::new(PulseParams::from_ns(spin, 80.0), TauGrid::from_ns(0.0, 60.0, 128));
    let opts = DftOptions::default();
    let direct = dft_magnitude(&ramsey_signal_trace(&s).unwrap(), &opts).unwrap();
    let map = sweep_map(&DeltaRange::single(-4.0), &s, &opts, None).unwrap();
    assert_eq!(map.len(), direct.magnitudes.len());
    for (r, m) in map.iter().zip(&direct.magnitudes) {
        assert_eq!(r.magnitude, *m);
    }
}

#[test]
fn sweep_independent_of_thread_count() {
    let spin = SpinParams::from_mhz(2.25, 0.0, 3.125);
    let s = RamseySettings::new(PulseParams::from_ns(spin, 80.0), TauGrid::from_ns(0.0, 60.0, 64));
    let deltas: Vec<f64> = (0..12).map(|k| -3.0 + 0.5 * k as f64).collect();
    let a = sweep_spectra(&deltas, &s, &DftOptions::default(), Some(1)).unwrap();
    let b = sweep_spectra(&deltas, &s, &DftOptions::default(), Some(8)).unwrap();
    assert_eq!(a, b);
}

/// The compact closed-form coefficient table reads every amplitude from the −1/2
/// column and keeps only the −3/2 readout level in `c₀`.
#[test]
fn printed_coefficient_table_matches_minus_half_start() {
    const P3: usize = 0;
    const P1: usize = 1;
    const M1: usize = 2;
    const M3: usize = 3;
    for (delta, w1, tp) in [(1.0, 5.0, 50.0), (-4.0, 3.125, 80.0), (2.7, 8.0, 130.0)] {
        let pp = PulseParams::from_ns(SpinParams::from_mhz(2.25, delta, w1), tp);
        let u = hard_pulse_propagator(&pp).unwrap();
        let e = |i: usize, j: usize| u[(i, j)];
        let c0_printed: f64 = [M3, M1, P1, P3]
            .iter()
            .map(|&m| (e(M3, m) * e(m, M1)).norm_sqr())
            .sum();
        let x_printed = |m: usize, n: usize| {
            e(m, M1) * e(n, M1).conj() * (e(M3, m) * e(M3, n).conj() + e(P3, m) * e(P3, n).conj())
        };

        let minus = analytic_decomposition(&u, &QuartetState::minus_half(), &pp.spin, Observable::O2).unwrap();
        let plus = analytic_decomposition(&u, &QuartetState::plus_half(), &pp.spin, Observable::O2).unwrap();
        let readout_m3: f64 = (0..4).map(|m| (e(M3, m) * e(m, M1)).norm_sqr()).sum();
        assert!((c0_printed - readout_m3).abs() < 1e-14);
        assert!(c0_printed < minus.c0 - 1e-3, "printed c0 drops the +3/2 readout level");

        for (m, n) in [(M3, M1), (M3, P1), (M3, P3), (M1, P1), (M1, P3), (P1, P3)] {
            let printed = x_printed(m, n).norm();
            let general = minus.get(Sublevel::ALL[m], Sublevel::ALL[n]).unwrap().x.norm();
            assert!((printed - general).abs() < 1e-14);
        }
        // both starts leave the (−1/2, +1/2) weight at zero
        assert!(x_printed(M1, P1).norm() < 1e-15);
        assert!(plus.get(Sublevel::MinusHalf, Sublevel::PlusHalf).unwrap().x.norm() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_is_wigner_product(delta in -10.0f64..10.0, w1 in 0.01f64..10.0, tp in 0.0f64..200.0, dgs in 0.0f64..10.0) {
        let pp = PulseParams::from_ns(SpinParams::from_mhz(dgs, delta, w1), tp);
        let a = closed_form_elements(&pp).unwrap();
        let b = hard_pulse_propagator(&pp).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-12);
    }

    #[test]
    fn populations_conserved(delta in -6.0f64..6.0, w1 in 0.0f64..8.0, tp in 0.0f64..150.0, hard in any::<bool>()) {
        let spin = SpinParams::from_mhz(2.25, delta, w1);
        let model = if hard && w1 > 0.0 { PulseModel::Hard } else { PulseModel::Exact };
        let s = RamseySettings::new(PulseParams::from_ns(spin, tp), TauGrid::from_ns(0.0, 37.0, 32)).with_model(model);
        let seq = RamseySequence::new(&s).unwrap();
        let rho0 = s.initial_state.state().density_matrix();
        let (o1, o2) = (observable_projector(Observable::O1), observable_projector(Observable::O2));
        for tau in s.tau_grid.iter() {
            let rho = seq.evolve(&rho0, tau);
            prop_assert!((rho.trace().re - 1.0).abs() <= 1e-12);
            let (a, b) = ((o1 * rho).trace().re, (o2 * rho).trace().re);
            prop_assert!((a + b - 1.0).abs() <= 1e-12);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&b));
        }
    }

    #[test]
    fn fold_idempotent_and_bounded(f in 0.0f64..500.0, fs in 0.1f64..100.0) {
        let g = fold_frequency(f, fs);
        prop_assert!(g >= 0.0 && g <= fs / 2.0 + 1e-12);
        prop_assert!((fold_frequency(g, fs) - g).abs() <= 1e-12 * fs);
    }

    #[test]
    fn bloch_norm_bound(re in proptest::collection::vec(-1.0f64..1.0, 8), a in 0usize..4, b in 0usize..4) {
        prop_assume!(a != b);
        let amps: Vec<Complex64> = re.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let n: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(n > 1e-3);
        let ket = [amps[0] / n, amps[1] / n, amps[2] / n, amps[3] / n];
        let state = QuartetState::Pure(ket);
        let v = pair_projection(&state, (Sublevel::ALL[a], Sublevel::ALL[b])).unwrap();
        prop_assert!(v.norm().powi(2) <= v.pair_population.powi(2) + 1e-10);
        prop_assert!(v.pair_population <= 1.0 + 1e-10);
    }

    #[test]
    fn free_propagation_keeps_populations(delta in -5.0f64..5.0, t in 0.0f64..10.0) {
        let p = SpinParams::from_mhz(2.25, delta, 0.0);
        let u = ququart::linalg::diagonal_propagator(free_eigenvalues(&p).as_array(), t);
        let rho = ComplexMatrix4::from_fn(|i, j| Complex64::new(0.25, 0.1 * (i as f64 - j as f64)));
        let out = u * rho * u.adjoint();
        for k in 0..4 {
            prop_assert!((out[(k, k)] - rho[(k, k)]).norm() <= 1e-12);
        }
    }
}
