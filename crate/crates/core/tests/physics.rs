use std::f64::consts::TAU;

use tls_spectro::quantum::{
    build_hamiltonian, build_operators, dressed_frequencies, evolve, integrate_adaptive, integrate_fixed_rk4,
    lab_frame_hamiltonian, lindblad_rhs, DensityMatrix, MaxAbs, Operator,
};
use tls_spectro::spectroscopy::run_protocol;
use tls_spectro::{Grid, Method, ProtocolConfig, Rates, SystemParams};

fn params(drive: f64) -> SystemParams {
    SystemParams {
        nu_q: 7.0,
        nu_tls: 7.12,
        anharmonicity: 0.2,
        g: 0.02,
        t1_q: 5000.0,
        tphi_q: 3000.0,
        t1_tls: 4000.0,
        tphi_tls: 8000.0,
        drive,
    }
}

fn qubit_excitation(rho: &Operator) -> f64 {
    (build_operators().n_q() * rho).trace().re
}

#[test]
fn lab_and_rotating_frames_agree() {
    let times: Vec<f64> = (0..=20).map(|i| 5.0 * i as f64).collect();
    for drive in [0.02] {
        let p = params(drive);
        let rates = p.rates();
        for nu_d in [dressed_frequencies(&p).nu_q_dressed, 7.05] {
            let rotating = evolve(&DensityMatrix::ground(), &build_hamiltonian(&p, nu_d), &rates, &times, Method::REFERENCE)
                .unwrap();
            let lab = integrate_adaptive(
                |t, rho| lindblad_rhs(rho, &lab_frame_hamiltonian(&p, nu_d, t), &rates),
                DensityMatrix::ground().matrix(),
                &times,
                1e-8,
                1e-10,
            )
            .unwrap();
            for (r, l) in rotating.iter().zip(&lab) {
                let diff = (qubit_excitation(r.matrix()) - qubit_excitation(l)).abs();
                assert!(diff <= 0.02, "A = {drive}, ν_d = {nu_d}: populations differ by {diff}");
            }
        }
    }
}

#[test]
fn rk4_is_fourth_order() {
    let p = params(0.02);
    let rates = p.rates();
    let h = build_hamiltonian(&p, 7.01);
    let times = [40.0];
    let exact = evolve(&DensityMatrix::ground(), &h, &rates, &times, Method::Propagator).unwrap();
    let error = |dt: f64| {
        let y = integrate_fixed_rk4(|_, rho| lindblad_rhs(rho, &h, &rates), DensityMatrix::ground().matrix(), &times, dt);
        (y[0] - exact[0].matrix()).max_abs()
    };
    let (coarse, fine) = (error(0.2), error(0.1));
    assert!(coarse / fine >= 8.0, "halving dt reduced the error by {}", coarse / fine);
}

#[test]
fn snapshots_match_independent_runs() {
    let p = params(0.02);
    let rates = p.rates();
    let h = build_hamiltonian(&p, 7.03);
    let times: Vec<f64> = (0..=10).map(|i| 37.0 * i as f64).collect();
    for method in [Method::REFERENCE, Method::Propagator] {
        let joint = evolve(&DensityMatrix::ground(), &h, &rates, &times, method).unwrap();
        for (t, s) in times.iter().zip(&joint) {
            let alone = evolve(&DensityMatrix::ground(), &h, &rates, &[*t], method).unwrap();
            let diff = (s.matrix() - alone[0].matrix()).max_abs();
            assert!(diff <= 1e-7, "{method:?} at t = {t}: {diff}");
        }
    }
}

#[test]
fn excitation_number_is_conserved_without_drive_or_loss() {
    let ops = build_operators();
    let number = ops.n_q() + ops.n_tls();
    let p = SystemParams { drive: 0.0, ..params(0.02) };
    let h = build_hamiltonian(&p, 7.0);
    let rates = Rates::default();
    let times: Vec<f64> = (0..=50).map(|i| 10.0 * i as f64).collect();
    let start = DensityMatrix::basis(1, 0);
    for method in [Method::REFERENCE, Method::Propagator, Method::FixedRk4 { dt: 0.05 }] {
        for s in evolve(&start, &h, &rates, &times, method).unwrap() {
            let n = (number * s.matrix()).trace().re;
            assert!((n - 1.0).abs() <= 1e-8, "{method:?}: ⟨N⟩ = {n}");
        }
    }
}

#[test]
fn methods_agree_on_a_small_map() {
    let base = ProtocolConfig {
        omega: Grid::new(6.9, 7.2, 7).unwrap(),
        time: Grid::new(0.0, 300.0, 11).unwrap(),
        ..ProtocolConfig::default()
    };
    let p = params(0.02);
    let reference = run_protocol(&p, &ProtocolConfig { method: Method::REFERENCE, ..base }).unwrap();
    for method in [Method::Propagator, Method::FixedRk4 { dt: 0.05 }] {
        let map = run_protocol(&p, &ProtocolConfig { method, ..base }).unwrap();
        let diff = map.values().iter().zip(reference.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-6, "{method:?} differs from the adaptive reference by {diff}");
    }
}

#[test]
fn resonant_drive_gives_rabi_oscillation() {
    let p = SystemParams { g: 1e-9, t1_q: 1e12, tphi_q: 1e12, t1_tls: 1e12, tphi_tls: 1e12, ..params(0.02) };
    let h = build_hamiltonian(&p, p.nu_q);
    let times: Vec<f64> = (0..=20).map(|i| 2.5 * i as f64).collect();
    let states = evolve(&DensityMatrix::ground(), &h, &p.rates(), &times, Method::Propagator).unwrap();
    // Leakage to |2⟩ is suppressed by A/U = 0.1, so the 0-1 Rabi formula holds to a few percent.
    for (t, s) in times.iter().zip(&states) {
        let expected = (0.5 * TAU * p.drive * t).sin().powi(2);
        assert!((s.population(1, 0) - expected).abs() < 0.05, "t = {t}");
    }
}
