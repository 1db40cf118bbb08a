//! Headline numbers, end to end through the public API.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use topophase_core::dynamics::{
    c_half_pi, integrate_heisenberg, phase_operator, precession_unitary, DEFAULT_STEP,
};
use topophase_core::interferometer::{analyze, topological_vs_uniform};
use topophase_core::measurement::{
    c_pi_indistinguishability, decohere_interferometer, ensemble_precession_test,
    phase_uncertainty_after_measurement, PointerParams,
};
use topophase_core::qlinalg::{commutator, Operator};
use topophase_core::{CouplingConfig, Ket, ProtocolConfig, Trajectory, TwoPathSetup};

fn arc(sweep: f64) -> Trajectory {
    Trajectory::arc(0.0, 1.0, 0.0, sweep, 1.0).unwrap()
}

#[test]
fn half_precession_unitary() {
    let cfg = CouplingConfig::default();
    let u = precession_unitary(&arc(FRAC_PI_2), &cfg);
    let expected = Operator::diagonal(&[Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0)]);
    assert!(u.max_abs_diff(&expected) < 1e-12);
}

#[test]
fn full_winding_phase_is_mu_lambda() {
    let cfg = CouplingConfig::new(0.8, 1.7).unwrap();
    let phase = phase_operator(&arc(TAU), &cfg).entry(0, 0).re;
    assert!((phase - 0.8 * 1.7).abs() < 1e-12);
}

#[test]
fn sigma_z_is_conserved() {
    let cfg = CouplingConfig::default();
    let s = integrate_heisenberg(&arc(2.0), &cfg, [0.0, 0.0, 1.0], DEFAULT_STEP).unwrap();
    assert!(s.bloch.iter().all(|b| b[0] == 0.0 && b[1] == 0.0 && b[2] == 1.0));
}

#[test]
fn c_half_pi_commutes_with_phase() {
    let cfg = CouplingConfig::from_xi(0.4).unwrap();
    let traj = arc(cfg.sweep_for_rotation(FRAC_PI_2).unwrap());
    let c = c_half_pi(&traj, &cfg).unwrap();
    assert!(commutator(&c, &phase_operator(&traj, &cfg)).unwrap().max_abs() < 1e-12);
}

#[test]
fn quarter_winding_arms_give_pi() {
    let cfg = CouplingConfig::default();
    let s = TwoPathSetup::new(arc(FRAC_PI_2), arc(-FRAC_PI_2), Ket::spin_up(), cfg).unwrap();
    let r = analyze(&s).unwrap();
    assert!((r.visibility - 1.0).abs() < 1e-12);
    assert!(r.distinguishability < 1e-12);
    assert!((r.relative_phase.unwrap() - PI).abs() < 1e-10);
}

#[test]
fn measuring_the_precession_erases_the_phase() {
    let cfg = CouplingConfig::default();
    let traj = arc(cfg.sweep_for_rotation(FRAC_PI_2).unwrap());
    let p = ProtocolConfig::precession_check(traj, cfg, Ket::spin_up(), PointerParams::strong(), 10_000, 42);
    let u = phase_uncertainty_after_measurement(&p).unwrap();
    assert!((u.delta_phi - FRAC_PI_4).abs() < 0.05, "{u:?}");
    assert!(u.mean_sigma_z.abs() <= 0.05);
}

#[test]
fn ensemble_phase_spread() {
    for (phi, n) in [(0.1, 100), (0.2, 25)] {
        let st = ensemble_precession_test(n, phi, &PointerParams::strong(), 2_000, 5).unwrap();
        assert!((st.delta_phi_total - 0.5).abs() <= 0.1, "{st:?}");
    }
}

#[test]
fn c_pi_case_is_indistinguishable() {
    let r = c_pi_indistinguishability(&CouplingConfig::default(), &PointerParams::strong(), 5_000, 9).unwrap();
    assert!((r.min_fidelity - 1.0).abs() < 1e-9);
    assert!(r.tv_distance <= 0.03);

    let cfg = CouplingConfig::default();
    let s = TwoPathSetup::new(arc(FRAC_PI_2), arc(-FRAC_PI_2), Ket::plus_x(), cfg).unwrap();
    let before = analyze(&s).unwrap().visibility;
    let after = decohere_interferometer(&s, &PointerParams::strong(), 0.0, &Operator::sigma_x())
        .unwrap()
        .visibility;
    assert!((after - before).abs() < 1e-9);
}

#[test]
fn topology_is_invisible_to_c_pi() {
    let r = topological_vs_uniform(&CouplingConfig::default(), &PointerParams::strong(), 5_000, 2).unwrap();
    assert!((r.relative_phase_a - PI).abs() < 1e-10);
    assert!(r.relative_phase_b.abs() < 1e-10);
    assert!(r.statistics.unwrap().tv_distance <= 0.03);
    assert!((r.visibility_after_a - 1.0).abs() < 1e-9);
}
