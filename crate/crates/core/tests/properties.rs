use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use topophase_core::duality::{
    capacitor_potential_phase, dipole_potential_phase, AcConfig, CapacitorScenario, DipoleScenario,
};
use topophase_core::dynamics::{
    correlation_observable, integrate_heisenberg, phase_operator, precession_between,
    precession_unitary, SpinAxis, DEFAULT_STEP,
};
use topophase_core::interferometer::{analyze, TwoPathSetup};
use topophase_core::measurement::{decohere_interferometer, pointer_measure, PointerParams};
use topophase_core::qlinalg::{
    commutator, hermitian_exp, partial_trace, DensityMatrix, Ket, Operator, Tensor,
};
use topophase_core::rng::trial_rng;
use topophase_core::rng::StreamTag;
use topophase_core::{CouplingConfig, Trajectory, TrajectorySample};

fn hermitian(dim: usize) -> impl Strategy<Value = Operator> {
    prop::collection::vec(-2.0..2.0f64, 2 * dim * dim).prop_map(move |v| {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let z = Complex64::new(v[2 * (i * dim + j)], v[2 * (i * dim + j) + 1]);
                entries[i * dim + j] += z * 0.5;
                entries[j * dim + i] += z.conj() * 0.5;
            }
        }
        Operator::from_rows(dim, &entries).unwrap()
    })
}

fn ket(dim: usize) -> impl Strategy<Value = Ket> {
    prop::collection::vec(-1.0..1.0f64, 2 * dim)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let amps = v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
            Ket::new(amps).unwrap().normalized().unwrap()
        })
}

/// Piecewise-linear path with up to `max_segments` segments starting at t = 0.
fn trajectory(max_segments: usize) -> impl Strategy<Value = Trajectory> {
    (
        0.5..2.0f64,
        prop::collection::vec((0.2..1.0f64, -3.0..3.0f64, 0.5..2.0f64), 1..=max_segments),
    )
        .prop_map(|(r0, segs)| {
            let mut samples = vec![TrajectorySample::new(0.0, 0.0, r0)];
            let (mut t, mut theta) = (0.0, 0.0);
            for (dt, dtheta, r) in segs {
                t += dt;
                theta += dtheta;
                samples.push(TrajectorySample::new(t, theta, r));
            }
            Trajectory::new(samples).unwrap()
        })
}

fn coupling() -> impl Strategy<Value = CouplingConfig> {
    (0.05..1.0f64, 0.5..2.0f64).prop_map(|(xi, mu)| CouplingConfig::from_mu_xi(mu, xi).unwrap())
}

/// Two arms over [0, 1] sweeping `a` and `b`.
fn setup() -> impl Strategy<Value = TwoPathSetup> {
    (coupling(), -3.0..3.0f64, -3.0..3.0f64, ket(2), 0.5..2.0f64).prop_map(|(cfg, a, b, spin, r)| {
        TwoPathSetup::new(
            Trajectory::arc(0.0, 1.0, 0.0, a, r).unwrap(),
            Trajectory::arc(0.0, 1.0, 0.0, b, r).unwrap(),
            spin,
            cfg,
        )
        .unwrap()
    })
}

fn unitarity_error(u: &Operator) -> f64 {
    (&u.adjoint() * u).max_abs_diff(&Operator::identity(u.dim()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponentials_are_unitary_and_additive(a in (1usize..=4).prop_flat_map(hermitian), s in -3.0..3.0f64, t in -3.0..3.0f64) {
        let us = hermitian_exp(&a, s).unwrap();
        let ut = hermitian_exp(&a, t).unwrap();
        prop_assert!(unitarity_error(&us) <= 1e-12);
        let joint = hermitian_exp(&a, s + t).unwrap();
        prop_assert!((&us * &ut).max_abs_diff(&joint) <= 1e-10);
    }

    #[test]
    fn evolutions_preserve_norm(traj in trajectory(10), cfg in coupling(), psi in ket(2)) {
        let u = precession_unitary(&traj, &cfg);
        prop_assert!(unitarity_error(&u) <= 1e-12);
        let out = u.apply(&psi).unwrap();
        prop_assert!((out.norm_sqr().sqrt() - psi.norm_sqr().sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn partial_trace_recovers_factors(a in ket(2), b in ket(2)) {
        let ra = DensityMatrix::from_ket(&a).unwrap();
        let rb = DensityMatrix::from_ket(&b).unwrap();
        let joint = ra.tensor(&rb);
        let ka = partial_trace(&joint, &[2, 2], 0).unwrap();
        let kb = partial_trace(&joint, &[2, 2], 1).unwrap();
        prop_assert!(ka.as_operator().max_abs_diff(&ra.as_operator()) <= 1e-12);
        prop_assert!(kb.as_operator().max_abs_diff(&rb.as_operator()) <= 1e-12);
    }

    #[test]
    fn spinor_doubling(traj in trajectory(6), cfg in coupling()) {
        let u = precession_unitary(&traj, &cfg);
        let phase = phase_operator(&traj, &cfg).entry(0, 0).re;
        // U = diag(e^{−iφ}, e^{iφ}) rotates the transverse spin by 2φ
        let rotated = (u.entry(0, 0).conj() * u.entry(1, 1)).arg();
        let wrapped = (rotated - 2.0 * phase).rem_euclid(TAU);
        prop_assert!(wrapped.min(TAU - wrapped) <= 1e-12);
    }

    #[test]
    fn correlation_commutes_with_phase(traj in trajectory(6), cfg in coupling()) {
        let c = correlation_observable(&traj, &cfg, SpinAxis::X);
        let phi = phase_operator(&traj, &cfg);
        prop_assert!(commutator(&c, &phi).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn phase_operator_adds_under_concatenation(a in trajectory(4), b in trajectory(4), cfg in coupling()) {
        let joined = a.concat(&b).unwrap();
        let sum = &phase_operator(&a, &cfg) + &phase_operator(&b, &cfg);
        prop_assert!(phase_operator(&joined, &cfg).max_abs_diff(&sum) <= 1e-12);
    }

    #[test]
    fn closed_loop_phase_is_topological(
        cfg in coupling(),
        winding in -2i32..=2,
        radii in prop::collection::vec(0.3..3.0f64, 9),
        stretch in 0.1..5.0f64,
    ) {
        let steps = 8usize;
        let loop_at = |r: &dyn Fn(usize) -> f64| {
            let samples = (0..=steps)
                .map(|k| TrajectorySample::new(k as f64, TAU * winding as f64 * k as f64 / steps as f64, r(k)))
                .collect();
            Trajectory::new(samples).unwrap()
        };
        let circle = loop_at(&|_| 1.0);
        let deformed = loop_at(&|k| radii[k]).retimed(|t| stretch * t + 0.3 * t * t).unwrap();
        let p1 = phase_operator(&circle, &cfg);
        let p2 = phase_operator(&deformed, &cfg);
        prop_assert!(p1.max_abs_diff(&p2) <= 1e-12);

        let arm_a = TwoPathSetup::new(circle.clone(), Trajectory::stationary(0.0, steps as f64, 0.0, 1.0).unwrap(), Ket::spin_up(), cfg).unwrap();
        let arm_b = TwoPathSetup::new(deformed.clone(), Trajectory::stationary(0.0, deformed.end_time(), 0.0, 1.0).unwrap(), Ket::spin_up(), cfg).unwrap();
        let (ra, rb) = (analyze(&arm_a).unwrap(), analyze(&arm_b).unwrap());
        if let (Some(x), Some(y)) = (ra.relative_phase, rb.relative_phase) {
            let d = (x - y).rem_euclid(TAU);
            prop_assert!(d.min(TAU - d) <= 1e-10);
        }
    }

    #[test]
    fn rk4_tracks_conjugation(traj in trajectory(10), cfg in coupling(), polar in 0.0..PI, az in 0.0..TAU) {
        let b0 = [polar.sin() * az.cos(), polar.sin() * az.sin(), polar.cos()];
        let series = integrate_heisenberg(&traj, &cfg, b0, DEFAULT_STEP).unwrap();
        let rho0 = DensityMatrix::from_bloch(b0).unwrap();
        let t0 = traj.start_time();
        for k in (0..series.len()).step_by(97).chain([series.len() - 1]) {
            let u = precession_between(&traj, &cfg, t0, series.times[k]).unwrap();
            let exact = rho0.evolve(&u).unwrap().bloch().unwrap();
            for i in 0..3 {
                prop_assert!((series.bloch[k][i] - exact[i]).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn complementarity(s in setup(), res in 0.0..5.0f64, t in 0.0..1.0f64, along_y in any::<bool>()) {
        let r = analyze(&s).unwrap();
        prop_assert!(r.visibility.powi(2) + r.distinguishability.powi(2) <= 1.0 + 1e-9);
        prop_assert!((r.visibility.powi(2) + r.distinguishability.powi(2) - 1.0).abs() <= 1e-9);

        let ua = precession_unitary(&s.arm_a, &s.coupling).apply(&s.spin_in).unwrap();
        let ub = precession_unitary(&s.arm_b, &s.coupling).apply(&s.spin_in).unwrap();
        let overlap = ua.inner(&ub).unwrap().norm();
        prop_assert!((r.visibility - overlap).abs() <= 1e-10);
        // each estimator is recovered from the other on the side where the
        // square root is well conditioned
        let d = r.distinguishability;
        if overlap <= d {
            prop_assert!((d - (1.0 - overlap * overlap).max(0.0).sqrt()).abs() <= 1e-10);
        } else {
            prop_assert!((overlap - (1.0 - d * d).max(0.0).sqrt()).abs() <= 1e-10);
        }

        let obs = if along_y { Operator::sigma_y() } else { Operator::sigma_x() };
        let p = PointerParams::with_resolution(res).unwrap();
        let early = decohere_interferometer(&s, &p, 0.0, &obs).unwrap();
        prop_assert!(early.visibility <= r.visibility + 1e-9);
        let m = decohere_interferometer(&s, &p, t, &obs).unwrap();
        // spin and pointer record together form a pure which-path marker
        prop_assert!((m.visibility.powi(2) + m.distinguishability.powi(2) - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn swapping_arms_negates_phase(s in setup()) {
        let r = analyze(&s).unwrap();
        let w = analyze(&s.swapped()).unwrap();
        prop_assert_eq!(r.visibility, w.visibility);
        prop_assert_eq!(r.distinguishability, w.distinguishability);
        if let (Some(x), Some(y)) = (r.relative_phase, w.relative_phase) {
            let d = (x + y).rem_euclid(TAU);
            prop_assert!(d.min(TAU - d) <= 1e-12);
        }
    }

    #[test]
    fn decoupled_pointer_is_identity(psi in ket(4), seed in any::<u64>()) {
        let rho = DensityMatrix::from_ket(&psi).unwrap();
        let a = Operator::identity(2).tensor(&Operator::sigma_x());
        let p = PointerParams::new(0.0, 1.3).unwrap();
        let mut rng = trial_rng(seed, StreamTag(0), 0);
        let r = pointer_measure(&rho, &a, &p, &mut rng).unwrap();
        prop_assert!(r.post.as_operator().max_abs_diff(&rho.as_operator()) <= 1e-12);
    }

    #[test]
    fn dualize_is_involution(traj in trajectory(5), mu in -3.0..3.0f64, lambda in -3.0..3.0f64, hbar in 0.1..3.0f64) {
        let ac = AcConfig {
            coupling: CouplingConfig::new(mu, lambda).unwrap().with_hbar(hbar).unwrap(),
            trajectory: traj,
        };
        let ab = ac.dualize();
        prop_assert_eq!(&ab.dualize().unwrap(), &ac);
        prop_assert!((ab.phase() - ac.phase()).abs() <= 1e-12 * ac.phase().abs().max(1.0));
    }

    #[test]
    fn potential_phases_are_linear_and_additive(
        values in prop::collection::vec(-3.0..3.0f64, 2..8),
        split in prop::collection::vec(-3.0..3.0f64, 1..6),
        k in -4.0..4.0f64,
        q in 0.1..3.0f64,
    ) {
        let cfg = CouplingConfig::default();
        let series = |vs: &[f64], t0: f64| -> Vec<(f64, f64)> {
            let mut out = vec![(t0, 0.0)];
            out.extend(vs.iter().enumerate().map(|(i, &v)| (t0 + i as f64 + 1.0, v)));
            out.push((t0 + vs.len() as f64 + 1.0, 0.0));
            out
        };
        let first = series(&values, 0.0);
        let t_mid = first.last().unwrap().0;
        let second = series(&split, t_mid);
        let mut whole = first.clone();
        whole.extend_from_slice(&second[1..]);

        let phase = |s: &[(f64, f64)], charge: f64| {
            capacitor_potential_phase(&CapacitorScenario::new(s.to_vec(), charge).unwrap(), &cfg).unwrap()
        };
        let tol = 1e-12 * (1.0 + phase(&whole, q).abs());
        prop_assert!((phase(&whole, q) - phase(&first, q) - phase(&second, q)).abs() <= tol);
        prop_assert!((phase(&first, k * q) - k * phase(&first, q)).abs() <= 1e-12 * (1.0 + (k * phase(&first, q)).abs()));

        let dip = |s: &[(f64, f64)], e: f64| {
            dipole_potential_phase(&DipoleScenario::new(s.to_vec(), e).unwrap(), &cfg).unwrap()
        };
        prop_assert!((dip(&first, k * q) - k * dip(&first, q)).abs() <= 1e-12 * (1.0 + (k * dip(&first, q)).abs()));
    }
}
