//! Property tests of the propagator, the observables and the interference sum.

use std::f64::consts::PI;

use proptest::prelude::*;

use chiral_core::basis::StateLabel;
use chiral_core::interference::{phi_sum, phi_sum_literal};
use chiral_core::molecule::MoleculeSpec;
use chiral_core::observables::{Ensemble, LevelReport};
use chiral_core::propagator::{run_train, BasisPlan, Engine, State};
use chiral_core::pulsetrain::{bessel_train, equal_train};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

fn rotor_state(j: i32, m: i32, level_max: i32) -> State {
    let mol = MoleculeSpec::n2_14();
    let label = StateLabel::rotor(j, m);
    State::basis_state(
        BasisPlan::for_initial(&mol, &label, level_max).unwrap(),
        &label,
    )
    .unwrap()
}

fn check_report(r: &LevelReport) {
    assert!((r.total_population() - 1.0).abs() < 1e-10);
    for &q in &r.population {
        assert!((-1e-15..=1.0 + 1e-12).contains(&q));
    }
    for eps in r.directionality.iter().flatten() {
        assert!(eps.abs() <= 1.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn norm_and_lattice(j in 0i32..5, m_frac in 0.0f64..1.0, count in 1usize..6,
                        tau in 0.1f64..5.0, delta in -PI..PI, p in 0.0f64..3.0) {
        let m = (m_frac * f64::from(2 * j + 1)).floor() as i32 - j;
        let s = rotor_state(j, m, 24);
        let train = equal_train(count, tau, delta, p, 0.0).unwrap();
        let out = run_train(s, &train, Engine::Sudden).unwrap();
        prop_assert!(out.max_norm_drift() < 1e-11);
        // the basis only holds states reachable by ΔJ, ΔM ∈ {0, ±2}
        for label in out.labels() {
            prop_assert_eq!((label.j - j).rem_euclid(2), 0);
            prop_assert_eq!((label.m - m).rem_euclid(2), 0);
        }
    }

    #[test]
    fn rotating_the_whole_train_keeps_populations(j in 0i32..4, chi in -PI..PI, delta in -PI..PI, tau in 0.2f64..4.0) {
        let s = rotor_state(j, j.min(1), 24);
        let train = equal_train(4, tau, delta, 2.0, 0.0).unwrap();
        let a = run_train(s.clone(), &train, Engine::Sudden).unwrap();
        let b = run_train(s, &train.clone().rotated(chi), Engine::Sudden).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            prop_assert!((x.norm_sqr() - y.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn free_evolution_after_the_train_leaves_observables(delays in prop::collection::vec(-20.0f64..20.0, 5),
                                                         tau in 0.3f64..5.0, delta in 0.0f64..PI) {
        let ens = Ensemble::thermal(&MoleculeSpec::n2_14(), 8.0, 3.0, None).unwrap();
        let train = equal_train(3, tau, delta, 3.0, 0.0).unwrap();
        let finals = ens.propagate(&train, Engine::Sudden).unwrap();
        let reference = ens.report(&finals);
        check_report(&reference);
        for d in delays {
            let mut moved = finals.clone();
            for w in &mut moved {
                w.state.free_evolve(d);
            }
            let r = ens.report(&moved);
            for (a, b) in r.population.iter().zip(&reference.population) {
                prop_assert!((a - b).abs() < 1e-13);
            }
            prop_assert!((r.jz - reference.jz).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_is_bounded(n in 1usize..40, phi in -50.0f64..50.0) {
        let v = phi_sum(n, phi);
        let nn = (n * n) as f64;
        prop_assert!(v >= 0.0 && v <= nn * (1.0 + 1e-12));
        prop_assert!((v - phi_sum_literal(n, phi)).abs() <= 1e-9 * nn);
    }
}

proptest! {
    #![proptest_config(cases(6))]

    #[test]
    fn oxygen_norm_and_bounds(tau in 0.5f64..6.0, delta in 0.0f64..PI) {
        let ens = Ensemble::thermal(&MoleculeSpec::o2_16(), 8.0, 7.5, None).unwrap();
        let train = bessel_train(2.0, tau, delta, 7.5, 0.0, None).unwrap();
        let finals = ens.propagate(&train, Engine::Sudden).unwrap();
        for w in &finals {
            prop_assert!(w.state.max_norm_drift() < 1e-10);
            for label in w.state.labels() {
                prop_assert_eq!(label.n.rem_euclid(2), 1);
            }
        }
        check_report(&ens.report(&finals));
    }
}

/// The isotopologues' population observables differ only through nuclear
/// spin weights once their rotational constants agree.
#[test]
fn isotopologues_differ_only_by_spin_weights() {
    let mut n15 = MoleculeSpec::n2_15();
    let n14 = MoleculeSpec::n2_14();
    n15.b = n14.b;
    n15.d = n14.d;
    n15.spin_weights = n14.spin_weights;
    let train = equal_train(8, 2.1, PI / 4.0, 5.0, 0.0).unwrap();
    let a = Ensemble::thermal(&n14, 8.0, 5.0, None)
        .unwrap()
        .run(&train, Engine::Sudden)
        .unwrap();
    let b = Ensemble::thermal(&n15, 8.0, 5.0, None)
        .unwrap()
        .run(&train, Engine::Sudden)
        .unwrap();
    for (x, y) in a.population.iter().zip(&b.population) {
        assert!((x - y).abs() < 1e-14);
    }
    assert!((a.jz - b.jz).abs() < 1e-12);
}

/// ¹⁵N₂ at δ = π/4: ortho and para rotate in opposite senses at
/// τ = t_rev/4 and both reverse at 3t_rev/4; the high levels follow ⟨J_z⟩.
#[test]
fn ortho_para_rotate_oppositely_at_quarter_revivals() {
    let t_rev = chiral_core::molecule::revival_time(&MoleculeSpec::n2_15()).unwrap();
    let mut signs = Vec::new();
    for name in ["15N2-ortho", "15N2-para"] {
        let ens = Ensemble::thermal(&MoleculeSpec::preset(name).unwrap(), 8.0, 5.0, None).unwrap();
        let mut per_species = Vec::new();
        for frac in [0.25, 0.75] {
            let r = ens
                .run(
                    &equal_train(8, frac * t_rev, PI / 4.0, 5.0, 0.0).unwrap(),
                    Engine::Sudden,
                )
                .unwrap();
            let sign = r.jz.signum();
            assert!(r.jz.abs() > 0.1, "{name} Jz = {}", r.jz);
            for level in 3..=r.level_max() {
                if let Some(eps) = r.epsilon(level).filter(|_| r.q(level) > 1e-3) {
                    assert_eq!(eps.signum(), sign, "{name} level {level} at {frac} t_rev");
                }
            }
            per_species.push(sign);
        }
        assert_eq!(per_species[0], -per_species[1], "{name}");
        signs.push(per_species[0]);
    }
    assert_eq!(signs[0], -signs[1]);
}
