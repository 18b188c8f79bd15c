use qtm_core::machine::{
    steady_state_analytic, AnalyticModel, BathKind, Limit, MachineParams, Temperature, XState,
};
use qtm_core::nonclassicality::{chsh_x, no_go_predicates, singlet_fraction_x};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

#[test]
fn bosonic_populations_stay_below_one_half() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20_000 {
        let p = MachineParams::new(
            BathKind::Bosonic,
            log_uniform(&mut rng, 1e-4, 1e3),
            1.0,
            log_uniform(&mut rng, 1e-3, 1e3),
            log_uniform(&mut rng, 0.05, 200.0),
            0.0,
        )
        .with_limit(Limit::TbZero);
        let x = steady_state_analytic(AnalyticModel::BosonColdB, &p).unwrap();
        assert!(x.delta() <= 0.5 + 1e-9, "{p:?}: Δ = {}", x.delta());
        let preds = no_go_predicates(&x);
        assert!(preds.telecond && preds.telecond2 && preds.chshcond);
    }
}

#[test]
fn charged_singlet_overlap_stays_below_the_sharp_bound() {
    // α + Δ/2 ≤ 0.3788 at every temperature of bath A; the supremum 0.37884 is
    // reached at T_A → ∞, g ≈ 0.206, γB ≈ 0.300 (γA = 1)
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut worst: f64 = 0.0;
    for i in 0..20_000 {
        let ta = if i % 4 == 0 {
            Temperature::Infinite
        } else {
            Temperature::Finite(log_uniform(&mut rng, 0.02, 1e3))
        };
        let p = MachineParams::charged_cold_b(
            log_uniform(&mut rng, 1e-4, 1e3),
            1.0,
            log_uniform(&mut rng, 1e-3, 1e3),
            ta,
        );
        let x = steady_state_analytic(AnalyticModel::FermionChargedColdBUInf, &p).unwrap();
        worst = worst.max(x.alpha + x.delta() / 2.0);
        assert!(singlet_fraction_x(&x) <= 0.5 + 1e-12);
        assert!(chsh_x(&x) <= 2.0 + 1e-9);
    }
    assert!(worst < 0.37885, "{worst}");
    let at_sup = steady_state_analytic(
        AnalyticModel::FermionChargedColdBUInf,
        &MachineParams::charged_cold_b(0.20618, 1.0, 0.30015, Temperature::Infinite),
    )
    .unwrap();
    assert!((at_sup.alpha + at_sup.delta() / 2.0 - 0.378840).abs() < 1e-6);
    assert!(worst > 0.37, "sample never approached the bound: {worst}");
}

#[test]
fn uncharged_machine_is_never_useful_for_teleportation_or_chsh() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20_000 {
        let p = MachineParams::hot_cold(
            BathKind::Fermionic,
            log_uniform(&mut rng, 1e-4, 1e3),
            1.0,
            log_uniform(&mut rng, 1e-3, 1e3),
        );
        let x = steady_state_analytic(AnalyticModel::FermionUnchargedHotColdLimit, &p).unwrap();
        let preds = no_go_predicates(&x);
        assert!(preds.telecond2 && preds.chshcond, "{p:?}");
    }
}

#[test]
fn inversion_never_violates_chsh_but_can_teleport() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut teleports = 0;
    for _ in 0..20_000 {
        let p = MachineParams::inversion(
            log_uniform(&mut rng, 1e-8, 1e4),
            1.0,
            log_uniform(&mut rng, 1e-4, 1e4),
        );
        let x = steady_state_analytic(AnalyticModel::FermionInversion, &p).unwrap();
        assert!(no_go_predicates(&x).chshcond);
        if singlet_fraction_x(&x) > 0.5 {
            teleports += 1;
        }
    }
    assert!(teleports > 0);
}

#[test]
fn predicate_implications_hold_on_random_x_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..20_000 {
        let w: [f64; 4] = std::array::from_fn(|_| rng.gen::<f64>());
        let s: f64 = w.iter().sum();
        let (a2, a3) = (w[1] / s, w[2] / s);
        let x = XState::new(w[0] / s, a2, a3, rng.gen::<f64>() * (a2 * a3).sqrt()).unwrap();
        let p = no_go_predicates(&x);
        assert!(!p.telecond || p.telecond2);
        assert!(!p.chshcond2 || p.chshcond);
        if p.chshcond {
            assert!(chsh_x(&x) <= 2.0 + 1e-9);
        }
    }
}
