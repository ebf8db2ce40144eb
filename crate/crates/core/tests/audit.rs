use mirrornoise::audit::{
    audit_qp_commutator, audit_qp_commutator_with, audit_sign_identity, audit_xi_relation, green,
    position_commutator, sign_identity_envelope, test_momentum,
};
use mirrornoise::PhysicalParams;
use proptest::prelude::*;

fn with_damping(ratio: f64) -> PhysicalParams {
    let mut p = PhysicalParams::fig2();
    p.eta = ratio * p.m * p.omega_s;
    p
}

#[test]
fn commutator_preserved_across_damping() {
    for ratio in [2.3e-7, 0.1, 0.5, 1.5, 3.0] {
        let p = with_damping(ratio);
        let r = audit_qp_commutator(&p, 10.0 / p.omega_s, 201).unwrap();
        assert!(r.max_deviation < 1e-6, "ratio {ratio}: {}", r.max_deviation);
        assert!(r.xi_residuals.iter().all(|&x| x < 1e-6), "ratio {ratio}");
        assert!(r.t.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn naive_commutator_decays() {
    for ratio in [2.3e-7, 0.1, 0.5] {
        let p = with_damping(ratio);
        let r = audit_qp_commutator_with(&p, 10.0 / p.omega_s, 201, false).unwrap();
        for (t, c) in r.t.iter().zip(&r.c_real) {
            let expected = (-p.damping_rate() * t).exp();
            assert!((c - expected).abs() < 1e-8, "ratio {ratio} t {t}");
        }
    }
    let p = with_damping(0.5);
    let r = audit_qp_commutator_with(&p, 10.0 / p.omega_s, 11, false).unwrap();
    assert!(r.max_deviation > 0.9);
}

#[test]
fn position_commutator_is_stationary() {
    // with the force commutator included, [q(t), q(t')] depends on t - t' only
    let p = with_damping(0.3);
    let w = p.omega_s;
    for (t, tp) in [(5.0, 2.0), (9.0, 6.0), (3.1, 0.1), (4.0, 4.0)] {
        let k = position_commutator(&p, t / w, tp / w, 0.0).unwrap();
        let expected = -green(&p, (t - tp) / w).qp;
        let scale = 1.0 / (p.m * w);
        assert!((k - expected).abs() < 1e-9 * scale, "{t},{tp}: {k} vs {expected}");
    }
    let k = position_commutator(&p, 2.0 / w, 5.0 / w, 0.0).unwrap();
    assert!((k - green(&p, 3.0 / w).qp).abs() < 1e-9 / (p.m * w));
}

#[test]
fn momentum_commutators_preserved() {
    // equal-time [q, p] reached from the two-time [q, q'] slope
    let p = with_damping(0.5);
    let w = p.omega_s;
    let h = 1e-5 / w;
    let t = 4.0 / w;
    let a = position_commutator(&p, t, t - h, 0.0).unwrap();
    let b = position_commutator(&p, t, t - 2.0 * h, 0.0).unwrap();
    // one-sided difference with [q(t), q(t)] = 0
    let slope = (-4.0 * a + b) / (2.0 * h);
    // d/dt' [q(t), q(t')] at t' = t is [q, p]/m = 1/m
    assert!((slope * p.m - 1.0).abs() < 1e-5, "{}", slope * p.m);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn xi_relation_interior(ratio in 0.01f64..1.5, t0 in -3.0f64..3.0, a in 0.05f64..6.0, frac in 0.02f64..0.98, backward in any::<bool>()) {
        let p = with_damping(ratio);
        let w = p.omega_s;
        let dir = if backward { -1.0 } else { 1.0 };
        let t = (t0 + dir * a) / w;
        let tp = (t0 + dir * a * frac) / w;
        let audit = audit_xi_relation(&p, t, tp, t0 / w).unwrap();
        prop_assert!(audit.residual < 1e-6, "{:?}", audit);
        prop_assert!(audit.direct != 0.0);
    }
}

#[test]
fn sign_identity_converges_with_cutoff() {
    let p = PhysicalParams::fig2();
    let t0 = 0.0;
    let t = 2.0 / p.omega_s;
    let cutoff = 1e3 / (t - t0);
    let one = audit_sign_identity(&p, t, t0, cutoff).unwrap();
    let two = audit_sign_identity(&p, t, t0, 2.0 * cutoff).unwrap();
    assert!(one.residual < 1e-2, "{one:?}");
    assert!(two.residual < one.residual);
    let e1 = sign_identity_envelope(&p, t, t0, cutoff, 16).unwrap();
    let e2 = sign_identity_envelope(&p, t, t0, 2.0 * cutoff, 16).unwrap();
    let e4 = sign_identity_envelope(&p, t, t0, 4.0 * cutoff, 16).unwrap();
    for ratio in [e2 / e1, e4 / e2] {
        assert!((0.4..0.6).contains(&ratio), "{e1} {e2} {e4}");
    }
    let back = audit_sign_identity(&p, -t, t0, cutoff).unwrap();
    let pt = test_momentum(&p, -t, t0);
    assert!((back.integral + pt / 2.0).abs() / pt.abs() < 1e-2, "{back:?}");
}
