mod common;

use std::sync::Arc;

use common::*;
use nozzleflow::error::InletError;
use nozzleflow::inlet::*;
use nozzleflow::ConditionId;

/// `(u²/((γ−1)S))^{1/(γ−1)}·u` at `u = S = 1`, `γ = 1.4`.
const M_HAT_UNIT: f64 = 9.882117688026186;

fn condition(e: InletError) -> ConditionId {
    match e {
        InletError::Condition { id, .. } => id,
        other => panic!("expected a condition failure, got {other}"),
    }
}

#[test]
fn m_hat_matches_choking_oracle() {
    let p = InletProfile::constant(1.0, 1.0, 1.4);
    let mh = m_hat(&p).unwrap();
    assert!((mh / M_HAT_UNIT - 1.0).abs() < 1e-13);
    assert!((choking_flux_oracle(1.0, 1.0, 1.4) / M_HAT_UNIT - 1.0).abs() < 1e-12);
    for (u, s, g) in [(0.7, 1.3, 1.4), (1.2, 0.8, 2.0), (1.0, 1.0, 5.0)] {
        let p = InletProfile::constant(u, s, g);
        assert!((m_hat(&p).unwrap() / choking_flux_oracle(u, s, g) - 1.0).abs() < 1e-11);
    }
}

#[test]
fn inlet_pressure_matches_oracle() {
    let p = sheared(1.4);
    let m = 50.0 * m_hat(&p).unwrap();
    let u = |y: f64| 1.05 - 0.2 * y + 0.2 * y * y;
    let s = |y: f64| 1.0 + 0.1 * y;
    let oracle = inlet_pressure_oracle(&u, &s, 1.4, m);
    assert!((inlet_pressure(&p, m).unwrap() / oracle - 1.0).abs() < 1e-12);
}

#[test]
fn bernoulli_shift_by_potential() {
    let p = sheared(1.4);
    let m = 50.0 * m_hat(&p).unwrap();
    let plain = bernoulli_profile(&p, m).unwrap();
    let shifted = bernoulli_profile(&p.clone().with_phi(Arc::new(Constant(0.1))), m).unwrap();
    for k in 0..=10 {
        let x = k as f64 / 10.0;
        assert!((plain.value(x) - shifted.value(x) - 0.1).abs() < 1e-14);
    }
}

#[test]
fn validation_names_the_failed_condition() {
    let neg = InletProfile::new(Arc::new(Polynomial(vec![0.5, -1.0])), Arc::new(Constant(1.0)), 1.4);
    assert_eq!(condition(neg.validate().unwrap_err()), ConditionId::InletPositive);

    // speed increasing away from the lower wall
    let wall = InletProfile::new(Arc::new(Polynomial(vec![1.0, 0.2])), Arc::new(Constant(1.0)), 1.4);
    assert_eq!(condition(wall.validate().unwrap_err()), ConditionId::InletWallMonotone);

    let p = sheared(1.4);
    let mh = m_hat(&p).unwrap();
    let e = build_closure(&p, 0.9 * mh, 0.05).unwrap_err();
    assert!(e.to_string().contains("C-INLET-SUBSONIC"));
    assert_eq!(condition(e), ConditionId::InletSubsonic);

    // entropy rising and speed falling across the jump: mixed signs
    let mixed = InletProfile::new(
        Arc::new(Piecewise::two_state(0.5, 1.1, 1.0)),
        Arc::new(Piecewise::two_state(0.5, 1.0, 1.05)),
        1.4,
    );
    assert_eq!(condition(mixed.validate().unwrap_err()), ConditionId::InletJumpSign);
    let mut relaxed = mixed.clone();
    relaxed.allow_unsigned_jump = true;
    let warnings = relaxed.validate().unwrap();
    assert!(warnings.iter().any(|w| w.contains("C-INLET-JUMP-SIGN")));
}

#[test]
fn jump_data_need_mollifying_and_keep_their_level() {
    let (p, m) = bernoulli_jump();
    let cl = build_closure(&p, m, 0.05).unwrap();
    assert!(cl.has_jump);
    let md = cl.m_d.unwrap();
    assert!((md - cl.psi_minus.psi(0.5)).abs() < 1e-12 * m);
    let sm = mollify(&p, 0.02).unwrap();
    let cs = build_closure(&sm, m, 0.05).unwrap();
    assert!(!cs.has_jump);
    assert!((cs.psi_minus.total() / m - 1.0).abs() < 1e-12);
    // mollification leaves the data outside [x_d − ε, x_d + ε] alone
    for x in [0.2, 0.45, 0.55, 0.8] {
        let a = p.u1m.eval2(x, Side::Right).0;
        let b = sm.u1m.eval2(x, Side::Right).0;
        assert!((a - b).abs() < 1e-12, "x = {x}: {a} vs {b}");
    }
    assert!(mollify(&p, 0.5).is_err());
}

#[test]
fn mollifying_smooth_data_is_a_no_op_away_from_the_walls() {
    let p = sheared(1.4);
    let sm = mollify(&p, 0.02).unwrap();
    for k in 2..=8 {
        let x = k as f64 / 10.0;
        let a = p.u1m.eval2(x, Side::Right).0;
        let b = sm.u1m.eval2(x, Side::Right).0;
        // the kernel reproduces quadratics up to its second moment
        assert!((a - b).abs() < 1e-4, "x = {x}: {a} vs {b}");
    }
}

#[test]
fn incompressible_inlet_reduces_to_polytropic_data() {
    let mut inc =
        IncompressibleInlet::new(Arc::new(Polynomial(vec![1.05, -0.2, 0.2])), Arc::new(Polynomial(vec![1.0, 0.2])));
    inc.p_ref = 10.0;
    inc.validate().unwrap();
    let m = inc.mass_flux().unwrap();
    let oracle = simpson(|y| (1.05 - 0.2 * y + 0.2 * y * y) * (1.0 + 0.2 * y), 0.0, 1.0, 2000);
    assert!((m / oracle - 1.0).abs() < 1e-12);
    let (prof, mg) = inc.polytropic(2.0).unwrap();
    assert!((mg / m - 1.0).abs() < 1e-12);
    prof.validate().unwrap();
}
