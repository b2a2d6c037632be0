//! Invariants of the closure, the inlet tables and the geometry, as properties.

use std::sync::Arc;

use nozzleflow::asymptotics::{j_eval, outlet_pressure_bounds};
use nozzleflow::closure::*;
use nozzleflow::geometry::{flatten, unflatten, NozzleGeometry};
use nozzleflow::inlet::*;
use proptest::prelude::*;

fn sv(b: f64, s: f64) -> StreamValues {
    StreamValues { b, db: 0.0, s, ds: 0.0 }
}

/// Monotone-at-the-walls quadratic speed and linear entropy.
fn smooth_profile() -> impl Strategy<Value = (InletProfile, f64)> {
    (1.1f64..3.0, 0.5f64..2.0, 0.0f64..0.3, 0.0f64..0.3, 20.0f64..200.0).prop_map(|(gamma, u0, c, ds, factor)| {
        // u = u0 − c x + c x² decreases at x = 0 and increases at x = 1
        let p = InletProfile::new(Arc::new(Polynomial(vec![u0, -c, c])), Arc::new(Constant(1.0 + ds)), gamma);
        let m = factor * m_hat(&p).unwrap();
        (p, m)
    })
}

proptest! {
    #[test]
    fn closure_inverts_on_the_subsonic_branch(
        gamma in 1.1f64..3.0, b in 0.5f64..3.0, s in 0.5f64..2.0, frac in 0.0f64..0.999,
    ) {
        let v = sv(b, s);
        let qh = qhat_from(&v, gamma);
        let g = frac * qh;
        let st = density_from_values(&v, gamma, g, 0.0).unwrap();
        let (rcr, rmax) = (critical_density(&v, gamma), stagnation_density(&v, gamma));
        prop_assert!(st.rho >= rcr * (1.0 - 1e-12) && st.rho <= rmax * (1.0 + 1e-12));
        let lhs = 0.5 * g * g + st.rho.powf(gamma + 1.0) * s;
        prop_assert!((lhs - st.rho * st.rho * b).abs() <= 1e-10 * st.rho * st.rho * b);
        prop_assert!(st.mach < 1.0);
    }

    #[test]
    fn density_decreases_with_momentum(
        gamma in 1.1f64..3.0, b in 0.5f64..3.0, s in 0.5f64..2.0, f1 in 0.0f64..0.99, f2 in 0.0f64..0.99,
    ) {
        let v = sv(b, s);
        let qh = qhat_from(&v, gamma);
        let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
        let r1 = density_from_values(&v, gamma, lo * qh, 0.0).unwrap().rho;
        let r2 = density_from_values(&v, gamma, hi * qh, 0.0).unwrap().rho;
        prop_assert!(r2 <= r1 * (1.0 + 1e-13));
    }

    #[test]
    fn sonic_flux_is_the_branch_point_flux(gamma in 1.1f64..3.0, b in 0.5f64..3.0, s in 0.5f64..2.0) {
        // at ρ_cr, q = c and ρq = Q̂
        let v = sv(b, s);
        let rcr = critical_density(&v, gamma);
        let q = (2.0 * (b - s * rcr.powf(gamma - 1.0))).sqrt();
        let c = ((gamma - 1.0) * s * rcr.powf(gamma - 1.0)).sqrt();
        prop_assert!((q / c - 1.0).abs() < 1e-12);
        prop_assert!((rcr * q / qhat_from(&v, gamma) - 1.0).abs() < 1e-12);
        prop_assert!(density_from_values(&v, gamma, qhat_from(&v, gamma), 0.0).is_err());
    }

    #[test]
    fn criterion_matches_the_density_solve(gamma in 1.1f64..3.0, b in 0.5f64..3.0, s in 0.5f64..2.0, frac in 0.0f64..1.5) {
        let v = sv(b, s);
        let g = frac * qhat_from(&v, gamma);
        let ok = density_from_values(&v, gamma, g, 0.0).map(|st| st.mach < 1.0).unwrap_or(false);
        prop_assert_eq!(g < qhat_from(&v, gamma), ok);
    }

    #[test]
    fn cutoff_is_bounded_monotone_and_exact_below(eps in 0.01f64..0.2, qh in 0.1f64..10.0, t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
        let cut = CutoffState::new(eps);
        let (a, b) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        let (qa, qb) = (cutoff_from_qhat(a * qh, qh, &cut), cutoff_from_qhat(b * qh, qh, &cut));
        prop_assert!(qa <= qb + 1e-12 * qh);
        prop_assert!(qb <= (1.0 - eps) * qh * (1.0 + 1e-12));
        if a <= 1.0 - 2.0 * eps {
            prop_assert_eq!(qa, a * qh);
        }
    }

    #[test]
    fn flatten_round_trips(x1 in -6.0f64..6.0, t in 0.0f64..1.0, b in 0.6f64..1.5) {
        let geom = NozzleGeometry::tanh(0.0, b, 0.7, 4.0);
        let (w1, w2) = geom.walls(x1);
        let x = [x1, w1 + t * (w2 - w1)];
        let y = flatten(&geom, x).unwrap();
        let back = unflatten(&geom, y);
        prop_assert!((back[1] - x[1]).abs() < 1e-13);
        prop_assert!((y[1] - t).abs() < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inlet_stream_function_carries_the_mass_flux((p, m) in smooth_profile()) {
        let cl = build_closure(&p, m, 0.05).unwrap();
        prop_assert!((cl.psi_minus.total() / m - 1.0).abs() < 1e-12);
        let mut prev = 0.0;
        for k in 1..=50 {
            let v = cl.psi_minus.psi(k as f64 / 50.0);
            prop_assert!(v > prev);
            prev = v;
        }
        // round trip through the inverse
        for k in 1..10 {
            let x = k as f64 / 10.0;
            prop_assert!((cl.psi_minus.inverse(cl.psi_minus.psi(x)) - x).abs() < 1e-10);
        }
    }

    #[test]
    fn inlet_is_subsonic_above_m_hat((p, m) in smooth_profile()) {
        let mh = m_hat(&p).unwrap();
        let mach = max_inlet_mach(&p, m).unwrap();
        prop_assert!(mach < 1.0);
        prop_assert!((max_inlet_mach(&p, mh).unwrap() - 1.0).abs() < 1e-10);
        let cl = build_closure(&p, m, 0.05).unwrap();
        for k in 0..=20 {
            let s = m * k as f64 / 20.0;
            prop_assert!(subsonic_criterion(&cl, s, 0.0));
        }
    }

    #[test]
    fn outlet_width_functional_increases((p, m) in smooth_profile()) {
        let (lo, hi) = outlet_pressure_bounds(&p, m).unwrap();
        prop_assert!(lo < hi);
        let mut prev = 0.0;
        for k in 1..10 {
            let j = j_eval(lo + (hi - lo) * k as f64 / 10.0, &p, m).unwrap();
            prop_assert!(j > prev);
            prev = j;
        }
    }
}
