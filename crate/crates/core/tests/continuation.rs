mod common;

use common::*;
use nozzleflow::continuation::*;
use nozzleflow::geometry::NozzleGeometry;
use nozzleflow::inlet::*;

#[test]
fn uniform_margin_has_the_closed_form() {
    let prof = InletProfile::constant(1.0, 1.0, 1.4);
    let mh = m_hat(&prof).unwrap();
    let mut prev = f64::NEG_INFINITY;
    for factor in [1.5, 3.0, 10.0, 40.0] {
        let m = factor * mh;
        let f = solve(&NozzleGeometry::straight(2.5), &prof, m, 41, 11);
        // uniform stream: ρ = m, B = ½ + m^{γ−1}, S = 1
        let q_sonic = sonic_flux_oracle(0.5 + m.powf(0.4), 1.0, 1.4);
        let want = 1.0 - m / q_sonic;
        assert!((margin(&f) - want).abs() < 1e-9, "m/m_hat = {factor}: {} vs {want}", margin(&f));
        assert!(margin(&f) > prev);
        assert!(sonic_gap(&f) < 0.0);
        prev = margin(&f);
    }
}

#[test]
fn straight_bracket_is_schedule_independent() {
    let prof = InletProfile::constant(1.0, 1.0, 1.4);
    let oracle = choking_flux_oracle(1.0, 1.0, 1.4);
    for shrink in [0.85, 0.7] {
        let opts = ContinuationOptions { shrink, ..Default::default() };
        let r = bers_sweep(&NozzleGeometry::straight(2.5), &prof, &opts).unwrap();
        let (lo, hi) = r.m_c_bracket;
        assert!(lo <= oracle && oracle <= hi, "shrink {shrink}: ({lo}, {hi}) vs {oracle}");
        assert!((hi - lo) / hi < 1e-3);
        assert_eq!(r.terminal_kind, TerminalKind::SonicApproach);
        assert!(r.margin_curve.iter().all(|(_, mg)| *mg > 0.0));
        assert!(r.sonic_gap_curve.iter().all(|(_, g)| *g < 0.0));
    }
}

#[test]
fn rejects_bad_schedules() {
    let prof = InletProfile::constant(1.0, 1.0, 1.4);
    let opts = ContinuationOptions { shrink: 1.2, ..Default::default() };
    assert!(bers_sweep(&NozzleGeometry::straight(2.5), &prof, &opts).is_err());
}
