mod common;

use common::*;
use nozzleflow::discontinuity::*;
use nozzleflow::fields::reconstruct;
use nozzleflow::geometry::NozzleGeometry;
use nozzleflow::solver::SolveOptions;

#[test]
fn straight_nozzle_sheet_stays_on_its_level() {
    // parallel flow: Γ is the horizontal line x₂ = x_d
    let (prof, m) = bernoulli_jump();
    let geom = NozzleGeometry::straight(2.5);
    let opts = SolveOptions { nx: 81, ny: 81, ..Default::default() };
    let fam = eps_family(&geom, &prof, m, &[0.04], 0.05, 2.5, &opts);
    assert!(fam.is_complete(), "{:?}", fam.failures);
    let (eps, f) = &fam.members[0];
    let md = f.closure.m_d.unwrap();
    let rep = extract_gamma(f, md).unwrap();
    for [x1, x2] in &rep.gamma_polyline {
        if x1.abs() <= 2.5 {
            assert!((x2 - 0.5).abs() < 2e-3, "x1 = {x1}: x2 = {x2}");
        }
    }
    assert!(rep.lipschitz_estimate < 1e-2);
    let rep = classify(f, &reconstruct(f), rep, mollified_band(f, 0.5, *eps)).unwrap();
    assert_eq!(rep.classification, SheetKind::VortexSheet);
    assert!(rep.wall_bound_ok(m));
}

#[test]
fn smooth_data_carry_no_sheet() {
    let prof = sheared(1.4);
    let m = 60.0 * nozzleflow::inlet::m_hat(&prof).unwrap();
    let f = solve(&contraction(), &prof, m, 81, 41);
    let md = 0.5 * m;
    let rep = extract_gamma(&f, md).unwrap();
    let band = (0.45 * m, 0.55 * m);
    let rep = classify(&f, &reconstruct(&f), rep, band).unwrap();
    assert_eq!(rep.classification, SheetKind::Degenerate);
}

#[test]
fn family_members_share_the_grid_and_converge_in_eps() {
    // at a row spacing resolving every ε, successive distances shrink
    let (prof, m) = bernoulli_jump();
    let opts = SolveOptions { nx: 81, ny: 161, ..Default::default() };
    let fam = eps_family(&contraction(), &prof, m, &[0.08, 0.04, 0.02], 0.05, 2.5, &opts);
    assert!(fam.is_complete(), "{:?}", fam.failures);
    let d: Vec<f64> = fam.members.windows(2).map(|w| field_distance(&w[0].1, &w[1].1)).collect();
    assert!(d[1] < d[0], "{d:?}");
}

#[test]
fn missing_level_is_reported() {
    let (prof, m) = bernoulli_jump();
    let fam = eps_family(
        &contraction(),
        &prof,
        m,
        &[0.04],
        0.05,
        2.5,
        &SolveOptions { nx: 41, ny: 41, ..Default::default() },
    );
    let f = &fam.members[0].1;
    assert!(extract_gamma(f, 2.0 * m).is_err());
}
