//! Task orchestration. Each task validates its inputs, runs, writes its
//! artifacts and returns the run-report.

use std::sync::Arc;

use nozzleflow::asymptotics::{critical_pressure, outlet_state, streamline_critical_pressure};
use nozzleflow::continuation::{bers_sweep, ContinuationOptions};
use nozzleflow::discontinuity::{classify, eps_family, extract_gamma, field_distance, mollified_band};
use nozzleflow::error::{InletError, SolverError};
use nozzleflow::fields::{
    band_mask, continuity_residual, lagrangian_residual, max_principle_report, reconstruct, station_flux,
    theta_pressure_residual, to_lagrangian, transport_residual, vorticity_error, PrimitiveField,
};
use nozzleflow::geometry::NozzleGeometry;
use nozzleflow::inlet::{bernoulli_profile, build_closure, InletProfile, Side, StreamClosure};
use nozzleflow::limits::gamma_ladder;
use nozzleflow::solver::{extend_domain, monotonicity_check, solve_bounded, FlowField};

use crate::config::{Inlet, RunConfig};
use crate::output::{num, OutDir, Report};
use crate::RunError;

/// Finished task: its report and whether only part of a study succeeded.
pub struct Outcome {
    pub report: Report,
    pub partial: bool,
}

impl Outcome {
    fn full(report: Report) -> Self {
        Outcome { report, partial: false }
    }
}

fn polytropic(cfg: &RunConfig) -> Result<InletProfile, RunError> {
    match cfg.inlet()? {
        Inlet::Polytropic(p) => Ok(p),
        Inlet::Incompressible(_) => Err(RunError::Config("this task needs gas.mode = \"polytropic\"".into())),
    }
}

fn validate_profile(profile: &InletProfile, report: &mut Report) -> Result<(), RunError> {
    let warnings = profile.validate().map_err(RunError::from_inlet)?;
    report.check("C-INLET-POSITIVE", true, "u1 > 0 and S > 0 on the inlet");
    report.check("C-INLET-WALL-MONOTONE", true, "wall monotonicity of u1^2 S^(-1/gamma)");
    if !profile.jumps.is_empty() {
        report.check("C-INLET-JUMP-SIGN", warnings.is_empty(), warnings.join("; "));
    }
    for w in warnings {
        report.note(w);
    }
    Ok(())
}

/// Validated closure and its mass flux for either gas mode.
fn closure(cfg: &RunConfig, report: &mut Report) -> Result<StreamClosure, RunError> {
    match cfg.inlet()? {
        Inlet::Polytropic(profile) => {
            validate_profile(&profile, report)?;
            let m = cfg.mass_flux(&profile)?;
            report.check("C-INLET-SUBSONIC", true, format!("m = {} exceeds m_hat", num(m)));
            build_closure(&profile, m, cfg.solver.eps_cut).map_err(RunError::from_inlet)
        }
        Inlet::Incompressible(inc) => {
            inc.validate().map_err(RunError::from_inlet)?;
            report.check("C-INC-POSITIVE", true, "u1 > 0 and rho > 0 on the inlet");
            report.check("C-INC-WALL-MONOTONE", true, "wall monotonicity of rho u1^2");
            if !inc.jumps.is_empty() {
                report.check("C-INC-JUMP-SIGN", true, "one-sided jump conditions");
            }
            inc.build_closure().map_err(RunError::from_inlet)
        }
    }
}

fn solve(
    cfg: &RunConfig,
    geom: &NozzleGeometry,
    closure: StreamClosure,
    report: &mut Report,
) -> Result<FlowField, RunError> {
    let opts = cfg.solver.options();
    let closure = Arc::new(closure);
    let field = if cfg.solver.extend {
        let study = extend_domain(geom, closure, geom.l, &opts).map_err(RunError::from_solver)?;
        report.text("domain_lengths", study.lengths.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" "));
        report.text("domain_diffs", study.diffs.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" "));
        study.field
    } else {
        let (field, sr) = solve_bounded(geom, closure, geom.l, &opts).map_err(RunError::from_solver)?;
        report.text("iterations", sr.iterations.to_string());
        report.value("margin", sr.margin);
        report.text("cutoff_nodes", sr.cutoff_count.to_string());
        field
    };
    report.value("m", field.m);
    report.value("p_minus", field.closure.p_minus);
    report.value("residual", field.residual_norm);
    report.text("grid", format!("{}x{}", field.grid.nx, field.grid.ny));
    Ok(field)
}

fn dump_field(out: &OutDir, field: &FlowField, prim: &PrimitiveField) -> Result<(), RunError> {
    let g = &field.grid;
    out.table(
        "field.txt",
        &["x1", "x2", "psi", "rho", "u1", "u2", "p", "mach", "theta"],
        (0..g.len()).map(|k| {
            let x = g.x(k / g.ny, k % g.ny);
            vec![x[0], x[1], field.psi[k], prim.rho[k], prim.u1[k], prim.u2[k], prim.p[k], prim.mach[k], prim.theta[k]]
        }),
    )
}

fn field_checks(field: &FlowField, prim: &PrimitiveField, report: &mut Report) {
    let mono = monotonicity_check(field);
    report.check(
        "MONOTONE-PSI",
        mono.violations == 0 && mono.range_violations == 0,
        format!("min d(psi)/dx2 = {}", num(mono.min_dpsi_dx2)),
    );
    let qmin = prim.q.iter().cloned().fold(f64::INFINITY, f64::min);
    report.check("NONDEGENERATE-Q", qmin > 0.0 && prim.stagnation.is_empty(), format!("min q = {}", num(qmin)));
    let flux = station_flux(field, prim);
    let ferr = flux.iter().map(|v| ((v - field.m) / field.m).abs()).fold(0.0, f64::max);
    report.check("STATION-FLUX", ferr <= 1e-6, format!("max relative flux error = {}", num(ferr)));
    let (rb, rs) = transport_residual(field, prim);
    report.check("TRANSPORT-B-S", rb.max(rs) <= 1e-10, format!("B {} S {}", num(rb), num(rs)));
    let mp = max_principle_report(field, prim);
    report.check(
        "MAX-PRINCIPLE",
        mp.pass,
        format!("max|theta| on |x1| <= L = {} bound {}", num(mp.theta_inner), num(mp.theta_bound)),
    );
    report.check(
        "SUBSONIC",
        prim.clipped.is_empty(),
        format!("{} nodes reconstructed through the cut-off", prim.clipped.len()),
    );
}

pub fn run_solve(cfg: &RunConfig, out: &OutDir) -> Result<Outcome, RunError> {
    let mut report = Report::new("solve");
    let geom = cfg.geometry.build()?;
    let cl = closure(cfg, &mut report)?;
    if cl.has_jump {
        return Err(RunError::Validation("inlet data carry a jump; use the classify task".into()));
    }
    let field = solve(cfg, &geom, cl, &mut report)?;
    let prim = reconstruct(&field);
    field_checks(&field, &prim, &mut report);
    dump_field(out, &field, &prim)?;
    Ok(Outcome::full(report))
}

pub fn run_diagnose(cfg: &RunConfig, out: &OutDir) -> Result<Outcome, RunError> {
    let mut report = Report::new("diagnose");
    let geom = cfg.geometry.build()?;
    let cl = closure(cfg, &mut report)?;
    if cl.has_jump {
        return Err(RunError::Validation("inlet data carry a jump; use the classify task".into()));
    }
    let field = solve(cfg, &geom, cl, &mut report)?;
    let prim = reconstruct(&field);
    field_checks(&field, &prim, &mut report);
    let mask = band_mask(&field, None);
    report.value("continuity_residual", continuity_residual(&field, &prim, &mask));
    let tp = theta_pressure_residual(&field, &prim, &mask);
    report.value("theta_pressure_residual_first", tp.max_first);
    report.value("theta_pressure_residual_second", tp.max_second);
    report.value("vorticity_error", vorticity_error(&field, &prim, &mask));
    match to_lagrangian(&field, &prim) {
        Ok(lag) => {
            report.check(
                "LAGRANGIAN-ROUNDTRIP",
                lag.roundtrip_error < 1e-8,
                format!("error {}", num(lag.roundtrip_error)),
            );
            report.value("lagrangian_residual", lagrangian_residual(&field, &lag));
        }
        Err(e) => report.check("LAGRANGIAN-ROUNDTRIP", false, e.to_string()),
    }
    dump_field(out, &field, &prim)?;
    Ok(Outcome::full(report))
}

pub fn run_asymptotics(cfg: &RunConfig, out: &OutDir) -> Result<Outcome, RunError> {
    let mut report = Report::new("asymptotics");
    let geom = cfg.geometry.build()?;
    let profile = polytropic(cfg)?;
    validate_profile(&profile, &mut report)?;
    let m = cfg.mass_flux(&profile)?;
    let st = outlet_state(&profile, m, &geom).map_err(|e| RunError::Validation(e.to_string()))?;
    report.value("m", m);
    report.value("p_minus", st.p_minus);
    report.value("p_plus", st.p_plus);
    report.value("p_plus_lower", st.p_lower);
    report.value("p_plus_upper", st.p_upper);
    let crit =
        |r: Result<f64, _>| r.map_err(|e: nozzleflow::error::AsymptoticsError| RunError::Validation(e.to_string()));
    report.value("critical_pressure", crit(critical_pressure(&profile, m))?);
    report.value("streamline_critical_pressure", crit(streamline_critical_pressure(&profile, m))?);
    report.check("OUTLET-BRACKET", st.p_lower < st.p_plus && st.p_plus < st.p_upper, "p_lower < p_plus < p_upper");
    let end = st.x2_of_y(1.0);
    report.check("OUTLET-WIDTH", ((end - st.b) / (st.b - st.a)).abs() < 1e-8, format!("x2(1) = {}", num(end)));
    out.table(
        "outlet.txt",
        &["y", "x2", "u1_plus", "rho_plus"],
        (0..=100).map(|k| {
            let y = k as f64 / 100.0;
            vec![y, st.x2_of_y(y), st.u1_plus(y), st.rho_plus(y)]
        }),
    )?;
    Ok(Outcome::full(report))
}

fn sweep_options(cfg: &RunConfig, m_hat: f64) -> ContinuationOptions {
    let c = &cfg.continuation;
    ContinuationOptions {
        solve: cfg.solver.options(),
        l: cfg.geometry.l(),
        m_start: Some(c.start_factor * m_hat),
        shrink: c.shrink,
        bracket_tol: c.bracket_tol,
        eps: c.eps,
        levels: c.levels,
        ..ContinuationOptions::default()
    }
}

pub fn run_continuation(cfg: &RunConfig, out: &OutDir) -> Result<Outcome, RunError> {
    let mut report = Report::new("continuation");
    let geom = cfg.geometry.build()?;
    let profile = polytropic(cfg)?;
    validate_profile(&profile, &mut report)?;
    let mh = nozzleflow::inlet::m_hat(&profile).map_err(RunError::from_inlet)?;
    let res = bers_sweep(&geom, &profile, &sweep_options(cfg, mh)).map_err(RunError::from_solver)?;
    let (lo, hi) = res.m_c_bracket;
    report.value("m_hat", mh);
    report.value("m_c_lo", lo);
    report.value("m_c_hi", hi);
    report.value("margin_at_hi", res.margin_at_hi());
    report.text("terminal_kind", res.terminal_kind.to_string());
    report.check(
        "BRACKET-WIDTH",
        (hi - lo) / hi < cfg.continuation.bracket_tol,
        format!("relative width {}", num((hi - lo) / hi)),
    );
    let mut curve = res.margin_curve.clone();
    curve.sort_by(|a, b| b.0.total_cmp(&a.0));
    let monotone = curve.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-3);
    report.check("MARGIN-TREND", monotone, "margin nonincreasing as m decreases (slack 1e-3)");
    out.table("margin_curve.txt", &["m", "margin"], curve.iter().map(|&(m, g)| vec![m, g]))?;
    Ok(Outcome::full(report))
}

pub fn run_classify(cfg: &RunConfig, out: &OutDir) -> Result<Outcome, RunError> {
    let mut report = Report::new("classify");
    let geom = cfg.geometry.build()?;
    let profile = polytropic(cfg)?;
    validate_profile(&profile, &mut report)?;
    let Some(&x_d) = profile.jumps.first() else {
        return Err(RunError::Validation("classify needs inlet data with a jump".into()));
    };
    let m = cfg.mass_flux(&profile)?;
    let bern = bernoulli_profile(&profile, m).map_err(RunError::from_inlet)?;
    let jb = bern.eval2(x_d, Side::Right).0 - bern.eval2(x_d, Side::Left).0;
    let js = profile.sm.eval2(x_d, Side::Right).0 - profile.sm.eval2(x_d, Side::Left).0;
    report.value("inlet_jump_B", jb);
    report.value("inlet_jump_S", js);
    let mut eps = cfg.discontinuity.eps.clone();
    eps.sort_by(|a, b| b.total_cmp(a));
    let fam = eps_family(&geom, &profile, m, &eps, cfg.solver.eps_cut, geom.l, &cfg.solver.options());
    for (e, msg) in &fam.failures {
        report.note(format!("eps {} failed: {msg}", num(*e)));
    }
    let mut prev: Option<&FlowField> = None;
    let mut rows = Vec::new();
    for (k, (e, field)) in fam.members.iter().enumerate() {
        let prim = reconstruct(field);
        let m_d = field.closure.m_d.expect("jump data carry m_d");
        let rep = extract_gamma(field, m_d)
            .and_then(|r| classify(field, &prim, r, mollified_band(field, x_d, *e)))
            .map_err(|err| RunError::Convergence(err.to_string()))?;
        let (mb, ms) = rep.mean_jumps();
        let dist = prev.map_or(f64::NAN, |p| field_distance(p, field));
        rows.push(vec![
            *e,
            mb,
            ms,
            rep.max_pressure_jump(field.closure.p_minus),
            rep.lipschitz_estimate,
            rep.wall_distance,
            dist,
        ]);
        report.text(&format!("classification_eps{k}"), rep.classification.to_string());
        if k + 1 == fam.members.len() {
            out.table("gamma.txt", &["x1", "x2"], rep.gamma_polyline.iter().map(|p| vec![p[0], p[1]]))?;
            out.table(
                "traces.txt",
                &["x1", "p_below", "p_above", "B_below", "B_above", "S_below", "S_above", "jump_ut"],
                rep.traces.iter().zip(&rep.gamma_polyline).map(|(t, p)| {
                    vec![p[0], t.below.p, t.above.p, t.below.b, t.above.b, t.below.s, t.above.s, t.jump_ut]
                }),
            )?;
            report.text("classification", rep.classification.to_string());
            report.check(
                "PRESSURE-CONTINUITY",
                rep.max_pressure_jump(field.closure.p_minus) < 1e-2,
                format!("max |[p]|/p_minus = {}", num(rep.max_pressure_jump(field.closure.p_minus))),
            );
            report.check(
                "SHEET-SLOPE",
                rep.lipschitz_estimate <= rep.slope_bound + 1e-2,
                format!("slope {} bound {}", num(rep.lipschitz_estimate), num(rep.slope_bound)),
            );
            report.check("SHEET-WALL-GAP", rep.wall_bound_ok(m), format!("distance {}", num(rep.wall_distance)));
        }
        prev = Some(field);
    }
    out.table(
        "family.txt",
        &["eps", "jump_B", "jump_S", "max_jump_p", "lipschitz", "wall_distance", "distance_prev"],
        rows,
    )?;
    Ok(Outcome { report, partial: !fam.is_complete() })
}

pub fn run_limits_gamma(cfg: &RunConfig, out: &OutDir) -> Result<Outcome, RunError> {
    let mut report = Report::new("limits-gamma");
    let geom = cfg.geometry.build()?;
    let Inlet::Incompressible(inc) = cfg.inlet()? else {
        return Err(RunError::Config("gamma limits need gas.mode = \"incompressible\" data".into()));
    };
    if !inc.jumps.is_empty() {
        return Err(RunError::Validation("the gamma ladder needs smooth data; mollify the jump first".into()));
    }
    let lad = gamma_ladder(&geom, &inc, &cfg.limits.gammas, cfg.solver.eps_cut, geom.l, &cfg.solver.options())
        .map_err(RunError::from_solver)?;
    report.check("C-INC-POSITIVE", true, "u1 > 0 and rho > 0 on the inlet");
    report.check("C-INC-WALL-MONOTONE", true, "wall monotonicity of rho u1^2");
    for (g, r) in &lad.members {
        if let Err(e) = r {
            report.note(format!("gamma {} failed: {e}", num(*g)));
        }
    }
    report.check("LADDER-MONOTONE", lad.monotone(1e-10), "distance to the incompressible field nonincreasing in gamma");
    out.table("ladder.txt", &["gamma", "distance"], lad.distances.iter().map(|&(g, d)| vec![g, d]))?;
    Ok(Outcome { report, partial: !lad.is_complete() })
}

pub fn run_limits_sonic(cfg: &RunConfig, out: &OutDir) -> Result<Outcome, RunError> {
    let mut report = Report::new("limits-sonic");
    let geom = cfg.geometry.build()?;
    let profile = polytropic(cfg)?;
    validate_profile(&profile, &mut report)?;
    let mh = nozzleflow::inlet::m_hat(&profile).map_err(RunError::from_inlet)?;
    let res = bers_sweep(&geom, &profile, &sweep_options(cfg, mh)).map_err(RunError::from_solver)?;
    let mut gaps = res.sonic_gap_curve.clone();
    gaps.sort_by(|a, b| b.0.total_cmp(&a.0));
    report.value("m_c_lo", res.m_c_bracket.0);
    report.value("m_c_hi", res.m_c_bracket.1);
    report.check("SUBSONIC-LADDER", gaps.iter().all(|g| g.1 < 0.0), "sup(q^2 - c^2) < 0 for every accepted m");
    let last = gaps.last().map_or(f64::NAN, |g| g.1);
    let top = gaps.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
    report.check("SONIC-TREND", last >= top, format!("sup(q^2 - c^2) at m_hi = {}", num(last)));
    out.table("sonic_gap.txt", &["m", "sup_q2_minus_c2"], gaps.iter().map(|&(m, g)| vec![m, g]))?;
    Ok(Outcome::full(report))
}

impl RunError {
    pub fn from_inlet(e: InletError) -> Self {
        RunError::Validation(e.to_string())
    }

    pub fn from_solver(e: SolverError) -> Self {
        match e {
            SolverError::Parameter(_) | SolverError::Geometry(_) | SolverError::Inlet(_) => {
                RunError::Validation(e.to_string())
            }
            _ => RunError::Convergence(e.to_string()),
        }
    }
}
