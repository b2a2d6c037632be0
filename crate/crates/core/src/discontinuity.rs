//! Captured discontinuities. The jump data are mollified, each member of the
//! ε-family is solved as a smooth flow, and the level set `ψ = m_d` is read
//! off as the sheet `Γ`. One-sided traces then decide between a vortex sheet
//! (`[B] ≠ 0`) and an entropy wave (`[S] ≠ 0`).

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{DiscontinuityError, SolverError};
use crate::fields::PrimitiveField;
use crate::geometry::NozzleGeometry;
use crate::inlet::{build_closure, mollify, InletProfile};
use crate::solver::{solve_bounded, FlowField, SolveOptions};

/// Converged members of an ε-family, plus the ones that failed.
#[derive(Debug, Clone)]
pub struct FamilyResult {
    pub members: Vec<(f64, FlowField)>,
    pub failures: Vec<(f64, String)>,
}

impl FamilyResult {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Solve the mollified problem for every `ε` in `eps_list` on a common grid.
/// Smooth profiles are solved unmollified for every member.
pub fn eps_family(
    geom: &NozzleGeometry,
    profile: &InletProfile,
    m: f64,
    eps_list: &[f64],
    eps_cut: f64,
    l: f64,
    opts: &SolveOptions,
) -> FamilyResult {
    let runs: Vec<(f64, Result<FlowField, String>)> = eps_list
        .par_iter()
        .map(|&eps| {
            let run = || -> Result<FlowField, SolverError> {
                let p = if profile.jumps.is_empty() { profile.clone() } else { mollify(profile, eps)? };
                let closure = build_closure(&p, m, eps_cut)?;
                Ok(solve_bounded(geom, Arc::new(closure), l, opts)?.0)
            };
            (eps, run().map_err(|e| e.to_string()))
        })
        .collect();
    let mut out = FamilyResult { members: Vec::new(), failures: Vec::new() };
    for (eps, r) in runs {
        match r {
            Ok(f) => out.members.push((eps, f)),
            Err(e) => out.failures.push((eps, e)),
        }
    }
    out
}

/// Max-norm distance between two fields on the same grid, over the window
/// `|y₁| ≤ L` where truncation effects have decayed.
pub fn field_distance(a: &FlowField, b: &FlowField) -> f64 {
    let ny = a.grid.ny;
    window(a).flat_map(|i| (0..ny).map(move |j| i * ny + j)).map(|k| (a.psi[k] - b.psi[k]).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SheetKind {
    VortexSheet,
    EntropyWave,
    Mixed,
    Degenerate,
}

impl std::fmt::Display for SheetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SheetKind::VortexSheet => "vortex-sheet",
            SheetKind::EntropyWave => "entropy-wave",
            SheetKind::Mixed => "mixed",
            SheetKind::Degenerate => "degenerate",
        })
    }
}

/// One-sided state at `Γ`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Trace {
    pub rho: f64,
    pub u1: f64,
    pub u2: f64,
    pub p: f64,
    pub b: f64,
    pub s: f64,
}

/// Traces and jump brackets `[·] = above − below` at one column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnTraces {
    pub column: usize,
    pub below: Trace,
    pub above: Trace,
    pub jump_p: f64,
    pub jump_b: f64,
    pub jump_s: f64,
    pub jump_ut: f64,
    /// Tolerances for `[p], [B], [S], [u·τ]`.
    pub tol: [f64; 4],
    pub kind: SheetKind,
}

#[derive(Debug, Clone)]
pub struct DiscontinuityReport {
    pub m_d: f64,
    /// Columns of the window `|y₁| ≤ L` carrying a crossing.
    pub columns: Vec<usize>,
    /// Physical crossing points of `ψ = m_d`.
    pub gamma_polyline: Vec<[f64; 2]>,
    /// Max slope between adjacent crossings.
    pub lipschitz_estimate: f64,
    /// `tan θ_B` of the walls.
    pub slope_bound: f64,
    pub distance_lower: f64,
    pub distance_upper: f64,
    pub wall_distance: f64,
    /// max |∇ψ| over the window; bounds the wall gaps from below by
    /// `m_d/C` and `(m − m_d)/C`.
    pub grad_max: f64,
    /// Window nodes with `|ψ − m_d| < 1e-6 m` and `q` below the floor.
    pub stagnant_sheet_nodes: usize,
    pub traces: Vec<ColumnTraces>,
    pub classification: SheetKind,
}

impl DiscontinuityReport {
    /// Both gaps respect `m_d/C` and `(m − m_d)/C` with `C = grad_max`.
    pub fn wall_bound_ok(&self, m: f64) -> bool {
        self.distance_lower >= self.m_d / self.grad_max * (1.0 - 1e-9)
            && self.distance_upper >= (m - self.m_d) / self.grad_max * (1.0 - 1e-9)
    }

    /// `max |[p]|` over classified columns, relative to `p_ref`.
    pub fn max_pressure_jump(&self, p_ref: f64) -> f64 {
        self.traces.iter().map(|t| t.jump_p.abs() / p_ref).fold(0.0, f64::max)
    }

    pub fn mean_jumps(&self) -> (f64, f64) {
        let n = self.traces.len().max(1) as f64;
        (self.traces.iter().map(|t| t.jump_b).sum::<f64>() / n, self.traces.iter().map(|t| t.jump_s).sum::<f64>() / n)
    }
}

fn window(field: &FlowField) -> impl Iterator<Item = usize> + '_ {
    let g = &field.grid;
    (1..g.nx - 1).filter(move |&i| g.y1[i].abs() <= g.l + 1e-12)
}

/// Cubic through the four nodes around cell `j` evaluated at `y`.
fn column_cubic(field: &FlowField, i: usize, j: usize, y: f64) -> f64 {
    let g = &field.grid;
    let j0 = j.saturating_sub(1).min(g.ny - 4);
    let mut v = 0.0;
    for a in j0..j0 + 4 {
        let mut w = 1.0;
        for b in j0..j0 + 4 {
            if a != b {
                w *= (y - g.y2[b]) / (g.y2[a] - g.y2[b]);
            }
        }
        v += w * field.at(i, a);
    }
    v
}

/// Cell `j` and flattened height of the `ψ = m_d` crossing in column `i`.
fn crossing(field: &FlowField, i: usize, m_d: f64) -> Result<(usize, f64), DiscontinuityError> {
    let g = &field.grid;
    let j = (0..g.ny - 1)
        .find(|&j| field.at(i, j) <= m_d && m_d < field.at(i, j + 1))
        .ok_or(DiscontinuityError::NoCrossing { column: i, x1: g.y1[i], m_d })?;
    let (mut lo, mut hi) = (g.y2[j], g.y2[j + 1]);
    let flo = column_cubic(field, i, j, lo) - m_d;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if (column_cubic(field, i, j, mid) - m_d) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((j, 0.5 * (lo + hi)))
}

/// Locate `Γ = {ψ = m_d}` column by column over the window.
pub fn extract_gamma(field: &FlowField, m_d: f64) -> Result<DiscontinuityReport, DiscontinuityError> {
    let g = &field.grid;
    if !(m_d > 0.0 && m_d < field.m) {
        return Err(DiscontinuityError::Parameter(format!("m_d = {m_d} must lie in (0, {})", field.m)));
    }
    let mut columns = Vec::new();
    let mut poly = Vec::new();
    let (mut dl, mut du) = (f64::INFINITY, f64::INFINITY);
    for i in window(field) {
        let (_, y) = crossing(field, i, m_d)?;
        let cm = &g.cols[i];
        let x2 = cm.x2(y);
        dl = dl.min(x2 - cm.w1);
        du = du.min(cm.w1 + cm.h - x2);
        columns.push(i);
        poly.push([g.y1[i], x2]);
    }
    let lipschitz_estimate =
        poly.windows(2).map(|w| ((w[1][1] - w[0][1]) / (w[1][0] - w[0][0])).abs()).fold(0.0, f64::max);
    let grad = crate::fields::gradients(field);
    let grad_max = window(field)
        .flat_map(|i| (0..g.ny).map(move |j| (i, j)))
        .map(|(i, j)| {
            let d = grad[g.index(i, j)];
            d[0].hypot(d[1])
        })
        .fold(0.0, f64::max);
    Ok(DiscontinuityReport {
        m_d,
        columns,
        gamma_polyline: poly,
        lipschitz_estimate,
        slope_bound: field.geom.theta_b().tan(),
        distance_lower: dl,
        distance_upper: du,
        wall_distance: dl.min(du),
        grad_max,
        stagnant_sheet_nodes: 0,
        traces: Vec::new(),
        classification: SheetKind::Degenerate,
    })
}

fn quad_extrapolate(ys: [f64; 3], vs: [f64; 3], y: f64) -> (f64, f64) {
    let mut q = 0.0;
    for a in 0..3 {
        let mut w = 1.0;
        for b in 0..3 {
            if a != b {
                w *= (y - ys[b]) / (ys[a] - ys[b]);
            }
        }
        q += w * vs[a];
    }
    let lin = vs[0] + (vs[1] - vs[0]) * (y - ys[0]) / (ys[1] - ys[0]);
    (q, (q - lin).abs())
}

/// Complete the report with one-sided traces and the classification.
///
/// `band` is the ψ-interval of the mollification layer; nodes inside it are
/// never used, and traces are extrapolated quadratically from the second to
/// fourth clean nodes on each side, along the flattened vertical.
pub fn classify(
    field: &FlowField,
    prim: &PrimitiveField,
    mut report: DiscontinuityReport,
    band: (f64, f64),
) -> Result<DiscontinuityReport, DiscontinuityError> {
    let g = &field.grid;
    let cl = &field.closure;
    let m_d = report.m_d;
    let (blo, bhi) = (band.0.min(m_d), band.1.max(m_d));
    let slopes: Vec<f64> = (0..report.gamma_polyline.len())
        .map(|k| {
            let a = report.gamma_polyline[k.saturating_sub(1)];
            let b = report.gamma_polyline[(k + 1).min(report.gamma_polyline.len() - 1)];
            (b[1] - a[1]) / (b[0] - a[0])
        })
        .collect();
    let bs = |k: usize| {
        let v = cl.values(field.psi[k]);
        (v.b, v.s)
    };
    let p_ref = cl.p_minus.abs();
    let mut traces = Vec::new();
    for (n, &i) in report.columns.iter().enumerate() {
        let (_, yc) = crossing(field, i, m_d)?;
        let jb = (0..g.ny).rev().find(|&j| field.at(i, j) < blo).map(|j| j.saturating_sub(1));
        let ja = (0..g.ny).find(|&j| field.at(i, j) > bhi).map(|j| j + 1);
        let (Some(jb), Some(ja)) = (jb, ja) else {
            return Err(DiscontinuityError::Trace { column: i, detail: "sheet band touches a wall".into() });
        };
        if jb < 2 || ja + 2 >= g.ny {
            return Err(DiscontinuityError::Trace {
                column: i,
                detail: format!("fewer than three clean nodes beyond the band (below {jb}, above {ja})"),
            });
        }
        let side = |js: [usize; 3]| {
            let ys = js.map(|j| g.y2[j]);
            let ks = js.map(|j| g.index(i, j));
            let ext = |f: &dyn Fn(usize) -> f64| quad_extrapolate(ys, ks.map(f), yc);
            let (rho, r0) = ext(&|k| prim.rho[k]);
            let (u1, r1) = ext(&|k| prim.u1[k]);
            let (u2, r2) = ext(&|k| prim.u2[k]);
            let (p, r3) = ext(&|k| prim.p[k]);
            let (b, r4) = ext(&|k| bs(k).0);
            let (s, r5) = ext(&|k| bs(k).1);
            (Trace { rho, u1, u2, p, b, s }, [r3, r4, r5, r0.max(r1).max(r2)])
        };
        let (below, rb) = side([jb, jb - 1, jb - 2]);
        let (above, ra) = side([ja, ja + 1, ja + 2]);
        let norm = slopes[n].hypot(1.0);
        let tau = [1.0 / norm, slopes[n] / norm];
        let ut = |t: &Trace| t.u1 * tau[0] + t.u2 * tau[1];
        let scale = [
            p_ref,
            0.5 * (below.b.abs() + above.b.abs()),
            0.5 * (below.s.abs() + above.s.abs()),
            0.5 * (ut(&below).abs() + ut(&above).abs()),
        ];
        let mut tol = [0.0; 4];
        for q in 0..4 {
            tol[q] = (5.0 * rb[q].max(ra[q])).max(1e-3 * scale[q]);
        }
        let jump_b = above.b - below.b;
        let jump_s = above.s - below.s;
        let kind = match (jump_b.abs() > tol[1], jump_s.abs() > tol[2]) {
            (true, false) => SheetKind::VortexSheet,
            (false, true) => SheetKind::EntropyWave,
            (true, true) => SheetKind::Mixed,
            (false, false) => SheetKind::Degenerate,
        };
        traces.push(ColumnTraces {
            column: i,
            below,
            above,
            jump_p: above.p - below.p,
            jump_b,
            jump_s,
            jump_ut: ut(&above) - ut(&below),
            tol,
            kind,
        });
    }
    let count = |k: SheetKind| traces.iter().filter(|t| t.kind == k).count();
    report.classification = [SheetKind::VortexSheet, SheetKind::EntropyWave, SheetKind::Mixed, SheetKind::Degenerate]
        .into_iter()
        .max_by_key(|&k| count(k))
        .unwrap_or(SheetKind::Degenerate);
    let q_floor = 1e-3 * prim.q.iter().cloned().fold(0.0, f64::max);
    report.stagnant_sheet_nodes = window(field)
        .flat_map(|i| (0..g.ny).map(move |j| g.index(i, j)))
        .filter(|&k| (field.psi[k] - m_d).abs() < 1e-6 * field.m && prim.q[k] < q_floor)
        .count();
    report.traces = traces;
    Ok(report)
}

/// ψ-interval of the mollification layer of a field built from mollified data.
pub fn mollified_band(field: &FlowField, x_d: f64, eps: f64) -> (f64, f64) {
    let t = &field.closure.psi_minus;
    (t.psi(x_d - eps), t.psi(x_d + eps))
}
