//! Continuation in the mass flux towards the critical value `m_c` below which
//! no strictly subsonic flow exists.
//!
//! At each `m` the cut-off problem is solved for a decreasing sequence
//! `ε_j = ε·2^{−j}`; the flow is accepted once the margin clears `2ε_j`, where
//! the cut-off is inactive and the field solves the physical problem.

use std::sync::Arc;

use crate::closure::qhat;
use crate::error::{InletError, SolverError};
use crate::fields::{gradients, reconstruct};
use crate::geometry::NozzleGeometry;
use crate::inlet::{build_closure, m_hat, InletProfile, StreamClosure};
use crate::solver::{solve_bounded, FlowField, SolveOptions};

/// `sup (q² − c²)` over all nodes; negative iff every node is subsonic.
pub fn sonic_gap(field: &FlowField) -> f64 {
    let prim = reconstruct(field);
    prim.q
        .iter()
        .zip(&prim.mach)
        .filter(|(_, &mach)| mach > 0.0)
        .map(|(&q, &mach)| q * q * (1.0 - 1.0 / (mach * mach)))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `min 1 − |∇ψ|/Q̂(ψ)` over all nodes; positive iff the flow is strictly subsonic.
pub fn margin(field: &FlowField) -> f64 {
    gradients(field)
        .iter()
        .zip(&field.psi)
        .map(|(g, &s)| 1.0 - g[0].hypot(g[1]) / qhat(&field.closure, s))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalKind {
    /// The margin of accepted fields tends to zero at the bracket.
    SonicApproach,
    /// Picard fails while the margin stays bounded away from zero.
    SolverBreakdown,
}

impl std::fmt::Display for TerminalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TerminalKind::SonicApproach => "sonic-approach",
            TerminalKind::SolverBreakdown => "solver-breakdown",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ContinuationOptions {
    pub solve: SolveOptions,
    /// Truncation half length; the strip is `[−2L, 2L]`.
    pub l: f64,
    /// Starting mass flux; `None` uses `40 m̂`.
    pub m_start: Option<f64>,
    /// Geometric factor for the downward sweep.
    pub shrink: f64,
    /// Relative width at which bisection stops.
    pub bracket_tol: f64,
    /// Base cut-off `ε`.
    pub eps: f64,
    /// Number of schedule levels `j = 0..levels`.
    pub levels: usize,
    pub max_steps: usize,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            solve: SolveOptions { nx: 81, ny: 21, ..SolveOptions::default() },
            l: 2.5,
            m_start: None,
            shrink: 0.85,
            bracket_tol: 1e-3,
            eps: 0.05,
            levels: 40,
            max_steps: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContinuationResult {
    /// `(m_lo, m_hi)`: failure at `m_lo`, acceptance at `m_hi`.
    pub m_c_bracket: (f64, f64),
    /// Accepted `(m, margin)` pairs in the order visited.
    pub margin_curve: Vec<(f64, f64)>,
    pub terminal_kind: TerminalKind,
    /// Accepted `(m, sup(q² − c²))` pairs, parallel to `margin_curve`.
    pub sonic_gap_curve: Vec<(f64, f64)>,
    /// Schedule level that accepted `m_hi`.
    pub level_at_hi: usize,
    pub m_hat: f64,
}

impl ContinuationResult {
    pub fn margin_at_hi(&self) -> f64 {
        let hi = self.m_c_bracket.1;
        self.margin_curve.iter().find(|(m, _)| *m == hi).map_or(f64::NAN, |p| p.1)
    }
}

enum Attempt {
    Accepted {
        field: FlowField,
        margin: f64,
        level: usize,
    },
    /// No level cleared its threshold.
    Sonic,
    Breakdown,
    Infeasible,
}

struct Sweep<'a> {
    geom: &'a NozzleGeometry,
    profile: &'a InletProfile,
    opts: &'a ContinuationOptions,
}

impl Sweep<'_> {
    fn eps(&self, j: usize) -> f64 {
        self.opts.eps * 0.5f64.powi(j as i32)
    }

    fn solve(&self, closure: &StreamClosure, eps: f64, init: Option<Vec<f64>>) -> Result<FlowField, SolverError> {
        let mut c = closure.clone();
        c.eps_cut = eps;
        let opts = SolveOptions { initial: init, ..self.opts.solve.clone() };
        solve_bounded(self.geom, Arc::new(c), self.opts.l, &opts).map(|(f, _)| f)
    }

    /// Run the schedule at `m` from level `j0`, warm-started from `warm`.
    fn attempt(&self, m: f64, j0: usize, warm: Option<&FlowField>) -> Result<Attempt, SolverError> {
        let closure = match build_closure(self.profile, m, self.opts.eps) {
            Ok(c) => c,
            Err(InletError::Condition { .. }) => return Ok(Attempt::Infeasible),
            Err(e) => return Err(e.into()),
        };
        let mut init = warm.map(|f| f.psi.iter().map(|p| p * m / f.m).collect::<Vec<_>>());
        for j in j0..self.opts.levels {
            let eps = self.eps(j);
            let field = match self.solve(&closure, eps, init.clone()) {
                Ok(f) => f,
                Err(SolverError::NonConvergence { .. }) => match self.solve(&closure, eps, None) {
                    Ok(f) => f,
                    Err(SolverError::NonConvergence { .. }) => return Ok(Attempt::Breakdown),
                    Err(e) => return Err(e),
                },
                Err(e) => return Err(e),
            };
            let mu = margin(&field);
            if mu >= 2.0 * eps {
                return Ok(Attempt::Accepted { field, margin: mu, level: j });
            }
            init = Some(field.psi);
        }
        Ok(Attempt::Sonic)
    }
}

/// Sweep `m` downwards geometrically until acceptance fails, then bisect the
/// last (failure, acceptance) pair to relative width `opts.bracket_tol`.
pub fn bers_sweep(
    geom: &NozzleGeometry,
    profile: &InletProfile,
    opts: &ContinuationOptions,
) -> Result<ContinuationResult, SolverError> {
    if !(opts.shrink > 0.0 && opts.shrink < 1.0 && opts.bracket_tol > 0.0 && opts.levels > 0) {
        return Err(SolverError::Parameter(
            "shrink must lie in (0, 1); bracket_tol and levels must be positive".into(),
        ));
    }
    let mh = m_hat(profile)?;
    let sweep = Sweep { geom, profile, opts };
    let m0 = opts.m_start.unwrap_or(40.0 * mh);
    let mut curve = Vec::new();
    let mut gaps = Vec::new();
    let (mut hi, mut hi_field, mut level) = match sweep.attempt(m0, 0, None)? {
        Attempt::Accepted { field, margin, level } => {
            curve.push((m0, margin));
            gaps.push((m0, sonic_gap(&field)));
            (m0, field, level)
        }
        _ => return Err(SolverError::Parameter(format!("starting mass flux {m0} is not accepted; raise m_start"))),
    };
    let mut steps = 0;
    let mut fail = None;
    let mut lo = hi;
    while fail.is_none() {
        steps += 1;
        if steps > opts.max_steps {
            return Err(SolverError::Parameter("continuation exceeded max_steps without a failure".into()));
        }
        lo = hi * opts.shrink;
        match sweep.attempt(lo, level, Some(&hi_field))? {
            Attempt::Accepted { field, margin, level: j } => {
                curve.push((lo, margin));
                gaps.push((lo, sonic_gap(&field)));
                hi = lo;
                hi_field = field;
                level = j;
            }
            other => fail = Some(other),
        }
    }
    let mut fail = fail.unwrap();
    while (hi - lo) / hi >= opts.bracket_tol {
        steps += 1;
        if steps > opts.max_steps {
            return Err(SolverError::Parameter("continuation exceeded max_steps during bisection".into()));
        }
        let mid = 0.5 * (lo + hi);
        match sweep.attempt(mid, level, Some(&hi_field))? {
            Attempt::Accepted { field, margin, level: j } => {
                curve.push((mid, margin));
                gaps.push((mid, sonic_gap(&field)));
                hi = mid;
                hi_field = field;
                level = j;
            }
            other => {
                lo = mid;
                fail = other;
            }
        }
    }
    let m_hi_margin = curve.iter().find(|(m, _)| *m == hi).map_or(f64::NAN, |p| p.1);
    let terminal_kind = match fail {
        Attempt::Breakdown if m_hi_margin >= 0.02 => TerminalKind::SolverBreakdown,
        _ => TerminalKind::SonicApproach,
    };
    Ok(ContinuationResult {
        m_c_bracket: (lo, hi),
        margin_curve: curve,
        sonic_gap_curve: gaps,
        terminal_kind,
        level_at_hi: level,
        m_hat: mh,
    })
}
