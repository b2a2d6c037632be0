//! Picard iteration for the stream-function equation on the flattened
//! truncated strip, and L-doubling towards the infinite nozzle. Iterates are
//! damped and Anderson-mixed.
//!
//! Each iteration freezes the coefficients at the current iterate, assembles
//! the nine-point operator in flattened coordinates and solves it with a
//! banded LU factorization. Walls carry `ψ = 0` and `ψ = m`; the artificial
//! ends carry `ψ = m·y₂`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::closure::{coefficients_from_values, CutoffState};
use crate::error::SolverError;
use crate::geometry::{truncate, Grid, NozzleGeometry};
use crate::inlet::{StreamClosure, StreamValues};
use crate::numerics::BandMatrix;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub nx: usize,
    pub ny: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Iterations without a 10% residual improvement before giving up.
    pub plateau: usize,
    pub domain_tol: f64,
    pub max_doublings: usize,
    /// Warm start on the same grid.
    pub initial: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            nx: 201,
            ny: 41,
            tol: 1e-10,
            max_iter: 500,
            plateau: 50,
            domain_tol: 1e-8,
            max_doublings: 3,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub damping: Vec<f64>,
    pub residuals: Vec<f64>,
    /// min over interior nodes of `1 − |∇ψ|/Q̂`.
    pub margin: f64,
    pub cutoff_count: usize,
    pub converged: bool,
}

/// Converged nodal stream function on a flattened grid.
#[derive(Debug, Clone)]
pub struct FlowField {
    pub geom: NozzleGeometry,
    pub grid: Grid,
    pub psi: Vec<f64>,
    pub m: f64,
    pub closure: Arc<StreamClosure>,
    pub cut: CutoffState,
    pub residual_norm: f64,
}

impl FlowField {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.psi[self.grid.index(i, j)]
    }
}

/// Transformed coefficients `A Ψ₁₁ + B Ψ₁₂ + C Ψ₂₂ + D Ψ₂ = F` at one node.
#[derive(Debug, Clone, Copy, Default)]
struct NodeCoef {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    f: f64,
    margin: f64,
    cut: bool,
}

fn boundary_value(grid: &Grid, m: f64, i: usize, j: usize) -> Option<f64> {
    if j == 0 {
        Some(0.0)
    } else if j + 1 == grid.ny {
        Some(m)
    } else if i == 0 || i + 1 == grid.nx {
        Some(m * grid.y2[j])
    } else {
        None
    }
}

/// Closure values at a node. When the data carry a mollified sheet, `𝔹′, 𝕊′`
/// are averaged over the ψ-span `[s − δ, s + δ]` of the node's cell so a layer
/// thinner than a cell enters as its resolved jump instead of a pointwise
/// spike. Smooth data are sampled pointwise: the O(δ²) averaging error grows
/// with the curvature of 𝕊, which is large for large γ.
fn cell_values(closure: &StreamClosure, s: f64, delta: f64) -> StreamValues {
    let mut v = closure.values(s);
    if closure.m_d.is_some() && delta > 1e-9 * closure.m {
        let (lo, hi) = (closure.values(s - delta), closure.values(s + delta));
        v.db = (hi.b - lo.b) / (2.0 * delta);
        v.ds = (hi.s - lo.s) / (2.0 * delta);
    }
    v
}

fn node_coefficients(
    grid: &Grid,
    closure: &StreamClosure,
    cut: &CutoffState,
    psi: &[f64],
) -> Result<Vec<NodeCoef>, SolverError> {
    let (nx, ny) = (grid.nx, grid.ny);
    let (d1, d2) = (grid.dy1, grid.dy2);
    let cols: Vec<Result<Vec<NodeCoef>, SolverError>> = (1..nx - 1)
        .into_par_iter()
        .map(|i| {
            let cm = &grid.cols[i];
            let mut out = Vec::with_capacity(ny - 2);
            for j in 1..ny - 1 {
                let k = i * ny + j;
                let p1 = (psi[k + ny] - psi[k - ny]) / (2.0 * d1);
                let p2 = (psi[k + 1] - psi[k - 1]) / (2.0 * d2);
                let y2 = grid.y2[j];
                let eta = cm.eta(y2);
                let grad = [p1 + eta * p2, p2 / cm.h];
                let s = psi[k];
                let v = cell_values(closure, s, 0.25 * (psi[k + 1] - psi[k - 1]).abs());
                let co = coefficients_from_values(closure.law, &v, s, grad, cut)?;
                let (h, e2) = (cm.h, cm.eta_y2());
                out.push(NodeCoef {
                    a: co.a11,
                    b: 2.0 * eta * co.a11 + co.a12 / h,
                    c: eta * eta * co.a11 + co.a12 * eta / h + co.a22 / (h * h),
                    d: co.a11 * (cm.eta_y1(y2) + eta * e2) + co.a12 * e2 / h,
                    f: co.f,
                    margin: co.margin,
                    cut: co.cut_active,
                });
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::with_capacity((nx - 2) * (ny - 2));
    for c in cols {
        all.extend(c?);
    }
    Ok(all)
}

/// Stencil weights in the order (offset_i, offset_j, weight).
fn stencil(c: &NodeCoef, d1: f64, d2: f64) -> [(isize, isize, f64); 9] {
    let w11 = c.a / (d1 * d1);
    let w22 = c.c / (d2 * d2);
    let w12 = c.b / (4.0 * d1 * d2);
    let wd = c.d / (2.0 * d2);
    [
        (0, 0, -2.0 * w11 - 2.0 * w22),
        (-1, 0, w11),
        (1, 0, w11),
        (0, -1, w22 - wd),
        (0, 1, w22 + wd),
        (1, 1, w12),
        (-1, -1, w12),
        (1, -1, -w12),
        (-1, 1, -w12),
    ]
}

/// Scaled max-norm residual of the frozen operator at `psi`.
fn residual(grid: &Grid, coefs: &[NodeCoef], psi: &[f64], m: f64) -> f64 {
    let (nx, ny) = (grid.nx, grid.ny);
    let (d1, d2) = (grid.dy1, grid.dy2);
    let mut worst: f64 = 0.0;
    for i in 1..nx - 1 {
        for j in 1..ny - 1 {
            let c = &coefs[(i - 1) * (ny - 2) + (j - 1)];
            let st = stencil(c, d1, d2);
            let mut l = 0.0;
            for (di, dj, w) in st {
                l += w * psi[((i as isize + di) as usize) * ny + (j as isize + dj) as usize];
            }
            let scale = (2.0 * c.a / (d1 * d1) + 2.0 * c.c / (d2 * d2)).abs() * m;
            let r = (l - c.f).abs() / scale;
            if !r.is_finite() {
                return f64::INFINITY;
            }
            worst = worst.max(r);
        }
    }
    worst
}

fn linear_solve(grid: &Grid, coefs: &[NodeCoef], m: f64) -> Result<Vec<f64>, SolverError> {
    let (nx, ny) = (grid.nx, grid.ny);
    let n2 = ny - 2;
    let n = (nx - 2) * n2;
    let (d1, d2) = (grid.dy1, grid.dy2);
    let mut mat = BandMatrix::zeros(n, n2 + 1, n2 + 1);
    let mut rhs = vec![0.0; n];
    for i in 1..nx - 1 {
        for j in 1..ny - 1 {
            let row = (i - 1) * n2 + (j - 1);
            let c = &coefs[row];
            rhs[row] = c.f;
            for (di, dj, w) in stencil(c, d1, d2) {
                let (ii, jj) = ((i as isize + di) as usize, (j as isize + dj) as usize);
                match boundary_value(grid, m, ii, jj) {
                    Some(bv) => rhs[row] -= w * bv,
                    None => mat.add(row, (ii - 1) * n2 + (jj - 1), w),
                }
            }
        }
    }
    mat.factor()?;
    mat.solve(&mut rhs);
    let mut psi = vec![0.0; nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            psi[i * ny + j] = match boundary_value(grid, m, i, j) {
                Some(v) => v,
                None => rhs[(i - 1) * n2 + (j - 1)],
            };
        }
    }
    Ok(psi)
}

/// Solve the cut-off problem on `[−2L, 2L] × [0, 1]` with mass flux `closure.m`.
pub fn solve_bounded(
    geom: &NozzleGeometry,
    closure: Arc<StreamClosure>,
    l: f64,
    opts: &SolveOptions,
) -> Result<(FlowField, SolveReport), SolverError> {
    let m = closure.m;
    if !(m > closure.m_hat) {
        return Err(SolverError::Parameter(format!("mass flux m = {m} must exceed m_hat = {}", closure.m_hat)));
    }
    if closure.has_jump {
        return Err(SolverError::Parameter(
            "inlet data carry an unmollified jump; mollify the profile before solving".into(),
        ));
    }
    let grid = truncate(geom, l, opts.nx, opts.ny)?;
    let cut = CutoffState::new(closure.eps_cut);
    let (nx, ny) = (grid.nx, grid.ny);
    let mut psi: Vec<f64> = match &opts.initial {
        Some(init) if init.len() == grid.len() => init.clone(),
        Some(init) => {
            return Err(SolverError::Parameter(format!("warm start has {} nodes, grid has {}", init.len(), grid.len())))
        }
        None => (0..nx * ny).map(|k| m * grid.y2[k % ny]).collect(),
    };
    for i in 0..nx {
        for j in 0..ny {
            if let Some(v) = boundary_value(&grid, m, i, j) {
                psi[i * ny + j] = v;
            }
        }
    }
    let mut report = SolveReport::default();
    let mut omega: f64 = 1.0;
    let mut best = f64::INFINITY;
    let mut best_at = 0usize;
    let mut lowest = f64::INFINITY;
    let mut prev = f64::INFINITY;
    let mut mixer = Anderson::new(5);
    for it in 0..=opts.max_iter {
        let coefs = node_coefficients(&grid, &closure, &cut, &psi)?;
        let r = residual(&grid, &coefs, &psi, m);
        report.residuals.push(r);
        report.iterations = it;
        report.margin = coefs.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
        report.cutoff_count = coefs.iter().filter(|c| c.cut).count();
        if r < opts.tol {
            report.converged = true;
            let field = FlowField { geom: geom.clone(), grid, psi, m, closure, cut, residual_norm: r };
            return Ok((field, report));
        }
        if !r.is_finite() || it == opts.max_iter {
            break;
        }
        if r < 0.9 * best {
            best = r;
            best_at = it;
        } else if it - best_at >= opts.plateau {
            break;
        }
        if it > 0 {
            let ratio = r / prev;
            if ratio > 1.0 {
                omega = (0.5 * omega).max(0.05);
            } else if ratio < 0.95 {
                omega = (1.25 * omega).min(1.0);
            }
        }
        if r > 2.0 * lowest {
            mixer.clear();
        }
        lowest = lowest.min(r);
        prev = r;
        report.damping.push(omega);
        let target = linear_solve(&grid, &coefs, m)?;
        let f: Vec<f64> = target.iter().zip(&psi).map(|(t, p)| t - p).collect();
        psi = mixer.step(&psi, &f, omega);
    }
    let residual = *report.residuals.last().unwrap_or(&f64::INFINITY);
    Err(SolverError::NonConvergence { residual, iterations: report.iterations, report: Box::new(report) })
}

/// Anderson mixing of the Picard map `ψ ↦ G(ψ)` with residual `f = G(ψ) − ψ`.
struct Anderson {
    depth: usize,
    last: Option<(Vec<f64>, Vec<f64>)>,
    dx: Vec<Vec<f64>>,
    df: Vec<Vec<f64>>,
}

impl Anderson {
    fn new(depth: usize) -> Self {
        Anderson { depth, last: None, dx: Vec::new(), df: Vec::new() }
    }

    fn clear(&mut self) {
        self.last = None;
        self.dx.clear();
        self.df.clear();
    }

    fn step(&mut self, x: &[f64], f: &[f64], beta: f64) -> Vec<f64> {
        if let Some((xl, fl)) = self.last.take() {
            self.dx.push(x.iter().zip(&xl).map(|(a, b)| a - b).collect());
            self.df.push(f.iter().zip(&fl).map(|(a, b)| a - b).collect());
            if self.dx.len() > self.depth {
                self.dx.remove(0);
                self.df.remove(0);
            }
        }
        self.last = Some((x.to_vec(), f.to_vec()));
        let mut out: Vec<f64> = x.iter().zip(f).map(|(a, b)| a + beta * b).collect();
        let k = self.df.len();
        if k == 0 {
            return out;
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        // normal equations with a small ridge
        let mut a = vec![vec![0.0; k + 1]; k];
        for i in 0..k {
            for j in 0..k {
                a[i][j] = dot(&self.df[i], &self.df[j]);
            }
            a[i][k] = dot(&self.df[i], f);
        }
        let ridge = 1e-12 * (0..k).map(|i| a[i][i]).fold(0.0, f64::max);
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += ridge;
        }
        let Some(g) = gauss_solve(a) else {
            self.clear();
            return out;
        };
        for (i, gi) in g.iter().enumerate() {
            for (o, (dx, df)) in out.iter_mut().zip(self.dx[i].iter().zip(&self.df[i])) {
                *o -= gi * (dx + beta * df);
            }
        }
        out
    }
}

/// Solve a small dense augmented system by partial pivoting.
fn gauss_solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        for r in c + 1..n {
            let t = a[r][c] / a[c][c];
            for k in c..=n {
                a[r][k] -= t * a[c][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (a[r][n] - s) / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Result of an L-doubling study.
#[derive(Debug, Clone)]
pub struct DomainStudy {
    pub field: FlowField,
    /// Max-norm differences on the innermost window between successive L.
    pub diffs: Vec<f64>,
    /// Observed ratio of successive differences (NaN with fewer than two).
    pub decay_rate: f64,
    pub lengths: Vec<f64>,
}

/// Repeat solves at L0, 2L0, 4L0, … with fixed spacing until the restriction
/// to `[−2L0, 2L0]` changes by less than `opts.domain_tol`.
pub fn extend_domain(
    geom: &NozzleGeometry,
    closure: Arc<StreamClosure>,
    l0: f64,
    opts: &SolveOptions,
) -> Result<DomainStudy, SolverError> {
    let (mut prev, _) = solve_bounded(geom, closure.clone(), l0, opts)?;
    let mut diffs = Vec::new();
    let mut lengths = vec![l0];
    let inner_nx = opts.nx;
    for k in 1..=opts.max_doublings {
        let l = l0 * f64::powi(2.0, k as i32);
        let mut o = opts.clone();
        o.nx = (opts.nx - 1) * (1 << k) + 1;
        o.initial = None;
        let (field, _) = solve_bounded(geom, closure.clone(), l, &o)?;
        let ny = opts.ny;
        let off_new = (field.grid.nx - inner_nx) / 2;
        let off_old = (prev.grid.nx - inner_nx) / 2;
        let mut d: f64 = 0.0;
        for i in 0..inner_nx {
            for j in 0..ny {
                let a = field.psi[(i + off_new) * ny + j];
                let b = prev.psi[(i + off_old) * ny + j];
                d = d.max((a - b).abs());
            }
        }
        diffs.push(d);
        lengths.push(l);
        prev = field;
        if d < opts.domain_tol {
            let decay_rate = if diffs.len() >= 2 { diffs[diffs.len() - 1] / diffs[diffs.len() - 2] } else { f64::NAN };
            return Ok(DomainStudy { field: prev, diffs, decay_rate, lengths });
        }
    }
    Err(SolverError::Truncation { diffs, tol: opts.domain_tol })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    /// min over interior nodes of the discrete `∂ψ/∂x₂`.
    pub min_dpsi_dx2: f64,
    pub at: (usize, usize),
    pub violations: usize,
    /// Interior nodes with ψ outside (0, m).
    pub range_violations: usize,
}

pub fn monotonicity_check(field: &FlowField) -> MonotonicityReport {
    let g = &field.grid;
    let mut min = f64::INFINITY;
    let mut at = (0, 0);
    let mut violations = 0;
    let mut range_violations = 0;
    for i in 1..g.nx - 1 {
        for j in 1..g.ny - 1 {
            let k = g.index(i, j);
            let d = (field.psi[k + 1] - field.psi[k - 1]) / (2.0 * g.dy2 * g.cols[i].h);
            if d < min {
                min = d;
                at = (i, j);
            }
            if d <= 0.0 {
                violations += 1;
            }
            if !(field.psi[k] > 0.0 && field.psi[k] < field.m) {
                range_violations += 1;
            }
        }
    }
    MonotonicityReport { min_dpsi_dx2: min, at, violations, range_violations }
}
