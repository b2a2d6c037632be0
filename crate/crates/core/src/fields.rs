//! Primitive variables and diagnostics reconstructed from a converged ψ,
//! plus the transform to Euler–Lagrange coordinates `(z₁, z₂) = (x₁, ψ)`.

use rayon::prelude::*;

use crate::closure::{cutoff_from_qhat, qhat_from, state_from_values};
use crate::inlet::GasLaw;
use crate::numerics::hermite3;
use crate::solver::FlowField;

/// Fourth-order first derivative of `f[k·stride]`, `k = 0..n`, at index `k`.
fn d1_4(f: impl Fn(usize) -> f64, n: usize, k: usize, h: f64) -> f64 {
    if k >= 2 && k + 2 < n {
        (f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2)) / (12.0 * h)
    } else if k == 0 {
        (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) / (12.0 * h)
    } else if k == 1 {
        (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)) / (12.0 * h)
    } else if k + 1 == n {
        -(-25.0 * f(n - 1) + 48.0 * f(n - 2) - 36.0 * f(n - 3) + 16.0 * f(n - 4) - 3.0 * f(n - 5)) / (12.0 * h)
    } else {
        -(-3.0 * f(n - 1) - 10.0 * f(n - 2) + 18.0 * f(n - 3) - 6.0 * f(n - 4) + f(n - 5)) / (12.0 * h)
    }
}

/// Second-order first derivative (central inside, one-sided at the ends).
fn d1_2(f: impl Fn(usize) -> f64, n: usize, k: usize, h: f64) -> f64 {
    if k == 0 {
        (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h)
    } else if k + 1 == n {
        (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h)
    } else {
        (f(k + 1) - f(k - 1)) / (2.0 * h)
    }
}

/// Physical gradient of a nodal field via flattened derivatives.
fn physical_gradient(field: &FlowField, vals: &[f64], i: usize, j: usize, fourth: bool) -> [f64; 2] {
    let g = &field.grid;
    let ny = g.ny;
    let (p1, p2) = if fourth {
        (d1_4(|k| vals[k * ny + j], g.nx, i, g.dy1), d1_4(|k| vals[i * ny + k], ny, j, g.dy2))
    } else {
        (d1_2(|k| vals[k * ny + j], g.nx, i, g.dy1), d1_2(|k| vals[i * ny + k], ny, j, g.dy2))
    };
    let cm = &g.cols[i];
    [p1 + cm.eta(g.y2[j]) * p2, p2 / cm.h]
}

/// Nodal physical gradients of ψ (fourth order).
pub fn gradients(field: &FlowField) -> Vec<[f64; 2]> {
    let g = &field.grid;
    (0..g.len()).into_par_iter().map(|k| physical_gradient(field, &field.psi, k / g.ny, k % g.ny, true)).collect()
}

#[derive(Debug, Clone)]
pub struct PrimitiveField {
    pub rho: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub theta: Vec<f64>,
    pub mach: Vec<f64>,
    pub omega: Vec<f64>,
    pub grad: Vec<[f64; 2]>,
    /// Nodes where ρu₁ ≤ 0.
    pub stagnation: Vec<(usize, usize)>,
    /// Nodes reconstructed through the cut-off (|∇ψ| ≥ Q̂).
    pub clipped: Vec<(usize, usize)>,
}

pub fn reconstruct(field: &FlowField) -> PrimitiveField {
    let g = &field.grid;
    let grad = gradients(field);
    let cl = &field.closure;
    let n = g.len();
    let rows: Vec<(f64, f64, f64, f64, f64, f64, f64, bool)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let s = field.psi[k];
            let v = cl.values(s);
            let gn = grad[k][0].hypot(grad[k][1]);
            let (st, clipped) = match state_from_values(cl.law, &v, s, gn) {
                Ok(st) => (st, false),
                Err(_) => {
                    let qt = match cl.law {
                        GasLaw::Polytropic { gamma } => cutoff_from_qhat(gn, qhat_from(&v, gamma), &field.cut),
                        GasLaw::Incompressible => 0.0,
                    };
                    let st = state_from_values(cl.law, &v, s, qt).expect("cut-off gradient is subsonic");
                    (st, true)
                }
            };
            let u1 = grad[k][1] / st.rho;
            let u2 = -grad[k][0] / st.rho;
            let omega = match cl.law {
                GasLaw::Polytropic { gamma } => -st.rho * v.db + st.rho.powf(gamma) * v.ds / gamma,
                GasLaw::Incompressible => -st.rho * v.db - st.p / st.rho * v.ds,
            };
            (st.rho, u1, u2, st.p, st.mach, omega, u2.atan2(u1), clipped)
        })
        .collect();
    let mut prim = PrimitiveField {
        rho: Vec::with_capacity(n),
        u1: Vec::with_capacity(n),
        u2: Vec::with_capacity(n),
        p: Vec::with_capacity(n),
        q: Vec::with_capacity(n),
        theta: Vec::with_capacity(n),
        mach: Vec::with_capacity(n),
        omega: Vec::with_capacity(n),
        grad,
        stagnation: Vec::new(),
        clipped: Vec::new(),
    };
    for (k, (rho, u1, u2, p, mach, omega, theta, clipped)) in rows.into_iter().enumerate() {
        prim.rho.push(rho);
        prim.u1.push(u1);
        prim.u2.push(u2);
        prim.p.push(p);
        prim.q.push(u1.hypot(u2));
        prim.theta.push(theta);
        prim.mach.push(mach);
        prim.omega.push(omega);
        if rho * u1 <= 0.0 {
            prim.stagnation.push((k / g.ny, k % g.ny));
        }
        if clipped {
            prim.clipped.push((k / g.ny, k % g.ny));
        }
    }
    prim
}

/// Nodes inside the sheet band: cells whose ψ-range straddles `m_d`, dilated by one cell.
pub fn band_mask(field: &FlowField, m_d: Option<f64>) -> Vec<bool> {
    let g = &field.grid;
    let mut mask = vec![false; g.len()];
    let Some(md) = m_d else { return mask };
    for i in 0..g.nx - 1 {
        for j in 0..g.ny - 1 {
            let c = [g.index(i, j), g.index(i + 1, j), g.index(i, j + 1), g.index(i + 1, j + 1)];
            let lo = c.iter().map(|&k| field.psi[k]).fold(f64::INFINITY, f64::min);
            let hi = c.iter().map(|&k| field.psi[k]).fold(f64::NEG_INFINITY, f64::max);
            if lo <= md && md <= hi {
                for ii in i.saturating_sub(1)..=(i + 2).min(g.nx - 1) {
                    for jj in j.saturating_sub(1)..=(j + 2).min(g.ny - 1) {
                        mask[g.index(ii, jj)] = true;
                    }
                }
            }
        }
    }
    mask
}

fn in_window(field: &FlowField, i: usize) -> bool {
    field.grid.y1[i].abs() <= field.grid.l + 1e-12
}

/// `max |B(x) − 𝔹(ψ)|/|𝔹|` and `max |S(x) − 𝕊(ψ)|/|𝕊|` over all nodes, with
/// `B`, `S` recomputed from the reconstructed `(ρ, q, p)`.
pub fn transport_residual(field: &FlowField, prim: &PrimitiveField) -> (f64, f64) {
    let cl = &field.closure;
    let mut rb: f64 = 0.0;
    let mut rs: f64 = 0.0;
    for k in 0..field.psi.len() {
        let v = cl.values(field.psi[k]);
        let (rho, q, p) = (prim.rho[k], prim.q[k], prim.p[k]);
        let (b, s) = match cl.law {
            GasLaw::Polytropic { gamma } => {
                (0.5 * q * q + gamma * p / ((gamma - 1.0) * rho), gamma * p / ((gamma - 1.0) * rho.powf(gamma)))
            }
            GasLaw::Incompressible => (0.5 * q * q + p / rho, rho),
        };
        rb = rb.max((b - v.b).abs() / v.b.abs());
        rs = rs.max((s - v.s).abs() / v.s.abs());
    }
    (rb, rs)
}

/// `∫ ρu₁ dx₂` at every vertical grid line, Gregory-corrected trapezoid.
pub fn station_flux(field: &FlowField, prim: &PrimitiveField) -> Vec<f64> {
    const END: [f64; 3] = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
    let g = &field.grid;
    let ny = g.ny;
    (0..g.nx)
        .map(|i| {
            let mut sum = 0.0;
            for j in 0..ny {
                let w = if j < 3 {
                    END[j]
                } else if j + 3 >= ny {
                    END[ny - 1 - j]
                } else {
                    1.0
                };
                let k = g.index(i, j);
                sum += w * prim.rho[k] * prim.u1[k];
            }
            sum * g.dy2 * g.cols[i].h
        })
        .collect()
}

/// Max over the inner window of the discrete `div(ρu)` (second-order central
/// differences of the nodal momentum), scaled by `m`; the sheet band and the
/// two node rows next to each boundary are skipped.
pub fn continuity_residual(field: &FlowField, prim: &PrimitiveField, mask: &[bool]) -> f64 {
    let g = &field.grid;
    let mx: Vec<f64> = (0..g.len()).map(|k| prim.rho[k] * prim.u1[k]).collect();
    let my: Vec<f64> = (0..g.len()).map(|k| prim.rho[k] * prim.u2[k]).collect();
    let mut worst: f64 = 0.0;
    for i in 2..g.nx - 2 {
        if !in_window(field, i) {
            continue;
        }
        for j in 2..g.ny - 2 {
            if mask[g.index(i, j)] {
                continue;
            }
            let a = physical_gradient(field, &mx, i, j, false);
            let b = physical_gradient(field, &my, i, j, false);
            worst = worst.max((a[0] + b[1]).abs());
        }
    }
    worst / field.m
}

/// Nodal residuals of the first-order θ–p system
/// `sinθθ₁ − cosθθ₂ + (1−M²)(cosθp₁ + sinθp₂)/(ρq²) = 0`,
/// `cosθθ₁ + sinθθ₂ − (sinθp₁ − cosθp₂)/(ρq²) = 0`, with their inner-window
/// max norms (band and near-boundary rows skipped).
#[derive(Debug, Clone)]
pub struct ThetaPressureResidual {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub max_first: f64,
    pub max_second: f64,
}

pub fn theta_pressure_residual(field: &FlowField, prim: &PrimitiveField, mask: &[bool]) -> ThetaPressureResidual {
    let g = &field.grid;
    let n = g.len();
    let mut first = vec![0.0; n];
    let mut second = vec![0.0; n];
    let (mut m1, mut m2): (f64, f64) = (0.0, 0.0);
    let pscale = prim.p.iter().fold(0.0f64, |a, &p| a.max(p.abs())).max(1e-300);
    for i in 1..g.nx - 1 {
        for j in 1..g.ny - 1 {
            let k = g.index(i, j);
            let th = physical_gradient(field, &prim.theta, i, j, false);
            let pg = physical_gradient(field, &prim.p, i, j, false);
            let (sn, cs) = prim.theta[k].sin_cos();
            let rq2 = prim.rho[k] * prim.q[k] * prim.q[k];
            let mach2 = match field.closure.law {
                GasLaw::Polytropic { .. } => prim.mach[k] * prim.mach[k],
                GasLaw::Incompressible => 0.0,
            };
            // scaled by p/(ρq²) so both equations are O(1/length)
            let scale = pscale / rq2;
            let r1 = (sn * th[0] - cs * th[1] + (1.0 - mach2) * (cs * pg[0] + sn * pg[1]) / rq2) / scale;
            let r2 = (cs * th[0] + sn * th[1] - (sn * pg[0] - cs * pg[1]) / rq2) / scale;
            first[k] = r1;
            second[k] = r2;
            if i >= 2 && j >= 2 && i + 2 < g.nx && j + 2 < g.ny && in_window(field, i) && !mask[k] {
                m1 = m1.max(r1.abs());
                m2 = m2.max(r2.abs());
            }
        }
    }
    ThetaPressureResidual { first, second, max_first: m1, max_second: m2 }
}

/// Max over the inner window of `|curl u − ω|`, with the curl from
/// second-order differences of the reconstructed velocity.
pub fn vorticity_error(field: &FlowField, prim: &PrimitiveField, mask: &[bool]) -> f64 {
    let g = &field.grid;
    let mut worst: f64 = 0.0;
    for i in 2..g.nx - 2 {
        if !in_window(field, i) {
            continue;
        }
        for j in 2..g.ny - 2 {
            let k = g.index(i, j);
            if mask[k] {
                continue;
            }
            let du2 = physical_gradient(field, &prim.u2, i, j, false);
            let du1 = physical_gradient(field, &prim.u1, i, j, false);
            worst = worst.max((du2[0] - du1[1] - prim.omega[k]).abs());
        }
    }
    worst
}

/// Location and value of one extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub node: (usize, usize),
    /// Node within one cell of the boundary, or value within tolerance of the boundary extremum.
    pub on_boundary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxPrincipleReport {
    pub p_max: Extremum,
    pub p_min: Extremum,
    pub theta_max: Extremum,
    pub theta_min: Extremum,
    pub theta_bound: f64,
    /// max |θ| over the window `|y₁| ≤ L`; the artificial ends carry linear
    /// Dirichlet data, so θ there reflects truncation rather than the walls.
    pub theta_inner: f64,
    pub theta_ok: bool,
    pub pass: bool,
}

fn extremum(field: &FlowField, vals: &[f64], maximize: bool) -> Extremum {
    let g = &field.grid;
    let sign = if maximize { 1.0 } else { -1.0 };
    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut best_bnd = f64::NEG_INFINITY;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (k, &v) in vals.iter().enumerate() {
        let sv = sign * v;
        if sv > best.0 {
            best = (sv, k);
        }
        if g.is_boundary(k / g.ny, k % g.ny) {
            best_bnd = best_bnd.max(sv);
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let (i, j) = (best.1 / g.ny, best.1 % g.ny);
    let near = i <= 1 || j <= 1 || i + 2 >= g.nx || j + 2 >= g.ny;
    let tol = 1e-12 * lo.abs().max(hi.abs()) + 1e-9 * (hi - lo);
    Extremum { value: sign * best.0, node: (i, j), on_boundary: near || best.0 <= best_bnd + tol }
}

/// Global extrema of nodal `p` and `θ` and the wall-inclination bound on `|θ|`.
pub fn max_principle_report(field: &FlowField, prim: &PrimitiveField) -> MaxPrincipleReport {
    let p_max = extremum(field, &prim.p, true);
    let p_min = extremum(field, &prim.p, false);
    let theta_max = extremum(field, &prim.theta, true);
    let theta_min = extremum(field, &prim.theta, false);
    let theta_bound = field.geom.theta_b();
    let g = &field.grid;
    let theta_inner =
        (0..g.len()).filter(|k| g.y1[k / g.ny].abs() <= g.l).map(|k| prim.theta[k].abs()).fold(0.0, f64::max);
    let theta_ok = theta_inner <= theta_bound + 1e-3;
    let pass = p_max.on_boundary && p_min.on_boundary && theta_max.on_boundary && theta_min.on_boundary && theta_ok;
    MaxPrincipleReport { p_max, p_min, theta_max, theta_min, theta_bound, theta_inner, theta_ok, pass }
}

/// `x₂ = φ(z₁, z₂)` on a uniform `z₂` grid over `[0, m]` with `ny` points.
#[derive(Debug, Clone)]
pub struct LagrangianField {
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
    /// `phi[i·nz + k]`.
    pub phi: Vec<f64>,
    /// `∂φ/∂z₂ = 1/ψ_{x₂}` at the same nodes.
    pub phi_z2: Vec<f64>,
    pub nz: usize,
    /// max over nodes and cell midpoints of `|x₂ − φ(z₁, ψ(x₂))|`.
    pub roundtrip_error: f64,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("column {column} (x1 = {x1}) is not strictly monotone in x2; cannot invert psi")]
pub struct TransformError {
    pub column: usize,
    pub x1: f64,
}

/// Column data: ψ(x₂) as a cubic Hermite through the nodes with fourth-order slopes.
struct ColumnMap {
    x: Vec<f64>,
    psi: Vec<f64>,
    dpsi: Vec<f64>,
}

impl ColumnMap {
    fn forward(&self, x2: f64) -> f64 {
        let j = match self.x.binary_search_by(|v| v.total_cmp(&x2)) {
            Ok(j) => return self.psi[j],
            Err(j) => j.clamp(1, self.x.len() - 1) - 1,
        };
        hermite3(self.x[j], self.x[j + 1], self.psi[j], self.psi[j + 1], self.dpsi[j], self.dpsi[j + 1], x2).0
    }

    /// Inverse of the Hermite map by safeguarded Newton.
    fn inverse(&self, z: f64) -> (f64, f64) {
        let n = self.psi.len();
        let j = match self.psi.binary_search_by(|v| v.total_cmp(&z)) {
            Ok(j) => return (self.x[j], 1.0 / self.dpsi[j]),
            Err(j) => j.clamp(1, n - 1) - 1,
        };
        let (xa, xb) = (self.x[j], self.x[j + 1]);
        let (mut lo, mut hi) = (xa, xb);
        let mut x = xa + (xb - xa) * (z - self.psi[j]) / (self.psi[j + 1] - self.psi[j]);
        let mut d = 1.0;
        for _ in 0..60 {
            let (v, dv, _) = hermite3(xa, xb, self.psi[j], self.psi[j + 1], self.dpsi[j], self.dpsi[j + 1], x);
            d = dv;
            let r = v - z;
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let mut nx = if dv > 0.0 { x - r / dv } else { 0.5 * (lo + hi) };
            if !(nx >= lo && nx <= hi) {
                nx = 0.5 * (lo + hi);
            }
            if (nx - x).abs() <= 1e-16 * (1.0 + x.abs()) {
                x = nx;
                break;
            }
            x = nx;
        }
        (x, 1.0 / d)
    }
}

fn column_map(field: &FlowField, prim: &PrimitiveField, i: usize) -> Result<ColumnMap, TransformError> {
    let g = &field.grid;
    let x: Vec<f64> = (0..g.ny).map(|j| g.x(i, j)[1]).collect();
    let psi: Vec<f64> = (0..g.ny).map(|j| field.at(i, j)).collect();
    let dpsi: Vec<f64> = (0..g.ny).map(|j| prim.grad[g.index(i, j)][1]).collect();
    if psi.windows(2).any(|w| w[1] <= w[0]) || dpsi.iter().any(|d| *d <= 0.0) {
        return Err(TransformError { column: i, x1: g.y1[i] });
    }
    Ok(ColumnMap { x, psi, dpsi })
}

pub fn to_lagrangian(field: &FlowField, prim: &PrimitiveField) -> Result<LagrangianField, TransformError> {
    let g = &field.grid;
    let nz = g.ny;
    let m = field.m;
    let z2: Vec<f64> = (0..nz).map(|k| if k + 1 == nz { m } else { m * k as f64 / (nz - 1) as f64 }).collect();
    let cols: Vec<Result<(Vec<f64>, Vec<f64>, f64), TransformError>> = (0..g.nx)
        .into_par_iter()
        .map(|i| {
            let cm = column_map(field, prim, i)?;
            let mut phi = Vec::with_capacity(nz);
            let mut dphi = Vec::with_capacity(nz);
            for &z in &z2 {
                let (x, d) = cm.inverse(z);
                phi.push(x);
                dphi.push(d);
            }
            // round trip through the z-table at nodes and cell midpoints
            let mut err: f64 = 0.0;
            for j in 0..2 * g.ny - 1 {
                let x2 = if j % 2 == 0 { cm.x[j / 2] } else { 0.5 * (cm.x[j / 2] + cm.x[j / 2 + 1]) };
                let z = cm.forward(x2);
                let t = (z / m * (nz - 1) as f64).floor().clamp(0.0, (nz - 2) as f64) as usize;
                let back = hermite3(z2[t], z2[t + 1], phi[t], phi[t + 1], dphi[t], dphi[t + 1], z).0;
                err = err.max((back - x2).abs());
            }
            Ok((phi, dphi, err))
        })
        .collect();
    let mut phi = Vec::with_capacity(g.nx * nz);
    let mut phi_z2 = Vec::with_capacity(g.nx * nz);
    let mut roundtrip_error: f64 = 0.0;
    for c in cols {
        let (p, d, e) = c?;
        phi.extend(p);
        phi_z2.extend(d);
        roundtrip_error = roundtrip_error.max(e);
    }
    Ok(LagrangianField { z1: g.y1.clone(), z2, phi, phi_z2, nz, roundtrip_error })
}

/// Max over the inner window of `|∂_{z₁}(∂_{z₁}φ/(ρ∂_{z₂}φ)) + ∂_{z₂}p|`,
/// with `ρ, p` from the closure at `𝒬² = ((∂_{z₁}φ)² + 1)/(∂_{z₂}φ)²`; rows
/// within two cells of the walls or the sheet are skipped. Scaled by `p₋/m`.
pub fn lagrangian_residual(field: &FlowField, lag: &LagrangianField) -> f64 {
    let nz = lag.nz;
    let nx = lag.z1.len();
    let dz1 = lag.z1[1] - lag.z1[0];
    let dz2 = lag.z2[1] - lag.z2[0];
    let cl = &field.closure;
    let at = |i: usize, k: usize| lag.phi[i * nz + k];
    let mut flux = vec![0.0; nx * nz];
    let mut pres = vec![0.0; nx * nz];
    for i in 1..nx - 1 {
        for k in 1..nz - 1 {
            let p1 = (at(i + 1, k) - at(i - 1, k)) / (2.0 * dz1);
            let p2 = (at(i, k + 1) - at(i, k - 1)) / (2.0 * dz2);
            let z = lag.z2[k];
            let v = cl.values(z);
            let qq = (p1 * p1 + 1.0).sqrt() / p2;
            let Ok(st) = state_from_values(cl.law, &v, z, qq) else { continue };
            flux[i * nz + k] = p1 / (st.rho * p2);
            pres[i * nz + k] = st.p;
        }
    }
    let md = cl.m_d;
    let mut worst: f64 = 0.0;
    for i in 2..nx - 2 {
        if lag.z1[i].abs() > field.grid.l + 1e-12 {
            continue;
        }
        for k in 2..nz - 2 {
            if let Some(md) = md {
                if (lag.z2[k] - md).abs() <= 3.0 * dz2 {
                    continue;
                }
            }
            let r = (flux[(i + 1) * nz + k] - flux[(i - 1) * nz + k]) / (2.0 * dz1)
                + (pres[i * nz + k + 1] - pres[i * nz + k - 1]) / (2.0 * dz2);
            worst = worst.max(r.abs());
        }
    }
    worst * cl.m / cl.p_minus
}

/// Per column, the z₂ where `∂_{z₂}φ` changes fastest, compared with `m_d`;
/// returns the largest offset in units of the z-cell.
pub fn sheet_image_offset(lag: &LagrangianField, m_d: f64, window: f64) -> f64 {
    let nz = lag.nz;
    let dz2 = lag.z2[1] - lag.z2[0];
    let mut worst: f64 = 0.0;
    for (i, &z1) in lag.z1.iter().enumerate() {
        if z1.abs() > window {
            continue;
        }
        let mut best = (0.0, 0usize);
        for k in 1..nz - 2 {
            let jump = (lag.phi_z2[i * nz + k + 1] - lag.phi_z2[i * nz + k]).abs();
            if jump > best.0 {
                best = (jump, k);
            }
        }
        let zc = 0.5 * (lag.z2[best.1] + lag.z2[best.1 + 1]);
        worst = worst.max((zc - m_d).abs() / dz2);
    }
    worst
}
