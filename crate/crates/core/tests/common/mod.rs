//! Fixtures and independent oracles shared by the integration tests. The
//! oracles rebuild each quantity from the gas laws with their own quadrature
//! and root finding, so they share no code with the crate.

#![allow(dead_code)]

use std::sync::Arc;

use nozzleflow::geometry::NozzleGeometry;
use nozzleflow::inlet::{build_closure, m_hat, Constant, InletProfile, Piecewise, Polynomial};
use nozzleflow::solver::{solve_bounded, FlowField, SolveOptions};

/// Sheared inlet: `u₁₋ = 1.05 − 0.2x + 0.2x²`, `S₋ = 1 + 0.1x`.
pub fn sheared(gamma: f64) -> InletProfile {
    InletProfile::new(Arc::new(Polynomial(vec![1.05, -0.2, 0.2])), Arc::new(Polynomial(vec![1.0, 0.1])), gamma)
}

pub fn contraction() -> NozzleGeometry {
    NozzleGeometry::smooth_step(0.8, 2.0, 2.5)
}

pub fn expansion() -> NozzleGeometry {
    NozzleGeometry::tanh(0.0, 1.3, 0.5, 6.0)
}

/// Two-state entropy with `u₁₋` chosen so that `B₋` is continuous.
pub fn entropy_jump() -> (InletProfile, f64) {
    let g: f64 = 1.4;
    let (a, mach) = (1.0, 0.4);
    let b0 = 0.5 * mach * mach * (g - 1.0) * a + a;
    let (slo, shi) = (1.0f64, 1.02f64);
    let u = |s: f64| (2.0 * (b0 - a * s.powf(1.0 / g))).sqrt();
    let mut prof = InletProfile::new(
        Arc::new(Piecewise::two_state(0.5, u(slo), u(shi))),
        Arc::new(Piecewise::two_state(0.5, slo, shi)),
        g,
    );
    prof.allow_unsigned_jump = true;
    let m = a.powf(1.0 / (g - 1.0)) * prof.flux_integral().unwrap();
    (prof, m)
}

/// Two-state speed at constant entropy, so that only `B₋` jumps.
pub fn bernoulli_jump() -> (InletProfile, f64) {
    let prof = InletProfile::new(Arc::new(Piecewise::two_state(0.5, 1.0, 1.1)), Arc::new(Constant(1.0)), 1.4);
    let m = 80.0 * m_hat(&prof).unwrap();
    (prof, m)
}

pub fn solve(geom: &NozzleGeometry, prof: &InletProfile, m: f64, nx: usize, ny: usize) -> FlowField {
    let cl = build_closure(prof, m, 0.05).expect("closure");
    solve_bounded(geom, Arc::new(cl), geom.l, &SolveOptions { nx, ny, tol: 1e-12, ..Default::default() })
        .expect("solve")
        .0
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "oracle bisection without a sign change");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Inlet pressure from `m = ∫ρ₋u₁₋` with `ρ₋ = (γp/((γ−1)S₋))^{1/γ}`.
pub fn inlet_pressure_oracle(u: &dyn Fn(f64) -> f64, s: &dyn Fn(f64) -> f64, gamma: f64, m: f64) -> f64 {
    let i = simpson(|y| u(y) * s(y).powf(-1.0 / gamma), 0.0, 1.0, 20_000);
    (gamma - 1.0) / gamma * (m / i).powf(gamma)
}

/// Downstream pressure from per-streamline Bernoulli and entropy
/// conservation plus the outlet width, for smooth data.
pub fn outlet_pressure_oracle(u: &dyn Fn(f64) -> f64, s: &dyn Fn(f64) -> f64, gamma: f64, m: f64, width: f64) -> f64 {
    let pm = inlet_pressure_oracle(u, s, gamma, m);
    let enth = |p: f64, sv: f64| {
        let rho = (gamma * p / ((gamma - 1.0) * sv)).powf(1.0 / gamma);
        (rho, gamma * p / ((gamma - 1.0) * rho))
    };
    let j = |p: f64| {
        simpson(
            |y| {
                let (sv, uv) = (s(y), u(y));
                let (rm, hm) = enth(pm, sv);
                let (rp, hp) = enth(p, sv);
                let up = (uv * uv + 2.0 * (hm - hp)).sqrt();
                rm * uv / (rp * up)
            },
            0.0,
            1.0,
            20_000,
        )
    };
    // stagnation on the slowest streamline caps the pressure
    let mut p_cap = f64::INFINITY;
    for k in 0..=10_000 {
        let y = k as f64 / 10_000.0;
        let bern = 0.5 * u(y).powi(2) + enth(pm, s(y)).1;
        let p = (gamma - 1.0) / gamma * (bern * s(y).powf(-1.0 / gamma)).powf(gamma / (gamma - 1.0));
        p_cap = p_cap.min(p);
    }
    bisect(|p| j(p) - width, 0.5 * pm, pm + (1.0 - 1e-6) * (p_cap - pm))
}

/// Critical mass flux of a uniform stream through a unit channel. At fixed
/// inlet speed the flux `ρu` grows with the inlet density, and the stream
/// chokes once the inlet itself turns sonic: `u² = c² = (γ−1)Sρ^{γ−1}`.
pub fn choking_flux_oracle(u: f64, s: f64, gamma: f64) -> f64 {
    let mach_gap = |m: f64| {
        let rho = m / u;
        (gamma - 1.0) * s * rho.powf(gamma - 1.0) - u * u
    };
    bisect(mach_gap, 1e-9, 1e9)
}

/// Uniform-stream sonic flux `Q̂ = max_ρ ρq` at fixed `(B, S)`, by golden
/// section over the subsonic density range.
pub fn sonic_flux_oracle(bern: f64, s: f64, gamma: f64) -> f64 {
    let rho_max = (bern / s).powf(1.0 / (gamma - 1.0));
    let flux = |r: f64| r * (2.0 * (bern - s * r.powf(gamma - 1.0))).max(0.0).sqrt();
    let (mut a, mut b) = (0.0, rho_max);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if flux(c) > flux(d) {
            b = d;
        } else {
            a = c;
        }
    }
    flux(0.5 * (a + b))
}
