//! Density closure `½g² + ρ^{γ+1}𝕊 = ρ²𝔹`, sonic bounds, the elliptic
//! cut-off and the coefficients of the stream-function equation.

use crate::error::ClosureError;
use crate::inlet::{GasLaw, StreamClosure, StreamValues};

/// Thermodynamic state at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasState {
    pub rho: f64,
    pub q: f64,
    pub c: f64,
    pub mach: f64,
    pub p: f64,
}

/// Smooth clamp of `|∇ψ|/Q̂ − 1` below the sonic value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffState {
    pub eps: f64,
}

impl Default for CutoffState {
    fn default() -> Self {
        CutoffState { eps: 0.05 }
    }
}

impl CutoffState {
    pub fn new(eps: f64) -> Self {
        assert!(eps > 0.0 && eps < 0.25, "cut-off eps must lie in (0, 0.25)");
        CutoffState { eps }
    }

    /// ζ₀(t): identity below −2ε, constant −3ε/2 above −ε, Hermite blend between.
    pub fn zeta0(&self, t: f64) -> f64 {
        self.zeta0_with_slope(t).0
    }

    pub fn zeta0_with_slope(&self, t: f64) -> (f64, f64) {
        let e = self.eps;
        if t <= -2.0 * e {
            (t, 1.0)
        } else if t >= -e {
            (-1.5 * e, 0.0)
        } else {
            let tau = (t + 2.0 * e) / e;
            let z = tau - tau.powi(3) + 0.5 * tau.powi(4);
            let dz = (1.0 - tau) * (1.0 - tau) * (1.0 + 2.0 * tau);
            (-2.0 * e + e * z, dz)
        }
    }
}

/// `Q̂² = (γ−1)(2𝔹/(γ+1))^{(γ+1)/(γ−1)} 𝕊^{−2/(γ−1)}`.
pub fn qhat_from(v: &StreamValues, gamma: f64) -> f64 {
    let g1 = gamma - 1.0;
    (g1.sqrt()) * (2.0 * v.b / (gamma + 1.0)).powf((gamma + 1.0) / (2.0 * g1)) * v.s.powf(-1.0 / g1)
}

/// Sonic momentum-density bound Q̂(s).
pub fn qhat(closure: &StreamClosure, s: f64) -> f64 {
    match closure.law {
        GasLaw::Polytropic { gamma } => qhat_from(&closure.values(s), gamma),
        GasLaw::Incompressible => f64::INFINITY,
    }
}

/// Branch point ρ_cr where q = c.
pub fn critical_density(v: &StreamValues, gamma: f64) -> f64 {
    (2.0 * v.b / ((gamma + 1.0) * v.s)).powf(1.0 / (gamma - 1.0))
}

/// Stagnation density ρ_max.
pub fn stagnation_density(v: &StreamValues, gamma: f64) -> f64 {
    (v.b / v.s).powf(1.0 / (gamma - 1.0))
}

fn state_from_density(rho: f64, g: f64, v: &StreamValues, gamma: f64) -> GasState {
    let q = g / rho;
    let c2 = (gamma - 1.0) * v.s * rho.powf(gamma - 1.0);
    let c = c2.sqrt();
    GasState { rho, q, c, mach: q / c, p: (gamma - 1.0) / gamma * v.s * rho.powf(gamma) }
}

/// Subsonic root for given stream values; `s` is only used in error reports.
pub fn density_from_values(v: &StreamValues, gamma: f64, g: f64, s: f64) -> Result<GasState, ClosureError> {
    let qh = qhat_from(v, gamma);
    if !(g < qh) {
        return Err(ClosureError::Branch { s, g, qhat: qh });
    }
    let rmax = stagnation_density(v, gamma);
    if g == 0.0 {
        return Ok(GasState {
            rho: rmax,
            q: 0.0,
            c: ((gamma - 1.0) * v.s * rmax.powf(gamma - 1.0)).sqrt(),
            mach: 0.0,
            p: (gamma - 1.0) / gamma * v.s * rmax.powf(gamma),
        });
    }
    let rcr = critical_density(v, gamma);
    let half_g2 = 0.5 * g * g;
    let f = |r: f64| r * r * v.b - r.powf(gamma + 1.0) * v.s - half_g2;
    // F is concave and decreasing on [ρ_cr, ρ_max], so Newton from ρ_max
    // approaches the root monotonically from the right.
    let mut r = rmax;
    let mut lo = rcr;
    let mut hi = rmax;
    for _ in 0..200 {
        let fr = f(r);
        if fr >= 0.0 {
            lo = r;
        } else {
            hi = r;
        }
        let dfr = 2.0 * r * v.b - (gamma + 1.0) * r.powf(gamma) * v.s;
        let mut next = if dfr < 0.0 { r - fr / dfr } else { 0.5 * (lo + hi) };
        if !(next >= lo && next <= hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - r).abs() <= 1e-15 * r {
            r = next;
            break;
        }
        r = next;
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    if !r.is_finite() {
        return Err(ClosureError::Numeric(crate::error::NumericError::NonFinite("density closure")));
    }
    Ok(state_from_density(r.max(rcr), g, v, gamma))
}

/// Subsonic-branch density for `|∇ψ| = g` on streamline `s`.
pub fn density_from_gradient(closure: &StreamClosure, s: f64, g: f64) -> Result<GasState, ClosureError> {
    match closure.law {
        GasLaw::Polytropic { gamma } => density_from_values(&closure.values(s), gamma, g, s),
        GasLaw::Incompressible => incompressible_closure(closure, s, g),
    }
}

/// `g < Q̂(s)`; equality counts as not subsonic.
pub fn subsonic_criterion(closure: &StreamClosure, s: f64, g: f64) -> bool {
    g < qhat(closure, s)
}

/// `Q̃ = (ζ₀(g/Q̂ − 1) + 1) Q̂`, exactly `g` when the cut-off is inactive.
pub fn cutoff_gradient(closure: &StreamClosure, s: f64, g: f64, cut: &CutoffState) -> f64 {
    cutoff_from_qhat(g, qhat(closure, s), cut)
}

pub fn cutoff_from_qhat(g: f64, qh: f64, cut: &CutoffState) -> f64 {
    let t = g / qh - 1.0;
    if t <= -2.0 * cut.eps {
        g
    } else {
        (cut.zeta0(t) + 1.0) * qh
    }
}

/// Coefficients of `a₁₁ψ₁₁ + a₁₂ψ₁₂ + a₂₂ψ₂₂ = f` at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
    pub f: f64,
    /// True when the cut-off modified the gradient.
    pub cut_active: bool,
    /// `1 − |∇ψ|/Q̂` with the uncut gradient.
    pub margin: f64,
}

impl Coefficients {
    /// Ratio of the largest to smallest eigenvalue of `[[a₁₁, a₁₂/2], [a₁₂/2, a₂₂]]`.
    pub fn eigen_ratio(&self) -> f64 {
        let tr = self.a11 + self.a22;
        let det = self.a11 * self.a22 - 0.25 * self.a12 * self.a12;
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        let hi = 0.5 * tr + disc;
        let lo = det / hi;
        hi / lo
    }
}

/// Coefficients built from the cut-off state; in the cut-off regime the
/// gradient is rescaled to length Q̃ so the quadratic form stays definite.
pub fn elliptic_coefficients(
    closure: &StreamClosure,
    s: f64,
    grad: [f64; 2],
    cut: &CutoffState,
) -> Result<Coefficients, ClosureError> {
    let v = closure.values(s);
    coefficients_from_values(closure.law, &v, s, grad, cut)
}

pub fn coefficients_from_values(
    law: GasLaw,
    v: &StreamValues,
    s: f64,
    grad: [f64; 2],
    cut: &CutoffState,
) -> Result<Coefficients, ClosureError> {
    let g = grad[0].hypot(grad[1]);
    match law {
        GasLaw::Incompressible => {
            // ρ = 𝔾(s): Δψ − (𝔾′/(2𝔾))|∇ψ|² = 𝔾(𝔾𝔹)′
            let gg = v.s;
            let f = gg * (v.ds * v.b + gg * v.db) + v.ds * g * g / (2.0 * gg);
            Ok(Coefficients { a11: 1.0, a12: 0.0, a22: 1.0, f, cut_active: false, margin: 1.0 })
        }
        GasLaw::Polytropic { gamma } => {
            let qh = qhat_from(v, gamma);
            let qt = cutoff_from_qhat(g, qh, cut);
            let cut_active = qt != g;
            let w = if cut_active { [grad[0] * qt / g, grad[1] * qt / g] } else { grad };
            let st = density_from_values(v, gamma, qt, s)?;
            let rc2 = st.rho * st.rho * st.c * st.c;
            let rg = st.rho.powf(gamma);
            let r3 = st.rho.powi(3);
            let f = -r3 * st.q * st.q * (gamma - 1.0) * rg * v.ds / gamma
                + r3 * st.c * st.c * (st.rho * v.db - rg * v.ds / gamma);
            Ok(Coefficients {
                a11: rc2 - w[1] * w[1],
                a12: 2.0 * w[0] * w[1],
                a22: rc2 - w[0] * w[0],
                f,
                cut_active,
                margin: 1.0 - g / qh,
            })
        }
    }
}

/// Incompressible closure: `ρ = 𝔾(s)`, `p = ρ(𝔹 − q²/2)`.
pub fn incompressible_closure(closure: &StreamClosure, s: f64, g: f64) -> Result<GasState, ClosureError> {
    let v = closure.values(s);
    incompressible_from_values(&v, s, g)
}

pub fn incompressible_from_values(v: &StreamValues, s: f64, g: f64) -> Result<GasState, ClosureError> {
    let rho = v.s;
    let q = g / rho;
    let deficit = v.b - 0.5 * q * q;
    if deficit < 0.0 {
        return Err(ClosureError::StagnationEnergy { s, deficit });
    }
    Ok(GasState { rho, q, c: f64::INFINITY, mach: 0.0, p: rho * deficit })
}

/// Closure state for either gas law at given stream values.
pub fn state_from_values(law: GasLaw, v: &StreamValues, s: f64, g: f64) -> Result<GasState, ClosureError> {
    match law {
        GasLaw::Polytropic { gamma } => density_from_values(v, gamma, g, s),
        GasLaw::Incompressible => incompressible_from_values(v, s, g),
    }
}
