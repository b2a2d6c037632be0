//! Upstream data and the stream-coordinate functions built from them.
//!
//! An [`InletProfile`] holds `(u₁₋, S₋)` on the inlet section `[0, 1]`.
//! Given the mass flux `m`, the inlet pressure is fixed by the flux
//! integral, the inlet stream function `ψ₋(x₂) = ∫₀^{x₂} ρ₋u₁₋` is tabulated,
//! and the transported Bernoulli and entropy functions are stored as tables
//! of `s = ψ` in a [`StreamClosure`].
//!
//! Discontinuous data are smoothed by [`mollify`], which only touches the
//! interior `[ε₀, 1 − ε₀]` so the wall conditions survive unchanged.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{ConditionId, InletError};
use crate::numerics::{integrate_adaptive, GaussRule, HermiteTable, MonotoneCubic};

/// Which one-sided limit to take at a jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A scalar function of the inlet coordinate `x₂ ∈ [0, 1]`.
pub trait Profile: Send + Sync + fmt::Debug {
    /// Value and derivative; at a jump `side` selects the one-sided limit.
    fn eval2(&self, x: f64, side: Side) -> (f64, f64);

    /// Jump locations in (0, 1).
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn value(&self, x: f64) -> f64 {
        self.eval2(x, Side::Right).0
    }
}

pub type ProfileRef = Arc<dyn Profile>;

#[derive(Debug, Clone)]
pub struct Constant(pub f64);

impl Profile for Constant {
    fn eval2(&self, _x: f64, _side: Side) -> (f64, f64) {
        (self.0, 0.0)
    }
}

/// `Σ cₖ x^k`.
#[derive(Debug, Clone)]
pub struct Polynomial(pub Vec<f64>);

impl Profile for Polynomial {
    fn eval2(&self, x: f64, _side: Side) -> (f64, f64) {
        let mut v = 0.0;
        let mut d = 0.0;
        for &c in self.0.iter().rev() {
            d = d * x + v;
            v = v * x + c;
        }
        (v, d)
    }
}

/// `below` on `[0, x_d)`, `above` on `[x_d, 1]`.
#[derive(Debug, Clone)]
pub struct Piecewise {
    pub x_d: f64,
    pub below: ProfileRef,
    pub above: ProfileRef,
}

impl Piecewise {
    pub fn two_state(x_d: f64, lo: f64, hi: f64) -> Self {
        Piecewise { x_d, below: Arc::new(Constant(lo)), above: Arc::new(Constant(hi)) }
    }
}

impl Profile for Piecewise {
    fn eval2(&self, x: f64, side: Side) -> (f64, f64) {
        let below = x < self.x_d || (x == self.x_d && side == Side::Left);
        if below {
            self.below.eval2(x, side)
        } else {
            self.above.eval2(x, side)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.below.breakpoints();
        b.push(self.x_d);
        b.extend(self.above.breakpoints());
        b.retain(|v| *v > 0.0 && *v < 1.0);
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

/// Dense samples with shape-preserving cubic interpolation.
#[derive(Debug, Clone)]
pub struct Tabulated(pub MonotoneCubic);

impl Profile for Tabulated {
    fn eval2(&self, x: f64, _side: Side) -> (f64, f64) {
        let (v, d, _) = self.0.eval3(x);
        (v, d)
    }
}

/// `u² S^{−1/γ}` assembled from the two data profiles.
#[derive(Debug, Clone)]
struct SpeedEntropy {
    u: ProfileRef,
    s: ProfileRef,
    gamma: f64,
}

impl Profile for SpeedEntropy {
    fn eval2(&self, x: f64, side: Side) -> (f64, f64) {
        let (u, du) = self.u.eval2(x, side);
        let (s, ds) = self.s.eval2(x, side);
        let k = s.powf(-1.0 / self.gamma);
        let v = u * u * k;
        (v, 2.0 * u * du * k - v * ds / (self.gamma * s))
    }

    fn breakpoints(&self) -> Vec<f64> {
        merge_breaks(&self.u.breakpoints(), &self.s.breakpoints())
    }
}

fn merge_breaks(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = a.iter().chain(b).copied().collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

// Normalized bump kernel j(t) = exp(−1/(1−t²))/C on (−1, 1).
struct Bump {
    norm: f64,
    cumulative: HermiteTable,
}

fn bump_raw(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

fn bump() -> &'static Bump {
    static BUMP: OnceLock<Bump> = OnceLock::new();
    BUMP.get_or_init(|| {
        let g = GaussRule::new(16);
        let n = 4097;
        let h = 2.0 / (n - 1) as f64;
        let mut cum = vec![0.0; n];
        for k in 1..n {
            let a = -1.0 + (k - 1) as f64 * h;
            cum[k] = cum[k - 1] + g.integrate(bump_raw, a, a + h, 1);
        }
        let norm = cum[n - 1];
        let cumulative = HermiteTable::sample(-1.0, 1.0, n, |t| {
            let k = (((t + 1.0) / h).round() as usize).min(n - 1);
            (cum[k] / norm, bump_raw(t) / norm)
        });
        Bump { norm, cumulative }
    })
}

/// Kernel j₁ and its derivative.
fn kernel(t: f64) -> (f64, f64) {
    if t.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let b = bump();
    let d = 1.0 - t * t;
    let v = bump_raw(t) / b.norm;
    (v, -2.0 * t * v / (d * d))
}

/// ∫_{−1}^{t} j₁.
fn kernel_cdf(t: f64) -> f64 {
    if t <= -1.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        bump().cumulative.eval2(t).0
    }
}

/// `M_ε(g) = (1 − χ)g + (χg) ∗ j_ε` with `χ = I_{[ε₀, 1−ε₀]} ∗ j_ε`.
#[derive(Debug, Clone)]
pub struct Mollified {
    base: ProfileRef,
    eps: f64,
    eps0: f64,
    base_breaks: Vec<f64>,
}

impl Mollified {
    pub fn new(base: ProfileRef, eps: f64, eps0: f64) -> Self {
        let base_breaks = base.breakpoints();
        Mollified { base, eps, eps0, base_breaks }
    }

    fn chi(&self, x: f64) -> (f64, f64) {
        let e = self.eps;
        let a = (x - self.eps0) / e;
        let b = (x - 1.0 + self.eps0) / e;
        (kernel_cdf(a) - kernel_cdf(b), (kernel(a).0 - kernel(b).0) / e)
    }

    /// (χg) ∗ j_ε and its derivative at x.
    fn convolution(&self, x: f64) -> (f64, f64) {
        let e = self.eps;
        let mut cuts = vec![-e];
        for &xd in &self.base_breaks {
            let t = x - xd;
            if t > -e && t < e {
                cuts.push(t);
            }
        }
        cuts.push(e);
        cuts.sort_by(f64::total_cmp);
        let rule = gauss8();
        let mut v = 0.0;
        let mut d = 0.0;
        // the rule's own kernel mass, so that constants are reproduced exactly
        let mut mass = 0.0;
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi <= lo {
                continue;
            }
            let panels = 8;
            let h = (hi - lo) / panels as f64;
            for p in 0..panels {
                let c = lo + (p as f64 + 0.5) * h;
                for (node, wt) in rule.nodes.iter().zip(&rule.weights) {
                    let t = c + 0.5 * h * node;
                    let y = x - t;
                    let (k, dk) = kernel(t / e);
                    mass += 0.5 * h * wt * k / e;
                    let (chi, _) = self.chi(y);
                    if chi == 0.0 {
                        continue;
                    }
                    let (g, _) = self.base.eval2(y, Side::Right);
                    let ww = 0.5 * h * wt * chi * g;
                    v += ww * k / e;
                    d += ww * dk / (e * e);
                }
            }
        }
        (v / mass, d / mass)
    }
}

fn gauss8() -> &'static GaussRule {
    static G: OnceLock<GaussRule> = OnceLock::new();
    G.get_or_init(|| GaussRule::new(8))
}

impl Profile for Mollified {
    fn eval2(&self, x: f64, side: Side) -> (f64, f64) {
        let (chi, dchi) = self.chi(x);
        let (cv, cd) = self.convolution(x);
        if chi >= 1.0 {
            return (cv, cd);
        }
        let (g, dg) = self.base.eval2(x, side);
        ((1.0 - chi) * g + cv, -dchi * g + (1.0 - chi) * dg + cd)
    }
}

/// `u = M_ε(u²S^{−1/γ})^{1/2} M_ε(S)^{1/(2γ)}`.
#[derive(Debug, Clone)]
struct MollifiedSpeed {
    a: Arc<Mollified>,
    s: Arc<Mollified>,
    gamma: f64,
}

impl Profile for MollifiedSpeed {
    fn eval2(&self, x: f64, side: Side) -> (f64, f64) {
        let (a, da) = self.a.eval2(x, side);
        let (s, ds) = self.s.eval2(x, side);
        let ra = a.sqrt();
        let sp = s.powf(0.5 / self.gamma);
        (ra * sp, 0.5 * da / ra * sp + ra * sp * ds * 0.5 / (self.gamma * s))
    }
}

/// Upstream state `(u₁₋, S₋)` on the inlet section.
#[derive(Debug, Clone)]
pub struct InletProfile {
    pub u1m: ProfileRef,
    pub sm: ProfileRef,
    /// Jump locations of the (unmollified) data.
    pub jumps: Vec<f64>,
    /// Exterior-force potential Φ as a function of the inlet label x₂.
    pub phi_ext: Option<ProfileRef>,
    pub gamma: f64,
    /// Separation scale ε₀ of the wall and jump neighbourhoods.
    pub eps0: f64,
    /// Mollification width when this profile came from [`mollify`].
    pub mollified: Option<f64>,
    /// Downgrade violated jump sign conditions from an error to a warning.
    pub allow_unsigned_jump: bool,
}

impl InletProfile {
    pub fn new(u1m: ProfileRef, sm: ProfileRef, gamma: f64) -> Self {
        let jumps = merge_breaks(&u1m.breakpoints(), &sm.breakpoints());
        InletProfile { u1m, sm, jumps, phi_ext: None, gamma, eps0: 0.1, mollified: None, allow_unsigned_jump: false }
    }

    pub fn constant(u: f64, s: f64, gamma: f64) -> Self {
        Self::new(Arc::new(Constant(u)), Arc::new(Constant(s)), gamma)
    }

    pub fn with_phi(mut self, phi: ProfileRef) -> Self {
        self.phi_ext = Some(phi);
        self
    }

    pub fn with_eps0(mut self, eps0: f64) -> Self {
        self.eps0 = eps0;
        self
    }

    /// `u₁₋² S₋^{−1/γ}`.
    pub fn speed_entropy(&self) -> ProfileRef {
        Arc::new(SpeedEntropy { u: self.u1m.clone(), s: self.sm.clone(), gamma: self.gamma })
    }

    /// Breakpoints for quadrature: jumps plus the edges of mollified layers.
    fn quadrature_breaks(&self) -> Vec<f64> {
        let mut b = self.jumps.clone();
        if let Some(e) = self.mollified {
            for &xd in &self.jumps {
                b.push(xd - e);
                b.push(xd + e);
            }
            for c in [self.eps0, 1.0 - self.eps0] {
                b.push(c - e);
                b.push(c + e);
            }
        }
        b.push(0.0);
        b.push(1.0);
        b.retain(|v| *v >= 0.0 && *v <= 1.0);
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// `∫₀¹ u₁₋ S₋^{−1/γ}`.
    pub fn flux_integral(&self) -> Result<f64, InletError> {
        let g = self.gamma;
        let mut total = 0.0;
        for w in self.quadrature_breaks().windows(2) {
            total += integrate_adaptive(
                |x| {
                    let side = if x == w[1] { Side::Left } else { Side::Right };
                    let u = self.u1m.eval2(x, side).0;
                    let s = self.sm.eval2(x, side).0;
                    u * s.powf(-1.0 / g)
                },
                w[0],
                w[1],
                1e-16,
                1e-14,
            )?;
        }
        if !(total.is_finite() && total > 0.0) {
            return Err(InletError::Condition {
                id: ConditionId::InletPositive,
                detail: format!("flux integral is not positive and finite: {total}"),
            });
        }
        Ok(total)
    }

    /// Sample points covering [0, 1], both sides of every jump included.
    fn scan_points(&self, n: usize) -> Vec<(f64, Side)> {
        let mut pts: Vec<(f64, Side)> = (0..n).map(|k| (k as f64 / (n - 1) as f64, Side::Right)).collect();
        pts.last_mut().unwrap().1 = Side::Left;
        for &xd in &self.jumps {
            pts.push((xd, Side::Left));
            pts.push((xd, Side::Right));
        }
        pts
    }

    /// Extremum of `u₁₋²S₋^{−1/γ}` over the inlet, one-sided values at jumps included.
    pub fn speed_entropy_extremum(&self, maximize: bool) -> f64 {
        let f = self.speed_entropy();
        let sign = if maximize { 1.0 } else { -1.0 };
        let n = 4097;
        let mut best = f64::NEG_INFINITY;
        let mut best_x = 0.0;
        for (x, side) in self.scan_points(n) {
            let v = sign * f.eval2(x, side).0;
            if v > best {
                best = v;
                best_x = x;
            }
        }
        // golden-section polish within one sample spacing
        let h = 1.0 / (n - 1) as f64;
        let (mut lo, mut hi) = ((best_x - h).max(0.0), (best_x + h).min(1.0));
        let breaks = &self.jumps;
        if breaks.iter().any(|&xd| xd > lo && xd < hi) {
            return sign * best;
        }
        let r = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..60 {
            let c = hi - r * (hi - lo);
            let d = lo + r * (hi - lo);
            if sign * f.value(c) > sign * f.value(d) {
                hi = d;
            } else {
                lo = c;
            }
        }
        let polished = sign * f.value(0.5 * (lo + hi));
        sign * best.max(polished)
    }

    /// Check positivity, wall monotonicity and the one-sided jump conditions.
    /// Returns warnings for conditions downgraded by `allow_unsigned_jump`.
    pub fn validate(&self) -> Result<Vec<String>, InletError> {
        if !(self.gamma > 1.0) {
            return Err(InletError::Parameter(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        if self.jumps.len() > 1 {
            return Err(InletError::Parameter(format!("at most one jump is supported, got {}", self.jumps.len())));
        }
        let mut warnings = Vec::new();
        for (x, side) in self.scan_points(2001) {
            let u = self.u1m.eval2(x, side).0;
            let s = self.sm.eval2(x, side).0;
            if !(u > 0.0 && s > 0.0 && u.is_finite() && s.is_finite()) {
                return Err(InletError::Condition {
                    id: ConditionId::InletPositive,
                    detail: format!("u1 = {u}, S = {s} at x2 = {x}; both must be positive"),
                });
            }
        }
        let f = self.speed_entropy();
        let scale = f.value(0.5).abs().max(1e-300);
        let d0 = f.eval2(0.0, Side::Right).1;
        let d1 = f.eval2(1.0, Side::Left).1;
        if d0 > 1e-10 * scale || d1 < -1e-10 * scale {
            return Err(InletError::Condition {
                id: ConditionId::InletWallMonotone,
                detail: format!(
                    "(u1^2 S^(-1/gamma))' must be <= 0 at x2 = 0 and >= 0 at x2 = 1; got {d0:.6e} and {d1:.6e}"
                ),
            });
        }
        if let Some(&xd) = self.jumps.first() {
            if let Err(msg) = jump_signs(&*f, &*self.sm, xd, self.eps0) {
                if self.allow_unsigned_jump {
                    warnings.push(format!("[{}] {msg}", ConditionId::InletJumpSign));
                } else {
                    return Err(InletError::Condition { id: ConditionId::InletJumpSign, detail: msg });
                }
            }
        }
        Ok(warnings)
    }
}

/// Either the data increase into the jump from below with non-negative jumps,
/// or decrease away from it above with non-positive jumps; one strict.
fn jump_signs(f: &dyn Profile, s: &dyn Profile, xd: f64, eps0: f64) -> Result<(), String> {
    let jf = f.eval2(xd, Side::Right).0 - f.eval2(xd, Side::Left).0;
    let js = s.eval2(xd, Side::Right).0 - s.eval2(xd, Side::Left).0;
    let n = 200;
    let tol = 1e-10 * (1.0 + f.eval2(xd, Side::Left).0.abs() + s.eval2(xd, Side::Left).0.abs());
    let mut below_ok = jf >= -tol && js >= -tol;
    let mut above_ok = jf <= tol && js <= tol;
    for k in 1..n {
        let t = eps0 * k as f64 / n as f64;
        let (_, dfb) = f.eval2(xd - t, Side::Left);
        let (_, dsb) = s.eval2(xd - t, Side::Left);
        if dfb < -tol || dsb < -tol {
            below_ok = false;
        }
        let (_, dfa) = f.eval2(xd + t, Side::Right);
        let (_, dsa) = s.eval2(xd + t, Side::Right);
        if dfa > tol || dsa > tol {
            above_ok = false;
        }
    }
    let strict = jf.abs() > tol || js.abs() > tol;
    if (below_ok || above_ok) && strict {
        Ok(())
    } else {
        Err(format!(
            "jump at x_d = {xd}: [u1^2 S^(-1/gamma)] = {jf:.6e}, [S] = {js:.6e}; neither one-sided sign set holds with a strict jump"
        ))
    }
}

/// `p₋ = ((γ−1)/γ) m^γ (∫ u₁₋S₋^{−1/γ})^{−γ}`.
pub fn inlet_pressure(profile: &InletProfile, m: f64) -> Result<f64, InletError> {
    if !(m > 0.0) {
        return Err(InletError::Parameter(format!("mass flux must be positive, got {m}")));
    }
    let g = profile.gamma;
    let i = profile.flux_integral()?;
    Ok((g - 1.0) / g * (m / i).powf(g))
}

/// Inlet Bernoulli function (minus Φ when an exterior potential is present).
#[derive(Debug, Clone)]
pub struct BernoulliProfile {
    profile: InletProfile,
    /// `m^{γ−1} (∫ u₁₋S₋^{−1/γ})^{1−γ}`.
    pub enthalpy_scale: f64,
}

impl BernoulliProfile {
    /// `B₋` and its derivative at `x`.
    pub fn eval2(&self, x: f64, side: Side) -> (f64, f64) {
        let g = self.profile.gamma;
        let (u, du) = self.profile.u1m.eval2(x, side);
        let (s, ds) = self.profile.sm.eval2(x, side);
        let sg = s.powf(1.0 / g);
        let mut b = 0.5 * u * u + self.enthalpy_scale * sg;
        let mut db = u * du + self.enthalpy_scale * sg * ds / (g * s);
        if let Some(phi) = &self.profile.phi_ext {
            let (p, dp) = phi.eval2(x, side);
            b -= p;
            db -= dp;
        }
        (b, db)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval2(x, Side::Right).0
    }
}

pub fn bernoulli_profile(profile: &InletProfile, m: f64) -> Result<BernoulliProfile, InletError> {
    if !(m > 0.0) {
        return Err(InletError::Parameter(format!("mass flux must be positive, got {m}")));
    }
    let g = profile.gamma;
    let i = profile.flux_integral()?;
    Ok(BernoulliProfile { profile: profile.clone(), enthalpy_scale: (m / i).powf(g - 1.0) })
}

/// Mass flux above which every inlet point is strictly subsonic.
pub fn m_hat(profile: &InletProfile) -> Result<f64, InletError> {
    let g = profile.gamma;
    let i = profile.flux_integral()?;
    let mx = profile.speed_entropy_extremum(true);
    Ok((g - 1.0).powf(-1.0 / (g - 1.0)) * mx.powf(1.0 / (g - 1.0)) * i)
}

/// Largest inlet Mach number at mass flux `m`.
pub fn max_inlet_mach(profile: &InletProfile, m: f64) -> Result<f64, InletError> {
    let g = profile.gamma;
    let scale = bernoulli_profile(profile, m)?.enthalpy_scale;
    // c² = (γ−1) S^{1/γ} m^{γ−1} I^{1−γ}, so M² = u² S^{−1/γ}/((γ−1)·scale)
    let mx = profile.speed_entropy_extremum(true);
    Ok((mx / ((g - 1.0) * scale)).sqrt())
}

/// Smooth the data by `M_ε` on `[ε₀, 1 − ε₀]`.
pub fn mollify(profile: &InletProfile, eps: f64) -> Result<InletProfile, InletError> {
    if !(eps > 0.0 && eps < profile.eps0) {
        return Err(InletError::Parameter(format!(
            "mollification width must satisfy 0 < eps < eps0 = {}, got {eps}",
            profile.eps0
        )));
    }
    for &xd in &profile.jumps {
        if xd - eps <= profile.eps0 + eps || xd + eps >= 1.0 - profile.eps0 - eps {
            return Err(InletError::Parameter(format!(
                "jump at {xd} is within eps of the wall neighbourhoods [0, {e0}] or [{}, 1]",
                1.0 - profile.eps0,
                e0 = profile.eps0
            )));
        }
    }
    let s = Arc::new(Mollified::new(profile.sm.clone(), eps, profile.eps0));
    let a = Arc::new(Mollified::new(profile.speed_entropy(), eps, profile.eps0));
    let u = Arc::new(MollifiedSpeed { a, s: s.clone(), gamma: profile.gamma });
    let mut out = profile.clone();
    out.u1m = u;
    out.sm = s;
    out.mollified = Some(eps);
    // jumps are kept so m_d and quadrature breaks remain available
    Ok(out)
}

/// Monotone table of `ψ₋(x₂)`: cumulative Gauss sums on cells split at jumps.
#[derive(Debug, Clone)]
pub struct PsiTable {
    xs: Vec<f64>,
    cum: Vec<f64>,
    /// ρ₋u₁₋ = scale · u₁₋S₋^{−1/γ}
    scale: f64,
    u: ProfileRef,
    s: ProfileRef,
    gamma: f64,
}

impl PsiTable {
    fn density_flux(&self, x: f64, side: Side) -> f64 {
        let u = self.u.eval2(x, side).0;
        let s = self.s.eval2(x, side).0;
        self.scale * u * s.powf(-1.0 / self.gamma)
    }

    fn cell_integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let g = gauss8();
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        g.nodes.iter().zip(&g.weights).map(|(x, w)| w * self.density_flux(c + h * x, Side::Right)).sum::<f64>() * h
    }

    fn cell(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    /// ψ₋(x₂).
    pub fn psi(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let i = self.cell(x);
        self.cum[i] + self.cell_integral(self.xs[i], x)
    }

    pub fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// ψ₋⁻¹(s) by safeguarded Newton inside the bracketing cell.
    pub fn inverse(&self, s: f64) -> f64 {
        let total = self.total();
        if s <= 0.0 {
            return 0.0;
        }
        if s >= total {
            return 1.0;
        }
        let i = match self.cum.binary_search_by(|v| v.total_cmp(&s)) {
            Ok(i) => return self.xs[i],
            Err(i) => i - 1,
        };
        let (mut lo, mut hi) = (self.xs[i], self.xs[i + 1]);
        let (c0, c1) = (self.cum[i], self.cum[i + 1]);
        let mut x = lo + (hi - lo) * (s - c0) / (c1 - c0);
        for _ in 0..60 {
            let r = self.cum[i] + self.cell_integral(self.xs[i], x) - s;
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            if r.abs() <= 1e-15 * total {
                break;
            }
            let d = self.density_flux(x, Side::Right);
            let mut nx = x - r / d;
            if !(nx > lo && nx < hi) {
                nx = 0.5 * (lo + hi);
            }
            if (nx - x).abs() <= 1e-16 {
                x = nx;
                break;
            }
            x = nx;
        }
        x
    }
}

/// Table of a function of `s` on `[0, m]`, split at jumps so interpolation
/// never straddles one.
#[derive(Debug, Clone)]
pub struct StreamTable {
    breaks: Vec<f64>,
    segs: Vec<HermiteTable>,
}

impl StreamTable {
    fn seg(&self, s: f64, side: Side) -> &HermiteTable {
        let k = match side {
            Side::Right => self.breaks.iter().filter(|&&b| b <= s).count(),
            Side::Left => self.breaks.iter().filter(|&&b| b < s).count(),
        };
        &self.segs[k]
    }

    /// Value and derivative (one-sided at a jump).
    pub fn eval2(&self, s: f64, side: Side) -> (f64, f64) {
        self.seg(s, side).eval2(s)
    }
}

/// Gas law carried by a closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GasLaw {
    Polytropic {
        gamma: f64,
    },
    /// Density transported along streamlines, `ρ = 𝔾(ψ)`.
    Incompressible,
}

/// End data for the ramp extensions outside `[0, m]`, applied to `ln 𝔹` and
/// `ln 𝕊` so that the extended values stay positive.
#[derive(Debug, Clone, Copy)]
struct RampEnds {
    v0: f64,
    d0: f64,
    vm: f64,
    dm: f64,
}

impl RampEnds {
    /// Value and derivative of `v(0) + ∫₀^s F` (below) or `v(m) + ∫_m^s F` (above),
    /// with F ramping linearly to zero over one width m.
    fn eval(&self, s: f64, m: f64) -> (f64, f64) {
        if s < 0.0 {
            if s <= -m {
                (self.v0 - 0.5 * self.d0 * m, 0.0)
            } else {
                let t = s + m;
                (self.v0 + self.d0 * (t * t - m * m) / (2.0 * m), self.d0 * t / m)
            }
        } else if s >= 2.0 * m {
            (self.vm + 0.5 * self.dm * m, 0.0)
        } else {
            let t = 2.0 * m - s;
            (self.vm + self.dm * (m * m - t * t) / (2.0 * m), self.dm * t / m)
        }
    }
}

/// Transported Bernoulli and entropy (or density) functions of ψ, with the
/// cut-off parameter and the extensions outside `[0, m]`.
#[derive(Debug, Clone)]
pub struct StreamClosure {
    pub m: f64,
    pub law: GasLaw,
    pub psi_minus: PsiTable,
    /// 𝔹(s) on [0, m].
    pub btab: StreamTable,
    /// 𝕊(s) on [0, m] (polytropic) or 𝔾(s) (incompressible).
    pub stab: StreamTable,
    /// Stream value of the jump, if any.
    pub m_d: Option<f64>,
    pub eps_cut: f64,
    pub p_minus: f64,
    pub m_hat: f64,
    /// True when the data carry an unmollified jump.
    pub has_jump: bool,
    s_ends: RampEnds,
    k_ends: RampEnds,
}

/// Stream-function values of `𝔹, 𝕊` and derivatives at one `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamValues {
    pub b: f64,
    pub db: f64,
    pub s: f64,
    pub ds: f64,
}

impl StreamClosure {
    pub fn gamma(&self) -> f64 {
        match self.law {
            GasLaw::Polytropic { gamma } => gamma,
            GasLaw::Incompressible => f64::INFINITY,
        }
    }

    /// Extended 𝔹̃, 𝕊̃ (𝔾̃ in incompressible mode) and derivatives; equal to
    /// the tables on `[0, m]`.
    pub fn values(&self, s: f64) -> StreamValues {
        self.values_side(s, Side::Right)
    }

    pub fn values_side(&self, s: f64, side: Side) -> StreamValues {
        let m = self.m;
        if (0.0..=m).contains(&s) {
            let (b, db) = self.btab.eval2(s, side);
            let (sv, ds) = self.stab.eval2(s, side);
            return StreamValues { b, db, s: sv, ds };
        }
        // ramps act on the logarithms so the extensions stay positive
        let (ls, dls) = self.s_ends.eval(s, m);
        let (lk, dlk) = self.k_ends.eval(s, m);
        let (sv, kv) = (ls.exp(), lk.exp());
        let (ds, dk) = (sv * dls, kv * dlk);
        match self.law {
            GasLaw::Polytropic { gamma } => {
                let sp = sv.powf(1.0 / gamma);
                let b = sp * kv;
                let db = sp * ds * kv / (gamma * sv) + sp * dk;
                StreamValues { b, db, s: sv, ds }
            }
            GasLaw::Incompressible => StreamValues { b: kv, db: dk, s: sv, ds },
        }
    }
}

const TABLE_SAMPLES: usize = 2048;
const PSI_CELLS: usize = 4096;

fn build_psi_table(u: ProfileRef, s: ProfileRef, gamma: f64, scale: f64, breaks: &[f64]) -> PsiTable {
    let mut xs = vec![0.0];
    let mut edges = vec![0.0];
    edges.extend(breaks.iter().copied().filter(|b| *b > 0.0 && *b < 1.0));
    edges.push(1.0);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    for w in edges.windows(2) {
        let n = ((PSI_CELLS as f64 * (w[1] - w[0])).ceil() as usize).max(4);
        for k in 1..=n {
            xs.push(if k == n { w[1] } else { w[0] + (w[1] - w[0]) * k as f64 / n as f64 });
        }
    }
    let mut table = PsiTable { xs, cum: Vec::new(), scale, u, s, gamma };
    let mut cum = vec![0.0; table.xs.len()];
    for i in 1..table.xs.len() {
        cum[i] = cum[i - 1] + table.cell_integral(table.xs[i - 1], table.xs[i]);
    }
    table.cum = cum;
    table
}

/// Sample `f(x, side) -> (value, d/dx)` on `[0, m]` through `ψ₋⁻¹`, one
/// Hermite table per smooth piece.
fn stream_table<F>(psi: &PsiTable, jumps_x: &[f64], m: f64, flux: &dyn Fn(f64, Side) -> f64, f: F) -> StreamTable
where
    F: Fn(f64, Side) -> (f64, f64),
{
    let mut breaks_s: Vec<f64> = jumps_x.iter().map(|&x| psi.psi(x)).collect();
    breaks_s.sort_by(f64::total_cmp);
    let mut edges = vec![0.0];
    edges.extend(breaks_s.iter().copied());
    edges.push(m);
    let mut segs = Vec::new();
    for w in edges.windows(2) {
        let (s0, s1) = (w[0], w[1]);
        let n = ((TABLE_SAMPLES as f64 * (s1 - s0) / m).ceil() as usize).max(16);
        let x0 = psi.inverse(s0);
        let x1 = psi.inverse(s1);
        segs.push(HermiteTable::sample(s0, s1, n, |s| {
            let (x, side) = if s <= s0 {
                (x0, Side::Right)
            } else if s >= s1 {
                (x1, Side::Left)
            } else {
                (psi.inverse(s), Side::Right)
            };
            let (v, dv) = f(x, side);
            (v, dv / flux(x, side))
        }));
    }
    StreamTable { breaks: breaks_s, segs }
}

/// Tabulate `𝔹, 𝕊` as functions of ψ for mass flux `m` and cut-off `eps_cut`.
pub fn build_closure(profile: &InletProfile, m: f64, eps_cut: f64) -> Result<StreamClosure, InletError> {
    let mh = m_hat(profile)?;
    if !(m > mh) {
        return Err(InletError::Condition {
            id: ConditionId::InletSubsonic,
            detail: format!("mass flux m = {m} must exceed m_hat = {mh} for a subsonic inlet"),
        });
    }
    if !(eps_cut > 0.0 && eps_cut < 0.25) {
        return Err(InletError::Parameter(format!("cut-off eps must lie in (0, 0.25), got {eps_cut}")));
    }
    let g = profile.gamma;
    let i = profile.flux_integral()?;
    let p_minus = (g - 1.0) / g * (m / i).powf(g);
    let bern = bernoulli_profile(profile, m)?;
    let breaks = profile.quadrature_breaks();
    let psi = build_psi_table(profile.u1m.clone(), profile.sm.clone(), g, m / i, &breaks);
    let total = psi.total();
    if ((total - m) / m).abs() > 1e-9 {
        return Err(InletError::Internal(format!("inlet stream function ends at {total}, expected {m}")));
    }
    if psi.cum.windows(2).any(|w| w[1] <= w[0]) {
        return Err(InletError::Internal("inlet stream function is not strictly increasing".into()));
    }
    let flux = |x: f64, side: Side| psi.density_flux(x, side);
    let jumps = if profile.mollified.is_some() { Vec::new() } else { profile.jumps.clone() };
    let btab = stream_table(&psi, &jumps, m, &flux, |x, side| bern.eval2(x, side));
    let sm = profile.sm.clone();
    let stab = stream_table(&psi, &jumps, m, &flux, |x, side| sm.eval2(x, side));
    let m_d = profile.jumps.first().map(|&xd| psi.psi(xd));
    finish_closure(m, GasLaw::Polytropic { gamma: g }, psi, btab, stab, m_d, eps_cut, p_minus, mh, !jumps.is_empty())
}

/// The closure of the same data without exterior force but with
/// `𝔹(s) − Φ(ψ₋⁻¹(s))` in place of `𝔹`, resampled on the nodes of `closure`.
pub fn shift_bernoulli(closure: &StreamClosure, phi: &dyn Profile) -> Result<StreamClosure, InletError> {
    let psi = &closure.psi_minus;
    let bt = &closure.btab;
    let mut segs = Vec::with_capacity(bt.segs.len());
    for (k, seg) in bt.segs.iter().enumerate() {
        let n = seg.values.len();
        let (s0, s1) = (seg.x0, seg.x1);
        segs.push(HermiteTable::sample(s0, s1, n, |s| {
            let side = if k > 0 && s <= s0 {
                Side::Right
            } else if s >= s1 {
                Side::Left
            } else {
                Side::Right
            };
            let (b, db) = bt.eval2(s, side);
            let x = psi.inverse(s);
            let (f, df) = phi.eval2(x, side);
            (b - f, db - df / psi.density_flux(x, side))
        }));
    }
    let btab = StreamTable { breaks: bt.breaks.clone(), segs };
    finish_closure(
        closure.m,
        closure.law,
        psi.clone(),
        btab,
        closure.stab.clone(),
        closure.m_d,
        closure.eps_cut,
        closure.p_minus,
        closure.m_hat,
        closure.has_jump,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish_closure(
    m: f64,
    law: GasLaw,
    psi: PsiTable,
    btab: StreamTable,
    stab: StreamTable,
    m_d: Option<f64>,
    eps_cut: f64,
    p_minus: f64,
    m_hat: f64,
    has_jump: bool,
) -> Result<StreamClosure, InletError> {
    let (s0, ds0) = stab.eval2(0.0, Side::Right);
    let (sm_, dsm) = stab.eval2(m, Side::Left);
    let (b0, db0) = btab.eval2(0.0, Side::Right);
    let (bm, dbm) = btab.eval2(m, Side::Left);
    let log_ends = |v0: f64, d0: f64, vm: f64, dm: f64| -> Result<RampEnds, InletError> {
        if !(v0 > 0.0 && vm > 0.0) {
            return Err(InletError::Internal(format!("closure end values must be positive, got {v0} and {vm}")));
        }
        Ok(RampEnds { v0: v0.ln(), d0: d0 / v0, vm: vm.ln(), dm: dm / vm })
    };
    let s_ends = log_ends(s0, ds0, sm_, dsm)?;
    let k_ends = match law {
        GasLaw::Polytropic { gamma } => {
            // K = 𝔹𝕊^{−1/γ}
            let k = |b: f64, db: f64, s: f64, ds: f64| {
                let sp = s.powf(-1.0 / gamma);
                (b * sp, db * sp - b * sp * ds / (gamma * s))
            };
            let (k0, dk0) = k(b0, db0, s0, ds0);
            let (km, dkm) = k(bm, dbm, sm_, dsm);
            log_ends(k0, dk0, km, dkm)?
        }
        GasLaw::Incompressible => log_ends(b0, db0, bm, dbm)?,
    };
    let closure =
        StreamClosure { m, law, psi_minus: psi, btab, stab, m_d, eps_cut, p_minus, m_hat, has_jump, s_ends, k_ends };
    for s in [-1.5 * m, -m, -0.5 * m, 1.5 * m, 2.0 * m, 2.5 * m] {
        let v = closure.values(s);
        if !(v.b > 0.0 && v.s > 0.0) {
            return Err(InletError::Internal(format!(
                "ramp extension loses positivity at s = {s}: B = {}, S = {}",
                v.b, v.s
            )));
        }
    }
    Ok(closure)
}

/// Incompressible upstream data `(u₁₋, ρ₋)` with reference inlet pressure.
#[derive(Debug, Clone)]
pub struct IncompressibleInlet {
    pub u1m: ProfileRef,
    pub rho: ProfileRef,
    pub jumps: Vec<f64>,
    pub p_ref: f64,
    pub eps0: f64,
    pub phi_ext: Option<ProfileRef>,
}

#[derive(Debug, Clone)]
struct MomentumFlux {
    u: ProfileRef,
    rho: ProfileRef,
}

impl Profile for MomentumFlux {
    fn eval2(&self, x: f64, side: Side) -> (f64, f64) {
        let (u, du) = self.u.eval2(x, side);
        let (r, dr) = self.rho.eval2(x, side);
        (r * u * u, dr * u * u + 2.0 * r * u * du)
    }
}

impl IncompressibleInlet {
    pub fn new(u1m: ProfileRef, rho: ProfileRef) -> Self {
        let jumps = merge_breaks(&u1m.breakpoints(), &rho.breakpoints());
        IncompressibleInlet { u1m, rho, jumps, p_ref: 1.0, eps0: 0.1, phi_ext: None }
    }

    /// `m = ∫₀¹ ρ₋u₁₋`.
    pub fn mass_flux(&self) -> Result<f64, InletError> {
        let mut edges = vec![0.0];
        edges.extend(self.jumps.iter().copied());
        edges.push(1.0);
        let mut total = 0.0;
        for w in edges.windows(2) {
            total += integrate_adaptive(
                |x| {
                    let side = if x == w[1] { Side::Left } else { Side::Right };
                    self.u1m.eval2(x, side).0 * self.rho.eval2(x, side).0
                },
                w[0],
                w[1],
                1e-16,
                1e-14,
            )?;
        }
        Ok(total)
    }

    /// Positivity, wall monotonicity of ρu² and the jump sign conditions.
    pub fn validate(&self) -> Result<(), InletError> {
        for k in 0..2001 {
            let x = k as f64 / 2000.0;
            let u = self.u1m.value(x);
            let r = self.rho.value(x);
            if !(u > 0.0 && r > 0.0) {
                return Err(InletError::Condition {
                    id: ConditionId::IncompressiblePositive,
                    detail: format!("u1 = {u}, rho = {r} at x2 = {x}; both must be positive"),
                });
            }
        }
        let f = MomentumFlux { u: self.u1m.clone(), rho: self.rho.clone() };
        let scale = f.value(0.5).abs();
        let d0 = f.eval2(0.0, Side::Right).1;
        let d1 = f.eval2(1.0, Side::Left).1;
        if d0 > 1e-10 * scale || d1 < -1e-10 * scale {
            return Err(InletError::Condition {
                id: ConditionId::IncompressibleWallMonotone,
                detail: format!("(rho u1^2)' must be <= 0 at x2 = 0 and >= 0 at x2 = 1; got {d0:.6e} and {d1:.6e}"),
            });
        }
        if let Some(&xd) = self.jumps.first() {
            // the density enters with the opposite sign to the entropy
            let neg_rho = Negated(self.rho.clone());
            jump_signs(&f, &neg_rho, xd, self.eps0)
                .map_err(|detail| InletError::Condition { id: ConditionId::IncompressibleJumpSign, detail })?;
        }
        Ok(())
    }

    /// Tabulate `𝔹 = ½u² + p_ref/ρ − Φ` and `𝔾 = ρ` as functions of ψ.
    pub fn build_closure(&self) -> Result<StreamClosure, InletError> {
        let m = self.mass_flux()?;
        let mut edges = self.jumps.clone();
        edges.push(0.0);
        edges.push(1.0);
        // ψ₋ with unit scale: the density flux is u·ρ, handled by γ = −1 trick avoided; use a product profile
        let prod: ProfileRef = Arc::new(Product(self.u1m.clone(), self.rho.clone()));
        let psi = build_psi_table(prod, Arc::new(Constant(1.0)), 1.0, 1.0, &edges);
        let total = psi.total();
        if ((total - m) / m).abs() > 1e-9 {
            return Err(InletError::Internal(format!("inlet stream function ends at {total}, expected {m}")));
        }
        let flux = |x: f64, side: Side| psi.density_flux(x, side);
        let (u, rho, p, phi) = (self.u1m.clone(), self.rho.clone(), self.p_ref, self.phi_ext.clone());
        let bern = move |x: f64, side: Side| {
            let (uv, du) = u.eval2(x, side);
            let (r, dr) = rho.eval2(x, side);
            let mut b = 0.5 * uv * uv + p / r;
            let mut db = uv * du - p * dr / (r * r);
            if let Some(phi) = &phi {
                let (f, df) = phi.eval2(x, side);
                b -= f;
                db -= df;
            }
            (b, db)
        };
        let btab = stream_table(&psi, &self.jumps, m, &flux, bern);
        let rho = self.rho.clone();
        let stab = stream_table(&psi, &self.jumps, m, &flux, |x, side| rho.eval2(x, side));
        let m_d = self.jumps.first().map(|&xd| psi.psi(xd));
        finish_closure(m, GasLaw::Incompressible, psi, btab, stab, m_d, 0.05, self.p_ref, 0.0, !self.jumps.is_empty())
    }

    /// The polytropic profile with `G = ρ p^{−1/γ}` held fixed: with
    /// `S₋ = γ/(γ−1)·G^{−γ}·p_ref` and `m = ∫ρ₋u₁₋`, the inlet reproduces
    /// `ρ₋ = 𝔾` and `p₋ = p_ref` for every γ.
    pub fn polytropic(&self, gamma: f64) -> Result<(InletProfile, f64), InletError> {
        let m = self.mass_flux()?;
        let s: ProfileRef = Arc::new(EntropyFromDensity { rho: self.rho.clone(), gamma, p_ref: self.p_ref });
        let mut prof = InletProfile::new(self.u1m.clone(), s, gamma);
        prof.jumps = self.jumps.clone();
        prof.eps0 = self.eps0;
        prof.phi_ext = self.phi_ext.clone();
        Ok((prof, m))
    }
}

#[derive(Debug, Clone)]
struct Negated(ProfileRef);

impl Profile for Negated {
    fn eval2(&self, x: f64, side: Side) -> (f64, f64) {
        let (v, d) = self.0.eval2(x, side);
        (-v, -d)
    }
}

#[derive(Debug, Clone)]
struct Product(ProfileRef, ProfileRef);

impl Profile for Product {
    fn eval2(&self, x: f64, side: Side) -> (f64, f64) {
        let (a, da) = self.0.eval2(x, side);
        let (b, db) = self.1.eval2(x, side);
        (a * b, da * b + a * db)
    }

    fn breakpoints(&self) -> Vec<f64> {
        merge_breaks(&self.0.breakpoints(), &self.1.breakpoints())
    }
}

#[derive(Debug, Clone)]
struct EntropyFromDensity {
    rho: ProfileRef,
    gamma: f64,
    p_ref: f64,
}

impl Profile for EntropyFromDensity {
    fn eval2(&self, x: f64, side: Side) -> (f64, f64) {
        let g = self.gamma;
        let (r, dr) = self.rho.eval2(x, side);
        let v = g / (g - 1.0) * self.p_ref * r.powf(-g);
        (v, -g * v * dr / r)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.rho.breakpoints()
    }
}
