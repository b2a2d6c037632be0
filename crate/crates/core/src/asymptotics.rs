//! Far-field states. Upstream the flow is the inlet data; downstream the
//! pressure is a constant `p₊` fixed by requiring the outlet streamlines to
//! fill `[a, b]`, which is the root of the increasing functional `J`.

use crate::error::AsymptoticsError;
use crate::geometry::NozzleGeometry;
use crate::inlet::{inlet_pressure, InletProfile, Side};
use crate::numerics::{brent, integrate_adaptive, HermiteTable};

/// Enthalpy level `(γp/(γ−1))^{(γ−1)/γ}` of a pressure.
fn enthalpy_level(p: f64, gamma: f64) -> f64 {
    (gamma * p / (gamma - 1.0)).powf((gamma - 1.0) / gamma)
}

fn pressure_from_level(a: f64, gamma: f64) -> f64 {
    (gamma - 1.0) / gamma * a.powf(gamma / (gamma - 1.0))
}

/// `(p̲₊, p̄₊)`: outlet sonic on the fastest streamline, and stagnant on the slowest.
pub fn outlet_pressure_bounds(profile: &InletProfile, m: f64) -> Result<(f64, f64), AsymptoticsError> {
    let g = profile.gamma;
    let a = enthalpy_level(inlet_pressure(profile, m)?, g);
    let mx = profile.speed_entropy_extremum(true);
    let mn = profile.speed_entropy_extremum(false);
    Ok((pressure_from_level((2.0 * a + mx) / (g + 1.0), g), pressure_from_level(a + 0.5 * mn, g)))
}

/// Integrand `ρ₋u₁₋/(ρ̃₊ũ₁₊)` at label `y`.
fn width_density(profile: &InletProfile, a_minus: f64, a_plus: f64, ratio: f64, y: f64, side: Side) -> f64 {
    let g = profile.gamma;
    let u = profile.u1m.eval2(y, side).0;
    let s = profile.sm.eval2(y, side).0;
    let up2 = u * u + 2.0 * (a_minus - a_plus) * s.powf(1.0 / g);
    if up2 <= 0.0 {
        return f64::INFINITY;
    }
    ratio * u / up2.sqrt()
}

fn label_breaks(profile: &InletProfile) -> Vec<f64> {
    let mut b = vec![0.0];
    b.extend(profile.jumps.iter().copied());
    b.push(1.0);
    b
}

/// `J(p₊) = ∫₀¹ ρ₋u₁₋/(ρ̃₊ũ₁₊) dy`, the outlet width implied by `p₊`.
pub fn j_eval(p_plus: f64, profile: &InletProfile, m: f64) -> Result<f64, AsymptoticsError> {
    let (lo, hi) = outlet_pressure_bounds(profile, m)?;
    if !(p_plus > lo && p_plus < hi) {
        return Err(AsymptoticsError::Domain { p: p_plus, lo, hi });
    }
    j_unchecked(p_plus, profile, m)
}

fn j_unchecked(p_plus: f64, profile: &InletProfile, m: f64) -> Result<f64, AsymptoticsError> {
    let g = profile.gamma;
    let p_minus = inlet_pressure(profile, m)?;
    let (am, ap) = (enthalpy_level(p_minus, g), enthalpy_level(p_plus, g));
    let ratio = (p_minus / p_plus).powf(1.0 / g);
    let mut total = 0.0;
    for w in label_breaks(profile).windows(2) {
        let f = |y: f64| width_density(profile, am, ap, ratio, y, if y >= w[1] { Side::Left } else { Side::Right });
        match integrate_adaptive(f, w[0], w[1], 1e-14, 1e-13) {
            Ok(v) => total += v,
            // the integrand is not integrable at p̄₊ on a flat minimum
            Err(_) => return Ok(f64::INFINITY),
        }
    }
    Ok(total)
}

/// Downstream constant-pressure state and the streamline end map.
#[derive(Debug, Clone)]
pub struct AsymptoticState {
    pub p_minus: f64,
    pub p_plus: f64,
    pub p_lower: f64,
    pub p_upper: f64,
    pub a: f64,
    pub b: f64,
    profile: InletProfile,
    x2_table: Vec<HermiteTable>,
}

impl AsymptoticState {
    fn levels(&self) -> (f64, f64) {
        let g = self.profile.gamma;
        (enthalpy_level(self.p_minus, g), enthalpy_level(self.p_plus, g))
    }

    /// ũ₁₊ on the streamline with inlet label `y`.
    pub fn u1_plus(&self, y: f64) -> f64 {
        let g = self.profile.gamma;
        let (am, ap) = self.levels();
        let u = self.profile.u1m.value(y);
        let s = self.profile.sm.value(y);
        (u * u + 2.0 * (am - ap) * s.powf(1.0 / g)).sqrt()
    }

    /// ρ̃₊ on the streamline with inlet label `y`.
    pub fn rho_plus(&self, y: f64) -> f64 {
        let g = self.profile.gamma;
        (g * self.p_plus / ((g - 1.0) * self.profile.sm.value(y))).powf(1.0 / g)
    }

    /// Terminal height `x₂(y)` of the streamline with inlet label `y`.
    pub fn x2_of_y(&self, y: f64) -> f64 {
        let breaks = label_breaks(&self.profile);
        let k = breaks[1..breaks.len() - 1].iter().filter(|&&b| b <= y).count();
        self.x2_table[k].eval2(y.clamp(0.0, 1.0)).0
    }
}

/// Solve `J(p₊) = b − a` and tabulate the streamline end map.
pub fn outlet_state(
    profile: &InletProfile,
    m: f64,
    geom: &NozzleGeometry,
) -> Result<AsymptoticState, AsymptoticsError> {
    let g = profile.gamma;
    let p_minus = inlet_pressure(profile, m)?;
    let (lo, hi) = outlet_pressure_bounds(profile, m)?;
    let width = geom.b - geom.a;
    let delta = 1e-9 * (hi - lo);
    let (jlo, jhi) = (j_unchecked(lo + delta, profile, m)?, j_unchecked(hi - delta, profile, m)?);
    if !(jlo < width) {
        return Err(AsymptoticsError::Bracket(format!(
            "J at the sonic bound is {jlo} >= b - a = {width}: the outlet would be supersonic; raise m"
        )));
    }
    if !(width < jhi) {
        return Err(AsymptoticsError::Bracket(format!(
            "J at the stagnation bound is {jhi} <= b - a = {width}: the outlet cannot decelerate enough"
        )));
    }
    let p_plus = if ((p_minus - lo) * (hi - p_minus) > 0.0)
        && (j_unchecked(p_minus, profile, m)? - width).abs() <= 1e-15 * width
    {
        p_minus
    } else {
        brent(
            |p| j_unchecked(p, profile, m).map(|j| j - width).unwrap_or(f64::INFINITY),
            lo + delta,
            hi - delta,
            1e-13 * hi,
            200,
        )?
    };
    let (am, ap) = (enthalpy_level(p_minus, g), enthalpy_level(p_plus, g));
    let ratio = (p_minus / p_plus).powf(1.0 / g);
    let breaks = label_breaks(profile);
    let mut tables = Vec::new();
    let mut base = geom.a;
    for w in breaks.windows(2) {
        let n = ((1024.0 * (w[1] - w[0])).ceil() as usize).max(16);
        let h = (w[1] - w[0]) / (n - 1) as f64;
        let mut cum = vec![base; n];
        for k in 1..n {
            let (y0, y1) = (w[0] + (k - 1) as f64 * h, if k + 1 == n { w[1] } else { w[0] + k as f64 * h });
            cum[k] = cum[k - 1]
                + integrate_adaptive(
                    |y| width_density(profile, am, ap, ratio, y, if y >= w[1] { Side::Left } else { Side::Right }),
                    y0,
                    y1,
                    1e-15,
                    1e-13,
                )?;
        }
        let table = HermiteTable::sample(w[0], w[1], n, |y| {
            let k = (((y - w[0]) / h).round() as usize).min(n - 1);
            let side = if y >= w[1] { Side::Left } else { Side::Right };
            (cum[k], width_density(profile, am, ap, ratio, y, side))
        });
        base = cum[n - 1];
        tables.push(table);
    }
    Ok(AsymptoticState {
        p_minus,
        p_plus,
        p_lower: lo,
        p_upper: hi,
        a: geom.a,
        b: geom.b,
        profile: profile.clone(),
        x2_table: tables,
    })
}

/// The conservative critical pressure level
/// `γ/(2(γ−1))·((γ+1)/2)^{γ/(γ−1)}·(max u₁₋²S₋^{−1/γ} + 2(γp₋/(γ−1))^{(γ−1)/γ})^{γ/(γ−1)}`.
pub fn critical_pressure(profile: &InletProfile, m: f64) -> Result<f64, AsymptoticsError> {
    let g = profile.gamma;
    let a = enthalpy_level(inlet_pressure(profile, m)?, g);
    let mx = profile.speed_entropy_extremum(true);
    let k = g / (g - 1.0);
    Ok(g / (2.0 * (g - 1.0)) * (0.5 * (g + 1.0)).powf(k) * (mx + 2.0 * a).powf(k))
}

/// Sharp per-streamline sonic pressure `((γ−1)/γ)(2/(γ+1))^{γ/(γ−1)}(S^{−1/γ}B)^{γ/(γ−1)}`
/// maximized over the inlet labels; below it some streamline is supersonic.
pub fn streamline_critical_pressure(profile: &InletProfile, m: f64) -> Result<f64, AsymptoticsError> {
    let g = profile.gamma;
    let a = enthalpy_level(inlet_pressure(profile, m)?, g);
    let mx = profile.speed_entropy_extremum(true);
    // S^{−1/γ}B = ½u²S^{−1/γ} + a
    Ok(pressure_from_level(2.0 * (0.5 * mx + a) / (g + 1.0), g))
}
