//! Nozzle walls, far-field limits and the boundary-flattening map
//! `y = (x₁, (x₂ − w₁)/(w₂ − w₁))`.
//!
//! All PDE work happens on the flattened strip `[−2L, 2L] × [0, 1]`; the
//! metric terms needed by the chain rule are cached per grid column.

use crate::error::{ConditionId, GeometryError};
use crate::numerics::MonotoneCubic;

/// One wall `x₂ = w(x₁)`.
#[derive(Debug, Clone)]
pub enum Wall {
    Straight {
        level: f64,
    },
    /// `upstream + (downstream − upstream)(1 + tanh((x₁ − center)/width))/2`.
    Tanh {
        upstream: f64,
        downstream: f64,
        center: f64,
        width: f64,
    },
    /// Polynomial transition `upstream → downstream` over `[center − half, center + half]`,
    /// exactly flat outside.
    Smooth {
        upstream: f64,
        downstream: f64,
        center: f64,
        half: f64,
    },
    /// Dense samples; constant outside the sampled range.
    Table(MonotoneCubic),
}

/// Degree-11 smoothstep `∫₀ᵗ s⁵(1−s)⁵ / ∫₀¹ s⁵(1−s)⁵`, flat to fifth order at both ends,
/// with first and second derivatives.
fn smooth_step(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    const NORM: f64 = 2772.0; // 1/B(6, 6)
    const BINOM: [f64; 6] = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0];
    // the alternating sum cancels badly near 1, so evaluate the nearer half
    let tt = t.min(1.0 - t);
    let mut v = 0.0;
    for (i, c) in BINOM.iter().enumerate() {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        v += sign * c * tt.powi(6 + i as i32) / (6 + i) as f64;
    }
    let v = if t <= 0.5 { NORM * v } else { 1.0 - NORM * v };
    let r = 1.0 - t;
    let d = (t * r).powi(5);
    let dd = 5.0 * (t * r).powi(4) * (1.0 - 2.0 * t);
    (v, NORM * d, NORM * dd)
}

impl Wall {
    pub fn table(x: Vec<f64>, w: Vec<f64>) -> Result<Self, GeometryError> {
        Ok(Wall::Table(MonotoneCubic::new(x, w)?))
    }

    /// Value, slope and curvature term `w″`.
    pub fn eval3(&self, x1: f64) -> (f64, f64, f64) {
        match self {
            Wall::Straight { level } => (*level, 0.0, 0.0),
            Wall::Tanh { upstream, downstream, center, width } => {
                let t = ((x1 - center) / width).tanh();
                let amp = downstream - upstream;
                let sech2 = 1.0 - t * t;
                (upstream + 0.5 * amp * (1.0 + t), 0.5 * amp * sech2 / width, -amp * sech2 * t / (width * width))
            }
            Wall::Smooth { upstream, downstream, center, half } => {
                let (v, d, dd) = smooth_step((x1 - center + half) / (2.0 * half));
                let amp = downstream - upstream;
                let k = 1.0 / (2.0 * half);
                (upstream + amp * v, amp * d * k, amp * dd * k * k)
            }
            Wall::Table(c) => c.eval3(x1),
        }
    }

    pub fn eval(&self, x1: f64) -> f64 {
        self.eval3(x1).0
    }

    /// Limits as x₁ → −∞ and x₁ → +∞.
    pub fn limits(&self) -> (f64, f64) {
        match self {
            Wall::Straight { level } => (*level, *level),
            Wall::Tanh { upstream, downstream, .. } | Wall::Smooth { upstream, downstream, .. } => {
                (*upstream, *downstream)
            }
            Wall::Table(c) => {
                let (lo, hi) = c.domain();
                (c.eval(lo), c.eval(hi))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct NozzleGeometry {
    pub w1: Wall,
    pub w2: Wall,
    pub a: f64,
    pub b: f64,
    pub holder_bound: f64,
    pub tail_tol: f64,
    pub l: f64,
}

impl NozzleGeometry {
    pub fn new(w1: Wall, w2: Wall, l: f64) -> Self {
        let (_, a) = w1.limits();
        let (_, b) = w2.limits();
        NozzleGeometry { w1, w2, a, b, holder_bound: 100.0, tail_tol: 1e-8, l }
    }

    pub fn straight(l: f64) -> Self {
        Self::new(Wall::Straight { level: 0.0 }, Wall::Straight { level: 1.0 }, l)
    }

    /// Lower wall at 0, upper wall relaxing from 1 to `1 − contraction`.
    pub fn tanh_contracting(contraction: f64, width: f64, l: f64) -> Self {
        Self::new(
            Wall::Straight { level: 0.0 },
            Wall::Tanh { upstream: 1.0, downstream: 1.0 - contraction, center: 0.0, width },
            l,
        )
    }

    /// Lower wall at 0, upper wall moving from 1 to `b` over `[−half, half]`.
    pub fn smooth_step(b: f64, half: f64, l: f64) -> Self {
        Self::new(Wall::Straight { level: 0.0 }, Wall::Smooth { upstream: 1.0, downstream: b, center: 0.0, half }, l)
    }

    /// Walls relaxing from (0, 1) to (a, b).
    pub fn tanh(a: f64, b: f64, width: f64, l: f64) -> Self {
        let w1 = if a == 0.0 {
            Wall::Straight { level: 0.0 }
        } else {
            Wall::Tanh { upstream: 0.0, downstream: a, center: 0.0, width }
        };
        let w2 = if b == 1.0 {
            Wall::Straight { level: 1.0 }
        } else {
            Wall::Tanh { upstream: 1.0, downstream: b, center: 0.0, width }
        };
        Self::new(w1, w2, l)
    }

    pub fn with_truncation(mut self, l: f64) -> Self {
        self.l = l;
        self
    }

    pub fn walls(&self, x1: f64) -> (f64, f64) {
        (self.w1.eval(x1), self.w2.eval(x1))
    }

    pub fn width(&self, x1: f64) -> f64 {
        self.w2.eval(x1) - self.w1.eval(x1)
    }

    /// Largest wall inclination angle over the truncated domain.
    pub fn theta_b(&self) -> f64 {
        let n = 4001;
        let l = self.l;
        (0..n)
            .map(|k| {
                let x = -2.0 * l + 4.0 * l * k as f64 / (n - 1) as f64;
                let (_, d1, _) = self.w1.eval3(x);
                let (_, d2, _) = self.w2.eval3(x);
                d1.atan().abs().max(d2.atan().abs())
            })
            .fold(0.0, f64::max)
    }

    /// Check wall ordering, far-field limits and flatness beyond |x₁| ≥ L,
    /// and the curvature bound, on a dense sample of [−2L, 2L].
    pub fn validate(&self) -> Result<(), GeometryError> {
        let invalid = |detail: String| GeometryError::Invalid { id: ConditionId::GeometryWalls, detail };
        if !(self.l > 0.0) {
            return Err(GeometryError::Parameter(format!("truncation half-length must be positive, got {}", self.l)));
        }
        if !(self.b > self.a) {
            return Err(invalid(format!("downstream limits need b > a, got a = {}, b = {}", self.a, self.b)));
        }
        let (u1, d1) = self.w1.limits();
        let (u2, d2) = self.w2.limits();
        let scale = 1.0f64.max(self.a.abs()).max(self.b.abs());
        let tol = self.tail_tol * scale;
        if (u1 - 0.0).abs() > tol || (u2 - 1.0).abs() > tol {
            return Err(invalid(format!("upstream wall limits must be (0, 1), got ({u1}, {u2})")));
        }
        if (d1 - self.a).abs() > tol || (d2 - self.b).abs() > tol {
            return Err(invalid(format!(
                "downstream wall limits ({d1}, {d2}) disagree with (a, b) = ({}, {})",
                self.a, self.b
            )));
        }
        let n = 8001;
        for k in 0..n {
            let x = -2.0 * self.l + 4.0 * self.l * k as f64 / (n - 1) as f64;
            let (w1, s1, c1) = self.w1.eval3(x);
            let (w2, s2, c2) = self.w2.eval3(x);
            if !(w2 > w1) {
                return Err(GeometryError::DegenerateWidth { x1: x, width: w2 - w1 });
            }
            let worst = s1.abs().max(s2.abs()).max(c1.abs()).max(c2.abs());
            if worst > self.holder_bound {
                return Err(invalid(format!(
                    "wall derivative {worst:.3e} at x1 = {x} exceeds the bound {}",
                    self.holder_bound
                )));
            }
            if x.abs() >= self.l {
                let (t1, t2) = if x < 0.0 { (0.0, 1.0) } else { (self.a, self.b) };
                let off = (w1 - t1).abs().max((w2 - t2).abs()).max(s1.abs()).max(s2.abs());
                if off > tol {
                    return Err(invalid(format!(
                        "walls are not flat to {:.1e} beyond |x1| >= L = {} (deviation {off:.3e} at x1 = {x}); increase L",
                        self.tail_tol, self.l
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Map a physical point to flattened coordinates.
pub fn flatten(geom: &NozzleGeometry, x: [f64; 2]) -> Result<[f64; 2], GeometryError> {
    let (w1, w2) = geom.walls(x[0]);
    let h = w2 - w1;
    if !(h > 0.0) {
        return Err(GeometryError::DegenerateWidth { x1: x[0], width: h });
    }
    let slack = 1e-12 * h;
    if x[1] < w1 - slack || x[1] > w2 + slack {
        return Err(GeometryError::OutsideNozzle { x1: x[0], x2: x[1] });
    }
    Ok([x[0], ((x[1] - w1) / h).clamp(0.0, 1.0)])
}

pub fn unflatten(geom: &NozzleGeometry, y: [f64; 2]) -> [f64; 2] {
    let (w1, w2) = geom.walls(y[0]);
    [y[0], w1 + y[1] * (w2 - w1)]
}

/// ∂y/∂x as rows `[[∂y₁/∂x₁, ∂y₁/∂x₂], [∂y₂/∂x₁, ∂y₂/∂x₂]]`.
pub fn jacobian_flatten(geom: &NozzleGeometry, x: [f64; 2]) -> Result<[[f64; 2]; 2], GeometryError> {
    let y = flatten(geom, x)?;
    let (w1, d1, _) = geom.w1.eval3(x[0]);
    let (w2, d2, _) = geom.w2.eval3(x[0]);
    let h = w2 - w1;
    let eta = -(d1 + y[1] * (d2 - d1)) / h;
    Ok([[1.0, 0.0], [eta, 1.0 / h]])
}

/// Per-column wall data on the grid.
#[derive(Debug, Clone, Copy)]
pub struct ColumnMetric {
    pub w1: f64,
    pub h: f64,
    pub dw1: f64,
    pub dh: f64,
    pub ddw1: f64,
    pub ddh: f64,
}

impl ColumnMetric {
    /// η = ∂y₂/∂x₁ at flattened height `y2`.
    #[inline]
    pub fn eta(&self, y2: f64) -> f64 {
        -(self.dw1 + y2 * self.dh) / self.h
    }

    /// ∂η/∂y₁ at fixed y₂.
    #[inline]
    pub fn eta_y1(&self, y2: f64) -> f64 {
        -(self.ddw1 + y2 * self.ddh) / self.h + (self.dw1 + y2 * self.dh) * self.dh / (self.h * self.h)
    }

    /// ∂η/∂y₂.
    #[inline]
    pub fn eta_y2(&self) -> f64 {
        -self.dh / self.h
    }

    #[inline]
    pub fn x2(&self, y2: f64) -> f64 {
        self.w1 + y2 * self.h
    }
}

/// Boundary-fitted tensor grid on `[−2L, 2L] × [0, 1]`.
#[derive(Debug, Clone)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub l: f64,
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
    pub dy1: f64,
    pub dy2: f64,
    pub cols: Vec<ColumnMetric>,
}

impl Grid {
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// Physical coordinates of node (i, j).
    pub fn x(&self, i: usize, j: usize) -> [f64; 2] {
        [self.y1[i], self.cols[i].x2(self.y2[j])]
    }
}

/// Boundary-fitted grid with `nx × ny` nodes on the truncated domain |x₁| ≤ 2L.
pub fn truncate(geom: &NozzleGeometry, l: f64, nx: usize, ny: usize) -> Result<Grid, GeometryError> {
    if !(l > 0.0) {
        return Err(GeometryError::Parameter(format!("L must be positive, got {l}")));
    }
    if nx < 5 || ny < 5 {
        return Err(GeometryError::Parameter(format!("grid needs at least 5x5 nodes, got {nx}x{ny}")));
    }
    let dy1 = 4.0 * l / (nx - 1) as f64;
    let dy2 = 1.0 / (ny - 1) as f64;
    let y1: Vec<f64> = (0..nx).map(|i| -2.0 * l + i as f64 * dy1).collect();
    let y2: Vec<f64> = (0..ny).map(|j| if j + 1 == ny { 1.0 } else { j as f64 * dy2 }).collect();
    let mut cols = Vec::with_capacity(nx);
    for &x in &y1 {
        let (w1, d1, c1) = geom.w1.eval3(x);
        let (w2, d2, c2) = geom.w2.eval3(x);
        let h = w2 - w1;
        if !(h > 0.0) {
            return Err(GeometryError::DegenerateWidth { x1: x, width: h });
        }
        cols.push(ColumnMetric { w1, h, dw1: d1, dh: d2 - d1, ddw1: c1, ddh: c2 - c1 });
    }
    Ok(Grid { nx, ny, l, y1, y2, dy1, dy2, cols })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_derivatives_match_finite_differences() {
        let w = Wall::Tanh { upstream: 1.0, downstream: 0.75, center: 0.3, width: 0.7 };
        for &x in &[-1.0, 0.0, 0.4, 2.0] {
            let h = 1e-5;
            let (_, d, c) = w.eval3(x);
            let fd = (w.eval(x + h) - w.eval(x - h)) / (2.0 * h);
            let fdd = (w.eval3(x + h).1 - w.eval3(x - h).1) / (2.0 * h);
            assert!((d - fd).abs() < 1e-9);
            assert!((c - fdd).abs() < 1e-8);
        }
    }

    #[test]
    fn smooth_derivatives_match_finite_differences() {
        let w = Wall::Smooth { upstream: 1.0, downstream: 0.8, center: 0.2, half: 1.5 };
        for &x in &[-1.2, -0.5, 0.2, 0.9, 1.6] {
            let h = 1e-5;
            let (_, d, c) = w.eval3(x);
            let fd = (w.eval(x + h) - w.eval(x - h)) / (2.0 * h);
            let fdd = (w.eval3(x + h).1 - w.eval3(x - h).1) / (2.0 * h);
            assert!((d - fd).abs() < 1e-9, "{d} {fd}");
            assert!((c - fdd).abs() < 1e-7, "{c} {fdd}");
        }
        assert_eq!(w.eval(-1.3), 1.0);
        assert_eq!(w.eval(1.7), 0.8);
    }

    #[test]
    fn eta_derivative_matches_finite_difference() {
        let g = NozzleGeometry::tanh(0.2, 0.9, 0.8, 5.0);
        let grid = truncate(&g, 5.0, 401, 11).unwrap();
        let i = 200;
        let y2 = 0.3;
        let fd = (grid.cols[i + 1].eta(y2) - grid.cols[i - 1].eta(y2)) / (2.0 * grid.dy1);
        assert!((grid.cols[i].eta_y1(y2) - fd).abs() < 1e-3);
    }
}
