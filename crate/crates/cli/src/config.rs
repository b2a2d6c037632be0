//! Run configuration, read from TOML. Every block is checked before any
//! compute starts.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use nozzleflow::geometry::{NozzleGeometry, Wall};
use nozzleflow::inlet::{Constant, IncompressibleInlet, InletProfile, Piecewise, Polynomial, ProfileRef, Tabulated};
use nozzleflow::numerics::MonotoneCubic;
use nozzleflow::solver::SolveOptions;

use crate::RunError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub inlet: InletConfig,
    #[serde(default)]
    pub gas: GasConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub continuation: ContinuationConfig,
    #[serde(default)]
    pub discontinuity: DiscontinuityConfig,
    #[serde(default)]
    pub limits: LimitsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometryConfig {
    Straight {
        #[serde(default = "default_l")]
        l: f64,
    },
    SmoothStep {
        b: f64,
        half: f64,
        #[serde(default = "default_l")]
        l: f64,
    },
    Tanh {
        #[serde(default)]
        a: f64,
        b: f64,
        width: f64,
        #[serde(default = "default_l")]
        l: f64,
    },
    Table {
        x: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        #[serde(default = "default_l")]
        l: f64,
    },
}

fn default_l() -> f64 {
    2.5
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Constant {
        value: f64,
    },
    /// Ascending coefficients in `x₂`.
    Polynomial {
        coeffs: Vec<f64>,
    },
    TwoState {
        x_d: f64,
        below: f64,
        above: f64,
    },
    Table {
        x: Vec<f64>,
        y: Vec<f64>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InletConfig {
    pub u1: ProfileConfig,
    /// Entropy profile (polytropic mode).
    pub s: Option<ProfileConfig>,
    /// Density profile (incompressible mode).
    pub rho: Option<ProfileConfig>,
    /// Exterior-force potential as a function of the inlet height.
    pub phi: Option<ProfileConfig>,
    pub mass_flux: Option<f64>,
    /// Mass flux as a multiple of m̂, used when `mass_flux` is absent.
    pub mass_flux_factor: Option<f64>,
    #[serde(default = "default_eps0")]
    pub eps0: f64,
    #[serde(default)]
    pub allow_unsigned_jump: bool,
    #[serde(default = "default_p_ref")]
    pub p_ref: f64,
}

fn default_eps0() -> f64 {
    0.1
}

fn default_p_ref() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum GasMode {
    #[default]
    Polytropic,
    Incompressible,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasConfig {
    #[serde(default)]
    pub mode: GasMode,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_gamma() -> f64 {
    1.4
}

impl Default for GasConfig {
    fn default() -> Self {
        GasConfig { mode: GasMode::Polytropic, gamma: default_gamma() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub nx: usize,
    pub ny: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub plateau: usize,
    pub eps_cut: f64,
    /// Run the L-doubling study instead of a single truncated solve.
    pub extend: bool,
    pub domain_tol: f64,
    pub max_doublings: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let o = SolveOptions::default();
        SolverConfig {
            nx: o.nx,
            ny: o.ny,
            tol: o.tol,
            max_iter: o.max_iter,
            plateau: o.plateau,
            eps_cut: 0.05,
            extend: false,
            domain_tol: o.domain_tol,
            max_doublings: o.max_doublings,
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            nx: self.nx,
            ny: self.ny,
            tol: self.tol,
            max_iter: self.max_iter,
            plateau: self.plateau,
            domain_tol: self.domain_tol,
            max_doublings: self.max_doublings,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuationConfig {
    /// Starting mass flux as a multiple of m̂.
    pub start_factor: f64,
    pub shrink: f64,
    pub bracket_tol: f64,
    pub eps: f64,
    pub levels: usize,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig { start_factor: 40.0, shrink: 0.85, bracket_tol: 1e-3, eps: 0.05, levels: 40 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscontinuityConfig {
    pub eps: Vec<f64>,
}

impl Default for DiscontinuityConfig {
    fn default() -> Self {
        DiscontinuityConfig { eps: vec![0.08, 0.04, 0.02, 0.01] }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitsConfig {
    pub gammas: Vec<f64>,
}

impl Default for LimitsConfig {
    fn default() -> Self {
        LimitsConfig { gammas: nozzleflow::limits::GAMMA_LADDER.to_vec() }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
}

impl ProfileConfig {
    pub fn build(&self, what: &str) -> Result<ProfileRef, RunError> {
        let bad = |msg: String| RunError::Config(format!("{what}: {msg}"));
        Ok(match self {
            ProfileConfig::Constant { value } => Arc::new(Constant(*value)),
            ProfileConfig::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Err(bad("polynomial needs at least one coefficient".into()));
                }
                Arc::new(Polynomial(coeffs.clone()))
            }
            ProfileConfig::TwoState { x_d, below, above } => {
                if !(*x_d > 0.0 && *x_d < 1.0) {
                    return Err(bad(format!("x_d = {x_d} must lie in (0, 1)")));
                }
                Arc::new(Piecewise::two_state(*x_d, *below, *above))
            }
            ProfileConfig::Table { x, y } => {
                Arc::new(Tabulated(MonotoneCubic::new(x.clone(), y.clone()).map_err(|e| bad(e.to_string()))?))
            }
        })
    }
}

impl GeometryConfig {
    pub fn build(&self) -> Result<NozzleGeometry, RunError> {
        let geom = match self {
            GeometryConfig::Straight { l } => NozzleGeometry::straight(*l),
            GeometryConfig::SmoothStep { b, half, l } => NozzleGeometry::smooth_step(*b, *half, *l),
            GeometryConfig::Tanh { a, b, width, l } => NozzleGeometry::tanh(*a, *b, *width, *l),
            GeometryConfig::Table { x, lower, upper, l } => {
                let w1 =
                    Wall::table(x.clone(), lower.clone()).map_err(|e| RunError::Config(format!("lower wall: {e}")))?;
                let w2 =
                    Wall::table(x.clone(), upper.clone()).map_err(|e| RunError::Config(format!("upper wall: {e}")))?;
                NozzleGeometry::new(w1, w2, *l)
            }
        };
        geom.validate().map_err(|e| RunError::Validation(e.to_string()))?;
        Ok(geom)
    }

    pub fn l(&self) -> f64 {
        match self {
            GeometryConfig::Straight { l }
            | GeometryConfig::SmoothStep { l, .. }
            | GeometryConfig::Tanh { l, .. }
            | GeometryConfig::Table { l, .. } => *l,
        }
    }
}

/// Inlet data resolved for the configured gas mode.
pub enum Inlet {
    Polytropic(InletProfile),
    Incompressible(IncompressibleInlet),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, RunError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), RunError> {
        let s = &self.solver;
        if s.nx < 5 || s.ny < 5 {
            return Err(RunError::Config(format!("grid {}x{} is too small; need at least 5x5", s.nx, s.ny)));
        }
        if !(s.eps_cut > 0.0 && s.eps_cut < 0.25) {
            return Err(RunError::Config(format!("eps_cut = {} must lie in (0, 0.25)", s.eps_cut)));
        }
        if !(s.tol > 0.0) {
            return Err(RunError::Config("solver tol must be positive".into()));
        }
        if !(self.geometry.l() > 0.0) {
            return Err(RunError::Config("geometry l must be positive".into()));
        }
        match self.gas.mode {
            GasMode::Polytropic => {
                if self.inlet.s.is_none() {
                    return Err(RunError::Config("polytropic mode needs inlet.s".into()));
                }
                if !(self.gas.gamma > 1.0) {
                    return Err(RunError::Config(format!("gamma = {} must exceed 1", self.gas.gamma)));
                }
            }
            GasMode::Incompressible => {
                if self.inlet.rho.is_none() {
                    return Err(RunError::Config("incompressible mode needs inlet.rho".into()));
                }
            }
        }
        if self.inlet.mass_flux.is_some() && self.inlet.mass_flux_factor.is_some() {
            return Err(RunError::Config("give either inlet.mass_flux or inlet.mass_flux_factor, not both".into()));
        }
        if self.discontinuity.eps.iter().any(|&e| !(e > 0.0)) {
            return Err(RunError::Config("discontinuity eps values must be positive".into()));
        }
        Ok(())
    }

    /// Set the grid from an `NXxNY` override.
    pub fn override_grid(&mut self, grid: &str) -> Result<(), RunError> {
        let parsed =
            grid.split_once(['x', 'X']).and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
        let Some((nx, ny)) = parsed else {
            return Err(RunError::Config(format!("grid override '{grid}' must look like 201x41")));
        };
        self.solver.nx = nx;
        self.solver.ny = ny;
        self.check()
    }

    pub fn inlet(&self) -> Result<Inlet, RunError> {
        let c = &self.inlet;
        let u = c.u1.build("inlet.u1")?;
        let phi = c.phi.as_ref().map(|p| p.build("inlet.phi")).transpose()?;
        match self.gas.mode {
            GasMode::Polytropic => {
                let s = c.s.as_ref().expect("checked").build("inlet.s")?;
                let mut p = InletProfile::new(u, s, self.gas.gamma).with_eps0(c.eps0);
                p.allow_unsigned_jump = c.allow_unsigned_jump;
                if let Some(phi) = phi {
                    p = p.with_phi(phi);
                }
                Ok(Inlet::Polytropic(p))
            }
            GasMode::Incompressible => {
                let rho = c.rho.as_ref().expect("checked").build("inlet.rho")?;
                let mut inc = IncompressibleInlet::new(u, rho);
                inc.p_ref = c.p_ref;
                inc.eps0 = c.eps0;
                inc.phi_ext = phi;
                Ok(Inlet::Incompressible(inc))
            }
        }
    }

    /// The configured mass flux for polytropic data.
    pub fn mass_flux(&self, profile: &InletProfile) -> Result<f64, RunError> {
        let mh = nozzleflow::inlet::m_hat(profile).map_err(RunError::from_inlet)?;
        let m = match (self.inlet.mass_flux, self.inlet.mass_flux_factor) {
            (Some(m), _) => m,
            (None, Some(f)) => f * mh,
            (None, None) => {
                return Err(RunError::Config("inlet.mass_flux or inlet.mass_flux_factor is required".into()))
            }
        };
        if !(m > mh) {
            return Err(RunError::Validation(format!(
                "[C-INLET-SUBSONIC] mass flux m = {m} must exceed m_hat = {mh}; raise inlet.mass_flux above {mh}"
            )));
        }
        Ok(m)
    }
}
