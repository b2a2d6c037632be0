use std::fmt;

/// Stable identifiers for the inlet requirements checked before any solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionId {
    /// inf u₁₋ > 0 and inf S₋ > 0.
    InletPositive,
    /// (u₁₋²S₋^{−1/γ})′ ≤ 0 at the lower wall and ≥ 0 at the upper wall.
    InletWallMonotone,
    /// One-sided sign conditions on the data at a jump.
    InletJumpSign,
    /// Mass flux above the subsonic threshold m̂.
    InletSubsonic,
    /// inf u₁₋ > 0 and inf ρ₋ > 0 for incompressible data.
    IncompressiblePositive,
    /// (ρ₋u₁₋²)′ ≤ 0 at the lower wall and ≥ 0 at the upper wall.
    IncompressibleWallMonotone,
    /// One-sided sign conditions at a jump of incompressible data.
    IncompressibleJumpSign,
    /// Wall ordering, tail flatness and curvature bounds.
    GeometryWalls,
}

impl ConditionId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConditionId::InletPositive => "C-INLET-POSITIVE",
            ConditionId::InletWallMonotone => "C-INLET-WALL-MONOTONE",
            ConditionId::InletJumpSign => "C-INLET-JUMP-SIGN",
            ConditionId::InletSubsonic => "C-INLET-SUBSONIC",
            ConditionId::IncompressiblePositive => "C-INC-POSITIVE",
            ConditionId::IncompressibleWallMonotone => "C-INC-WALL-MONOTONE",
            ConditionId::IncompressibleJumpSign => "C-INC-JUMP-SIGN",
            ConditionId::GeometryWalls => "C-GEOMETRY-WALLS",
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum NumericError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("adaptive quadrature exhausted its interval budget")]
    QuadratureBudget,
    #[error("root not bracketed: f({a}) = {fa}, f({b}) = {fb}")]
    NoBracket { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("root finder exhausted its iteration budget")]
    RootBudget,
    #[error("bad table: {0}")]
    BadTable(&'static str),
    #[error("singular pivot at row {0}")]
    SingularMatrix(usize),
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum GeometryError {
    #[error("point ({x1}, {x2}) lies outside the nozzle")]
    OutsideNozzle { x1: f64, x2: f64 },
    #[error("degenerate nozzle width {width} at x1 = {x1}")]
    DegenerateWidth { x1: f64, width: f64 },
    #[error("[{id}] {detail}")]
    Invalid { id: ConditionId, detail: String },
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum InletError {
    #[error("[{id}] {detail}")]
    Condition { id: ConditionId, detail: String },
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum ClosureError {
    #[error("sonic or supersonic demand at s = {s}: |grad psi| = {g} >= Qhat = {qhat}")]
    Branch { s: f64, g: f64, qhat: f64 },
    #[error("stagnation energy violated at s = {s}: B - q^2/2 = {deficit}")]
    StagnationEnergy { s: f64, deficit: f64 },
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SolverError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("Picard iteration did not converge: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize, report: Box<crate::solver::SolveReport> },
    #[error("truncation error dominates: inner-window differences {diffs:?} do not decay below {tol:.1e}")]
    Truncation { diffs: Vec<f64>, tol: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Inlet(#[from] InletError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum AsymptoticsError {
    #[error("outlet pressure candidate {p} lies outside ({lo}, {hi})")]
    Domain { p: f64, lo: f64, hi: f64 },
    #[error("no outlet pressure bracket: {0}")]
    Bracket(String),
    #[error(transparent)]
    Inlet(#[from] InletError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum DiscontinuityError {
    #[error("column {column} (x1 = {x1}) has no crossing of psi = {m_d}")]
    NoCrossing { column: usize, x1: f64, m_d: f64 },
    #[error("column {column}: {detail}")]
    Trace { column: usize, detail: String },
    #[error("{0}")]
    Parameter(String),
}
