//! Steady subsonic Euler flows in infinitely long two-dimensional nozzles.
//!
//! The flow is computed through its stream function ψ, which satisfies a
//! quasilinear second-order equation whose coefficients come from the
//! Bernoulli law and the transported entropy. Upstream data fix the
//! Bernoulli and entropy functions of ψ; a smooth cut-off of |∇ψ| below the
//! sonic flux keeps the equation uniformly elliptic while iterating.
//!
//! Module map:
//! - [`geometry`]: walls, far-field limits, flattening map and grids.
//! - [`inlet`]: upstream profiles, validation, stream-coordinate tables, mollification.
//! - [`closure`]: density closure, sonic bounds, cut-off, PDE coefficients.
//! - [`solver`]: Picard solves on truncated domains and domain doubling.
//! - [`fields`]: primitive reconstruction and diagnostics, Lagrangian transform.
//! - [`asymptotics`]: far-field states and the outlet pressure functional.
//! - [`continuation`]: continuation in the mass flux towards choking.
//! - [`discontinuity`]: mollified families, captured sheets and their classification.
//! - [`limits`]: the γ-ladder towards the incompressible limit.

pub mod asymptotics;
pub mod closure;
pub mod continuation;
pub mod discontinuity;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod inlet;
pub mod limits;
pub mod numerics;
pub mod solver;

pub use error::ConditionId;
