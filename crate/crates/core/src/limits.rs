//! Limit studies. The γ-ladder holds the incompressible data `(𝔾, 𝔹)` fixed,
//! solves the polytropic problem for increasing γ, and measures the distance
//! of each field to the incompressible solve.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::SolverError;
use crate::geometry::NozzleGeometry;
use crate::inlet::{build_closure, IncompressibleInlet};
use crate::solver::{solve_bounded, FlowField, SolveOptions};

pub const GAMMA_LADDER: [f64; 6] = [1.4, 2.0, 5.0, 10.0, 25.0, 50.0];

#[derive(Debug, Clone)]
pub struct GammaLadder {
    pub incompressible: FlowField,
    /// `(γ, field or failure)` in ladder order.
    pub members: Vec<(f64, Result<FlowField, String>)>,
    /// `(γ, ‖ψ_γ − ψ_inc‖∞ / m)` for the converged members.
    pub distances: Vec<(f64, f64)>,
    /// Relative distances between consecutive converged members.
    pub pairwise: Vec<f64>,
}

impl GammaLadder {
    pub fn is_complete(&self) -> bool {
        self.members.iter().all(|(_, r)| r.is_ok())
    }

    /// Distances to the incompressible field are nonincreasing in γ, with
    /// `slack` absorbing solver-tolerance noise.
    pub fn monotone(&self, slack: f64) -> bool {
        self.distances.windows(2).all(|w| w[1].1 <= w[0].1 + slack)
    }
}

fn distance(a: &FlowField, b: &FlowField) -> f64 {
    a.psi.iter().zip(&b.psi).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / a.m
}

/// Solve the incompressible problem and the polytropic problems at `gammas`.
/// The inlet must be smooth; mollify jump data before building it.
pub fn gamma_ladder(
    geom: &NozzleGeometry,
    inlet: &IncompressibleInlet,
    gammas: &[f64],
    eps_cut: f64,
    l: f64,
    opts: &SolveOptions,
) -> Result<GammaLadder, SolverError> {
    inlet.validate()?;
    let closure = inlet.build_closure()?;
    let (incompressible, _) = solve_bounded(geom, Arc::new(closure), l, opts)?;
    let members: Vec<(f64, Result<FlowField, String>)> = gammas
        .par_iter()
        .map(|&gamma| {
            let run = || -> Result<FlowField, SolverError> {
                let (profile, m) = inlet.polytropic(gamma)?;
                let closure = build_closure(&profile, m, eps_cut)?;
                Ok(solve_bounded(geom, Arc::new(closure), l, opts)?.0)
            };
            (gamma, run().map_err(|e| e.to_string()))
        })
        .collect();
    let ok: Vec<(f64, &FlowField)> = members.iter().filter_map(|(g, r)| r.as_ref().ok().map(|f| (*g, f))).collect();
    let distances = ok.iter().map(|(g, f)| (*g, distance(f, &incompressible))).collect();
    let pairwise = ok.windows(2).map(|w| distance(w[0].1, w[1].1)).collect();
    Ok(GammaLadder { incompressible, members, distances, pairwise })
}
