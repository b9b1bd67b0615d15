use serde::{Deserialize, Serialize};

use crate::banach_scale::{SpectralField, TrajectoryField};
use crate::error::{Error, Result};
use crate::gn_problem::GnProblem;
use crate::green_naghdi::{GnState, PhysicalParams};
use crate::linear_ivp::evolution_u;
use crate::nashmoser::Problem;

/// Output of a method-of-lines run.
#[derive(Debug, Clone)]
pub struct MolRun {
    /// Physical states `u(tau)` on the output grid.
    pub physical: TrajectoryField,
    /// `w(tau) = U(-tau) u(tau)`.
    pub conjugated: TrajectoryField,
    pub stats: MolStats,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MolStats {
    pub steps: usize,
    pub substeps: usize,
    /// `max_tau |mean zeta(tau) - mean zeta(0)|`
    pub mass_drift: f64,
    pub min_depth: f64,
}

/// Integrate the rescaled system from `u0` with IF-RK4, `substeps` stages per output interval.
pub fn mol_solve(
    params: &PhysicalParams,
    u0: &SpectralField,
    horizon: f64,
    steps: usize,
    substeps: usize,
) -> Result<MolRun> {
    let p = GnProblem::new(params.clone(), u0.clone())?;
    mol_solve_problem(&p, horizon, steps, substeps)
}

/// As [`mol_solve`] for a problem that may carry forcing.
pub fn mol_solve_problem(p: &GnProblem, horizon: f64, steps: usize, substeps: usize) -> Result<MolRun> {
    if !(horizon > 0.0) || steps == 0 || substeps == 0 {
        return Err(Error::Parameter(format!(
            "mol_solve needs horizon > 0 and positive step counts, got T = {horizon}, steps = {steps}, substeps = {substeps}"
        )));
    }
    let params = p.params();
    let d = params.dimension();
    let dt = horizon / steps as f64;
    let h = dt / substeps as f64;
    let rhs = |t: f64, w: &SpectralField| -> Result<SpectralField> {
        let mut out = p.forcing(t);
        out -= &p.evaluate_g(t, w).map_err(|e| stamp(e, t))?;
        Ok(out)
    };
    let mut w = p.initial_data().clone();
    let mass0 = w.mean(d);
    let mut stats = MolStats {
        steps,
        substeps,
        mass_drift: 0.0,
        min_depth: f64::INFINITY,
    };
    let mut snaps = Vec::with_capacity(steps + 1);
    snaps.push(w.clone());
    for i in 0..steps {
        for j in 0..substeps {
            let t = i as f64 * dt + j as f64 * h;
            let k1 = rhs(t, &w)?;
            let k2 = rhs(t + 0.5 * h, &(&w + &k1.scaled(0.5 * h)))?;
            let k3 = rhs(t + 0.5 * h, &(&w + &k2.scaled(0.5 * h)))?;
            let k4 = rhs(t + h, &(&w + &k3.scaled(h)))?;
            w.axpy(h / 6.0, &k1);
            w.axpy(h / 3.0, &k2);
            w.axpy(h / 3.0, &k3);
            w.axpy(h / 6.0, &k4);
        }
        let t = (i + 1) as f64 * dt;
        let state = GnState::from_field(&evolution_u(params.eps, t, &w))?;
        let depth = params.depth(&state.zeta).component_physical(0);
        let min = depth.into_iter().fold(f64::INFINITY, f64::min);
        stats.min_depth = stats.min_depth.min(min);
        if !(min >= params.h0) {
            return Err(Error::domain(format!("method of lines at t = {t}"), min, params.h0));
        }
        stats.mass_drift = stats.mass_drift.max((w.mean(d) - mass0).abs());
        snaps.push(w.clone());
    }
    let conjugated = TrajectoryField::new(horizon, snaps)?;
    Ok(MolRun {
        physical: p.to_physical(&conjugated),
        conjugated,
        stats,
    })
}

fn stamp(e: Error, t: f64) -> Error {
    match e {
        Error::Domain { context, min_depth, h0 } => Error::Domain {
            context: format!("{context} at t = {t}"),
            min_depth,
            h0,
        },
        other => other,
    }
}
