//! The rescaled Green-Naghdi system posed for the Nash-Moser engine.
//!
//! The unknown is `w(tau) = U(-tau) u(tau)`, so `G[tau, w] = U(-tau) F(U(tau) w)`
//! carries no singular part and the iterates can be differentiated in time at
//! the resolution of the output grid.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::banach_scale::{SpectralField, TrajectoryField};
use crate::error::{Error, Result};
use crate::green_naghdi::{
    build_linearized_coeffs_conjugated, depth_check, nonlinear_f, x_norm_stacked, GnState, LinearizationMode,
    LinearizedCoeffs, PhysicalParams,
};
use crate::linear_ivp::{evolution_u, integrate_conjugated, SolverOptions, SolverStats};
use crate::nashmoser::Problem;

/// Source term of the rescaled system.
#[derive(Debug, Clone, Default)]
pub enum Forcing {
    #[default]
    None,
    /// `f(tau)` acting on the physical state; conjugated after interpolation.
    Physical(TrajectoryField),
    /// `U(-tau) f(tau)` given directly.
    Conjugated(TrajectoryField),
}

pub struct GnProblem {
    params: PhysicalParams,
    init: SpectralField,
    forcing: Forcing,
    mode: LinearizationMode,
    solver: SolverOptions,
    linear_solves: AtomicUsize,
    last_stats: Mutex<Option<SolverStats>>,
}

impl GnProblem {
    /// `init` is the stacked physical initial state `(V0, zeta0)`; it is projected
    /// onto the dealiasing band, where every operator of the system acts.
    pub fn new(params: PhysicalParams, mut init: SpectralField) -> Result<Self> {
        init.dealias();
        let state = GnState::from_field(&init)?;
        if !state.grid().same_as(params.grid()) {
            return Err(Error::GridMismatch("initial data and bathymetry live on different grids".into()));
        }
        let (ok, min) = depth_check(&params, &state);
        if !ok {
            return Err(Error::domain("initial data", min, params.h0));
        }
        Ok(GnProblem {
            params,
            init,
            forcing: Forcing::None,
            mode: LinearizationMode::default(),
            solver: SolverOptions::default(),
            linear_solves: AtomicUsize::new(0),
            last_stats: Mutex::new(None),
        })
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn with_mode(mut self, mode: LinearizationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_solver(mut self, solver: SolverOptions) -> Self {
        self.solver = solver;
        self
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn linear_solves(&self) -> usize {
        self.linear_solves.load(Ordering::Relaxed)
    }

    pub fn last_solver_stats(&self) -> Option<SolverStats> {
        *self.last_stats.lock().expect("stats lock")
    }

    fn physical(&self, t: f64, w: &SpectralField) -> Result<GnState> {
        GnState::from_field(&evolution_u(self.params.eps, t, w))
    }

    /// Map a conjugated trajectory `w` back to `u(tau) = U(tau) w(tau)`.
    pub fn to_physical(&self, w: &TrajectoryField) -> TrajectoryField {
        w.map_indexed(|_, t, s| evolution_u(self.params.eps, t, s))
    }

    /// Map a physical trajectory to the conjugated frame.
    pub fn to_conjugated(&self, u: &TrajectoryField) -> TrajectoryField {
        u.map_indexed(|_, t, s| evolution_u(self.params.eps, -t, s))
    }

    /// Residual of a physical trajectory in the rescaled equations, `d_tau u + L u / eps + F(u) - f`.
    pub fn physical_residual(&self, w: &TrajectoryField) -> Result<TrajectoryField> {
        let r = crate::nashmoser::residual(self, w, 0.0, 0.0)?;
        Ok(self.to_physical(&r.phi1))
    }
}

impl Problem for GnProblem {
    type Coeffs = LinearizedCoeffs;

    fn initial_data(&self) -> &SpectralField {
        &self.init
    }

    fn evaluate_g(&self, t: f64, w: &SpectralField) -> Result<SpectralField> {
        let f = nonlinear_f(&self.params, &self.physical(t, w)?)?;
        Ok(evolution_u(self.params.eps, -t, &f.to_field()))
    }

    fn forcing(&self, t: f64) -> SpectralField {
        match &self.forcing {
            Forcing::None => SpectralField::zeros(self.init.grid(), self.init.components()),
            Forcing::Physical(f) => evolution_u(self.params.eps, -t, &f.interpolate(t)),
            Forcing::Conjugated(f) => f.interpolate(t),
        }
    }

    fn admissible(&self, t: f64, w: &SpectralField) -> Result<()> {
        let (ok, min) = depth_check(&self.params, &self.physical(t, w)?);
        if ok {
            Ok(())
        } else {
            Err(Error::domain("iterate", min, self.params.h0))
        }
    }

    fn linearize(&self, reference: &TrajectoryField) -> Result<LinearizedCoeffs> {
        build_linearized_coeffs_conjugated(&self.params, reference, None, self.mode)
    }

    fn solve_linearized(&self, coeffs: &LinearizedCoeffs, f: &TrajectoryField, g: &SpectralField) -> Result<TrajectoryField> {
        let (v, stats) = integrate_conjugated(coeffs, |t| f.interpolate(t), g, f.horizon(), f.steps(), &self.solver)?;
        self.linear_solves.fetch_add(1, Ordering::Relaxed);
        *self.last_stats.lock().expect("stats lock") = Some(stats);
        Ok(v)
    }

    fn norm(&self, u: &SpectralField, s: f64) -> f64 {
        x_norm_stacked(self.params.mu, u, s)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::banach_scale::{Grid, GridSpec};
    use crate::nashmoser::{compute_schedule, nash_moser_solve, picard_solve, SolveOptions};

    fn grid() -> Arc<Grid> {
        Grid::new(GridSpec::one_d(32, 2.0 * PI)).unwrap()
    }

    fn problem(g: &Arc<Grid>) -> GnProblem {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bottom = SpectralField::random_band_limited(g, 1, 2, 0.1, 1.0, true, &mut rng);
        let params = PhysicalParams::new(0.1, 0.5, bottom, 0.1).unwrap();
        let zeta = SpectralField::from_fn(g, 1, |x, _| 0.2 * x[0].cos());
        let v = SpectralField::zeros(g, 1);
        GnProblem::new(params, SpectralField::stack(&[&v, &zeta])).unwrap()
    }

    #[test]
    fn rejects_dry_initial_data() {
        let g = grid();
        let params = PhysicalParams::flat(&g, 0.1, 1.0, 0.2).unwrap();
        let zeta = SpectralField::from_fn(&g, 1, |x, _| 0.9 * x[0].cos());
        let init = SpectralField::stack(&[&SpectralField::zeros(&g, 1), &zeta]);
        assert!(matches!(GnProblem::new(params, init), Err(Error::Domain { .. })));
    }

    #[test]
    fn conjugated_nonlinearity_at_time_zero_is_the_physical_one() {
        let g = grid();
        let p = problem(&g);
        let direct = nonlinear_f(p.params(), &GnState::from_field(&p.init).unwrap()).unwrap().to_field();
        assert!(p.evaluate_g(0.0, &p.init).unwrap().max_coeff_diff(&direct) < 1e-14);
    }

    #[test]
    fn nash_moser_and_picard_agree_on_a_short_horizon() {
        let g = grid();
        let p = problem(&g).with_mode(LinearizationMode::Exact);
        let sched = compute_schedule(2.0, 2.0, 0.0, 4.0, 38.5, 0.5).unwrap().with_levels(1.0, 3.0);
        let mut opts = SolveOptions::new(0.2, 40);
        opts.target_residual = 1e-7;
        opts.k_max = 8;
        let (u_nm, trace) = nash_moser_solve(&p, &sched, &opts).unwrap();
        let last = trace.last().unwrap();
        assert!(last.residual_f < 1e-7, "residuals {:?}", trace.residuals());
        let (u_pc, _) = picard_solve(&p, &opts, 3.0, 2.0).unwrap();
        assert!(u_nm.last().max_coeff_diff(u_pc.last()) < 1e-6);
    }
}
