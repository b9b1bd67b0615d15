use serde::{Deserialize, Serialize};

use super::evolution::evolution_u;
use crate::banach_scale::{SpectralField, TrajectoryField};
use crate::error::{Error, Result};
use crate::green_naghdi::{x_norm_stacked, FrozenCoeffs, GnState, LinearizedCoeffs, PhysicalParams};

/// Forcing on the output time grid and initial data of a linearized problem.
#[derive(Debug, Clone)]
pub struct IvpData {
    pub forcing: TrajectoryField,
    pub initial: SpectralField,
}

impl IvpData {
    pub fn new(forcing: TrajectoryField, initial: SpectralField) -> Result<Self> {
        forcing.first().check_grid(&initial)?;
        Ok(IvpData { forcing, initial })
    }

    pub fn horizon(&self) -> f64 {
        self.forcing.horizon()
    }

    pub fn dt(&self) -> f64 {
        self.forcing.time_step()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// RK4 substeps per output interval; chosen from a spectral-radius bound when absent.
    #[serde(default)]
    pub substeps: Option<usize>,
    /// Largest tolerated norm growth over one output interval.
    #[serde(default = "default_growth")]
    pub growth_limit: f64,
}

fn default_growth() -> f64 {
    10.0
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            substeps: None,
            growth_limit: default_growth(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub steps: usize,
    pub substeps: usize,
    pub mass_solves: usize,
    pub mass_iterations: usize,
    pub max_mass_residual: f64,
}

/// Substeps keeping `h rho <= 2` for a bound `rho` on the conjugated operator:
/// the dispersive pressure term contributes up to `|xi| / eps`, advection `2 |V| |xi|`.
pub fn default_substeps(coeffs: &LinearizedCoeffs, dt: f64) -> usize {
    let params = coeffs.params();
    let grid = params.grid();
    let d = grid.dimension();
    let kmax = (0..grid.n_points())
        .filter(|&i| grid.in_band(i))
        .map(|i| grid.xi_diff(i)[..d].iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let vmax = (0..coeffs.len())
        .step_by((coeffs.len() / 8).max(1))
        .map(|i| {
            let (u, _) = coeffs.state_at_index(i);
            (0..d)
                .flat_map(|c| u.component_physical(c))
                .fold(0.0, |m: f64, x| m.max(x.abs()))
        })
        .fold(0.0, f64::max);
    let rho = kmax * (1.0 / params.eps + 2.0 * vmax + 1.0);
    ((dt * rho / 2.0).ceil() as usize).max(1)
}

struct Stepper<'a, F: Fn(f64) -> SpectralField> {
    coeffs: &'a LinearizedCoeffs,
    forcing_w: F,
    eps: f64,
    stats: SolverStats,
}

impl<F: Fn(f64) -> SpectralField> Stepper<'_, F> {
    /// `U(-t) [ -dF(t) U(t) w ] + f_w(t)`.
    fn rhs(&mut self, t: f64, frozen: &FrozenCoeffs, w: &SpectralField) -> Result<SpectralField> {
        let v = GnState::from_field(&evolution_u(self.eps, t, w))?;
        let (df, cg) = frozen.derivative_f_with_stats(&v)?;
        self.stats.mass_solves += 1;
        self.stats.mass_iterations += cg.iterations;
        self.stats.max_mass_residual = self.stats.max_mass_residual.max(cg.residual);
        let mut out = (self.forcing_w)(t);
        out.axpy(-1.0, &evolution_u(self.eps, -t, &df));
        Ok(out)
    }
}

/// Integrate `d_tau w + U(-tau) dF(tau) U(tau) w = f_w(tau)`, `w(0) = g_w`, with
/// classical RK4 on `steps` output intervals of `[0, horizon]`.
pub fn integrate_conjugated<F: Fn(f64) -> SpectralField>(
    coeffs: &LinearizedCoeffs,
    forcing_w: F,
    g_w: &SpectralField,
    horizon: f64,
    steps: usize,
    opts: &SolverOptions,
) -> Result<(TrajectoryField, SolverStats)> {
    let dt = horizon / steps as f64;
    let sub = opts.substeps.unwrap_or_else(|| default_substeps(coeffs, dt)).max(1);
    let h = dt / sub as f64;
    let mut st = Stepper {
        coeffs,
        forcing_w,
        eps: coeffs.params().eps,
        stats: SolverStats {
            steps,
            substeps: sub,
            ..Default::default()
        },
    };
    let mut w = g_w.clone();
    let mut snaps = Vec::with_capacity(steps + 1);
    snaps.push(w.clone());
    let mut frozen_start = st.coeffs.at_time(0.0)?;
    for i in 0..steps {
        let t_i = i as f64 * dt;
        let before = w.l2_norm();
        let mut fmax: f64 = 0.0;
        for j in 0..sub {
            let t = t_i + j as f64 * h;
            let mid = st.coeffs.at_time(t + 0.5 * h)?;
            let end = st.coeffs.at_time(t + h)?;
            let k1 = st.rhs(t, &frozen_start, &w)?;
            let k2 = st.rhs(t + 0.5 * h, &mid, &(&w + &k1.scaled(0.5 * h)))?;
            let k3 = st.rhs(t + 0.5 * h, &mid, &(&w + &k2.scaled(0.5 * h)))?;
            let k4 = st.rhs(t + h, &end, &(&w + &k3.scaled(h)))?;
            fmax = fmax.max((st.forcing_w)(t).l2_norm());
            w.axpy(h / 6.0, &k1);
            w.axpy(h / 3.0, &k2);
            w.axpy(h / 3.0, &k3);
            w.axpy(h / 6.0, &k4);
            frozen_start = end;
        }
        let after = w.l2_norm();
        if !after.is_finite() || (before > 0.0 && after > opts.growth_limit * (before + dt * fmax)) {
            return Err(Error::StepSize {
                time: t_i + dt,
                growth: after / before,
            });
        }
        snaps.push(w.clone());
    }
    Ok((TrajectoryField::new(horizon, snaps)?, st.stats))
}

/// Solve in the conjugated variable with forcing `f_w` given on the output grid.
pub fn solve_conjugated(
    coeffs: &LinearizedCoeffs,
    f_w: &TrajectoryField,
    g_w: &SpectralField,
    opts: &SolverOptions,
) -> Result<(TrajectoryField, SolverStats)> {
    integrate_conjugated(coeffs, |t| f_w.interpolate(t), g_w, f_w.horizon(), f_w.steps(), opts)
}

/// Solve `d_tau v + L v / eps + dF(tau) v = f`, `v(0) = g` and return `v` on the output grid.
pub fn solve_linearized(
    coeffs: &LinearizedCoeffs,
    ivp: &IvpData,
    opts: &SolverOptions,
) -> Result<(TrajectoryField, SolverStats)> {
    let eps = coeffs.params().eps;
    let f = &ivp.forcing;
    let (w, stats) = integrate_conjugated(
        coeffs,
        |t| evolution_u(eps, -t, &f.interpolate(t)),
        &ivp.initial,
        f.horizon(),
        f.steps(),
        opts,
    )?;
    Ok((w.map_indexed(|_, t, s| evolution_u(eps, t, s)), stats))
}

/// Empirical side of the linear energy estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyProbe {
    /// `sup_t |v(t)|_{X^s}`
    pub lhs: f64,
    /// `I^s(T, f, g) = |g|_{X^s} + int_0^T sup_{t'' <= t'} |f(t'')|_{X^s} dt'`
    pub data_s: f64,
    /// `I^{s0}` at the base index of the estimate.
    pub data_base: f64,
    /// `lhs / data_s`; zero when both vanish.
    pub ratio: f64,
}

fn data_size(mu: f64, ivp: &IvpData, s: f64) -> f64 {
    let dt = ivp.dt();
    let mut running: f64 = 0.0;
    let mut prev = None;
    let mut integral = 0.0;
    for snap in ivp.forcing.snapshots() {
        running = running.max(x_norm_stacked(mu, snap, s));
        if let Some(p) = prev {
            integral += 0.5 * dt * (p + running);
        }
        prev = Some(running);
    }
    x_norm_stacked(mu, &ivp.initial, s) + integral
}

/// Compare `sup |v|_{X^s}` with the data size `I^s(T, f, g)` for a completed solve.
pub fn energy_estimate_probe(
    params: &PhysicalParams,
    ivp: &IvpData,
    solution: &TrajectoryField,
    s: f64,
    s_base: f64,
) -> EnergyProbe {
    let lhs = solution.sup(|f| x_norm_stacked(params.mu, f, s));
    let data_s = data_size(params.mu, ivp, s);
    let data_base = data_size(params.mu, ivp, s_base);
    let ratio = if data_s > 0.0 { lhs / data_s } else { 0.0 };
    EnergyProbe {
        lhs,
        data_s,
        data_base,
        ratio,
    }
}
