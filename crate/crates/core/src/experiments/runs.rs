use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Config, Method, Regime};
use crate::banach_scale::{SpectralField, TrajectoryField};
use crate::error::{Error, Result};
use crate::gn_problem::{Forcing, GnProblem};
use crate::green_naghdi::{x_norm_stacked, PhysicalParams};
use crate::linear_ivp::SolverOptions;
use crate::nashmoser::{
    check_induction, loss_delta, nash_moser_solve_with_retry, p_min, InductionReport, IterationTrace, ScheduleParams,
};
use crate::reference::{gn0_residual, manufactured_residual, mol_solve_problem, MolRun, SolitaryWave};

/// Schedule constants, reported whether or not `P` is admissible.
#[derive(Debug, Clone, Serialize)]
pub struct ScheduleReport {
    pub delta: f64,
    pub q: f64,
    pub alpha: f64,
    #[serde(rename = "P")]
    pub big_p: f64,
    #[serde(rename = "P_min")]
    pub p_min: f64,
    pub feasible: bool,
    /// `delta = 0`: the lower bound on `r` is vacuous and `r` is drawn from `(1, r_upper)`.
    pub degenerate: bool,
    pub schedule: Option<ScheduleParams>,
}

pub fn run_schedule(cfg: &Config) -> Result<ScheduleReport> {
    let s = &cfg.schedule;
    let delta = loss_delta(s.m, s.d1, s.d1p);
    let q = s.big_d - s.m - s.d1p;
    let pm = p_min(s.m, s.d1, s.d1p, s.big_d);
    let alpha = delta + (2.0 * delta * (delta + q)).sqrt();
    let schedule = match s.build() {
        Ok(p) => Some(p),
        Err(Error::Infeasible { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ScheduleReport {
        delta,
        q,
        alpha,
        big_p: s.big_p,
        p_min: pm,
        feasible: schedule.is_some(),
        degenerate: delta == 0.0,
        schedule,
    })
}

/// Sup over time of the `X^s` distance between two aligned physical trajectories.
pub fn sup_distance(mu: f64, a: &TrajectoryField, b: &TrajectoryField, s: f64) -> Result<f64> {
    a.check_aligned(b)?;
    Ok(a.snapshots()
        .iter()
        .zip(b.snapshots())
        .map(|(x, y)| x_norm_stacked(mu, &(x - y), s))
        .fold(0.0, f64::max))
}

/// `max_tau |mean zeta(tau) - mean zeta(0)|`.
pub fn mass_drift(u: &TrajectoryField) -> f64 {
    let d = u.first().components() - 1;
    let m0 = u.first().mean(d);
    u.snapshots().iter().map(|s| (s.mean(d) - m0).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct NashMoserRun {
    pub physical: TrajectoryField,
    pub trace: IterationTrace,
    pub schedule: ScheduleParams,
    pub induction: InductionReport,
    pub linear_solves: usize,
    pub seconds: f64,
}

fn problem(cfg: &Config, params: &PhysicalParams, init: &SpectralField, forcing: Forcing) -> Result<GnProblem> {
    Ok(GnProblem::new(params.clone(), init.clone())?
        .with_forcing(forcing)
        .with_mode(cfg.solver.linearization)
        .with_solver(SolverOptions {
            substeps: cfg.solver.linear_substeps,
            growth_limit: cfg.solver.growth_limit,
        }))
}

pub fn run_nash_moser(cfg: &Config, params: &PhysicalParams, init: &SpectralField, forcing: Forcing) -> Result<NashMoserRun> {
    let start = Instant::now();
    let p = problem(cfg, params, init, forcing)?;
    let (w, trace, schedule) = nash_moser_solve_with_retry(&p, &cfg.schedule.build()?, &cfg.solve_options())?;
    let induction = check_induction(&trace, &schedule);
    Ok(NashMoserRun {
        physical: p.to_physical(&w),
        trace,
        schedule,
        induction,
        linear_solves: p.linear_solves(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn run_mol(cfg: &Config, params: &PhysicalParams, init: &SpectralField, forcing: Forcing) -> Result<MolRun> {
    let p = problem(cfg, params, init, forcing)?;
    mol_solve_problem(&p, cfg.time.horizon, cfg.time.steps, cfg.solver.mol_substeps)
}

/// Physical solution by the requested method (`Both` runs Nash-Moser).
pub fn solve_with(
    cfg: &Config,
    method: Method,
    params: &PhysicalParams,
    init: &SpectralField,
    forcing: Forcing,
) -> Result<TrajectoryField> {
    match method {
        Method::Mol => Ok(run_mol(cfg, params, init, forcing)?.physical),
        Method::NashMoser | Method::Both => Ok(run_nash_moser(cfg, params, init, forcing)?.physical),
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub nash_moser: Option<NashMoserRun>,
    pub mol: Option<MolRun>,
    /// Sup-over-time `X^0` distance between the two solutions when both ran.
    pub gap: Option<f64>,
}

pub fn run_solve(cfg: &Config) -> Result<SolveReport> {
    let params = cfg.params()?;
    let init = cfg.initial_state(&params)?;
    let method = cfg.solver.method;
    let (nm, mol) = rayon::join(
        || (method != Method::Mol).then(|| run_nash_moser(cfg, &params, &init, Forcing::None)).transpose(),
        || (method != Method::NashMoser).then(|| run_mol(cfg, &params, &init, Forcing::None)).transpose(),
    );
    let (nm, mol) = (nm?, mol?);
    let gap = match (&nm, &mol) {
        (Some(a), Some(b)) => Some(sup_distance(params.mu, &a.physical, &b.physical, 0.0)?),
        _ => None,
    };
    Ok(SolveReport {
        nash_moser: nm,
        mol,
        gap,
    })
}

/// Cross-solver gaps on the configured instance and on its refinement.
#[derive(Debug, Clone, Serialize)]
pub struct AgreementReport {
    pub gap: f64,
    pub refined_gap: f64,
    pub residual: f64,
    pub refined_residual: f64,
}

pub fn run_agreement(cfg: &Config) -> Result<AgreementReport> {
    let mut both = cfg.clone();
    both.solver.method = Method::Both;
    let (base, fine) = rayon::join(|| run_solve(&both), || run_solve(&both.refined()));
    let (base, fine) = (base?, fine?);
    let res = |r: &SolveReport| r.nash_moser.as_ref().and_then(|n| n.trace.last()).map_or(f64::NAN, |l| l.residual_f);
    Ok(AgreementReport {
        gap: base.gap.unwrap_or(f64::NAN),
        refined_gap: fine.gap.unwrap_or(f64::NAN),
        residual: res(&base),
        refined_residual: res(&fine),
    })
}

/// Least-squares slope of `log y` against `log x` over the positive pairs.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    /// `iota` for stability sweeps, `mu` for scaling sweeps.
    pub parameter: f64,
    pub eps: f64,
    pub error: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub rows: Vec<SweepRow>,
    pub slope: Option<f64>,
}

/// Perturb the reference solution `u` to `u + iota tau W`, take its residual as
/// forcing, re-solve from the same initial data and measure
/// `sup_tau |u_iota - u_0|_{X^0}`.
pub fn run_stability(cfg: &Config) -> Result<StabilityReport> {
    let params = cfg.params()?;
    let init = cfg.initial_state(&params)?;
    let method = cfg.stability.method;
    let reference = solve_with(cfg, method, &params, &init, Forcing::None)?;
    let shape = cfg.stability.perturbation.state(&params, cfg.seed.wrapping_add(2))?;
    let solve_perturbed = |iota: f64| -> Result<TrajectoryField> {
        let u_app = reference.map_indexed(|_, t, s| {
            let mut out = s.clone();
            out.axpy(iota * t, &shape);
            out
        });
        let res = manufactured_residual(&params, &u_app, None)?;
        solve_with(cfg, method, &params, &init, Forcing::Conjugated(res.conjugated))
    };
    let baseline = solve_perturbed(0.0)?;
    let rows: Vec<SweepRow> = cfg
        .stability
        .iotas
        .par_iter()
        .map(|&iota| {
            let outcome = if iota == 0.0 {
                Ok(0.0)
            } else {
                solve_perturbed(iota).and_then(|u| sup_distance(params.mu, &u, &baseline, 0.0))
            };
            row(iota, params.eps, outcome)
        })
        .collect();
    let slope = slope_of(&rows);
    Ok(StabilityReport { rows, slope })
}

fn row(parameter: f64, eps: f64, outcome: Result<f64>) -> SweepRow {
    match outcome {
        Ok(e) => SweepRow {
            parameter,
            eps,
            error: Some(e),
            failure: None,
        },
        Err(e) => SweepRow {
            parameter,
            eps,
            error: None,
            failure: Some(e.to_string()),
        },
    }
}

fn slope_of(rows: &[SweepRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.error.map(|e| (r.parameter, e))).collect();
    loglog_slope(&pts)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingSeries {
    pub regime: Regime,
    pub rows: Vec<SweepRow>,
    pub exponent: Option<f64>,
}

/// For each `mu` the approximate solution solves the system up to a residual
/// `mu^2 U(eps t) R_0` in original time, i.e. forcing `(mu^2 / eps) U(tau) R_0`
/// in rescaled time (constant `(mu^2 / eps) R_0` in the conjugated frame). The
/// error is `sup_tau |u_app - u|_{X^0}` against the unforced solution.
pub fn run_scaling(cfg: &Config) -> Result<Vec<ScalingSeries>> {
    let grid = cfg.grid()?;
    let jobs: Vec<(Regime, f64)> = cfg
        .scaling
        .regimes
        .iter()
        .flat_map(|&r| cfg.scaling.mus.iter().map(move |&mu| (r, mu)))
        .collect();
    let rows: Vec<(Regime, SweepRow)> = jobs
        .par_iter()
        .map(|&(regime, mu)| {
            let eps = regime.eps(mu, cfg.physics.eps).unwrap_or(f64::NAN);
            let outcome = (|| -> Result<f64> {
                let params = cfg.params_with(&grid, mu, regime.eps(mu, cfg.physics.eps)?)?;
                let init = cfg.initial_state(&params)?;
                let r0 = cfg.scaling.residual.state(&params, cfg.seed.wrapping_add(3))?;
                let forcing = TrajectoryField::constant(cfg.time.horizon, cfg.time.steps, &r0.scaled(mu * mu / eps));
                let method = cfg.scaling.method;
                let (exact, approx) = rayon::join(
                    || solve_with(cfg, method, &params, &init, Forcing::None),
                    || solve_with(cfg, method, &params, &init, Forcing::Conjugated(forcing)),
                );
                sup_distance(mu, &approx?, &exact?, 0.0)
            })();
            (regime, row(mu, eps, outcome))
        })
        .collect();
    Ok(cfg
        .scaling
        .regimes
        .iter()
        .map(|&regime| {
            let rows: Vec<SweepRow> = rows.iter().filter(|(r, _)| *r == regime).map(|(_, row)| row.clone()).collect();
            let exponent = slope_of(&rows);
            ScalingSeries { regime, rows, exponent }
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct SolitaryReport {
    pub speed: f64,
    pub kappa: f64,
    pub transit_time: f64,
    /// Max over sampled times of the `X^0` norm of the original-time residual.
    pub residual: f64,
    /// Sup over one transit of the `X^0` distance to the translated wave.
    pub shape_error: f64,
    pub mass_drift: f64,
}

/// Propagate the solitary wave over one transit with the method-of-lines solver.
pub fn run_solitary(cfg: &Config) -> Result<SolitaryReport> {
    let s = &cfg.solitary;
    let grid = crate::banach_scale::Grid::new(crate::banach_scale::GridSpec::one_d(s.nodes, s.length))?;
    let params = PhysicalParams::flat(&grid, s.mu, s.mu.sqrt(), cfg.physics.h0)?;
    let wave = SolitaryWave::new(&params, s.amplitude)?;
    let transit = wave.transit_time();
    let residual = (0..4)
        .map(|i| gn0_residual(&params, &wave, transit * i as f64 / 4.0).map(|r| x_norm_stacked(s.mu, &r, 0.0)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let init = wave.state(&params, 0.0)?.to_field();
    let p = GnProblem::new(params.clone(), init)?;
    let run = mol_solve_problem(&p, transit, s.steps, s.substeps)?;
    let exact = TrajectoryField::from_fn(transit, s.steps, |t| wave.state(&params, t).expect("wave state").to_field())?;
    let shape_error = sup_distance(s.mu, &run.physical, &exact, 0.0)?;
    Ok(SolitaryReport {
        speed: wave.speed,
        kappa: wave.kappa,
        transit_time: transit,
        residual,
        shape_error,
        mass_drift: run.stats.mass_drift,
    })
}
