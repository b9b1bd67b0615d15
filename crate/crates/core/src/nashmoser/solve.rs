use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::Problem;
use super::schedule::ScheduleParams;
use super::trace::{properties, IterationRecord, IterationTrace};
use crate::banach_scale::{trajectory_norm_with, FdOrder, SpectralField, TrajectoryField, TrajectoryNorm};
use crate::error::{Error, Result};

/// Time grid and stopping rules shared by the iterative solvers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveOptions {
    pub horizon: f64,
    pub steps: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_target")]
    pub target_residual: f64,
    /// Divergence: residual grows by more than `divergence_factor` on
    /// `divergence_patience` consecutive iterations.
    #[serde(default = "default_div_factor")]
    pub divergence_factor: f64,
    #[serde(default = "default_div_patience")]
    pub divergence_patience: usize,
    /// Extra attempts with `theta0` doubled after a divergence.
    #[serde(default = "default_retries")]
    pub theta_retries: usize,
}

fn default_k_max() -> usize {
    25
}
fn default_target() -> f64 {
    1e-8
}
fn default_div_factor() -> f64 {
    10.0
}
fn default_div_patience() -> usize {
    3
}
fn default_retries() -> usize {
    3
}

impl SolveOptions {
    pub fn new(horizon: f64, steps: usize) -> Self {
        SolveOptions {
            horizon,
            steps,
            k_max: default_k_max(),
            target_residual: default_target(),
            divergence_factor: default_div_factor(),
            divergence_patience: default_div_patience(),
            theta_retries: default_retries(),
        }
    }
}

/// `Phi(u) = (d_t u + G[., u] - h, u(0) - u_init)` and its F-scale norm.
#[derive(Debug, Clone)]
pub struct Residual {
    pub phi1: TrajectoryField,
    pub phi2: SpectralField,
    /// `|phi1|_{X^{idx}_T}`
    pub norm_phi1: f64,
    /// `|phi2|_{idx + m}`
    pub norm_phi2: f64,
}

impl Residual {
    pub fn total(&self) -> f64 {
        self.norm_phi1 + self.norm_phi2
    }
}

fn check_trajectory<P: Problem>(p: &P, u: &TrajectoryField, context: &str) -> Result<()> {
    u.times()
        .par_iter()
        .zip(u.snapshots().par_iter())
        .try_for_each(|(&t, s)| {
            p.admissible(t, s).map_err(|e| match e {
                Error::Domain { context: c, min_depth, h0 } => Error::Domain {
                    context: format!("{context}, t = {t}: {c}"),
                    min_depth,
                    h0,
                },
                other => other,
            })
        })
}

/// `u0(t) = u_init + int_0^t (h(t') - G[t', u_init]) dt'` by the composite trapezoid rule.
pub fn initial_iterate<P: Problem>(p: &P, horizon: f64, steps: usize) -> Result<TrajectoryField> {
    let init = p.initial_data();
    p.admissible(0.0, init)?;
    let dt = horizon / steps as f64;
    let integrand: Vec<SpectralField> = (0..=steps)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 * dt;
            let mut g = p.forcing(t);
            g -= &p.evaluate_g(t, init)?;
            Ok(g)
        })
        .collect::<Result<_>>()?;
    let mut snaps = Vec::with_capacity(steps + 1);
    snaps.push(init.clone());
    let mut acc = SpectralField::zeros(init.grid(), init.components());
    for i in 1..=steps {
        acc.axpy(0.5 * dt, &integrand[i - 1]);
        acc.axpy(0.5 * dt, &integrand[i]);
        snaps.push(init + &acc);
    }
    TrajectoryField::new(horizon, snaps)
}

/// Residual of a trajectory; `index` is the X-scale index of the first component
/// of the F-norm and `m` the order shift for the initial-data part.
pub fn residual<P: Problem>(p: &P, u: &TrajectoryField, index: f64, m: f64) -> Result<Residual> {
    let du = u.time_derivative(FdOrder::Fourth);
    let snaps: Vec<SpectralField> = u
        .times()
        .par_iter()
        .zip(u.snapshots().par_iter())
        .zip(du.snapshots().par_iter())
        .map(|((&t, s), d)| {
            let mut r = d + &p.evaluate_g(t, s)?;
            r -= &p.forcing(t);
            Ok(r)
        })
        .collect::<Result<_>>()?;
    let phi1 = u.with_snapshots(snaps)?;
    let phi2 = u.first() - p.initial_data();
    let norm_phi1 = phi1.sup(|f| p.norm(f, index));
    let norm_phi2 = p.norm(&phi2, index + m);
    Ok(Residual {
        phi1,
        phi2,
        norm_phi1,
        norm_phi2,
    })
}

/// `|u|_{E^s}` with the problem's spatial norm.
pub fn energy_norm<P: Problem>(p: &P, u: &TrajectoryField, s: f64, m: f64) -> f64 {
    trajectory_norm_with(u, s, TrajectoryNorm::Es, m, 1.0, |f, s| p.norm(f, s)).expect("E^s norm needs no extra snapshots")
}

/// Output of one corrective step.
#[derive(Debug, Clone)]
pub struct Step {
    pub v: TrajectoryField,
    pub smoothed: TrajectoryField,
    pub next: TrajectoryField,
    pub theta: f64,
}

/// `v = L^{-1}(-Phi1, -Phi2)`, `u_next = u + S_theta v` (snapshot-wise smoothing).
pub fn corrective_step<P: Problem>(p: &P, u: &TrajectoryField, res: &Residual, theta: f64) -> Result<Step> {
    let coeffs = p.linearize(u)?;
    let f = res.phi1.scaled(-1.0);
    let g = res.phi2.scaled(-1.0);
    let v = p.solve_linearized(&coeffs, &f, &g)?;
    let smoothed = v.try_map_indexed(|_, _, s| s.smooth(theta))?;
    let mut next = u.clone();
    next.axpy(1.0, &smoothed);
    Ok(Step {
        v,
        smoothed,
        next,
        theta,
    })
}

struct Divergence {
    factor: f64,
    patience: usize,
    streak: usize,
}

impl Divergence {
    fn observe(&mut self, prev: Option<f64>, cur: f64) -> bool {
        match prev {
            Some(p) if cur > self.factor * p => self.streak += 1,
            _ => self.streak = 0,
        }
        self.streak >= self.patience || !cur.is_finite()
    }
}

/// Nash-Moser iteration `u_{k+1} = u_k + S_{theta_k} v_k` from the initial iterate.
///
/// Returns the last iterate and the trace; the schedule's `M` is set from the
/// initial iterate as `2 |u_0|_{E^{s+D}} + 1` when not supplied.
pub fn nash_moser_solve<P: Problem>(
    p: &P,
    schedule: &ScheduleParams,
    opts: &SolveOptions,
) -> Result<(TrajectoryField, IterationTrace)> {
    let mut u = initial_iterate(p, opts.horizon, opts.steps)?;
    let (s, m) = (schedule.s, schedule.m);
    let idx_d = s + schedule.big_d;
    let idx_p = s + schedule.big_p;
    let big_m = schedule.big_m.unwrap_or_else(|| 2.0 * energy_norm(p, &u, idx_d, m) + 1.0);
    let mut trace = IterationTrace {
        records: Vec::new(),
        big_m,
    };
    let mut div = Divergence {
        factor: opts.divergence_factor,
        patience: opts.divergence_patience,
        streak: 0,
    };
    let mut prev: Option<f64> = None;
    for k in 0..=opts.k_max {
        check_trajectory(p, &u, &format!("iteration {k}"))?;
        let theta = schedule.theta(k);
        let res = residual(p, &u, schedule.residual_index(), m)?;
        let r = res.total();
        let mut rec = IterationRecord {
            k,
            theta_k: theta,
            norm_u_esd: energy_norm(p, &u, idx_d, m),
            norm_u_esp: energy_norm(p, &u, idx_p, m),
            norm_v_esd: None,
            residual_f: r,
            prop_i: true,
            prop_ii: true,
            prop_iii: true,
        };
        let diverged = div.observe(prev, r);
        prev = Some(r);
        if r <= opts.target_residual || k == opts.k_max || diverged {
            [rec.prop_i, rec.prop_ii, rec.prop_iii] = properties(&rec, schedule, big_m);
            trace.records.push(rec);
            if diverged {
                return Err(Error::Divergence {
                    iteration: k,
                    residual: r,
                    trace: Box::new(trace),
                });
            }
            break;
        }
        let step = corrective_step(p, &u, &res, theta)?;
        rec.norm_v_esd = Some(energy_norm(p, &step.v, idx_d, m));
        [rec.prop_i, rec.prop_ii, rec.prop_iii] = properties(&rec, schedule, big_m);
        trace.records.push(rec);
        u = step.next;
    }
    Ok((u, trace))
}

/// [`nash_moser_solve`] with `theta0` doubled after each divergence, up to `opts.theta_retries` times.
pub fn nash_moser_solve_with_retry<P: Problem>(
    p: &P,
    schedule: &ScheduleParams,
    opts: &SolveOptions,
) -> Result<(TrajectoryField, IterationTrace, ScheduleParams)> {
    let mut sched = schedule.clone();
    let mut attempt = 0;
    loop {
        match nash_moser_solve(p, &sched, opts) {
            Ok((u, t)) => return Ok((u, t, sched)),
            Err(Error::Divergence { .. }) if attempt < opts.theta_retries => {
                attempt += 1;
                sched.theta0 *= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Unsmoothed fixed-point baseline: `u_{k+1} = u_k + v_k`. Returns the residual history.
pub fn picard_solve<P: Problem>(p: &P, opts: &SolveOptions, index: f64, m: f64) -> Result<(TrajectoryField, Vec<f64>)> {
    let mut u = initial_iterate(p, opts.horizon, opts.steps)?;
    let mut history = Vec::new();
    let mut div = Divergence {
        factor: opts.divergence_factor,
        patience: opts.divergence_patience,
        streak: 0,
    };
    for k in 0..=opts.k_max {
        check_trajectory(p, &u, &format!("iteration {k}"))?;
        let res = residual(p, &u, index, m)?;
        let r = res.total();
        let diverged = div.observe(history.last().copied(), r);
        history.push(r);
        if diverged {
            return Err(Error::Divergence {
                iteration: k,
                residual: r,
                trace: Box::default(),
            });
        }
        if r <= opts.target_residual || k == opts.k_max {
            break;
        }
        let coeffs = p.linearize(&u)?;
        let v = p.solve_linearized(&coeffs, &res.phi1.scaled(-1.0), &res.phi2.scaled(-1.0))?;
        u.axpy(1.0, &v);
    }
    Ok((u, history))
}
