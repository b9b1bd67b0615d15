use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::Config;
use crate::banach_scale::{interpolate_bound_check, Grid, GridSpec, SpectralField, TrajectoryField};
use crate::error::Result;
use crate::green_naghdi::{
    apply_big_t, apply_t, build_linearized_coeffs, energy, invert_big_t, nonlinear_f, GnState, LinearizationMode,
    PhysicalParams,
};
use crate::linear_ivp::evolution_u;

/// Outcome of one randomized invariant check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub trials: usize,
    pub violations: usize,
    /// Largest observed violation measure; nonpositive when every trial passed.
    pub worst: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

fn tally(name: &'static str, margins: Vec<f64>) -> Check {
    Check {
        name,
        trials: margins.len(),
        violations: margins.iter().filter(|m| !(**m <= 0.0)).count(),
        worst: margins.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    }
}

fn rng(seed: u64, stream: u64, trial: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream * 1_000_003 + trial as u64);
    r
}

fn random_field(grid: &Arc<Grid>, comps: usize, r: &mut ChaCha8Rng) -> SpectralField {
    let band = r.gen_range(2..12);
    let decay = r.gen_range(0.0..2.0);
    SpectralField::random_band_limited(grid, comps, band, 1.0, decay, true, r)
}

fn run_trials(seed: u64, stream: u64, trials: usize, f: impl Fn(&mut ChaCha8Rng) -> Result<f64> + Sync) -> Result<Vec<f64>> {
    (0..trials).into_par_iter().map(|i| f(&mut rng(seed, stream, i))).collect()
}

/// Randomized checks of the scale, operator and evolution invariants. Each
/// margin is `lhs - rhs` (relative where appropriate), so a trial passes when
/// it is nonpositive.
pub fn run_validate(cfg: &Config, trials: usize) -> Result<ValidationReport> {
    let seed = cfg.seed;
    let g1 = Grid::new(GridSpec::one_d(64, 2.0 * PI))?;
    let g2 = Grid::new(GridSpec::two_d([24, 24], [2.0 * PI, 2.0 * PI]))?;
    let pick = |r: &mut ChaCha8Rng| if r.gen_bool(0.5) { g1.clone() } else { g2.clone() };
    let slack = 1e-12;
    let mut checks = Vec::new();

    let levels = |r: &mut ChaCha8Rng| {
        let s = r.gen_range(-1.0..4.0);
        (s, s + r.gen_range(0.0..4.0), r.gen_range(1.0..30.0))
    };
    checks.push(tally(
        "smoothing_low_pass",
        run_trials(seed, 1, trials, |r| {
            let g = pick(r);
            let u = random_field(&g, 1, r);
            let (s, sp, theta) = levels(r);
            Ok(u.smooth(theta)?.sobolev_norm(sp) - theta.powf(sp - s) * u.sobolev_norm(s) * (1.0 + slack))
        })?,
    ));
    checks.push(tally(
        "smoothing_high_pass",
        run_trials(seed, 2, trials, |r| {
            let g = pick(r);
            let u = random_field(&g, 1, r);
            let (s, sp, theta) = levels(r);
            let rest = &u - &u.smooth(theta)?;
            Ok(rest.sobolev_norm(s) - theta.powf(s - sp) * u.sobolev_norm(sp) * (1.0 + slack))
        })?,
    ));
    checks.push(tally(
        "interpolation",
        run_trials(seed, 3, trials, |r| {
            let g = pick(r);
            let u = random_field(&g, 1, r);
            let (s, sp, _) = levels(r);
            let mid = s + r.gen_range(0.0..=1.0) * (sp - s);
            let (lhs, rhs) = interpolate_bound_check(&u, s, sp, mid)?;
            Ok(lhs - rhs * (1.0 + slack))
        })?,
    ));

    let operator_trials = (trials / 5).max(1);
    // sup-normalized so that h >= 1 - 2 * 0.2 stays admissible
    let bump = |g: &Arc<Grid>, comps: usize, band: usize, r: &mut ChaCha8Rng| {
        let f = SpectralField::random_band_limited(g, comps, band, 1.0, 1.0, true, r);
        f.scaled(0.2 / f.max_abs_physical().max(f64::MIN_POSITIVE))
    };
    let instance = |r: &mut ChaCha8Rng| -> Result<(PhysicalParams, SpectralField, SpectralField)> {
        let g = pick(r);
        let eps = r.gen_range(0.1..1.0);
        let mu = r.gen_range(0.01..1.0);
        let params = PhysicalParams::new(mu, eps, bump(&g, 1, 3, r), 0.1)?;
        let h = params.depth(&bump(&g, 1, 4, r));
        let v = random_field(&g, g.dimension(), r);
        Ok((params, h, v))
    };
    checks.push(tally(
        "dispersion_symmetry",
        run_trials(seed, 4, operator_trials, |r| {
            let (params, h, v) = instance(r)?;
            let w = random_field(params.grid(), params.dimension(), r);
            let beta = params.scaled_bottom();
            let gap = (apply_t(&h, &beta, &v)?.inner(&w) - v.inner(&apply_t(&h, &beta, &w)?)).abs();
            Ok(gap - 1e-10 * v.l2_norm() * w.l2_norm() * (1.0 + params.mu))
        })?,
    ));
    checks.push(tally(
        "energy_coercivity",
        run_trials(seed, 5, operator_trials, |r| {
            let (params, h, v) = instance(r)?;
            let tv = apply_big_t(&params, &h, &v)?.inner(&v);
            let e = energy(&params, &h, &v)?;
            Ok((e * e - tv) / tv - 1e-10)
        })?,
    ));
    checks.push(tally(
        "inverse_bound",
        run_trials(seed, 6, operator_trials, |r| {
            let (params, h, v) = instance(r)?;
            let (w, _) = invert_big_t(&params, &h, &v, 1e-13, 1000)?;
            Ok(w.l2_norm() - (1.0 + 1e-8) * v.l2_norm() / params.h0)
        })?,
    ));
    checks.push(tally(
        "linearization_slope",
        run_trials(seed, 7, (operator_trials / 4).max(1), |r| {
            let (params, _, _) = instance(r)?;
            let g = params.grid().clone();
            let d = g.dimension();
            let ubar = GnState::from_field(&bump(&g, d + 1, 5, r))?;
            let v = GnState::from_field(&SpectralField::random_band_limited(&g, d + 1, 5, 1.0, 1.0, true, r))?;
            let traj = TrajectoryField::constant(1.0, 4, &ubar.to_field());
            let coeffs = build_linearized_coeffs(&params, &traj, None, LinearizationMode::Exact)?;
            let df = coeffs.at_index(0)?.derivative_f(&v)?;
            let f0 = nonlinear_f(&params, &ubar)?.to_field();
            let err = |eta: f64| -> Result<f64> {
                let mut shifted = ubar.to_field();
                shifted.axpy(eta, &v.to_field());
                let f1 = nonlinear_f(&params, &GnState::from_field(&shifted)?)?.to_field();
                Ok((&(&f1 - &f0).scaled(1.0 / eta) - &df).l2_norm())
            };
            let slope = (err(1e-3)? / err(1e-4)?).log10();
            Ok((slope - 1.0).abs() - 0.1)
        })?,
    ));

    let evolution = |r: &mut ChaCha8Rng| {
        let g = pick(r);
        let u = random_field(&g, g.dimension() + 1, r);
        (u, r.gen_range(0.05..1.0), r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0))
    };
    checks.push(tally(
        "evolution_group_law",
        run_trials(seed, 8, trials / 10, |r| {
            let (u, eps, t, s) = evolution(r);
            let two = evolution_u(eps, t, &evolution_u(eps, s, &u));
            Ok(two.max_coeff_diff(&evolution_u(eps, t + s, &u)) - 1e-12 * u.l2_norm().max(1.0))
        })?,
    ));
    checks.push(tally(
        "evolution_identity",
        run_trials(seed, 9, trials / 10, |r| {
            let (u, eps, _, _) = evolution(r);
            Ok(evolution_u(eps, 0.0, &u).max_coeff_diff(&u) - 1e-12)
        })?,
    ));
    checks.push(tally(
        "evolution_isometry",
        run_trials(seed, 10, trials / 10, |r| {
            let (u, eps, t, _) = evolution(r);
            Ok((evolution_u(eps, t, &u).l2_norm() - u.l2_norm()).abs() - 1e-12 * u.l2_norm())
        })?,
    ));

    let schedule = cfg.schedule.build();
    checks.push(tally(
        "schedule_conditions",
        vec![match &schedule {
            Ok(p) if p.condition_lower() && p.condition_upper() => -1.0,
            _ => 1.0,
        }],
    ));

    Ok(ValidationReport { seed, checks })
}
