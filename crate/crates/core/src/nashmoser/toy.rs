//! Scalar 1D transport `d_t u + c u_x + lambda u + kappa (u^2 / 2)_x = h` used to exercise the engine.

use std::sync::Arc;

use super::Problem;
use crate::banach_scale::{Grid, SpectralField, TrajectoryField};
use crate::error::Result;

pub struct Transport {
    grid: Arc<Grid>,
    init: SpectralField,
    c: f64,
    lambda: f64,
    kappa: f64,
    forcing: SpectralField,
}

impl Transport {
    pub fn new(grid: &Arc<Grid>, init: SpectralField, c: f64, lambda: f64, kappa: f64) -> Self {
        Transport {
            grid: grid.clone(),
            init,
            c,
            lambda,
            kappa,
            forcing: SpectralField::zeros(grid, 1),
        }
    }

    pub fn with_forcing(mut self, h: SpectralField) -> Self {
        self.forcing = h;
        self
    }

    fn product(&self, a: &SpectralField, b: &SpectralField) -> SpectralField {
        let (pa, pb) = (a.component_physical(0), b.component_physical(0));
        SpectralField::scalar(&self.grid, pa.iter().zip(&pb).map(|(x, y)| x * y).collect())
    }

    /// `c v_x + lambda v + kappa (ubar v)_x`
    fn linear_part(&self, ubar: &SpectralField, v: &SpectralField) -> SpectralField {
        let mut out = v.derivative(0).scaled(self.c);
        out.axpy(self.lambda, v);
        if self.kappa != 0.0 {
            out.axpy(self.kappa, &self.product(ubar, v).derivative(0));
        }
        out
    }
}

impl Problem for Transport {
    type Coeffs = TrajectoryField;

    fn initial_data(&self) -> &SpectralField {
        &self.init
    }

    fn evaluate_g(&self, _t: f64, u: &SpectralField) -> Result<SpectralField> {
        let mut out = u.derivative(0).scaled(self.c);
        out.axpy(self.lambda, u);
        if self.kappa != 0.0 {
            out.axpy(0.5 * self.kappa, &self.product(u, u).derivative(0));
        }
        Ok(out)
    }

    fn forcing(&self, _t: f64) -> SpectralField {
        self.forcing.clone()
    }

    fn admissible(&self, _t: f64, _u: &SpectralField) -> Result<()> {
        Ok(())
    }

    fn linearize(&self, reference: &TrajectoryField) -> Result<TrajectoryField> {
        Ok(reference.clone())
    }

    fn solve_linearized(&self, ubar: &TrajectoryField, f: &TrajectoryField, g: &SpectralField) -> Result<TrajectoryField> {
        const SUB: usize = 4;
        let h = f.time_step() / SUB as f64;
        let rhs = |t: f64, v: &SpectralField| {
            let mut r = f.interpolate(t);
            r -= &self.linear_part(&ubar.interpolate(t), v);
            r
        };
        let mut v = g.clone();
        let mut snaps = vec![v.clone()];
        for i in 0..f.steps() {
            for j in 0..SUB {
                let t = f.times()[i] + j as f64 * h;
                let k1 = rhs(t, &v);
                let k2 = rhs(t + 0.5 * h, &(&v + &k1.scaled(0.5 * h)));
                let k3 = rhs(t + 0.5 * h, &(&v + &k2.scaled(0.5 * h)));
                let k4 = rhs(t + h, &(&v + &k3.scaled(h)));
                v.axpy(h / 6.0, &k1);
                v.axpy(h / 3.0, &k2);
                v.axpy(h / 3.0, &k3);
                v.axpy(h / 6.0, &k4);
            }
            snaps.push(v.clone());
        }
        TrajectoryField::new(f.horizon(), snaps)
    }
}
