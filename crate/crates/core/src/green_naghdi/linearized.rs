use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::operators::{depth_check, nonlinear_f, q_bilinear_into, CgStats, MassOperator};
use crate::linear_ivp::{evolution_u, singular_part};
use super::params::{GnState, PhysicalParams};
use super::pointwise::{advect, dot, dsym, project_scaled, second_directional, Assembly, Bottom, Kinematics, Scalar, Vector};
use crate::banach_scale::{FdOrder, SpectralField, TrajectoryField};
use crate::error::{Error, Result};

/// How the reference-dependent coefficients are assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LinearizationMode {
    /// `grad zeta + eps F_1` replaced by `-eps d_tau V` along the reference:
    /// exact on solutions, cheaper, and an approximate derivative elsewhere.
    #[default]
    Substituted,
    /// Coefficients from `F_1` evaluated on the reference: the exact Frechet derivative.
    Exact,
}

/// Frame in which a reference trajectory is stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceFrame {
    /// Snapshots are the physical states `u(tau)`.
    Physical,
    /// Snapshots are `w(tau) = U(-tau) u(tau)`; interpolation happens on `w`,
    /// which does not carry the fast `|xi| / eps` oscillation.
    Conjugated,
}

/// Coefficients of the linearized system along a reference trajectory (in rescaled time).
///
/// Coefficients at intermediate times are assembled from the cubically
/// interpolated reference and its time derivative.
#[derive(Debug, Clone)]
pub struct LinearizedCoeffs {
    params: PhysicalParams,
    mode: LinearizationMode,
    frame: ReferenceFrame,
    reference: TrajectoryField,
    /// `d_tau u` in the physical frame, `U(-tau) d_tau u` in the conjugated frame.
    derivative: TrajectoryField,
}

/// Frozen coefficients at one time.
#[derive(Debug, Clone)]
pub struct FrozenCoeffs {
    pub vbar: SpectralField,
    pub zetabar: SpectralField,
    pub hbar: SpectralField,
    pub dt_vbar: SpectralField,
    /// `a`: scalar coefficient multiplying `zeta` inside the gradient term.
    pub abar: SpectralField,
    /// `b`: vector coefficient multiplying `zeta`.
    pub bbar: SpectralField,
    eps: f64,
    mu: f64,
    mass: MassOperator,
    kin: Kinematics,
    a: Scalar,
    b: Vector,
    surface: Scalar,
    cg_tol: f64,
    cg_max_iter: usize,
}

fn split_velocity(u: &SpectralField) -> SpectralField {
    let d = u.grid().dimension();
    let parts: Vec<SpectralField> = (0..d).map(|c| u.component(c)).collect();
    let refs: Vec<&SpectralField> = parts.iter().collect();
    SpectralField::stack(&refs)
}

fn check_reference(params: &PhysicalParams, reference: &TrajectoryField, derivative: Option<&TrajectoryField>) -> Result<()> {
    let d = params.dimension();
    if reference.first().components() != d + 1 {
        return Err(Error::Parameter("reference must carry stacked (V, zeta) snapshots".into()));
    }
    if let Some(du) = derivative {
        reference.check_aligned(du)?;
    }
    Ok(())
}

/// Assemble the coefficients along `reference`, a trajectory of stacked `(V, zeta)` fields.
///
/// `dt_reference` is the rescaled-time derivative of the reference; when absent it
/// is taken by fourth-order finite differences.
pub fn build_linearized_coeffs(
    params: &PhysicalParams,
    reference: &TrajectoryField,
    dt_reference: Option<&TrajectoryField>,
    mode: LinearizationMode,
) -> Result<LinearizedCoeffs> {
    check_reference(params, reference, dt_reference)?;
    let derivative = dt_reference
        .cloned()
        .unwrap_or_else(|| reference.time_derivative(FdOrder::Fourth));
    finish(params, mode, ReferenceFrame::Physical, reference, derivative)
}

/// As [`build_linearized_coeffs`], for a reference given in the conjugated frame
/// `w = U(-tau) u`. `dt_w` defaults to fourth-order differences of `w`.
pub fn build_linearized_coeffs_conjugated(
    params: &PhysicalParams,
    w: &TrajectoryField,
    dt_w: Option<&TrajectoryField>,
    mode: LinearizationMode,
) -> Result<LinearizedCoeffs> {
    check_reference(params, w, dt_w)?;
    let dw = dt_w.cloned().unwrap_or_else(|| w.time_derivative(FdOrder::Fourth));
    // U(-tau) d_tau u = d_tau w - L w / eps
    let derivative = dw.map_indexed(|i, _, d| d - &singular_part(params.eps, w.snapshot(i)));
    finish(params, mode, ReferenceFrame::Conjugated, w, derivative)
}

fn finish(
    params: &PhysicalParams,
    mode: LinearizationMode,
    frame: ReferenceFrame,
    reference: &TrajectoryField,
    derivative: TrajectoryField,
) -> Result<LinearizedCoeffs> {
    let coeffs = LinearizedCoeffs {
        params: params.clone(),
        mode,
        frame,
        reference: reference.clone(),
        derivative,
    };
    (0..coeffs.len()).into_par_iter().try_for_each(|i| {
        let (u, _) = coeffs.state_at_index(i);
        let state = GnState::from_field(&u)?;
        let (ok, min) = depth_check(params, &state);
        if ok {
            Ok(())
        } else {
            Err(Error::domain(
                format!("linearization reference at t = {}", reference.times()[i]),
                min,
                params.h0,
            ))
        }
    })?;
    Ok(coeffs)
}

impl LinearizedCoeffs {
    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn mode(&self) -> LinearizationMode {
        self.mode
    }

    pub fn frame(&self) -> ReferenceFrame {
        self.frame
    }

    pub fn reference(&self) -> &TrajectoryField {
        &self.reference
    }

    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }

    fn to_physical(&self, t: f64, u: SpectralField, du: SpectralField) -> (SpectralField, SpectralField) {
        match self.frame {
            ReferenceFrame::Physical => (u, du),
            ReferenceFrame::Conjugated => (evolution_u(self.params.eps, t, &u), evolution_u(self.params.eps, t, &du)),
        }
    }

    /// Physical reference state and its time derivative at snapshot `i`.
    pub fn state_at_index(&self, i: usize) -> (SpectralField, SpectralField) {
        let t = self.reference.times()[i];
        self.to_physical(t, self.reference.snapshot(i).clone(), self.derivative.snapshot(i).clone())
    }

    /// Physical reference state and its time derivative at time `t`, interpolated.
    pub fn state_at_time(&self, t: f64) -> (SpectralField, SpectralField) {
        self.to_physical(t, self.reference.interpolate(t), self.derivative.interpolate(t))
    }

    pub fn at_index(&self, i: usize) -> Result<FrozenCoeffs> {
        if i >= self.len() {
            return Err(Error::Parameter(format!("snapshot {i} out of range 0..{}", self.len())));
        }
        let (u, du) = self.state_at_index(i);
        FrozenCoeffs::new(&self.params, self.mode, &u, &du)
    }

    pub fn at_time(&self, t: f64) -> Result<FrozenCoeffs> {
        let (u, du) = self.state_at_time(t);
        FrozenCoeffs::new(&self.params, self.mode, &u, &du)
    }
}

impl FrozenCoeffs {
    fn new(params: &PhysicalParams, mode: LinearizationMode, u: &SpectralField, du: &SpectralField) -> Result<Self> {
        let grid = params.grid();
        let state = GnState::from_field(u)?;
        let (eps, mu) = (params.eps, params.mu);
        let hbar = params.depth(&state.zeta);
        let beta = params.scaled_bottom();
        let mass = MassOperator::from_physical(grid, hbar.component_physical(0), Bottom::new(&beta), mu);
        let min = mass.min_depth();
        if !(min >= params.h0) {
            return Err(Error::domain("frozen coefficients", min, params.h0));
        }
        let dt_vbar = split_velocity(du);
        // y = grad zeta + eps F_1, z = -eps F_1
        let (y, z) = match mode {
            LinearizationMode::Substituted => {
                let dv = dt_vbar.scaled(eps);
                let mut z = dv.clone();
                z += &state.zeta.gradient();
                (-&dv, z)
            }
            LinearizationMode::Exact => {
                let f1 = nonlinear_f(params, &state)?.v.scaled(eps);
                let mut y = f1.clone();
                y += &state.zeta.gradient();
                (y, -&f1)
            }
        };
        let (y, z) = (&y, &z);
        let kin = Kinematics::new(&state.v);
        let h = &mass.h;
        let n = h.len();
        let yk = Kinematics::new(y);
        let ds = dsym(&kin, &kin);
        let s2 = second_directional(&kin, &kin, &mass.bottom);
        let gby = if mass.bottom.flat { vec![0.0; n] } else { dot(&mass.bottom.grad, &yk.v) };
        let a: Scalar = (0..n)
            .map(|x| eps * h[x] * ds[x] + eps * s2[x] + h[x] * yk.div[x] - gby[x])
            .collect();
        let adv = advect(&kin, &kin);
        let zp = z.to_physical();
        let b: Vector = (0..params.dimension())
            .map(|i| {
                (0..n)
                    .map(|x| {
                        let bottom = if mass.bottom.flat { 0.0 } else { mu * a[x] * mass.bottom.grad[i][x] };
                        eps * adv[i][x] + zp[i][x] + bottom
                    })
                    .collect()
            })
            .collect();
        let surface = (&state.zeta - &params.bathymetry).component_physical(0);
        Ok(FrozenCoeffs {
            abar: SpectralField::from_physical_dealiased(grid, std::slice::from_ref(&a)),
            bbar: SpectralField::from_physical_dealiased(grid, &b),
            vbar: state.v,
            zetabar: state.zeta,
            hbar,
            dt_vbar,
            eps,
            mu,
            mass,
            kin,
            a,
            b,
            surface,
            cg_tol: params.cg.tol,
            cg_max_iter: params.cg.max_iter,
        })
    }

    pub fn mass(&self) -> &MassOperator {
        &self.mass
    }

    /// Momentum operators without the singular `h grad zeta / eps` term:
    /// `N_1 V + b zeta + mu grad(h a zeta)`.
    fn momentum_regular(&self, v: &GnState) -> Assembly {
        let grid = self.mass.grid();
        let h = &self.mass.h;
        let n = h.len();
        let d = grid.dimension();
        let k = Kinematics::new(&v.v);
        let mut asm = Assembly::new(d, n);
        let a1 = advect(&self.kin, &k);
        let a2 = advect(&k, &self.kin);
        let zeta = v.zeta.component_physical(0);
        for i in 0..d {
            for x in 0..n {
                asm.vector[i][x] += h[x] * (a1[i][x] + a2[i][x]) + self.b[i][x] * zeta[x];
            }
        }
        let ds = dsym(&self.kin, &k);
        for x in 0..n {
            asm.potential[x] += self.mu * (2.0 * self.mass.h3[x] * ds[x] / 3.0 + h[x] * self.a[x] * zeta[x]);
        }
        q_bilinear_into(h, &self.mass.bottom, &self.kin, &k, 2.0 * self.mu, &mut asm);
        asm
    }

    /// `(N_1 V + N_2 zeta, N_3 V + N_4 zeta)` as a stacked field.
    pub fn apply_n(&self, v: &GnState) -> Result<SpectralField> {
        let grid = self.mass.grid();
        let mut asm = self.momentum_regular(v);
        let gz = v.zeta.gradient().to_physical();
        for (out, g) in asm.vector.iter_mut().zip(&gz) {
            for x in 0..g.len() {
                out[x] += self.mass.h[x] * g[x] / self.eps;
            }
        }
        let first = asm.finish(grid);
        let vp = v.v.to_physical();
        let mut second = project_scaled(grid, &self.mass.h, &vp).divergence().scaled(1.0 / self.eps);
        second += &project_scaled(grid, &v.zeta.component_physical(0), &self.kin.v).divergence();
        Ok(SpectralField::stack(&[&first, &second]))
    }

    /// Frozen derivative of the nonlinear term, `dF[ubar] v`, as a stacked field.
    ///
    /// Momentum part: `T^{-1}(N_1 V + N_2 zeta) - grad zeta / eps`, assembled as
    /// `T^{-1}(N_1 V - (mu / eps) T grad zeta + b zeta + mu grad(h a zeta))`.
    /// Mass part: `div((zetabar - b) V) + div(zeta Vbar)`.
    pub fn derivative_f(&self, v: &GnState) -> Result<SpectralField> {
        Ok(self.derivative_f_with_stats(v)?.0)
    }

    pub fn derivative_f_with_stats(&self, v: &GnState) -> Result<(SpectralField, CgStats)> {
        let grid = self.mass.grid();
        let mut rhs = self.momentum_regular(v).finish(grid);
        if self.mu != 0.0 {
            rhs.axpy(-self.mu / self.eps, &self.mass.dispersion(&v.zeta.gradient())?);
        }
        let (first, stats) = self.mass.invert(&rhs, self.cg_tol, self.cg_max_iter)?;
        let vp = v.v.to_physical();
        let mut second = project_scaled(grid, &self.surface, &vp).divergence();
        second += &project_scaled(grid, &v.zeta.component_physical(0), &self.kin.v).divergence();
        Ok((SpectralField::stack(&[&first, &second]), stats))
    }
}

/// `(N_1 V + N_2 zeta, N_3 V + N_4 zeta)` at snapshot `index` of the coefficients.
pub fn apply_n(coeffs: &LinearizedCoeffs, index: usize, v: &GnState) -> Result<SpectralField> {
    coeffs.at_index(index)?.apply_n(v)
}
