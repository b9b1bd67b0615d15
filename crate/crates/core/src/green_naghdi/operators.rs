use std::sync::Arc;

use num_complex::Complex64;

use super::params::{GnState, PhysicalParams};
use super::pointwise::{
    advect, dot, dsym, project_scaled, second_directional, Assembly, Bottom, Kinematics, Scalar,
};
use crate::banach_scale::{Grid, SpectralField};
use crate::error::{Error, Result};

/// Iteration count and final relative residual of a mass-operator inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    pub residual: f64,
}

/// `h + mu T[h, beta]` frozen at one depth profile and one scaled bottom.
#[derive(Debug, Clone)]
pub struct MassOperator {
    grid: Arc<Grid>,
    mu: f64,
    pub(crate) h: Scalar,
    pub(crate) h2: Scalar,
    pub(crate) h3: Scalar,
    pub(crate) bottom: Bottom,
    h_mean: f64,
}

impl MassOperator {
    pub fn new(h: &SpectralField, beta: &SpectralField, mu: f64) -> Result<Self> {
        if !h.grid().same_as(beta.grid()) {
            return Err(Error::GridMismatch("depth and bottom on different grids".into()));
        }
        Ok(Self::from_physical(h.grid(), h.component_physical(0), Bottom::new(beta), mu))
    }

    pub(crate) fn from_physical(grid: &Arc<Grid>, h: Scalar, bottom: Bottom, mu: f64) -> Self {
        let h2: Scalar = h.iter().map(|x| x * x).collect();
        let h3: Scalar = h.iter().zip(&h2).map(|(x, y)| x * y).collect();
        let h_mean = h.iter().sum::<f64>() / h.len() as f64;
        MassOperator {
            grid: grid.clone(),
            mu,
            h,
            h2,
            h3,
            bottom,
            h_mean,
        }
    }

    pub fn min_depth(&self) -> f64 {
        self.h.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn check(&self, v: &SpectralField) -> Result<()> {
        if !v.grid().same_as(&self.grid) || v.components() != self.grid.dimension() {
            return Err(Error::GridMismatch("operand is not a vector field on the operator grid".into()));
        }
        Ok(())
    }

    fn dispersion_into(&self, k: &Kinematics, scale: f64, asm: &mut Assembly) {
        let n = self.h.len();
        let gb = &self.bottom.grad;
        let flat = self.bottom.flat;
        let gbv = if flat { Vec::new() } else { dot(gb, &k.v) };
        for x in 0..n {
            let mut p = -self.h3[x] * k.div[x] / 3.0;
            if !flat {
                p += 0.5 * self.h2[x] * gbv[x];
            }
            asm.potential[x] += scale * p;
        }
        if flat {
            return;
        }
        for (i, out) in asm.vector.iter_mut().enumerate() {
            for x in 0..n {
                let w = -0.5 * self.h2[x] * k.div[x] + self.h[x] * gbv[x];
                out[x] += scale * gb[i][x] * w;
            }
        }
    }

    /// `T[h, beta] V`.
    pub fn dispersion(&self, v: &SpectralField) -> Result<SpectralField> {
        self.check(v)?;
        let k = Kinematics::new(v);
        let mut asm = Assembly::new(self.grid.dimension(), self.h.len());
        self.dispersion_into(&k, 1.0, &mut asm);
        Ok(asm.finish(&self.grid))
    }

    /// `(h + mu T[h, beta]) V`.
    pub fn apply(&self, v: &SpectralField) -> Result<SpectralField> {
        self.check(v)?;
        let k = Kinematics::new(v);
        let mut asm = Assembly::new(self.grid.dimension(), self.h.len());
        for (out, vc) in asm.vector.iter_mut().zip(&k.v) {
            for ((o, hx), vx) in out.iter_mut().zip(&self.h).zip(vc) {
                *o += hx * vx;
            }
        }
        if self.mu != 0.0 {
            self.dispersion_into(&k, self.mu, &mut asm);
        }
        Ok(asm.finish(&self.grid))
    }

    /// Flat-bottom constant-depth inverse at the mean depth: longitudinal modes
    /// see `h + mu h^3 |xi|^2 / 3`, transverse modes see `h`.
    fn precondition(&self, r: &SpectralField) -> SpectralField {
        let d = self.grid.dimension();
        let n = self.grid.n_points();
        let hb = self.h_mean;
        let mut out = r.clone();
        for idx in 0..n {
            let xi = self.grid.xi_diff(idx);
            let k2: f64 = xi[..d].iter().map(|x| x * x).sum();
            let long = 1.0 / (hb + self.mu * hb * hb * hb * k2 / 3.0);
            let tran = 1.0 / hb;
            if k2 == 0.0 {
                for c in 0..d {
                    out.coeffs_mut()[c * n + idx] = r.coeffs()[c * n + idx] * tran;
                }
                continue;
            }
            let kn = k2.sqrt();
            let nv: Vec<f64> = xi[..d].iter().map(|x| x / kn).collect();
            let along: Complex64 = (0..d).map(|c| r.coeffs()[c * n + idx] * nv[c]).sum();
            for c in 0..d {
                let rc = r.coeffs()[c * n + idx];
                out.coeffs_mut()[c * n + idx] = (rc - along * nv[c]) * tran + along * nv[c] * long;
            }
        }
        out
    }

    /// Preconditioned conjugate gradients on the band-limited subspace; the
    /// right-hand side is projected onto the dealiasing band first.
    pub fn invert(&self, rhs: &SpectralField, tol: f64, max_iter: usize) -> Result<(SpectralField, CgStats)> {
        self.check(rhs)?;
        let mut b = rhs.clone();
        b.dealias();
        let b_norm = b.l2_norm();
        let mut x = SpectralField::zeros(&self.grid, self.grid.dimension());
        if b_norm == 0.0 {
            return Ok((
                x,
                CgStats {
                    iterations: 0,
                    residual: 0.0,
                },
            ));
        }
        let mut r = b.clone();
        let mut z = self.precondition(&r);
        let mut p = z.clone();
        let mut rz = r.inner(&z);
        let mut rel = 1.0;
        for it in 1..=max_iter {
            let ap = self.apply(&p)?;
            let pap = p.inner(&ap);
            if !(pap > 0.0) {
                return Err(Error::Solver {
                    iterations: it,
                    residual: rel,
                });
            }
            let alpha = rz / pap;
            x.axpy(alpha, &p);
            r.axpy(-alpha, &ap);
            rel = r.l2_norm() / b_norm;
            if rel <= tol {
                let true_rel = (&b - &self.apply(&x)?).l2_norm() / b_norm;
                return Ok((
                    x,
                    CgStats {
                        iterations: it,
                        residual: true_rel,
                    },
                ));
            }
            z = self.precondition(&r);
            let rz_new = r.inner(&z);
            let beta = rz_new / rz;
            rz = rz_new;
            p *= beta;
            p += &z;
        }
        Err(Error::Solver {
            iterations: max_iter,
            residual: rel,
        })
    }

    /// `E[beta](V)` by grid quadrature.
    pub fn energy(&self, v: &SpectralField, h0: f64) -> Result<f64> {
        self.check(v)?;
        let k = Kinematics::new(v);
        let n = self.h.len();
        let gbv = if self.bottom.flat { vec![0.0; n] } else { dot(&self.bottom.grad, &k.v) };
        let s3 = 3f64.sqrt();
        let mut acc = 0.0;
        for x in 0..n {
            let vv: f64 = k.v.iter().map(|c| c[x] * c[x]).sum();
            let a = self.h[x] * k.div[x] / s3 - 0.5 * s3 * gbv[x];
            acc += vv + self.mu * (a * a + 0.25 * gbv[x] * gbv[x]);
        }
        Ok((h0 * acc * self.grid.volume() / n as f64).sqrt())
    }

    pub(crate) fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
}

pub(crate) fn q_bilinear_into(
    h: &Scalar,
    bottom: &Bottom,
    a: &Kinematics,
    b: &Kinematics,
    scale: f64,
    asm: &mut Assembly,
) {
    if bottom.flat {
        return;
    }
    let s2 = second_directional(a, b, bottom);
    let ds = dsym(a, b);
    for x in 0..h.len() {
        asm.potential[x] += scale * 0.5 * h[x] * h[x] * s2[x];
    }
    for (i, out) in asm.vector.iter_mut().enumerate() {
        for x in 0..h.len() {
            let w = h[x] * (0.5 * h[x] * ds[x] + s2[x]);
            out[x] += scale * w * bottom.grad[i][x];
        }
    }
}

fn check_vector(v: &SpectralField, grid: &Arc<Grid>) -> Result<()> {
    if !v.grid().same_as(grid) || v.components() != grid.dimension() {
        return Err(Error::GridMismatch("expected a vector field on the operator grid".into()));
    }
    Ok(())
}

/// `T[h, beta] V`.
pub fn apply_t(h: &SpectralField, beta: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    MassOperator::new(h, beta, 0.0)?.dispersion(v)
}

/// `(h + mu T[h, eps b]) V`.
pub fn apply_big_t(params: &PhysicalParams, h: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    MassOperator::new(h, &params.scaled_bottom(), params.mu)?.apply(v)
}

/// `E[eps b](V)`.
pub fn energy(params: &PhysicalParams, h: &SpectralField, v: &SpectralField) -> Result<f64> {
    MassOperator::new(h, &params.scaled_bottom(), params.mu)?.energy(v, params.h0)
}

/// Solve `(h + mu T[h, eps b]) W = V`.
pub fn invert_big_t(
    params: &PhysicalParams,
    h: &SpectralField,
    v: &SpectralField,
    tol: f64,
    max_iter: usize,
) -> Result<(SpectralField, CgStats)> {
    let op = MassOperator::new(h, &params.scaled_bottom(), params.mu)?;
    let min = op.min_depth();
    if !(min >= params.h0) {
        return Err(Error::domain("mass-operator inversion", min, params.h0));
    }
    op.invert(v, tol, max_iter)
}

/// `Q[h, beta](V)`.
pub fn apply_q(h: &SpectralField, beta: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    apply_q_bilinear(h, beta, v, v)
}

/// Symmetric bilinear form with `Q(V, V) = Q(V)`.
pub fn apply_q_bilinear(
    h: &SpectralField,
    beta: &SpectralField,
    v: &SpectralField,
    w: &SpectralField,
) -> Result<SpectralField> {
    let grid = h.grid();
    check_vector(v, grid)?;
    check_vector(w, grid)?;
    let bottom = Bottom::new(beta);
    let hp = h.component_physical(0);
    let mut asm = Assembly::new(grid.dimension(), hp.len());
    q_bilinear_into(&hp, &bottom, &Kinematics::new(v), &Kinematics::new(w), 1.0, &mut asm);
    Ok(asm.finish(grid))
}

/// `(ok, min h)` with `h = 1 + eps (zeta - b)` scanned on the grid.
pub fn depth_check(params: &PhysicalParams, u: &GnState) -> (bool, f64) {
    let min = params
        .depth(&u.zeta)
        .component_physical(0)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    (min >= params.h0, min)
}

fn admissible_mass(params: &PhysicalParams, u: &GnState, context: &str) -> Result<MassOperator> {
    let op = MassOperator::new(&params.depth(&u.zeta), &params.scaled_bottom(), params.mu)?;
    let min = op.min_depth();
    if !(min >= params.h0) {
        return Err(Error::domain(context, min, params.h0));
    }
    Ok(op)
}

/// Right-hand side of the momentum equation before the mass inversion, without
/// the singular pressure term: `h (V.grad) V + mu [ grad(h^3 D_V div V) / 3 + Q(V) ]`.
fn momentum_bracket(params: &PhysicalParams, op: &MassOperator, k: &Kinematics) -> Assembly {
    let n = op.h.len();
    let mut asm = Assembly::new(params.dimension(), n);
    let adv = advect(k, k);
    for (out, a) in asm.vector.iter_mut().zip(&adv) {
        for x in 0..n {
            out[x] += op.h[x] * a[x];
        }
    }
    let ds = dsym(k, k);
    for x in 0..n {
        asm.potential[x] += params.mu * op.h3[x] * ds[x] / 3.0;
    }
    q_bilinear_into(&op.h, &op.bottom, k, k, params.mu, &mut asm);
    asm
}

/// The nonlinear tendency `(F_1, F_2)` of the rescaled system
/// `d_tau u + L u / eps + F[u] = 0`.
///
/// The pressure correction `(T^{-1} h - 1) grad zeta / eps` is evaluated as
/// `-(mu / eps) T^{-1} T[h, eps b] grad zeta`, which stays well conditioned for small `eps`.
pub fn nonlinear_f(params: &PhysicalParams, u: &GnState) -> Result<GnState> {
    let op = admissible_mass(params, u, "nonlinear term")?;
    let grid = params.grid();
    let k = Kinematics::new(&u.v);
    let mut rhs = momentum_bracket(params, &op, &k).finish(grid);
    if params.mu != 0.0 {
        rhs.axpy(-params.mu / params.eps, &op.dispersion(&u.zeta.gradient())?);
    }
    let (f1, _) = op.invert(&rhs, params.cg.tol, params.cg.max_iter)?;
    Ok(GnState {
        v: f1,
        zeta: surface_flux(params, u, &k).divergence(),
    })
}

/// `P((zeta - b) V)`.
fn surface_flux(params: &PhysicalParams, u: &GnState, k: &Kinematics) -> SpectralField {
    let zb = (&u.zeta - &params.bathymetry).component_physical(0);
    project_scaled(params.grid(), &zb, &k.v)
}

/// Both assemblies of `(T^{-1} h - 1) grad zeta / eps`: the cancellation-free
/// form used by [`nonlinear_f`] and the literal difference.
pub fn pressure_correction(params: &PhysicalParams, u: &GnState) -> Result<(SpectralField, SpectralField)> {
    let op = admissible_mass(params, u, "pressure correction")?;
    let (tol, it) = (params.cg.tol, params.cg.max_iter);
    let gz = u.zeta.gradient();
    let (stable, _) = op.invert(&op.dispersion(&gz)?.scaled(-params.mu / params.eps), tol, it)?;
    let hz = project_scaled(params.grid(), &op.h, &gz.to_physical());
    let (lit, _) = op.invert(&hz, tol, it)?;
    let direct = (&lit - &gz).scaled(1.0 / params.eps);
    Ok((stable, direct))
}

/// The terms of the original momentum equation other than the mass term:
/// `h grad zeta + eps h (V.grad) V + mu eps [ grad(h^3 D_V div V) / 3 + Q(V) ]`.
///
/// On any state, `eps (h + mu T)(F_1 + grad zeta / eps)` equals this quantity.
pub fn momentum_terms(params: &PhysicalParams, u: &GnState) -> Result<SpectralField> {
    let op = admissible_mass(params, u, "momentum terms")?;
    let grid = params.grid();
    let k = Kinematics::new(&u.v);
    let mut out = momentum_bracket(params, &op, &k).finish(grid).scaled(params.eps);
    out += &project_scaled(grid, &op.h, &u.zeta.gradient().to_physical());
    Ok(out)
}

/// `div(h V)` for the mass equation of the original system.
pub fn mass_flux_divergence(params: &PhysicalParams, u: &GnState) -> SpectralField {
    let h = params.depth(&u.zeta).component_physical(0);
    project_scaled(params.grid(), &h, &u.v.to_physical()).divergence()
}

/// `|V|_s + sqrt(mu) |div V|_s + |zeta|_s`.
pub fn x_norm(params: &PhysicalParams, u: &GnState, s: f64) -> f64 {
    u.v.sobolev_norm(s) + params.mu.sqrt() * u.v.divergence().sobolev_norm(s) + u.zeta.sobolev_norm(s)
}

/// [`x_norm`] on a stacked `(V, zeta)` field.
pub fn x_norm_stacked(mu: f64, u: &SpectralField, s: f64) -> f64 {
    let d = u.grid().dimension();
    let parts: Vec<SpectralField> = (0..d).map(|c| u.component(c)).collect();
    let refs: Vec<&SpectralField> = parts.iter().collect();
    let v = SpectralField::stack(&refs);
    v.sobolev_norm(s) + mu.sqrt() * v.divergence().sobolev_norm(s) + u.component(d).sobolev_norm(s)
}
