use rayon::prelude::*;

use crate::banach_scale::{FdOrder, SpectralField, TrajectoryField};
use crate::error::{Error, Result};
use crate::green_naghdi::{nonlinear_f, GnState, PhysicalParams};
use crate::linear_ivp::{evolution_u, singular_part};

/// Residual of an approximate trajectory in the rescaled equations.
///
/// `momentum` is `R_1 = d_tau V + grad zeta / eps + F_1` and `mass` is
/// `r_2 = d_tau zeta + div V / eps + F_2`. In original time the momentum
/// residual is `eps (h + mu T) R_1` and the mass residual is `eps r_2`.
#[derive(Debug, Clone)]
pub struct ManufacturedResidual {
    pub momentum: TrajectoryField,
    pub mass: TrajectoryField,
    /// Stacked `U(-tau) (R_1, r_2)`: the forcing that makes `u_app` an exact solution.
    pub conjugated: TrajectoryField,
}

impl ManufacturedResidual {
    /// Stacked physical residual `(R_1, r_2)`.
    pub fn stacked(&self, eps: f64) -> TrajectoryField {
        self.conjugated.map_indexed(|_, t, s| evolution_u(eps, t, s))
    }
}

/// Apply the rescaled operator to `u_app` (stacked physical snapshots).
///
/// With `du_app` absent the time derivative is taken by fourth-order differences of
/// `U(-tau) u_app`, which removes the fast `|xi| / eps` oscillation before differencing.
pub fn manufactured_residual(
    params: &PhysicalParams,
    u_app: &TrajectoryField,
    du_app: Option<&TrajectoryField>,
) -> Result<ManufacturedResidual> {
    if u_app.len() < 4 {
        return Err(Error::Parameter(format!(
            "manufactured residual needs at least 4 snapshots, got {}",
            u_app.len()
        )));
    }
    let eps = params.eps;
    let d = params.dimension();
    let w = u_app.map_indexed(|_, t, s| evolution_u(eps, -t, s));
    let dw = match du_app {
        Some(du) => {
            u_app.check_aligned(du)?;
            du.map_indexed(|i, t, s| evolution_u(eps, -t, &(s + &singular_part(eps, u_app.snapshot(i)))))
        }
        None => w.time_derivative(FdOrder::Fourth),
    };
    let snaps: Vec<SpectralField> = (0..u_app.len())
        .into_par_iter()
        .map(|i| {
            let t = u_app.times()[i];
            let state = GnState::from_field(u_app.snapshot(i))?;
            let f = nonlinear_f(params, &state).map_err(|e| match e {
                Error::Domain { context, min_depth, h0 } => Error::Domain {
                    context: format!("{context} at t = {t}"),
                    min_depth,
                    h0,
                },
                other => other,
            })?;
            Ok(dw.snapshot(i) + &evolution_u(eps, -t, &f.to_field()))
        })
        .collect::<Result<_>>()?;
    let conjugated = u_app.with_snapshots(snaps)?;
    let physical = conjugated.map_indexed(|_, t, s| evolution_u(eps, t, s));
    let momentum = physical.map(|s| {
        let parts: Vec<SpectralField> = (0..d).map(|c| s.component(c)).collect();
        let refs: Vec<&SpectralField> = parts.iter().collect();
        SpectralField::stack(&refs)
    });
    let mass = physical.map(|s| s.component(d));
    Ok(ManufacturedResidual {
        momentum,
        mass,
        conjugated,
    })
}
