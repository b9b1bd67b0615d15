//! Serre / Green-Naghdi operators on the periodic grid.
//!
//! Conventions. The original system is written in time `t`; the rescaled system
//! uses `tau = eps t`:
//!
//! ```text
//! d_tau V + grad zeta / eps + F_1[u] = 0,   d_tau zeta + div V / eps + F_2[u] = 0,
//! F_1 = T^{-1} [ -(mu/eps) T[h, eps b] grad zeta + h (V.grad) V
//!                + mu ( grad(h^3 D_V div V) / 3 + Q[h, eps b](V) ) ],
//! F_2 = div((zeta - b) V),          h = 1 + eps (zeta - b),  T = h + mu T[h, eps b].
//! ```
//!
//! The linearized operators use
//!
//! ```text
//! a = eps h D_V div V + eps^2 (V.grad)^2 b - (eps grad b - h grad) . Y
//! b = eps (V.grad) V + Z + mu eps a grad b
//! N_1 V = h (Vbar.grad) V + h (V.grad) Vbar + (2 mu / 3) grad(h^3 Dsym(Vbar, V)) + 2 mu Q(Vbar, V)
//! ```
//!
//! with `Y = grad zeta + eps F_1`, `Z = -eps F_1` along the reference (or their
//! substitutes `-eps d_tau V` and `eps d_tau V + grad zeta`), which is what
//! differentiating the momentum equation gives for this scaling.
//!
//! All products are formed on the physical grid and projected onto the
//! dealiasing band before any outer derivative, which keeps the discrete mass
//! operator exactly symmetric and coercive under grid quadrature.

mod linearized;
mod operators;
mod params;
pub(crate) mod pointwise;

pub use linearized::{
    apply_n, build_linearized_coeffs, build_linearized_coeffs_conjugated, FrozenCoeffs, LinearizationMode, LinearizedCoeffs,
    ReferenceFrame,
};
pub use operators::{
    apply_big_t, apply_q, apply_q_bilinear, apply_t, depth_check, energy, invert_big_t, mass_flux_divergence,
    momentum_terms, nonlinear_f, pressure_correction, x_norm, x_norm_stacked, CgStats, MassOperator,
};
pub use params::{CgOptions, GnState, PhysicalParams};
