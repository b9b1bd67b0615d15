use num_complex::Complex64;

use crate::banach_scale::SpectralField;
use crate::green_naghdi::{GnState, PhysicalParams};

/// `U(t) u` for a stacked `(V, zeta)` field: the exact flow of `d_t u + L u / eps = 0`.
///
/// Per wavevector with `n = xi / |xi|`, `a = n . V_hat` and `w = |xi| t / eps`,
/// the system `a' = -i (|xi| / eps) zeta_hat`, `zeta_hat' = -i (|xi| / eps) a` gives
///
/// ```text
/// a(t)    =  cos(w) a0 - i sin(w) zeta0
/// zeta(t) = -i sin(w) a0 + cos(w) zeta0
/// ```
///
/// while the part of `V_hat` orthogonal to `n` is unchanged. Modes where the
/// differentiation symbol vanishes (the mean and Nyquist modes) are invariant.
pub fn evolution_u(eps: f64, t: f64, u: &SpectralField) -> SpectralField {
    let grid = u.grid();
    let d = grid.dimension();
    assert_eq!(u.components(), d + 1, "evolution acts on stacked (V, zeta) fields");
    if t == 0.0 {
        return u.clone();
    }
    let n = grid.n_points();
    let mut out = u.clone();
    let c = out.coeffs_mut();
    for idx in 0..n {
        let xi = grid.xi_diff(idx);
        let k2: f64 = xi[..d].iter().map(|x| x * x).sum();
        if k2 == 0.0 {
            continue;
        }
        let k = k2.sqrt();
        let (s, co) = (k * t / eps).sin_cos();
        let mut a0 = Complex64::new(0.0, 0.0);
        for ax in 0..d {
            a0 += c[ax * n + idx] * (xi[ax] / k);
        }
        let z0 = c[d * n + idx];
        let i = Complex64::new(0.0, 1.0);
        let a1 = a0 * co - i * s * z0;
        let z1 = -i * s * a0 + z0 * co;
        let da = a1 - a0;
        for ax in 0..d {
            c[ax * n + idx] += da * (xi[ax] / k);
        }
        c[d * n + idx] = z1;
    }
    out
}

/// [`evolution_u`] on a split state.
pub fn evolution_state(params: &PhysicalParams, t: f64, u: &GnState) -> GnState {
    GnState::from_field(&evolution_u(params.eps, t, &u.to_field())).expect("stacked state keeps its shape")
}

/// `L u / eps = (grad zeta, div V) / eps` for a stacked field.
pub fn singular_part(eps: f64, u: &SpectralField) -> SpectralField {
    let d = u.grid().dimension();
    let parts: Vec<SpectralField> = (0..d).map(|c| u.component(c)).collect();
    let refs: Vec<&SpectralField> = parts.iter().collect();
    let v = SpectralField::stack(&refs);
    let zeta = u.component(d);
    SpectralField::stack(&[&zeta.gradient(), &v.divergence()]).scaled(1.0 / eps)
}
