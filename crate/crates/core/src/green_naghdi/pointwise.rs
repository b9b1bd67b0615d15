//! Grid-point kinematics: every nonlinear product is formed on the physical
//! grid from spectrally differentiated factors, and projected once when the
//! result returns to coefficient space.

use std::sync::Arc;

use crate::banach_scale::{Grid, SpectralField};

pub(crate) type Scalar = Vec<f64>;
pub(crate) type Vector = Vec<Vec<f64>>;

/// A vector field with its first derivatives and the gradient of its divergence.
#[derive(Debug, Clone)]
pub(crate) struct Kinematics {
    pub v: Vector,
    /// `grad[i][j] = d_j v_i`
    pub grad: Vec<Vector>,
    pub div: Scalar,
    pub grad_div: Vector,
}

impl Kinematics {
    pub fn new(v: &SpectralField) -> Self {
        let d = v.grid().dimension();
        let phys = v.to_physical();
        let per_axis: Vec<Vector> = (0..d).map(|j| v.derivative(j).to_physical()).collect();
        let grad = (0..d).map(|i| (0..d).map(|j| per_axis[j][i].clone()).collect()).collect();
        let div_f = v.divergence();
        let grad_div = div_f.gradient().to_physical();
        Kinematics {
            v: phys,
            grad,
            div: div_f.component_physical(0),
            grad_div,
        }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }
}

/// First and second derivatives of a (scaled) bottom profile.
#[derive(Debug, Clone)]
pub(crate) struct Bottom {
    pub grad: Vector,
    /// `hess[i][j] = d_i d_j beta`
    pub hess: Vec<Vector>,
    pub flat: bool,
}

impl Bottom {
    pub fn new(beta: &SpectralField) -> Self {
        let d = beta.grid().dimension();
        let g = beta.gradient();
        let hess = (0..d).map(|i| g.component(i).gradient().to_physical()).collect();
        let flat = beta.coeffs().iter().enumerate().all(|(idx, c)| idx == 0 || c.norm() == 0.0);
        Bottom {
            grad: g.to_physical(),
            hess,
            flat,
        }
    }
}

pub(crate) fn zeros(n: usize) -> Scalar {
    vec![0.0; n]
}

pub(crate) fn zeros_vec(d: usize, n: usize) -> Vector {
    vec![vec![0.0; n]; d]
}

pub(crate) fn dot(a: &Vector, b: &Vector) -> Scalar {
    let mut out = zeros(a[0].len());
    for (ac, bc) in a.iter().zip(b) {
        for ((o, x), y) in out.iter_mut().zip(ac).zip(bc) {
            *o += x * y;
        }
    }
    out
}

/// `(a . grad) b` for vector fields.
pub(crate) fn advect(a: &Kinematics, b: &Kinematics) -> Vector {
    let d = a.dim();
    let n = a.v[0].len();
    let mut out = zeros_vec(d, n);
    for i in 0..d {
        for j in 0..d {
            for x in 0..n {
                out[i][x] += a.v[j][x] * b.grad[i][j][x];
            }
        }
    }
    out
}

/// `(a . grad) f` for a scalar `f` given through its gradient.
pub(crate) fn advect_scalar(a: &Vector, grad_f: &Vector) -> Scalar {
    dot(a, grad_f)
}

/// Symmetric part of `D_a div b = -(a . grad) div b + div a div b`.
pub(crate) fn dsym(a: &Kinematics, b: &Kinematics) -> Scalar {
    let ab = advect_scalar(&a.v, &b.grad_div);
    let ba = advect_scalar(&b.v, &a.grad_div);
    (0..ab.len())
        .map(|x| 0.5 * (-ab[x] - ba[x]) + a.div[x] * b.div[x])
        .collect()
}

/// Symmetric part of `(a . grad)(b . grad) beta`.
pub(crate) fn second_directional(a: &Kinematics, b: &Kinematics, bottom: &Bottom) -> Scalar {
    let d = a.dim();
    let n = a.v[0].len();
    let mut out = zeros(n);
    if bottom.flat {
        return out;
    }
    for i in 0..d {
        for j in 0..d {
            for x in 0..n {
                let first = 0.5 * (a.v[i][x] * b.grad[j][i][x] + b.v[i][x] * a.grad[j][i][x]) * bottom.grad[j][x];
                let pair = 0.5 * (a.v[i][x] * b.v[j][x] + b.v[i][x] * a.v[j][x]);
                out[x] += first + pair * bottom.hess[i][j][x];
            }
        }
    }
    out
}

/// Coefficient-space assembly of `grad P(potential) + P(vector)`.
pub(crate) struct Assembly {
    pub potential: Scalar,
    pub vector: Vector,
}

impl Assembly {
    pub fn new(d: usize, n: usize) -> Self {
        Assembly {
            potential: zeros(n),
            vector: zeros_vec(d, n),
        }
    }

    pub fn finish(self, grid: &Arc<Grid>) -> SpectralField {
        let pot = SpectralField::scalar(grid, self.potential);
        let mut out = pot.gradient();
        out += &SpectralField::from_physical_dealiased(grid, &self.vector);
        out
    }
}

/// `P(a b)` for a scalar grid function and a vector grid function.
pub(crate) fn project_scaled(grid: &Arc<Grid>, a: &Scalar, v: &Vector) -> SpectralField {
    let data: Vector = v.iter().map(|c| c.iter().zip(a).map(|(x, y)| x * y).collect()).collect();
    SpectralField::from_physical_dealiased(grid, &data)
}
