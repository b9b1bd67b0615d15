//! Discrete Sobolev scale on the periodic torus.
//!
//! Fields are stored as Fourier coefficients; the `H^s` norm is the multiplier
//! norm with weight `<xi>^s`, `<xi> = (1 + |xi|^2)^(1/2)`, scaled so that
//! `H^0` is the continuum L2 norm of the cell. Smoothing is a sharp cutoff at
//! `<xi> <= theta`, so both smoothing inequalities and the interpolation
//! inequality hold with constant one.

mod field;
mod grid;
pub mod io;
mod trajectory;

pub use field::{interpolate_bound_check, SpectralField};
pub use grid::{Grid, GridSpec};
pub use trajectory::{trajectory_norm, trajectory_norm_with, FdOrder, TrajectoryField, TrajectoryNorm};

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn grid_1d(n: usize, l: f64) -> std::sync::Arc<Grid> {
        Grid::new(GridSpec::one_d(n, l)).unwrap()
    }

    /// Direct grid quadrature of `sum_c |u_c|^2 * cell / n`.
    fn quadrature_l2(f: &SpectralField) -> f64 {
        let g = f.grid();
        let w = g.volume() / g.n_points() as f64;
        f.to_physical()
            .iter()
            .flat_map(|c| c.iter())
            .map(|x| x * x * w)
            .sum::<f64>()
            .sqrt()
    }

    /// `cos(2 pi k x / L)` with exactly two nonzero coefficients.
    fn single_mode(g: &std::sync::Arc<Grid>, k: usize) -> SpectralField {
        let n = g.n_points();
        let mut f = SpectralField::zeros(g, 1);
        f.coeffs_mut()[k].re = 0.5;
        f.coeffs_mut()[n - k].re = 0.5;
        f
    }

    #[test]
    fn grid_rejects_odd_or_small() {
        assert!(Grid::new(GridSpec::one_d(7, 1.0)).is_err());
        assert!(Grid::new(GridSpec::one_d(6, 1.0)).is_err());
        assert!(Grid::new(GridSpec::one_d(8, 0.0)).is_err());
        let mut s = GridSpec::one_d(8, 1.0);
        s.dealias_fraction = 1.5;
        assert!(Grid::new(s).is_err());
    }

    #[test]
    fn forward_inverse_roundtrip_2d() {
        let g = Grid::new(GridSpec::two_d([16, 8], [2.0 * PI, 3.0])).unwrap();
        let f = SpectralField::from_fn(&g, 2, |x, c| (x[0] + c as f64).sin() * (2.0 * PI * x[1] / 3.0).cos());
        let back = SpectralField::from_physical(&g, &f.to_physical());
        assert!(f.max_coeff_diff(&back) < 1e-14);
        assert!(f.hermitian_defect() < 1e-15);
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let g = grid_1d(16, 2.0 * PI);
        let f = SpectralField::zeros(&g, 1);
        for s in [-1.0, 0.0, 2.5] {
            assert_eq!(f.sobolev_norm(s), 0.0);
        }
    }

    #[test]
    fn single_mode_norm_ratio() {
        let g = grid_1d(32, 2.0 * PI);
        let f = single_mode(&g, 3);
        let bracket: f64 = (1.0 + 9.0f64).sqrt();
        let ratio = f.sobolev_norm(2.0) / f.sobolev_norm(0.0);
        assert!((ratio - bracket * bracket).abs() < 1e-12 * ratio);
        // cos(3x) on [0, 2 pi] has L2 norm sqrt(pi)
        assert!((f.sobolev_norm(0.0) - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn parseval_against_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [1, 2] {
            let g = if dim == 1 {
                grid_1d(64, 5.0)
            } else {
                Grid::new(GridSpec::two_d([16, 24], [3.0, 4.0])).unwrap()
            };
            let f = SpectralField::random_band_limited(&g, 2, 6, 1.0, 1.0, false, &mut rng);
            let q = quadrature_l2(&f);
            assert!((f.sobolev_norm(0.0) - q).abs() <= 1e-12 * q);
        }
    }

    #[test]
    fn invalid_field_detected() {
        let g = grid_1d(8, 1.0);
        let mut f = SpectralField::zeros(&g, 1);
        f.coeffs_mut()[1].re = f64::NAN;
        assert!(f.try_sobolev_norm(0.0).is_err());
    }

    #[test]
    fn smoothing_examples() {
        let g = grid_1d(64, 2.0 * PI);
        // period chosen so that the first mode has <xi> = 5
        let g5 = grid_1d(16, 2.0 * PI / 24f64.sqrt());
        let f = single_mode(&g5, 1);
        assert!((g5.bracket(1) - 5.0).abs() < 1e-12);
        assert_eq!(f.smooth(10.0).unwrap().max_coeff_diff(&f), 0.0);
        assert_eq!(f.smooth(4.0).unwrap().sobolev_norm(0.0), 0.0);
        assert!(f.smooth(0.5).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = SpectralField::random_band_limited(&g, 1, 20, 1.0, 0.5, false, &mut rng);
        let tail = &f - &f.smooth(8.0).unwrap();
        assert!(tail.sobolev_norm(1.0) <= 8f64.powi(-2) * f.sobolev_norm(3.0));
    }

    #[test]
    fn smoothing_projection_and_commutation_bit_exact() {
        let g = grid_1d(64, 7.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = SpectralField::random_band_limited(&g, 2, 20, 1.0, 0.0, false, &mut rng);
        let once = f.smooth(6.0).unwrap();
        let twice = once.smooth(6.0).unwrap();
        assert_eq!(once.coeffs(), twice.coeffs());
        let a = f.lambda(1.7).smooth(6.0).unwrap();
        let b = f.smooth(6.0).unwrap().lambda(1.7);
        assert_eq!(a.sobolev_norm(0.0).to_bits(), b.sobolev_norm(0.0).to_bits());
    }

    #[test]
    fn interpolation_examples() {
        let g = grid_1d(32, 2.0 * PI);
        let f = single_mode(&g, 4);
        let (lhs, rhs) = interpolate_bound_check(&f, 0.0, 2.0, 1.3).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * lhs);
        let (lhs, rhs) = interpolate_bound_check(&f, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(lhs, rhs);
        assert!(interpolate_bound_check(&f, 2.0, 1.0, 1.5).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = SpectralField::random_band_limited(&g, 1, 10, 1.0, 0.0, false, &mut rng);
        let (lhs, rhs) = interpolate_bound_check(&f, 0.0, 2.0, 1.0).unwrap();
        assert!(lhs <= rhs);
    }

    #[test]
    fn trajectory_norm_examples() {
        let g = grid_1d(32, 2.0 * PI);
        let f = single_mode(&g, 2);
        let u = TrajectoryField::constant(1.0, 10, &f);
        let es = trajectory_norm(&u, 1.0, TrajectoryNorm::Es, 2.0, 1.0).unwrap();
        assert!((es - f.sobolev_norm(1.0)).abs() < 1e-14);

        let z = TrajectoryField::constant(1.0, 4, &SpectralField::zeros(&g, 1));
        for mode in [TrajectoryNorm::XsT, TrajectoryNorm::Es, TrajectoryNorm::XsJ(2)] {
            assert_eq!(trajectory_norm(&z, 2.0, mode, 1.0, 0.5).unwrap(), 0.0);
        }
        assert!(trajectory_norm(&z, 2.0, TrajectoryNorm::XsJ(5), 1.0, 0.5).is_err());
    }

    #[test]
    fn trajectory_xs1_matches_closed_form() {
        // u(t) = g cos(t / eps): (eps d_t) u = -g sin(t / eps), sup |sin| = 1 on [0, 2 pi eps].
        let g = grid_1d(32, 2.0 * PI);
        let base = single_mode(&g, 3);
        let eps = 0.5;
        let horizon = 2.0 * PI * eps;
        let u = TrajectoryField::from_fn(horizon, 4000, |t| base.scaled((t / eps).cos())).unwrap();
        let (s, m) = (1.0, 1.0);
        let got = trajectory_norm(&u, s, TrajectoryNorm::XsJ(1), m, eps).unwrap();
        let want = base.sobolev_norm(s) + base.sobolev_norm(s - m);
        assert!((got - want).abs() < 1e-5 * want, "{got} vs {want}");
    }

    #[test]
    fn fourth_order_derivative_is_exact_on_quartics() {
        let g = grid_1d(8, 1.0);
        let base = single_mode(&g, 1);
        let u = TrajectoryField::from_fn(1.0, 9, |t| base.scaled(t.powi(4) - 2.0 * t)).unwrap();
        let du = u.time_derivative(FdOrder::Fourth);
        for (t, d) in u.times().iter().zip(du.snapshots()) {
            let want = base.scaled(4.0 * t.powi(3) - 2.0);
            assert!(d.max_coeff_diff(&want) < 1e-11);
        }
    }

    #[test]
    fn cubic_interpolation_exact_on_cubics() {
        let g = grid_1d(8, 1.0);
        let base = single_mode(&g, 1);
        let p = |t: f64| t * t * t - t + 0.5;
        let u = TrajectoryField::from_fn(2.0, 8, |t| base.scaled(p(t))).unwrap();
        for t in [0.01, 0.3, 1.13, 1.99] {
            assert!(u.interpolate(t).max_coeff_diff(&base.scaled(p(t))) < 1e-13);
        }
    }

    #[test]
    fn serialization_roundtrip() {
        let g = Grid::new(GridSpec::two_d([8, 10], [1.0, 2.0])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = SpectralField::random_band_limited(&g, 3, 3, 1.0, 0.0, false, &mut rng);
        for enc in [io::Encoding::Binary, io::Encoding::Csv] {
            let mut buf = Vec::new();
            io::write_field(&mut buf, &f, enc).unwrap();
            let back = io::read_field(&mut buf.as_slice()).unwrap();
            assert_eq!(back.coeffs(), f.coeffs());
        }
        let u = TrajectoryField::from_fn(1.0, 3, |t| f.scaled(1.0 + t)).unwrap();
        let mut buf = Vec::new();
        io::write_trajectory(&mut buf, &u, io::Encoding::Binary).unwrap();
        let back = io::read_trajectory(&mut buf.as_slice()).unwrap();
        assert_eq!(back.len(), 4);
        assert_eq!(back.last().coeffs(), u.last().coeffs());
    }
}
