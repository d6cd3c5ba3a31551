//! Kalman filter for a linear system whose process and measurement noises
//! come from the same field channels.

use crate::dmat::eig::{eigenvalues, hermitian_eigen};
use crate::dmat::riccati::{care_residual, coefficient_scale};
use crate::dmat::{eye, hermitian_deviation, inverse, max_abs, rank_svd, solve_care_hermitian, symmetrize, vcat, CMat};
use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone)]
pub struct KalmanResult {
    /// Stabilizing error covariance.
    pub q: CMat,
    pub gain: CMat,
    /// Relative residual of the filter Riccati equation.
    pub riccati_residual: f64,
    /// Largest entry magnitude of the gain.
    pub gain_norm: f64,
}

/// PBH test: every eigenvalue of `f` with nonnegative real part must be
/// observable through `c`.
fn check_detectable(f: &CMat, c: &CMat) -> Result<()> {
    let n = f.nrows();
    let guard = tol::SINGULAR * (1.0 + max_abs(f));
    for lambda in eigenvalues(f)? {
        if lambda.re < -guard {
            continue;
        }
        let pencil = vcat(n, &[&(eye(n) * lambda - f), c])?;
        if rank_svd(&pencil) < n {
            return Err(Error::Design(format!(
                "(F_a, L H_a) is not detectable: mode {lambda:.6} is unobservable and not stable"
            )));
        }
    }
    Ok(())
}

/// Kalman filter for `dx = F_a x dt + G_a dw`, `dy = L (H_a x dt + dw)`
/// with unit-intensity `w`.
///
/// Solves `F_aQ + QF_a† + G_aG_a† - (G_a + QH_a†) S (G_a + QH_a†)† = 0`,
/// `S = L†(LL†)⁻¹L`, for the stabilizing `Q ⪰ 0` and returns the gain
/// `(G_a + QH_a†) L† (LL†)⁻¹`.
pub fn kalman_design(f_a: &CMat, g_a: &CMat, h_a: &CMat, l: &CMat) -> Result<KalmanResult> {
    let n = f_a.nrows();
    if !f_a.is_square()
        || g_a.nrows() != n
        || h_a.ncols() != n
        || g_a.ncols() != h_a.nrows()
        || l.ncols() != h_a.nrows()
    {
        return Err(Error::dim(format!(
            "Kalman design shapes: F_a {:?}, G_a {:?}, H_a {:?}, L {:?}",
            f_a.shape(),
            g_a.shape(),
            h_a.shape(),
            l.shape()
        )));
    }
    let llt_inv = inverse(&(l * l.adjoint())).map_err(|_| Error::Domain("L L† is singular".into()))?;
    let lh = l * h_a;
    check_detectable(f_a, &lh)?;

    let s = l.adjoint() * &llt_inv * l;
    let a = f_a - g_a * &s * h_a;
    let r = -(h_a.adjoint() * &s * h_a);
    let q = symmetrize(&(g_a * (eye(s.nrows()) - &s) * g_a.adjoint()));
    let r = symmetrize(&r);
    let sol = solve_care_hermitian(&a, &r, &q)?
        .into_solution()
        .ok_or_else(|| Error::Design("filter Riccati equation has no Hermitian solution".into()))?;
    let x = sol.x;
    let closed = &a + &x * &r;
    if eigenvalues(&closed)?.iter().any(|z| z.re >= 0.0) {
        return Err(Error::Design("filter Riccati equation has no stabilizing solution".into()));
    }
    let (vals, _) = hermitian_eigen(&x);
    let floor = -1e-9 * (1.0 + max_abs(&x));
    if vals.first().is_some_and(|&v| v < floor) {
        return Err(Error::Design(format!(
            "stabilizing error covariance is not positive semidefinite (min eigenvalue {:.3e})",
            vals[0]
        )));
    }
    debug_assert!(hermitian_deviation(&x) <= tol::STRUCTURE * (1.0 + max_abs(&x)));
    let gain = (g_a + &x * h_a.adjoint()) * l.adjoint() * &llt_inv;
    let scale = coefficient_scale(&a, &r, &q) * (1.0 + max_abs(&x)).powi(2);
    Ok(KalmanResult { riccati_residual: care_residual(&a, &r, &q, &x) / scale, gain_norm: max_abs(&gain), q: x, gain })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmat::from_real;

    #[test]
    fn two_port_cavity_has_zero_gain() {
        let k = kalman_design(
            &from_real(1, 1, &[-1.0]),
            &from_real(1, 2, &[-1.0, -1.0]),
            &from_real(2, 1, &[1.0, 1.0]),
            &from_real(1, 2, &[1.0, 0.0]),
        )
        .unwrap();
        assert!((k.q[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(k.gain_norm < 1e-12);
        assert!(k.riccati_residual < 1e-12);
    }

    #[test]
    fn classical_scalar_filter() {
        let k = kalman_design(
            &from_real(1, 1, &[-1.0]),
            &from_real(1, 2, &[1.0, 0.0]),
            &from_real(2, 1, &[0.0, 1.0]),
            &from_real(1, 2, &[0.0, 1.0]),
        )
        .unwrap();
        let expected = 2f64.sqrt() - 1.0;
        assert!((k.q[(0, 0)].re - expected).abs() < 1e-10);
        assert!((k.gain[(0, 0)].re - expected).abs() < 1e-10);
    }

    #[test]
    fn noiseless_state_has_zero_covariance() {
        let k = kalman_design(
            &from_real(1, 1, &[-1.0]),
            &from_real(1, 1, &[0.0]),
            &from_real(1, 1, &[1.0]),
            &from_real(1, 1, &[1.0]),
        )
        .unwrap();
        assert!(max_abs(&k.q) < 1e-12);
        assert!(k.gain_norm < 1e-12);
    }

    #[test]
    fn undetectable_unstable_mode_is_a_design_error() {
        let r = kalman_design(
            &from_real(1, 1, &[1.0]),
            &from_real(1, 1, &[1.0]),
            &from_real(1, 1, &[0.0]),
            &from_real(1, 1, &[1.0]),
        );
        assert!(matches!(r, Err(Error::Design(_))));
    }

    #[test]
    fn singular_selector_is_a_domain_error() {
        let r = kalman_design(
            &from_real(1, 1, &[-1.0]),
            &from_real(1, 1, &[1.0]),
            &from_real(1, 1, &[1.0]),
            &from_real(1, 1, &[0.0]),
        );
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
