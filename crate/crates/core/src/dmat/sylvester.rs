//! Sylvester `AX + XB + C = 0` and Hermitian Lyapunov `AX + XA† + Q = 0`
//! solvers by Schur triangularization and column back-substitution.

use super::eig::schur;
use super::{cx, hermitian_deviation, max_abs, symmetrize, zeros, CMat, Cx};
use crate::error::{Error, Result};
use crate::tol;

/// Solves `T Y + Y S = R` for upper-triangular `T`. `S` is upper triangular
/// when `s_lower` is false and lower triangular otherwise.
fn triangular_sylvester(t: &CMat, s: &CMat, r: &CMat, s_lower: bool, gap: f64) -> Result<CMat> {
    let p = t.nrows();
    let q = s.nrows();
    let mut y = zeros(p, q);
    let order: Vec<usize> = if s_lower { (0..q).rev().collect() } else { (0..q).collect() };
    for &j in &order {
        let mut rhs: Vec<Cx> = (0..p).map(|i| r[(i, j)]).collect();
        let solved: Box<dyn Iterator<Item = usize>> = if s_lower { Box::new(j + 1..q) } else { Box::new(0..j) };
        for k in solved {
            let skj = s[(k, j)];
            if skj != cx(0.0, 0.0) {
                for (i, v) in rhs.iter_mut().enumerate() {
                    *v -= y[(i, k)] * skj;
                }
            }
        }
        let sjj = s[(j, j)];
        for i in (0..p).rev() {
            let mut acc = rhs[i];
            for l in i + 1..p {
                acc -= t[(i, l)] * y[(l, j)];
            }
            let d = t[(i, i)] + sjj;
            if d.norm() <= gap {
                return Err(Error::Singular { context: "Sylvester operator".into(), pair: (t[(i, i)], sjj) });
            }
            y[(i, j)] = acc / d;
        }
    }
    Ok(y)
}

fn spectral_gap(a: &CMat, b: &CMat) -> f64 {
    tol::SINGULAR * 1f64.max(max_abs(a)).max(max_abs(b))
}

/// Solves `AX + XB + C = 0`.
///
/// Fails with [`Error::Singular`] carrying the offending eigenvalues
/// `(λ_i(A), λ_j(B))` when `λ_i(A) + λ_j(B)` is within the spectral-gap
/// guard of zero.
pub fn solve_sylvester(a: &CMat, b: &CMat, c: &CMat) -> Result<CMat> {
    let (p, q) = (a.nrows(), b.nrows());
    if !a.is_square() || !b.is_square() || c.shape() != (p, q) {
        return Err(Error::dim(format!("sylvester shapes: A {:?}, B {:?}, C {:?}", a.shape(), b.shape(), c.shape())));
    }
    if p == 0 || q == 0 {
        return Ok(zeros(p, q));
    }
    let (u, t) = schur(a)?;
    let (v, s) = schur(b)?;
    let r = -(u.adjoint() * c * &v);
    let y = triangular_sylvester(&t, &s, &r, false, spectral_gap(a, b))?;
    Ok(&u * y * v.adjoint())
}

/// Solves `AX + XA† + Q = 0` for Hermitian `Q`; the result is exactly
/// Hermitian (symmetrized before return).
pub fn solve_lyapunov_hermitian(a: &CMat, q: &CMat) -> Result<CMat> {
    let n = a.nrows();
    if !a.is_square() || q.shape() != (n, n) {
        return Err(Error::dim(format!("lyapunov shapes: A {:?}, Q {:?}", a.shape(), q.shape())));
    }
    if hermitian_deviation(q) > tol::STRUCTURE * (1.0 + max_abs(q)) {
        return Err(Error::Domain("Lyapunov right-hand side is not Hermitian".into()));
    }
    if n == 0 {
        return Ok(zeros(0, 0));
    }
    let (u, t) = schur(a)?;
    let r = -(u.adjoint() * q * &u);
    let s = t.adjoint();
    let y = triangular_sylvester(&t, &s, &r, true, spectral_gap(a, a))?;
    Ok(symmetrize(&(&u * y * u.adjoint())))
}

/// `max |AX + XA† + Q|`.
pub fn lyapunov_residual(a: &CMat, x: &CMat, q: &CMat) -> f64 {
    max_abs(&(a * x + x * a.adjoint() + q))
}
