//! Complex Schur form, eigenvalues and Schur reordering.

use nalgebra::linalg::Schur;

use super::{cx, zeros, CMat, Cx};
use crate::error::{Error, Result};

const SCHUR_MAX_ITER: usize = 100_000;

/// Complex Schur decomposition `a = u t u†` with `t` upper triangular.
pub fn schur(a: &CMat) -> Result<(CMat, CMat)> {
    if !a.is_square() {
        return Err(Error::dim("schur of non-square matrix"));
    }
    if a.nrows() == 0 {
        return Ok((zeros(0, 0), zeros(0, 0)));
    }
    let s = Schur::try_new(a.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::NoConvergence("complex Schur iteration".into()))?;
    let (u, mut t) = s.unpack();
    for j in 0..t.ncols() {
        for i in j + 1..t.nrows() {
            t[(i, j)] = cx(0.0, 0.0);
        }
    }
    Ok((u, t))
}

pub fn eigenvalues(a: &CMat) -> Result<Vec<Cx>> {
    let (_, t) = schur(a)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Largest real part of the spectrum (`-inf` for an empty matrix).
pub fn spectral_abscissa(a: &CMat) -> Result<f64> {
    Ok(eigenvalues(a)?.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max))
}

/// True iff every eigenvalue has `|Re λ| > tol`.
pub fn no_imaginary_axis_eigs(a: &CMat, tol: f64) -> Result<bool> {
    Ok(eigenvalues(a)?.iter().all(|l| l.re.abs() > tol))
}

/// Swaps the adjacent diagonal entries `k` and `k+1` of the triangular
/// factor, updating `u` so that `u t u†` is unchanged.
fn swap_adjacent(u: &mut CMat, t: &mut CMat, k: usize) {
    let a = t[(k, k)];
    let b = t[(k, k + 1)];
    let c = t[(k + 1, k + 1)];
    let x1 = b;
    let x2 = c - a;
    let r = (x1.norm_sqr() + x2.norm_sqr()).sqrt();
    if r == 0.0 {
        return;
    }
    let (x1, x2) = (x1 / r, x2 / r);
    // Q = [[x1, -conj(x2)], [x2, conj(x1)]], first column is the eigenvector for c.
    let q11 = x1;
    let q12 = -x2.conj();
    let q21 = x2;
    let q22 = x1.conj();
    let n = t.nrows();
    for j in 0..n {
        let (tk, tk1) = (t[(k, j)], t[(k + 1, j)]);
        t[(k, j)] = q11.conj() * tk + q21.conj() * tk1;
        t[(k + 1, j)] = q12.conj() * tk + q22.conj() * tk1;
    }
    for i in 0..n {
        let (tk, tk1) = (t[(i, k)], t[(i, k + 1)]);
        t[(i, k)] = tk * q11 + tk1 * q21;
        t[(i, k + 1)] = tk * q12 + tk1 * q22;
    }
    for i in 0..u.nrows() {
        let (uk, uk1) = (u[(i, k)], u[(i, k + 1)]);
        u[(i, k)] = uk * q11 + uk1 * q21;
        u[(i, k + 1)] = uk * q12 + uk1 * q22;
    }
    t[(k + 1, k)] = cx(0.0, 0.0);
}

/// Reorders a Schur pair so that the diagonal entries flagged in `select`
/// (indexed by their current positions) come first, preserving relative
/// order. Returns the number of selected entries.
pub fn reorder_schur(u: &mut CMat, t: &mut CMat, select: &[bool]) -> usize {
    assert_eq!(select.len(), t.nrows());
    let mut flags = select.to_vec();
    let mut k = 0;
    for i in 0..flags.len() {
        if flags[i] {
            for j in (k..i).rev() {
                swap_adjacent(u, t, j);
                flags.swap(j, j + 1);
            }
            k += 1;
        }
    }
    k
}

/// Hermitian eigendecomposition, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let e = super::symmetrize(m).symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// (positive, negative, zero) eigenvalue counts of a Hermitian matrix, with
/// zero meaning `|λ| <= rel_tol · max|λ|`.
pub fn inertia(m: &CMat, rel_tol: f64) -> (usize, usize, usize) {
    let (vals, _) = hermitian_eigen(m);
    let top = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let cut = rel_tol * top.max(f64::MIN_POSITIVE);
    let pos = vals.iter().filter(|&&v| v > cut).count();
    let neg = vals.iter().filter(|&&v| v < -cut).count();
    (pos, neg, vals.len() - pos - neg)
}

#[cfg(test)]
mod tests {
    use super::super::{from_real, from_rows, max_diff};
    use super::*;

    #[test]
    fn imaginary_axis_examples() {
        assert!(no_imaginary_axis_eigs(&from_real(1, 1, &[-1.0]), 1e-12).unwrap());
        assert!(!no_imaginary_axis_eigs(&from_rows(1, 1, &[cx(0.0, 1.0)]), 1e-12).unwrap());
        assert!(!no_imaginary_axis_eigs(&from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]), 1e-12).unwrap());
    }

    #[test]
    fn reorder_moves_selected_eigenvalues_first() {
        let a = CMat::from_fn(5, 5, |i, j| cx(((i * 7 + j * 3) % 5) as f64 - 2.0, (i as f64 - j as f64) * 0.3));
        let (mut u, mut t) = schur(&a).unwrap();
        let eig: Vec<Cx> = (0..5).map(|i| t[(i, i)]).collect();
        let select: Vec<bool> = eig.iter().map(|l| l.re < 0.0).collect();
        let k = reorder_schur(&mut u, &mut t, &select);
        for i in 0..5 {
            assert_eq!(t[(i, i)].re < 0.0, i < k, "diag {i}: {}", t[(i, i)]);
        }
        assert!(max_diff(&(&u * &t * u.adjoint()), &a) < 1e-12);
        assert!(max_diff(&(u.adjoint() * &u), &CMat::identity(5, 5)) < 1e-13);
    }

    #[test]
    fn inertia_counts() {
        let m = from_real(3, 3, &[2.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(inertia(&m, 1e-10), (1, 1, 1));
    }
}
