//! Complex dense matrix algebra.
//!
//! Matrices are plain `nalgebra::DMatrix<Complex64>` values ([`CMat`]); the
//! doubled-up block structure Δ(A1, A2) and the signature matrix J get
//! dedicated types in [`doubled`]. Equation solvers live in [`sylvester`]
//! and [`riccati`], spectral helpers in [`eig`] and [`factor`].

pub mod doubled;
pub mod eig;
pub mod factor;
pub mod riccati;
pub mod sylvester;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use doubled::{canonical_order, delta_build, is_doubled, swap_matrix, DoubledMatrix, SignatureJ, StructureReport};
pub use eig::{eigenvalues, no_imaginary_axis_eigs, schur, spectral_abscissa};
pub use factor::{hermitian_sqrt, psd_split, rank_svd, sigma_max, PsdSplit};
pub use riccati::{solve_care_hermitian, CareOutcome, CareSelection, CareSolution};
pub use sylvester::{solve_lyapunov_hermitian, solve_sylvester};

pub type Cx = Complex64;
pub type CMat = DMatrix<Complex64>;

#[inline]
pub fn cx(re: f64, im: f64) -> Cx {
    Complex64::new(re, im)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Builds a matrix from row-major real entries.
pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> CMat {
    assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
    CMat::from_row_iterator(rows, cols, entries.iter().map(|&x| cx(x, 0.0)))
}

/// Builds a matrix from row-major complex entries.
pub fn from_rows(rows: usize, cols: usize, entries: &[Cx]) -> CMat {
    assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
    CMat::from_row_slice(rows, cols, entries)
}

/// Validates the finiteness invariant of a freshly constructed matrix.
pub fn checked(m: CMat) -> Result<CMat> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(m)
    } else {
        Err(Error::Domain("matrix has non-finite entries".into()))
    }
}

/// Largest entry modulus, `0.0` for empty matrices.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |a - b|` entrywise. Shapes must agree.
pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `max |A - A†|`.
pub fn hermitian_deviation(m: &CMat) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_diff(m, &m.adjoint())
}

/// `(A + A†) / 2`.
pub fn symmetrize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && hermitian_deviation(m) <= tol * (1.0 + max_abs(m))
}

/// Horizontal concatenation; all blocks need the same row count. `rows` is
/// used when the list is empty or every block is empty.
pub fn hcat(rows: usize, blocks: &[&CMat]) -> Result<CMat> {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        if b.nrows() != rows {
            return Err(Error::dim(format!("hcat: block has {} rows, expected {rows}", b.nrows())));
        }
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    Ok(out)
}

/// Vertical concatenation; all blocks need the same column count.
pub fn vcat(cols: usize, blocks: &[&CMat]) -> Result<CMat> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        if b.ncols() != cols {
            return Err(Error::dim(format!("vcat: block has {} cols, expected {cols}", b.ncols())));
        }
        out.view_mut((at, 0), (b.nrows(), cols)).copy_from(*b);
        at += b.nrows();
    }
    Ok(out)
}

/// `[[a, b], [c, d]]`.
pub fn block2(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> Result<CMat> {
    let top = hcat(a.nrows(), &[a, b])?;
    let bottom = hcat(c.nrows(), &[c, d])?;
    vcat(top.ncols(), &[&top, &bottom])
}

/// Block-diagonal matrix.
pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Inverse via LU, failing on exact singularity or a tiny pivot.
pub fn inverse(m: &CMat) -> Result<CMat> {
    if !m.is_square() {
        return Err(Error::dim("inverse of non-square matrix"));
    }
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    let scale = max_abs(m).max(f64::MIN_POSITIVE);
    let lu = m.clone().lu();
    let u = lu.u();
    let min_pivot = (0..u.nrows()).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    if min_pivot <= crate::tol::SINGULAR * scale * 1e-3 {
        return Err(Error::Singular { context: "matrix inverse".into(), pair: (cx(min_pivot, 0.0), cx(0.0, 0.0)) });
    }
    lu.try_inverse()
        .ok_or_else(|| Error::Singular { context: "matrix inverse".into(), pair: (cx(0.0, 0.0), cx(0.0, 0.0)) })
}

/// Solves `m x = rhs` via LU.
pub fn solve(m: &CMat, rhs: &CMat) -> Result<CMat> {
    if m.nrows() == 0 {
        return Ok(zeros(0, rhs.ncols()));
    }
    m.clone()
        .lu()
        .solve(rhs)
        .ok_or_else(|| Error::Singular { context: "linear solve".into(), pair: (cx(0.0, 0.0), cx(0.0, 0.0)) })
}

/// Permutes rows and columns: `out[i][j] = m[rows[i]][cols[j]]`.
pub fn permute(m: &CMat, rows: &[usize], cols: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub fn trace(m: &CMat) -> Cx {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}
