//! Rank, singular values and Hermitian splitting.

use super::eig::hermitian_eigen;
use super::{cx, hermitian_deviation, max_abs, zeros, CMat};
use crate::error::{Error, Result};
use crate::tol;

/// Largest singular value (`0.0` for empty matrices).
pub fn sigma_max(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

/// Number of singular values above `τ_rank · σ_max · max(rows, cols)`.
pub fn rank_svd(m: &CMat) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    let cut = tol::RANK * top * m.nrows().max(m.ncols()) as f64;
    sv.iter().filter(|&&s| s > cut).count()
}

/// Orthonormal basis of the column space (left singular vectors above the
/// rank cutoff).
pub fn range_basis(m: &CMat) -> CMat {
    let r = rank_svd(m);
    if r == 0 {
        return zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    CMat::from_fn(m.nrows(), r, |i, j| u[(i, order[j])])
}

/// Split of a Hermitian matrix into positive and negative semidefinite parts.
#[derive(Debug, Clone)]
pub struct PsdSplit {
    /// Positive part, `Σ_{λ>0} λ v v†`.
    pub positive: CMat,
    /// Negated negative part, `Σ_{λ<0} (-λ) v v†`.
    pub negative: CMat,
    /// `positive = positive_factor · positive_factor†` with one column per
    /// significant positive eigenvalue.
    pub positive_factor: CMat,
    pub negative_factor: CMat,
}

impl PsdSplit {
    pub fn columns(&self) -> (usize, usize) {
        (self.positive_factor.ncols(), self.negative_factor.ncols())
    }
}

/// `M = P - N` with `P, N ⪰ 0` from the eigendecomposition of `M`.
/// Eigenvalues below `τ_rank · max|λ|` count as zero.
pub fn psd_split(m: &CMat) -> Result<PsdSplit> {
    if !m.is_square() {
        return Err(Error::dim("psd_split needs a square matrix"));
    }
    if hermitian_deviation(m) > tol::STRUCTURE * (1.0 + max_abs(m)) {
        return Err(Error::Domain(format!(
            "psd_split input is not Hermitian (deviation {:.3e})",
            hermitian_deviation(m)
        )));
    }
    let n = m.nrows();
    let (vals, vecs) = hermitian_eigen(m);
    let top = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let cut = tol::RANK * top;
    let pos: Vec<usize> = (0..n).filter(|&i| vals[i] > cut).collect();
    let neg: Vec<usize> = (0..n).filter(|&i| vals[i] < -cut).collect();
    let factor = |idx: &[usize], sign: f64| {
        CMat::from_fn(n, idx.len(), |r, c| vecs[(r, idx[c])] * cx((sign * vals[idx[c]]).sqrt(), 0.0))
    };
    let positive_factor = factor(&pos, 1.0);
    let negative_factor = factor(&neg, -1.0);
    Ok(PsdSplit {
        positive: &positive_factor * positive_factor.adjoint(),
        negative: &negative_factor * negative_factor.adjoint(),
        positive_factor,
        negative_factor,
    })
}

/// Principal square root of a Hermitian positive semidefinite matrix;
/// small negative eigenvalues (round-off) are clamped to zero.
pub fn hermitian_sqrt(m: &CMat) -> Result<CMat> {
    let (vals, vecs) = hermitian_eigen(m);
    let top = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if vals.iter().any(|&v| v < -1e-9 * top.max(1.0)) {
        return Err(Error::Domain("square root of an indefinite matrix".into()));
    }
    let n = m.nrows();
    let d = CMat::from_fn(n, n, |i, j| if i == j { cx(vals[i].max(0.0).sqrt(), 0.0) } else { cx(0.0, 0.0) });
    Ok(&vecs * d * vecs.adjoint())
}
