//! Doubled-up matrices Δ(A1, A2) = [[A1, A2], [conj(A2), conj(A1)]] and the
//! signature matrix J = diag(I, -I).

use super::{zeros, CMat, Cx};
use crate::error::{Error, Result};

/// Result of a structure test: pass/fail plus the largest deviation seen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureReport {
    pub doubled: bool,
    pub deviation: f64,
}

/// A matrix known to carry the doubled-up block form.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledMatrix {
    half_rows: usize,
    half_cols: usize,
    body: CMat,
}

pub fn delta_build(a1: &CMat, a2: &CMat) -> Result<DoubledMatrix> {
    DoubledMatrix::from_blocks(a1, a2)
}

/// Tests `max |A - Δ(A11, A12)| <= tol`, with A11, A12 the top blocks of `a`.
pub fn is_doubled(a: &CMat, tol: f64) -> Result<StructureReport> {
    let (r, c) = a.shape();
    if r % 2 != 0 || c % 2 != 0 {
        return Err(Error::dim(format!("doubled-up test needs even dimensions, got {r}x{c}")));
    }
    let (hr, hc) = (r / 2, c / 2);
    let mut dev: f64 = 0.0;
    for i in 0..hr {
        for j in 0..hc {
            dev = dev.max((a[(i + hr, j)] - a[(i, j + hc)].conj()).norm());
            dev = dev.max((a[(i + hr, j + hc)] - a[(i, j)].conj()).norm());
        }
    }
    Ok(StructureReport { doubled: dev <= tol, deviation: dev })
}

impl DoubledMatrix {
    pub fn from_blocks(a1: &CMat, a2: &CMat) -> Result<Self> {
        if a1.shape() != a2.shape() {
            return Err(Error::dim(format!("delta blocks differ in shape: {:?} vs {:?}", a1.shape(), a2.shape())));
        }
        let (hr, hc) = a1.shape();
        let mut body = zeros(2 * hr, 2 * hc);
        body.view_mut((0, 0), (hr, hc)).copy_from(a1);
        body.view_mut((0, hc), (hr, hc)).copy_from(a2);
        body.view_mut((hr, 0), (hr, hc)).copy_from(&a2.conjugate());
        body.view_mut((hr, hc), (hr, hc)).copy_from(&a1.conjugate());
        Ok(Self { half_rows: hr, half_cols: hc, body })
    }

    /// Accepts `m` if it is doubled-up within `tol`; the stored body is
    /// re-projected onto the exact structure.
    pub fn from_matrix(m: &CMat, tol: f64) -> Result<Self> {
        let report = is_doubled(m, tol)?;
        if !report.doubled {
            return Err(Error::Domain(format!(
                "matrix is not doubled-up (deviation {:.3e} > {tol:.1e})",
                report.deviation
            )));
        }
        let (hr, hc) = (m.nrows() / 2, m.ncols() / 2);
        let a1 = m.view((0, 0), (hr, hc)).into_owned();
        let a2 = m.view((0, hc), (hr, hc)).into_owned();
        let lower_a2 = m.view((hr, 0), (hr, hc)).conjugate();
        let lower_a1 = m.view((hr, hc), (hr, hc)).conjugate();
        Self::from_blocks(&a1.zip_map(&lower_a1, midpoint), &a2.zip_map(&lower_a2, midpoint))
    }

    pub fn half_rows(&self) -> usize {
        self.half_rows
    }

    pub fn half_cols(&self) -> usize {
        self.half_cols
    }

    pub fn as_matrix(&self) -> &CMat {
        &self.body
    }

    pub fn into_matrix(self) -> CMat {
        self.body
    }

    pub fn blocks(&self) -> (CMat, CMat) {
        let (hr, hc) = (self.half_rows, self.half_cols);
        (self.body.view((0, 0), (hr, hc)).into_owned(), self.body.view((0, hc), (hr, hc)).into_owned())
    }

    pub fn mul(&self, rhs: &DoubledMatrix) -> Result<DoubledMatrix> {
        if self.half_cols != rhs.half_rows {
            return Err(Error::dim("doubled product: inner dimensions differ"));
        }
        Ok(DoubledMatrix { half_rows: self.half_rows, half_cols: rhs.half_cols, body: &self.body * &rhs.body })
    }
}

/// J = diag(I_n, -I_n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureJ {
    pub half_dim: usize,
}

impl SignatureJ {
    pub fn new(half_dim: usize) -> Self {
        Self { half_dim }
    }

    pub fn matrix(&self) -> CMat {
        let n = self.half_dim;
        CMat::from_fn(2 * n, 2 * n, |i, j| {
            if i != j {
                super::cx(0.0, 0.0)
            } else if i < n {
                super::cx(1.0, 0.0)
            } else {
                super::cx(-1.0, 0.0)
            }
        })
    }

    /// `J · m` (row sign flip of the lower half).
    pub fn left(&self, m: &CMat) -> CMat {
        let mut out = m.clone();
        for i in self.half_dim..2 * self.half_dim {
            out.row_mut(i).neg_mut();
        }
        out
    }

    /// `m · J` (column sign flip of the right half).
    pub fn right(&self, m: &CMat) -> CMat {
        let mut out = m.clone();
        for j in self.half_dim..2 * self.half_dim {
            out.column_mut(j).neg_mut();
        }
        out
    }
}

/// Σ = [[0, I], [I, 0]], the swap that relates a doubled matrix to its
/// conjugate: `Σ conj(A) Σ = A` for doubled-up A.
pub fn swap_matrix(half_dim: usize) -> CMat {
    let n = half_dim;
    CMat::from_fn(2 * n, 2 * n, |i, j| {
        if (i < n && j == i + n) || (i >= n && j + n == i) {
            super::cx(1.0, 0.0)
        } else {
            super::cx(0.0, 0.0)
        }
    })
}

/// Index permutation taking block-paired order `(x1, x1#, x2, x2#, ...)` to
/// canonical doubled-up order `(x1, x2, ..., x1#, x2#, ...)`. Entry `k` of
/// the result is the source index of canonical position `k`.
pub fn canonical_order(half_dims: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(half_dims.len());
    let mut at = 0;
    for &d in half_dims {
        offsets.push(at);
        at += 2 * d;
    }
    let mut out = Vec::with_capacity(at);
    for (k, &d) in half_dims.iter().enumerate() {
        out.extend(offsets[k]..offsets[k] + d);
    }
    for (k, &d) in half_dims.iter().enumerate() {
        out.extend(offsets[k] + d..offsets[k] + 2 * d);
    }
    out
}

/// Max entrywise distance from doubled-up form (infinite for odd shapes).
pub fn deviation_from_doubled(m: &CMat) -> f64 {
    is_doubled(m, f64::INFINITY).map(|r| r.deviation).unwrap_or(f64::INFINITY)
}

/// Average of two entries that keeps `a` bit-for-bit when they agree, so
/// exactly doubled input is never rounded (or overflowed near `f64::MAX`).
fn midpoint(a: Cx, b: Cx) -> Cx {
    let mid = |x: f64, y: f64| if x == y { x } else { 0.5 * x + 0.5 * y };
    Cx::new(mid(a.re, b.re), mid(a.im, b.im))
}
