//! Transfer functions `Γ(s) = C(sI - A)⁻¹B + D`: evaluation, minimality,
//! the (J,J)-unitary and lossless bounded real characterizations, and
//! H2 / H∞ norms.

mod grid;
mod lossless;
mod norms;

pub use grid::{frequency_grid, frequency_grid_seeded, GRID_SEED};
pub use lossless::{
    jj_unitary_check, jj_unitary_check_with, lossless_br_check, lossless_br_check_with, FrequencyVerdict, Prong,
    ProngStatus,
};
pub use norms::{h2_norm, hinf_norm, hinf_norm_with, NormMethod, NormResult};

use std::sync::OnceLock;

use crate::dmat::eig::eigenvalues;
use crate::dmat::factor::range_basis;
use crate::dmat::{eye, hcat, max_abs, rank_svd, vcat, CMat, Cx};
use crate::error::{Error, Result};
use crate::tol;

/// State-space realization `(A, B, C, D)`. Poles are computed lazily and
/// cached.
#[derive(Debug, Clone)]
pub struct StateSpaceTF {
    a: CMat,
    b: CMat,
    c: CMat,
    d: CMat,
    poles: OnceLock<Vec<Cx>>,
}

impl PartialEq for StateSpaceTF {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.c == other.c && self.d == other.d
    }
}

impl StateSpaceTF {
    pub fn new(a: CMat, b: CMat, c: CMat, d: CMat) -> Result<Self> {
        let s = a.nrows();
        if !a.is_square() || b.nrows() != s || c.ncols() != s || d.shape() != (c.nrows(), b.ncols()) {
            return Err(Error::dim(format!(
                "state-space shapes: A {:?}, B {:?}, C {:?}, D {:?}",
                a.shape(),
                b.shape(),
                c.shape(),
                d.shape()
            )));
        }
        Ok(Self { a, b, c, d, poles: OnceLock::new() })
    }

    /// Constant transfer function `Γ ≡ d`.
    pub fn static_gain(d: CMat) -> Self {
        let (p, m) = d.shape();
        Self::new(CMat::zeros(0, 0), CMat::zeros(0, m), CMat::zeros(p, 0), d).expect("static gain shapes")
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }
    pub fn b(&self) -> &CMat {
        &self.b
    }
    pub fn c(&self) -> &CMat {
        &self.c
    }
    pub fn d(&self) -> &CMat {
        &self.d
    }
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }
    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }
    pub fn output_dim(&self) -> usize {
        self.c.nrows()
    }

    /// Eigenvalues of A.
    pub fn poles(&self) -> &[Cx] {
        self.poles.get_or_init(|| eigenvalues(&self.a).unwrap_or_default())
    }

    pub fn is_hurwitz(&self) -> bool {
        self.poles().iter().all(|p| p.re < 0.0)
    }

    pub fn eval(&self, s: Cx) -> Result<CMat> {
        tf_eval(self, s)
    }

    pub fn into_parts(self) -> (CMat, CMat, CMat, CMat) {
        (self.a, self.b, self.c, self.d)
    }
}

/// `C(sI - A)⁻¹B + D`, refusing points within τ_sing of a pole.
pub fn tf_eval(g: &StateSpaceTF, s: Cx) -> Result<CMat> {
    let n = g.state_dim();
    if n == 0 {
        return Ok(g.d.clone());
    }
    let guard = tol::SINGULAR * max_abs(&g.a).max(1.0);
    if let Some(p) = g.poles().iter().find(|p| (*p - s).norm() <= guard) {
        return Err(Error::Singular { context: "transfer function evaluated at a pole".into(), pair: (s, *p) });
    }
    let m = eye(n) * s - &g.a;
    let x = m.lu().solve(&g.b).ok_or_else(|| Error::Singular { context: "resolvent".into(), pair: (s, s) })?;
    Ok(&g.c * x + &g.d)
}

/// `[B, AB, ..., A^{s-1}B]` with A scaled to unit size (rank-preserving).
fn krylov(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows();
    let scale = max_abs(a).max(1.0);
    let a = a / crate::dmat::cx(scale, 0.0);
    let mut blocks = Vec::with_capacity(n);
    let mut cur = b.clone();
    for _ in 0..n {
        blocks.push(cur.clone());
        cur = &a * cur;
    }
    let refs: Vec<&CMat> = blocks.iter().collect();
    hcat(n, &refs).expect("krylov blocks share row count")
}

pub fn controllability_rank(a: &CMat, b: &CMat) -> usize {
    if a.nrows() == 0 {
        return 0;
    }
    rank_svd(&krylov(a, b))
}

pub fn observability_rank(a: &CMat, c: &CMat) -> usize {
    if a.nrows() == 0 {
        return 0;
    }
    rank_svd(&krylov(&a.adjoint(), &c.adjoint()))
}

pub fn is_minimal(g: &StateSpaceTF) -> bool {
    let n = g.state_dim();
    controllability_rank(&g.a, &g.b) == n && observability_rank(&g.a, &g.c) == n
}

/// Exact Kalman reduction: restrict to the controllable subspace, then
/// quotient out the unobservable one. Both steps use orthonormal bases, so
/// the transfer function is unchanged.
pub fn minimal_realization(g: &StateSpaceTF) -> StateSpaceTF {
    if g.state_dim() == 0 || is_minimal(g) {
        return g.clone();
    }
    let uc = if controllability_rank(&g.a, &g.b) == 0 {
        CMat::zeros(g.state_dim(), 0)
    } else {
        range_basis(&krylov(&g.a, &g.b))
    };
    let a1 = uc.adjoint() * &g.a * &uc;
    let b1 = uc.adjoint() * &g.b;
    let c1 = &g.c * &uc;
    if a1.nrows() == 0 {
        return StateSpaceTF::static_gain(g.d.clone());
    }
    let vo = if observability_rank(&a1, &c1) == 0 {
        CMat::zeros(a1.nrows(), 0)
    } else {
        range_basis(&krylov(&a1.adjoint(), &c1.adjoint()))
    };
    let a2 = vo.adjoint() * &a1 * &vo;
    let b2 = vo.adjoint() * &b1;
    let c2 = &c1 * &vo;
    StateSpaceTF::new(a2, b2, c2, g.d.clone()).expect("reduced shapes are consistent")
}

/// Series connection `g2 ∘ g1` (output of g1 feeds g2).
pub fn series(g1: &StateSpaceTF, g2: &StateSpaceTF) -> Result<StateSpaceTF> {
    if g1.output_dim() != g2.input_dim() {
        return Err(Error::dim("series connection: dimension mismatch"));
    }
    let n1 = g1.state_dim();
    let n2 = g2.state_dim();
    let a = crate::dmat::block2(&g1.a, &CMat::zeros(n1, n2), &(&g2.b * &g1.c), &g2.a)?;
    let b = vcat(g1.input_dim(), &[&g1.b, &(&g2.b * &g1.d)])?;
    let c = hcat(g2.output_dim(), &[&(&g2.d * &g1.c), &g2.c])?;
    let d = &g2.d * &g1.d;
    StateSpaceTF::new(a, b, c, d)
}
