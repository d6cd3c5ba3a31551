//! Linear quantum stochastic systems.
//!
//! General systems act on the doubled-up vector `(a, a#)` and carry
//! doubled-up (F, G, H, K); annihilation-operator systems act on `a` alone.
//! Both are built from a commutation matrix Θ, a Hamiltonian matrix M and a
//! coupling matrix N:
//!
//! - general: `F = -iΘM - ½ΘN†JN`, `G = -ΘN†J`, `H = N`, `K = I`
//! - annihilation: `F = Θ(-iM - ½N†N)`, `G = -ΘN†`, `H = N`, `K = I`
//!
//! Physical realizability (PR) asks the converse: does some admissible Θ
//! satisfy `FΘ + ΘF† + GJG† = 0`, `G = -ΘH†J`, `K = I` (J = I in the
//! annihilation case, where Θ must also be positive definite)?

mod check;
pub(crate) mod random;

pub use check::{
    check_pr_annihilation, check_pr_annihilation_with, check_pr_general, check_pr_general_with, eig_sum_condition,
    extract_params, verify_certificate, PrFailure, PrResiduals, PrVerdict,
};
pub use random::{random_pr_system, GenOptions, GeneratedSystem};

use crate::dmat::eig::inertia;
use crate::dmat::{cx, eye, hermitian_deviation, is_doubled, max_abs, symmetrize, CMat, DoubledMatrix, SignatureJ};
use crate::error::{Error, Result};
use crate::tol;
use crate::xfer::StateSpaceTF;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    General,
    Annihilation,
}

impl SystemKind {
    /// Matrix rows per mode / field: 2 for doubled-up systems, 1 otherwise.
    pub fn width(self) -> usize {
        match self {
            SystemKind::General => 2,
            SystemKind::Annihilation => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::General => "general",
            SystemKind::Annihilation => "annihilation",
        }
    }
}

/// Physical parameters (Θ, M, N) of a linear quantum system.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianCoupling {
    kind: SystemKind,
    theta: CMat,
    m: CMat,
    n_coupling: CMat,
}

impl HamiltonianCoupling {
    /// Validates and stores general-case parameters: Θ is 2n×2n Hermitian
    /// with inertia (n, n), M = Δ(M1, M2) Hermitian, N = Δ(N1, N2) 2m×2n.
    pub fn general(theta: CMat, m: CMat, n_coupling: CMat) -> Result<Self> {
        let dim = theta.nrows();
        if !theta.is_square() || !dim.is_multiple_of(2) || m.shape() != (dim, dim) || n_coupling.ncols() != dim {
            return Err(Error::dim(format!(
                "general parameters: Θ {:?}, M {:?}, N {:?}",
                theta.shape(),
                m.shape(),
                n_coupling.shape()
            )));
        }
        if !n_coupling.nrows().is_multiple_of(2) {
            return Err(Error::dim("coupling matrix needs an even row count"));
        }
        check_hermitian("Θ", &theta)?;
        check_hermitian("M", &m)?;
        for (name, mat) in [("M", &m), ("N", &n_coupling)] {
            let r = is_doubled(mat, tol::STRUCTURE * (1.0 + max_abs(mat)))?;
            if !r.doubled {
                return Err(Error::Domain(format!("{name} is not doubled-up (deviation {:.3e})", r.deviation)));
            }
        }
        let half = dim / 2;
        let (pos, neg, zero) = inertia(&theta, tol::RANK);
        if (pos, neg, zero) != (half, half, 0) {
            return Err(Error::Domain(format!(
                "Θ must have inertia ({half}, {half}, 0), found ({pos}, {neg}, {zero})"
            )));
        }
        Ok(Self { kind: SystemKind::General, theta: symmetrize(&theta), m: symmetrize(&m), n_coupling })
    }

    /// Validates and stores annihilation-case parameters: Θ n×n positive
    /// definite, M n×n Hermitian, N m×n.
    pub fn annihilation(theta: CMat, m: CMat, n_coupling: CMat) -> Result<Self> {
        let n = theta.nrows();
        if !theta.is_square() || m.shape() != (n, n) || n_coupling.ncols() != n {
            return Err(Error::dim(format!(
                "annihilation parameters: Θ {:?}, M {:?}, N {:?}",
                theta.shape(),
                m.shape(),
                n_coupling.shape()
            )));
        }
        check_hermitian("Θ", &theta)?;
        check_hermitian("M", &m)?;
        let (pos, _, _) = inertia(&theta, tol::RANK);
        if pos != n {
            return Err(Error::Domain("Θ is not positive definite".into()));
        }
        Ok(Self { kind: SystemKind::Annihilation, theta: symmetrize(&theta), m: symmetrize(&m), n_coupling })
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }
    pub fn theta(&self) -> &CMat {
        &self.theta
    }
    pub fn hamiltonian(&self) -> &CMat {
        &self.m
    }
    pub fn coupling(&self) -> &CMat {
        &self.n_coupling
    }
    pub fn modes(&self) -> usize {
        self.theta.nrows() / self.kind.width()
    }
    pub fn fields(&self) -> usize {
        self.n_coupling.nrows() / self.kind.width()
    }
}

fn check_hermitian(name: &str, m: &CMat) -> Result<()> {
    if hermitian_deviation(m) > tol::STRUCTURE * (1.0 + max_abs(m)) {
        return Err(Error::Domain(format!("{name} is not Hermitian (deviation {:.3e})", hermitian_deviation(m))));
    }
    Ok(())
}

/// Doubled-up QSDE system.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralQSys {
    pub n_modes: usize,
    pub m_fields: usize,
    pub f: DoubledMatrix,
    pub g: DoubledMatrix,
    pub h: DoubledMatrix,
    pub k: DoubledMatrix,
}

impl GeneralQSys {
    /// Checks shapes and doubled-up structure of raw matrices.
    pub fn from_matrices(f: CMat, g: CMat, h: CMat, k: CMat) -> Result<Self> {
        let dn = f.nrows();
        let dm = h.nrows();
        if !f.is_square()
            || !dn.is_multiple_of(2)
            || !dm.is_multiple_of(2)
            || g.shape() != (dn, dm)
            || h.shape() != (dm, dn)
            || k.shape() != (dm, dm)
        {
            return Err(Error::dim(format!(
                "general system shapes: F {:?}, G {:?}, H {:?}, K {:?}",
                f.shape(),
                g.shape(),
                h.shape(),
                k.shape()
            )));
        }
        let d = |m: &CMat| DoubledMatrix::from_matrix(m, tol::STRUCTURE * (1.0 + max_abs(m)));
        Ok(Self { n_modes: dn / 2, m_fields: dm / 2, f: d(&f)?, g: d(&g)?, h: d(&h)?, k: d(&k)? })
    }

    pub fn to_tf(&self) -> StateSpaceTF {
        StateSpaceTF::new(
            self.f.as_matrix().clone(),
            self.g.as_matrix().clone(),
            self.h.as_matrix().clone(),
            self.k.as_matrix().clone(),
        )
        .expect("general system shapes are consistent")
    }
}

/// Annihilation-operator QSDE system.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnihilationQSys {
    pub n_modes: usize,
    pub m_fields: usize,
    pub f: CMat,
    pub g: CMat,
    pub h: CMat,
    pub k: CMat,
}

impl AnnihilationQSys {
    pub fn new(f: CMat, g: CMat, h: CMat, k: CMat) -> Result<Self> {
        let n = f.nrows();
        let m = h.nrows();
        if !f.is_square() || g.shape() != (n, m) || h.shape() != (m, n) || k.shape() != (m, m) {
            return Err(Error::dim(format!(
                "annihilation system shapes: F {:?}, G {:?}, H {:?}, K {:?}",
                f.shape(),
                g.shape(),
                h.shape(),
                k.shape()
            )));
        }
        Ok(Self { n_modes: n, m_fields: m, f, g, h, k })
    }

    pub fn to_tf(&self) -> StateSpaceTF {
        StateSpaceTF::new(self.f.clone(), self.g.clone(), self.h.clone(), self.k.clone())
            .expect("annihilation system shapes are consistent")
    }
}

/// Either kind of system.
#[derive(Debug, Clone, PartialEq)]
pub enum QSys {
    General(GeneralQSys),
    Annihilation(AnnihilationQSys),
}

impl QSys {
    pub fn kind(&self) -> SystemKind {
        match self {
            QSys::General(_) => SystemKind::General,
            QSys::Annihilation(_) => SystemKind::Annihilation,
        }
    }

    /// `(F, G, H, K)` as plain matrices.
    pub fn matrices(&self) -> (&CMat, &CMat, &CMat, &CMat) {
        match self {
            QSys::General(s) => (s.f.as_matrix(), s.g.as_matrix(), s.h.as_matrix(), s.k.as_matrix()),
            QSys::Annihilation(s) => (&s.f, &s.g, &s.h, &s.k),
        }
    }

    pub fn to_tf(&self) -> StateSpaceTF {
        match self {
            QSys::General(s) => s.to_tf(),
            QSys::Annihilation(s) => s.to_tf(),
        }
    }

    pub fn check_pr(&self) -> PrVerdict {
        match self {
            QSys::General(s) => check_pr_general(s),
            QSys::Annihilation(s) => check_pr_annihilation(s),
        }
    }

    pub fn modes(&self) -> usize {
        match self {
            QSys::General(s) => s.n_modes,
            QSys::Annihilation(s) => s.n_modes,
        }
    }

    pub fn fields(&self) -> usize {
        match self {
            QSys::General(s) => s.m_fields,
            QSys::Annihilation(s) => s.m_fields,
        }
    }
}

/// `F = -iΘM - ½ΘN†JN`, `G = -ΘN†J`, `H = N`, `K = I`.
pub fn realize_general(p: &HamiltonianCoupling) -> Result<GeneralQSys> {
    if p.kind != SystemKind::General {
        return Err(Error::Domain("realize_general needs general-kind parameters".into()));
    }
    let j = SignatureJ::new(p.fields());
    let theta = &p.theta;
    let n = &p.n_coupling;
    let ntjn = n.adjoint() * j.left(n);
    let f = -(theta * &p.m) * cx(0.0, 1.0) - (theta * ntjn).scale(0.5);
    let g = -j.right(&(theta * n.adjoint()));
    let k = eye(n.nrows());
    GeneralQSys::from_matrices(f, g, n.clone(), k)
}

/// `F = Θ(-iM - ½N†N)`, `G = -ΘN†`, `H = N`, `K = I`.
pub fn realize_annihilation(p: &HamiltonianCoupling) -> Result<AnnihilationQSys> {
    if p.kind != SystemKind::Annihilation {
        return Err(Error::Domain("realize_annihilation needs annihilation-kind parameters".into()));
    }
    let theta = &p.theta;
    let n = &p.n_coupling;
    let inner = -(&p.m * cx(0.0, 1.0)) - (n.adjoint() * n).scale(0.5);
    let f = theta * inner;
    let g = -(theta * n.adjoint());
    AnnihilationQSys::new(f, g, n.clone(), eye(n.nrows()))
}

pub fn realize(p: &HamiltonianCoupling) -> Result<QSys> {
    match p.kind {
        SystemKind::General => realize_general(p).map(QSys::General),
        SystemKind::Annihilation => realize_annihilation(p).map(QSys::Annihilation),
    }
}
