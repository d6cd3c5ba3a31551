//! Completing plants and controllers with unused outputs so that the square
//! augmented system has identity feedthrough and is physically realizable.

use super::{join_columns, ControllerModel, PlantModel};
use crate::dmat::eig::inertia;
use crate::dmat::{eye, inverse, max_abs, permute, solve_lyapunov_hermitian, symmetrize, CMat, SignatureJ};
use crate::error::{Error, Result};
use crate::qsys::{eig_sum_condition, verify_certificate, AnnihilationQSys, GeneralQSys, PrVerdict, QSys, SystemKind};
use crate::tol::{self, Tolerances};

/// Result of augmenting a plant (inputs `[W; U]`, outputs `[Y; Ỹ]`) or a
/// controller (inputs `[W̃; Y]`, outputs `[U; Ũ]`).
#[derive(Debug, Clone)]
pub struct Augmentation {
    pub kind: SystemKind,
    /// Commutation matrix certifying the augmented system.
    pub theta: CMat,
    /// Rows of the unused outputs (paired doubled-up form for general).
    pub h_tilde: CMat,
    /// Feedthrough rows of the unused outputs, columns in canonical input
    /// order.
    pub k_tilde: CMat,
    /// Mismatch between the given output rows and the ones PR demands.
    pub residual: f64,
    /// The square augmented system in canonical order.
    pub system: QSys,
    pub verdict: PrVerdict,
}

/// Canonical indices of the first `known` halves of each output half, and
/// of the remaining ones.
fn row_split(kind: SystemKind, total: usize, known: usize) -> (Vec<usize>, Vec<usize>) {
    match kind {
        SystemKind::Annihilation => ((0..known).collect(), (known..total).collect()),
        SystemKind::General => {
            ((0..known).chain(total..total + known).collect(), (known..total).chain(total + known..2 * total).collect())
        }
    }
}

fn not_augmentable(residual: f64, detail: impl Into<String>) -> Error {
    Error::NotAugmentable { residual, detail: detail.into() }
}

#[allow(clippy::too_many_arguments)]
fn augment_core(
    kind: SystemKind,
    what: &str,
    f: &CMat,
    g_blocks: &[&CMat],
    h_known: &CMat,
    k_blocks: &[&CMat],
    total_half: usize,
    known_half: usize,
) -> Result<Augmentation> {
    let n = f.nrows();
    let w = kind.width();
    let g = join_columns(kind, n, g_blocks)?;
    let k_known = join_columns(kind, h_known.nrows(), k_blocks)?;
    let (known_idx, _) = row_split(kind, total_half, known_half);
    let all_cols: Vec<usize> = (0..w * total_half).collect();
    let ident = eye(w * total_half);
    let k_expected = permute(&ident, &known_idx, &all_cols);
    let feed = crate::dmat::max_diff(&k_known, &k_expected);
    if feed > tol::RESIDUAL {
        return Err(not_augmentable(
            feed,
            format!("{what} feedthrough does not extend to the identity (deviation {feed:.3e})"),
        ));
    }
    let j = SignatureJ::new(total_half);
    let gjg = match kind {
        SystemKind::General => j.right(&g) * g.adjoint(),
        SystemKind::Annihilation => &g * g.adjoint(),
    };
    let _ = k_known;
    let theta = if n == 0 {
        CMat::zeros(0, 0)
    } else {
        if !eig_sum_condition(f) {
            return Err(not_augmentable(
                f64::NAN,
                format!("{what} state matrix fails the eigenvalue-sum condition; certificate not unique"),
            ));
        }
        solve_lyapunov_hermitian(f, &symmetrize(&gjg))?
    };
    let (pos, neg, zero) = inertia(&theta, tol::RANK);
    let admissible = match kind {
        SystemKind::General => pos == n / 2 && neg == n / 2 && zero == 0,
        SystemKind::Annihilation => pos == n,
    };
    if !admissible {
        return Err(not_augmentable(
            f64::NAN,
            format!("{what} Lyapunov solution has inertia ({pos}, {neg}, {zero}); no admissible commutation matrix"),
        ));
    }
    assemble(kind, what, f, g, h_known, total_half, known_half, theta)
}

/// Builds the augmented system for a given admissible Θ:
/// `H_full = -J G† Θ⁻¹` and `K_full = I`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn assemble(
    kind: SystemKind,
    what: &str,
    f: &CMat,
    g: CMat,
    h_known: &CMat,
    total_half: usize,
    known_half: usize,
    theta: CMat,
) -> Result<Augmentation> {
    let n = f.nrows();
    let w = kind.width();
    let j = SignatureJ::new(total_half);
    let (known_idx, unknown_idx) = row_split(kind, total_half, known_half);
    let all_cols: Vec<usize> = (0..w * total_half).collect();
    let ident = eye(w * total_half);
    let theta_inv = inverse(&theta)?;
    let h_full = match kind {
        SystemKind::General => -(j.left(&g.adjoint()) * &theta_inv),
        SystemKind::Annihilation => -(g.adjoint() * &theta_inv),
    };
    let state_cols: Vec<usize> = (0..n).collect();
    let h_pr = permute(&h_full, &known_idx, &state_cols);
    let residual = crate::dmat::max_diff(&h_pr, h_known) / (1.0 + max_abs(h_known));
    if residual > tol::RESIDUAL {
        return Err(not_augmentable(
            residual,
            format!("{what} output rows differ from the rows physical realizability requires"),
        ));
    }
    let h_tilde = permute(&h_full, &unknown_idx, &state_cols);
    let k_tilde = permute(&ident, &unknown_idx, &all_cols);
    let system = match kind {
        SystemKind::General => QSys::General(GeneralQSys::from_matrices(f.clone(), g, h_full, ident)?),
        SystemKind::Annihilation => QSys::Annihilation(AnnihilationQSys::new(f.clone(), g, h_full, ident)?),
    };
    let verdict = verify_certificate(&system, &theta, &Tolerances::default());
    Ok(Augmentation { kind, theta, h_tilde, k_tilde, residual, system, verdict })
}

/// Finds Θ from `FΘ + ΘF† + G_a J G_a† = 0` with `G_a = [G_w, G_u]`, checks
/// that `H` and `K` are the rows physical realizability dictates for `Y`
/// and returns the unused-output rows `H̃`.
pub fn augment_plant(p: &PlantModel) -> Result<Augmentation> {
    let d = p.dims();
    if d.m_y != d.m_w {
        return Err(not_augmentable(
            f64::NAN,
            format!("plant has {} outputs but {} noise inputs; K cannot be the identity", d.m_y, d.m_w),
        ));
    }
    let zero_u = CMat::zeros(p.h.nrows(), p.g_u.ncols());
    augment_core(p.kind, "plant", &p.f, &[&p.g_w, &p.g_u], &p.h, &[&p.k, &zero_u], d.m_w + d.m_u, d.m_y)
}

/// Augments a controller; requires `K_cw = [I 0]`, `K_cy = 0` (the only
/// feedthrough compatible with identity scattering) and `m_w̃ ≥ m_u`.
pub fn augment_controller(c: &ControllerModel) -> Result<Augmentation> {
    let d = c.dims();
    if d.m_wt < d.m_u {
        return Err(Error::dim(format!(
            "controller has {} noise inputs but {} outputs; need at least as many noises as outputs",
            d.m_wt, d.m_u
        )));
    }
    augment_core(c.kind, "controller", &c.f_c, &[&c.g_cw, &c.g_cy], &c.h_c, &[&c.k_cw, &c.k_cy], d.m_wt + d.m_y, d.m_u)
}
