//! Adding quantum noise channels to a classically designed controller so
//! that it becomes physically realizable.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::augment::assemble;
use super::{join_columns, Augmentation, ControllerModel};
use crate::dmat::eig::{inertia, spectral_abscissa};
use crate::dmat::riccati::{care_hermitian_solutions, solve_care_hermitian};
use crate::dmat::{
    delta_build, eye, hcat, hermitian_deviation, inverse, is_doubled, max_abs, psd_split, sigma_max, swap_matrix,
    symmetrize, CMat, SignatureJ,
};
use crate::error::{Error, Result};
use crate::qsys::{random::gaussian, PrVerdict, SystemKind};
use crate::tol;
use crate::xfer::{hinf_norm, NormResult, StateSpaceTF};

/// Relative tolerance on the `‖H_c (sI - F_c)⁻¹‖∞ ≤ 1` admissibility test.
const ADMISSIBILITY_TOL: f64 = 1e-6;

/// A controller completed with noise inputs `W̃ = [W̃_a; W̃_b]`, where `W̃_a`
/// feeds through to `U` and `W̃_b` only drives the states.
#[derive(Debug, Clone)]
pub struct SynthResult {
    pub controller: ControllerModel,
    /// Commutation matrix certifying the completed controller.
    pub theta: CMat,
    /// Number of extra noise fields in `W̃_b` (halves for general systems).
    pub extra_noise: usize,
    /// `‖H_c (sI - F_c)⁻¹‖∞`, annihilation case only.
    pub admissibility: Option<NormResult>,
    /// True when Θ solves the noise-free Riccati equation, so that no
    /// `W̃_b` channels are needed.
    pub zero_noise_riccati: bool,
    pub augmentation: Augmentation,
    pub verdict: PrVerdict,
}

fn check_shapes(f_c: &CMat, g_cy: &CMat, h_c: &CMat) -> Result<usize> {
    let n = f_c.nrows();
    if n == 0 || !f_c.is_square() || g_cy.nrows() != n || h_c.ncols() != n {
        return Err(Error::dim(format!(
            "synthesis needs square nonempty F_c with matching G_cy / H_c (F_c {:?}, G_cy {:?}, H_c {:?})",
            f_c.shape(),
            g_cy.shape(),
            h_c.shape()
        )));
    }
    Ok(n)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    kind: SystemKind,
    f_c: &CMat,
    g_cw: CMat,
    g_cy: &CMat,
    h_c: &CMat,
    k_cw: CMat,
    theta: CMat,
    extra_noise: usize,
    admissibility: Option<NormResult>,
    zero_noise_riccati: bool,
) -> Result<SynthResult> {
    let k_cy = CMat::zeros(h_c.nrows(), g_cy.ncols());
    let controller = ControllerModel::new(kind, f_c.clone(), g_cw, g_cy.clone(), h_c.clone(), k_cw, k_cy)?;
    let d = controller.dims();
    let g = join_columns(kind, f_c.nrows(), &[&controller.g_cw, &controller.g_cy])?;
    let augmentation = assemble(kind, "controller", f_c, g, h_c, d.m_wt + d.m_y, d.m_u, theta.clone())?;
    let verdict = augmentation.verdict.clone();
    Ok(SynthResult { controller, theta, extra_noise, admissibility, zero_noise_riccati, augmentation, verdict })
}

/// Completes an annihilation-operator controller `(F_c, G_cy, H_c)`.
///
/// Requires `F_c` Hurwitz and `‖H_c (sI - F_c)⁻¹‖∞ ≤ 1`. A positive
/// definite solution of `F_cΘ + ΘF_c† + ΘH_c†H_cΘ + G_cyG_cy† = 0` gives a
/// controller with no extra noise; otherwise the regularized Riccati
/// equation is solved and the remainder is absorbed by `G_cwb`.
pub fn synth_noise_annihilation(f_c: &CMat, g_cy: &CMat, h_c: &CMat) -> Result<SynthResult> {
    let n = check_shapes(f_c, g_cy, h_c)?;
    let abscissa = spectral_abscissa(f_c)?;
    if abscissa >= 0.0 {
        return Err(Error::NotRealizable(format!("F_c is not Hurwitz (spectral abscissa {abscissa:.3e})")));
    }
    let tf = StateSpaceTF::new(f_c.clone(), eye(n), h_c.clone(), CMat::zeros(h_c.nrows(), n))?;
    let norm = hinf_norm(&tf, 1e-10)?;
    if norm.value > 1.0 + ADMISSIBILITY_TOL {
        return Err(Error::NotRealizable(format!("H∞ admissibility failed: {:.6} > 1", norm.value)));
    }

    let r = h_c.adjoint() * h_c;
    let q = g_cy * g_cy.adjoint();
    let m_u = h_c.nrows();
    let k_cw_for = |extra: usize| hcat(m_u, &[&eye(m_u), &CMat::zeros(m_u, extra)]);

    let pd = |x: &CMat| inertia(x, tol::RANK).0 == n;
    let zero_noise = care_hermitian_solutions(f_c, &r, &q)?
        .into_iter()
        .find(|s| pd(&s.x) && s.residual <= tol::RESIDUAL * (1.0 + max_abs(&q) + sigma_max(f_c) * max_abs(&s.x)));
    if let Some(sol) = zero_noise {
        let theta = sol.x;
        let g_cw = -(&theta * h_c.adjoint());
        return finish(SystemKind::Annihilation, f_c, g_cw, g_cy, h_c, k_cw_for(0)?, theta, 0, Some(norm), true);
    }

    // Regularized form: with P = Θ⁻¹ the equation becomes
    // F_c†P + PF_c + P G_cy G_cy† P + H_c†H_c + εI = 0 and the leftover
    // εΘ² is supplied by the extra noise.
    let scale = 1.0 + sigma_max(h_c).powi(2);
    for eps in [1e-2, 1e-4, 1e-6] {
        let qe = &r + eye(n).scale(eps * scale);
        let Some(sol) = solve_care_hermitian(&f_c.adjoint(), &q, &qe)?.into_solution() else {
            continue;
        };
        if !pd(&sol.x) {
            continue;
        }
        let theta = symmetrize(&inverse(&sol.x)?);
        let lhs = f_c * &theta + &theta * f_c.adjoint() + &theta * &r * &theta + &q;
        let noise = symmetrize(&(-lhs));
        let split = psd_split(&noise)?;
        if max_abs(&split.negative) > tol::RESIDUAL * (1.0 + max_abs(&noise)) {
            continue;
        }
        let g_cwb = split.positive_factor;
        let extra = g_cwb.ncols();
        let g_cwa = -(&theta * h_c.adjoint());
        let g_cw = hcat(n, &[&g_cwa, &g_cwb])?;
        return finish(
            SystemKind::Annihilation,
            f_c,
            g_cw,
            g_cy,
            h_c,
            k_cw_for(extra)?,
            theta,
            extra,
            Some(norm),
            false,
        );
    }
    Err(Error::NotRealizable(
        "bounded real Riccati equation has no positive definite solution, even with added controller noise".into(),
    ))
}

/// `Σ conj(m)`: the lower half of a doubled-up column block from the upper.
fn sigma_conj(m: &CMat) -> CMat {
    swap_matrix(m.nrows() / 2) * m.map(|z| z.conj())
}

/// Completes a general controller (doubled-up `F_c`, `G_cy`, `H_c`) using the
/// commutation matrix `theta`, which must be Hermitian with inertia
/// `(n_c, n_c)` and satisfy `Σ conj(Θ) Σ = -Θ`.
pub fn synth_noise_general(f_c: &CMat, g_cy: &CMat, h_c: &CMat, theta: &CMat) -> Result<SynthResult> {
    let n2 = check_shapes(f_c, g_cy, h_c)?;
    for (name, m) in [("F_c", f_c), ("G_cy", g_cy), ("H_c", h_c)] {
        let rep = is_doubled(m, tol::STRUCTURE)?;
        if !rep.doubled {
            return Err(Error::Domain(format!("{name} is not in doubled-up form (deviation {:.3e})", rep.deviation)));
        }
    }
    if theta.shape() != f_c.shape() {
        return Err(Error::dim("Θ must have the shape of F_c"));
    }
    let nc = n2 / 2;
    let scale_t = 1.0 + max_abs(theta);
    if hermitian_deviation(theta) > tol::STRUCTURE * scale_t {
        return Err(Error::Domain("Θ is not Hermitian".into()));
    }
    let sw = swap_matrix(nc);
    let anti = max_abs(&(&sw * theta.map(|z| z.conj()) * &sw + theta));
    if anti > tol::STRUCTURE * scale_t {
        return Err(Error::Domain(format!("Θ does not satisfy Σ conj(Θ) Σ = -Θ (deviation {anti:.3e})")));
    }
    let (pos, neg, zero) = inertia(theta, tol::RANK);
    if pos != nc || neg != nc || zero != 0 {
        return Err(Error::Domain(format!("Θ has inertia ({pos}, {neg}, {zero}), expected ({nc}, {nc}, 0)")));
    }

    let m_u = h_c.nrows() / 2;
    let m_y = g_cy.ncols() / 2;
    let h1 = h_c.rows(0, m_u).into_owned();
    let h2 = h_c.rows(m_u, m_u).into_owned();
    let gy1 = g_cy.columns(0, m_y).into_owned();
    let gy2 = g_cy.columns(m_y, m_y).into_owned();
    let m = f_c * theta + theta * f_c.adjoint() - theta * (h2.adjoint() * &h2 - h1.adjoint() * &h1) * theta
        + &gy1 * gy1.adjoint()
        - &gy2 * gy2.adjoint();
    let m = symmetrize(&m);
    let m_scale = 1.0
        + 2.0 * sigma_max(f_c) * sigma_max(theta)
        + sigma_max(theta).powi(2) * sigma_max(h_c).powi(2)
        + sigma_max(g_cy).powi(2);
    let zero_noise = max_abs(&m) <= tol::RESIDUAL * m_scale;

    let g_cw2b = if zero_noise { CMat::zeros(n2, 0) } else { psd_split(&m)?.positive_factor };
    let g_cw1b = sigma_conj(&g_cw2b);
    let g_cw1a = -(theta * h1.adjoint());
    let g_cw1 = hcat(n2, &[&g_cw1a, &g_cw1b])?;
    let g_cw = hcat(n2, &[&g_cw1, &sigma_conj(&g_cw1)])?;
    let extra = g_cw2b.ncols();
    let k_half = hcat(m_u, &[&eye(m_u), &CMat::zeros(m_u, extra)])?;
    let k_cw = delta_build(&k_half, &CMat::zeros(m_u, m_u + extra))?.into_matrix();
    finish(SystemKind::General, f_c, g_cw, g_cy, h_c, k_cw, theta.clone(), extra, None, zero_noise)
}

/// [`synth_noise_general`] with a random admissible `Θ = T J T†`, where `T`
/// is a well-conditioned doubled-up matrix drawn from `seed`.
pub fn synth_noise_general_seeded(f_c: &CMat, g_cy: &CMat, h_c: &CMat, seed: u64) -> Result<SynthResult> {
    let nc = f_c.nrows() / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t1 = eye(nc) + gaussian(&mut rng, nc, nc).scale(0.5);
    let t2 = gaussian(&mut rng, nc, nc).scale(0.25);
    let t = delta_build(&t1, &t2)?.into_matrix();
    let theta = symmetrize(&(SignatureJ::new(nc).right(&t) * t.adjoint()));
    synth_noise_general(f_c, g_cy, h_c, &theta)
}
