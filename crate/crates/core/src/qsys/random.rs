//! Seeded generator of physically realizable systems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{realize, HamiltonianCoupling, QSys, SystemKind};
use crate::dmat::eig::spectral_abscissa;
use crate::dmat::{cx, delta_build, eye, CMat, SignatureJ};
use crate::error::{Error, Result};

const MAX_ATTEMPTS: usize = 16;
/// Deviation of T from the identity; keeps Θ well conditioned.
const T_SPREAD: f64 = 0.5;
const T_MAX_COND: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenOptions {
    pub kind: SystemKind,
    pub hurwitz_required: bool,
}

impl GenOptions {
    pub fn new(kind: SystemKind) -> Self {
        Self { kind, hurwitz_required: false }
    }

    pub fn hurwitz(mut self, required: bool) -> Self {
        self.hurwitz_required = required;
        self
    }
}

/// A generated system together with the parameters that produced it.
#[derive(Debug, Clone)]
pub struct GeneratedSystem {
    pub params: HamiltonianCoupling,
    pub system: QSys,
    /// 1-based attempt that succeeded.
    pub attempts: usize,
}

/// Complex Gaussian matrix with `E|z|² = 1` per entry.
pub(crate) fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        cx(re * s, im * s)
    })
}

fn hermitian(rng: &mut impl Rng, n: usize) -> CMat {
    let a = gaussian(rng, n, n);
    (&a + a.adjoint()).scale(0.5)
}

fn near_identity(rng: &mut impl Rng, n: usize) -> CMat {
    eye(n) + gaussian(rng, n, n).scale(T_SPREAD)
}

fn condition(t: &CMat) -> f64 {
    let sv = t.clone().singular_values();
    let hi = sv.iter().cloned().fold(0.0, f64::max);
    let lo = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

fn draw(rng: &mut ChaCha8Rng, n: usize, m: usize, kind: SystemKind) -> Result<Option<HamiltonianCoupling>> {
    match kind {
        SystemKind::Annihilation => {
            let mm = hermitian(rng, n);
            let nn = gaussian(rng, m, n);
            let t = near_identity(rng, n);
            if condition(&t) > T_MAX_COND {
                return Ok(None);
            }
            let theta = &t * t.adjoint();
            Ok(HamiltonianCoupling::annihilation(theta, mm, nn).ok())
        }
        SystemKind::General => {
            let m1 = hermitian(rng, n);
            let a = gaussian(rng, n, n);
            let m2 = (&a + a.transpose()).scale(0.5);
            let n1 = gaussian(rng, m, n);
            let n2 = gaussian(rng, m, n);
            let t1 = near_identity(rng, n);
            let t2 = gaussian(rng, n, n).scale(T_SPREAD);
            let t = delta_build(&t1, &t2)?.into_matrix();
            if condition(&t) > T_MAX_COND {
                return Ok(None);
            }
            let theta = SignatureJ::new(n).right(&t) * t.adjoint();
            let theta = (&theta + theta.adjoint()).scale(0.5);
            let mm = delta_build(&m1, &m2)?.into_matrix();
            let nn = delta_build(&n1, &n2)?.into_matrix();
            Ok(HamiltonianCoupling::general(theta, mm, nn).ok())
        }
    }
}

/// Draws random (Θ, M, N), realizes them and keeps the first system that
/// passes the eigenvalue-sum condition, the PR check and (optionally) the
/// Hurwitz test. Stability is enforced by rejection, never by shifting F.
pub fn random_pr_system(n: usize, m: usize, seed: u64, opts: GenOptions) -> Result<GeneratedSystem> {
    if n == 0 || m == 0 {
        return Err(Error::Generation("need at least one mode and one field".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=MAX_ATTEMPTS {
        let Some(params) = draw(&mut rng, n, m, opts.kind)? else {
            continue;
        };
        let system = realize(&params)?;
        let (f, ..) = system.matrices();
        if !super::eig_sum_condition(f) {
            continue;
        }
        if opts.hurwitz_required && spectral_abscissa(f)? >= 0.0 {
            continue;
        }
        if !system.check_pr().realizable {
            continue;
        }
        return Ok(GeneratedSystem { params, system, attempts: attempt });
    }
    Err(Error::Generation(format!(
        "no admissible {} system with n={n}, m={m} after {MAX_ATTEMPTS} draws (seed {seed})",
        opts.kind.as_str()
    )))
}
