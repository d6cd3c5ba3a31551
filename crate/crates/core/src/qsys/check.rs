//! Physical-realizability checks and parameter extraction.

use std::fmt;

use nalgebra::DMatrix;

use super::{realize, AnnihilationQSys, GeneralQSys, HamiltonianCoupling, QSys, SystemKind};
use crate::dmat::eig::{eigenvalues, inertia};
use crate::dmat::{
    cx, eye, hermitian_deviation, inverse, max_abs, max_diff, sigma_max, solve_lyapunov_hermitian, symmetrize, CMat,
    DoubledMatrix, SignatureJ,
};
use crate::error::{Error, Result};
use crate::tol::{self, Tolerances};

/// Why a PR check did not succeed. The order of variants is the order in
/// which failures are reported when several apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrFailure {
    /// `K ≠ I`.
    Feedthrough,
    /// The eigenvalue-sum condition fails, so the Lyapunov certificate is
    /// not unique and no search was attempted.
    Indeterminate,
    /// The Lyapunov equation could not be solved.
    LyapunovSingular,
    /// The affine family of Lyapunov-and-coupling solutions is empty.
    NoSolution,
    /// The family is nonempty but holds no positive-definite member.
    NoPositiveMember,
    /// Θ does not have inertia (n, n) (general) or is not positive definite.
    Inertia,
    /// `G ≠ -ΘH†J`.
    Coupling,
}

impl PrFailure {
    pub fn as_str(self) -> &'static str {
        match self {
            PrFailure::Feedthrough => "feedthrough",
            PrFailure::Indeterminate => "indeterminate",
            PrFailure::LyapunovSingular => "lyapunov-singular",
            PrFailure::NoSolution => "no-solution",
            PrFailure::NoPositiveMember => "no-positive-member",
            PrFailure::Inertia => "inertia",
            PrFailure::Coupling => "coupling",
        }
    }
}

impl fmt::Display for PrFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Named residuals behind a verdict. Residuals that could not be computed
/// are `NaN`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrResiduals {
    /// Relative residual of `FΘ + ΘF† + GJG† = 0`.
    pub lyapunov: f64,
    /// Relative residual of `G + ΘH†J = 0`.
    pub coupling: f64,
    /// `max |K - I|`.
    pub feedthrough: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrVerdict {
    pub realizable: bool,
    /// True when the checker could not decide (distinct from `false`).
    pub indeterminate: bool,
    pub theta: Option<CMat>,
    pub residuals: PrResiduals,
    pub failure_reason: Option<PrFailure>,
}

impl PrVerdict {
    pub fn reason_text(&self) -> String {
        match self.failure_reason {
            None => "realizable".to_string(),
            Some(r) => format!(
                "{r}; residuals lyapunov={:.3e} coupling={:.3e} feedthrough={:.3e}",
                self.residuals.lyapunov, self.residuals.coupling, self.residuals.feedthrough
            ),
        }
    }

    pub fn status(&self) -> &'static str {
        if self.realizable {
            "realizable"
        } else if self.indeterminate {
            "indeterminate"
        } else {
            "not-realizable"
        }
    }
}

/// True iff `min |λi + conj(λj)| > τ_sing · max(1, ‖F‖_max)` over all pairs.
pub fn eig_sum_condition(f: &CMat) -> bool {
    eig_sum_gap(f).map(|g| g > tol::SINGULAR * max_abs(f).max(1.0)).unwrap_or(false)
}

fn eig_sum_gap(f: &CMat) -> Result<f64> {
    let ev = eigenvalues(f)?;
    let mut gap = f64::INFINITY;
    for a in &ev {
        for b in &ev {
            gap = gap.min((a + b.conj()).norm());
        }
    }
    Ok(gap)
}

pub fn check_pr_general(s: &GeneralQSys) -> PrVerdict {
    check_pr_general_with(s, &Tolerances::default())
}

pub fn check_pr_annihilation(s: &AnnihilationQSys) -> PrVerdict {
    check_pr_annihilation_with(s, &Tolerances::default())
}

pub fn check_pr_general_with(s: &GeneralQSys, t: &Tolerances) -> PrVerdict {
    let j = Some(SignatureJ::new(s.m_fields));
    check_core(s.f.as_matrix(), s.g.as_matrix(), s.h.as_matrix(), s.k.as_matrix(), j, t)
}

pub fn check_pr_annihilation_with(s: &AnnihilationQSys, t: &Tolerances) -> PrVerdict {
    check_core(&s.f, &s.g, &s.h, &s.k, None, t)
}

/// `m · J`, or `m` when there is no signature.
fn times_j(m: &CMat, j: Option<SignatureJ>) -> CMat {
    match j {
        Some(j) => j.right(m),
        None => m.clone(),
    }
}

fn lyapunov_scale(f: &CMat, g: &CMat, theta: &CMat) -> f64 {
    1.0 + 2.0 * sigma_max(f) * sigma_max(theta) + sigma_max(g).powi(2)
}

fn coupling_scale(g: &CMat, h: &CMat, theta: &CMat) -> f64 {
    1.0 + sigma_max(g) + sigma_max(theta) * sigma_max(h)
}

fn residuals_for(f: &CMat, g: &CMat, h: &CMat, theta: &CMat, j: Option<SignatureJ>) -> (f64, f64) {
    let gjg = times_j(g, j) * g.adjoint();
    let lyap = f * theta + theta * f.adjoint() + gjg;
    let coup = g + times_j(&(theta * h.adjoint()), j);
    (max_abs(&lyap) / lyapunov_scale(f, g, theta), max_abs(&coup) / coupling_scale(g, h, theta))
}

fn inertia_ok(theta: &CMat, j: Option<SignatureJ>, t: &Tolerances) -> bool {
    let n = theta.nrows();
    let (pos, neg, zero) = inertia(theta, t.rank);
    match j {
        Some(_) => pos == n / 2 && neg == n / 2 && zero == 0 && n.is_multiple_of(2),
        None => pos == n,
    }
}

fn check_core(f: &CMat, g: &CMat, h: &CMat, k: &CMat, j: Option<SignatureJ>, t: &Tolerances) -> PrVerdict {
    let n = f.nrows();
    let feedthrough = if k.is_square() { max_diff(k, &eye(k.nrows())) } else { f64::INFINITY };
    let feed_ok = feedthrough <= t.residual;
    let mut verdict = PrVerdict {
        realizable: false,
        indeterminate: false,
        theta: None,
        residuals: PrResiduals { lyapunov: f64::NAN, coupling: f64::NAN, feedthrough },
        failure_reason: None,
    };
    let fail = |v: &mut PrVerdict, reason: PrFailure| {
        v.failure_reason = Some(if feed_ok { reason } else { PrFailure::Feedthrough });
    };

    if !eig_sum_condition(f) {
        if j.is_none() && n <= 2 {
            match sweep_annihilation(f, g, h, t) {
                SweepResult::Found(theta) => {
                    let (l, c) = residuals_for(f, g, h, &theta, j);
                    verdict.residuals.lyapunov = l;
                    verdict.residuals.coupling = c;
                    verdict.theta = Some(theta);
                    if feed_ok && l <= t.residual && c <= t.residual {
                        verdict.realizable = true;
                    } else {
                        fail(&mut verdict, PrFailure::Coupling);
                    }
                }
                SweepResult::Empty { residual } => {
                    verdict.residuals.lyapunov = residual;
                    verdict.residuals.coupling = residual;
                    fail(&mut verdict, PrFailure::NoSolution);
                }
                SweepResult::NoPositive => fail(&mut verdict, PrFailure::NoPositiveMember),
            }
            return verdict;
        }
        verdict.indeterminate = feed_ok;
        fail(&mut verdict, PrFailure::Indeterminate);
        return verdict;
    }

    let q = times_j(g, j) * g.adjoint();
    let theta = match solve_lyapunov_hermitian(f, &symmetrize(&q)) {
        Ok(th) => th,
        Err(_) => {
            fail(&mut verdict, PrFailure::LyapunovSingular);
            return verdict;
        }
    };
    let (l, c) = residuals_for(f, g, h, &theta, j);
    verdict.residuals.lyapunov = l;
    verdict.residuals.coupling = c;
    let inertia_good = inertia_ok(&theta, j, t);
    verdict.theta = Some(theta);
    if !inertia_good {
        fail(&mut verdict, PrFailure::Inertia);
    } else if l > t.residual {
        fail(&mut verdict, PrFailure::LyapunovSingular);
    } else if c > t.residual {
        fail(&mut verdict, PrFailure::Coupling);
    } else if !feed_ok {
        fail(&mut verdict, PrFailure::Feedthrough);
    } else {
        verdict.realizable = true;
    }
    verdict
}

/// Checks the PR equations against a supplied certificate Θ instead of
/// solving for one. Useful when Θ is known by construction and the
/// Lyapunov solution is not unique.
pub fn verify_certificate(s: &QSys, theta: &CMat, t: &Tolerances) -> PrVerdict {
    let (f, g, h, k) = s.matrices();
    let j = match s.kind() {
        SystemKind::General => Some(SignatureJ::new(s.fields())),
        SystemKind::Annihilation => None,
    };
    let feedthrough = if k.is_square() { max_diff(k, &eye(k.nrows())) } else { f64::INFINITY };
    let mut v = PrVerdict {
        realizable: false,
        indeterminate: false,
        theta: Some(theta.clone()),
        residuals: PrResiduals { lyapunov: f64::NAN, coupling: f64::NAN, feedthrough },
        failure_reason: None,
    };
    if theta.shape() != f.shape() {
        v.failure_reason = Some(PrFailure::Inertia);
        return v;
    }
    let (l, c) = residuals_for(f, g, h, theta, j);
    v.residuals.lyapunov = l;
    v.residuals.coupling = c;
    v.failure_reason = if feedthrough > t.residual {
        Some(PrFailure::Feedthrough)
    } else if hermitian_deviation(theta) > t.structure * (1.0 + max_abs(theta)) || !inertia_ok(theta, j, t) {
        Some(PrFailure::Inertia)
    } else if l > t.residual {
        Some(PrFailure::LyapunovSingular)
    } else if c > t.residual {
        Some(PrFailure::Coupling)
    } else {
        None
    };
    v.realizable = v.failure_reason.is_none();
    v
}

enum SweepResult {
    Found(CMat),
    Empty { residual: f64 },
    NoPositive,
}

/// Real basis of n×n Hermitian matrices: n diagonal units, then for each
/// i < j the real symmetric and imaginary antisymmetric pair.
fn hermitian_basis(n: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut e = CMat::zeros(n, n);
        e[(i, i)] = cx(1.0, 0.0);
        out.push(e);
    }
    for i in 0..n {
        for k in i + 1..n {
            let mut re = CMat::zeros(n, n);
            re[(i, k)] = cx(1.0, 0.0);
            re[(k, i)] = cx(1.0, 0.0);
            out.push(re);
            let mut im = CMat::zeros(n, n);
            im[(i, k)] = cx(0.0, 1.0);
            im[(k, i)] = cx(0.0, -1.0);
            out.push(im);
        }
    }
    out
}

fn stack_real(parts: &[&CMat]) -> Vec<f64> {
    let mut v = Vec::new();
    for p in parts {
        for z in p.iter() {
            v.push(z.re);
            v.push(z.im);
        }
    }
    v
}

/// Searches the affine family of Hermitian Θ solving both
/// `FΘ + ΘF† + GG† = 0` and `ΘH† = -G` for a positive-definite member.
fn sweep_annihilation(f: &CMat, g: &CMat, h: &CMat, t: &Tolerances) -> SweepResult {
    let n = f.nrows();
    let basis = hermitian_basis(n);
    let columns: Vec<Vec<f64>> = basis
        .iter()
        .map(|e| {
            let l = f * e + e * f.adjoint();
            let c = e * h.adjoint();
            stack_real(&[&l, &c])
        })
        .collect();
    let rhs_l = -(g * g.adjoint());
    let rhs_c = -g.clone();
    let rhs = stack_real(&[&rhs_l, &rhs_c]);
    let rows = rhs.len();
    let p = basis.len();
    let a = DMatrix::<f64>::from_fn(rows, p, |r, c| columns[c][r]);
    let b = nalgebra::DVector::from_vec(rhs.clone());

    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = t.rank.max(1e-12) * smax.max(1.0) * (rows.max(p) as f64);
    let particular = svd.solve(&b, cut).unwrap_or_else(|_| nalgebra::DVector::zeros(p));
    let resid = (&a * &particular - &b).amax() / (1.0 + b.amax() + smax * particular.amax());
    if resid > t.residual {
        return SweepResult::Empty { residual: resid };
    }
    let v_t = svd.v_t.expect("requested V");
    // rows >= p always holds here (2n(n + m) >= n²), so V is square.
    let null: Vec<nalgebra::DVector<f64>> =
        (0..p).filter(|&i| svd.singular_values[i] <= cut).map(|i| v_t.row(i).transpose()).collect();
    let build = |theta: &nalgebra::DVector<f64>| -> CMat {
        let mut m = CMat::zeros(n, n);
        for (k, e) in basis.iter().enumerate() {
            m += e.scale(theta[k]);
        }
        m
    };
    let positive = |m: &CMat| inertia(m, t.rank).0 == n;

    let theta0 = build(&particular);
    if positive(&theta0) {
        return SweepResult::Found(theta0);
    }
    if null.is_empty() {
        return SweepResult::NoPositive;
    }
    // Project scaled identities onto the family, then fall back to a grid
    // over null-space coordinates.
    let ident_coords: Vec<f64> = basis.iter().map(|e| (0..n).map(|i| e[(i, i)].re).sum::<f64>()).collect();
    let radius = 1.0 + particular.amax();
    for scale in [1e-2, 1e-1, 1.0, 10.0, 100.0] {
        let target = nalgebra::DVector::from_iterator(p, ident_coords.iter().map(|v| v * scale * radius));
        let mut cand = particular.clone();
        for z in &null {
            let w = z.dot(&(&target - &particular));
            cand += z * w;
        }
        let m = build(&cand);
        if positive(&m) {
            return SweepResult::Found(m);
        }
    }
    let d = null.len();
    let steps = 9usize;
    let total = steps.pow(d as u32);
    for idx in 0..total {
        let mut cand = particular.clone();
        let mut rem = idx;
        for z in &null {
            let k = rem % steps;
            rem /= steps;
            let w = radius * 4.0 * (k as f64 / (steps - 1) as f64 - 0.5);
            cand += z * w;
        }
        let m = build(&cand);
        if positive(&m) {
            return SweepResult::Found(m);
        }
    }
    SweepResult::NoPositive
}

/// Recovers (Θ, M, N) from a physically realizable system.
pub fn extract_params(s: &QSys) -> Result<HamiltonianCoupling> {
    let verdict = s.check_pr();
    if !verdict.realizable {
        return Err(Error::NotPhysicallyRealizable(Box::new(verdict)));
    }
    let theta = verdict.theta.clone().expect("realizable verdict carries Θ");
    let (f, _, h, _) = s.matrices();
    let theta_inv = inverse(&theta)?;
    let i = cx(0.0, 1.0);
    let ntn = match s.kind() {
        SystemKind::General => h.adjoint() * SignatureJ::new(s.fields()).left(h),
        SystemKind::Annihilation => h.adjoint() * h,
    };
    let m_raw = (theta_inv * f) * i + ntn * cx(0.0, 0.5);
    let dev = hermitian_deviation(&m_raw);
    if dev > tol::HERMITIAN_SUSPECT * (1.0 + max_abs(&m_raw)) {
        return Err(Error::Domain(format!("extracted Hamiltonian is not Hermitian (deviation {dev:.3e})")));
    }
    let mut m = symmetrize(&m_raw);
    let params = match s.kind() {
        SystemKind::General => {
            m = DoubledMatrix::from_matrix(&m, tol::HERMITIAN_SUSPECT * (1.0 + max_abs(&m)))?.into_matrix();
            HamiltonianCoupling::general(theta, m, h.clone())?
        }
        SystemKind::Annihilation => HamiltonianCoupling::annihilation(theta, m, h.clone())?,
    };
    let back = realize(&params)?;
    let (f2, g2, _, _) = back.matrices();
    let (f1, g1, _, _) = s.matrices();
    let err = max_diff(f1, f2).max(max_diff(g1, g2));
    if err > tol::RESIDUAL * (1.0 + max_abs(f1) + max_abs(g1)) {
        return Err(Error::Domain(format!("re-substitution of extracted parameters misses by {err:.3e}")));
    }
    Ok(params)
}
