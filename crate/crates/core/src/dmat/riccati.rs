//! Hermitian algebraic Riccati equations `AX + XA† + XRX + Q = 0`.
//!
//! Solutions come from n-dimensional invariant subspaces of the 2n×2n
//! Hamiltonian-type matrix `[[A†, R], [-Q, -A]]`: if its columns `[U1; U2]`
//! span an invariant subspace with `U1` invertible, `X = U2 U1⁻¹` solves the
//! equation. The default pick is the subspace of the n eigenvalues with the
//! most negative real parts (the stabilizing solution, `A + XR` Hurwitz).
//! When that fails and `n <= 4`, every one of the C(2n, n) index subsets is
//! tried in order of increasing real-part sum.

use super::eig::{reorder_schur, schur};
use super::factor::sigma_max;
use super::sylvester::solve_lyapunov_hermitian;
use super::{block2, hermitian_deviation, max_abs, max_diff, solve, symmetrize, CMat};
use crate::error::{Error, Result};
use crate::tol;

/// Largest `n` for which alternative invariant subspaces are scanned.
pub const SCAN_LIMIT: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum CareSelection {
    /// `R = 0`: the equation is a Lyapunov equation and was solved directly.
    LyapunovPath,
    /// Invariant subspace of the n most-negative-real-part eigenvalues.
    StableSubspace,
    /// Another invariant subspace; the listed positions index the
    /// Hamiltonian eigenvalues sorted by real part.
    AlternativeSubspace { eigen_indices: Vec<usize> },
}

#[derive(Debug, Clone)]
pub struct CareSolution {
    pub x: CMat,
    pub selection: CareSelection,
    /// `max|AX + XA† + XRX + Q|`.
    pub residual: f64,
    /// `max|X - X†|` before symmetrization.
    pub hermitian_deviation: f64,
    /// Pre-symmetrization deviation exceeded the suspect threshold.
    pub suspect: bool,
}

#[derive(Debug, Clone)]
pub enum CareOutcome {
    Solved(CareSolution),
    /// No invariant subspace produced a Hermitian solution.
    NoHermitianSolution {
        subspaces_tried: usize,
    },
}

impl CareOutcome {
    pub fn solution(&self) -> Option<&CareSolution> {
        match self {
            CareOutcome::Solved(s) => Some(s),
            CareOutcome::NoHermitianSolution { .. } => None,
        }
    }

    pub fn into_solution(self) -> Option<CareSolution> {
        match self {
            CareOutcome::Solved(s) => Some(s),
            CareOutcome::NoHermitianSolution { .. } => None,
        }
    }
}

pub fn care_residual(a: &CMat, r: &CMat, q: &CMat, x: &CMat) -> f64 {
    max_abs(&(a * x + x * a.adjoint() + x * r * x + q))
}

/// Residual bound `τ_res (1 + ‖Q‖ + ‖X‖²‖R‖ + ‖A‖‖X‖)` used to accept a candidate.
fn residual_bound(a: &CMat, r: &CMat, q: &CMat, x: &CMat) -> f64 {
    let xm = max_abs(x);
    let n = a.nrows().max(1) as f64;
    tol::RESIDUAL * n * (1.0 + max_abs(q) + xm * xm * max_abs(r) + max_abs(a) * xm)
}

fn validate(a: &CMat, r: &CMat, q: &CMat) -> Result<()> {
    let n = a.nrows();
    if !a.is_square() || r.shape() != (n, n) || q.shape() != (n, n) {
        return Err(Error::dim(format!("riccati shapes: A {:?}, R {:?}, Q {:?}", a.shape(), r.shape(), q.shape())));
    }
    for (name, m) in [("R", r), ("Q", q)] {
        if hermitian_deviation(m) > tol::STRUCTURE * (1.0 + max_abs(m)) {
            return Err(Error::Domain(format!("Riccati coefficient {name} is not Hermitian")));
        }
    }
    Ok(())
}

struct Hamiltonian {
    u: CMat,
    t: CMat,
    /// Diagonal positions of T sorted by ascending real part.
    by_real: Vec<usize>,
}

impl Hamiltonian {
    fn new(a: &CMat, r: &CMat, q: &CMat) -> Result<Self> {
        let h = block2(&a.adjoint(), r, &(-q), &(-a))?;
        let (u, t) = schur(&h)?;
        let mut by_real: Vec<usize> = (0..t.nrows()).collect();
        by_real.sort_by(|&i, &j| t[(i, i)].re.total_cmp(&t[(j, j)].re));
        Ok(Self { u, t, by_real })
    }

    /// Candidate from the subspace of the chosen sorted-order eigenvalues.
    fn candidate(&self, sorted_picks: &[usize], a: &CMat, r: &CMat, q: &CMat) -> Option<(CMat, f64, f64)> {
        let n = a.nrows();
        let mut select = vec![false; 2 * n];
        for &k in sorted_picks {
            select[self.by_real[k]] = true;
        }
        let (mut u, mut t) = (self.u.clone(), self.t.clone());
        reorder_schur(&mut u, &mut t, &select);
        let u1 = u.view((0, 0), (n, n)).into_owned();
        let u2 = u.view((n, 0), (n, n)).into_owned();
        let sv = u1.clone().svd(false, false).singular_values;
        let smax = sv.iter().copied().fold(0.0, f64::max);
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if smin <= tol::SINGULAR * smax {
            return None;
        }
        // X = U2 U1⁻¹  <=>  U1† X† = U2†
        let x = solve(&u1.adjoint(), &u2.adjoint()).ok()?.adjoint();
        let dev = hermitian_deviation(&x);
        if dev > tol::HERMITIAN_SUSPECT * (1.0 + max_abs(&x)) {
            return None;
        }
        let x = symmetrize(&x);
        let res = care_residual(a, r, q, &x);
        if res > residual_bound(a, r, q, &x) {
            return None;
        }
        Some((x, res, dev))
    }
}

fn solution(x: CMat, selection: CareSelection, residual: f64, dev: f64) -> CareSolution {
    CareSolution { suspect: dev > tol::HERMITIAN_SUSPECT, x, selection, residual, hermitian_deviation: dev }
}

fn combinations(total: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, total: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..total {
            if total - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, total, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, total, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn lyapunov_path(a: &CMat, r: &CMat, q: &CMat) -> Option<CareSolution> {
    if max_abs(r) > 0.0 {
        return None;
    }
    let x = solve_lyapunov_hermitian(a, q).ok()?;
    let res = care_residual(a, r, q, &x);
    (res <= residual_bound(a, r, q, &x)).then(|| solution(x, CareSelection::LyapunovPath, res, 0.0))
}

/// Solves `AX + XA† + XRX + Q = 0` for Hermitian `X`.
///
/// Returns the stabilizing solution when the stable invariant subspace
/// yields one; otherwise the first Hermitian solution found by scanning
/// alternative subspaces (only for `n <= 4`). Nonexistence is reported via
/// [`CareOutcome::NoHermitianSolution`], not as an error.
pub fn solve_care_hermitian(a: &CMat, r: &CMat, q: &CMat) -> Result<CareOutcome> {
    validate(a, r, q)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(CareOutcome::Solved(solution(CMat::zeros(0, 0), CareSelection::StableSubspace, 0.0, 0.0)));
    }
    if let Some(s) = lyapunov_path(a, r, q) {
        return Ok(CareOutcome::Solved(s));
    }
    let ham = Hamiltonian::new(a, r, q)?;
    let stable: Vec<usize> = (0..n).collect();
    if let Some((x, res, dev)) = ham.candidate(&stable, a, r, q) {
        return Ok(CareOutcome::Solved(solution(x, CareSelection::StableSubspace, res, dev)));
    }
    if n > SCAN_LIMIT {
        return Ok(CareOutcome::NoHermitianSolution { subspaces_tried: 1 });
    }
    let mut tried = 1;
    for picks in alternative_subsets(&ham, n) {
        tried += 1;
        if let Some((x, res, dev)) = ham.candidate(&picks, a, r, q) {
            return Ok(CareOutcome::Solved(solution(
                x,
                CareSelection::AlternativeSubspace { eigen_indices: picks },
                res,
                dev,
            )));
        }
    }
    Ok(CareOutcome::NoHermitianSolution { subspaces_tried: tried })
}

fn alternative_subsets(ham: &Hamiltonian, n: usize) -> Vec<Vec<usize>> {
    let re: Vec<f64> = ham.by_real.iter().map(|&i| ham.t[(i, i)].re).collect();
    let mut subsets: Vec<Vec<usize>> = combinations(2 * n, n).into_iter().skip(1).collect();
    subsets.sort_by(|p, q| {
        let sp: f64 = p.iter().map(|&k| re[k]).sum();
        let sq: f64 = q.iter().map(|&k| re[k]).sum();
        sp.total_cmp(&sq)
    });
    subsets
}

/// Every distinct Hermitian solution reachable by the subspace scan
/// (stabilizing one first). For `n > 4` at most the stabilizing solution
/// is returned.
pub fn care_hermitian_solutions(a: &CMat, r: &CMat, q: &CMat) -> Result<Vec<CareSolution>> {
    validate(a, r, q)?;
    let n = a.nrows();
    let mut out: Vec<CareSolution> = Vec::new();
    if n == 0 {
        return Ok(vec![solution(CMat::zeros(0, 0), CareSelection::StableSubspace, 0.0, 0.0)]);
    }
    if let Some(s) = lyapunov_path(a, r, q) {
        return Ok(vec![s]);
    }
    let ham = Hamiltonian::new(a, r, q)?;
    let stable: Vec<usize> = (0..n).collect();
    if let Some((x, res, dev)) = ham.candidate(&stable, a, r, q) {
        out.push(solution(x, CareSelection::StableSubspace, res, dev));
    }
    if n <= SCAN_LIMIT {
        for picks in alternative_subsets(&ham, n) {
            if let Some((x, res, dev)) = ham.candidate(&picks, a, r, q) {
                let scale = 1.0 + max_abs(&x);
                if out.iter().all(|s| max_diff(&s.x, &x) > 1e-7 * scale) {
                    out.push(solution(x, CareSelection::AlternativeSubspace { eigen_indices: picks }, res, dev));
                }
            }
        }
    }
    Ok(out)
}

/// Spectral norm helper re-exported for residual scaling in callers.
pub fn coefficient_scale(a: &CMat, r: &CMat, q: &CMat) -> f64 {
    1.0 + sigma_max(a) + sigma_max(r) + sigma_max(q)
}
