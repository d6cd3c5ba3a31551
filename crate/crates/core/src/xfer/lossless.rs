//! (J,J)-unitary and lossless bounded real checks. Each combines an
//! algebraic certificate with a sampled frequency-domain cross-check.

use super::{frequency_grid, minimal_realization, tf_eval, StateSpaceTF};
use crate::dmat::eig::inertia;
use crate::dmat::{cx, eye, max_abs, max_diff, sigma_max, solve_lyapunov_hermitian, CMat, SignatureJ};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::qsys::eig_sum_condition;
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProngStatus {
    Pass,
    Fail,
    Indeterminate,
}

impl ProngStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ProngStatus::Pass => "pass",
            ProngStatus::Fail => "fail",
            ProngStatus::Indeterminate => "indeterminate",
        }
    }
}

/// One leg of a two-pronged verdict. `residual` is the worst relative
/// residual seen (NaN when nothing could be computed).
#[derive(Debug, Clone, PartialEq)]
pub struct Prong {
    pub status: ProngStatus,
    pub residual: f64,
    pub detail: String,
}

impl Prong {
    fn judge(residual: f64, tol: f64, detail: impl Into<String>) -> Self {
        Self {
            status: if residual <= tol { ProngStatus::Pass } else { ProngStatus::Fail },
            residual,
            detail: detail.into(),
        }
    }

    fn indeterminate(detail: impl Into<String>) -> Self {
        Self { status: ProngStatus::Indeterminate, residual: f64::NAN, detail: detail.into() }
    }

    pub fn passed(&self) -> bool {
        self.status == ProngStatus::Pass
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyVerdict {
    pub holds: bool,
    /// Pole-location prong (lossless bounded real only).
    pub stability: Option<Prong>,
    pub algebraic: Prong,
    pub sampled: Prong,
    /// The Hermitian X from the algebraic prong, if it was computed.
    pub certificate: Option<CMat>,
}

pub fn jj_unitary_check(g: &StateSpaceTF, half_io: usize) -> Result<FrequencyVerdict> {
    jj_unitary_check_with(g, half_io, &Tolerances::default(), Exec::default())
}

/// Definition of a (J,J)-unitary system: `Γ~(s) J Γ(s) = J`.
pub fn jj_unitary_check_with(g: &StateSpaceTF, half_io: usize, t: &Tolerances, exec: Exec) -> Result<FrequencyVerdict> {
    if g.input_dim() != 2 * half_io || g.output_dim() != 2 * half_io {
        return Err(Error::dim(format!(
            "(J,J)-unitary check needs {}×{} transfer function, got {}×{}",
            2 * half_io,
            2 * half_io,
            g.output_dim(),
            g.input_dim()
        )));
    }
    let j = SignatureJ::new(half_io);
    let (algebraic, certificate) = algebraic_prong(g, Some(j), false, t);
    let jm = j.matrix();
    let sampled = sampled_prong(g, t, exec, |gw| {
        let lhs = gw.adjoint() * j.left(gw);
        max_diff(&lhs, &jm)
    });
    Ok(FrequencyVerdict {
        holds: algebraic.passed() && sampled.passed(),
        stability: None,
        algebraic,
        sampled,
        certificate,
    })
}

pub fn lossless_br_check(g: &StateSpaceTF) -> FrequencyVerdict {
    lossless_br_check_with(g, &Tolerances::default(), Exec::default())
}

/// Lossless bounded real: stable, minimal (after exact reduction) and
/// `Γ~Γ = I`.
pub fn lossless_br_check_with(g: &StateSpaceTF, t: &Tolerances, exec: Exec) -> FrequencyVerdict {
    let r = minimal_realization(g);
    let worst = r.poles().iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
    let stability = if r.poles().iter().all(|p| p.re < -t.singular) {
        Prong {
            status: ProngStatus::Pass,
            residual: worst,
            detail: format!("{} poles, spectral abscissa {worst:.3e}", r.state_dim()),
        }
    } else {
        Prong { status: ProngStatus::Fail, residual: worst, detail: format!("spectral abscissa {worst:.3e}") }
    };
    let square = r.input_dim() == r.output_dim();
    let (algebraic, certificate) = if square {
        algebraic_prong(&r, None, true, t)
    } else {
        (
            Prong {
                status: ProngStatus::Fail,
                residual: f64::INFINITY,
                detail: "transfer function is not square".into(),
            },
            None,
        )
    };
    let ident = eye(r.input_dim());
    let sampled = sampled_prong(&r, t, exec, |gw| max_diff(&(gw.adjoint() * gw), &ident));
    FrequencyVerdict {
        holds: stability.passed() && algebraic.passed() && sampled.passed(),
        stability: Some(stability),
        algebraic,
        sampled,
        certificate,
    }
}

fn times_j(m: &CMat, j: Option<SignatureJ>) -> CMat {
    match j {
        Some(j) => j.right(m),
        None => m.clone(),
    }
}

/// Solves `AX + XA† + BJB† = 0` and checks `B = -XC†J`, `D†JD = J`
/// (and `X > 0` when `positive`).
fn algebraic_prong(g: &StateSpaceTF, j: Option<SignatureJ>, positive: bool, t: &Tolerances) -> (Prong, Option<CMat>) {
    let (a, b, c, d) = (g.a(), g.b(), g.c(), g.d());
    let jm = match j {
        Some(j) => j.matrix(),
        None => eye(d.nrows()),
    };
    let feed = max_diff(&(d.adjoint() * &jm * d), &jm);
    if g.state_dim() == 0 {
        return (Prong::judge(feed, t.residual, "static: D†JD = J"), None);
    }
    if !eig_sum_condition(a) {
        return (Prong::indeterminate("eigenvalue-sum condition fails; certificate not unique"), None);
    }
    let q = times_j(b, j) * b.adjoint();
    let x = match solve_lyapunov_hermitian(a, &q) {
        Ok(x) => x,
        Err(e) => return (Prong::indeterminate(format!("Lyapunov solve failed: {e}")), None),
    };
    let scale = 1.0 + sigma_max(b) + sigma_max(&x) * sigma_max(c);
    let coupling = max_abs(&(b + times_j(&(&x * c.adjoint()), j))) / scale;
    let residual = coupling.max(feed);
    let mut detail = format!("coupling {coupling:.3e}, feedthrough {feed:.3e}");
    let mut prong = Prong::judge(residual, t.residual, "");
    if positive {
        let n = x.nrows();
        if inertia(&x, t.rank).0 != n {
            prong.status = ProngStatus::Fail;
            detail.push_str(", X not positive definite");
        }
    }
    prong.detail = detail;
    (prong, Some(x))
}

/// Max over the grid of `metric(Γ(iω)) / (1 + σ_max(Γ(iω))²)`. Grid points
/// that hit a pole are skipped and counted.
fn sampled_prong<F>(g: &StateSpaceTF, t: &Tolerances, exec: Exec, metric: F) -> Prong
where
    F: Fn(&CMat) -> f64 + Sync,
{
    let grid = frequency_grid(g.a());
    let vals: Vec<Option<f64>> = exec.map_slice(&grid, |&w| {
        tf_eval(g, cx(0.0, w)).ok().map(|gw| {
            let s = sigma_max(&gw);
            metric(&gw) / (1.0 + s * s)
        })
    });
    let skipped = vals.iter().filter(|v| v.is_none()).count();
    let worst = vals.iter().flatten().cloned().fold(0.0, f64::max);
    let mut p = Prong::judge(worst, t.freq, format!("{} grid points, worst {worst:.3e}", grid.len()));
    if skipped > 0 {
        p.detail.push_str(&format!(", {skipped} skipped at poles"));
    }
    p
}

#[cfg(test)]
mod tests {
    use super::super::tests::{cavity, ss};
    use super::*;
    use crate::dmat::delta_build;

    #[test]
    fn cavity_is_lossless() {
        let v = lossless_br_check(&cavity());
        assert!(v.holds, "{v:?}");
    }

    #[test]
    fn low_pass_is_not_lossless() {
        let v = lossless_br_check(&ss(&[-1.0], &[1.0], &[1.0], &[0.0], 1, 1, 1));
        assert!(!v.holds);
        assert_eq!(v.algebraic.status, ProngStatus::Fail);
    }

    #[test]
    fn unstable_all_pass_fails_stability() {
        // (s+1)/(s-1) = 1 + 2/(s-1)
        let v = lossless_br_check(&ss(&[1.0], &[2.0], &[1.0], &[1.0], 1, 1, 1));
        assert!(!v.holds);
        assert_eq!(v.stability.unwrap().status, ProngStatus::Fail);
        assert!(v.sampled.passed());
    }

    #[test]
    fn identity_is_jj_unitary() {
        let g = StateSpaceTF::static_gain(eye(2));
        assert!(jj_unitary_check(&g, 1).unwrap().holds);
    }

    #[test]
    fn gain_two_is_not_jj_unitary() {
        let d = eye(2) * cx(2.0, 0.0);
        let g = StateSpaceTF::new(from_real_diag(-1.0), CMat::zeros(2, 2), CMat::zeros(2, 2), d).unwrap();
        let v = jj_unitary_check(&g, 1).unwrap();
        assert!(!v.holds);
        assert!(v.algebraic.residual > 1.0);
    }

    fn from_real_diag(v: f64) -> CMat {
        eye(2) * cx(v, 0.0)
    }

    #[test]
    fn detuned_cavity_is_jj_unitary() {
        let f =
            delta_build(&crate::dmat::from_rows(1, 1, &[cx(-0.5, -1.0)]), &CMat::zeros(1, 1)).unwrap().into_matrix();
        let g = StateSpaceTF::new(f, -eye(2), eye(2), eye(2)).unwrap();
        let v = jj_unitary_check(&g, 1).unwrap();
        assert!(v.holds, "{v:?}");
    }

    #[test]
    fn wrong_dimension_is_an_error() {
        assert!(jj_unitary_check(&cavity(), 1).is_err());
    }
}
