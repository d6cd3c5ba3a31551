//! H2 and H∞ norms.

use super::{frequency_grid, tf_eval, StateSpaceTF};
use crate::dmat::eig::eigenvalues;
use crate::dmat::sylvester::lyapunov_residual;
use crate::dmat::{block2, cx, eye, inverse, max_abs, sigma_max, solve_lyapunov_hermitian, trace};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMethod {
    LyapunovGramian,
    Bisection,
}

impl NormMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            NormMethod::LyapunovGramian => "lyapunov-gramian",
            NormMethod::Bisection => "bisection",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormResult {
    pub value: f64,
    pub method: NormMethod,
    /// Lyapunov residual (H2) or final bracket width (H∞).
    pub certificate: f64,
}

fn require_hurwitz(g: &StateSpaceTF) -> Result<()> {
    if let Some(p) = g.poles().iter().find(|p| p.re >= 0.0) {
        return Err(Error::Unstable(format!("pole at {p}")));
    }
    Ok(())
}

/// `sqrt(tr(C P C†))` with `AP + PA† + BB† = 0`.
pub fn h2_norm(g: &StateSpaceTF) -> Result<NormResult> {
    if max_abs(g.d()) > tol::RESIDUAL {
        return Err(Error::InfiniteNorm(format!(
            "H2 norm needs a strictly proper system, max |D| = {:.3e}",
            max_abs(g.d())
        )));
    }
    require_hurwitz(g)?;
    if g.state_dim() == 0 {
        return Ok(NormResult { value: 0.0, method: NormMethod::LyapunovGramian, certificate: 0.0 });
    }
    let q = g.b() * g.b().adjoint();
    let p = solve_lyapunov_hermitian(g.a(), &q)?;
    let v = trace(&(g.c() * &p * g.c().adjoint())).re.max(0.0);
    Ok(NormResult {
        value: v.sqrt(),
        method: NormMethod::LyapunovGramian,
        certificate: lyapunov_residual(g.a(), &p, &q),
    })
}

pub fn hinf_norm(g: &StateSpaceTF, rel_tol: f64) -> Result<NormResult> {
    hinf_norm_with(g, rel_tol, Exec::default())
}

/// Bisection on γ with the bounded-real Hamiltonian. Lower bracket: the
/// larger of σ_max(D)(1 + 1e-9) and the sampled peak gain; upper bracket
/// doubled until the Hamiltonian has no imaginary-axis eigenvalues.
pub fn hinf_norm_with(g: &StateSpaceTF, rel_tol: f64, exec: Exec) -> Result<NormResult> {
    require_hurwitz(g)?;
    let rel_tol = rel_tol.max(1e-14);
    let sd = sigma_max(g.d());
    if g.state_dim() == 0 || g.input_dim() == 0 || g.output_dim() == 0 {
        return Ok(NormResult { value: sd, method: NormMethod::Bisection, certificate: 0.0 });
    }
    let grid = frequency_grid(g.a());
    let sampled = exec.max_over(&grid, |&w| tf_eval(g, cx(0.0, w)).map(|m| sigma_max(&m)).unwrap_or(0.0));
    let mut lo = (sd * (1.0 + 1e-9)).max(sampled);
    if lo == 0.0 {
        lo = f64::MIN_POSITIVE;
    }
    let mut hi = (2.0 * lo).max(sd + sigma_max(g.b()) * sigma_max(g.c()));
    let mut doublings = 0;
    while !is_upper_bound(g, hi)? {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NoConvergence("H∞ upper bracket".into()));
        }
    }
    while hi - lo > rel_tol * ((lo + hi) / 2.0).max(1.0) {
        let mid = 0.5 * (lo + hi);
        if is_upper_bound(g, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(NormResult { value: 0.5 * (lo + hi), method: NormMethod::Bisection, certificate: hi - lo })
}

/// True iff `‖Γ‖∞ < γ`, judged by the absence of verified imaginary-axis
/// eigenvalues of the bounded-real Hamiltonian.
fn is_upper_bound(g: &StateSpaceTF, gamma: f64) -> Result<bool> {
    let (a, b, c, d) = (g.a(), g.b(), g.c(), g.d());
    let m = g.input_dim();
    let p = g.output_dim();
    let r = eye(m) * cx(gamma * gamma, 0.0) - d.adjoint() * d;
    let r_inv = inverse(&r)?;
    let a_h = a + b * &r_inv * d.adjoint() * c;
    let s = eye(p) + d * &r_inv * d.adjoint();
    let h = block2(&a_h, &(b * &r_inv * b.adjoint()), &(-(c.adjoint() * s * c)), &(-a_h.adjoint()))?;
    let band = 1e-6 * (1.0 + max_abs(&h));
    for lam in eigenvalues(&h)? {
        if lam.re.abs() <= band {
            if let Ok(gw) = tf_eval(g, cx(0.0, lam.im)) {
                if sigma_max(&gw) >= gamma * (1.0 - 1e-9) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{cavity, ss};
    use super::*;

    #[test]
    fn h2_examples() {
        let g = ss(&[-1.0], &[1.0], &[1.0], &[0.0], 1, 1, 1);
        assert!((h2_norm(&g).unwrap().value - 0.5f64.sqrt()).abs() < 1e-14);
        let g = ss(&[-1.0], &[0.0], &[1.0], &[0.0], 1, 1, 1);
        assert_eq!(h2_norm(&g).unwrap().value, 0.0);
        let g = ss(&[-1.0], &[-2.0], &[1.0], &[0.0], 1, 1, 1);
        assert!((h2_norm(&g).unwrap().value - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn h2_errors() {
        assert!(matches!(h2_norm(&cavity()), Err(Error::InfiniteNorm(_))));
        let g = ss(&[1.0], &[1.0], &[1.0], &[0.0], 1, 1, 1);
        assert!(matches!(h2_norm(&g), Err(Error::Unstable(_))));
    }

    #[test]
    fn hinf_examples() {
        let tol = 1e-6;
        let g = ss(&[-1.0], &[1.0], &[1.0], &[0.0], 1, 1, 1);
        let r = hinf_norm(&g, tol).unwrap();
        assert!((r.value - 1.0).abs() <= 2.0 * tol, "{r:?}");
        assert!(r.certificate <= tol * r.value.max(1.0));
        let g = ss(&[-1.0], &[2.0], &[1.0], &[0.0], 1, 1, 1);
        assert!((hinf_norm(&g, tol).unwrap().value - 2.0).abs() <= 4.0 * tol);
        assert!((hinf_norm(&cavity(), tol).unwrap().value - 1.0).abs() <= 2.0 * tol);
    }

    #[test]
    fn hinf_resonant_peak() {
        // Lightly damped second-order system; peak is well above the DC gain.
        let g = ss(&[0.0, 1.0, -1.0, -0.1], &[0.0, 1.0], &[1.0, 0.0], &[0.0], 2, 1, 1);
        let r = hinf_norm(&g, 1e-8).unwrap();
        let zeta: f64 = 0.05;
        let peak = 1.0 / (2.0 * zeta * (1.0 - zeta * zeta).sqrt());
        assert!((r.value - peak).abs() < 1e-6 * peak, "{} vs {}", r.value, peak);
    }

    #[test]
    fn hinf_rejects_unstable() {
        let g = ss(&[0.5], &[1.0], &[1.0], &[0.0], 1, 1, 1);
        assert!(matches!(hinf_norm(&g, 1e-6), Err(Error::Unstable(_))));
    }
}
