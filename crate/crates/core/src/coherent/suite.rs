//! Random plants and challengers, and seeded verification suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::verify::{verify_static_lqg_with, verify_trivial_hinf, verify_zero_gain, StaticLqgOptions};
use super::{Evidence, Outcome, TheoremReport, TheoremTag};
use crate::dmat::eig::spectral_abscissa;
use crate::dmat::{eye, CMat, Cx};
use crate::error::{Error, Result};
use crate::feedback::{synth_noise_annihilation, ControllerModel, CostOutput, PlantModel};
use crate::par::Exec;
use crate::qsys::random::gaussian;
use crate::qsys::{random_pr_system, GenOptions, SystemKind};
use crate::xfer::{hinf_norm, StateSpaceTF};

const CHALLENGER_ATTEMPTS: usize = 16;

/// Random Hurwitz PR annihilation plant with `m_y = m_w` outputs and no
/// cost. The `m_w + m_u` fields of a random PR system are split into noise
/// and control inputs; the output keeps the rows for the noise fields.
pub fn random_pr_plant(n: usize, m_w: usize, m_u: usize, seed: u64) -> Result<PlantModel> {
    let opts = GenOptions::new(SystemKind::Annihilation).hurwitz(true);
    let gen = random_pr_system(n, m_w + m_u, seed, opts)?;
    let (f, g, h, _) = gen.system.matrices();
    PlantModel::new(
        SystemKind::Annihilation,
        f.clone(),
        g.columns(0, m_w).into_owned(),
        g.columns(m_w, m_u).into_owned(),
        h.rows(0, m_w).into_owned(),
        eye(m_w),
    )
}

/// Haar-like random unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(n: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0417_a5e1);
    gaussian(&mut rng, n, n).qr().q()
}

/// Random dynamic controller completed to physical realizability by noise
/// synthesis. `F_c` is Hurwitz and `H_c` is scaled so that
/// `‖H_c (sI - F_c)⁻¹‖∞` lies in `[0.2, 0.9]`.
pub fn random_challenger(n_c: usize, m_y: usize, m_u: usize, seed: u64) -> Result<ControllerModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..CHALLENGER_ATTEMPTS {
        let f_c = gaussian(&mut rng, n_c, n_c).scale(0.5) - eye(n_c).scale(rng.random_range(0.8..2.0));
        if spectral_abscissa(&f_c)? >= -1e-3 {
            continue;
        }
        let h_raw = gaussian(&mut rng, m_u, n_c);
        let tf = StateSpaceTF::new(f_c.clone(), eye(n_c), h_raw.clone(), CMat::zeros(m_u, n_c))?;
        let gamma = hinf_norm(&tf, 1e-9)?.value;
        if gamma <= 1e-9 {
            continue;
        }
        let h_c = h_raw.scale(rng.random_range(0.2..0.9) / gamma);
        let g_cy = gaussian(&mut rng, n_c, m_y).scale(rng.random_range(0.0..0.5));
        if let Ok(s) = synth_noise_annihilation(&f_c, &g_cy, &h_c) {
            return Ok(s.controller);
        }
    }
    Err(Error::Generation(format!(
        "no realizable challenger with n_c={n_c}, m_y={m_y}, m_u={m_u} after {CHALLENGER_ATTEMPTS} draws (seed {seed})"
    )))
}

/// Which instances a suite runs.
#[derive(Debug, Clone, Copy)]
pub struct SuiteSpec {
    pub count: usize,
    pub seed: u64,
    /// `(n, m)` with `m_w = m_u = m`; `None` draws `n ≤ 4` and
    /// `m_w, m_u ≤ 3` per instance.
    pub dims: Option<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct SuiteSummary {
    pub theorem: TheoremTag,
    pub instances: usize,
    pub held: usize,
    pub failed: usize,
    /// Instances whose generation failed or violated the hypotheses.
    pub filtered: usize,
    /// Worst value of the suite's headline deviation.
    pub worst: f64,
    pub reports: Vec<TheoremReport>,
}

impl SuiteSummary {
    pub fn all_hold(&self) -> bool {
        self.failed == 0 && self.held > 0
    }

    fn from_reports(theorem: TheoremTag, reports: Vec<TheoremReport>, metric: impl Fn(&TheoremReport) -> f64) -> Self {
        let count = |o: Outcome| reports.iter().filter(|r| r.outcome == o).count();
        let worst =
            reports.iter().filter(|r| r.outcome != Outcome::HypothesisViolated).map(&metric).fold(0.0, f64::max);
        Self {
            theorem,
            instances: reports.len(),
            held: count(Outcome::Holds),
            failed: count(Outcome::Fails),
            filtered: count(Outcome::HypothesisViolated),
            worst,
            reports,
        }
    }
}

fn instance_seed(base: u64, i: usize) -> u64 {
    base.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(0x632b_e59b_d9b4_e019u64.wrapping_mul(i as u64 + 1))
}

/// `(n, m_w, m_u)` for instance `seed`.
fn instance_dims(spec: &SuiteSpec, seed: u64) -> (usize, usize, usize) {
    match spec.dims {
        Some((n, m)) => (n, m, m),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd1e5);
            (rng.random_range(1..=4), rng.random_range(1..=3), rng.random_range(1..=3))
        }
    }
}

fn generation_failure(theorem: TheoremTag, e: Error) -> TheoremReport {
    TheoremReport::violated(theorem, format!("instance generation failed: {e}"))
}

/// Zero Kalman gain over random plants, with `K_cy = 0` and three noise
/// feedthroughs `K_cw` per plant: identity, a diagonal phase and a random
/// unitary.
pub fn corollary1_suite(spec: &SuiteSpec, exec: Exec) -> SuiteSummary {
    let reports = exec.map(spec.count, |i| {
        let seed = instance_seed(spec.seed, i);
        let (n, m_w, m_u) = instance_dims(spec, seed);
        let p = match random_pr_plant(n, m_w, m_u, seed) {
            Ok(p) => p,
            Err(e) => return generation_failure(TheoremTag::C1, e),
        };
        let k_cy = CMat::zeros(m_u, m_w);
        let phase = CMat::from_fn(m_u, m_u, |r, c| {
            if r == c {
                Cx::from_polar(1.0, 1.3 * (r as f64 + 1.0))
            } else {
                Cx::new(0.0, 0.0)
            }
        });
        let mut gain: f64 = 0.0;
        let mut q: f64 = 0.0;
        let mut notes = Vec::new();
        for k_cw in [eye(m_u), phase, random_unitary(m_u, seed)] {
            match verify_zero_gain(&p, &k_cy, &k_cw) {
                Ok(r) if r.outcome == Outcome::HypothesisViolated => notes.push(r.narrative),
                Ok(r) => {
                    gain = gain.max(r.evidence("gain_norm").unwrap_or(f64::INFINITY));
                    q = q.max(r.evidence("q_minus_theta").unwrap_or(f64::INFINITY));
                }
                Err(e) => return generation_failure(TheoremTag::C1, e),
            }
        }
        if !notes.is_empty() {
            return TheoremReport::violated(TheoremTag::C1, notes.join("; "));
        }
        TheoremReport::from_evidence(
            TheoremTag::C1,
            vec![
                Evidence::bound("gain_norm", gain, super::ZERO_GAIN_TOL),
                Evidence::bound("q_minus_theta", q, super::ZERO_GAIN_TOL),
            ],
            Vec::new(),
            format!("n={n}, m_w={m_w}, m_u={m_u}: max gain {gain:.3e}, max|Q - Θ| {q:.3e}"),
        )
    });
    SuiteSummary::from_reports(TheoremTag::C1, reports, |r| r.evidence("gain_norm").unwrap_or(0.0))
}

/// Trivial-controller H∞ optimality over random plants, each with a random
/// physical selector and `challengers` random realizable controllers.
pub fn theorem6_suite(spec: &SuiteSpec, challengers: usize, exec: Exec) -> SuiteSummary {
    let reports = exec.map(spec.count, |i| {
        let seed = instance_seed(spec.seed, i);
        let (n, m_w, m_u) = instance_dims(spec, seed);
        let p = match random_pr_plant(n, m_w, m_u, seed) {
            Ok(p) => p,
            Err(e) => return generation_failure(TheoremTag::T6, e),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005e_1ec7);
        let outputs = m_w + m_u;
        let mut picks: Vec<usize> = (0..outputs).filter(|_| rng.random_bool(0.6)).collect();
        if picks.is_empty() {
            picks.push(rng.random_range(0..outputs));
        }
        let l = CMat::from_fn(picks.len(), outputs, |r, c| Cx::new(if picks[r] == c { 1.0 } else { 0.0 }, 0.0));
        let cs: Vec<ControllerModel> = (0..challengers)
            .filter_map(|k| random_challenger(1 + k % 2, m_w, m_u, seed.wrapping_add(k as u64 + 1)).ok())
            .collect();
        match verify_trivial_hinf(&p, &l, &cs) {
            Ok(mut r) => {
                let missing = challengers - cs.len();
                if missing > 0 {
                    r.skipped.push(format!("{missing} challengers could not be generated"));
                }
                r
            }
            Err(e) => generation_failure(TheoremTag::T6, e),
        }
    });
    SuiteSummary::from_reports(TheoremTag::T6, reports, |r| {
        r.evidence.iter().filter(|e| e.name.ends_with("norm deviation")).map(|e| e.value).fold(0.0, f64::max)
    })
}

/// Static LQG optimality over random plants with cost `Z = C x` for a
/// random single-row `C`, each against `dynamic` random challengers.
pub fn theorem5_suite(spec: &SuiteSpec, dynamic: usize, exec: Exec) -> SuiteSummary {
    let reports = exec.map(spec.count, |i| {
        let seed = instance_seed(spec.seed, i);
        let (n, m_w, m_u) = instance_dims(spec, seed);
        let plant = random_pr_plant(n, m_w, m_u, seed).and_then(|p| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc057);
            let c = gaussian(&mut rng, 1, n);
            p.with_cost(CostOutput::new(c, CMat::zeros(1, m_u)))
        });
        let p = match plant {
            Ok(p) => p,
            Err(e) => return generation_failure(TheoremTag::T5, e),
        };
        // The inner sweeps stay sequential; the suite already fans out.
        let opts = StaticLqgOptions { dynamic, seed, exec: Exec::Sequential };
        verify_static_lqg_with(&p, &opts).unwrap_or_else(|e| generation_failure(TheoremTag::T5, e))
    });
    SuiteSummary::from_reports(TheoremTag::T5, reports, |r| r.evidence("static_excess").unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmat::max_diff;

    #[test]
    fn random_plant_is_augmentable() {
        let p = random_pr_plant(2, 1, 2, 3).unwrap();
        assert!(crate::feedback::augment_plant(&p).unwrap().verdict.realizable);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let u = random_unitary(3, 9);
        assert!(max_diff(&(&u * u.adjoint()), &eye(3)) < 1e-12);
    }

    #[test]
    fn challengers_are_realizable() {
        for seed in 0..5 {
            let c = random_challenger(2, 1, 1, seed).unwrap();
            assert!(crate::feedback::augment_controller(&c).unwrap().verdict.realizable);
        }
    }

    #[test]
    fn small_suites_hold() {
        let spec = SuiteSpec { count: 4, seed: 11, dims: None };
        let c1 = corollary1_suite(&spec, Exec::default());
        assert!(c1.all_hold(), "{:#?}", c1.reports);
        let t6 = theorem6_suite(&spec, 2, Exec::default());
        assert!(t6.all_hold(), "{:#?}", t6.reports);
        let t5 = theorem5_suite(&SuiteSpec { count: 2, ..spec }, 3, Exec::default());
        assert!(t5.all_hold(), "{:#?}", t5.reports);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let spec = SuiteSpec { count: 6, seed: 5, dims: Some((2, 1)) };
        let a = corollary1_suite(&spec, Exec::Sequential);
        let b = corollary1_suite(&spec, Exec::Parallel);
        assert_eq!(a.held, b.held);
        assert_eq!(a.worst, b.worst);
    }
}
