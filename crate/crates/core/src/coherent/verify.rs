//! Verifiers for the zero-gain, static-LQG and trivial-controller H∞
//! properties of annihilation-operator plants.

use super::kalman::kalman_design;
use super::suite::{random_challenger, random_unitary};
use super::{Evidence, TheoremReport, TheoremTag};
use crate::dmat::{
    block2, eye, hcat, hermitian_sqrt, inverse, max_abs, max_diff, sigma_max, solve_lyapunov_hermitian, symmetrize,
    vcat, CMat, Cx,
};
use crate::error::{Error, Result};
use crate::feedback::{
    augment_controller, augment_plant, check_selector, close_loop, ClosedLoop, ControllerModel, PlantModel,
};
use crate::par::Exec;
use crate::qsys::{eig_sum_condition, SystemKind};
use crate::xfer::{frequency_grid, h2_norm, hinf_norm, lossless_br_check, tf_eval, NormResult, StateSpaceTF};

/// Bound on the Kalman gain and on `‖Q - Θ‖` for the zero-gain property.
pub const ZERO_GAIN_TOL: f64 = 1e-8;
/// Bound on `|‖Γ_Z‖∞ - 1|`.
const NORM_TOL: f64 = 1e-6;
/// Bound on `|σ_max(Γ_Z(iω)) - 1|` at every grid point.
const POINTWISE_TOL: f64 = 1e-7;
/// Slack allowed when comparing the best static and dynamic LQG costs.
const COST_SLACK: f64 = 1e-6;
/// Scalar values tried for each entry of `K_cy` in the static grid.
const STATIC_GRID: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
/// Above this many `K_cy` entries the static grid is replaced by random
/// samples.
const GRID_ENTRIES_MAX: usize = 2;
const RANDOM_STATIC: usize = 64;

fn require_annihilation(p: &PlantModel) -> Result<()> {
    if p.kind != SystemKind::Annihilation {
        return Err(Error::Domain("this analysis applies to annihilation-operator plants only".into()));
    }
    p.validate()
}

/// Zero Kalman gain for the plant under static feedthrough `(k_cy, k_cw)`.
///
/// The controller's static part is folded into the plant (modified form),
/// whose noise input is `[W; W̃]`. Its commutation matrix Θ solves
/// `F'Θ + ΘF'† + G'G'† = 0`; the Kalman filter built from the modified
/// plant, with the unused outputs completed as physical realizability
/// requires, must have zero gain and error covariance `Q = Θ`.
pub fn verify_zero_gain(p: &PlantModel, k_cy: &CMat, k_cw: &CMat) -> Result<TheoremReport> {
    require_annihilation(p)?;
    augment_plant(p)?;
    let d = p.dims();
    if k_cy.shape() != (d.m_u, d.m_y) || k_cw.nrows() != d.m_u {
        return Err(Error::dim(format!(
            "static feedthrough shapes: K_cy {:?} (want {}×{}), K_cw {:?} (want {} rows)",
            k_cy.shape(),
            d.m_u,
            d.m_y,
            k_cw.shape(),
            d.m_u
        )));
    }
    let f = &p.f + &p.g_u * k_cy * &p.h;
    let g_wt = &p.g_u * k_cw;
    let g = hcat(d.n, &[&(&p.g_w + &p.g_u * k_cy * &p.k), &g_wt])?;
    if !eig_sum_condition(&f) {
        return Ok(TheoremReport::violated(
            TheoremTag::C1,
            "modified plant state matrix fails the eigenvalue-sum condition; its commutation matrix is not unique",
        ));
    }
    let theta = solve_lyapunov_hermitian(&f, &symmetrize(&(&g * g.adjoint())))?;
    let theta_inv = match inverse(&theta) {
        Ok(t) => t,
        Err(_) => {
            return Ok(TheoremReport::violated(TheoremTag::C1, "modified plant commutation matrix is singular"));
        }
    };
    let h_a = vcat(d.n, &[&p.h, &(-(g_wt.adjoint() * &theta_inv))])?;
    let m_all = g.ncols();
    let l = hcat(d.m_y, &[&eye(d.m_y), &CMat::zeros(d.m_y, m_all - d.m_y)])?;
    let kalman = match kalman_design(&f, &g, &h_a, &l) {
        Ok(k) => k,
        Err(e) => {
            return Ok(TheoremReport::from_evidence(
                TheoremTag::C1,
                vec![Evidence::bound("gain_norm", f64::INFINITY, ZERO_GAIN_TOL)],
                Vec::new(),
                format!("Kalman design failed: {e}"),
            ));
        }
    };
    let q_dev = max_diff(&kalman.q, &theta);
    let evidence = vec![
        Evidence::bound("gain_norm", kalman.gain_norm, ZERO_GAIN_TOL),
        Evidence::bound("q_minus_theta", q_dev, ZERO_GAIN_TOL),
        Evidence::info("riccati_residual", kalman.riccati_residual),
        Evidence::info("k_cy_norm", sigma_max(k_cy)),
    ];
    let narrative = format!(
        "Kalman gain {:.3e}, max|Q - Θ| = {:.3e} (filter Riccati residual {:.3e})",
        kalman.gain_norm, q_dev, kalman.riccati_residual
    );
    Ok(TheoremReport::from_evidence(TheoremTag::C1, evidence, Vec::new(), narrative))
}

/// LQG cost of a closed loop: the H2 norm from all noises to the cost.
pub fn lqg_cost(cl: &ClosedLoop) -> Result<NormResult> {
    if !cl.internally_stable {
        return Err(Error::Unstable("closed loop is not internally stable".into()));
    }
    h2_norm(&cl.system)
}

#[derive(Debug, Clone, Copy)]
pub struct StaticLqgOptions {
    /// Number of random dynamic challengers to try.
    pub dynamic: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for StaticLqgOptions {
    fn default() -> Self {
        Self { dynamic: 20, seed: 0, exec: Exec::default() }
    }
}

/// Static `K_cy` samples: a full grid for at most two entries, otherwise
/// zero plus seeded random draws scaled to `‖K_cy‖ < 1`.
fn static_k_cy(m_u: usize, m_y: usize, seed: u64) -> Vec<CMat> {
    let entries = m_u * m_y;
    if entries <= GRID_ENTRIES_MAX {
        let mut out = Vec::new();
        let total = STATIC_GRID.len().pow(entries as u32);
        for mut code in 0..total {
            let vals: Vec<f64> = (0..entries)
                .map(|_| {
                    let v = STATIC_GRID[code % STATIC_GRID.len()];
                    code /= STATIC_GRID.len();
                    v
                })
                .collect();
            out.push(crate::dmat::from_real(m_u, m_y, &vals));
        }
        out
    } else {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x57a7_1c00);
        let mut out = vec![CMat::zeros(m_u, m_y)];
        for _ in 1..RANDOM_STATIC {
            let k = CMat::from_fn(m_u, m_y, |_, _| Cx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let s = sigma_max(&k);
            out.push(if s > 0.0 { k.scale(rng.random_range(0.0..1.0) / s) } else { k });
        }
        out
    }
}

/// Completes `K_cy` to a static controller `[K_cw, K_cy]` with orthonormal
/// rows, `K_cw = (I - K_cy K_cy†)^{1/2}`. `None` when `‖K_cy‖ > 1`.
fn static_controller(k_cy: &CMat) -> Option<ControllerModel> {
    let m_u = k_cy.nrows();
    let rest = eye(m_u) - k_cy * k_cy.adjoint();
    let k_cw = hermitian_sqrt(&symmetrize(&rest)).ok()?;
    ControllerModel::static_gain(SystemKind::Annihilation, k_cw, k_cy.clone()).ok()
}

fn check_cost(p: &PlantModel) -> Result<()> {
    let cost = p.cost.as_ref().ok_or_else(|| Error::Domain("LQG analysis needs a plant cost output".into()))?;
    if max_abs(&cost.d) > 0.0 || cost.e.as_ref().is_some_and(|e| max_abs(e) > 0.0) {
        return Err(Error::Domain(
            "LQG cost must be strictly proper (D = 0): a physically realizable controller always feeds noise through to U".into(),
        ));
    }
    Ok(())
}

/// Static LQG optimality with the default options.
pub fn verify_static_lqg(p: &PlantModel) -> Result<TheoremReport> {
    verify_static_lqg_with(p, &StaticLqgOptions::default())
}

/// Samples static controllers (a `K_cy` grid completed to orthonormal rows)
/// and random dynamic realizable controllers. Holds when the zero-gain
/// property holds for every tested noise feedthrough and the best static
/// cost is within `1e-6` of the best dynamic one.
pub fn verify_static_lqg_with(p: &PlantModel, opts: &StaticLqgOptions) -> Result<TheoremReport> {
    require_annihilation(p)?;
    check_cost(p)?;
    if let Err(e) = augment_plant(p) {
        return match e {
            Error::NotAugmentable { .. } | Error::NotPhysicallyRealizable(_) => {
                Ok(TheoremReport::violated(TheoremTag::T5, format!("plant is not physically realizable: {e}")))
            }
            other => Err(other),
        };
    }
    let d = p.dims();
    if d.m_u == 0 {
        let cost = lqg_cost(&close_loop(p, &ControllerModel::trivial(SystemKind::Annihilation, 0, d.m_y))?)?;
        return Ok(TheoremReport::from_evidence(
            TheoremTag::T5,
            vec![Evidence::info("min_static_cost", cost.value)],
            Vec::new(),
            "no control input: every controller gives the same cost".into(),
        ));
    }

    let mut evidence = Vec::new();
    let mut skipped = Vec::new();

    // (a) zero gain for each noise feedthrough choice.
    let zero_ky = CMat::zeros(d.m_u, d.m_y);
    let phases = CMat::from_fn(d.m_u, d.m_u, |i, j| {
        if i == j {
            Cx::from_polar(1.0, 0.7 * (i as f64 + 1.0))
        } else {
            Cx::new(0.0, 0.0)
        }
    });
    let k_cws = [eye(d.m_u), phases, random_unitary(d.m_u, opts.seed)];
    let mut max_gain: f64 = 0.0;
    let mut max_q: f64 = 0.0;
    for k_cw in &k_cws {
        let r = verify_zero_gain(p, &zero_ky, k_cw)?;
        if !r.holds() && r.outcome != super::Outcome::Fails {
            skipped.push(format!("zero-gain check: {}", r.narrative));
            continue;
        }
        max_gain = max_gain.max(r.evidence("gain_norm").unwrap_or(f64::INFINITY));
        max_q = max_q.max(r.evidence("q_minus_theta").unwrap_or(f64::INFINITY));
    }
    evidence.push(Evidence::bound("max_gain_norm", max_gain, ZERO_GAIN_TOL));
    evidence.push(Evidence::bound("max_q_minus_theta", max_q, ZERO_GAIN_TOL));

    // (b) best static vs best dynamic cost.
    let statics = static_k_cy(d.m_u, d.m_y, opts.seed);
    let static_costs: Vec<std::result::Result<f64, String>> = opts.exec.map_slice(&statics, |k_cy| {
        let c = static_controller(k_cy).ok_or_else(|| "‖K_cy‖ > 1, no realizable completion".to_string())?;
        let cl = close_loop(p, &c).map_err(|e| e.to_string())?;
        lqg_cost(&cl).map(|n| n.value).map_err(|e| e.to_string())
    });
    let dynamic_costs: Vec<std::result::Result<f64, String>> = opts.exec.map(opts.dynamic, |i| {
        let seed = opts.seed.wrapping_mul(0x2545_f491_4f6c_dd1d).wrapping_add(i as u64);
        let c = random_challenger(1 + i % 2, d.m_y, d.m_u, seed).map_err(|e| e.to_string())?;
        let cl = close_loop(p, &c).map_err(|e| e.to_string())?;
        lqg_cost(&cl).map(|n| n.value).map_err(|e| e.to_string())
    });
    let mut collect = |label: &str, costs: Vec<std::result::Result<f64, String>>| {
        let mut best = f64::INFINITY;
        let mut used = 0usize;
        for (i, c) in costs.into_iter().enumerate() {
            match c {
                Ok(v) => {
                    best = best.min(v);
                    used += 1;
                }
                Err(reason) => skipped.push(format!("{label} {i}: {reason}")),
            }
        }
        (best, used)
    };
    let (best_static, n_static) = collect("static", static_costs);
    let (best_dynamic, n_dynamic) = collect("dynamic", dynamic_costs);
    evidence.push(Evidence::info("min_static_cost", best_static));
    evidence.push(Evidence::info("min_dynamic_cost", best_dynamic));
    evidence.push(Evidence::info("static_tested", n_static as f64));
    evidence.push(Evidence::info("dynamic_tested", n_dynamic as f64));
    let excess = if n_dynamic == 0 { 0.0 } else { (best_static - best_dynamic).max(0.0) };
    evidence.push(Evidence::bound("static_excess", excess, COST_SLACK));
    let narrative = format!(
        "max Kalman gain {max_gain:.3e}; best static cost {best_static:.6} over {n_static} controllers, best dynamic {best_dynamic:.6} over {n_dynamic}"
    );
    Ok(TheoremReport::from_evidence(TheoremTag::T5, evidence, skipped, narrative))
}

/// The closed loop as a field system: inputs `[W; W̃]`, outputs `[Ũ; Ỹ]`
/// where `Ũ` are the controller's unused outputs and `Ỹ` the plant's.
#[derive(Debug, Clone)]
pub struct PhysicalLoop {
    pub tf: StateSpaceTF,
    /// Position in `Ũ` of the channel that carries `Y` through the
    /// controller; the plant output `Y_i` maps to `Ũ_{y_offset + i}`.
    pub y_offset: usize,
    pub m_y: usize,
    pub m_u: usize,
}

impl PhysicalLoop {
    /// Lifts a selector over `[Y; Ỹ]` to the loop outputs `[Ũ; Ỹ]`.
    pub fn lift_selector(&self, l: &CMat) -> Result<CMat> {
        if l.ncols() != self.m_y + self.m_u {
            return Err(Error::dim(format!(
                "selector has {} columns, plant has {} physical outputs",
                l.ncols(),
                self.m_y + self.m_u
            )));
        }
        let outputs = self.tf.output_dim();
        let u_tilde = outputs - self.m_u;
        Ok(CMat::from_fn(l.nrows(), outputs, |i, j| {
            if j >= self.y_offset && j < self.y_offset + self.m_y {
                l[(i, j - self.y_offset)]
            } else if j >= u_tilde {
                l[(i, self.m_y + j - u_tilde)]
            } else {
                Cx::new(0.0, 0.0)
            }
        }))
    }
}

/// Interconnects a realizable plant and controller through their fields.
pub fn physical_loop(p: &PlantModel, c: &ControllerModel) -> Result<PhysicalLoop> {
    require_annihilation(p)?;
    let ap = augment_plant(p)?;
    let ac = augment_controller(c)?;
    let (pd, cd) = (p.dims(), c.dims());
    let (n, nc) = (pd.n, cd.n_c);
    let kp_w = ap.k_tilde.columns(0, pd.m_w).into_owned();
    let kp_u = ap.k_tilde.columns(pd.m_w, pd.m_u).into_owned();
    let kc_w = ac.k_tilde.columns(0, cd.m_wt).into_owned();
    let kc_y = ac.k_tilde.columns(cd.m_wt, cd.m_y).into_owned();
    let a = block2(&(&p.f + &p.g_u * &c.k_cy * &p.h), &(&p.g_u * &c.h_c), &(&c.g_cy * &p.h), &c.f_c)?;
    let b = block2(&(&p.g_w + &p.g_u * &c.k_cy * &p.k), &(&p.g_u * &c.k_cw), &(&c.g_cy * &p.k), &c.g_cw)?;
    let cm = block2(&(&kc_y * &p.h), &ac.h_tilde, &(&ap.h_tilde + &kp_u * &c.k_cy * &p.h), &(&kp_u * &c.h_c))?;
    let dm = block2(&(&kc_y * &p.k), &kc_w, &(&kp_w + &kp_u * &c.k_cy * &p.k), &(&kp_u * &c.k_cw))?;
    debug_assert_eq!(a.nrows(), n + nc);
    Ok(PhysicalLoop { tf: StateSpaceTF::new(a, b, cm, dm)?, y_offset: cd.m_wt - cd.m_u, m_y: pd.m_y, m_u: pd.m_u })
}

/// Trivial-controller H∞ optimality for the physical cost `Z = L [Y; Ỹ]`.
///
/// `l` selects distinct physical outputs (rows are distinct standard unit
/// vectors). The trivial controller and each challenger are connected to
/// the plant; challengers that are not realizable or give an unstable loop
/// are skipped. Holds when every loop is lossless bounded real and every
/// `‖L Γ‖∞` is 1, pointwise on the frequency grid as well.
pub fn verify_trivial_hinf(p: &PlantModel, l: &CMat, challengers: &[ControllerModel]) -> Result<TheoremReport> {
    require_annihilation(p)?;
    check_selector(l)?;
    if let Err(e) = augment_plant(p) {
        return match e {
            Error::NotAugmentable { .. } | Error::NotPhysicallyRealizable(_) => {
                Ok(TheoremReport::violated(TheoremTag::T6, format!("plant is not physically realizable: {e}")))
            }
            other => Err(other),
        };
    }
    let d = p.dims();
    let mut named: Vec<(String, &ControllerModel)> = Vec::new();
    let trivial = ControllerModel::trivial(SystemKind::Annihilation, d.m_u, d.m_y);
    named.push(("trivial".into(), &trivial));
    for (i, c) in challengers.iter().enumerate() {
        named.push((format!("challenger {i}"), c));
    }

    let mut evidence = Vec::new();
    let mut skipped = Vec::new();
    let mut worst_norm: f64 = 0.0;
    for (name, c) in named {
        let lp = match physical_loop(p, c) {
            Ok(lp) => lp,
            Err(e) if name == "trivial" => return Err(e),
            Err(e) => {
                skipped.push(format!("{name}: not physically realizable ({e})"));
                continue;
            }
        };
        if !lp.tf.is_hurwitz() {
            skipped.push(format!("{name}: closed loop is not internally stable"));
            continue;
        }
        let lz = lp.lift_selector(l)?;
        let (a, b, c_out, d_out) = (lp.tf.a().clone(), lp.tf.b().clone(), &lz * lp.tf.c(), &lz * lp.tf.d());
        let gz = StateSpaceTF::new(a, b, c_out, d_out)?;
        let norm = hinf_norm(&gz, 1e-9)?;
        let grid = frequency_grid(gz.a());
        let pointwise = Exec::default().max_over(&grid, |&w| match tf_eval(&gz, Cx::new(0.0, w)) {
            Ok(m) => (sigma_max(&m) - 1.0).abs(),
            Err(_) => f64::INFINITY,
        });
        let lossless = lossless_br_check(&lp.tf).holds;
        worst_norm = worst_norm.max((norm.value - 1.0).abs());
        evidence.push(Evidence::bound(format!("{name} norm deviation"), (norm.value - 1.0).abs(), NORM_TOL));
        evidence.push(Evidence::bound(format!("{name} pointwise deviation"), pointwise, POINTWISE_TOL));
        evidence.push(Evidence::bound(format!("{name} lossless failure"), if lossless { 0.0 } else { 1.0 }, 0.0));
    }
    let tested = evidence.len() / 3;
    let narrative = format!("{tested} loops tested ({} skipped); max |‖Γ_Z‖∞ - 1| = {worst_norm:.3e}", skipped.len());
    Ok(TheoremReport::from_evidence(TheoremTag::T6, evidence, skipped, narrative))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmat::from_real;
    use crate::feedback::{synth_noise_annihilation, CostOutput};

    fn scalar(v: f64) -> CMat {
        from_real(1, 1, &[v])
    }

    fn cavity() -> PlantModel {
        PlantModel::new(SystemKind::Annihilation, scalar(-1.0), scalar(-1.0), scalar(-1.0), scalar(1.0), scalar(1.0))
            .unwrap()
    }

    fn cavity_with_cost() -> PlantModel {
        cavity().with_cost(CostOutput::new(scalar(1.0), scalar(0.0))).unwrap()
    }

    #[test]
    fn cavity_zero_gain() {
        let r = verify_zero_gain(&cavity(), &scalar(0.0), &scalar(1.0)).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(r.evidence("gain_norm").unwrap() <= 1e-12);
    }

    #[test]
    fn broken_plant_is_not_augmentable() {
        let mut p = cavity();
        p.g_w[(0, 0)] += Cx::new(0.1, 0.0);
        assert!(matches!(verify_zero_gain(&p, &scalar(0.0), &scalar(1.0)), Err(Error::NotAugmentable { .. })));
    }

    #[test]
    fn measurement_feedback_breaks_zero_gain() {
        // A static beam splitter reflecting part of Y back into the plant
        // changes the dynamics; the filter then extracts information.
        let k = 0.5f64;
        let r = verify_zero_gain(&cavity(), &scalar(k), &scalar((1.0 - k * k).sqrt())).unwrap();
        assert!(!r.holds());
        let expected = (1.0 - k * k).sqrt() - 1.0 - k;
        let gain = r.evidence("gain_norm").unwrap();
        assert!((gain - expected.abs()).abs() < 1e-10, "gain {gain}, expected {}", expected.abs());
    }

    #[test]
    fn cavity_lqg_cost_is_one() {
        let cl = close_loop(&cavity_with_cost(), &ControllerModel::trivial(SystemKind::Annihilation, 1, 1)).unwrap();
        assert!((lqg_cost(&cl).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lqg_cost_of_zero_cost_is_zero() {
        let p = cavity().with_cost(CostOutput::new(scalar(0.0), scalar(0.0))).unwrap();
        let cl = close_loop(&p, &ControllerModel::trivial(SystemKind::Annihilation, 1, 1)).unwrap();
        assert_eq!(lqg_cost(&cl).unwrap().value, 0.0);
    }

    #[test]
    fn static_k_cy_changes_cost_in_closed_form() {
        // Loop pole is -1 - k and both noise columns have weight
        // (1 + k)² + (1 - k²) = 2 (1 + k), so the cost is 1 for |k| < 1.
        for k in [-0.5, 0.0, 0.5] {
            let c = static_controller(&scalar(k)).unwrap();
            let cl = close_loop(&cavity_with_cost(), &c).unwrap();
            assert!((lqg_cost(&cl).unwrap().value - 1.0).abs() < 1e-12, "k = {k}");
        }
        // Full reflection k = 1: K_cw = 0, pole -2, noise weight 4.
        let c = static_controller(&scalar(1.0)).unwrap();
        let cl = close_loop(&cavity_with_cost(), &c).unwrap();
        assert!((lqg_cost(&cl).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cavity_static_lqg_holds() {
        let r = verify_static_lqg(&cavity_with_cost()).unwrap();
        assert!(r.holds(), "{r:#?}");
    }

    #[test]
    fn uncontrolled_plant_is_degenerate_pass() {
        let r2 = 2f64.sqrt();
        let p = PlantModel::new(
            SystemKind::Annihilation,
            scalar(-1.0),
            scalar(-r2),
            CMat::zeros(1, 0),
            scalar(r2),
            scalar(1.0),
        )
        .unwrap()
        .with_cost(CostOutput::new(scalar(1.0), CMat::zeros(1, 0)))
        .unwrap();
        assert!(verify_static_lqg(&p).unwrap().holds());
    }

    #[test]
    fn non_pr_plant_violates_hypothesis() {
        let mut p = cavity_with_cost();
        p.h = scalar(3.0);
        let r = verify_static_lqg(&p).unwrap();
        assert_eq!(r.outcome, super::super::Outcome::HypothesisViolated);
    }

    #[test]
    fn trivial_controller_norm_is_one() {
        let r = verify_trivial_hinf(&cavity(), &from_real(1, 2, &[1.0, 0.0]), &[]).unwrap();
        assert!(r.holds(), "{r:#?}");
        assert!(r.evidence("trivial norm deviation").unwrap() < 1e-6);
    }

    #[test]
    fn synthesized_challenger_norm_is_one() {
        let s = synth_noise_annihilation(&scalar(-1.0), &scalar(0.0), &scalar(1.0)).unwrap();
        let r = verify_trivial_hinf(&cavity(), &from_real(1, 2, &[1.0, 0.0]), &[s.controller]).unwrap();
        assert!(r.holds(), "{r:#?}");
        assert!(r.skipped.is_empty());
    }

    #[test]
    fn non_pr_challenger_is_skipped() {
        let bad = ControllerModel::static_gain(SystemKind::Annihilation, scalar(1.0), scalar(0.5)).unwrap();
        let r = verify_trivial_hinf(&cavity(), &from_real(1, 2, &[0.0, 1.0]), &[bad]).unwrap();
        assert!(r.holds());
        assert_eq!(r.skipped.len(), 1);
    }

    #[test]
    fn trivial_loop_outputs_match_plant_outputs() {
        let lp = physical_loop(&cavity(), &ControllerModel::trivial(SystemKind::Annihilation, 1, 1)).unwrap();
        assert_eq!(lp.y_offset, 0);
        // Ũ = Y = x + W and Ỹ = H̃ x + W̃.
        assert_eq!(lp.tf.c(), &from_real(2, 1, &[1.0, 1.0]));
        assert_eq!(lp.tf.d(), &eye(2));
    }
}
