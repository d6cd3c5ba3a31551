use std::path::Path;

use qlinear::coherent::{
    corollary1_suite, random_challenger, random_unitary, theorem5_suite, theorem6_suite, verify_static_lqg_with,
    verify_trivial_hinf, verify_zero_gain, Outcome, StaticLqgOptions, SuiteSpec, SuiteSummary, TheoremReport,
    ZERO_GAIN_TOL,
};
use qlinear::dmat::{eye, CMat};
use qlinear::feedback::{augment_plant, ControllerModel, PlantModel};
use qlinear::par::Exec;
use qlinear::qsys::SystemKind;
use qlinear::{Cx, Error};

use super::{load, CmdResult, Context, Failure};
use crate::format::{Model, PlantFile};
use crate::report::Report;
use crate::Theorem;

pub struct Request<'a> {
    pub theorem: Theorem,
    pub plant: Option<&'a Path>,
    pub random: Option<&'a [u64]>,
    pub challengers: usize,
    pub dynamic: usize,
}

/// Bound on `|‖Γ_Z‖∞ - 1|` quoted in summaries (the verifier's own bound).
const NORM_EPS: f64 = 1e-6;

pub fn run(ctx: &Context, r: &mut Report, req: &Request<'_>) -> CmdResult {
    match (req.plant, req.random) {
        (Some(path), None) => on_file(ctx, r, req, path),
        (None, Some(&[n, m, count, seed])) => on_suite(r, req, n, m, count, seed),
        (None, Some(_)) => Err(Failure::Input("--random takes four values: N M COUNT SEED".into())),
        (None, None) => Err(Failure::Input("give a plant file or --random N M COUNT SEED".into())),
        (Some(_), Some(_)) => Err(Failure::Input("give either a plant file or --random, not both".into())),
    }
}

fn on_suite(r: &mut Report, req: &Request<'_>, n: u64, m: u64, count: u64, seed: u64) -> CmdResult {
    if n == 0 || m == 0 || count == 0 {
        return Err(Failure::Input("--random needs positive N, M and COUNT".into()));
    }
    let spec = SuiteSpec { count: count as usize, seed, dims: Some((n as usize, m as usize)) };
    // The suite seed is part of --random; echo it as the report seed.
    r.seed = seed;
    let exec = Exec::default();
    let summary = match req.theorem {
        Theorem::C1 => corollary1_suite(&spec, exec),
        Theorem::T6 => theorem6_suite(&spec, req.challengers, exec),
        Theorem::T5 => theorem5_suite(&spec, req.dynamic, exec),
    };
    for (i, rep) in summary.reports.iter().enumerate() {
        r.line(format!("[{i:>3}] {:<19} {}", rep.outcome.as_str(), rep.narrative));
        for s in &rep.skipped {
            r.line(format!("      skipped: {s}"));
        }
    }
    summarize(r, req.theorem, &summary);
    Ok(())
}

fn summarize(r: &mut Report, theorem: Theorem, s: &SuiteSummary) {
    let tested = s.instances - s.filtered;
    let headline = match theorem {
        Theorem::C1 => format!("{}/{tested} zero Kalman gain (max ‖K_g‖ = {:.0e})", s.held, s.worst),
        Theorem::T6 => format!(
            "{}/{tested} trivial controller H∞ optimal: norms ∈ [1−ε, 1+ε], ε = {NORM_EPS:.0e} (max |‖Γ_Z‖∞ − 1| = {:.0e})",
            s.held, s.worst
        ),
        Theorem::T5 => format!(
            "{}/{tested} static LQG optimal (max static excess = {:.0e})",
            s.held, s.worst
        ),
    };
    r.line(headline.clone());
    if s.filtered > 0 {
        r.line(format!("skipped: {} instances violate the hypotheses", s.filtered));
    }
    r.residual("worst", s.worst, None);
    r.verdict(
        theorem_name(theorem),
        s.failed == 0 && s.held > 0,
        format!("{} held, {} failed, {} skipped", s.held, s.failed, s.filtered),
    );
}

fn theorem_name(t: Theorem) -> &'static str {
    match t {
        Theorem::T5 => "T5",
        Theorem::C1 => "C1",
        Theorem::T6 => "T6",
    }
}

fn on_file(ctx: &Context, r: &mut Report, req: &Request<'_>, path: &Path) -> CmdResult {
    let pf = match load(path)?.model {
        Model::Plant(pf) => pf,
        _ => return Err(Failure::Input(format!("{}: verify needs a plant file", path.display()))),
    };
    let p = &pf.plant;
    if p.kind != SystemKind::Annihilation {
        return skip(r, req.theorem, "plant is not an annihilation-operator plant");
    }
    match augment_plant(p) {
        Ok(a) if a.verdict.realizable => {}
        Ok(a) => {
            return skip(r, req.theorem, &format!("plant not physically realizable ({})", a.verdict.reason_text()))
        }
        Err(Error::NotAugmentable { detail, .. }) => {
            return skip(r, req.theorem, &format!("plant not physically realizable (not augmentable: {detail})"))
        }
        Err(Error::NotPhysicallyRealizable(v)) => {
            return skip(r, req.theorem, &format!("plant not physically realizable ({})", v.reason_text()))
        }
        Err(e) => return Err(Failure::Verdict(format!("augmentation failed: {e}"))),
    }
    match req.theorem {
        Theorem::C1 => zero_gain(ctx, r, p),
        Theorem::T6 => trivial_hinf(ctx, r, req, &pf),
        Theorem::T5 => static_lqg(ctx, r, req, p),
    }
}

fn skip(r: &mut Report, theorem: Theorem, reason: &str) -> CmdResult {
    r.line(format!("skipped: {reason}"));
    r.verdict(theorem_name(theorem), false, format!("skipped: {reason}"));
    Ok(())
}

fn evidence(r: &mut Report, rep: &TheoremReport, prefix: &str) {
    for e in &rep.evidence {
        let name = if prefix.is_empty() { e.name.clone() } else { format!("{prefix} {}", e.name) };
        r.residual(&name, e.value, e.tolerance);
    }
    for s in &rep.skipped {
        r.line(format!("  skipped: {s}"));
    }
}

fn verifier_error(e: Error) -> Failure {
    match e {
        Error::Domain(msg) | Error::Dimension(msg) => Failure::Input(msg),
        other => Failure::Verdict(format!("verification failed: {other}")),
    }
}

/// Zero gain with `K_cy = 0` and three unitary noise feedthroughs.
fn zero_gain(ctx: &Context, r: &mut Report, p: &PlantModel) -> CmdResult {
    let d = p.dims();
    let phase = CMat::from_fn(d.m_u, d.m_u, |i, j| {
        if i == j {
            Cx::from_polar(1.0, 1.3 * (i as f64 + 1.0))
        } else {
            Cx::new(0.0, 0.0)
        }
    });
    let cases =
        [("K_cw=I", eye(d.m_u)), ("K_cw=phase", phase), ("K_cw=random unitary", random_unitary(d.m_u, ctx.seed))];
    let k_cy = CMat::zeros(d.m_u, d.m_y);
    let mut held = 0;
    let mut worst: f64 = 0.0;
    for (name, k_cw) in &cases {
        let rep = verify_zero_gain(p, &k_cy, k_cw).map_err(verifier_error)?;
        r.line(format!("{name}: {} ({})", rep.outcome.as_str(), rep.narrative));
        evidence(r, &rep, "");
        worst = worst.max(rep.evidence("gain_norm").unwrap_or(f64::INFINITY));
        held += usize::from(rep.holds());
    }
    r.line(format!("{held}/{} zero Kalman gain (max ‖K_g‖ = {worst:.0e}, tol {ZERO_GAIN_TOL:.0e})", cases.len()));
    r.verdict("C1", held == cases.len(), format!("{held}/{} held", cases.len()));
    Ok(())
}

fn trivial_hinf(ctx: &Context, r: &mut Report, req: &Request<'_>, pf: &PlantFile) -> CmdResult {
    let Some(l) = &pf.selector else {
        return Err(Failure::Input("T6 needs a plant with a physical output selector".into()));
    };
    let d = pf.plant.dims();
    let mut challengers: Vec<ControllerModel> = Vec::new();
    for k in 0..req.challengers {
        let seed = ctx.seed.wrapping_add(k as u64 + 1);
        match random_challenger(1 + k % 2, d.m_y, d.m_u, seed) {
            Ok(c) => challengers.push(c),
            Err(e) => r.line(format!("  skipped: challenger {k} could not be generated ({e})")),
        }
    }
    let rep = verify_trivial_hinf(&pf.plant, l, &challengers).map_err(verifier_error)?;
    r.line(format!("T6: {} ({})", rep.outcome.as_str(), rep.narrative));
    evidence(r, &rep, "");
    let loops = rep.evidence.iter().filter(|e| e.name.ends_with("norm deviation")).count();
    let worst = rep.evidence.iter().filter(|e| e.name.ends_with("norm deviation")).map(|e| e.value).fold(0.0, f64::max);
    let inside = if rep.holds() { "∈" } else { "∉" };
    r.line(format!("{loops} loops: norms {inside} [1−ε, 1+ε], ε = {NORM_EPS:.0e} (max |‖Γ_Z‖∞ − 1| = {worst:.0e})"));
    r.verdict("T6", rep.holds(), rep.narrative.clone());
    Ok(())
}

fn static_lqg(ctx: &Context, r: &mut Report, req: &Request<'_>, p: &PlantModel) -> CmdResult {
    let opts = StaticLqgOptions { dynamic: req.dynamic, seed: ctx.seed, exec: Exec::default() };
    let rep = verify_static_lqg_with(p, &opts).map_err(verifier_error)?;
    if rep.outcome == Outcome::HypothesisViolated {
        return skip(r, req.theorem, &rep.narrative);
    }
    r.line(format!("T5: {} ({})", rep.outcome.as_str(), rep.narrative));
    evidence(r, &rep, "");
    r.verdict("T5", rep.holds(), rep.narrative.clone());
    Ok(())
}
