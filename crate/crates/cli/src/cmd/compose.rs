use std::path::Path;

use qlinear::coherent::{lqg_cost, physical_loop};
use qlinear::dmat::{spectral_abscissa, CMat};
use qlinear::feedback::{close_loop, ClosedLoop, ControllerModel, PlantModel};
use qlinear::qsys::SystemKind;
use qlinear::xfer::{hinf_norm, StateSpaceTF};
use qlinear::Error;

use super::{emit, load, CmdResult, Context, Failure};
use crate::format::{ControllerFile, Model, PlantFile, SystemFile};
use crate::report::{fmt_cx, fmt_num, Report};

pub struct Request<'a> {
    pub plant: &'a Path,
    pub controller: &'a Path,
    pub h2: bool,
    pub hinf: bool,
    pub emit: Option<&'a Path>,
    pub require_stable: bool,
}

const HINF_REL_TOL: f64 = 1e-9;

fn plant_of(path: &Path) -> CmdResult<PlantFile> {
    match load(path)?.model {
        Model::Plant(p) => Ok(p),
        other => Err(Failure::Input(format!("{}: expected a plant file, found {}", path.display(), kind_of(&other)))),
    }
}

fn controller_of(path: &Path) -> CmdResult<ControllerModel> {
    match load(path)?.model {
        Model::Controller(ControllerFile::Full(c)) => Ok(c),
        Model::Controller(ControllerFile::Triple { .. }) => Err(Failure::Input(format!(
            "{}: controller triple has no noise channels yet; run `synth` first",
            path.display()
        ))),
        other => {
            Err(Failure::Input(format!("{}: expected a controller file, found {}", path.display(), kind_of(&other))))
        }
    }
}

fn kind_of(m: &Model) -> &'static str {
    match m {
        Model::System(q) => q.kind().as_str(),
        Model::Plant(_) => "plant",
        Model::Controller(_) => "controller",
    }
}

pub fn run(ctx: &Context, r: &mut Report, req: &Request<'_>) -> CmdResult {
    let pf = plant_of(req.plant)?;
    let c = controller_of(req.controller)?;
    if req.h2 && pf.plant.cost.is_none() {
        return Err(Failure::Input(format!("{}: --h2 needs a plant with a cost block", req.plant.display())));
    }
    if req.hinf && pf.plant.cost.is_none() && pf.selector.is_none() {
        return Err(Failure::Input(format!(
            "{}: --hinf needs a plant with a selector or a cost block",
            req.plant.display()
        )));
    }
    let cl = close_loop(&pf.plant, &c).map_err(|e| match e {
        Error::Dimension(msg) => Failure::Verdict(format!("plant and controller do not fit: {msg}")),
        other => Failure::Verdict(format!("cannot close the loop: {other}")),
    })?;

    r.line(format!(
        "closed loop: {} states ({} plant, {} controller)",
        cl.state_matrix().nrows(),
        cl.plant_states,
        cl.controller_states
    ));
    let spectrum: Vec<String> = cl.system.poles().iter().map(|z| fmt_cx(*z)).collect();
    r.line(format!("spectrum: {}", if spectrum.is_empty() { "(none)".into() } else { spectrum.join(", ") }));
    let abscissa = if cl.state_matrix().nrows() == 0 {
        f64::NEG_INFINITY
    } else {
        spectral_abscissa(cl.state_matrix()).map_err(|e| Failure::Verdict(e.to_string()))?
    };
    r.line(format!("spectral abscissa: {}", fmt_num(abscissa)));
    r.line(format!("internally stable: {}", cl.internally_stable));
    if req.require_stable {
        r.verdict("internally stable", cl.internally_stable, format!("spectral abscissa {abscissa:.3e}"));
    }

    if req.h2 && !cl.internally_stable {
        r.line("‖Γ_Z‖₂ = ∞ (closed loop is not internally stable)");
        r.verdict("h2", false, "closed loop is not internally stable");
    } else if req.h2 {
        match lqg_cost(&cl) {
            Ok(n) => {
                r.norm("‖Γ_Z‖₂", &n);
                r.verdict("h2", true, "finite");
            }
            Err(e) => {
                r.line(format!("‖Γ_Z‖₂: {e}"));
                r.verdict("h2", false, e.to_string());
            }
        }
    }
    if req.hinf && !cl.internally_stable {
        r.line("‖Γ_Z‖∞ = ∞ (closed loop is not internally stable)");
        r.verdict("hinf", false, "closed loop is not internally stable");
    } else if req.hinf {
        let (source, gz) = hinf_target(&pf, &c, &cl);
        match gz.and_then(|g| hinf_norm(&g, HINF_REL_TOL)) {
            Ok(n) => {
                r.norm("‖Γ_Z‖∞", &n);
                r.line(format!("  output: {source}"));
                r.verdict("hinf", true, source);
            }
            Err(e) => {
                r.line(format!("‖Γ_Z‖∞: {e} ({source})"));
                r.verdict("hinf", false, e.to_string());
            }
        }
    }
    if let Some(path) = req.emit {
        let file = closed_loop_file(&cl, req)?;
        emit(ctx, r, "closed loop", &file, Some(path))?;
    }
    Ok(())
}

/// `Z` for the H∞ norm: the physical selector on the field-level loop when
/// the plant has one, the cost output otherwise.
fn hinf_target(pf: &PlantFile, c: &ControllerModel, cl: &ClosedLoop) -> (&'static str, qlinear::Result<StateSpaceTF>) {
    match &pf.selector {
        Some(l) => {
            let gz = physical_loop(&pf.plant, c).and_then(|lp| {
                let lz = lp.lift_selector(l)?;
                StateSpaceTF::new(lp.tf.a().clone(), lp.tf.b().clone(), &lz * lp.tf.c(), &lz * lp.tf.d())
            });
            ("physical selector", gz)
        }
        None => ("cost output", Ok(cl.system.clone())),
    }
}

/// The loop `[W; W̃] → Z` as a plant with no control input.
fn closed_loop_file(cl: &ClosedLoop, req: &Request<'_>) -> CmdResult<SystemFile> {
    let g = &cl.system;
    let states = g.state_dim();
    let plant =
        PlantModel::new(cl.kind, g.a().clone(), g.b().clone(), CMat::zeros(states, 0), g.c().clone(), g.d().clone())
            .map_err(|e| {
                let hint = if cl.kind == SystemKind::General { " (general loops need a doubled-up cost)" } else { "" };
                Failure::Verdict(format!("closed loop cannot be written as a plant: {e}{hint}"))
            })?;
    Ok(SystemFile::new(Model::Plant(PlantFile { plant, selector: None })).with_label(format!(
        "closed loop of {} and {}",
        req.plant.display(),
        req.controller.display()
    )))
}
