use std::path::Path;

use qlinear::feedback::{augment_controller, augment_plant, Augmentation};
use qlinear::par::Exec;
use qlinear::qsys::{check_pr_annihilation_with, check_pr_general_with, QSys, SystemKind};
use qlinear::xfer::{jj_unitary_check_with, lossless_br_check_with, FrequencyVerdict, Prong, StateSpaceTF};
use qlinear::Error;

use super::{describe_pr, load, CmdResult, Context, Failure};
use crate::format::{ControllerFile, Model};
use crate::report::{fmt_matrix, Report};

pub fn run(ctx: &Context, r: &mut Report, path: &Path, transfer: bool) -> CmdResult {
    let file = load(path)?;
    match &file.model {
        Model::System(q) => {
            let (kind, tf) = (q.kind(), q.to_tf());
            r.line(format!("{}: {} system, {} modes, {} fields", path.display(), kind.as_str(), q.modes(), q.fields()));
            let v = match q {
                QSys::General(s) => check_pr_general_with(s, &ctx.tol),
                QSys::Annihilation(s) => check_pr_annihilation_with(s, &ctx.tol),
            };
            describe_pr(r, "realizable", &v, &ctx.tol);
            if transfer {
                frequency(ctx, r, kind, &tf, q.fields())?;
            }
        }
        Model::Plant(pf) => {
            let d = pf.plant.dims();
            r.line(format!(
                "{}: {} plant, {} states, {} noise, {} inputs, {} outputs",
                path.display(),
                pf.plant.kind.as_str(),
                d.n,
                d.m_w,
                d.m_u,
                d.m_y
            ));
            augmented(ctx, r, augment_plant(&pf.plant), transfer)?;
        }
        Model::Controller(ControllerFile::Full(c)) => {
            let d = c.dims();
            r.line(format!(
                "{}: {} controller, {} states, {} noise, {} inputs, {} outputs",
                path.display(),
                c.kind.as_str(),
                d.n_c,
                d.m_wt,
                d.m_y,
                d.m_u
            ));
            augmented(ctx, r, augment_controller(c), transfer)?;
        }
        Model::Controller(ControllerFile::Triple { .. }) => {
            return Err(Failure::Input(format!(
                "{}: controller triple has no noise channels yet; run `synth` first",
                path.display()
            )))
        }
    }
    Ok(())
}

/// Realizability of a plant or controller through its augmentation.
fn augmented(ctx: &Context, r: &mut Report, aug: qlinear::Result<Augmentation>, transfer: bool) -> CmdResult {
    match aug {
        Ok(a) => {
            describe_pr(r, "realizable", &a.verdict, &ctx.tol);
            r.line(format!("augmented outputs: H̃={}", fmt_matrix(&a.h_tilde)));
            r.matrix("H_tilde", &a.h_tilde);
            if transfer {
                frequency(ctx, r, a.kind, &a.system.to_tf(), a.system.fields())?;
            }
            Ok(())
        }
        Err(Error::NotPhysicallyRealizable(v)) => {
            describe_pr(r, "realizable", &v, &ctx.tol);
            Ok(())
        }
        Err(Error::NotAugmentable { residual, detail }) => {
            r.line(format!("realizable: false, failure_reason=not-augmentable ({detail})"));
            r.residual("augmentation", residual, Some(ctx.tol.residual));
            r.verdict("realizable", false, format!("not augmentable: {detail}"));
            Ok(())
        }
        Err(e @ Error::Dimension(_)) => Err(Failure::Input(e.to_string())),
        Err(e) => Err(Failure::Verdict(format!("realizability check failed: {e}"))),
    }
}

fn prong_line(r: &mut Report, name: &str, p: &Prong) {
    r.line(format!("  {name:<10} {:<5} {}", p.status.as_str(), p.detail));
    r.residual(&format!("{name} residual"), p.residual, None);
}

fn frequency(ctx: &Context, r: &mut Report, kind: SystemKind, tf: &StateSpaceTF, fields: usize) -> CmdResult {
    let (label, v): (&str, FrequencyVerdict) = match kind {
        SystemKind::General => (
            "(J,J)-unitary",
            jj_unitary_check_with(tf, fields, &ctx.tol, Exec::default())
                .map_err(|e| Failure::Verdict(format!("(J,J)-unitary check failed: {e}")))?,
        ),
        SystemKind::Annihilation => ("lossless bounded real", lossless_br_check_with(tf, &ctx.tol, Exec::default())),
    };
    r.line(format!("{label}: {}", v.holds));
    if let Some(s) = &v.stability {
        prong_line(r, "stability", s);
    }
    prong_line(r, "algebraic", &v.algebraic);
    prong_line(r, "sampled", &v.sampled);
    if let Some(x) = &v.certificate {
        r.matrix("transfer_certificate", x);
    }
    r.verdict(
        label,
        v.holds,
        format!("algebraic {}, sampled {}", v.algebraic.status.as_str(), v.sampled.status.as_str()),
    );
    Ok(())
}
