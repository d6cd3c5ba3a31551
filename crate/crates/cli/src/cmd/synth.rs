use std::path::Path;

use qlinear::feedback::{synth_noise_annihilation, synth_noise_general, synth_noise_general_seeded, SynthResult};
use qlinear::qsys::SystemKind;
use qlinear::Error;

use super::{describe_pr, emit, load, CmdResult, Context, Failure};
use crate::format::{ControllerFile, Model, SystemFile};
use crate::report::{fmt_matrix, Report};

pub fn run(ctx: &Context, r: &mut Report, path: &Path, output: Option<&Path>) -> CmdResult {
    let file = load(path)?;
    let Model::Controller(ControllerFile::Triple { structure, f_c, g_cy, h_c, theta }) = file.model else {
        return Err(Failure::Input(format!(
            "{}: expected a controller triple (F_c, G_cy, H_c without noise matrices)",
            path.display()
        )));
    };
    r.line(format!("{}: {} triple, {} states", path.display(), structure.as_str(), f_c.nrows() / structure.width()));
    let result = match (structure, &theta) {
        (SystemKind::Annihilation, Some(_)) => {
            return Err(Failure::Input("matrices.Theta: annihilation synthesis solves for Θ; remove it".into()))
        }
        (SystemKind::Annihilation, None) => synth_noise_annihilation(&f_c, &g_cy, &h_c),
        (SystemKind::General, Some(t)) => synth_noise_general(&f_c, &g_cy, &h_c, t),
        (SystemKind::General, None) => {
            r.line(format!("Θ drawn from seed {}", ctx.seed));
            synth_noise_general_seeded(&f_c, &g_cy, &h_c, ctx.seed)
        }
    };
    let s = match result {
        Ok(s) => s,
        Err(Error::NotRealizable(msg)) => {
            r.verdict("synthesized", false, msg.clone());
            return Err(Failure::Verdict(msg));
        }
        Err(e @ (Error::Dimension(_) | Error::Domain(_))) => return Err(Failure::Input(e.to_string())),
        Err(e) => return Err(Failure::Verdict(format!("synthesis failed: {e}"))),
    };
    describe(ctx, r, &s);
    let out = SystemFile::new(Model::Controller(ControllerFile::Full(s.controller.clone())))
        .with_label(format!("synthesized from {}", path.display()));
    emit(ctx, r, "controller", &out, output)
}

fn describe(ctx: &Context, r: &mut Report, s: &SynthResult) {
    if let Some(n) = &s.admissibility {
        r.norm("‖H_c(sI-F_c)⁻¹‖∞", n);
    }
    r.line(format!("branch: {}", if s.zero_noise_riccati { "zero-noise Riccati" } else { "regularized Riccati" }));
    r.line(format!("extra noise channels: {}", s.extra_noise));
    r.line(format!("Θ_c={}", fmt_matrix(&s.theta)));
    r.matrix("Theta_c", &s.theta);
    r.verdict("synthesized", true, format!("{} extra noise channels", s.extra_noise));
    describe_pr(r, "augmented controller realizable", &s.verdict, &ctx.tol);
}
