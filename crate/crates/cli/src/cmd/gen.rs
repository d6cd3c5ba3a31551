use std::path::Path;

use qlinear::coherent::random_pr_plant;
use qlinear::qsys::{random_pr_system, GenOptions, SystemKind};

use super::{CmdResult, Context, Failure};
use crate::format::{Model, PlantFile, SystemFile};
use crate::report::Report;

pub struct Request<'a> {
    pub kind: SystemKind,
    pub modes: usize,
    pub fields: usize,
    pub inputs: Option<usize>,
    pub hurwitz: bool,
    pub output: Option<&'a Path>,
}

/// Builds the file; returns it as raw stdout when no output path is given.
pub fn run(ctx: &Context, r: &mut Report, req: &Request<'_>) -> CmdResult<Option<String>> {
    if req.modes == 0 || req.fields == 0 {
        return Err(Failure::Input("--modes and --fields must be positive".into()));
    }
    let file = match req.inputs {
        Some(m_u) => {
            if req.kind != SystemKind::Annihilation {
                return Err(Failure::Input(
                    "random plants are annihilation-operator plants; drop --kind general".into(),
                ));
            }
            if m_u == 0 {
                return Err(Failure::Input("--inputs must be positive".into()));
            }
            let plant = random_pr_plant(req.modes, req.fields, m_u, ctx.seed)
                .map_err(|e| Failure::Verdict(format!("generation failed: {e}")))?;
            r.line(format!(
                "random annihilation plant: {} states, {} noise, {m_u} inputs (seed {})",
                req.modes, req.fields, ctx.seed
            ));
            SystemFile::new(Model::Plant(PlantFile { plant, selector: None }))
                .with_label("random realizable plant")
                .with_meta("seed", ctx.seed)
        }
        None => {
            let opts = GenOptions::new(req.kind).hurwitz(req.hurwitz);
            let g = random_pr_system(req.modes, req.fields, ctx.seed, opts)
                .map_err(|e| Failure::Verdict(format!("generation failed: {e}")))?;
            r.line(format!(
                "random {} system: {} modes, {} fields (seed {}, attempt {})",
                req.kind.as_str(),
                req.modes,
                req.fields,
                ctx.seed,
                g.attempts
            ));
            SystemFile::new(Model::System(g.system))
                .with_label(format!("random {} system", req.kind.as_str()))
                .with_meta("seed", ctx.seed)
                .with_meta("attempts", g.attempts)
        }
    };
    r.verdict("generated", true, "");
    match req.output {
        Some(path) => {
            file.save(path).map_err(|e| Failure::Input(format!("{}: cannot write: {e}", path.display())))?;
            r.line(format!("wrote {}", path.display()));
            Ok(None)
        }
        None => Ok(Some(file.to_json())),
    }
}
