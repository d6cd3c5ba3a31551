pub mod check;
pub mod compose;
pub mod gen;
pub mod params;
pub mod synth;
pub mod verify;

use std::path::Path;

use qlinear::qsys::PrVerdict;
use qlinear::tol::Tolerances;

use crate::format::SystemFile;
use crate::report::{fmt_matrix, Report};

pub struct Context {
    pub tol: Tolerances,
    pub seed: u64,
    /// Text output; controls whether emitted files are echoed inline.
    pub text: bool,
}

/// Why a command stopped early.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit status 2.
    Input(String),
    /// The question has an answer and it is "no", or no answer could be
    /// computed: exit status 1.
    Verdict(String),
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub fn load(path: &Path) -> CmdResult<SystemFile> {
    SystemFile::load(path).map_err(|e| Failure::Input(e.to_string()))
}

/// Prints a realizability verdict: headline, Θ, residual table.
pub fn describe_pr(r: &mut Report, label: &str, v: &PrVerdict, tol: &Tolerances) {
    match (&v.theta, v.realizable) {
        (Some(theta), true) => r.line(format!("{label}: true, Θ={}", fmt_matrix(theta))),
        _ => r.line(format!("{label}: {}, failure_reason={}", v.status(), reason(v))),
    }
    r.residual("lyapunov", v.residuals.lyapunov, Some(tol.residual));
    r.residual("coupling", v.residuals.coupling, Some(tol.residual));
    r.residual("feedthrough", v.residuals.feedthrough, Some(tol.residual));
    if let Some(theta) = &v.theta {
        r.matrix("Theta", theta);
    }
    r.verdict(label, v.realizable, v.reason_text());
}

fn reason(v: &PrVerdict) -> &'static str {
    v.failure_reason.map(|f| f.as_str()).unwrap_or("none")
}

fn write_file(path: &Path, f: &SystemFile) -> CmdResult {
    f.save(path).map_err(|e| Failure::Input(format!("{}: cannot write: {e}", path.display())))
}

/// Writes `f` to `path`, or attaches it to the report when no path is given.
pub fn emit(ctx: &Context, r: &mut Report, what: &str, f: &SystemFile, path: Option<&Path>) -> CmdResult {
    match path {
        Some(p) => {
            write_file(p, f)?;
            r.line(format!("wrote {what} to {}", p.display()));
        }
        None => {
            if ctx.text {
                r.line(format!("{what}:"));
                r.lines.extend(f.to_json().lines().map(str::to_string));
            }
            r.emitted = Some(f.to_value());
        }
    }
    Ok(())
}
