use std::path::Path;

use qlinear::dmat::{max_abs, max_diff};
use qlinear::qsys::{extract_params, realize};
use qlinear::Error;

use super::{describe_pr, load, CmdResult, Context, Failure};
use crate::format::Model;
use crate::report::{fmt_matrix, Report};

pub fn run(ctx: &Context, r: &mut Report, path: &Path) -> CmdResult {
    let Model::System(q) = load(path)?.model else {
        return Err(Failure::Input(format!("{}: params needs a general or annihilation system file", path.display())));
    };
    r.line(format!("{}: {} system, {} modes, {} fields", path.display(), q.kind().as_str(), q.modes(), q.fields()));
    let p = match extract_params(&q) {
        Ok(p) => p,
        Err(Error::NotPhysicallyRealizable(v)) => {
            describe_pr(r, "realizable", &v, &ctx.tol);
            return Ok(());
        }
        Err(e) => return Err(Failure::Verdict(format!("parameter extraction failed: {e}"))),
    };
    r.line(format!("Θ={}", fmt_matrix(p.theta())));
    r.line(format!("M={}", fmt_matrix(p.hamiltonian())));
    r.line(format!("N={}", fmt_matrix(p.coupling())));
    r.matrix("Theta", p.theta());
    r.matrix("M", p.hamiltonian());
    r.matrix("N", p.coupling());

    // Rebuild the system from the parameters as a consistency check.
    let back = realize(&p).map_err(|e| Failure::Verdict(format!("cannot rebuild from parameters: {e}")))?;
    let (f1, g1, h1, k1) = q.matrices();
    let (f2, g2, h2, k2) = back.matrices();
    let scale = 1.0 + max_abs(f1) + max_abs(g1) + max_abs(h1);
    let err = [max_diff(f1, f2), max_diff(g1, g2), max_diff(h1, h2), max_diff(k1, k2)].into_iter().fold(0.0, f64::max)
        / scale;
    r.line("reconstruction from (Θ, M, N):");
    r.residual("reconstruction", err, Some(ctx.tol.residual));
    r.verdict("params", err <= ctx.tol.residual, format!("reconstruction residual {err:.3e}"));
    Ok(())
}
