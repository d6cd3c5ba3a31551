//! Command reports: structured for `--format json`, line-oriented for
//! humans. Every residual and norm recorded here also produces a text line,
//! so the two views never disagree.

use std::collections::BTreeMap;

use qlinear::xfer::NormResult;
use qlinear::{CMat, Cx};
use serde::Serialize;
use serde_json::Value;

use crate::format::encode_matrix;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Residual {
    pub name: String,
    /// `null` when the residual could not be computed.
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Norm {
    pub name: String,
    /// `null` for an infinite norm.
    pub value: Option<f64>,
    pub method: String,
    pub certificate: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u64,
    pub command: String,
    pub argv: Vec<String>,
    pub seed: u64,
    pub tolerance: f64,
    pub verdicts: Vec<Verdict>,
    pub residuals: Vec<Residual>,
    pub norms: Vec<Norm>,
    pub matrices: BTreeMap<String, Value>,
    pub lines: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emitted: Option<Value>,
    pub exit_status: i32,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Report {
    pub fn new(command: &str, argv: Vec<String>, seed: u64, tolerance: f64) -> Self {
        Self {
            schema_version: crate::format::SCHEMA_VERSION,
            command: command.into(),
            argv,
            seed,
            tolerance,
            verdicts: Vec::new(),
            residuals: Vec::new(),
            norms: Vec::new(),
            matrices: BTreeMap::new(),
            lines: Vec::new(),
            error: None,
            emitted: None,
            exit_status: EXIT_PASS,
        }
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn verdict(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict { name: name.into(), pass, detail: detail.into() });
    }

    /// Records a residual and prints it as an indented table row.
    pub fn residual(&mut self, name: &str, value: f64, tolerance: Option<f64>) {
        let shown = if value.is_nan() { "n/a".to_string() } else { format!("{value:.3e}") };
        let line = match tolerance {
            Some(t) => format!("  {name:<34} {shown:>10}  (tol {t:.0e})"),
            None => format!("  {name:<34} {shown:>10}"),
        };
        self.lines.push(line);
        self.residuals.push(Residual { name: name.into(), value: finite(value), tolerance });
    }

    pub fn norm(&mut self, name: &str, n: &NormResult) {
        self.lines.push(format!("{name} = {:.6}  ({}, certificate {:.1e})", n.value, n.method.as_str(), n.certificate));
        self.norms.push(Norm {
            name: name.into(),
            value: finite(n.value),
            method: n.method.as_str().into(),
            certificate: finite(n.certificate),
        });
    }

    pub fn matrix(&mut self, name: &str, m: &CMat) {
        self.matrices.insert(name.into(), encode_matrix(m));
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Sets the exit status from the verdicts unless a failure was already
    /// recorded.
    pub fn settle(&mut self) {
        if self.exit_status == EXIT_PASS && !self.all_pass() {
            self.exit_status = EXIT_FAIL;
        }
    }

    pub fn fail_input(&mut self, message: impl Into<String>) {
        self.error = Some(message.into());
        self.exit_status = EXIT_INPUT;
    }

    /// A computation that could not produce a verdict: exit status 1.
    pub fn fail_verdict(&mut self, message: impl Into<String>) {
        let message = message.into();
        self.lines.push(message.clone());
        self.error = Some(message);
        self.exit_status = EXIT_FAIL;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

/// Short decimal for display: six decimals with trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x != 0.0 && (x.abs() >= 1e6 || x.abs() < 1e-4) {
        return format!("{x:.3e}");
    }
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// `a+bi` / `a-bi` for spectra.
pub fn fmt_cx(z: Cx) -> String {
    let im = fmt_num(z.im.abs());
    let sign = if z.im < 0.0 && im != "0" { '-' } else { '+' };
    format!("{}{sign}{im}i", fmt_num(z.re))
}

/// `[[re,im] [re,im]; [re,im] [re,im]]`: rows separated by `;`. Parts
/// below 1e-12 of the largest entry are shown as 0.
pub fn fmt_matrix(m: &CMat) -> String {
    let floor = 1e-12 * (1.0 + qlinear::dmat::max_abs(m));
    let part = |x: f64| fmt_num(if x.abs() < floor { 0.0 } else { x });
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| format!("[{},{}]", part(m[(i, j)].re), part(m[(i, j)].im)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    format!("[{}]", rows.join("; "))
}
