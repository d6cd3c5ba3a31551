//! Shared CLI checks: golden transcripts, exit codes, schema conformance and
//! serialization round-trips. Each check returns how many cases it covered
//! or a description of every mismatch.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use qlinear::dmat::DoubledMatrix;
use qlinear::feedback::{ControllerModel, CostOutput, PlantModel};
use qlinear::qsys::{AnnihilationQSys, GeneralQSys, QSys, SystemKind};
use qlinear::{CMat, Cx};
use qlinear_cli::format::{ControllerFile, Model, PlantFile, SystemFile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn data_dir() -> PathBuf {
    crate_dir().join("tests/data")
}

pub fn golden_dir() -> PathBuf {
    crate_dir().join("tests/golden")
}

pub struct Run {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the binary from the data directory so paths in output stay short.
pub fn qlinear(args: &[&str]) -> Run {
    let out =
        Command::new(env!("CARGO_BIN_EXE_qlinear")).args(args).current_dir(data_dir()).output().expect("binary runs");
    Run {
        status: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

pub const GOLDEN: &[(&str, &[&str])] = &[
    ("check_cavity", &["check", "cavity.json"]),
    ("check_cavity_gain", &["check", "cavity_gain.json"]),
    ("check_malformed", &["check", "malformed.json"]),
    ("check_detuned_transfer", &["check", "detuned_cavity.json", "--transfer"]),
    ("check_plant", &["check", "cavity_plant.json"]),
    ("check_lossy_plant", &["check", "lossy_plant.json"]),
    ("check_beam_splitter", &["check", "beam_splitter.json"]),
    ("compose_trivial", &["compose", "cavity_plant.json", "trivial.json", "--h2", "--hinf"]),
    ("compose_beam_splitter", &["compose", "cavity_plant.json", "beam_splitter.json", "--h2", "--hinf"]),
    ("compose_unstable", &["compose", "cavity_plant.json", "unstable.json", "--require-stable", "--h2"]),
    ("synth_triple", &["synth", "triple.json"]),
    ("synth_inadmissible", &["synth", "triple_inadmissible.json"]),
    ("verify_c1", &["verify", "c1", "cavity_plant.json"]),
    ("verify_t6", &["verify", "t6", "cavity_plant.json"]),
    ("verify_t5", &["verify", "t5", "cavity_plant.json"]),
    ("verify_lossy", &["verify", "c1", "lossy_plant.json"]),
    ("verify_random_c1", &["verify", "c1", "--random", "2", "1", "4", "11"]),
    ("gen_report", &["gen", "--modes", "2", "--fields", "2", "--seed", "5", "-o", "/dev/null"]),
    ("params_cavity", &["params", "cavity.json"]),
    ("params_detuned", &["params", "detuned_cavity.json"]),
];

/// Replaces magnitudes below 1e-12 with `~0`: such values are rounding noise
/// whose digits depend on the platform's floating-point kernels.
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        let mut first = true;
        for tok in line.split(' ') {
            if !first {
                out.push(' ');
            }
            first = false;
            out.push_str(&normalize_token(tok));
        }
        out.push('\n');
    }
    out
}

fn normalize_token(tok: &str) -> String {
    let start = tok.find(|c: char| c.is_ascii_digit() || c == '-').unwrap_or(tok.len());
    let end = tok.trim_end_matches([')', ',', ';', ']']).len().max(start);
    let (head, body, tail) = (&tok[..start], &tok[start..end], &tok[end..]);
    match body.parse::<f64>() {
        Ok(x) if x != 0.0 && x.abs() < 1e-12 => format!("{head}~0{tail}"),
        _ => tok.to_string(),
    }
}

fn transcript(run: &Run) -> String {
    format!("exit: {}\n--- stdout\n{}--- stderr\n{}", run.status, normalize(&run.stdout), normalize(&run.stderr))
}

/// Compares every golden transcript; `UPDATE_GOLDEN=1` rewrites them.
pub fn check_goldens() -> Result<usize, String> {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut failures = Vec::new();
    for (name, args) in GOLDEN {
        let got = transcript(&qlinear(args));
        let path = golden_dir().join(format!("{name}.txt"));
        if update {
            std::fs::write(&path, &got).map_err(|e| format!("{}: {e}", path.display()))?;
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(want) if want == got => {}
            Ok(want) => failures.push(format!("{name}: transcript differs\n{}", first_difference(&want, &got))),
            Err(e) => failures.push(format!("{name}: {} ({e}); run with UPDATE_GOLDEN=1", path.display())),
        }
    }
    finish(GOLDEN.len(), failures)
}

fn first_difference(want: &str, got: &str) -> String {
    let mut w = want.lines();
    let mut g = got.lines();
    for n in 1.. {
        match (w.next(), g.next()) {
            (None, None) => break,
            (a, b) if a == b => {}
            (a, b) => return format!("  line {n}:\n    want {a:?}\n    got  {b:?}"),
        }
    }
    String::new()
}

fn finish(count: usize, failures: Vec<String>) -> Result<usize, String> {
    if failures.is_empty() {
        Ok(count)
    } else {
        Err(failures.join("\n"))
    }
}

pub const EXIT_CASES: &[(&[&str], i32)] = &[
    (&["check", "cavity.json"], 0),
    (&["check", "cavity_gain.json"], 1),
    (&["check", "malformed.json"], 2),
    (&["check", "no_such_file.json"], 2),
    (&["check", "triple.json"], 2),
    (&["check", "lossy_plant.json"], 1),
    (&["--tol", "0", "check", "cavity.json"], 2),
    (&["--tol", "1e-30", "check", "cavity.json"], 1),
    (&["--format", "yaml", "check", "cavity.json"], 2),
    (&["frobnicate"], 2),
    (&["compose", "cavity_plant.json", "trivial.json", "--h2", "--hinf"], 0),
    (&["compose", "cavity_plant.json", "unstable.json"], 0),
    (&["compose", "cavity_plant.json", "unstable.json", "--require-stable"], 1),
    (&["compose", "cavity_plant.json", "unstable.json", "--h2"], 1),
    (&["compose", "cavity.json", "trivial.json"], 2),
    (&["compose", "cavity_plant.json", "triple.json"], 2),
    (&["synth", "triple.json"], 0),
    (&["synth", "triple_inadmissible.json"], 1),
    (&["synth", "cavity.json"], 2),
    (&["verify", "c1", "cavity_plant.json"], 0),
    (&["verify", "t6", "cavity_plant.json"], 0),
    (&["verify", "t5", "cavity_plant.json"], 0),
    (&["verify", "c1", "lossy_plant.json"], 1),
    (&["verify", "c1"], 2),
    (&["verify", "c1", "cavity.json"], 2),
    (&["verify", "c1", "--random", "1", "1", "3", "5"], 0),
    (&["verify", "c1", "--random", "0", "1", "3", "5"], 2),
    (&["gen", "--modes", "2", "--fields", "1"], 0),
    (&["gen", "--modes", "0"], 2),
    (&["gen", "--kind", "general", "--inputs", "1"], 2),
    (&["params", "cavity.json"], 0),
    (&["params", "cavity_gain.json"], 1),
    (&["params", "cavity_plant.json"], 2),
];

pub fn check_exit_codes() -> Result<usize, String> {
    let mut failures = Vec::new();
    for (args, want) in EXIT_CASES {
        for format in ["text", "json"] {
            let mut full = vec!["--format", format];
            full.extend_from_slice(args);
            let run = qlinear(&full);
            if run.status != *want {
                failures.push(format!(
                    "qlinear {}: exit {} (want {want}); stderr: {}",
                    full.join(" "),
                    run.status,
                    run.stderr.trim()
                ));
            }
        }
    }
    finish(EXIT_CASES.len() * 2, failures)
}

fn read_json(path: &Path) -> Value {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub struct Schemas {
    pub system: jsonschema::Validator,
    pub report: jsonschema::Validator,
}

pub fn schemas() -> Schemas {
    let dir = crate_dir().join("schema");
    let system_doc = read_json(&dir.join("system.schema.json"));
    let report_doc = read_json(&dir.join("report.schema.json"));
    let id = system_doc["$id"].as_str().expect("system schema has an $id").to_string();
    let system = jsonschema::validator_for(&system_doc).expect("system schema compiles");
    let resource = jsonschema::Resource::from_contents(system_doc).expect("system schema is a resource");
    let report = jsonschema::options().with_resource(id, resource).build(&report_doc).expect("report schema compiles");
    Schemas { system, report }
}

fn schema_errors(v: &jsonschema::Validator, doc: &Value) -> Option<String> {
    let errs: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    (!errs.is_empty()).then(|| errs.join("; "))
}

/// Reports that exercise every section of the report schema.
pub const SCHEMA_REPORTS: &[&[&str]] = &[
    &["check", "cavity.json"],
    &["check", "detuned_cavity.json", "--transfer"],
    &["check", "malformed.json"],
    &["compose", "cavity_plant.json", "beam_splitter.json", "--h2", "--hinf"],
    &["compose", "cavity_plant.json", "trivial.json", "--emit", "/dev/null"],
    &["synth", "triple.json"],
    &["synth", "triple_inadmissible.json"],
    &["verify", "t6", "cavity_plant.json"],
    &["verify", "t5", "--random", "1", "1", "2", "3", "--dynamic", "4"],
    &["gen", "--modes", "1", "--fields", "1", "-o", "/dev/null"],
    &["params", "detuned_cavity.json"],
];

pub fn check_schemas() -> Result<usize, String> {
    let s = schemas();
    let mut failures = Vec::new();
    let mut count = 0;

    let mut files: Vec<PathBuf> = std::fs::read_dir(data_dir())
        .map_err(|e| e.to_string())?
        .map(|e| e.expect("directory entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    for path in &files {
        let doc = read_json(path);
        let bad = schema_errors(&s.system, &doc);
        let name = path.file_name().unwrap().to_string_lossy();
        match (name.starts_with("malformed"), bad) {
            (false, Some(e)) => failures.push(format!("{name}: {e}")),
            (true, None) => failures.push(format!("{name}: accepted by the schema")),
            _ => {}
        }
        count += 1;
    }

    for args in SCHEMA_REPORTS {
        let mut full = vec!["--format", "json"];
        full.extend_from_slice(args);
        let run = qlinear(&full);
        match serde_json::from_str::<Value>(&run.stdout) {
            Ok(doc) => {
                if let Some(e) = schema_errors(&s.report, &doc) {
                    failures.push(format!("{}: {e}", args.join(" ")));
                }
            }
            Err(e) => failures.push(format!("{}: stdout is not JSON ({e})", args.join(" "))),
        }
        count += 1;
    }

    for seed in ["1", "2"] {
        for extra in [&["--kind", "general"][..], &["--inputs", "1"][..], &[][..]] {
            let mut args = vec!["gen", "--modes", "2", "--fields", "2", "--seed", seed];
            args.extend_from_slice(extra);
            let run = qlinear(&args);
            match serde_json::from_str::<Value>(&run.stdout) {
                Ok(doc) => {
                    if let Some(e) = schema_errors(&s.system, &doc) {
                        failures.push(format!("{}: {e}", args.join(" ")));
                    }
                }
                Err(e) => failures.push(format!("{}: stdout is not JSON ({e})", args.join(" "))),
            }
            count += 1;
        }
    }
    finish(count, failures)
}

/// The JSON `lines` are the text output, and every residual or norm in the
/// JSON has its own text row.
pub fn check_text_json_agree() -> Result<usize, String> {
    let mut failures = Vec::new();
    let mut count = 0;
    for (name, args) in GOLDEN {
        if args[0] == "gen" {
            continue;
        }
        let text = qlinear(args);
        let mut full = vec!["--format", "json"];
        full.extend_from_slice(args);
        let json = qlinear(&full);
        let Ok(doc) = serde_json::from_str::<Value>(&json.stdout) else {
            failures.push(format!("{name}: JSON report does not parse"));
            continue;
        };
        let lines: Vec<&str> = doc["lines"].as_array().unwrap().iter().map(|l| l.as_str().unwrap()).collect();
        let all: Vec<&str> = text.stdout.lines().collect();
        let printed = &all[..lines.len().min(all.len())];
        if lines != printed {
            failures.push(format!("{name}: JSON lines differ from text output"));
        }
        // An embedded document follows the report lines in text mode.
        let trailer = &all[printed.len()..];
        match (doc.get("emitted"), trailer.split_first()) {
            (None, None) => {}
            (Some(e), Some((head, body))) if head.ends_with(':') => {
                if serde_json::from_str::<Value>(&body.join("\n")).ok().as_ref() != Some(e) {
                    failures.push(format!("{name}: printed document differs from the emitted one"));
                }
            }
            _ => failures.push(format!("{name}: text and JSON disagree on the emitted document")),
        }
        let residuals = doc["residuals"].as_array().unwrap();
        for r in residuals {
            let rn = r["name"].as_str().unwrap();
            if !printed.iter().any(|l| l.starts_with(&format!("  {rn} "))) {
                failures.push(format!("{name}: residual {rn:?} has no text row"));
            }
        }
        let rows = printed.iter().filter(|l| is_residual_row(l)).count();
        if rows != residuals.len() {
            failures.push(format!("{name}: {rows} residual rows in text, {} in JSON", residuals.len()));
        }
        for n in doc["norms"].as_array().unwrap() {
            let nn = n["name"].as_str().unwrap();
            if !printed.iter().any(|l| l.starts_with(&format!("{nn} = "))) {
                failures.push(format!("{name}: norm {nn:?} has no text row"));
            }
        }
        count += 1;
    }
    finish(count, failures)
}

/// `  name   value` with an optional `  (tol t)` suffix, in the fixed
/// columns the report writer uses.
fn is_residual_row(line: &str) -> bool {
    const NAME: usize = 34;
    let chars: Vec<char> = line.chars().collect();
    if chars.len() <= NAME + 3 || chars[0] != ' ' || chars[1] != ' ' || chars[2] == ' ' || chars[NAME + 2] != ' ' {
        return false;
    }
    let rest: String = chars[NAME + 3..].iter().collect();
    let toks: Vec<&str> = rest.split_whitespace().collect();
    let value_ok = |v: &str| v == "n/a" || (v.contains('e') && v.parse::<f64>().is_ok());
    match toks.as_slice() {
        [v] => value_ok(v),
        [v, "(tol", t] => value_ok(v) && t.ends_with(')'),
        _ => false,
    }
}

const SPECIAL: [f64; 12] = [
    0.0,
    -0.0,
    f64::MIN_POSITIVE,
    -f64::MIN_POSITIVE,
    5e-324,
    -5e-324,
    f64::MAX,
    f64::MIN,
    f64::EPSILON,
    0.1,
    1.0 / 3.0,
    -f64::from_bits(0x000f_ffff_ffff_ffff),
];

fn random_value(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..4) {
        0 => SPECIAL[rng.random_range(0..SPECIAL.len())],
        1 => loop {
            let x = f64::from_bits(rng.random::<u64>());
            if x.is_finite() {
                break x;
            }
        },
        _ => rng.sample::<f64, _>(StandardNormal) * 10f64.powi(rng.random_range(-8..9)),
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| Cx::new(random_value(rng), random_value(rng)))
}

fn random_doubled(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    let a1 = random_matrix(rng, rows, cols);
    let a2 = random_matrix(rng, rows, cols);
    DoubledMatrix::from_blocks(&a1, &a2).expect("blocks agree").into_matrix()
}

fn random_file(rng: &mut ChaCha8Rng, case: usize) -> SystemFile {
    let n = rng.random_range(1..4);
    let m = rng.random_range(1..4);
    let model = match case % 4 {
        0 => {
            let q = AnnihilationQSys::new(
                random_matrix(rng, n, n),
                random_matrix(rng, n, m),
                random_matrix(rng, m, n),
                random_matrix(rng, m, m),
            )
            .expect("shapes agree");
            Model::System(QSys::Annihilation(q))
        }
        1 => {
            let q = GeneralQSys::from_matrices(
                random_doubled(rng, n, n),
                random_doubled(rng, n, m),
                random_doubled(rng, m, n),
                random_doubled(rng, m, m),
            )
            .expect("exactly doubled");
            Model::System(QSys::General(q))
        }
        2 => {
            let u = rng.random_range(1..3);
            let mut cost = CostOutput::new(random_matrix(rng, 2, n), random_matrix(rng, 2, u));
            cost.e = Some(random_matrix(rng, 2, m));
            let plant = PlantModel::new(
                SystemKind::Annihilation,
                random_matrix(rng, n, n),
                random_matrix(rng, n, m),
                random_matrix(rng, n, u),
                random_matrix(rng, m, n),
                random_matrix(rng, m, m),
            )
            .and_then(|p| p.with_cost(cost))
            .expect("shapes agree");
            Model::Plant(PlantFile { plant, selector: None })
        }
        _ => {
            let (y, u) = (rng.random_range(1..3), rng.random_range(1..3));
            let c = ControllerModel::new(
                SystemKind::Annihilation,
                random_matrix(rng, n, n),
                random_matrix(rng, n, m),
                random_matrix(rng, n, y),
                random_matrix(rng, u, n),
                random_matrix(rng, u, m),
                random_matrix(rng, u, y),
            )
            .expect("shapes agree");
            Model::Controller(ControllerFile::Full(c))
        }
    };
    SystemFile::new(model).with_label(format!("round-trip case {case}"))
}

/// Every `f64` in the document, in order, as raw bits.
fn float_bits(v: &Value, out: &mut Vec<u64>) {
    match v {
        Value::Number(n) if !n.is_u64() && !n.is_i64() => out.push(n.as_f64().unwrap().to_bits()),
        Value::Array(a) => a.iter().for_each(|x| float_bits(x, out)),
        Value::Object(o) => o.values().for_each(|x| float_bits(x, out)),
        _ => {}
    }
}

/// Write-then-read through a real file is bit-identical, including signed
/// zeros, subnormals and the extremes of the `f64` range.
pub fn check_roundtrip(count: usize, seed: u64) -> Result<usize, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for case in 0..count {
        let file = random_file(&mut rng, case);
        let path = dir.path().join(format!("case{case}.json"));
        file.save(&path).map_err(|e| e.to_string())?;
        let back = match SystemFile::load(&path) {
            Ok(b) => b,
            Err(e) => {
                failures.push(format!("case {case}: reload failed: {e}"));
                continue;
            }
        };
        let (mut a, mut b) = (Vec::new(), Vec::new());
        float_bits(&file.to_value(), &mut a);
        float_bits(&back.to_value(), &mut b);
        if a != b {
            let at = a.iter().zip(&b).position(|(x, y)| x != y);
            failures.push(format!("case {case}: values differ (first at {at:?}, {} vs {} values)", a.len(), b.len()));
        } else if file.to_json() != back.to_json() {
            failures.push(format!("case {case}: text differs after reload"));
        }
    }
    finish(count, failures)
}
