mod support;

use serde_json::Value;
use support::*;

fn pass(r: Result<usize, String>) {
    if let Err(e) = r {
        panic!("{e}");
    }
}

#[test]
fn golden_transcripts() {
    pass(check_goldens());
}

#[test]
fn exit_codes() {
    pass(check_exit_codes());
}

#[test]
fn documents_match_schemas() {
    pass(check_schemas());
}

#[test]
fn text_and_json_agree() {
    pass(check_text_json_agree());
}

#[test]
fn serialization_round_trip_is_bit_identical() {
    pass(check_roundtrip(200, 17));
}

#[test]
fn normalizer_hides_only_tiny_numbers() {
    assert_eq!(normalize("coupling 5.800e-17  (tol 1e-8)"), "coupling ~0  (tol 1e-8)\n");
    assert_eq!(normalize("max 1e-14)"), "max ~0)\n");
    assert_eq!(normalize("value 0.000e0 and 2.5e-3, -3e-20;"), "value 0.000e0 and 2.5e-3, ~0;\n");
}

#[test]
fn gen_is_deterministic_in_the_seed() {
    let a = qlinear(&["gen", "--modes", "2", "--fields", "2", "--seed", "9"]);
    let b = qlinear(&["gen", "--modes", "2", "--fields", "2", "--seed", "9"]);
    let c = qlinear(&["gen", "--modes", "2", "--fields", "2", "--seed", "10"]);
    assert_eq!(a.status, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn generated_systems_check_out() {
    let dir = tempfile::tempdir().unwrap();
    for (i, extra) in [&["--kind", "general"][..], &["--hurwitz"][..], &["--inputs", "1"][..]].iter().enumerate() {
        let path = dir.path().join(format!("g{i}.json"));
        let p = path.to_str().unwrap();
        let mut args = vec!["gen", "--modes", "2", "--fields", "2", "--seed", "4", "-o", p];
        args.extend_from_slice(extra);
        let made = qlinear(&args);
        assert_eq!(made.status, 0, "{}", made.stderr);
        let checked = qlinear(&["check", p]);
        assert_eq!(checked.status, 0, "{}\n{}", checked.stdout, checked.stderr);
    }
}

#[test]
fn synthesized_controller_closes_a_loop() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let p = path.to_str().unwrap();
    let s = qlinear(&["synth", "triple.json", "-o", p]);
    assert_eq!(s.status, 0, "{}", s.stderr);
    assert_eq!(qlinear(&["check", p]).status, 0);
    let c = qlinear(&["compose", "cavity_plant.json", p, "--require-stable"]);
    assert_eq!(c.status, 0, "{}\n{}", c.stdout, c.stderr);
}

#[test]
fn emitted_closed_loop_is_a_plant_without_inputs() {
    let run = qlinear(&["--format", "json", "compose", "cavity_plant.json", "trivial.json", "--h2"]);
    let doc: Value = serde_json::from_str(&run.stdout).unwrap();
    assert!(doc.get("emitted").is_none());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("loop.json");
    let p = path.to_str().unwrap();
    let run = qlinear(&["compose", "cavity_plant.json", "trivial.json", "--emit", p]);
    assert_eq!(run.status, 0, "{}", run.stderr);
    let emitted: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(emitted["kind"], "plant");
    assert_eq!(emitted["dimensions"]["inputs"], 0);
}

#[test]
fn report_seed_and_tolerance_are_echoed() {
    let run = qlinear(&["--format", "json", "--seed", "33", "--tol", "1e-6", "check", "cavity.json"]);
    let doc: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(doc["seed"], 33);
    assert_eq!(doc["tolerance"], 1e-6);
    assert_eq!(doc["residuals"][0]["tolerance"], 1e-6);
}

#[test]
fn input_errors_name_the_location() {
    let run = qlinear(&["check", "malformed.json"]);
    assert_eq!(run.status, 2);
    assert!(run.stderr.contains("matrices.K[0][0]"), "{}", run.stderr);
}
