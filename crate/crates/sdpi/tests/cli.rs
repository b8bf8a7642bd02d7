use std::path::PathBuf;

use sdpi::cli::{main_with, EXIT_CHECK, EXIT_OK, EXIT_USAGE};

fn example(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
        .display()
        .to_string()
}

fn sdpi(args: &[&str]) -> (i32, String, String) {
    let mut out = vec![];
    let mut err = vec![];
    let argv = std::iter::once("sdpi")
        .chain(args.iter().copied())
        .map(String::from);
    let code = main_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn scratch(name: &str, src: &str) -> String {
    let dir = std::env::temp_dir().join(format!("sdpi-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, src).unwrap();
    p.display().to_string()
}

#[test]
fn check_reports_and_exits() {
    let (code, out, _) = sdpi(&["check", &example("datadep.sdp")]);
    assert_eq!(code, EXIT_OK, "{out}");
    let (code, out, _) = sdpi(&["check", &example("datadep_flipped.sdp")]);
    assert_eq!(code, EXIT_CHECK);
    assert!(out.starts_with("error "), "{out}");
    assert!(out.contains("Rflip"), "{out}");
}

#[test]
fn usage_errors() {
    assert_eq!(sdpi(&["check"]).0, EXIT_USAGE);
    assert_eq!(sdpi(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(sdpi(&["check", "/nonexistent/file.sdp"]).0, EXIT_USAGE);
    assert_eq!(
        sdpi(&["run", &example("counter.sdp"), "--main", "nothing"]).0,
        EXIT_USAGE
    );
}

#[test]
fn run_prints_a_trace() {
    let (code, out, _) = sdpi(&[
        "run",
        &example("counter.sdp"),
        "--main",
        "demo",
        "--seed",
        "3",
    ]);
    assert_eq!(code, EXIT_OK);
    let comms: Vec<&str> = out.lines().filter(|l| l.contains("ValueComm")).collect();
    assert_eq!(comms.len(), 2, "{out}");
    assert!(out.lines().next().unwrap().starts_with("STEP 1: "));
    assert!(out.contains("quiescent after"));
    let (code, json, _) = sdpi(&["run", &example("counter.sdp"), "--main", "demo", "--json"]);
    assert_eq!(code, EXIT_OK);
    for line in json.lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
}

#[test]
fn equality_verdicts() {
    let (code, out, _) = sdpi(&["eq", &example("datadep.sdp"), "Q", "Qflip"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("no"), "{out}");
    let (code, out, _) = sdpi(&["eq", &example("datadep.sdp"), "Q", "Q"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("yes"), "{out}");
    // different sorts
    assert_eq!(
        sdpi(&["eq", &example("datadep.sdp"), "Q", "T"]).0,
        EXIT_USAGE
    );
}

#[test]
fn embedding_output_and_fragment() {
    let (code, out, _) = sdpi(&["embed", &example("embed_id.sdp"), "--def", "example"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("proc example"), "{out}");
    let f = scratch(
        "bool.sdp",
        "def neg : pi x:Bool. Bool = \\x:Bool. ifT x ff tt\n",
    );
    let (code, out, _) = sdpi(&["embed", &f, "--def", "neg"]);
    assert_eq!(code, EXIT_CHECK);
    assert!(out.contains("outside embedding fragment"), "{out}");
}

#[test]
fn property_suites_from_the_command_line() {
    let (code, out, _) = sdpi(&[
        "test-meta",
        "--suite",
        "progress",
        "--iters",
        "20",
        "--json",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["suite"], "progress");
    assert_eq!(v["failed"], 0);
}
