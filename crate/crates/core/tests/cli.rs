use std::fs;
use std::path::PathBuf;

use serde_json::Value;
use wpc_core::cli::{run_cli, ExitCode, BENCH_HEADER};

struct Run {
    code: ExitCode,
    out: String,
    err: String,
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Run {
    let mut argv = vec!["wpc"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn run(args: &[&str]) -> Run {
    run_with_stdin(args, "")
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wpc-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn recognize_p5_accepts_and_the_forest_checks() {
    let r = run(&["recognize", &data("p5.gr")]);
    assert_eq!(r.code, ExitCode::Positive, "{}", r.err);
    assert!(r.out.starts_with("f partforest"));
    let check = run_with_stdin(&["check-cert", &data("p5.gr"), "-"], &r.out);
    assert_eq!(check.code, ExitCode::Positive);
    assert_eq!(check.out, "valid forest\n");
}

#[test]
fn recognize_o1_rejects_and_writes_the_certificate() {
    let cert = scratch("o1.cert");
    let r = run(&["recognize", &data("o1.gr"), "--cert", cert.to_str().unwrap()]);
    assert_eq!(r.code, ExitCode::Negative);
    // Rejections are certified on stdout even when a file is requested.
    assert!(r.out.starts_with("o obstruction O1"), "{}", r.out);
    assert_eq!(fs::read_to_string(&cert).unwrap(), r.out);
    let check = run(&["check-cert", &data("o1.gr"), cert.to_str().unwrap()]);
    assert_eq!(check.code, ExitCode::Positive);
}

#[test]
fn tampered_certificates_are_refused() {
    let forest = "f partforest 1\nb 0 0 1 2 3 4\n";
    let r = run_with_stdin(&["check-cert", &data("p5.gr"), "-"], forest);
    assert_eq!(r.code, ExitCode::Negative);
    assert!(r.out.starts_with("invalid forest"));
    let obstruction = "o obstruction O1\nv 0 1 2 3 4 5\n";
    let r = run_with_stdin(&["check-cert", &data("p5.gr"), "-"], obstruction);
    assert_eq!(r.code, ExitCode::Negative);
    assert!(r.out.starts_with("invalid obstruction"));
}

#[test]
fn json_and_text_certificates_agree() {
    for graph in ["p5.gr", "o1.gr"] {
        let plain = run(&["recognize", &data(graph)]);
        let json = run(&["--json", "recognize", &data(graph)]);
        assert_eq!(plain.code, json.code);
        let doc: Value = serde_json::from_str(&json.out).unwrap();
        match doc["result"].as_str().unwrap() {
            "accepted" => {
                let bags = doc["forest"]["bags"].as_array().unwrap();
                let text_bags = plain.out.lines().filter(|l| l.starts_with("b ")).count();
                assert_eq!(bags.len(), text_bags);
            }
            "rejected" => {
                let verts: Vec<String> = doc["certificate"]["vertices"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|v| v.to_string())
                    .collect();
                assert!(plain.out.contains(&format!("v {}", verts.join(" "))));
            }
            other => panic!("{other}"),
        }
        let check = run_with_stdin(&["check-cert", &data(graph), "-"], &json.out);
        assert_eq!(check.code, ExitCode::Positive);
    }
}

#[test]
fn solve_sample_matches_the_oracle() {
    let solved = run(&["solve", &data("sample_srdp.inst")]);
    let oracle = run(&["oracle", "paths", &data("sample_srdp.inst")]);
    assert_eq!(solved.code, ExitCode::Positive);
    assert_eq!(oracle.code, solved.code);
    assert!(solved.out.starts_with("solution YES\npath 0 2 "));
    // The JSON mirror carries the same answer.
    let json = run(&["--json", "solve", "--variant", "srdp", &data("sample_srdp.inst")]);
    let doc: Value = serde_json::from_str(&json.out).unwrap();
    assert_eq!(doc["solution"], "YES");
    assert_eq!(doc["paths"].as_array().unwrap().len(), 2);
}

#[test]
fn solve_on_a_non_member_prints_the_obstruction() {
    let inst = scratch("o1.inst");
    let graph = fs::read_to_string(data("o1.gr")).unwrap();
    fs::write(&inst, format!("{graph}k 1\nq 0 0 4\nvariant dp\n")).unwrap();
    let r = run(&["solve", inst.to_str().unwrap()]);
    assert_eq!(r.code, ExitCode::Negative);
    assert!(r.out.starts_with("o obstruction"));
}

#[test]
fn kernelize_writes_instance_and_trace() {
    let trace = scratch("kernel.trace");
    let inst = scratch("long.inst");
    let mut text = String::from("p graph 30 29\n");
    for i in 0..29 {
        text.push_str(&format!("e {i} {}\n", i + 1));
    }
    text.push_str("k 1\nq 0 0 29\nvariant dp\n");
    fs::write(&inst, text).unwrap();
    let r = run(&["kernelize", inst.to_str().unwrap(), "--trace", trace.to_str().unwrap()]);
    assert_eq!(r.code, ExitCode::Positive, "{}", r.err);
    assert!(r.out.starts_with("p graph "));
    let trace = fs::read_to_string(trace).unwrap();
    assert!(trace.lines().all(|l| l.starts_with("r ") || l.starts_with("verdict ")));
    assert_eq!(trace.lines().last(), Some("verdict Reduced"));
    // The kernel is itself a valid instance for the solver.
    let kernel = scratch("long.kernel");
    fs::write(&kernel, &r.out).unwrap();
    assert_eq!(run(&["solve", kernel.to_str().unwrap()]).code, ExitCode::Positive);
}

#[test]
fn generate_is_deterministic_and_parsable() {
    let a = run(&["generate", "instance", "--seed", "9", "--k", "2", "--variant", "tdp"]);
    let b = run(&["generate", "instance", "--seed", "9", "--k", "2", "--variant", "tdp"]);
    assert_eq!(a.code, ExitCode::Positive, "{}", a.err);
    assert_eq!(a.out, b.out);
    assert!(a.out.contains("c prng chacha8 seed 9"));
    let path = scratch("gen.inst");
    fs::write(&path, &a.out).unwrap();
    let solved = run(&["solve", path.to_str().unwrap()]);
    assert!(matches!(solved.code, ExitCode::Positive | ExitCode::Negative), "{}", solved.err);

    let forest = scratch("gen.forest");
    let g = run(&["generate", "wpc", "--seed", "4", "--forest-out", forest.to_str().unwrap()]);
    let graph = scratch("gen.gr");
    fs::write(&graph, &g.out).unwrap();
    let check = run(&["check-cert", graph.to_str().unwrap(), forest.to_str().unwrap()]);
    assert_eq!(check.code, ExitCode::Positive);

    let planted = run(&["generate", "plant", "--obstruction", "hole-6", "--seed", "2"]);
    fs::write(&graph, &planted.out).unwrap();
    assert_eq!(run(&["recognize", graph.to_str().unwrap()]).code, ExitCode::Negative);
}

#[test]
fn bench_writes_csv() {
    let r = run(&["bench", "kernel", "--sizes", "300,600", "--k", "2", "--runs", "1"]);
    assert_eq!(r.code, ExitCode::Positive, "{}", r.err);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(lines[0], BENCH_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[1..].iter().all(|l| l.starts_with("kernel,") && l.split(',').count() == 7));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["frobnicate"]).code, ExitCode::Usage);
    assert_eq!(run(&["recognize", "/definitely/missing.gr"]).code, ExitCode::Usage);
    assert_eq!(run(&["solve", "--variant", "nope", &data("sample_srdp.inst")]).code, ExitCode::Usage);
    assert_eq!(run(&["generate", "obstruction", "--obstruction", "W-9-1"]).code, ExitCode::Usage);
    let r = run_with_stdin(&["recognize", "-"], "p graph 2 1\ne 0 7\n");
    assert_eq!(r.code, ExitCode::Usage);
    assert!(r.err.starts_with("error:"));
    assert_eq!(ExitCode::Internal.code(), 3);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_wpc");
    let status = std::process::Command::new(bin).args(["recognize", &data("o1.gr")]).output().unwrap();
    assert_eq!(status.status.code(), Some(1));
    let status = std::process::Command::new(bin)
        .env("WPC_THREADS", "1")
        .args(["recognize", &data("p5.gr")])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
}
