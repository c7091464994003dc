use std::process::{Command, Output};

use serde_json::Value;

fn kgroups(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_kgroups"));
    c.args(args).env_remove("SEED");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn report(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = kgroups(&full, &[]);
    (serde_json::from_slice(&out.stdout).expect("json report"), out.status.code().unwrap())
}

fn write_config(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("kgroups-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn reciprocity_of_the_steinberg_symbol() {
    let (r, code) = report(&["reciprocity", "--field", "P1(GF(5))", "--symbol", "{t,1-t}"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["product"], "1");
    assert_eq!(r["invariant_checks"][0]["passed"], true);
}

#[test]
fn k2_oracle_is_trivial() {
    let (r, code) = report(&["k2-oracle", "--q", "9"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["group"], "trivial group");
    let text = kgroups(&["k2-oracle", "--q", "9"], &[]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("trivial group"));
}

#[test]
fn report_has_the_versioned_schema() {
    let (r, _) = report(&["k2-oracle", "--q", "4"]);
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(|s| s.as_str()).collect();
    for k in ["schema", "command", "config", "results", "invariant_checks", "seed", "timings"] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert_eq!(keys.len(), 7);
    assert_eq!(r["schema"], kgroups::cli::report_schema_version());
    assert_eq!(r["command"], "k2-oracle");
    assert_eq!(r["timings"], serde_json::json!({}));
    let (t, _) = report(&["k2-oracle", "--q", "4", "--timings"]);
    assert!(t["timings"]["total_ms"].is_number());
}

#[test]
fn exit_codes_distinguish_failures() {
    let (r, code) = report(&["somekawa", "--config", "missing.json"]);
    assert_eq!(code, 2);
    assert_eq!(r["results"]["error"]["kind"], "input");
    assert!(r["results"]["error"]["message"].as_str().unwrap().contains("missing.json"));

    let (_, code) = report(&["tame", "--field", "P1(GF(6))", "--place", "v(t)", "--symbol", "{t}"]);
    assert_eq!(code, 2);
    assert_eq!(kgroups(&["no-such-verb"], &[]).status.code(), Some(2));

    let (r, code) = report(&["reciprocity", "--field", "P1(GF(5))", "--symbol", "{t^3+t+1,t}", "--bound", "1"]);
    assert_eq!(code, 3);
    assert_eq!(r["results"]["error"]["kind"], "bound");

    let bad = write_config("bad.json", r#"{"field": "GF(5)", "groups": ["Gm"], "degree_bound": 2, "colour": 1}"#);
    assert_eq!(report(&["somekawa", "--config", &bad]).1, 2);
    assert_eq!(kgroups::cli::exit_code_for(&kgroups::Error::Invariant("x".into())), 4);
}

#[test]
fn tame_residue_and_order() {
    let (r, code) = report(&["tame", "--field", "P1(GF(5))", "--place", "v(t)", "--symbol", "{t,t}"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["value"], "4");
    assert_eq!(r["results"]["order"], 2);
    let (r, _) = report(&["tame", "--field", "P1(GF(5))", "--place", "v(t-2)", "--symbol", "{(t-2)^3}"]);
    assert_eq!(r["results"]["value"], 3);
}

#[test]
fn somekawa_reports_are_deterministic() {
    let cfg = write_config("gm.json", r#"{"field": "GF(4)", "groups": ["Gm", "Gm"], "degree_bound": 2}"#);
    let a = kgroups(&["--json", "--threads", "1", "somekawa", "--config", &cfg, "--rows"], &[]);
    let b = kgroups(&["--json", "--threads", "5", "somekawa", "--config", &cfg, "--rows"], &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["results"]["group"], "0");
}

#[test]
fn seed_comes_from_the_environment_unless_given() {
    let args = ["--json", "pic0", "--curve", "E(GF(5); 0,1)", "--samples", "20"];
    let env = kgroups(&args, &[("SEED", "7")]);
    let mut with_flag = args.to_vec();
    with_flag.extend(["--seed", "7"]);
    let flag = kgroups(&with_flag, &[("SEED", "99")]);
    let r: Value = serde_json::from_slice(&env.stdout).unwrap();
    assert_eq!(r["seed"], 7);
    assert_eq!(env.stdout, flag.stdout);
    assert_eq!(env.status.code(), Some(0));
}

#[test]
fn phi_check_on_a_random_family() {
    let cfg = write_config("phi.json", r#"{"field": "GF(5)", "groups": ["Gm"], "degree_bound": 2}"#);
    let (r, code) = report(&["phi-check", "--config", &cfg, "--random", "10"]);
    assert_eq!(code, 0);
    assert_eq!(r["invariant_checks"][0]["passed"], true);
    let (r, code) = report(&["phi-check", "--config", &cfg, "--coeffs", "2; t+1; 1"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["checked"], 1);
}

#[test]
fn extended_tame_from_literals() {
    let (r, code) = report(&[
        "extended-tame",
        "--field",
        "P1(GF(5))",
        "--group",
        "Gm x E(GF(5); 0,1)",
        "--place",
        "v(t)",
        "--torus",
        "t+1",
        "--ell",
        "(2,2)",
        "--h",
        "t",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["value"], "((1),(2,2))");
    let (r, code) = report(&["reciprocity", "--field", "P1(GF(5))", "--group", "Gm", "--torus", "t^2+2", "--h", "t-1"]);
    assert_eq!(code, 0);
    assert_eq!(r["invariant_checks"][0]["passed"], true);
}
