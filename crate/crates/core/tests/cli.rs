//! End-to-end tests of the `sst` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};
use sst::cli::Instance;
use sst::verify::{argmax_sampler, mc_frequencies, FrequencyTable};
use sst::{StructureSpec, UtilitySpec};

/// Scratch directory unique to one test.
struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("sst-cli-{}-{name}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, body: &Value) -> String {
        let path = self.0.join(name);
        std::fs::write(&path, body.to_string()).unwrap();
        path.to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn sst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sst")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    v["error"]["kind"].as_str().unwrap().to_string()
}

fn k3() -> Value {
    json!({"kind": "spanning_tree", "graph": {"num_nodes": 3, "edges": [[0, 1], [0, 2], [1, 2]]}})
}

#[test]
fn solve_one_hot() {
    let dir = Scratch::new("solve");
    let spec = dir.file("onehot3.json", &json!({"kind": "one_hot", "n": 3}));
    let u = dir.file("u.json", &json!([0.1, 2.0, -1.0]));
    let out = sst(&["solve", "--spec", &spec, "--utilities", &u]);
    assert_eq!(stdout_json(&out), json!({"vertex": [0, 1, 0], "objective": 2.0}));

    let csv = sst(&["solve", "--spec", &spec, "--utilities", &u, "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap(), "vertex,objective\n010,2.0\n");
}

#[test]
fn wrapped_utilities_and_out_file() {
    let dir = Scratch::new("out");
    let spec = dir.file("onehot3.json", &json!({"kind": "one_hot", "n": 3}));
    let u = dir.file("u.json", &json!({"u": [3.0, 2.0, -1.0]}));
    let target = dir.0.join("result.json");
    let out = sst(&["solve", "--spec", &spec, "--utilities", &u, "--out", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(written["vertex"], json!([1, 0, 0]));
}

#[test]
fn relax_k3_expfam() {
    let dir = Scratch::new("relax");
    let spec = dir.file("k3tree.json", &k3());
    let u = dir.file("zeros.json", &json!([0.0, 0.0, 0.0]));
    let out = sst(&[
        "relax", "--spec", &spec, "--regularizer", "expfam", "--temperature", "1", "--utilities", &u,
    ]);
    let x: Vec<f64> = serde_json::from_value(stdout_json(&out)["x"].clone()).unwrap();
    let rounded: Vec<String> = x.iter().map(|v| format!("{v:.4}")).collect();
    assert_eq!(rounded, ["0.6667", "0.6667", "0.6667"]);

    let m = sst(&["marginals", "--spec", &spec, "--utilities", &u, "--bruteforce"]);
    let y: Vec<f64> = serde_json::from_value(stdout_json(&m)["x"].clone()).unwrap();
    for (a, b) in x.iter().zip(&y) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn verify_is_deterministic() {
    let a = sst(&["verify", "--suite", "gumbel-max", "--seed", "7"]);
    let b = sst(&["verify", "--suite", "gumbel-max", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let checks = stdout_json(&a);
    assert_eq!(checks[0]["suite"], "gumbel-max");
    assert_eq!(checks[0]["pass"], true);
}

#[test]
fn sample_instance_round_trips() {
    let dir = Scratch::new("sample");
    let instance = Instance {
        structure: StructureSpec::KSubsets { n: 4, k: 2 },
        utility: UtilitySpec::gumbel(vec![0.5, 0.0, -0.5, 1.0]).unwrap(),
        relaxation: None,
        seed: 11,
        draws: 25_000,
    };
    let text = serde_json::to_value(&instance).unwrap();
    let back: Instance = serde_json::from_value(text.clone()).unwrap();
    assert_eq!(back, instance);

    let path = dir.file("instance.json", &text);
    let out = stdout_json(&sst(&["sample", "--instance", &path]));
    let table: FrequencyTable = serde_json::from_value(out["table"].clone()).unwrap();
    let direct = mc_frequencies(
        argmax_sampler(&instance.structure, &instance.utility).unwrap(),
        instance.draws,
        instance.seed,
    )
    .unwrap();
    assert_eq!(table, direct);
    assert_eq!(table.support.len(), 6);

    // flags override the file
    let out = stdout_json(&sst(&["sample", "--instance", &path, "--draws", "10", "--seed", "3"]));
    assert_eq!(out["table"]["total"], 10);
    assert_eq!(out["seed"], 3);
}

#[test]
fn enumerate_and_guard() {
    let dir = Scratch::new("enumerate");
    let k4 = dir.file(
        "k4.json",
        &json!({"kind": "spanning_tree", "graph": {"num_nodes": 4,
            "edges": [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]}}),
    );
    let out = stdout_json(&sst(&["enumerate", "--spec", &k4]));
    assert_eq!(out["count"], 16);

    let big = dir.file("subsets.json", &json!({"kind": "subsets", "n": 8}));
    let out = Command::new(env!("CARGO_BIN_EXE_sst"))
        .args(["enumerate", "--spec", &big])
        .env("SST_MAX_ENUM", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "invalid_input");
}

#[test]
fn exit_codes() {
    let dir = Scratch::new("exit");
    let spec = dir.file("onehot3.json", &json!({"kind": "one_hot", "n": 3}));
    let short = dir.file("u2.json", &json!([1.0, 2.0]));
    let out = sst(&["solve", "--spec", &spec, "--utilities", &short]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "invalid_input");

    let bad_spec = dir.file("bad.json", &json!({"kind": "k_subsets", "n": 3, "k": 3}));
    let u3 = dir.file("u3.json", &json!([1.0, 2.0, 3.0]));
    assert_eq!(sst(&["solve", "--spec", &bad_spec, "--utilities", &u3]).status.code(), Some(1));

    let matching = dir.file("matching.json", &json!({"kind": "matching", "n": 3}));
    let u9 = dir.file("u9.json", &json!([0.3, 0.1, 0.2, 0.0, 0.5, 0.1, 0.2, 0.4, 0.0]));
    let out = sst(&[
        "relax", "--spec", &matching, "--utilities", &u9, "--regularizer", "shannon",
        "--temperature", "1", "--tol", "1e-14", "--max-iter", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "solver_failure");

    let out = sst(&[
        "gradcheck", "--spec", &spec, "--utilities", &u3, "--regularizer", "shannon", "--tolerance", "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_kind(&out), "verification_failure");

    let out = sst(&["gradcheck", "--spec", &spec, "--utilities", &u3, "--regularizer", "shannon"]);
    assert_eq!(stdout_json(&out)["pass"], true);

    assert_eq!(sst(&["--version"]).status.code(), Some(0));
    assert_eq!(sst(&["relax"]).status.code(), Some(1));
}
