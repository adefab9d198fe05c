use std::path::PathBuf;
use std::process::{Command, Output};

fn itermap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_itermap")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("itermap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn enum_graphs_golden() {
    let out = itermap(&["enum-graphs", "--d", "2", "--r", "0", "--k", "3"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "3 0 2; 1-2:-1,0; 1-3:-1,0; 2-3:-1,0\n\
         3 0 2; 1-2:-1,0; 1-3:0,1; 2-3:0,1\n\
         3 0 2; 1-2:0,1; 1-3:-1,0; 2-3:0,1\n\
         3 0 2; 1-2:0,1; 1-3:0,1; 2-3:-1,0\n"
    );
    let out = itermap(&["enum-graphs", "--d", "2", "--r", "1", "--k", "2"]);
    assert_eq!(stdout(&out), "2 1 2; 1-2:-1,0\n2 1 2; 1-2:0,1\n2 1 2; 1-2:1,1\n");
}

#[test]
fn image_csv_row() {
    let out = itermap(&["image", "--p", "5", "--A", "1", "--C", "1", "--N", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "p,d,A,C,N,image_size,mu_p,norm_err,precondition");
    assert!(lines[2].starts_with("5,2,1,1,2,3,1.875000,"));
}

#[test]
fn ucount_with_enumeration() {
    let out = itermap(&["ucount", "--d", "2", "--r", "1", "--k", "3", "--enumerate"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["records"][0]["u"], "10");
    assert_eq!(v["records"][0]["enumerated"], 10);
}

#[test]
fn mu_exact_column() {
    let out = itermap(&["mu", "--d", "3", "--r", "2", "--format", "csv"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("\n2,19/81,"));
}

#[test]
fn exit_codes() {
    // invalid configuration
    assert_eq!(itermap(&["orbit", "--p", "6"]).status.code(), Some(2));
    assert_eq!(itermap(&["image", "--p", "7", "--d", "4"]).status.code(), Some(2));
    assert_eq!(itermap(&["orbit"]).status.code(), Some(2));
    // budget
    assert_eq!(itermap(&["curves", "--p", "223", "--k", "2"]).status.code(), Some(3));
    assert_eq!(itermap(&["moments", "--p", "13", "--d", "4", "--N", "4"]).status.code(), Some(3));
    // success
    assert_eq!(itermap(&["decomp", "--p", "5", "--k", "3"]).status.code(), Some(0));
    assert_eq!(itermap(&["orbit", "--p", "7", "--N", "3"]).status.code(), Some(0));
}

#[test]
fn sweep_reruns_are_byte_identical() {
    for (kind, format) in [("theorem", "csv"), ("theorem", "json"), ("collision", "csv"), ("graph", "json")] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = scratch(&format!("{kind}-{run}.{format}"));
            let status = itermap(&[
                "sweep", "--kind", kind, "--d", "2", "--N", "2", "--p-min", "100", "--p-max", "400", "--per-prime",
                "4", "--seed", "17", "--require-precondition", "--format", format, "--out", path.to_str().unwrap(),
            ])
            .status;
            assert!(status.success());
            outputs.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{kind} {format}");
        assert!(String::from_utf8_lossy(&outputs[0]).contains("17"));
    }
}

#[test]
fn sweep_all_pairs_csv() {
    let out = itermap(&["sweep", "--d", "2", "--N", "1", "--p-min", "3", "--p-max", "7", "--policy", "all", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# seed=none generator=all-pairs log_base=e"));
    // A in 1..p, C in 0..p for p = 3, 5, 7
    assert_eq!(text.lines().count(), 2 + 6 + 20 + 42);
}

#[test]
fn verify_writes_manifest() {
    let path = scratch("manifest.json");
    let out = itermap(&["verify", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    for expected in ["mu-v-consistency", "enumeration-u", "q-identity", "decomposition", "weil-bezout"] {
        assert!(names.contains(&expected), "{expected}");
    }
}
