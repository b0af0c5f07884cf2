use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn tm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tm-spectra"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = tm(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn record<'a>(doc: &'a Value, quantity: &str) -> &'a Value {
    doc["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["quantity"] == quantity)
        .unwrap()
}

#[test]
fn d2_at_half() {
    let doc = json(&["d2", "--c", "0.5"]);
    assert_eq!(doc["schema_version"], 1);
    let d2 = record(&doc, "d2");
    let (lo, hi) = (d2["lo"].as_f64().unwrap(), d2["hi"].as_f64().unwrap());
    let exact = ((1.0 + 17f64.sqrt()) / 4.0).log2();
    assert!(lo <= exact && exact <= hi && hi - lo < 1e-10);
    assert_eq!(d2["c"], "1/2");
}

#[test]
fn d2_over_a_grid_as_csv() {
    let o = tm(&["d2", "--c", "0:0.5:3", "--format", "csv"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "c,lambda1_lo,lambda1_hi,d2_lo,d2_hi");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0,"));
}

#[test]
fn pressure_at_zero_parameter_is_narrow() {
    let doc = json(&["pressure", "--c", "0", "--t", "1", "--depth", "18"]);
    let r = record(&doc, "pressure");
    let (lo, hi) = (r["lo"].as_f64().unwrap(), r["hi"].as_f64().unwrap());
    assert!(hi - lo <= 0.04);
    assert!(lo >= 0.0);
    assert_eq!(r["params"]["depth"], 18);
    assert_eq!(r["meta"]["mode"], "sup");
}

#[test]
fn pressure_csv_columns() {
    let o = tm(&[
        "pressure", "--c", "1/3", "--t", "-1,0,1", "--depth", "8", "--format", "csv",
    ]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,lo,hi,depth,mode"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "-1.0");
    assert_eq!(first[4], "inf");
}

#[test]
fn infinite_bounds_are_strings() {
    let doc = json(&["pressure", "--c", "1/3", "--t", "-1", "--depth", "8"]);
    assert_eq!(record(&doc, "pressure")["hi"], "inf");
}

#[test]
fn sequence_and_eta() {
    let o = tm(&["sequence", "--c", "1/2", "--length", "4", "--format", "csv"]);
    assert_eq!(
        stdout(&o),
        "n,re,im\n0,1.0,0.0\n1,-1.0,0.0\n2,-1.0,0.0\n3,1.0,0.0\n"
    );
    let doc = json(&["eta", "--c", "1/2", "--max", "3"]);
    let eta1 = &doc["records"][2];
    assert_eq!(eta1["quantity"], "eta.re");
    assert!((eta1["lo"].as_f64().unwrap() + 1.0 / 3.0).abs() < 1e-15);
    let o = tm(&["eta", "--c", "0", "--max", "16", "--theta", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("k,theta,slope\n0,1.0,\n1,2.0,1.0\n"));
}

#[test]
fn riesz_outputs() {
    let o = tm(&["riesz", "--c", "1/2", "--order", "2", "--format", "csv"]);
    assert_eq!(
        stdout(&o),
        "m,re,im\n0,1.0,0.0\n1,-0.25,0.0\n2,-0.5,0.0\n3,0.25,0.0\n"
    );
    let doc = json(&["riesz", "--c", "1/3", "--cylinder", "0", "--buffer", "6"]);
    let r = record(&doc, "cylinder_measure");
    assert!(r["lo"].as_f64().unwrap() > 0.0 && r["hi"].as_f64().unwrap() < 1.0);
    assert_eq!(r["meta"]["clamped"], false);
    assert!(!tm(&["riesz", "--c", "1/3", "--cylinder", "0", "--at", "0.5"])
        .status
        .success());
}

#[test]
fn words_report() {
    let doc = json(&[
        "words",
        "--c",
        "1/3",
        "--m",
        "6",
        "--count",
        "14",
        "--markov-check",
    ]);
    let count = record(&doc, "admissible_words");
    assert_eq!(count["meta"]["exact"], "15361");
    let radius = record(&doc, "spectral_radius");
    assert_eq!(radius["meta"]["irreducible"], true);
    assert_eq!(radius["meta"]["aperiodic"], true);
}

#[test]
fn spectrum_kinds() {
    for kind in ["lq", "birkhoff", "dimension", "quantization", "spectral"] {
        let o = tm(&[
            "spectrum", "--c", "1/2", "--kind", kind, "--depth", "8", "--format", "csv",
        ]);
        assert!(
            o.status.success(),
            "{kind}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let doc = json(&["spectrum", "--c", "1/2", "--kind", "fourier", "--depth", "10"]);
    assert_eq!(doc["records"].as_array().unwrap().len(), 3);
    let plot = scratch("plot.dat");
    let o = tm(&[
        "spectrum",
        "--c",
        "1/3",
        "--depth",
        "6",
        "--emit-plotdata",
        plot.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&plot).unwrap();
    assert_eq!(text.lines().count(), 102);
    assert!(text.starts_with("# c lambda1 d2\n0.0 "));
}

#[test]
fn identical_output_across_worker_counts() {
    for args in [
        &["spectrum", "--c", "1/3", "--kind", "lq", "--depth", "9"][..],
        &["pressure", "--c", "1/2", "--depth", "12"][..],
    ] {
        let one = tm(&[args, &["--workers", "1"]].concat());
        let four = tm(&[args, &["--workers", "4"]].concat());
        let again = tm(&[args, &["--workers", "4"]].concat());
        assert!(one.status.success());
        assert_eq!(one.stdout, four.stdout);
        assert_eq!(four.stdout, again.stdout);
    }
}

#[test]
fn config_file_and_precedence() {
    let cfg = scratch("run.cfg");
    std::fs::write(
        &cfg,
        "# pressure run\nc = 1/3\nt = 0,1\ndepth = 8\nformat = csv\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = tm(&["--config", cfg, "pressure"]);
    let text = stdout(&o);
    assert!(text.starts_with("t,lo,hi,depth,mode\n0.0,"));
    assert_eq!(text.lines().nth(1).unwrap().split(',').nth(3), Some("8"));
    let o = tm(&["--config", cfg, "pressure", "--depth", "6", "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["records"][0]["params"]["depth"], 6);

    let bad = scratch("bad.cfg");
    std::fs::write(&bad, "colour = red\n").unwrap();
    assert_eq!(
        tm(&["--config", bad.to_str().unwrap(), "d2", "--c", "1/2"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn output_file() {
    let path = scratch("d2.json");
    let o = tm(&["d2", "--c", "1/3", "--output", path.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(record(&doc, "d2")["c"], "1/3");
}

#[test]
fn exit_codes() {
    assert_eq!(tm(&["--help"]).status.code(), Some(0));
    assert_eq!(tm(&["--version"]).status.code(), Some(0));
    assert_eq!(tm(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tm(&["d2", "--c", "1/2", "--bogus"]).status.code(), Some(1));
    assert_eq!(tm(&["d2"]).status.code(), Some(1));
    assert_eq!(tm(&["d2", "--c", "1/0"]).status.code(), Some(1));
    assert_eq!(
        tm(&["pressure", "--c", "1/2", "--depth", "40"]).status.code(),
        Some(1)
    );
    // 0.25 as a float sits on a dyadic boundary of the singularity coding
    assert_eq!(tm(&["words", "--c", "2.5e-1", "--m", "3"]).status.code(), Some(2));
}

#[test]
fn verify_quick_passes() {
    let o = tm(&["verify", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(!text.contains("FAIL"));
    let doc = json(&["verify", "--quick", "--format", "json", "--seed", "3"]);
    assert!(doc["records"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["meta"]["passed"] == true));
}
