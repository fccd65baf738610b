use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn moshlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moshlab"))
        .args(args)
        .current_dir(dir)
        .env_remove("MOSHLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

fn sidecar(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const SMALL: [&str; 6] = ["--nx", "7", "--nt", "5", "--np", "5"];

#[test]
fn csv_headers_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (cmd, file, head) in [
        ("shutter-density", "shutter_density", "x_si,t_si,density"),
        ("detector", "detector", "t_si,density,classical_density"),
        ("wigner-map", "wigner_map", "x_si,p_si,w_value"),
        ("box-density", "box_density", "x_si,t_si,density"),
        ("tonks-density", "tonks_density", "x_si,t_si,density"),
    ] {
        let out = moshlab(d, &[&[cmd][..], &SMALL].concat());
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(header(&d.join(format!("{file}.csv"))), head);
        let meta = sidecar(&d.join(format!("{file}.json")));
        assert_eq!(meta["command"], cmd);
        assert!(meta["unit_system"]["time_s"].as_f64().unwrap() > 0.0);
        for e in meta["scenario"].as_array().unwrap() {
            assert!(e["si"].is_number() && e["internal"].is_number(), "{cmd}: {e}");
        }
    }
    assert_eq!(header(&d.join("box_density_trajectory.csv")), "t_si,mean_x_si,t_n_si");
    assert!(sidecar(&d.join("wigner_map.json"))["excluded_region"].as_str().unwrap().contains("exactly 0"));
    let text = std::fs::read_to_string(d.join("shutter_density.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 7 * 5);
    assert!(!text.contains('\r'));
    // 17 significant digits: one before the point, sixteen after.
    let first = text.lines().nth(1).unwrap().split(',').next().unwrap();
    assert_eq!(first.split('e').next().unwrap().trim_start_matches('-').len(), 18);
}

#[test]
fn single_cell_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = moshlab(dir.path(), &["shutter-density", "--nx", "1", "--nt", "1", "--output", "one.csv"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("one.csv")).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn detector_classical_column_is_a_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = moshlab(dir.path(), &["detector", "--nt", "301"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("detector.csv")).unwrap();
    let step: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(step[0], 0.0);
    assert_eq!(*step.last().unwrap(), 1.0);
    let rises = step.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(rises, 1);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("run.toml"), "L_um = 40.0\nn = 3\nnx = 4\nnt = 3\na_over_g = 0.0\noutput = \"from_file.csv\"\n").unwrap();
    let out = moshlab(d, &["box-density", "--config", "run.toml", "--n", "2", "--a-cm-s2", "1.0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta = sidecar(&d.join("from_file.json"));
    let echo = meta["scenario"].as_array().unwrap();
    let get = |name: &str| echo.iter().find(|e| e["name"] == name).unwrap()["si"].as_f64().unwrap();
    assert_eq!(get("n"), 2.0);
    assert!((get("trap_length") - 40e-6).abs() < 1e-18);
    assert!((get("acceleration") - 0.01).abs() < 1e-15);
    assert_eq!(std::fs::read_to_string(d.join("from_file.csv")).unwrap().lines().count(), 1 + 4 * 3);
}

#[test]
fn json_format_embeds_the_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = moshlab(dir.path(), &["box-density", "--nx", "3", "--nt", "2", "--format", "json", "--output", "b.json"]);
    assert!(out.status.success());
    let doc = sidecar(&dir.path().join("b.json"));
    assert_eq!(doc["data"]["rows"].as_array().unwrap().len(), 6);
    assert_eq!(doc["trajectory"]["columns"][2], "t_n_si");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // Configuration errors.
    assert_eq!(moshlab(d, &["shutter-density", "--nx", "0"]).status.code(), Some(2));
    assert_eq!(moshlab(d, &["shutter-density", "--t-min-ms", "0"]).status.code(), Some(2));
    assert_eq!(moshlab(d, &["box-density", "--L-um", "-5"]).status.code(), Some(2));
    assert_eq!(moshlab(d, &["shutter-density", "--mass", "argon"]).status.code(), Some(2));
    assert_eq!(moshlab(d, &["shutter-density", "--nx", "20000", "--nt", "20000"]).status.code(), Some(2));
    assert_eq!(moshlab(d, &["no-such-command"]).status.code(), Some(2));
    std::fs::write(d.join("bad.toml"), "p_over_m = 1.0\n").unwrap();
    assert_eq!(moshlab(d, &["shutter-density", "--config", "bad.toml"]).status.code(), Some(2));
    // I/O errors.
    assert_eq!(moshlab(d, &["shutter-density", "--config", "missing.toml"]).status.code(), Some(3));
    let out = moshlab(d, &["shutter-density", "--nx", "2", "--nt", "2", "--output", "no/such/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(3));
    // Validation failure.
    let out = moshlab(d, &["validate", "--perturb-w", "1e-3", "--report", "r.json"]);
    assert_eq!(out.status.code(), Some(1));
    let report = sidecar(&d.join("r.json"));
    let first = &report["report"]["checks"][0];
    assert_eq!(first["id"], 1);
    assert_eq!(first["passed"], false);
    let env_bad = Command::new(env!("CARGO_BIN_EXE_moshlab"))
        .args(["shutter-density", "--nx", "2", "--nt", "2"])
        .current_dir(d)
        .env("MOSHLAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(env_bad.status.code(), Some(2));
}

#[test]
fn output_does_not_depend_on_the_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["tonks-density", "--nx", "61", "--nt", "7"];
    assert!(moshlab(d, &[&args[..], &["--threads", "1", "--output", "a.csv"]].concat()).status.success());
    assert!(moshlab(d, &[&args[..], &["--threads", "4", "--output", "b.csv"]].concat()).status.success());
    assert_eq!(std::fs::read(d.join("a.csv")).unwrap(), std::fs::read(d.join("b.csv")).unwrap());
}
