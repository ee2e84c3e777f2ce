use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn thermstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermstab"))
        .args(args)
        .env_remove("THERMSTAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.trim_start().starts_with(key)).unwrap_or_else(|| panic!("no {key} in\n{text}"));
    line.split('=').nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn channel_at_t1_equal_t2_is_positive() {
    let o = thermstab(&["channel", "--t1", "1", "--t2", "1", "--tau", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(value(&text, "Gamma"), 1.0);
    assert_eq!(value(&text, "q_pauli_z"), 0.0);
}

#[test]
fn channel_negative_example() {
    let o = thermstab(&["channel", "--t1", "1", "--t2", "2", "--tau", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!((value(&text, "Gamma") - 1.238_651_2).abs() < 1e-6, "{text}");
    assert!((value(&text, "q_pauli_z") + 0.119_325_6).abs() < 1e-6, "{text}");
}

#[test]
fn channel_preset_loads_device_times() {
    let o = thermstab(&["channel", "--preset", "fez"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("T1 = 142.41  T2 = 98.43"), "{text}");
    let tau: f64 = text.split("tau = ").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!((tau - 1.4241).abs() < 1e-12, "{text}");
}

#[test]
fn channel_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let o = thermstab(&["channel", "--t1", "1", "--t2", "1.5", "--tau", "0.2", "--csv", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(path).unwrap();
    assert!(text.starts_with("quantity,value\n"));
    assert!(text.contains("\nfidelity_exact_reset,"));
}

#[test]
fn invalid_channel_parameters_name_the_constraint() {
    let o = thermstab(&["channel", "--t1", "1", "--t2", "3", "--tau", "0.1"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("t2 <= 2*t1"), "{}", stderr(&o));

    let o = thermstab(&["channel", "--t1", "1", "--t2", "1", "--tau", "0.1", "--p1", "0.7"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("p1 must lie in [0, 0.5]"), "{}", stderr(&o));

    let o = thermstab(&["channel", "--preset", "nowhere"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("unknown preset"), "{}", stderr(&o));
}

#[test]
fn delta_d_sweep_crosses_near_pi_over_three() {
    let o = thermstab(&["sweep", "delta_d"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("theta,delta_d\n"));
    let rows = csv_rows(&text);
    let third = std::f64::consts::FRAC_PI_3;
    let nearest = rows
        .iter()
        .min_by(|a, b| (a[0] - third).abs().total_cmp(&(b[0] - third).abs()))
        .unwrap();
    assert!(nearest[1].abs() < 1e-3, "{nearest:?}");
    assert!(rows[0][1] > 0.0 && rows.last().unwrap()[1] < 0.0);
}

#[test]
fn delta_f_sweep_is_positive() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let o = thermstab(&["sweep", "delta_f", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(path).unwrap();
    assert!(text.starts_with("t2_ratio,tau_ratio,delta_f\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2500);
    assert!(rows.iter().all(|r| r[0] > 1.0 && r[0] <= 2.0));
    let min = rows.iter().map(|r| r[2]).fold(f64::INFINITY, f64::min);
    assert!(min > 0.0, "{min}");
}

#[test]
fn delta_f_p1_sweep_header() {
    let o = thermstab(&["sweep", "delta_f_p1", "--p1s", "0.01,0.1", "--tau-ratios", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("p1,tau_ratio,delta_f\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    assert!(rows[0][2] >= rows[1][2] && rows[1][2] > 0.0, "{rows:?}");
}

#[test]
fn overhead_is_one_when_t2_at_most_t1() {
    let o = thermstab(&["sweep", "overhead", "--n-c", "17"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    let low: Vec<_> = rows.iter().filter(|r| r[0] <= 1.0).collect();
    assert!(!low.is_empty());
    assert!(low.iter().all(|r| r[2] == 1.0 && r[3] == 1.0 && r[4] == 1.0));
    assert!(rows.iter().any(|r| r[2] > 1.0));
}

#[test]
fn malformed_grid_is_rejected() {
    let o = thermstab(&["sweep", "delta_f", "--t2-ratios", "1:2"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("malformed grid"), "{}", stderr(&o));
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const NOISELESS: &str = r#"
[code]
kind = "surface"
distance = 3
rounds = 3

[run]
shots = 500
master_seed = 11
"#;

const NOISY: &str = r#"
[code]
kind = "surface"
distance = 3
state = "one"
rounds = 3

[noise]
t1 = 1.0
t2 = 1.5
tau = 0.02

[run]
shots = 2000
master_seed = 4
"#;

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn noiseless_memory_has_zero_ler() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), NOISELESS);
    let out = dir.path().join("out");
    let o = thermstab(&["memory", &cfg, "--output-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = json(&out.join("summary.json"));
    assert_eq!(s["ler"], 0.0);
    assert_eq!(s["gamma_total"], 1.0);
    assert_eq!(s["shots"], 500);
    assert_eq!(s["fallback_count"], 0);
    assert!(s["wall_time"].as_f64().unwrap() >= 0.0);
    assert!(s["ci95"][1].as_f64().unwrap() > 0.0);
    let events = fs::read_to_string(out.join("events.txt")).unwrap();
    assert_eq!(events.lines().count(), 500);
    assert!(events.lines().all(|l| l == "000000000000000000000000 0 +"), "{}", events.lines().next().unwrap());
}

#[test]
fn memory_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), NOISY);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let o = thermstab(&["memory", &cfg, "--output-dir", a.to_str().unwrap(), "--threads", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = thermstab(&["memory", &cfg, "--output-dir", b.to_str().unwrap(), "--threads", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["events.txt", "config.toml", "detector_model.txt", "manifest.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let events = fs::read_to_string(a.join("events.txt")).unwrap();
    assert!(events.lines().any(|l| l.contains('1')));
    let s = json(&a.join("summary.json"));
    let gamma = s["gamma_total"].as_f64().unwrap();
    assert!(gamma > 1.0);
    assert!(s["negative_shots"].as_u64().unwrap() > 0);
    assert!(events.lines().any(|l| l.ends_with('-')));
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), NOISY);
    let a = dir.path().join("a");
    assert!(thermstab(&["memory", &cfg, "--output-dir", a.to_str().unwrap()]).status.success());
    let manifest = json(&a.join("manifest.json"));
    assert_eq!(manifest["master_seed"], 4);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));

    let replay = dir.path().join("replay.toml");
    fs::write(&replay, manifest["config"].as_str().unwrap()).unwrap();
    let b = dir.path().join("b");
    assert!(thermstab(&["memory", replay.to_str().unwrap(), "--output-dir", b.to_str().unwrap()]).status.success());
    assert_eq!(fs::read(a.join("events.txt")).unwrap(), fs::read(b.join("events.txt")).unwrap());
    assert_eq!(json(&b.join("manifest.json"))["config_sha256"], manifest["config_sha256"]);
}

#[test]
fn canonical_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), NOISY);
    let first = thermstab(&["memory", &cfg, "--check"]);
    assert!(first.status.success(), "{}", stderr(&first));
    let again = write_config(dir.path(), &stdout(&first));
    let second = thermstab(&["memory", &again, "--check"]);
    assert_eq!(stdout(&first), stdout(&second));
    assert!(stdout(&first).contains("model = \"exact_qpd\""));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &NOISELESS.replace("rounds = 3", "rounds = 3\nlattice = \"hex\""));
    let o = thermstab(&["memory", &cfg, "--check"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("lattice"), "{}", stderr(&o));
}

#[test]
fn config_errors_are_listed_together() {
    let dir = tempfile::tempdir().unwrap();
    let body = NOISY.replace("distance = 3", "distance = 2").replace("t2 = 1.5", "t2 = 5.0").replace("shots = 2000", "shots = 0");
    let cfg = write_config(dir.path(), &body);
    let o = thermstab(&["memory", &cfg]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("3 problem(s)"), "{err}");
    for needle in ["code.distance", "t2 <= 2*t1", "run.shots"] {
        assert!(err.contains(needle), "{needle} missing from {err}");
    }
}

#[test]
fn bb_memory_runs() {
    let dir = tempfile::tempdir().unwrap();
    let body = "[code]\nkind = \"bb\"\npreset = \"18_4_4\"\n\n[noise]\npreset = \"average\"\n\n[run]\nshots = 200\nmaster_seed = 2\n";
    let cfg = write_config(dir.path(), body);
    let out = dir.path().join("bb");
    let o = thermstab(&["memory", &cfg, "--output-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = json(&out.join("summary.json"));
    assert_eq!(s["shots"], 200);
    assert!(s["gamma_total"].as_f64().unwrap() >= 1.0);
    let first = fs::read_to_string(out.join("events.txt")).unwrap();
    let line = first.lines().next().unwrap();
    let fields: Vec<_> = line.split(' ').collect();
    assert_eq!(fields[1].len(), 4, "{line}");
}

#[test]
fn oracle_check_passes() {
    let o = thermstab(&["oracle-check", "--draws", "20", "--shots", "20000"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 4, "{text}");
}
