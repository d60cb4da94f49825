use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SWEEP: &str = "\
[scenario]
name = small-sweep
L = 1
M = 1
nx = 16
ny = 30

[physics]
delta_mismatch = 0.1

[phasefield]
eps = 1/4, 1/8
volume_m = 0.5
init = perturbed
amplitude = 0.2
seed = 3
max_outer = 6
";

const FILM: &str = "\
[scenario]
L = 1
M = 1
nx = 16
ny = 30
[phasefield]
eps = 0.1
[profile]
x = 0, 0.5, 1
h = 0.4, 0.6, 0.5
";

fn sfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfl"))
        .args(args)
        .output()
        .unwrap()
}

fn run_in(dir: &Path, config: &str, command: &str, out: &str, extra: &[&str]) -> Output {
    let cfg = dir.join(format!("{out}.conf"));
    fs::write(&cfg, config).unwrap();
    let out_dir = dir.join(out);
    let mut args = vec![
        command,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--quiet",
    ];
    args.extend_from_slice(extra);
    sfl(&args)
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn sweep_csvs_are_byte_identical_across_runs() {
    let tmp = TempDir::new().unwrap();
    for name in ["a", "b"] {
        let o = run_in(tmp.path(), SWEEP, "gamma-sweep", name, &["--seed", "11"]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let manifest = report(&tmp.path().join("a"))["manifest"]
        .as_array()
        .unwrap()
        .clone();
    assert!(manifest.iter().any(|m| m == "sweep.csv"));
    for m in &manifest {
        let m = m.as_str().unwrap();
        let a = fs::read(tmp.path().join("a").join(m)).unwrap();
        let b = fs::read(tmp.path().join("b").join(m)).unwrap();
        assert!(a == b, "{m} differs between runs");
    }
    let sweep = fs::read_to_string(tmp.path().join("a/sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 3);
    assert_eq!(
        sweep.lines().next(),
        Some("eps,total,elastic,surface_proxy,l1_to_sharp")
    );
}

#[test]
fn seed_changes_perturbed_runs() {
    let tmp = TempDir::new().unwrap();
    run_in(tmp.path(), SWEEP, "minimize", "a", &["--seed", "1"]);
    run_in(tmp.path(), SWEEP, "minimize", "b", &["--seed", "2"]);
    let a = fs::read(tmp.path().join("a/trace.csv")).unwrap();
    let b = fs::read(tmp.path().join("b/trace.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn manifest_matches_directory() {
    let tmp = TempDir::new().unwrap();
    let o = run_in(tmp.path(), SWEEP, "minimize", "m", &[]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let dir = tmp.path().join("m");
    let mut listed: Vec<String> = report(&dir)["manifest"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m.as_str().unwrap().to_string())
        .collect();
    let mut on_disk: Vec<String> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "report.json")
        .collect();
    listed.sort();
    on_disk.sort();
    assert_eq!(listed, on_disk);
    for f in [
        "trace.csv",
        "energy.csv",
        "profile.csv",
        "v.dump",
        "u1.dump",
        "u2.dump",
    ] {
        assert!(listed.iter().any(|m| m == f), "{f} missing");
    }
    // wall time lives only in the report
    let energy = fs::read_to_string(dir.join("energy.csv")).unwrap();
    assert!(!energy.contains("time"));
    assert!(report(&dir)["wall_time_secs"].as_f64().is_some());
}

#[test]
fn config_hash_ignores_key_order() {
    let tmp = TempDir::new().unwrap();
    let reordered = "\
[profile]
h = 0.4, 0.6, 0.5
x = 0, 0.5, 1
[phasefield]
eps = 0.1
[scenario]
ny = 30
nx = 16
M = 1
L = 1
";
    assert_eq!(
        run_in(tmp.path(), FILM, "evaluate", "a", &[]).status.code(),
        Some(0)
    );
    assert_eq!(
        run_in(tmp.path(), reordered, "evaluate", "b", &[])
            .status
            .code(),
        Some(0)
    );
    let ha = report(&tmp.path().join("a"))["config_hash"].clone();
    let hb = report(&tmp.path().join("b"))["config_hash"].clone();
    assert_eq!(ha, hb);
    let energies = fs::read_to_string(tmp.path().join("a/energies.csv")).unwrap();
    assert!(energies.lines().any(|l| l.starts_with("Gbar,")));
}

#[test]
fn usage_errors_exit_with_one() {
    let tmp = TempDir::new().unwrap();
    let bad = FILM.replace("[phasefield]", "[physics]\np = 1\n[phasefield]");
    let o = run_in(tmp.path(), &bad, "evaluate", "bad", &[]);
    assert_eq!(o.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("line 7") && msg.contains("p > 1"), "{msg}");

    let dup = FILM.replace("nx = 16", "nx = 16\nnx = 8");
    let o = run_in(tmp.path(), &dup, "evaluate", "dup", &[]);
    assert_eq!(o.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("line 5") && msg.contains("line 4"), "{msg}");

    assert_eq!(
        sfl(&["no-such-command", "--config", "x"]).status.code(),
        Some(1)
    );
    assert_eq!(sfl(&["evaluate"]).status.code(), Some(1));
}

#[test]
fn failed_assertion_exits_with_two() {
    let tmp = TempDir::new().unwrap();
    // edges off the line lattice leave a quantization error far above 1e-9
    let cfg = "\
[scenario]
L = 1
M = 1
nx = 32
ny = 32
[phasefield]
eps = 0.1
[void]
rect = 0.3, 0.7, 0.3, 0.7
[slice]
line_spacing = 1/64
tol = 1e-9
";
    let o = run_in(tmp.path(), cfg, "slice-check", "s", &[]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(report(&tmp.path().join("s"))["status"], "assertion-failed");
}

#[test]
fn collapse_bench_reports_gaps() {
    let tmp = TempDir::new().unwrap();
    let cfg = "[scenario]\nL = 1\nM = 1\nnx = 8\nny = 8\n[phasefield]\neps = 0.1\n[collapse]\nlevels = 4\n";
    let o = run_in(tmp.path(), cfg, "collapse-bench", "c", &[]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(tmp.path().join("c/collapse.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("1,0.5,2,1,1"));
    assert_eq!(csv.lines().count(), 5);
}
