use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyper-toffoli")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn table3_prints_the_three_couplings() {
    let out = cli(&["table3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in ["90.53%", "98.90%", "99.57%"] {
        assert!(text.contains(needle), "{text}");
    }
}

#[test]
fn simulate_lists_every_branch() {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/single.cfg");
    let out = cli(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.trim_start().starts_with('[')).count(), 16);
    assert!(text.contains("fidelity=1.000000000000"));
}

#[test]
fn sweep_writes_csv_to_stdout_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.cfg", "variant = pol_toffoli\ng = 1\nsweep_g_over_kappa = 0.5, 1.5, 2.4\n");
    let out = cli(&["sweep", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "g_over_kappa,eta_T,eta_D,fidelity,trace");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0.5,0.90528695"));
}

#[test]
fn sweep_output_is_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.cfg", "variant = hybrid_3\ng = 1.5\noutput = result.csv\n");
    assert!(cli(&["sweep", "--config", &cfg]).status.success());
    let csv = std::fs::read_to_string(dir.path().join("result.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("1.5,"));
}

#[test]
fn rus_reports_an_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "r.cfg", "variant = hyper_toffoli\ng = 1.5\nseed = 7\n");
    let out = cli(&["rus", "--config", &cfg, "--rounds", "2", "--trials", "20000"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("analytic         0.9995"), "{text}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.cfg", "variant = hyper_toffoli\ng = -1\n");
    let out = cli(&["simulate", "--config", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let missing = dir.path().join("absent.cfg");
    assert_eq!(cli(&["simulate", "--config", missing.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(cli(&["simulate"]).status.code(), Some(1));
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));

    let dark = write(dir.path(), "dark.cfg", "variant = pol_toffoli\ng = 0\n");
    assert_eq!(cli(&["simulate", "--config", &dark]).status.code(), Some(3));
    assert_eq!(cli(&["rus", "--config", &dark, "--rounds", "0", "--trials", "10"]).status.code(), Some(1));
}
