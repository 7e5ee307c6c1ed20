use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use strongfield::scenario::Scenario;
use tempfile::TempDir;

const HYDROGEN: &str = r#"{
  "schema_version": 1,
  "atom": {"Z_eff": 1, "I_B_eV": 13.6},
  "laser": {"wavelength_nm": 800, "intensity_Wcm2": 1e14}
}"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_strongfield"));
    c.env_remove("STRONGFIELD_THREADS");
    c
}

fn scenario(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("scenario.json");
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], scen: &Path, out: Option<&Path>) -> Output {
    let mut c = bin();
    c.args(args).arg("--scenario").arg(scen);
    if let Some(o) = out {
        c.arg("--out").arg(o);
    }
    c.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value(csv: &str, key: &str) -> f64 {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .and_then(|rest| rest.split(',').next())
        .unwrap_or_else(|| panic!("{key} missing"))
        .parse()
        .unwrap()
}

#[test]
fn regime_of_hydrogen_at_800nm() {
    let d = TempDir::new().unwrap();
    let s = scenario(d.path(), HYDROGEN);
    let out = d.path().join("out");
    let o = run(&["regime"], &s, Some(&out));
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("regime_regime.csv")).unwrap();
    assert!(csv.starts_with("# command: regime\n# scenario: {"));
    assert_eq!(value(&csv, "cutoff_index"), 4.0);
    assert!((value(&csv, "keldysh") - 1.067).abs() < 1e-3);
    assert!((value(&csv, "photon_energy") - 1.5498).abs() < 1e-4);
    assert!((value(&csv, "quiver_amplitude") - 16.456).abs() < 1e-3);
}

#[test]
fn shift_table_text_carries_exact_coefficients() {
    let d = TempDir::new().unwrap();
    let s = scenario(d.path(), HYDROGEN);
    let o = run(&["shifts", "--max-n", "4", "--format", "text"], &s, None);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    for needle in [
        "dE(n=2,l=1,lz=±1) = (-1/480)*rho",
        "dE(n=2,l=1,lz=0) = (1/240)*rho",
        "dE(n=3,l=1,lz=0) = (1/810)*rho",
        "dE(n=4,l=3,lz=±3) = (-1/32256)*rho",
        "dE(n=4,l=1,lz=0) = (1/1920)*rho",
    ] {
        assert!(text.contains(needle), "missing {needle}");
    }
}

#[test]
fn invalid_scenario_writes_nothing() {
    let d = TempDir::new().unwrap();
    let s = scenario(d.path(), &HYDROGEN.replace("1e14", "-1e14"));
    let out = d.path().join("out");
    let o = run(&["regime"], &s, Some(&out));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("intensity"));
    assert!(!out.exists() || fs::read_dir(&out).unwrap().next().is_none());
}

#[test]
fn unknown_keys_are_all_listed() {
    let d = TempDir::new().unwrap();
    let text = r#"{"schema_version":1,"atom":{"Z_eff":1,"charge":2},
        "laser":{"wavelength_nm":800,"intensity_Wcm2":1e14,"polarisation":"x"},"extra":true}"#;
    let s = scenario(d.path(), text);
    let o = run(&["regime"], &s, None);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    for k in ["atom.charge", "laser.polarisation", "extra"] {
        assert!(e.contains(k), "{k} not reported in {e}");
    }
}

#[test]
fn csv_output_is_deterministic() {
    let d = TempDir::new().unwrap();
    let s = scenario(d.path(), HYDROGEN);
    for cmd in ["regime", "shifts", "kick", "twolevel"] {
        let (a, b) = (d.path().join(format!("{cmd}_a")), d.path().join(format!("{cmd}_b")));
        assert!(run(&[cmd], &s, Some(&a)).status.success());
        let o = bin().args([cmd, "--scenario"]).arg(&s).arg("--out").arg(&b).env("STRONGFIELD_THREADS", "1").output().unwrap();
        assert!(o.status.success());
        let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(!names.is_empty());
        for n in names {
            assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{cmd}: {n:?} differs");
        }
    }
}

#[test]
fn json_report_embeds_a_reloadable_scenario() {
    let d = TempDir::new().unwrap();
    let s = scenario(d.path(), HYDROGEN);
    let o = run(&["rigidity", "--format", "json", "--max-n", "3"], &s, None);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "rigidity");
    let back = Scenario::from_value(v["scenario"].clone()).unwrap();
    assert_eq!(back.options.max_n, Some(3));
    assert_eq!(back.resolved(), back);
    let rows = v["tables"]["rigidity"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(v["summary"]["monotone_decreasing"], false);
}

#[test]
fn exit_codes_follow_error_classes() {
    let d = TempDir::new().unwrap();
    let s = scenario(d.path(), HYDROGEN);
    // I/O
    let o = run(&["regime"], &d.path().join("missing.json"), None);
    assert_eq!(o.status.code(), Some(1));
    // validation
    assert_eq!(run(&["shifts", "--max-n", "9"], &s, None).status.code(), Some(2));
    let o = bin().args(["regime", "--scenario"]).arg(&s).env("STRONGFIELD_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    // regime: no channel above threshold below n0 = 4
    let o = run(&["rate", "--max-n", "2"], &s, None);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn warnings_reach_stderr_and_metadata() {
    let d = TempDir::new().unwrap();
    let s = scenario(d.path(), HYDROGEN);
    let out = d.path().join("out");
    let o = run(&["rate"], &s, Some(&out));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning: "));
    let csv = fs::read_to_string(out.join("rate_channels.csv")).unwrap();
    assert!(csv.contains("# warning: "));
    assert!(value(&csv.replace(": ", ","), "# n0") == 4.0);
}
