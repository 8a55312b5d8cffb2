use std::path::Path;
use std::process::{Command, Output};

fn vlcsec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vlcsec")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const SCENARIO: &str = "\
# LED
m = 1
area = 1e-4
filter_gain = 1
concentrator_gain = 1
fov_deg = 60
bob.distance = 2
bob.phi_deg = 0
bob.psi_deg = 0
bob.sigma2 = 1
bob.varsigma2 = 1.5
eve.distance = 2
eve.phi_deg = 0
eve.psi_deg = 0
eve.sigma2 = 1
eve.varsigma2 = 1.5
";

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn gain_reports_colocated_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.txt", SCENARIO);
    let o = vlcsec(&["gain", &f, "--csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("h_b,h_e,ratio,m,n,degenerate_eve"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[2], "1");
    assert_eq!(row[5], "false");
}

#[test]
fn gain_flags_degenerate_eavesdropper() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.txt", &SCENARIO.replace("eve.psi_deg = 0", "eve.psi_deg = 80"));
    let o = vlcsec(&["gain", &f]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("H_E      = 0"));
    assert!(text.contains("degenerate eavesdropper"));
}

#[test]
fn missing_key_exits_two_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.txt", &SCENARIO.replace("eve.sigma2 = 1\n", ""));
    let o = vlcsec(&["gain", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("eve.sigma2"));
}

#[test]
fn parse_error_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.txt", &SCENARIO.replace("area = 1e-4", "area = lots"));
    let o = vlcsec(&["gain", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn sweep_is_byte_stable_with_fixed_columns() {
    let args = ["sweep", "--axis", "p-db", "--start", "-20", "--stop", "100", "--steps", "25", "--ratio", "100"];
    let a = vlcsec(&args);
    let b = vlcsec(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().next(), Some("axis_value,lower_raw,upper_raw,lower,upper,branch,gap"));
    assert_eq!(text.lines().count(), 26);
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "100");
    assert!((last[6].parse::<f64>().unwrap() - 0.4674).abs() < 5e-4);
}

#[test]
fn sweep_scenario_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.txt", SCENARIO);
    let base = ["sweep", "--scenario", &f, "--axis", "p-db", "--start", "0", "--stop", "40", "--steps", "3"];
    let o = vlcsec(&base);
    // co-located receivers: no secrecy
    for line in stdout(&o).lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!((f[3], f[4]), ("0", "0"));
    }
    let mut args = base.to_vec();
    args.extend(["--ratio", "100"]);
    let o = vlcsec(&args);
    assert!(stdout(&o).lines().last().unwrap().split(',').nth(4).unwrap() != "0");
}

#[test]
fn sweep_config_errors_exit_two() {
    let o = vlcsec(&["sweep", "--axis", "a-db", "--start", "0", "--stop", "10", "--steps", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = vlcsec(&["sweep", "--axis", "p-db", "--start", "10", "--stop", "0", "--steps", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = vlcsec(&["sweep", "--axis", "p-db"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(vlcsec(&["--preset", "fig42"]).status.code(), Some(2));
    assert_eq!(vlcsec(&["sweep", "--mode", "sideways"]).status.code(), Some(2));
}

#[test]
fn preset_writes_one_file_per_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2");
    let o = vlcsec(&["--preset", "fig2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for r in ["10", "100", "1000"] {
        let text = std::fs::read_to_string(out.join(format!("fig2_ratio{r}.csv"))).unwrap();
        assert_eq!(text.lines().count(), 122);
    }
}

#[test]
fn preset_blocks_on_stdout() {
    let o = vlcsec(&["sweep", "--preset", "fig5"]);
    let text = stdout(&o);
    assert!(text.starts_with("# fig5 avg\naxis_value,"));
    assert!(text.contains("\n\n# fig5 avg_si\naxis_value,"));
}

#[test]
fn pdf_endpoints_and_flat_case() {
    let o = vlcsec(&["pdf", "--alpha", "0.5", "--a", "1e6", "--n-points", "2"]);
    assert_eq!(stdout(&o), "x,f\n0,1e-06\n1000000,1e-06\n");
    let o = vlcsec(&["pdf", "--alpha", "1.2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tables_pass() {
    let o = vlcsec(&["tables", "--csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 37);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",PASS")));
}

#[test]
fn verify_quick_passes_and_negative_control_fails() {
    let o = vlcsec(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));

    let o = vlcsec(&["verify", "--perturb-ei"]);
    assert_eq!(o.status.code(), Some(1));
    let fails: Vec<String> = stdout(&o).lines().filter(|l| l.starts_with("FAIL")).map(String::from).collect();
    assert!(fails.iter().any(|l| l.contains("expectation/exponential")));
    assert!(fails.iter().any(|l| l.contains("expectation/maxent")));
}
