use std::path::Path;
use std::process::{Command, Output};

fn adaptq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adaptq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn diag_prints_reference_energies() {
    let o = adaptq(&["diag", "builtin:h2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("fci_energy=-1.137283834"), "{s}");
    assert!(s.contains("hf_energy=-1.116759307"), "{s}");
    assert!(s.contains("chemical_accuracy_band="));
}

#[test]
fn pool_counts() {
    let o = adaptq(&["pool", "--family", "qubit_no_z", "--n", "8"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("472 operators"));
    let o = adaptq(&["pool", "--family", "sgsd", "--n", "8"]);
    assert!(stdout(&o).contains("66 operators"));
    let o = adaptq(&["pool", "--family", "eight", "--problem", "builtin:h2"]);
    assert!(stdout(&o).contains("8 operators"));
}

#[test]
fn compile_reports_cnots() {
    let o = adaptq(&["compile", "--string", "XXXY", "--theta", "0.1"]);
    assert!(o.status.success());
    assert!(stdout(&o).trim_end().ends_with("cnots=6"));
    let o = adaptq(&["compile", "--family", "gsd", "--n", "4", "--index", "5", "--theta", "0.2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("cnots="));
}

#[test]
fn adapt_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("adapt.csv");
    let o = adaptq(&["adapt", "--problem", "builtin:h2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("converged=true"));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "iteration,energy,error,gradient_norm,selected,selected_gradient,delta_e,evaluations,cumulative_optimizations,cnot_count,n_parameters"
    );
    assert_eq!(lines.count(), 1);
}

#[test]
fn vqe_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "vqe.cfg", "problem=builtin:h2\nmethod=uccsd\nruns=2\nseed=7\n");
    let o = adaptq(&["vqe", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next().unwrap(), "run,seed,energy,error,evaluations,converged,n_parameters");
    assert_eq!(lines.count(), 2);
}

#[test]
fn scan_and_noise_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let ham = dir.path().join("h2.ham");
    std::fs::write(&ham, adaptq::chem::h2_problem().to_text()).unwrap();
    let cfg = write(
        dir.path(),
        "scan.cfg",
        &format!("problem=builtin:h2\nproblem={}\nmax_iterations=2\n", ham.display()),
    );
    let o = adaptq(&["scan", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.starts_with("problem,geometry,qubits,method,runs,fci_energy"));
    assert_eq!(s.lines().count(), 3);

    let cfg = write(
        dir.path(),
        "sweep.cfg",
        "problem=builtin:h2\nsweep=spam\nvalues=0.0,0.02\nshots=256\nmax_iterations=1\nruns=2\n",
    );
    let out = dir.path().join("sweep.csv");
    let o = adaptq(&["noise-sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "axis,value,method,runs,error_median,error_q1,error_q3,error_mean"
    );
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.starts_with("spam,")));
}

#[test]
fn exit_codes() {
    assert_eq!(adaptq(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(adaptq(&["diag", "/nonexistent/file.ham"]).status.code(), Some(3));
    assert_eq!(adaptq(&["scan"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "problem=builtin:h2\nbogus_key=1\n");
    let o = adaptq(&["adapt", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}
