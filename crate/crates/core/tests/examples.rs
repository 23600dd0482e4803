use std::path::PathBuf;
use std::process::Command;

/// `cargo test` builds the examples next to the test binaries.
fn example(name: &str) -> PathBuf {
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    deps.parent().unwrap().join("examples").join(format!("{name}{}", std::env::consts::EXE_SUFFIX))
}

fn run(name: &str, args: &[&str]) -> String {
    let path = example(name);
    let out = Command::new(&path).args(args).output().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn every_example_runs() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("t.svg");
    let checks: Vec<(&str, Vec<&str>, &str)> = vec![
        ("weights", vec!["20000"], "tau(1..=6) = [1, -24, 252, -1472, 4830, -6048]"),
        ("expsum", vec![], "grid vs direct"),
        ("coeffs", vec![], "C_Phi estimate"),
        ("arcs", vec![], "minor intervals"),
        ("verify", vec!["piltz2"], "rational_point"),
        ("ergodic", vec![], "value/J"),
        ("plot", vec![svg.to_str().unwrap()], "wrote 4096 points"),
    ];
    for (name, args, needle) in checks {
        let out = run(name, &args);
        assert!(out.contains(needle), "{name} output lacks '{needle}':\n{out}");
    }
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}
