use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_slmaster"));
    c.env_remove("SLMASTER_CONFIG");
    c
}

fn rows(out: &[u8]) -> Vec<Vec<String>> {
    String::from_utf8_lossy(out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn spectrum_matches_jacobi_values() {
    let out = bin().args(["--alpha", "1", "--beta", "1", "spectrum", "solve", "--nmax", "6"]).output().unwrap();
    assert!(out.status.success());
    let r = rows(&out.stdout);
    assert_eq!(r.len(), 7);
    for (n, row) in r.iter().enumerate() {
        let nu: f64 = row[1].parse().unwrap();
        let exact = (2.0 * n as f64 + 3.0).powi(2) - 1.5;
        assert!((nu - exact).abs() < 1e-9 * exact, "n={n}: {nu}");
    }
}

#[test]
fn zero_symbol_gives_zero_table() {
    let out = bin()
        .args(["--alpha", "1", "--beta", "1", "master", "verify", "--symbol", "zero", "--nmax", "20"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    for row in rows(&out.stdout) {
        for v in &row[2..] {
            assert_eq!(v.parse::<f64>().unwrap(), 0.0);
        }
    }
}

#[test]
fn json_output_parses() {
    let out = bin()
        .args(["--alpha", "0.5", "--beta", "0.5", "--roots", "2", "--format", "json", "spectrum", "solve", "--nmax", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.is_array() || v.is_object());
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(bin().arg("bogus").output().unwrap().status.code(), Some(2));
    let out = bin().args(["--alpha", "-3", "spectrum", "solve"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["--roots", "0.5", "spectrum", "solve"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "[model]\nalpha = 1.0\nbeta = 1.0\nroots = []\n\n[ranges]\nn_max = 2\n").unwrap();
    let out = bin().args(["spectrum", "solve"]).env("SLMASTER_CONFIG", &path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(rows(&out.stdout).len(), 3);
    std::fs::write(&path, "[model]\nalpha = 1.0\nbogus = 3\n").unwrap();
    let out = bin().args(["--config", path.to_str().unwrap(), "spectrum", "solve"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
