use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nlfermion"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn nlfermion")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn recipes() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../recipes")
}

/// Data rows (after the CSV header) and every `#` line.
fn parse(text: &str) -> (Vec<String>, Vec<Vec<String>>, Vec<String>) {
    let comments: Vec<String> = text.lines().filter(|l| l.starts_with('#')).map(str::to_owned).collect();
    let mut body = text.lines().filter(|l| !l.starts_with('#'));
    let header = body.next().expect("header row").split(',').map(str::to_owned).collect();
    let rows = body.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows, comments)
}

fn significant_digits(field: &str) -> usize {
    let mantissa = field.split('e').next().unwrap();
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    digits.trim_start_matches('0').len()
}

#[test]
fn hopping_spectrum_is_minus_cos() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["spectrum", "--kind", "local_hopping", "--extent", "8"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows, _) = parse(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["n", "k", "E"]);
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let k: f64 = r[1].parse().unwrap();
        let e: f64 = r[2].parse().unwrap();
        assert!((e + k.cos()).abs() < 1e-10, "{r:?}");
    }
}

#[test]
fn local_pairing_spectrum_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["spectrum", "--kind", "local_pairing", "--extent", "100"]);
    assert!(out.status.success());
    let (header, rows, _) = parse(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["n", "k", "E", "E_neg"]);
    assert_eq!(rows.len(), 100);
    for r in &rows {
        assert!((r[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
        assert!((r[3].parse::<f64>().unwrap() + 1.0).abs() < 1e-10);
    }
}

#[test]
fn compact_cos_spectrum_has_extra_fermi_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["spectrum", "--kind", "compact_cos", "--alpha", "30", "--extent", "400"]);
    assert!(out.status.success());
    let (_, rows, _) = parse(&String::from_utf8(out.stdout).unwrap());
    let min = rows.iter().map(|r| r[2].parse::<f64>().unwrap().abs()).fold(f64::MAX, f64::min);
    assert!(min < 0.05, "{min}");
}

#[test]
fn sweep_writes_commented_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"model":{"kind":"local_hopping"},"lattice":{"extent":[64]},"sweep":[1,2,4,8],"seed":7,
            "output":{"csv":"out.csv","svg":"out.svg"}}"#,
    );
    let out = run(dir.path(), &["sweep", "--config", cfg.to_str().unwrap(), "--log-x"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let (header, rows, comments) = parse(&text);
    assert!(comments[0].starts_with("# nlfermion "));
    assert!(comments.iter().any(|c| c == "# seed: 7"));
    assert!(comments.iter().any(|c| c.contains("\"local_hopping\"")));
    assert!(comments.iter().any(|c| c.contains("\"log_x\": true")));
    assert_eq!(header, ["L", "S"]);
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(significant_digits(&r[1]), 12, "{r:?}");
    }
    let svg = fs::read_to_string(dir.path().join("out.svg")).unwrap();
    assert!(svg.contains(">L</text>") && svg.contains(">S</text>"));
}

#[test]
fn flags_override_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"model":{"kind":"local_hopping"},"lattice":{"extent":[64]},"sweep":[1,2]}"#,
    );
    let out = run(
        dir.path(),
        &["entropy", "--config", cfg.to_str().unwrap(), "--kind", "local_pairing", "--range", "1:5"],
    );
    assert!(out.status.success());
    let (_, rows, comments) = parse(&String::from_utf8(out.stdout).unwrap());
    assert!(comments.iter().any(|c| c.contains("\"local_pairing\"")));
    assert_eq!(rows.len(), 5);
}

#[test]
fn fits_are_reported_in_trailer() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["sweep", "--kind", "local_hopping", "--extent", "200", "--range", "1:50", "--fit", "log1d:8:50"],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("# fit ")).expect("fit line");
    assert!(line.contains("form=log1d") && line.contains("c_eff="), "{line}");
}

#[test]
fn empty_sweep_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"model":{"kind":"local_hopping"},"lattice":{"extent":[64]},"sweep":[]}"#);
    let out = run(dir.path(), &["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(dir.path(), &["holo", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_configs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "u.json", r#"{"modle":{"kind":"local_hopping"}}"#);
    assert_eq!(run(dir.path(), &["sweep", "--config", unknown.to_str().unwrap()]).status.code(), Some(1));
    let empty = write(dir.path(), "e.json", r#"{"model":{"kind":"local_hopping"},"lattice":{"extent":[]},"sweep":[1]}"#);
    assert_eq!(run(dir.path(), &["sweep", "--config", empty.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["sweep", "--config", "missing.json"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["sweep", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn holo_echoes_metric_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "holo", "--kind", "compact_cos", "--alpha", "10", "--extent", "200", "--range", "4:40", "--alpha-c", "9",
            "--a", "0.6", "--b", "0.7",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows, comments) = parse(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["L", "S_lattice", "S_holographic", "residual"]);
    assert_eq!(rows.len(), 37);
    assert!(comments
        .iter()
        .any(|c| c.starts_with("# metric alpha_c=9") && c.contains("a=0.6") && c.contains("source=config")));
    assert!(comments.iter().any(|c| c.starts_with("# max_deviation=")));
}

#[test]
fn verify_passes_and_detects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 7);

    let out = run(dir.path(), &["verify", "--corrupt", "complementarity"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("[FAIL] complementarity")));
    assert!(String::from_utf8_lossy(&out.stderr).contains("complementarity"));

    assert_eq!(run(dir.path(), &["verify", "--corrupt", "nope"]).status.code(), Some(1));
}

#[test]
fn every_recipe_parses() {
    let dir = tempfile::tempdir().unwrap();
    let mut seen = 0;
    for entry in fs::read_dir(recipes()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("cfg") {
            continue;
        }
        seen += 1;
        // a tiny sweep keeps this fast while still loading every key
        let out = run(
            dir.path(),
            &["sweep", "--config", path.to_str().unwrap(), "--lengths", "1,2,3,4", "--fit", "linear:1:4", "--csv", "r.csv", "--svg", "r.svg"],
        );
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(out.status.success(), "{}: {stderr}", path.display());
    }
    assert_eq!(seen, 9);
}

#[test]
fn holography_recipe_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = recipes().join("fig11.cfg");
    let out = run(dir.path(), &["holo", "--config", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows, _) = parse(&fs::read_to_string(dir.path().join("fig11.csv")).unwrap());
    assert_eq!(rows.len(), 97);
    assert!(dir.path().join("fig11.svg").exists());
}
