use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use cfmeasure::error::Error;
use cfmeasure::harness::{self, Pipeline, RunConfig, MANIFEST};

const DESK: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/desk.toml"));

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("cfmeasure-test-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn desk_config(dir: &Path, out: &str) -> PathBuf {
    let text = DESK.replace("\"runs/desk\"", &format!("{:?}", dir.join(out).display().to_string()));
    let path = dir.join(format!("{out}.toml"));
    fs::write(&path, text).unwrap();
    path
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cfmeasure")).args(args).output().expect("spawn cfmeasure");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn unknown_config_key_exits_2() {
    let d = scratch("badkey");
    let p = d.join("bad.toml");
    fs::write(&p, DESK.replace("[build]\ndepth = 12", "[build]\ndepth = 12\nwidth = 3")).unwrap();
    let (code, _, err) = cli(&["build", p.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn unknown_field_rejected_by_parser() {
    let text = DESK.replace("[sample]\ncount = 1000", "[sample]\ncount = 1000\nspeed = 2");
    assert!(matches!(RunConfig::from_toml(&text), Err(Error::Config(_))));
}

#[test]
fn sampling_pipelines_need_a_seed() {
    let text = DESK.replace("seed = 1\n", "");
    let e = RunConfig::from_toml(&text).unwrap_err();
    assert!(e.to_string().contains("needs a seed"), "{e}");
    assert_eq!(e.exit_code(), 2);
    let d = scratch("noseed");
    let p = d.join("noseed.toml");
    fs::write(&p, &text).unwrap();
    assert_eq!(cli(&["sample", p.to_str().unwrap()]).0, 2);
}

#[test]
fn empty_pipeline_list_is_config_error() {
    let text = DESK.replace(
        "pipelines = [\"build\", \"verify-geometry\", \"verify-fourier\", \"scan-balls\", \"decay-scan\", \"exactness\", \"sample\", \"normality\"]",
        "pipelines = []",
    );
    assert!(matches!(RunConfig::from_toml(&text).and_then(|c| c.validate()), Err(Error::Config(_))));
}

#[test]
fn bad_worker_count_exits_2() {
    let d = scratch("workers");
    let p = desk_config(&d, "out");
    let out = Command::new(env!("CARGO_BIN_EXE_cfmeasure"))
        .env("CFMEASURE_WORKERS", "zero")
        .args(["build", p.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn two_block_schedule_is_infeasible() {
    let d = scratch("j2");
    let p = desk_config(&d, "out");
    let text = fs::read_to_string(&p).unwrap().replace("j_blocks = 1", "j_blocks = 2");
    fs::write(&p, text).unwrap();
    let (code, _, err) = cli(&["build", p.to_str().unwrap()]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("increase J"), "{err}");
}

#[test]
fn corrupted_snapshot_fails_verification() {
    let d = scratch("corrupt");
    let p = desk_config(&d, "out");
    assert_eq!(cli(&["build", p.to_str().unwrap()]).0, 0);
    let snap = d.join("out").join(Pipeline::Build.artifact());
    let text = fs::read_to_string(&snap).unwrap();
    let at = text.find("\"ln_weight\":\"").unwrap() + "\"ln_weight\":\"".len();
    let end = at + text[at..].find('"').unwrap();
    let bumped = format!("{:.16e}", text[at..end].parse::<f64>().unwrap() + 1e-6);
    fs::write(&snap, format!("{}{}{}", &text[..at], bumped, &text[end..])).unwrap();
    let (code, _, err) = cli(&["verify", p.to_str().unwrap()]);
    assert_eq!(code, 4, "{err}");
    assert!(err.contains("node-weight"), "{err}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let d = scratch("repeat");
    let p = desk_config(&d, "out");
    let mut cfg = RunConfig::load(&p).unwrap();
    cfg.pipelines = vec![Pipeline::Build, Pipeline::DecayScan, Pipeline::Sample, Pipeline::ScanBalls];
    let a = harness::run(&cfg).unwrap();
    let first: Vec<Vec<u8>> = cfg.pipelines.iter().map(|p| fs::read(a.dir.join(p.artifact())).unwrap()).collect();
    let m1 = a.manifest.without_timing();
    let b = harness::run(&cfg).unwrap();
    for (p, bytes) in cfg.pipelines.iter().zip(&first) {
        assert_eq!(&fs::read(b.dir.join(p.artifact())).unwrap(), bytes, "{}", p.artifact());
    }
    let m2 = b.manifest.without_timing();
    assert_eq!(serde_json::to_string(&m1).unwrap(), serde_json::to_string(&m2).unwrap());
}

#[test]
fn report_is_partial_without_manifest() {
    let d = scratch("partial");
    let p = desk_config(&d, "out");
    assert_eq!(cli(&["scan-decay", p.to_str().unwrap()]).0, 0);
    let out = d.join("out");
    fs::remove_file(out.join(MANIFEST)).unwrap();
    let r = harness::report(&out, None).unwrap();
    assert!(r.text.contains("partial summary"));
    assert!(r.text.contains("[decay-scan]"));
    assert!(r.missing.iter().any(|m| m == MANIFEST));
    let (code, stdout, _) = cli(&["report", out.to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(stdout.contains("slope"));
}

#[test]
fn report_compares_against_reference_table() {
    let d = scratch("golden");
    let p = desk_config(&d, "out");
    assert_eq!(cli(&["scan-decay", p.to_str().unwrap()]).0, 0);
    let out = d.join("out");
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let r = harness::report(&out, Some(&data)).unwrap();
    assert_eq!(r.golden_pass, Some(true), "{}", r.text);
    assert!(r.golden_max_diff.unwrap() <= harness::GOLDEN_TOL);

    let csv = out.join(Pipeline::DecayScan.artifact());
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let row = lines.iter().position(|l| !l.starts_with('#') && !l.starts_with("xi")).unwrap();
    let mut cells: Vec<String> = lines[row].split(',').map(String::from).collect();
    cells[5] = format!("{:.16e}", cells[5].parse::<f64>().unwrap() + 1e-6);
    lines[row] = cells.join(",");
    fs::write(&csv, lines.join("\n") + "\n").unwrap();
    let (code, stdout, _) = cli(&["report", out.to_str().unwrap(), data.to_str().unwrap()]);
    assert_eq!(code, 4, "{stdout}");
}

#[test]
fn config_hash_ignores_output_dir() {
    let a = RunConfig::from_toml(DESK).unwrap();
    let b = RunConfig::from_toml(&DESK.replace("runs/desk", "elsewhere")).unwrap();
    let c = RunConfig::from_toml(&DESK.replace("seed = 1", "seed = 2")).unwrap();
    assert_eq!(a.hash(), b.hash());
    assert_ne!(a.hash(), c.hash());
}
