//! End-to-end tests driving the compiled binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mwgan_core::geometry::ManifoldPoint;
use mwgan_core::imaging::load_mvi;

const BIN: &str = env!("CARGO_BIN_EXE_mwgan");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn binary")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_ppm(path: &Path, width: usize, height: usize, rgb: &[u8]) {
    assert_eq!(rgb.len(), width * height * 3);
    let mut bytes = format!("P6\n{width} {height}\n255\n").into_bytes();
    bytes.extend_from_slice(rgb);
    fs::write(path, bytes).unwrap();
}

fn p(path: &Path) -> String {
    path.to_str().unwrap().to_string()
}

#[test]
fn convert_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let ppm = dir.path().join("in.ppm");
    let mvi = dir.path().join("in.mvi");
    let back = dir.path().join("back.ppm");
    write_ppm(
        &ppm,
        2,
        2,
        &[255, 0, 0, 0, 255, 0, 0, 0, 255, 128, 64, 32],
    );
    run_ok(&["convert", "--in", &p(&ppm), "--out", &p(&mvi), "--mode", "rgb2hsv"]);
    run_ok(&["convert", "--in", &p(&mvi), "--out", &p(&back), "--mode", "hsv2rgb"]);
    assert_eq!(fs::read(&ppm).unwrap(), fs::read(&back).unwrap());

    // A pure red pixel lands exactly at hue zero.
    let img = load_mvi(&mvi).unwrap();
    match img.pixels[0] {
        ManifoldPoint::Hsv { h, s, v } => {
            assert_eq!(h, 0.0);
            assert_eq!(s, 1.0);
            assert_eq!(v, 1.0);
        }
        _ => panic!("expected HSV pixel"),
    }
}

#[test]
fn convert_chroma_brightness_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ppm = dir.path().join("in.ppm");
    let mvi = dir.path().join("cb.mvi");
    let back = dir.path().join("back.ppm");
    write_ppm(&ppm, 2, 1, &[200, 40, 90, 10, 250, 60]);
    run_ok(&["convert", "--in", &p(&ppm), "--out", &p(&mvi), "--mode", "rgb2cb"]);
    assert!(dir.path().join("cb.mvi.bright").exists());
    run_ok(&[
        "convert",
        "--in",
        &p(&mvi),
        "--out",
        &p(&back),
        "--mode",
        "cb2rgb",
        "--brightness",
        "stored",
    ]);
    assert_eq!(fs::read(&ppm).unwrap(), fs::read(&back).unwrap());
}

#[test]
fn truncated_ppm_exits_with_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let ppm = dir.path().join("bad.ppm");
    fs::write(&ppm, b"P6\n2 2\n255\nxx").unwrap();
    let out = run(&[
        "convert",
        "--in",
        &p(&ppm),
        "--out",
        &p(&dir.path().join("out.mvi")),
        "--mode",
        "rgb2hsv",
    ]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn missing_input_exits_with_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "convert",
        "--in",
        &p(&dir.path().join("absent.ppm")),
        "--out",
        &p(&dir.path().join("out.mvi")),
        "--mode",
        "rgb2hsv",
    ]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn geomcheck_passes_and_is_deterministic() {
    for tag in ["hsv", "sphere", "spd"] {
        let first = run_ok(&["geomcheck", "--tag", tag, "--trials", "300", "--seed", "5"]);
        let second = run_ok(&["geomcheck", "--tag", tag, "--trials", "300", "--seed", "5"]);
        assert_eq!(first, second, "geomcheck output must be deterministic");
    }
}

#[test]
fn geomcheck_fails_with_zero_tolerance() {
    let out = run(&["geomcheck", "--tag", "spd", "--trials", "50", "--tol", "0"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn w1_self_distance_symmetry_and_sinkhorn_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes_a = Vec::new();
    let mut bytes_b = Vec::new();
    let mut state = 12345u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) as u8
    };
    for _ in 0..4 * 4 * 3 {
        bytes_a.push(next());
        bytes_b.push(next());
    }
    let (ppm_a, ppm_b) = (dir.path().join("a.ppm"), dir.path().join("b.ppm"));
    let (mvi_a, mvi_b) = (dir.path().join("a.mvi"), dir.path().join("b.mvi"));
    write_ppm(&ppm_a, 4, 4, &bytes_a);
    write_ppm(&ppm_b, 4, 4, &bytes_b);
    run_ok(&["convert", "--in", &p(&ppm_a), "--out", &p(&mvi_a), "--mode", "rgb2hsv"]);
    run_ok(&["convert", "--in", &p(&ppm_b), "--out", &p(&mvi_b), "--mode", "rgb2hsv"]);

    let self_dist: f64 = run_ok(&["w1", "--a", &p(&mvi_a), "--b", &p(&mvi_a)])
        .trim()
        .parse()
        .unwrap();
    assert!(self_dist.abs() < 1e-12, "self distance {self_dist}");

    let ab: f64 = run_ok(&["w1", "--a", &p(&mvi_a), "--b", &p(&mvi_b)])
        .trim()
        .parse()
        .unwrap();
    let ba: f64 = run_ok(&["w1", "--a", &p(&mvi_b), "--b", &p(&mvi_a)])
        .trim()
        .parse()
        .unwrap();
    assert!((ab - ba).abs() < 1e-10, "asymmetric: {ab} vs {ba}");
    assert!(ab > 0.1, "distinct images should be well separated");

    let sink: f64 = run_ok(&[
        "w1",
        "--a",
        &p(&mvi_a),
        "--b",
        &p(&mvi_b),
        "--method",
        "sinkhorn",
        "--epsilon",
        "0.01",
        "--max-iter",
        "20000",
    ])
    .trim()
    .parse()
    .unwrap();
    assert!(
        (sink - ab).abs() / ab < 1e-2,
        "sinkhorn {sink} vs exact {ab}"
    );

    // The coupling CSV has positive masses summing to one.
    let plan = dir.path().join("plan.csv");
    run_ok(&[
        "w1",
        "--a",
        &p(&mvi_a),
        "--b",
        &p(&mvi_b),
        "--plan-out",
        &p(&plan),
    ]);
    let text = fs::read_to_string(&plan).unwrap();
    let mut total = 0.0;
    for line in text.lines().skip(1) {
        let mass: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(mass > 0.0);
        total += mass;
    }
    assert!((total - 1.0).abs() < 1e-10, "plan mass {total}");
}

#[test]
fn w1_tag_mismatch_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let ppm = dir.path().join("in.ppm");
    write_ppm(&ppm, 2, 1, &[200, 40, 90, 10, 250, 60]);
    let hsv = dir.path().join("a.mvi");
    let cb = dir.path().join("b.mvi");
    run_ok(&["convert", "--in", &p(&ppm), "--out", &p(&hsv), "--mode", "rgb2hsv"]);
    run_ok(&["convert", "--in", &p(&ppm), "--out", &p(&cb), "--mode", "rgb2cb"]);
    let out = run(&["w1", "--a", &p(&hsv), "--b", &p(&cb)]);
    assert_eq!(exit_code(&out), 2);
}

fn experiment_json(output_dir: &Path) -> String {
    format!(
        r#"{{
  "trainer": {{
    "geometry": "HsvProduct",
    "generator_iters": 8,
    "eval_interval": 4,
    "eval_samples": 32,
    "real_samples": 128,
    "batch_size": 16,
    "generator_hidden": [16],
    "critic_hidden": [16],
    "seed": 11
  }},
  "output_dir": {:?}
}}"#,
        output_dir.to_str().unwrap()
    )
}

#[test]
fn train_is_deterministic_and_sample_emits_valid_images() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_a = dir.path().join("a.json");
    let cfg_b = dir.path().join("b.json");
    let (run_a, run_b) = (dir.path().join("run_a"), dir.path().join("run_b"));
    fs::write(&cfg_a, experiment_json(&run_a)).unwrap();
    fs::write(&cfg_b, experiment_json(&run_b)).unwrap();
    run_ok(&["train", "--config", &p(&cfg_a)]);
    run_ok(&["train", "--config", &p(&cfg_b)]);
    assert_eq!(
        fs::read(run_a.join("log.csv")).unwrap(),
        fs::read(run_b.join("log.csv")).unwrap(),
        "same seed must reproduce the log byte for byte"
    );
    assert_eq!(
        fs::read(run_a.join("checkpoint_final.bin")).unwrap(),
        fs::read(run_b.join("checkpoint_final.bin")).unwrap()
    );

    let samples = dir.path().join("samples");
    run_ok(&[
        "sample",
        "--checkpoint",
        &p(&run_a.join("checkpoint_final.bin")),
        "--n",
        "16",
        "--out",
        &p(&samples),
        "--seed",
        "3",
    ]);
    for i in 0..16 {
        let img = load_mvi(&samples.join(format!("sample_{i:03}.mvi"))).unwrap();
        img.validate().unwrap();
        assert!(samples.join(format!("sample_{i:03}.ppm")).exists());
    }

    // Plot emits a CSV aligned with the log and a well-formed SVG.
    let prefix = dir.path().join("plot");
    run_ok(&[
        "plot",
        "--log",
        &p(&run_a.join("log.csv")),
        "--out",
        &p(&prefix),
    ]);
    let csv = fs::read_to_string(dir.path().join("plot.csv")).unwrap();
    assert!(csv.starts_with("iter,neg_critic_cost,w1_eval\n"));
    assert_eq!(csv.lines().count(), 1 + 8 + 1, "header + per-iter rows + iter 0");
    let svg = fs::read_to_string(dir.path().join("plot.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline") && svg.ends_with("</svg>\n"));
}

#[test]
fn train_rejects_unknown_config_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{ "trainer": { "geometry": "HsvProduct", "typo_field": 1 }, "output_dir": "x" }"#,
    )
    .unwrap();
    let out = run(&["train", "--config", &p(&cfg)]);
    assert_eq!(exit_code(&out), 2);
}
