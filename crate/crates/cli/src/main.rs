//! Command-line entry point: codecs, geometry checks, W1 evaluation,
//! training, sampling, and plot emission.
//!
//! Exit codes: 0 success, 1 check failure, 2 malformed input or
//! configuration, 3 I/O failure, 4 training aborted on non-finite loss.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mwgan_core::gan::{
    generate, load_checkpoint, save_checkpoint, train, write_atomic, GanGeometry,
    TrainerConfig, TrainingLog,
};
use mwgan_core::geometry::{self, eig, random, AnchorSet, GeometryTag, ManifoldPoint};
use mwgan_core::imaging::{
    cb_to_rgb, hsv_to_rgb, load_brightness, load_mvi, load_ppm, rgb_to_cb, rgb_to_hsv,
    save_brightness, save_mvi, save_ppm, BrightnessChannel, ManifoldImage, RgbImage,
};
use mwgan_core::transport::{
    cost_matrix, cost_matrix_anchored, solve_w1_exact, solve_w1_sinkhorn, SampleSet,
    TransportPlan,
};
use mwgan_core::Error;

#[derive(Parser)]
#[command(name = "mwgan", about = "Manifold-valued image generation toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConvertMode {
    Rgb2hsv,
    Hsv2rgb,
    Rgb2cb,
    Cb2rgb,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TagArg {
    Hsv,
    Sphere,
    Spd,
}

impl TagArg {
    fn tag(self) -> GeometryTag {
        match self {
            TagArg::Hsv => GeometryTag::HsvProduct,
            TagArg::Sphere => GeometryTag::Sphere2,
            TagArg::Spd => GeometryTag::Spd3,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Sinkhorn,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CostArg {
    Geodesic,
    Anchored,
}

#[derive(Subcommand)]
enum Cmd {
    /// Convert between PPM and manifold-valued images.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        mode: ConvertMode,
        /// For cb2rgb: "stored" reads the .bright sidecar, "const:<v>"
        /// applies a constant brightness.
        #[arg(long, default_value = "stored")]
        brightness: String,
    },
    /// Round-trip and norm-distance sweeps for one geometry.
    Geomcheck {
        #[arg(long, value_enum)]
        tag: TagArg,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override both tolerances (mainly for negative controls).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Wasserstein-1 distance between two MVI files.
    W1 {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = CostArg::Geodesic)]
        cost: CostArg,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 5000)]
        max_iter: usize,
        /// Write the coupling as CSV rows i,j,mass.
        #[arg(long)]
        plan_out: Option<PathBuf>,
    },
    /// Run the training loop from a JSON experiment config.
    Train {
        #[arg(long)]
        config: PathBuf,
    },
    /// Draw samples from a checkpointed generator.
    Sample {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        n: usize,
        /// Output directory for per-sample MVI files and previews.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit plot data (CSV) and a line chart (SVG) from a training log.
    Plot {
        #[arg(long)]
        log: PathBuf,
        /// Output prefix; writes <out>.csv and <out>.svg.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfig {
    trainer: TrainerConfig,
    output_dir: PathBuf,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 3,
        Error::NanAbort { .. } => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn run(cmd: Cmd) -> Result<ExitCode, Error> {
    match cmd {
        Cmd::Convert {
            input,
            out,
            mode,
            brightness,
        } => cmd_convert(&input, &out, mode, &brightness),
        Cmd::Geomcheck {
            tag,
            trials,
            seed,
            tol,
        } => cmd_geomcheck(tag.tag(), trials, seed, tol),
        Cmd::W1 {
            a,
            b,
            method,
            cost,
            epsilon,
            max_iter,
            plan_out,
        } => cmd_w1(&a, &b, method, cost, epsilon, max_iter, plan_out.as_deref()),
        Cmd::Train { config } => cmd_train(&config),
        Cmd::Sample {
            checkpoint,
            n,
            out,
            seed,
        } => cmd_sample(&checkpoint, n, &out, seed),
        Cmd::Plot { log, out } => cmd_plot(&log, &out),
    }
}

/// Save through a temp file so failures leave no partial output.
fn save_file<F>(path: &Path, write: F) -> Result<(), Error>
where
    F: FnOnce(&Path) -> Result<(), Error>,
{
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    write(&tmp)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn brightness_sidecar(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".bright");
    os.into()
}

fn cmd_convert(
    input: &Path,
    out: &Path,
    mode: ConvertMode,
    brightness: &str,
) -> Result<ExitCode, Error> {
    match mode {
        ConvertMode::Rgb2hsv => {
            let rgb = load_ppm(input)?;
            let hsv = rgb_to_hsv(&rgb);
            save_file(out, |p| save_mvi(&hsv, p))?;
        }
        ConvertMode::Hsv2rgb => {
            let img = load_mvi(input)?;
            let rgb = hsv_to_rgb(&img)?;
            save_file(out, |p| save_ppm(&rgb, p))?;
        }
        ConvertMode::Rgb2cb => {
            let rgb = load_ppm(input)?;
            let (chroma, bright) = rgb_to_cb(&rgb);
            save_file(out, |p| save_mvi(&chroma, p))?;
            save_file(&brightness_sidecar(out), |p| save_brightness(&bright, p))?;
        }
        ConvertMode::Cb2rgb => {
            let chroma = load_mvi(input)?;
            let bright = if brightness == "stored" {
                load_brightness(&brightness_sidecar(input))?
            } else if let Some(v) = brightness.strip_prefix("const:") {
                let v: f64 = v
                    .parse()
                    .map_err(|_| Error::Config(format!("bad brightness constant {v}")))?;
                BrightnessChannel {
                    height: chroma.height,
                    width: chroma.width,
                    values: vec![v; chroma.height * chroma.width],
                }
            } else {
                return Err(Error::Config(format!(
                    "brightness must be \"stored\" or \"const:<v>\", got {brightness}"
                )));
            };
            let rgb = cb_to_rgb(&chroma, &bright)?;
            save_file(out, |p| save_ppm(&rgb, p))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Ambient gap with the hue difference wrapped.
fn ambient_gap(a: &ManifoldPoint, b: &ManifoldPoint) -> f64 {
    match (a, b) {
        (
            ManifoldPoint::Hsv { h: ah, s: sa, v: va },
            ManifoldPoint::Hsv { h: bh, s: sb, v: vb },
        ) => {
            let dh = geometry::wrap_angle(ah - bh);
            (dh * dh + (sa - sb) * (sa - sb) + (va - vb) * (va - vb)).sqrt()
        }
        _ => {
            let (x, y) = (a.ambient(), b.ambient());
            x.iter()
                .zip(&y)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt()
        }
    }
}

fn cmd_geomcheck(
    tag: GeometryTag,
    trials: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<ExitCode, Error> {
    let (rt_tol, nd_tol) = match tol {
        Some(t) => (t, t),
        None => (
            if tag == GeometryTag::Spd3 { 1e-9 } else { 1e-12 },
            1e-10,
        ),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_rt = 0.0f64;
    let mut worst_nd = 0.0f64;
    for _ in 0..trials {
        let y = random::random_point(tag, &mut rng);
        let x = random::random_point(tag, &mut rng);
        let v = geometry::log(&y, &x)?;
        let back = geometry::exp(&y, &v)?;
        worst_rt = worst_rt.max(ambient_gap(&back, &x));
        worst_nd = worst_nd.max((v.norm() - geometry::distance(&x, &y)?).abs());
    }
    println!("tag {tag:?} trials {trials} seed {seed}");
    println!("max round-trip error {worst_rt:.3e} (tolerance {rt_tol:.1e})");
    println!("max |norm - distance| {worst_nd:.3e} (tolerance {nd_tol:.1e})");
    if worst_rt <= rt_tol && worst_nd <= nd_tol {
        Ok(ExitCode::SUCCESS)
    } else {
        println!("FAIL");
        Ok(ExitCode::from(1))
    }
}

fn write_plan_csv(path: &Path, plan: &TransportPlan) -> Result<(), Error> {
    let mut csv = String::from("i,j,mass\n");
    for i in 0..plan.rows {
        for j in 0..plan.cols {
            let m = plan.matrix[i * plan.cols + j];
            if m > 1e-15 {
                csv.push_str(&format!("{i},{j},{m:.17e}\n"));
            }
        }
    }
    write_atomic(path, csv.as_bytes())
}

#[allow(clippy::too_many_arguments)]
fn cmd_w1(
    a: &Path,
    b: &Path,
    method: MethodArg,
    cost: CostArg,
    epsilon: f64,
    max_iter: usize,
    plan_out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let ia = load_mvi(a)?;
    let ib = load_mvi(b)?;
    let sa = SampleSet::from_image(&ia)?;
    let sb = SampleSet::from_image(&ib)?;
    let costs = match cost {
        CostArg::Geodesic => cost_matrix(&sa, &sb)?,
        CostArg::Anchored => cost_matrix_anchored(&sa, &sb, &ia.anchor)?,
    };
    let plan = match method {
        MethodArg::Exact => solve_w1_exact(&costs, &sa.weights, &sb.weights)?,
        MethodArg::Sinkhorn => {
            let (plan, outcome) =
                solve_w1_sinkhorn(&costs, &sa.weights, &sb.weights, epsilon, max_iter)?;
            if !outcome.converged {
                eprintln!(
                    "warning: sinkhorn stopped at marginal violation {:.3e} after {} iterations",
                    outcome.marginal_violation, outcome.iterations
                );
            }
            plan
        }
    };
    println!("{:.12}", plan.cost);
    if let Some(path) = plan_out {
        write_plan_csv(path, &plan)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_train(config: &Path) -> Result<ExitCode, Error> {
    let text = fs::read_to_string(config)?;
    let cfg: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("config: {e}")))?;
    fs::create_dir_all(&cfg.output_dir)?;
    let outcome = train(&cfg.trainer)?;
    outcome.log.write_csv(&cfg.output_dir.join("log.csv"))?;
    for cp in &outcome.checkpoints {
        save_checkpoint(
            &cfg.output_dir.join(format!("checkpoint_{:06}.bin", cp.iter)),
            cp,
        )?;
    }
    if let Some(last) = outcome.checkpoints.last() {
        save_checkpoint(&cfg.output_dir.join("checkpoint_final.bin"), last)?;
    }
    let series = outcome.log.w1_series();
    if let (Some(first), Some(last)) = (series.first(), series.last()) {
        println!(
            "trained {} generator iterations; w1 {:.6} -> {:.6}",
            cfg.trainer.generator_iters, first.1, last.1
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn fractional_anisotropy(m: &eig::Mat3) -> f64 {
    let (vals, _) = eig::sym_eigen(m);
    let mean = (vals[0] + vals[1] + vals[2]) / 3.0;
    let num: f64 = vals.iter().map(|l| (l - mean) * (l - mean)).sum();
    let den: f64 = vals.iter().map(|l| l * l).sum();
    if den == 0.0 {
        return 0.0;
    }
    (1.5 * num / den).sqrt().clamp(0.0, 1.0)
}

fn preview(img: &ManifoldImage) -> Result<RgbImage, Error> {
    match img.tag {
        GeometryTag::HsvProduct => hsv_to_rgb(img),
        GeometryTag::Sphere2 => {
            let bright = BrightnessChannel {
                height: img.height,
                width: img.width,
                values: vec![1.0; img.height * img.width],
            };
            cb_to_rgb(img, &bright)
        }
        GeometryTag::Spd3 => {
            let pixels = img
                .pixels
                .iter()
                .map(|p| match p {
                    ManifoldPoint::Spd(m) => {
                        let fa = fractional_anisotropy(m);
                        [fa, fa, fa]
                    }
                    _ => unreachable!(),
                })
                .collect();
            RgbImage::new(img.height, img.width, pixels)
        }
    }
}

fn cmd_sample(checkpoint: &Path, n: usize, out: &Path, seed: u64) -> Result<ExitCode, Error> {
    if n == 0 {
        return Err(Error::Config("n must be positive".into()));
    }
    let cp = load_checkpoint(checkpoint)?;
    let geom = GanGeometry::new(cp.geometry, cp.anchor.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = generate(&cp.generator, &geom, &mut rng, n)?;
    fs::create_dir_all(out)?;
    let anchor = AnchorSet::default().anchor(cp.geometry);
    for (i, p) in points.into_iter().enumerate() {
        p.validate()?;
        let img = ManifoldImage::new(cp.geometry, 1, 1, vec![p], anchor.clone())?;
        save_file(&out.join(format!("sample_{i:03}.mvi")), |path| {
            save_mvi(&img, path)
        })?;
        let rgb = preview(&img)?;
        save_file(&out.join(format!("sample_{i:03}.ppm")), |path| {
            save_ppm(&rgb, path)
        })?;
    }
    println!("wrote {n} samples to {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn polyline(points: &[(f64, f64)], color: &str) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        coords.join(" ")
    )
}

/// Minimal line chart: each series is scaled to its own vertical range.
fn render_svg(neg_critic: &[(f64, f64)], w1: &[(f64, f64)]) -> String {
    let (w, h, margin) = (800.0, 400.0, 50.0);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{margin}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{margin}\" y1=\"{margin}\" x2=\"{margin}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - margin,
        w - margin,
        h - margin,
        h - margin
    ));
    let x_max = neg_critic
        .iter()
        .chain(w1)
        .map(|(x, _)| *x)
        .fold(1.0f64, f64::max);
    let mut scaled = |series: &[(f64, f64)], color: &str| {
        if series.is_empty() {
            return;
        }
        let y_min = series.iter().map(|(_, y)| *y).fold(f64::INFINITY, f64::min);
        let y_max = series.iter().map(|(_, y)| *y).fold(f64::NEG_INFINITY, f64::max);
        let span = (y_max - y_min).max(1e-12);
        let pts: Vec<(f64, f64)> = series
            .iter()
            .map(|(x, y)| {
                (
                    margin + (w - 2.0 * margin) * x / x_max,
                    h - margin - (h - 2.0 * margin) * (y - y_min) / span,
                )
            })
            .collect();
        svg.push_str(&polyline(&pts, color));
    };
    scaled(neg_critic, "#1f77b4");
    scaled(w1, "#d62728");
    svg.push_str(&format!(
        "<text x=\"{margin}\" y=\"30\" fill=\"#1f77b4\">negative critic cost</text>\n\
         <text x=\"250\" y=\"30\" fill=\"#d62728\">w1 eval</text>\n\
         <text x=\"{}\" y=\"{}\" fill=\"black\">iteration</text>\n</svg>\n",
        w / 2.0 - 30.0,
        h - 10.0
    ));
    svg
}

fn cmd_plot(log: &Path, out: &Path) -> Result<ExitCode, Error> {
    let text = fs::read_to_string(log)?;
    let parsed = TrainingLog::from_csv(&text)?;
    let mut csv = String::from("iter,neg_critic_cost,w1_eval\n");
    let mut neg_critic = Vec::new();
    let mut w1 = Vec::new();
    for r in &parsed.records {
        let neg = -r.critic_loss;
        if neg.is_finite() {
            neg_critic.push((r.iter as f64, neg));
        }
        if let Some(v) = r.w1_eval {
            w1.push((r.iter as f64, v));
        }
        csv.push_str(&format!(
            "{},{},{}\n",
            r.iter,
            if neg.is_finite() {
                format!("{neg:.17e}")
            } else {
                String::new()
            },
            r.w1_eval.map(|v| format!("{v:.17e}")).unwrap_or_default()
        ));
    }
    let mut csv_path = out.as_os_str().to_owned();
    csv_path.push(".csv");
    write_atomic(Path::new(&csv_path), csv.as_bytes())?;
    let mut svg_path = out.as_os_str().to_owned();
    svg_path.push(".svg");
    write_atomic(Path::new(&svg_path), render_svg(&neg_critic, &w1).as_bytes())?;
    println!("wrote {} and {}", csv_path.to_string_lossy(), svg_path.to_string_lossy());
    Ok(ExitCode::SUCCESS)
}
