//! `sappi` command-line front end.
//!
//! Exit codes: 0 on success, 1 when the computation itself fails (bad input
//! file, overflow, I/O), 2 on usage errors. Usage errors are detected before
//! any work is done, so they never leave partial output behind.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sappi::adders::{build_program, truth_table, write_truth_table_csv, CELL_A, CELL_B, CELL_C};
use sappi::cost::{application_gains, comparison_table, write_comparison_csv};
use sappi::image::{
    blur_mul_config, gaussian_blur, image_add, load_image, rgb_to_gray, save_image, AppOutput,
    GrayImage, Image, Kernel, QualityReport,
};
use sappi::imply::{run_program, write_trace, OutputRole};
use sappi::metrics::{exhaustive_metrics, ErrorReport, MAX_EXHAUSTIVE_WIDTH};
use sappi::mnist::{evaluate, inference_mul_config, load_idx, load_weights};
use sappi::{AdderKind, LogicLevel, RcaConfig};

/// Adder width used for pixel-wise addition and grayscale conversion.
const PIXEL_WIDTH: u32 = 8;
/// Adder width used by the shift-and-add multiplier (blur and inference).
const MULTIPLY_WIDTH: u32 = 20;

#[derive(Parser, Debug)]
#[command(
    name = "sappi",
    version,
    about = "Simulator for IMPLY-based approximate full adders"
)]
struct Cli {
    /// Worker threads for parallel sections (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
enum Command {
    /// Full-adder truth table, checked against the step program.
    TruthTable(TruthTableArgs),
    /// Runs one full-adder program on single-bit inputs.
    Simulate(SimulateArgs),
    /// Exhaustive error metrics of an n-bit adder with k approximate bits.
    ErrorMetrics(ErrorMetricsArgs),
    /// Energy, step and memristor comparison of all adder designs.
    Compare(CompareArgs),
    /// Pixel-wise average of two grayscale images.
    ImageAdd(ImageAddArgs),
    /// RGB to grayscale conversion.
    Grayscale(SingleImageArgs),
    /// 3x3 binomial blur on the shift-and-add multiplier.
    Blur(SingleImageArgs),
    /// Quantized classifier accuracy on an IDX data set.
    MnistEval(MnistEvalArgs),
    /// Energy and step savings for a given number of additions.
    Gains(GainsArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::TruthTable(_) => "truth-table",
            Command::Simulate(_) => "simulate",
            Command::ErrorMetrics(_) => "error-metrics",
            Command::Compare(_) => "compare",
            Command::ImageAdd(_) => "image-add",
            Command::Grayscale(_) => "grayscale",
            Command::Blur(_) => "blur",
            Command::MnistEval(_) => "mnist-eval",
            Command::Gains(_) => "gains",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
struct TruthTableArgs {
    #[arg(long, value_parser = parse_executable)]
    kind: AdderKind,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    #[arg(long, value_parser = parse_programmed)]
    kind: AdderKind,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    a: u8,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    b: u8,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    c: u8,
    /// Print one line per executed micro-operation.
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug, Serialize)]
struct ErrorMetricsArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    #[arg(long, value_parser = parse_executable)]
    kind: AdderKind,
    /// CSV destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CompareArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    /// CSV destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct ImageAddArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    k: u32,
    #[arg(long, value_parser = parse_executable)]
    kind: AdderKind,
    #[arg(long)]
    out: PathBuf,
    /// JSON quality report destination (default: stdout).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SingleImageArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    k: u32,
    #[arg(long, value_parser = parse_executable)]
    kind: AdderKind,
    #[arg(long)]
    out: PathBuf,
    /// JSON quality report destination (default: stdout).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct MnistEvalArgs {
    #[arg(long)]
    images: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    weights: PathBuf,
    #[arg(long)]
    k: u32,
    #[arg(long, value_parser = parse_executable)]
    kind: AdderKind,
    /// Number of leading images to classify (capped at the set size).
    #[arg(long, default_value_t = 1000)]
    limit: usize,
    /// JSON report destination (default: stdout).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct GainsArgs {
    #[arg(long)]
    application: String,
    #[arg(long)]
    additions: u64,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    #[arg(long, value_parser = parse_kind)]
    kind: AdderKind,
}

fn parse_kind(s: &str) -> Result<AdderKind, String> {
    s.parse().map_err(|e: sappi::Error| e.to_string())
}

fn parse_executable(s: &str) -> Result<AdderKind, String> {
    let kind = parse_kind(s)?;
    if kind.is_executable() {
        Ok(kind)
    } else {
        Err(format!(
            "`{kind}` is cost-only; expected exact, sappi1 or sappi2"
        ))
    }
}

fn parse_programmed(s: &str) -> Result<AdderKind, String> {
    let kind = parse_kind(s)?;
    if kind.has_program() {
        Ok(kind)
    } else {
        Err(format!(
            "`{kind}` has no step program; expected sappi1 or sappi2"
        ))
    }
}

enum Failure {
    Usage(String),
    Domain(sappi::Error),
}

impl From<sappi::Error> for Failure {
    fn from(e: sappi::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(sappi::Error::Io {
            path: "<stdout>".into(),
            source: e,
        })
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn usage(e: sappi::Error) -> Failure {
    Failure::Usage(e.to_string())
}

/// Adder configuration built from user flags; rejections are usage errors.
fn adder(n: u32, k: u32, kind: AdderKind) -> CliResult<RcaConfig> {
    RcaConfig::new(n, k, kind).map_err(usage)
}

#[derive(Serialize)]
struct RunManifest<'a> {
    subcommand: &'a str,
    params: &'a Command,
    threads: usize,
    version: &'static str,
    timestamp_unix: u64,
    outputs: Vec<&'a Path>,
}

struct Session<'a> {
    command: &'a Command,
    threads: usize,
}

impl Session<'_> {
    /// Writes `<path>.manifest.json` next to each file output.
    fn manifest(&self, outputs: &[&Path]) -> CliResult {
        let timestamp_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let manifest = RunManifest {
            subcommand: self.command.name(),
            params: self.command,
            threads: self.threads,
            version: env!("CARGO_PKG_VERSION"),
            timestamp_unix,
            outputs: outputs.to_vec(),
        };
        let body = serde_json::to_string_pretty(&manifest).map_err(sappi::Error::from)?;
        for path in outputs {
            let mut name = path.as_os_str().to_owned();
            name.push(".manifest.json");
            write_file(Path::new(&name), format!("{body}\n").as_bytes())?;
        }
        Ok(())
    }

    /// Sends `body` to `dest`, or stdout when no destination was given.
    fn emit(&self, dest: Option<&Path>, body: &[u8], extra: &[&Path]) -> CliResult {
        match dest {
            Some(path) => {
                write_file(path, body)?;
                let mut outputs = extra.to_vec();
                outputs.push(path);
                self.manifest(&outputs)
            }
            None => {
                if !extra.is_empty() {
                    self.manifest(extra)?;
                }
                io::stdout().write_all(body)?;
                Ok(())
            }
        }
    }
}

fn write_file(path: &Path, body: &[u8]) -> CliResult {
    fs::write(path, body).map_err(|source| {
        Failure::Domain(sappi::Error::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

fn json(value: &impl Serialize) -> CliResult<Vec<u8>> {
    let mut body = serde_json::to_vec_pretty(value).map_err(sappi::Error::from)?;
    body.push(b'\n');
    Ok(body)
}

fn load_gray(path: &Path) -> CliResult<GrayImage> {
    Ok(load_image(path)?.into_gray()?)
}

fn image_app(
    session: &Session,
    label: &str,
    cfg: &RcaConfig,
    reference: &AppOutput,
    output: &AppOutput,
    out: &Path,
    report: Option<&Path>,
) -> CliResult {
    let quality = QualityReport::new(label, cfg, &reference.image, output)?;
    let body = json(&quality)?;
    save_image(&Image::Gray(output.image.clone()), out)?;
    session.emit(report, &body, &[out])
}

fn run(session: &Session) -> CliResult {
    match session.command {
        Command::TruthTable(args) => {
            let rows = truth_table(args.kind)?;
            let mut body = Vec::new();
            match args.format {
                TableFormat::Csv => write_truth_table_csv(&mut body, &rows)?,
                TableFormat::Json => body = json(&rows)?,
            }
            session.emit(None, &body, &[])
        }
        Command::Simulate(args) => {
            let program = build_program(args.kind)?;
            let level = |v: u8| LogicLevel::from(v == 1);
            let run = run_program(
                &program,
                &[
                    (CELL_A, level(args.a)),
                    (CELL_B, level(args.b)),
                    (CELL_C, level(args.c)),
                ],
            )?;
            let mut out = io::stdout().lock();
            writeln!(
                out,
                "sum={} cout={}",
                run.output(OutputRole::Sum),
                run.output(OutputRole::Cout)
            )?;
            if args.trace {
                write_trace(&mut out, &run.trace)?;
            }
            Ok(())
        }
        Command::ErrorMetrics(args) => {
            let cfg = adder(args.n, args.k, args.kind)?;
            if args.n > MAX_EXHAUSTIVE_WIDTH {
                return Err(usage(sappi::Error::ResourceGuard {
                    bits: 2 * args.n,
                    limit: MAX_EXHAUSTIVE_WIDTH,
                }));
            }
            let report = exhaustive_metrics(&cfg)?;
            let mut body = Vec::new();
            ErrorReport::write_csv(&[report], &mut body)?;
            session.emit(args.out.as_deref(), &body, &[])
        }
        Command::Compare(args) => {
            let rows = comparison_table(args.n, args.k).map_err(usage)?;
            let mut body = Vec::new();
            write_comparison_csv(&mut body, &rows)?;
            session.emit(args.out.as_deref(), &body, &[])
        }
        Command::ImageAdd(args) => {
            let cfg = adder(PIXEL_WIDTH, args.k, args.kind)?;
            let exact = adder(PIXEL_WIDTH, 0, AdderKind::Exact)?;
            let (a, b) = (load_gray(&args.a)?, load_gray(&args.b)?);
            let output = image_add(&cfg, &a, &b)?;
            let reference = image_add(&exact, &a, &b)?;
            image_app(
                session,
                "image_add",
                &cfg,
                &reference,
                &output,
                &args.out,
                args.report.as_deref(),
            )
        }
        Command::Grayscale(args) => {
            let cfg = adder(PIXEL_WIDTH, args.k, args.kind)?;
            let exact = adder(PIXEL_WIDTH, 0, AdderKind::Exact)?;
            let img = load_image(&args.input)?.into_rgb()?;
            let output = rgb_to_gray(&cfg, &img)?;
            let reference = rgb_to_gray(&exact, &img)?;
            image_app(
                session,
                "grayscale",
                &cfg,
                &reference,
                &output,
                &args.out,
                args.report.as_deref(),
            )
        }
        Command::Blur(args) => {
            let kernel = Kernel::binomial3();
            let mul = blur_mul_config(adder(MULTIPLY_WIDTH, args.k, args.kind)?, &kernel)
                .map_err(usage)?;
            let exact = blur_mul_config(adder(MULTIPLY_WIDTH, 0, AdderKind::Exact)?, &kernel)
                .map_err(usage)?;
            let img = load_gray(&args.input)?;
            let output = gaussian_blur(&mul, &kernel, &img)?;
            let reference = gaussian_blur(&exact, &kernel, &img)?;
            image_app(
                session,
                "blur",
                &mul.rca,
                &reference,
                &output,
                &args.out,
                args.report.as_deref(),
            )
        }
        Command::MnistEval(args) => {
            let mul =
                inference_mul_config(adder(MULTIPLY_WIDTH, args.k, args.kind)?).map_err(usage)?;
            let net = load_weights(&args.weights)?;
            let set = load_idx(&args.images, &args.labels)?;
            let report = evaluate(&net, &set, &mul, args.limit.min(set.len()))?;
            session.emit(args.report.as_deref(), &json(&report)?, &[])
        }
        Command::Gains(args) => {
            let cfg = adder(args.n, args.k, args.kind)?;
            let report =
                application_gains(&args.application, args.additions, &cfg).map_err(usage)?;
            session.emit(None, &json(&report)?, &[])
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let session = Session {
        command: &cli.command,
        threads: cli.threads,
    };
    match run(&session) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
