use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qedge::image::{load_pgm, save_pgm, PgmFormat};
use qedge::neuron::build_variant_circuits;
use qedge::pipeline::{
    compare_variants, fidelity_csv, histogram_csv, plan_measurements, run_variant, CompareOptions,
    JobLimits, VariantConfig, DEFAULT_SEED,
};
use qedge::samples::{binary_sample, gray_sample, house_like};
use qedge::transpile::{gate_counts, transpile};
use qedge::{Direction, GrayImage, VariantKind};

#[derive(Parser)]
#[command(
    name = "qedge",
    version,
    about = "Edge detection with phase-encoded quantum neurons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect edges in a PGM image.
    Detect(DetectArgs),
    /// Score variants against the closed-form reference over several seeds.
    Compare(CompareArgs),
    /// Report basis-gate counts of each variant's circuit.
    Gates(GatesArgs),
    /// Show how circuits are batched into jobs.
    Plan(PlanArgs),
    /// Write one of the built-in test images.
    Sample(SampleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionSet {
    Hv,
    Hvd,
}

impl DirectionSet {
    fn directions(self) -> Vec<Direction> {
        match self {
            DirectionSet::Hv => vec![Direction::Horizontal, Direction::Vertical],
            DirectionSet::Hvd => Direction::ALL.to_vec(),
        }
    }
}

fn parse_variant(s: &str) -> Result<VariantKind, String> {
    s.parse().map_err(|e: qedge::Error| e.to_string())
}

#[derive(Args)]
struct LimitArgs {
    /// Maximum circuits per job.
    #[arg(long, default_value_t = qedge::pipeline::DEFAULT_CIRCUITS_PER_JOB)]
    circuits_per_job: usize,
    /// Maximum measurement operations per job.
    #[arg(long, default_value_t = qedge::pipeline::DEFAULT_MEASUREMENTS_PER_JOB)]
    meas_per_job: usize,
}

impl LimitArgs {
    fn limits(&self) -> JobLimits {
        JobLimits {
            circuits: self.circuits_per_job,
            measurements: self.meas_per_job,
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    /// std32t, std50, seq50, para50, para50-3pix, seqpara50 or twod.
    #[arg(long, value_parser = parse_variant)]
    variant: VariantKind,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Shots per circuit; defaults to the variant's own.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Use exact probabilities instead of sampling.
    #[arg(long)]
    exact: bool,
    /// Defaults to hv for twod and hvd otherwise.
    #[arg(long, value_enum)]
    directions: Option<DirectionSet>,
    #[command(flatten)]
    limits: LimitArgs,
    /// Also write one probability image per direction.
    #[arg(long)]
    per_direction: bool,
    /// Write binary (P5) instead of plain (P2) images.
    #[arg(long)]
    binary: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Input image; the built-in gray sample when omitted.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Comma-separated variants; the six 1D variants when omitted.
    #[arg(long, value_parser = parse_variant, value_delimiter = ',')]
    variant: Vec<VariantKind>,
    /// First seed; runs use consecutive seeds.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 24)]
    runs: u64,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    exact: bool,
    #[arg(long, value_enum)]
    directions: Option<DirectionSet>,
    #[command(flatten)]
    limits: LimitArgs,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GatesArgs {
    /// Single variant; all of them when omitted.
    #[arg(long, value_parser = parse_variant)]
    variant: Option<VariantKind>,
    /// Fail unless the counts match the expected targets.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long, value_parser = parse_variant)]
    variant: VariantKind,
    /// Image whose size is planned for.
    #[arg(long = "in", conflicts_with_all = ["width", "height"])]
    input: Option<PathBuf>,
    #[arg(long, requires = "height")]
    width: Option<usize>,
    #[arg(long, requires = "width")]
    height: Option<usize>,
    #[arg(long, value_enum)]
    directions: Option<DirectionSet>,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleKind {
    Binary,
    Gray,
    House,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(value_enum)]
    kind: SampleKind,
    #[arg(long)]
    out: PathBuf,
    /// Edge length of the house image.
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long)]
    binary: bool,
}

fn format_of(binary: bool) -> PgmFormat {
    if binary {
        PgmFormat::P5
    } else {
        PgmFormat::P2
    }
}

fn directions_for(kind: VariantKind, set: Option<DirectionSet>) -> Vec<Direction> {
    set.map_or_else(|| kind.default_directions(), DirectionSet::directions)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn detect(args: DetectArgs) -> Result<()> {
    let img = load_pgm(&args.input)?;
    let mut config = VariantConfig::new(args.variant)
        .with_seed(args.seed)
        .with_exact(args.exact)
        .with_directions(&directions_for(args.variant, args.directions))
        .with_limits(args.limits.limits());
    if let Some(shots) = args.shots {
        config.shots = shots;
    }
    let start = Instant::now();
    let result = run_variant(&img, &config)?;
    let elapsed = start.elapsed();

    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let format = format_of(args.binary);
    save_pgm(
        &result.combined_gray,
        args.out_dir.join("combined.pgm"),
        format,
    )?;
    save_pgm(
        &result.edges.to_gray(),
        args.out_dir.join("edges.pgm"),
        format,
    )?;
    write(
        &args.out_dir.join("histogram.csv"),
        &histogram_csv(&result.combined_gray.histogram()),
    )?;
    if args.per_direction {
        for (d, p) in &result.directions {
            save_pgm(
                &p.to_gray(),
                args.out_dir
                    .join(format!("direction_{}.pgm", d.short_name())),
                format,
            )?;
        }
    }
    println!(
        "{}: threshold {}, {} edge pixels, {} circuits in {} jobs, {:.3} s",
        args.variant,
        result.threshold,
        result.edges.count(),
        result.plan.circuits(),
        result.plan.len(),
        elapsed.as_secs_f64()
    );
    Ok(())
}

fn compare(args: CompareArgs) -> Result<()> {
    let img = match &args.input {
        Some(path) => load_pgm(path)?,
        None => gray_sample(),
    };
    let kinds = if args.variant.is_empty() {
        VariantKind::ONE_D.to_vec()
    } else {
        args.variant.clone()
    };
    let seeds: Vec<u64> = (0..args.runs).map(|i| args.seed.wrapping_add(i)).collect();
    let options = CompareOptions {
        exact: args.exact,
        shots: args.shots,
        directions: args.directions.map(DirectionSet::directions),
        limits: args.limits.limits(),
    };
    let csv = fidelity_csv(&compare_variants(&img, &kinds, &seeds, &options)?);
    match &args.out {
        Some(path) => write(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

/// Expected `(SX, Rz, depth)`; depth is only pinned for the single-pair
/// circuit.
fn gate_target(kind: VariantKind) -> Option<(usize, usize, Option<usize>)> {
    match kind {
        VariantKind::Std32T | VariantKind::Std50 => Some((2, 3, Some(6))),
        VariantKind::Seq50 | VariantKind::Para50 => Some((6, 9, None)),
        VariantKind::Para50ThreePix => Some((18, 27, None)),
        VariantKind::SeqPara50 => Some((24, 36, None)),
        VariantKind::TwoD => None,
    }
}

fn gates(args: GatesArgs) -> Result<bool> {
    // Distinct values everywhere, so no pair difference vanishes.
    let img = GrayImage::from_fn(8, 8, |x, y| ((x * 37 + y * 91 + 11) % 256) as u8)?;
    let kinds = args
        .variant
        .map_or_else(|| VariantKind::ALL.to_vec(), |k| vec![k]);
    let mut ok = true;
    for kind in kinds {
        let built = build_variant_circuits(kind, &img, &kind.default_directions())?;
        let n = gate_counts(transpile(&built.circuits[0])?.as_circuit());
        let mut line = format!("{kind}: SX: {}, Rz: {}, depth {}", n.sx(), n.rz(), n.depth);
        if n.cx() > 0 || n.x() > 0 {
            line.push_str(&format!(", CX: {}, X: {}", n.cx(), n.x()));
        }
        if args.check {
            if let Some((sx, rz, depth)) = gate_target(kind) {
                let matches = n.sx() == sx && n.rz() == rz && depth.is_none_or(|d| d == n.depth);
                ok &= matches;
                line.push_str(if matches { "  ok" } else { "  MISMATCH" });
            }
        }
        println!("{line}");
    }
    Ok(ok)
}

fn plan(args: PlanArgs) -> Result<()> {
    let (width, height) = match (&args.input, args.width, args.height) {
        (Some(path), _, _) => {
            let img = load_pgm(path)?;
            (img.width(), img.height())
        }
        (None, Some(w), Some(h)) => (w, h),
        _ => bail!("give either --in or both --width and --height"),
    };
    let dirs = directions_for(args.variant, args.directions);
    let img = GrayImage::filled(width, height, 0)?;
    let built = build_variant_circuits(args.variant, &img, &dirs)?;
    let plan = plan_measurements(&built.measurements(), args.limits.limits())?;
    println!(
        "{}: {width}x{height}, circuits {}, measurements {}, jobs {}",
        args.variant,
        plan.circuits(),
        plan.measurements(),
        plan.len()
    );
    Ok(())
}

fn sample(args: SampleArgs) -> Result<()> {
    let img = match args.kind {
        SampleKind::Binary => binary_sample(),
        SampleKind::Gray => gray_sample(),
        SampleKind::House => house_like(args.size),
    };
    save_pgm(&img, &args.out, format_of(args.binary))?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Detect(a) => detect(a).map(|_| true),
        Command::Compare(a) => compare(a).map(|_| true),
        Command::Gates(a) => gates(a),
        Command::Plan(a) => plan(a).map(|_| true),
        Command::Sample(a) => sample(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
