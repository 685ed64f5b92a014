use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use kleinian::bench::{self, BenchOptions, RulesVariant, TABLE_LENGTHS};
use kleinian::config::{self, GroupConfig};
use kleinian::enumerate::{EnumerateError, EnumerationMode, EnumeratorConfig};
use kleinian::render::{self, DiscStyle, Palette, RenderError, RenderJob, RenderKind, SeedPolicy, Viewport};
use kleinian::Complex;

#[derive(Debug, Error)]
enum CliError {
    /// Bad input: exit status 2.
    #[error("{0}")]
    Config(String),
    /// Failure while running a valid job: exit status 1.
    #[error("{0}")]
    Runtime(String),
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Config(format!("group: {e}"))
    }
}

impl From<EnumerateError> for CliError {
    fn from(e: EnumerateError) -> Self {
        match e {
            EnumerateError::Overflow => CliError::Runtime(e.to_string()),
            _ => CliError::Config(format!("range: {e}")),
        }
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Enumerate(inner) => inner.into(),
            RenderError::Io { .. } => CliError::Config(format!("output: {e}")),
            RenderError::InvalidJob(_) | RenderError::NoBaseCircle(..) => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "kleinian", version, about = "Render limit sets and tessellations of Kleinian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a limit set or tessellation to a binary PPM file.
    Render(RenderArgs),
    /// Time the word enumerators and report peak word storage.
    Bench(BenchArgs),
    /// Word counts for n generators with one cancelling neighbour each.
    Counts(CountsArgs),
    /// List the built-in groups.
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Lex,
    Cardinal,
    Ordinal,
}

impl From<ModeArg> for EnumerationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Lex => EnumerationMode::LexicographicTree,
            ModeArg::Cardinal => EnumerationMode::IndexCardinal,
            ModeArg::Ordinal => EnumerationMode::IndexOrdinal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Limitset,
    Tessellation,
}

#[derive(Clone, Copy, ValueEnum)]
enum PaletteArg {
    Depth,
    Generator,
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    Fill,
    Stroke,
}

#[derive(Args)]
struct RenderArgs {
    /// Group definition file or preset name.
    #[arg(long, default_value = "tangent4")]
    group: String,
    #[arg(long, value_enum, default_value = "ordinal")]
    mode: ModeArg,
    #[arg(long, default_value_t = 8)]
    depth: usize,
    /// Integer range a..b (index modes only).
    #[arg(long, value_parser = parse_range)]
    range: Option<(u128, u128)>,
    #[arg(long, value_enum, default_value = "limitset")]
    kind: KindArg,
    /// Image size as WxH.
    #[arg(long, value_parser = parse_size, default_value = "512x512")]
    size: (usize, usize),
    /// Viewport as cx,cy,half.
    #[arg(long, value_parser = parse_viewport, allow_hyphen_values = true)]
    viewport: Option<Viewport>,
    #[arg(long, value_enum, default_value = "depth")]
    palette: PaletteArg,
    #[arg(long, value_enum, default_value = "fill")]
    style: StyleArg,
    /// Seed point as re,im instead of a generator fixed point.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    seed: Option<Complex>,
    #[arg(long, default_value = "out.ppm")]
    out: PathBuf,
    /// Print render counters as key=value lines.
    #[arg(long)]
    stats: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "tangent4")]
    group: String,
    #[arg(long, default_value_t = 8)]
    depth: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["lex", "cardinal", "ordinal"])]
    modes: Vec<ModeArg>,
    /// Concurrent ranges for index modes.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Stop each mode after this many milliseconds.
    #[arg(long)]
    budget_ms: Option<u64>,
    /// Also write CSV rows to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CountsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    depth: usize,
    /// Every generator is its own inverse (otherwise i pairs with i + n/2).
    #[arg(long)]
    self_inverse: bool,
    /// Print the step and size table for the usual lengths instead.
    #[arg(long)]
    table: bool,
}

fn parse_range(s: &str) -> Result<(u128, u128), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got '{s}'"))?;
    let a = a.trim().parse().map_err(|_| format!("bad range start '{a}'"))?;
    let b = b.trim().parse().map_err(|_| format!("bad range end '{b}'"))?;
    Ok((a, b))
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WxH, got '{s}'"))?;
    let w: usize = w.parse().map_err(|_| format!("bad width '{w}'"))?;
    let h: usize = h.parse().map_err(|_| format!("bad height '{h}'"))?;
    if w == 0 || h == 0 {
        return Err("size must be positive".into());
    }
    Ok((w, h))
}

fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number '{p}'")))
        .collect::<Result<_, _>>()?;
    let arr: [f64; N] = parts.try_into().map_err(|_| format!("expected {N} comma-separated numbers"))?;
    if arr.iter().any(|v| !v.is_finite()) {
        return Err("numbers must be finite".into());
    }
    Ok(arr)
}

fn parse_viewport(s: &str) -> Result<Viewport, String> {
    let [cx, cy, half] = parse_floats::<3>(s)?;
    if half <= 0.0 {
        return Err("half-extent must be positive".into());
    }
    Ok(Viewport::new(Complex::new(cx, cy), half))
}

fn parse_complex(s: &str) -> Result<Complex, String> {
    let [re, im] = parse_floats::<2>(s)?;
    Ok(Complex::new(re, im))
}

/// Bounding square of the generators' base circles, or a unit-ish window.
fn auto_viewport(cfg: &GroupConfig) -> Viewport {
    let circles: Vec<_> = cfg.generators.generators().iter().filter_map(|g| g.base_circle().ok()).collect();
    if circles.is_empty() {
        return Viewport::new(Complex::new(0.0, 0.0), 2.0);
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for c in &circles {
        let (z, r) = (c.center(), c.radius());
        x0 = x0.min(z.re - r);
        x1 = x1.max(z.re + r);
        y0 = y0.min(z.im - r);
        y1 = y1.max(z.im + r);
    }
    let half = 0.5 * (x1 - x0).max(y1 - y0) * 1.05;
    Viewport::new(Complex::new(0.5 * (x0 + x1), 0.5 * (y0 + y1)), half)
}

fn enumerator(base: usize, depth: usize, mode: EnumerationMode, range: Option<(u128, u128)>) -> Result<EnumeratorConfig, CliError> {
    let cfg = EnumeratorConfig::new(base, depth, mode)?;
    match range {
        Some(_) if mode == EnumerationMode::LexicographicTree => {
            Err(CliError::Config("range: --range applies only to cardinal and ordinal modes".into()))
        }
        Some((a, b)) => Ok(cfg.with_range(a, b)?),
        None => Ok(cfg),
    }
}

fn run_render(args: RenderArgs) -> Result<(), CliError> {
    let group = config::load(&args.group)?;
    let cfg = enumerator(group.generators.len(), args.depth, args.mode.into(), args.range)?;
    if args.jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    let viewport = args.viewport.or(group.view).unwrap_or_else(|| auto_viewport(&group));
    let mut job = RenderJob::new(
        group.generators,
        group.rules,
        cfg,
        match args.kind {
            KindArg::Limitset => RenderKind::LimitSet,
            KindArg::Tessellation => RenderKind::Tessellation,
        },
    );
    job.viewport = viewport;
    (job.width, job.height) = args.size;
    job.palette = match args.palette {
        PaletteArg::Depth => Palette::by_depth(),
        PaletteArg::Generator => Palette::by_generator(),
    };
    job.disc_style = match args.style {
        StyleArg::Fill => DiscStyle::Fill,
        StyleArg::Stroke => DiscStyle::Stroke,
    };
    job.seed = args.seed.map_or(SeedPolicy::FixedPoint, SeedPolicy::Explicit);
    job.jobs = args.jobs;

    // fail on an unwritable path before spending time on the render
    let mut file = fs::File::create(&args.out)
        .map_err(|e| CliError::Config(format!("output: cannot write {}: {e}", args.out.display())))?;
    let (image, stats) = match render::render(&job) {
        Ok(r) => r,
        Err(e) => {
            drop(file);
            let _ = fs::remove_file(&args.out);
            return Err(e.into());
        }
    };
    file.write_all(&image.to_ppm())
        .and_then(|_| file.flush())
        .map_err(|e| CliError::Runtime(format!("output: cannot write {}: {e}", args.out.display())))?;
    if args.stats {
        println!("{stats}");
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<(), CliError> {
    let group = config::load(&args.group)?;
    let modes: Vec<EnumerationMode> = args.modes.iter().map(|&m| m.into()).collect();
    let opts = BenchOptions { time_budget: args.budget_ms.map(Duration::from_millis), ranges: args.jobs.max(1) };
    let results = bench::run_bench(&group.rules, args.depth, &modes, &opts)?;
    print!("{}", bench::to_text(&results));
    if let Some(path) = &args.csv {
        fs::write(path, bench::to_csv(&results))
            .map_err(|e| CliError::Config(format!("output: cannot write {}: {e}", path.display())))?;
    }
    if let Some(bad) = results.iter().find(|r| !r.storage_within_bound()) {
        return Err(CliError::Runtime(format!(
            "{} mode held {} words / {} symbols, above the streaming bound",
            bench::mode_name(bad.mode),
            bad.peak_retained_words,
            bad.peak_retained_symbols
        )));
    }
    Ok(())
}

fn run_counts(args: CountsArgs) -> Result<(), CliError> {
    let variant = if args.self_inverse { RulesVariant::SelfInverse } else { RulesVariant::Paired };
    if args.table {
        let table = bench::count_table(args.n, &TABLE_LENGTHS, variant)?;
        print!("{table}");
        return Ok(());
    }
    variant.pair_rules(args.n).map_err(|e| CliError::Config(e.to_string()))?;
    let table = bench::count_table(args.n, &[args.depth], variant)?;
    println!("{}", table.rows[0].tessellation_steps);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Render(a) => run_render(a),
        Command::Bench(a) => run_bench(a),
        Command::Counts(a) => run_counts(a),
        Command::Presets => {
            for p in config::presets() {
                println!("{:<10} {}", p.name, p.description);
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Runtime(_) => ExitCode::from(1),
            }
        }
    }
}
