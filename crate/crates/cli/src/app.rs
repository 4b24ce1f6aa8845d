use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use stvsr_core::degradation::check_degradable;
use stvsr_core::{
    bicubic_kernel, degrade, exposure_box_kernel, gaussian_spatial_kernel, restore, ColorSpace, DegradationSpec,
    Kernel3D, MetricReport,
};

use crate::checks;
use crate::config::ExperimentConfig;
use crate::error::{io_err, CliError, Result};
use crate::io::{read_frames, read_kernel, write_frames, write_kernel};
use crate::report;

#[derive(Parser, Debug)]
#[command(name = "stvsr", version, about = "Space-time video super-resolution by half-quadratic splitting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Blur, decimate and add noise to a high-resolution frame directory
    Degrade(PipelineArgs),
    /// Reconstruct high-resolution frames from a degraded directory
    Restore(PipelineArgs),
    /// Compare a frame directory against a reference
    Evaluate(EvaluateArgs),
    /// Check the closed-form data solve against the dense solver
    OracleCheck(OracleArgs),
    /// Measure data-solve runtime against problem size
    Bench(BenchArgs),
    /// Write a kernel file
    Kernel(KernelArgs),
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Kernel file; overrides `degradation.kernel`
    #[arg(short, long)]
    kernel: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(short, long)]
    reference: PathBuf,
    #[arg(short, long)]
    test: PathBuf,
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Compute metrics on BT.601 luma instead of all channels
    #[arg(long)]
    luma: bool,
    /// Report file [default: <TEST>/report.txt]
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Problem sizes as powers of two (at least 9)
    #[arg(long, value_delimiter = ',', default_value = "12,15,18")]
    exponents: Vec<u32>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Also time the dense solver at the smallest size
    #[arg(long)]
    dense: bool,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(short, long)]
    output: PathBuf,
    /// Temporal box over this many frames
    #[arg(long)]
    exposure: Option<usize>,
    /// Spatial Gaussian standard deviation
    #[arg(long)]
    gaussian: Option<f64>,
    /// Gaussian support (square)
    #[arg(long, default_value_t = 3)]
    size: usize,
    /// Bicubic anti-aliasing kernel for this spatial factor
    #[arg(long)]
    bicubic: Option<usize>,
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Degrade(args) => run_degrade(&args, out),
        Command::Restore(args) => run_restore(&args, out),
        Command::Evaluate(args) => run_evaluate(&args, out),
        Command::OracleCheck(args) => run_oracle(&args, out),
        Command::Bench(args) => run_bench(&args, out),
        Command::Kernel(args) => run_kernel(&args, out),
    }
}

fn say(out: &mut dyn Write, text: std::fmt::Arguments) -> Result<()> {
    out.write_fmt(text).map_err(io_err(Path::new("<stdout>")))
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => ExperimentConfig::load(p),
        None => Ok(ExperimentConfig::default()),
    }
}

fn pipeline_kernel(args: &PipelineArgs, cfg: &ExperimentConfig) -> Result<Kernel3D> {
    let path = args
        .kernel
        .as_ref()
        .or(cfg.degradation.kernel.as_ref())
        .ok_or_else(|| CliError::Usage("no kernel: pass --kernel or set degradation.kernel".into()))?;
    read_kernel(path)
}

fn run_degrade(args: &PipelineArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = load_config(args.config.as_deref())?;
    let kernel = pipeline_kernel(args, &cfg)?;
    let d = &cfg.degradation;
    let spec = DegradationSpec::new(kernel, cfg.scale()?, d.noise_sigma, d.seed)?;
    let x = read_frames(&args.input)?;
    check_degradable(x.extent(), &spec.kernel, spec.scale)?;
    let y = degrade(&x, &spec)?;
    write_frames(&y, &args.output, cfg.output.dump_trace)?;
    let [t, h, w, c] = y.dims();
    say(out, format_args!("wrote {t} frames of {h}x{w}x{c} to {}\n", args.output.display()))
}

fn run_restore(args: &PipelineArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = load_config(args.config.as_deref())?;
    let kernel = pipeline_kernel(args, &cfg)?;
    let scale = cfg.scale()?;
    let y = read_frames(&args.input)?;
    let (x, trace) = restore(&y, &kernel, scale, &cfg.hqs_config())?;
    let dump = cfg.output.dump_trace;
    write_frames(&x, &args.output, dump)?;
    if dump {
        for (k, step) in trace.steps.iter().enumerate() {
            let dir = args.output.join("trace").join(format!("iter_{:02}", k + 1));
            write_frames(&step.z, &dir.join("z"), true)?;
            write_frames(&step.x, &dir.join("x"), true)?;
        }
        let mut schedule = String::from("iteration alpha beta mu\n");
        let s = &trace.schedule;
        for k in 0..s.len() {
            schedule.push_str(&format!("{} {} {} {}\n", k + 1, s.alphas[k], s.betas[k], s.mus[k]));
        }
        let path = args.output.join("trace").join("schedule.txt");
        fs::write(&path, schedule).map_err(io_err(&path))?;
    }
    let [t, h, w, c] = x.dims();
    say(
        out,
        format_args!(
            "restored {t} frames of {h}x{w}x{c} in {} iterations to {}\n",
            trace.steps.len(),
            args.output.display()
        ),
    )
}

fn run_evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = load_config(args.config.as_deref())?;
    let color = if args.luma { ColorSpace::Luma } else { cfg.color_space() };
    let reference = read_frames(&args.reference)?;
    let test = read_frames(&args.test)?;
    let report = MetricReport::compute(&reference, &test, color, 1.0)?;
    let text = report::render(&report);
    let path = args.report.clone().unwrap_or_else(|| args.test.join("report.txt"));
    fs::write(&path, &text).map_err(io_err(&path))?;
    say(out, format_args!("{text}"))
}

fn run_oracle(args: &OracleArgs, out: &mut dyn Write) -> Result<()> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let sweep = checks::oracle_sweep(args.seed, args.trials)?;
    say(out, format_args!("trials = {}\nmax_deviation = {:e}\n", sweep.trials, sweep.max_deviation))?;
    if let Some(p) = sweep.worst {
        say(
            out,
            format_args!("worst = shape {:?} scale {:?} kernel {:?} alpha {}\n", p.hstr, p.scale, p.kernel, p.alpha),
        )?;
    }
    if sweep.max_deviation > args.tolerance {
        return Err(CliError::OracleMismatch(sweep.max_deviation));
    }
    Ok(())
}

fn run_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    if args.exponents.is_empty() || args.exponents.iter().any(|&e| !(9..=26).contains(&e)) {
        return Err(CliError::Usage("--exponents must lie in 9..=26".into()));
    }
    say(out, format_args!("{:>10}  {:>14}  {:>12}\n", "n", "extent", "seconds"))?;
    let mut points = Vec::new();
    for &e in &args.exponents {
        let extent = checks::bench_extent(e);
        let secs = checks::time_fdt(extent, args.repeats)?;
        let shape = format!("{}x{}x{}", extent[0], extent[1], extent[2]);
        say(out, format_args!("{:>10}  {:>14}  {:>12.6e}\n", 1u64 << e, shape, secs))?;
        points.push(((1u64 << e) as f64, secs));
    }
    if points.len() >= 2 {
        say(out, format_args!("slope = {:.4}\n", checks::loglog_slope(&points)))?;
    }
    if args.dense {
        let e = *args.exponents.iter().min().unwrap();
        if e > 12 {
            return Err(CliError::Usage("dense timing needs a size of at most 2^12".into()));
        }
        let dense = checks::time_dense(checks::bench_extent(e))?;
        let fast = points.iter().find(|p| p.0 == (1u64 << e) as f64).unwrap().1;
        say(out, format_args!("dense_seconds = {dense:.6e}\ndense_ratio = {:.1}\n", dense / fast))?;
    }
    Ok(())
}

fn run_kernel(args: &KernelArgs, out: &mut dyn Write) -> Result<()> {
    let mut kernel: Option<Kernel3D> = None;
    let mut push = |k: Kernel3D| {
        kernel = Some(match kernel.take() {
            Some(prev) => prev.compose(&k),
            None => k,
        })
    };
    if let Some(n) = args.exposure {
        push(exposure_box_kernel(n)?);
    }
    if let Some(sigma) = args.gaussian {
        push(gaussian_spatial_kernel(sigma, [args.size, args.size])?);
    }
    if let Some(s) = args.bicubic {
        push(bicubic_kernel(s)?.kernel);
    }
    let kernel =
        kernel.ok_or_else(|| CliError::Usage("give at least one of --exposure, --gaussian, --bicubic".into()))?;
    write_kernel(&args.output, &kernel)?;
    let [t, h, w] = kernel.extent();
    say(out, format_args!("wrote {t}x{h}x{w} kernel to {}\n", args.output.display()))
}
