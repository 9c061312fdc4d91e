//! Command-line surface for the survey-planning pipeline: generate
//! benchmark instances, plan single trips, run scored benchmark trips,
//! compare planners over an instance batch, and dump heatmaps.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on runtime errors.
//! Diagnostics go to stderr; data goes to `--out` files (written
//! atomically via a temp file and rename) or to stdout.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use seaprobe::benchmarks;
use seaprobe::gp;
use seaprobe::harness::{self, HeatmapSource, PlannerKind, RunConfig};
use seaprobe::planner::{self, PlannerConfig, Task};
use seaprobe::{Instance64, KernelParams64};

#[derive(Parser)]
#[command(
    name = "seaprobe",
    version,
    about = "Plan probing trips over a surface and benchmark the planners"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate benchmark instance files from the shipped g1..g10 surfaces.
    Generate(GenerateArgs),
    /// Plan a single trip on an instance and dump the tour.
    Plan(PlanArgs),
    /// Run one scored benchmark trip (requires ground truth).
    Run(PlanArgs),
    /// Run both planners over a batch of instances and tally wins.
    Compare(CompareArgs),
    /// Render a truth/mean/std/abs_error field as x,y,value rows.
    Heatmap(HeatmapArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Assessment grid resolution along x (grid has grid_k + 1 columns).
    #[arg(long, default_value_t = 20)]
    grid_k: usize,
    /// Assessment grid resolution along y (grid has grid_l + 1 rows).
    #[arg(long, default_value_t = 20)]
    grid_l: usize,
    /// Kernel amplitude; default: sample standard deviation of the data.
    #[arg(long, conflicts_with = "tune")]
    amplitude: Option<f64>,
    /// Kernel length scale; default 0.2.
    #[arg(long, conflicts_with = "tune")]
    length_scale: Option<f64>,
    /// Observation noise standard deviation; default 0.
    #[arg(long, conflicts_with = "tune")]
    noise: Option<f64>,
    /// Numerical jitter added to the Gram diagonal; default 1e-8.
    #[arg(long, conflicts_with = "tune")]
    jitter: Option<f64>,
    /// Pick kernel hyperparameters by likelihood grid search instead.
    #[arg(long)]
    tune: bool,
}

impl ModelArgs {
    fn run_config(&self, samples: &[seaprobe::Sample64]) -> RunConfig<f64> {
        let kernel = if self.amplitude.is_some()
            || self.length_scale.is_some()
            || self.noise.is_some()
            || self.jitter.is_some()
        {
            let base = KernelParams64::for_samples(samples);
            Some(KernelParams64 {
                amplitude: self.amplitude.unwrap_or(base.amplitude),
                length_scale: self.length_scale.unwrap_or(base.length_scale),
                noise: self.noise.unwrap_or(base.noise),
                jitter: self.jitter.unwrap_or(base.jitter),
            })
        } else {
            None
        };
        RunConfig {
            planner: PlannerConfig {
                grid_k: self.grid_k,
                grid_l: self.grid_l,
                kernel,
                ..PlannerConfig::default()
            },
            tune: self.tune,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Which shipped surface to use, g1..g10.
    #[arg(long, value_parser = parse_truth_name)]
    truth: Option<usize>,
    /// Place side*side initial samples on the interior grid.
    #[arg(long, value_name = "SIDE", conflicts_with = "random")]
    grid: Option<usize>,
    /// Place this many initial samples at seeded random positions.
    #[arg(long, value_name = "COUNT")]
    random: Option<usize>,
    /// Seed for --random.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Trip duration budget.
    #[arg(long, default_value_t = 100.0)]
    budget: f64,
    /// Time spent per probe.
    #[arg(long, default_value_t = 1.0)]
    probe_time: f64,
    /// Travel speed.
    #[arg(long, default_value_t = 1.0)]
    speed: f64,
    /// Evaluation mesh step.
    #[arg(long, default_value_t = 0.01)]
    mesh_step: f64,
    /// Write the full 60-file benchmark tree under this directory instead.
    #[arg(long, value_name = "DIR", conflicts_with_all = ["truth", "grid", "random", "seed", "out"])]
    suite: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    /// Instance file to load.
    #[arg(long)]
    instance: PathBuf,
    /// Which planner to use.
    #[arg(long, value_enum, default_value_t = PlannerChoice::Orienteering)]
    planner: PlannerChoice,
    #[command(flatten)]
    model: ModelArgs,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Instance files to compare on.
    #[arg(long, num_args = 1.., required = true)]
    instances: Vec<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    /// Number of instances to run concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HeatmapArgs {
    /// Instance file to load.
    #[arg(long)]
    instance: PathBuf,
    /// Which field to render.
    #[arg(long, value_enum)]
    field: FieldChoice,
    /// Mesh step of the rendering; defaults to the instance's mesh_step.
    #[arg(long)]
    mesh_step: Option<f64>,
    #[command(flatten)]
    model: ModelArgs,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlannerChoice {
    Orienteering,
    Grid,
}

impl From<PlannerChoice> for PlannerKind {
    fn from(c: PlannerChoice) -> Self {
        match c {
            PlannerChoice::Orienteering => PlannerKind::Orienteering,
            PlannerChoice::Grid => PlannerKind::GridBaseline,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldChoice {
    Truth,
    Mean,
    Std,
    #[value(name = "abs_error", alias = "abs-error")]
    AbsError,
}

fn parse_truth_name(s: &str) -> Result<usize, String> {
    let index: Option<usize> = s.strip_prefix('g').and_then(|rest| rest.parse().ok());
    match index {
        Some(i) if (1..=benchmarks::SUITE_SIZE).contains(&i) => Ok(i),
        _ => Err(format!(
            "unknown surface `{s}`; expected g1..g{}",
            benchmarks::SUITE_SIZE
        )),
    }
}

/// Failures past argument parsing: usage problems exit 1, runtime problems
/// exit 2.
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

fn runtime(message: impl Into<String>) -> CliError {
    CliError::Runtime(message.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Plan(args) => plan(args),
        Command::Run(args) => run(args),
        Command::Compare(args) => compare(args),
        Command::Heatmap(args) => heatmap(args),
    }
}

/// Writes through a temp file + rename so interrupted runs never leave a
/// truncated output behind.
fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, content)
        .map_err(|e| runtime(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| runtime(format!("cannot move {} into place: {e}", path.display())))
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, content),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| runtime(format!("cannot write to stdout: {e}"))),
    }
}

fn load_instance(path: &Path) -> Result<Instance64, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| runtime(format!("cannot read {}: {e}", path.display())))?;
    Instance64::parse(&text).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    if let Some(dir) = &args.suite {
        return generate_suite(dir);
    }
    let index = args
        .truth
        .ok_or_else(|| CliError::Usage("generate needs --truth (or --suite)".into()))?;
    let truth = benchmarks::mixture::<f64>(index).expect("validated by the parser");
    let config = seaprobe::InstanceConfig {
        budget: args.budget,
        probe_time: args.probe_time,
        speed: args.speed,
        mesh_step: args.mesh_step,
        ..seaprobe::InstanceConfig::default()
    };
    let inst = match (args.grid, args.random) {
        (Some(side), None) => seaprobe::instance::generate_grid_instance(&truth, side, &config),
        (None, Some(count)) => {
            seaprobe::instance::generate_random_instance(&truth, count, args.seed, &config)
        }
        _ => {
            return Err(CliError::Usage(
                "generate needs exactly one of --grid SIDE or --random COUNT".into(),
            ))
        }
    }
    .map_err(|e| runtime(e.to_string()))?;
    emit(args.out.as_deref(), &inst.serialize())
}

fn generate_suite(dir: &Path) -> Result<(), CliError> {
    let mut written = 0usize;
    for (variant, layout) in benchmarks::SUITE_VARIANTS {
        let subdir = dir.join(variant);
        fs::create_dir_all(&subdir)
            .map_err(|e| runtime(format!("cannot create {}: {e}", subdir.display())))?;
        for index in 1..=benchmarks::SUITE_SIZE {
            let inst = benchmarks::suite_instance::<f64>(index, layout)
                .map_err(|e| runtime(e.to_string()))?;
            let path = subdir.join(benchmarks::suite_file_name(index, variant));
            write_atomic(&path, &inst.serialize())?;
            written += 1;
        }
    }
    eprintln!("wrote {written} instance files under {}", dir.display());
    Ok(())
}

fn plan(args: PlanArgs) -> Result<(), CliError> {
    let inst = load_instance(&args.instance)?;
    if inst.samples.is_empty() {
        return Err(runtime("planning requires at least one initial sample"));
    }
    let config = args.model.run_config(&inst.samples);
    let kernel = resolve_kernel(&inst, &config)?;
    let planner_config = PlannerConfig {
        kernel: Some(kernel),
        ..config.planner
    };
    let task = Task::from_instance(&inst);
    let tour = match args.planner.into() {
        PlannerKind::Orienteering => planner::plan_orienteering(&task, &planner_config),
        PlannerKind::GridBaseline => planner::plan_grid_baseline(&task, &planner_config),
    }
    .map_err(|e| runtime(e.to_string()))?;
    emit(args.out.as_deref(), &harness::render_tour_csv(&tour))
}

fn resolve_kernel(inst: &Instance64, config: &RunConfig<f64>) -> Result<KernelParams64, CliError> {
    if config.tune {
        gp::tune_params(&inst.samples, &gp::default_candidate_grid(&inst.samples))
            .map_err(|e| runtime(e.to_string()))
    } else {
        Ok(config
            .planner
            .kernel
            .unwrap_or_else(|| KernelParams64::for_samples(&inst.samples)))
    }
}

fn run(args: PlanArgs) -> Result<(), CliError> {
    let inst = load_instance(&args.instance)?;
    let config = args.model.run_config(&inst.samples);
    let kind: PlannerKind = args.planner.into();
    let result = harness::run_main(&inst, kind, &config).map_err(|e| runtime(e.to_string()))?;
    emit(args.out.as_deref(), &harness::render_run_csv(kind, &result))
}

fn compare(args: CompareArgs) -> Result<(), CliError> {
    let mut named = Vec::with_capacity(args.instances.len());
    for path in &args.instances {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        named.push((name, load_instance(path)?));
    }
    let config = match named.first() {
        Some((_, first)) => args.model.run_config(&first.samples),
        None => args.model.run_config(&[]),
    };
    let table = harness::compare(&named, &config, args.jobs);
    emit(args.out.as_deref(), &harness::render_comparison_csv(&table))
}

fn heatmap(args: HeatmapArgs) -> Result<(), CliError> {
    let inst = load_instance(&args.instance)?;
    let step = args.mesh_step.unwrap_or(inst.mesh_step);
    let config = args.model.run_config(&inst.samples);

    let needs_model = !matches!(args.field, FieldChoice::Truth);
    let model = if needs_model {
        let kernel = resolve_kernel(&inst, &config)?;
        Some(gp::fit(&inst.samples, &kernel).map_err(|e| runtime(e.to_string()))?)
    } else {
        None
    };
    let needs_truth = matches!(args.field, FieldChoice::Truth | FieldChoice::AbsError);
    let truth = inst.truth.as_ref();
    if needs_truth && truth.is_none() {
        return Err(runtime("this field requires an instance with ground truth"));
    }

    let source = match args.field {
        FieldChoice::Truth => HeatmapSource::Truth(truth.unwrap()),
        FieldChoice::Mean => HeatmapSource::Mean(model.as_ref().unwrap()),
        FieldChoice::Std => HeatmapSource::Std(model.as_ref().unwrap()),
        FieldChoice::AbsError => HeatmapSource::AbsError(model.as_ref().unwrap(), truth.unwrap()),
    };
    let text =
        harness::emit_heatmap(source, &inst.surface, step).map_err(|e| runtime(e.to_string()))?;
    emit(args.out.as_deref(), &text)
}
