//! `hitrun`: sampling, planning, benchmarking and checks from the command
//! line. Every output file is a pure function of the arguments and seed.

mod config;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hitrun_core::checks::{run_suite, Suite, DEFAULT_TRIALS};
use hitrun_core::dynamics::{kino_plan, KinoConfig, KinoState};
use hitrun_core::experiment::{
    plot_data, run_sweep, write_results_csv, write_summary_csv, write_traces_csv, ExperimentSpec,
    SweepOptions, DEFAULT_CORRIDOR_BUDGET, DEFAULT_CORRIDOR_RUNS, DEFAULT_CORRIDOR_WIDTHS,
    DEFAULT_SPIRAL_BUDGET, DEFAULT_SPIRAL_RUNS, DEFAULT_SPIRAL_WIDTHS,
};
use hitrun_core::geometry::MapFile;
use hitrun_core::planner::{plan, Algorithm};
use hitrun_core::sampler::{hnr_chain, write_trace_csv};
use hitrun_core::{generate_map, Error, GeneratedMap, MapSpec, Point, RngSeed};
use serde::Serialize;

use crate::config::ConfigFile;

#[derive(Parser)]
#[command(
    name = "hitrun",
    version,
    about = "Hit-and-Run sampling and planning on non-convex free spaces"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Base RNG seed [default: 0, or NCW_SEED when set]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory [default: .]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Format of trace and table outputs [default: csv]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// JSON config file with the same keys as the long flags; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Concurrent benchmark runs [default: available parallelism]
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Hit-and-Run chain and write trace.csv
    Sample(SampleArgs),
    /// Solve one planning problem and write report.json and trace.csv
    Plan(PlanArgs),
    /// Run a width sweep and write results.csv, summary.csv, plotdata.json, traces.csv
    Bench(BenchArgs),
    /// Run a batch of checkers and write report.json
    Check(CheckArgs),
    /// Generate a map and write map.json
    Map(MapArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapKind {
    Spiral,
    Corridor,
    /// Single straight corridor leg of length 30
    Hallway,
    /// Unit disk
    Ball,
    /// Unit square
    Box,
    Dumbbell,
    Annulus,
    /// Polygon map file given by --map-file
    File,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Hnr,
    Rrt,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    Spiral,
    Corridor,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Lemmas,
    Density,
    Uniformity,
}

#[derive(Args)]
struct MapSel {
    /// Map generator [default: spiral]
    #[arg(long, value_enum)]
    map: Option<MapKind>,
    /// Arm, corridor or neck width [default: 1.2 spiral, 2 corridor and hallway, 0.05 dumbbell]
    #[arg(long)]
    width: Option<f64>,
    /// Map file for --map file
    #[arg(long)]
    map_file: Option<PathBuf>,
}

#[derive(Args)]
struct KinoArgs {
    /// Integration step [default: 1]
    #[arg(long)]
    dt: Option<f64>,
    /// Speed limit [default: 2]
    #[arg(long)]
    v_max: Option<f64>,
    /// Velocity weight in the state metric [default: 1]
    #[arg(long)]
    lambda: Option<f64>,
    /// Controller sub-steps per proposal [default: 50]
    #[arg(long)]
    k_max: Option<usize>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    map: MapSel,
    /// Chain steps [default: 1000]
    #[arg(long)]
    steps: Option<usize>,
    /// Start point as comma-separated coordinates [default: the map start]
    #[arg(long, value_delimiter = ',')]
    start: Option<Vec<f64>>,
}

#[derive(Args)]
struct PlanArgs {
    /// Planner [default: hnr]
    #[arg(long, value_enum)]
    algo: Option<Algo>,
    #[command(flatten)]
    map: MapSel,
    /// Plan with double-integrator dynamics
    #[arg(long)]
    kino: bool,
    /// Transition budget [default: 100000, or 10000 with --kino]
    #[arg(long)]
    budget: Option<usize>,
    /// Include wall-clock time in the report (makes output run-dependent)
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    kino_args: KinoArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment [default: spiral]
    #[arg(long, value_enum)]
    experiment: Option<Experiment>,
    /// Comma-separated ascending widths [default: 0.8,1,1.2,1.5,2 spiral; 1.5,2,3 corridor]
    #[arg(long, value_delimiter = ',')]
    widths: Option<Vec<f64>>,
    /// Runs per width and algorithm [default: 500 spiral, 100 corridor]
    #[arg(long)]
    runs: Option<usize>,
    /// Transition budget per run [default: 100000 spiral, 10000 corridor]
    #[arg(long)]
    budget: Option<usize>,
    /// Fill the wall_time_ms column (makes output run-dependent)
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    kino_args: KinoArgs,
}

#[derive(Args)]
struct CheckArgs {
    /// Checker batch [default: lemmas]
    #[arg(long, value_enum)]
    suite: Option<SuiteArg>,
    /// Trials per checker [default: 10000]
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct MapArgs {
    /// Generator [default: spiral]
    #[arg(long, value_enum)]
    gen: Option<MapKind>,
    /// Arm, corridor or neck width [default: as for --map]
    #[arg(long)]
    width: Option<f64>,
    /// Map file for --gen file
    #[arg(long)]
    map_file: Option<PathBuf>,
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, Error> {
    T::from_str(value, false)
        .map_err(|_| Error::usage(format!("invalid value '{value}' for '{key}' in config")))
}

/// Resolves `flag`, then config key, then default.
fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

fn pick_enum<T: ValueEnum>(
    flag: Option<T>,
    config: &Option<String>,
    key: &str,
    default: T,
) -> Result<T, Error> {
    let from_config = config.as_deref().map(|s| parse_enum(key, s)).transpose()?;
    Ok(pick(flag, from_config, default))
}

struct Ctx {
    seed: RngSeed,
    out: PathBuf,
    format: Format,
    jobs: Option<usize>,
    cfg: ConfigFile,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>, Error> {
        Ok(BufWriter::new(File::create(self.path(name))?))
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, Error> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        let path = self.path(name);
        std::fs::write(&path, text)?;
        Ok(path)
    }

    fn map_spec(
        &self,
        kind: Option<MapKind>,
        width: Option<f64>,
        file: Option<PathBuf>,
    ) -> Result<MapSpec, Error> {
        let kind = pick_enum(kind, &self.cfg.map, "map", MapKind::Spiral)?;
        let width = width.or(self.cfg.width);
        let file = file.or_else(|| self.cfg.map_file.clone());
        map_spec(kind, width, file)
    }

    fn kino_config(&self, a: &KinoArgs) -> Result<KinoConfig, Error> {
        let d = KinoConfig::default();
        let cfg = KinoConfig {
            dt: pick(a.dt, self.cfg.dt, d.dt),
            v_max: pick(a.v_max, self.cfg.v_max, d.v_max),
            lambda: pick(a.lambda, self.cfg.lambda, d.lambda),
            k_max: pick(a.k_max, self.cfg.k_max, d.k_max),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn map_spec(kind: MapKind, width: Option<f64>, file: Option<PathBuf>) -> Result<MapSpec, Error> {
    Ok(match kind {
        MapKind::Spiral => MapSpec::spiral(width.unwrap_or(1.2)),
        MapKind::Corridor => MapSpec::corridor(width.unwrap_or(2.0)),
        MapKind::Hallway => MapSpec::Corridor {
            width: width.unwrap_or(2.0),
            legs: vec![30.0],
        },
        MapKind::Ball => MapSpec::Ball {
            radius: 1.0,
            dimension: 2,
        },
        MapKind::Box => MapSpec::Box {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 1.0],
        },
        MapKind::Dumbbell => MapSpec::Dumbbell {
            neck_width: width.unwrap_or(0.05),
            neck_length: 0.5,
        },
        MapKind::Annulus => MapSpec::Annulus {
            inner: 0.5,
            outer: 1.0,
        },
        MapKind::File => MapSpec::PolygonFile {
            path: file.ok_or_else(|| Error::usage("--map file needs --map-file"))?,
        },
    })
}

fn load_map(spec: &MapSpec) -> Result<GeneratedMap, Error> {
    generate_map(spec)
}

#[derive(Serialize)]
struct PlanReport<'a> {
    algorithm: Algorithm,
    map: &'a MapSpec,
    seed: RngSeed,
    kino: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    kino_config: Option<KinoConfig>,
    budget: usize,
    success: bool,
    transitions: usize,
    nodes: usize,
    path_length: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<f64>,
}

#[derive(Serialize)]
struct TraceJson<'a> {
    seed: RngSeed,
    map: &'a MapSpec,
    states: &'a [Point],
}

fn cmd_sample(ctx: &Ctx, a: &SampleArgs) -> Result<(), Error> {
    let spec = ctx.map_spec(a.map.map, a.map.width, a.map.map_file.clone())?;
    let map = load_map(&spec)?;
    let steps = pick(a.steps, ctx.cfg.steps, 1000);
    let start = match a.start.clone().or_else(|| ctx.cfg.start.clone()) {
        Some(c) => Point::new(c),
        None => map.start.clone(),
    };
    let trace = hnr_chain(&map.space, &start, steps, ctx.seed)?;
    let path = match ctx.format {
        Format::Csv => {
            trace.write_csv(ctx.create("trace.csv")?)?;
            ctx.path("trace.csv")
        }
        Format::Json => ctx.write_json(
            "trace.json",
            &TraceJson {
                seed: ctx.seed,
                map: &spec,
                states: &trace.states,
            },
        )?,
    };
    println!("{} steps on {} -> {}", steps, spec.name(), path.display());
    Ok(())
}

fn cmd_plan(ctx: &Ctx, a: &PlanArgs) -> Result<(), Error> {
    let spec = ctx.map_spec(a.map.map, a.map.width, a.map.map_file.clone())?;
    let map = load_map(&spec)?;
    let algorithm = match pick_enum(a.algo, &ctx.cfg.algo, "algo", Algo::Hnr)? {
        Algo::Hnr => Algorithm::Hnr,
        Algo::Rrt => Algorithm::Rrt,
    };
    let kino = a.kino || ctx.cfg.kino.unwrap_or(false);
    let timing = a.timing || ctx.cfg.timing.unwrap_or(false);
    let default_budget = if kino {
        DEFAULT_CORRIDOR_BUDGET
    } else {
        DEFAULT_SPIRAL_BUDGET
    };
    let budget = pick(a.budget, ctx.cfg.budget, default_budget);
    let (result, kino_config) = if kino {
        let cfg = ctx.kino_config(&a.kino_args)?;
        let start = KinoState::at_rest(map.start.clone());
        let r = kino_plan(
            algorithm, &map.space, &start, &map.goal, &cfg, budget, ctx.seed,
        )?;
        match ctx.format {
            Format::Csv => r.write_trace_csv(ctx.create("trace.csv")?)?,
            Format::Json => {
                let states: Vec<Point> = r
                    .trajectory
                    .iter()
                    .map(|s| s.state.position.clone())
                    .collect();
                ctx.write_json(
                    "trace.json",
                    &TraceJson {
                        seed: ctx.seed,
                        map: &spec,
                        states: &states,
                    },
                )?;
            }
        }
        (r.result, Some(cfg))
    } else {
        let r = plan(
            algorithm, &map.space, &map.start, &map.goal, budget, ctx.seed,
        )?;
        match ctx.format {
            Format::Csv => write_trace_csv(&r.path, ctx.create("trace.csv")?)?,
            Format::Json => {
                ctx.write_json(
                    "trace.json",
                    &TraceJson {
                        seed: ctx.seed,
                        map: &spec,
                        states: &r.path,
                    },
                )?;
            }
        }
        (r, None)
    };
    let report = PlanReport {
        algorithm,
        map: &spec,
        seed: ctx.seed,
        kino,
        kino_config,
        budget,
        success: result.success,
        transitions: result.transitions,
        nodes: result.nodes,
        path_length: result.path_length(),
        wall_time_ms: timing.then_some(result.wall_time.as_secs_f64() * 1e3),
    };
    let path = ctx.write_json("report.json", &report)?;
    println!(
        "{} on {}: success={} transitions={} -> {}",
        algorithm,
        spec.name(),
        result.success,
        result.transitions,
        path.display()
    );
    Ok(())
}

fn cmd_bench(ctx: &Ctx, a: &BenchArgs) -> Result<(), Error> {
    let experiment = pick_enum(
        a.experiment,
        &ctx.cfg.experiment,
        "experiment",
        Experiment::Spiral,
    )?;
    let widths = a.widths.clone().or_else(|| ctx.cfg.widths.clone());
    let mut spec = match experiment {
        Experiment::Spiral => ExperimentSpec::spiral(
            widths.unwrap_or_else(|| DEFAULT_SPIRAL_WIDTHS.to_vec()),
            pick(a.runs, ctx.cfg.runs, DEFAULT_SPIRAL_RUNS),
            ctx.seed,
        ),
        Experiment::Corridor => {
            let mut s = ExperimentSpec::corridor(
                widths.unwrap_or_else(|| DEFAULT_CORRIDOR_WIDTHS.to_vec()),
                pick(a.runs, ctx.cfg.runs, DEFAULT_CORRIDOR_RUNS),
                ctx.seed,
            );
            s.kino_config = ctx.kino_config(&a.kino_args)?;
            s
        }
    };
    if let Some(b) = a.budget.or(ctx.cfg.budget) {
        spec.budget = b;
    }
    let opts = SweepOptions {
        jobs: ctx.jobs,
        timing: a.timing || ctx.cfg.timing.unwrap_or(false),
    };
    let out = run_sweep(&spec, opts)?;
    match ctx.format {
        Format::Csv => {
            write_results_csv(&out.records, ctx.create("results.csv")?)?;
            write_summary_csv(&out.summary, ctx.create("summary.csv")?)?;
        }
        Format::Json => {
            ctx.write_json("results.json", &out.records)?;
            ctx.write_json("summary.json", &out.summary)?;
        }
    }
    ctx.write_json("plotdata.json", &plot_data(&out.summary)?)?;
    write_traces_csv(&out.traces, ctx.create("traces.csv")?)?;
    for row in &out.summary {
        println!(
            "{:>4} width={:<5} runs={} success={:.3} mean={:.1} median={:.1}",
            row.algorithm,
            row.width,
            row.runs,
            row.success_rate,
            row.mean_transitions,
            row.median_transitions
        );
    }
    Ok(())
}

fn cmd_check(ctx: &Ctx, a: &CheckArgs) -> Result<(), Error> {
    let suite = match pick_enum(a.suite, &ctx.cfg.suite, "suite", SuiteArg::Lemmas)? {
        SuiteArg::Lemmas => Suite::Lemmas,
        SuiteArg::Density => Suite::Density,
        SuiteArg::Uniformity => Suite::Uniformity,
    };
    let trials = pick(a.trials, ctx.cfg.trials, DEFAULT_TRIALS);
    let reports = run_suite(suite, trials, ctx.seed)?;
    ctx.write_json("report.json", &reports)?;
    let mut failed = 0;
    for r in &reports {
        let status = if r.passed() { "ok" } else { "FAIL" };
        println!(
            "{status:>4} {} trials={} violations={}",
            r.checker, r.trials, r.violations
        );
        failed += usize::from(!r.passed());
    }
    if failed > 0 {
        return Err(Error::domain(format!(
            "{failed} checker(s) reported violations"
        )));
    }
    Ok(())
}

fn cmd_map(ctx: &Ctx, a: &MapArgs) -> Result<(), Error> {
    let kind = pick_enum(a.gen, &ctx.cfg.gen, "gen", MapKind::Spiral)?;
    let spec = map_spec(
        kind,
        a.width.or(ctx.cfg.width),
        a.map_file.clone().or_else(|| ctx.cfg.map_file.clone()),
    )?;
    let map = load_map(&spec)?;
    let file = MapFile::from_map(&map)?;
    let path = ctx.path("map.json");
    std::fs::write(&path, file.to_json()?)?;
    println!("{} map -> {}", spec.name(), path.display());
    Ok(())
}

fn env_seed() -> Result<Option<u64>, Error> {
    match std::env::var("NCW_SEED") {
        Ok(s) => {
            s.trim().parse().map(Some).map_err(|_| {
                Error::usage(format!("NCW_SEED must be an unsigned integer, got '{s}'"))
            })
        }
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = match &cli.global.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let seed = cli.global.seed.or(cfg.seed).or(env_seed()?).unwrap_or(0);
    let format = pick_enum(cli.global.format, &cfg.format, "format", Format::Csv)?;
    let out = pick(cli.global.out.clone(), cfg.out.clone(), PathBuf::from("."));
    let jobs = cli.global.jobs.or(cfg.jobs);
    if jobs == Some(0) {
        return Err(Error::usage("--jobs must be at least 1"));
    }
    ensure_dir(&out)?;
    let ctx = Ctx {
        seed: RngSeed(seed),
        out,
        format,
        jobs,
        cfg,
    };
    match &cli.command {
        Command::Sample(a) => cmd_sample(&ctx, a),
        Command::Plan(a) => cmd_plan(&ctx, a),
        Command::Bench(a) => cmd_bench(&ctx, a),
        Command::Check(a) => cmd_check(&ctx, a),
        Command::Map(a) => cmd_map(&ctx, a),
    }
}

fn ensure_dir(p: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(p)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
