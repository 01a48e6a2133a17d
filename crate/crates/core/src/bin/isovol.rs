//! Command-line front end.
//!
//! Exit codes: 0 similar, 1 not similar, 2 usage or input error, 3 runtime
//! failure (refusal, sampling failure, internal inconsistency).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use isovol::coherent::{self, ReductionReading};
use isovol::commutant;
use isovol::decider::{self, DecideConfig, Filters, Mode};
use isovol::graph_io::{parse_graph, GraphFormat};
use isovol::volume::{self, ConvexBody, ProfileConfig};
use isovol::{AdjacencyMatrix, Error};

#[derive(Parser)]
#[command(
    name = "isovol",
    version,
    about = "Permutational similarity of graphs and nonnegative integer matrices"
)]
struct Cli {
    /// Worker threads for sampling (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Suppress the summary on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether B = P A P^T for a permutation P.
    Decide(DecideArgs),
    /// Coherent closure of one input: canonical basis and structure tensor.
    Refine(RefineArgs),
    /// Multiphase volume profile of one body.
    Volume(VolumeArgs),
    /// Brute-force similarity search (small n only).
    Oracle(OracleArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Input format: graph6, dimacs, edgelist, dense (default: from extension).
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SamplingArgs {
    /// Relative error.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Master seed; drawn and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Schedule granularity exponent c in N = n^c * delta.
    #[arg(long = "schedule-N", default_value_t = 0.0)]
    schedule_n: f64,
    /// Samples per phase, overriding the default count.
    #[arg(long)]
    samples: Option<usize>,
    /// Sample only the first this-many phases.
    #[arg(long)]
    max_phases: Option<usize>,
}

#[derive(Args)]
struct DecideArgs {
    a: PathBuf,
    b: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Failure probability.
    #[arg(long, default_value_t = 0.05)]
    eta: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// Diagonal completion used by the reduction.
    #[arg(long, value_enum, default_value_t = ReadingArg::Weighted)]
    reading: ReadingArg,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RefineArgs {
    input_path: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// Omit the structure tensor.
    #[arg(long)]
    no_tensor: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VolumeArgs {
    /// First matrix (not needed for --body ball).
    a: Option<PathBuf>,
    /// Second matrix (defaults to the first).
    b: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BodyArg::Aa)]
    body: BodyArg,
    /// Dimension of the ball body.
    #[arg(long)]
    dim: Option<usize>,
    /// Order n setting the radii of the ball body.
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OracleArgs {
    a: PathBuf,
    b: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// Largest n to search.
    #[arg(long, default_value_t = decider::BRUTE_FORCE_MAX_N)]
    cap: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Exact,
    Randomized,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReadingArg {
    Weighted,
    Original,
}

#[derive(Clone, Copy, ValueEnum)]
enum BodyArg {
    Aa,
    Ab,
    Bb,
    Ball,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::Shape(_)
            | Error::Io(_)
            | Error::Unsupported(_)
            | Error::Precondition(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Decide(args) => cmd_decide(args, cli.quiet),
        Command::Refine(args) => cmd_refine(args, cli.quiet),
        Command::Volume(args) => cmd_volume(args, cli.quiet),
        Command::Oracle(args) => cmd_oracle(args, cli.quiet),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn read_graph(path: &Path, input: &InputArgs) -> Result<AdjacencyMatrix, Failure> {
    let format = match &input.format {
        Some(f) => f.parse::<GraphFormat>()?,
        None => path
            .extension()
            .and_then(|e| e.to_str())
            .and_then(GraphFormat::from_extension)
            .ok_or_else(|| {
                Failure::Usage(format!(
                    "{}: cannot infer format, pass --format",
                    path.display()
                ))
            })?,
    };
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_graph(&text, format).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn resolve_seed(seed: Option<u64>, quiet: bool) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        if !quiet {
            eprintln!("seed: {s}");
        }
        s
    })
}

fn emit(text: &str, output: &OutputArgs) -> Result<(), Failure> {
    match &output.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            match out
                .write_all(text.as_bytes())
                .and_then(|_| out.write_all(b"\n"))
            {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(Failure::Runtime(e.to_string()))
                }
                _ => Ok(()),
            }
        }
    }
}

fn emit_json<T: Serialize>(value: &T, output: &OutputArgs) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))?;
    emit(&text, output)
}

fn cmd_decide(args: &DecideArgs, quiet: bool) -> Outcome {
    let a = read_graph(&args.a, &args.input)?;
    let b = read_graph(&args.b, &args.input)?;
    let seed = resolve_seed(args.sampling.seed, quiet);
    let mut cfg = DecideConfig::new(args.sampling.eps, args.eta, seed);
    cfg.mode = match args.mode {
        ModeArg::Auto => Mode::Auto,
        ModeArg::Exact => Mode::Exact,
        ModeArg::Randomized => Mode::Randomized,
    };
    cfg.reading = match args.reading {
        ReadingArg::Weighted => ReductionReading::WeightedClasses,
        ReadingArg::Original => ReductionReading::OriginalPlusDiagonal,
    };
    cfg.granularity_exponent = args.sampling.schedule_n;
    cfg.samples_override = args.sampling.samples;
    cfg.max_phases = args.sampling.max_phases;
    cfg.record_timing = args.timing;
    let verdict = decider::decide(&a, &b, &cfg)?;
    emit(&verdict.to_json()?, &args.output)?;
    if !quiet {
        let phase = verdict
            .phase
            .map(|j| format!(" phase {j}"))
            .unwrap_or_default();
        eprintln!(
            "{:?} at stage {:?}{phase}: {}",
            verdict.outcome, verdict.stage, verdict.detail
        );
    }
    Ok(verdict.outcome.is_similar())
}

#[derive(Serialize)]
struct RefineReport {
    n: usize,
    dimension: usize,
    rounds: usize,
    basis: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    tensor: Option<String>,
}

fn cmd_refine(args: &RefineArgs, quiet: bool) -> Outcome {
    let a = read_graph(&args.input_path, &args.input)?;
    let basis = coherent::coherent_closure_of(&a)?;
    let tensor = if args.no_tensor {
        None
    } else {
        Some(coherent::structure_tensor(&basis)?.dump())
    };
    let report = RefineReport {
        n: basis.n(),
        dimension: basis.dim(),
        rounds: basis.rounds(),
        basis: basis.dump(),
        tensor,
    };
    emit_json(&report, &args.output)?;
    if !quiet {
        eprintln!(
            "coherent closure: n = {}, d = {}, {} rounds",
            report.n, report.dimension, report.rounds
        );
    }
    Ok(true)
}

fn cmd_volume(args: &VolumeArgs, quiet: bool) -> Outcome {
    let seed = resolve_seed(args.sampling.seed, quiet);
    let (body, n, delta) = match args.body {
        BodyArg::Ball => {
            let dim = args
                .dim
                .ok_or_else(|| Failure::Usage("--body ball needs --dim".into()))?;
            let n = args
                .n
                .ok_or_else(|| Failure::Usage("--body ball needs --n".into()))?;
            (ConvexBody::ball(dim, 1.0)?, n, dim)
        }
        body => {
            let a_path = args
                .a
                .as_ref()
                .ok_or_else(|| Failure::Usage("missing input matrix".into()))?;
            let a = read_graph(a_path, &args.input)?;
            let b = match &args.b {
                Some(p) => read_graph(p, &args.input)?,
                None => a.clone(),
            };
            let pair = match decider::exact_filters(&a, &b, ReductionReading::WeightedClasses)? {
                Filters::Passed { pair, .. } => pair,
                Filters::Refuted { stage, detail } => {
                    return Err(Failure::Runtime(format!(
                        "inputs refuted at stage {stage:?}: {detail}"
                    )));
                }
            };
            let (s, t) = match body {
                BodyArg::Aa => (&pair.a1, &pair.a1),
                BodyArg::Ab => (&pair.a1, &pair.b1),
                _ => (&pair.b1, &pair.b1),
            };
            let basis = commutant::commutant_basis(s, t)?;
            let delta = basis.delta();
            (ConvexBody::from_commutant(&basis, 1.0)?, a.n(), delta)
        }
    };
    let granularity = ((n as f64).powf(args.sampling.schedule_n) * delta as f64)
        .round()
        .max(1.0) as usize;
    let schedule = volume::radius_schedule(n, granularity)?;
    let body = body.with_radius(*schedule.radii.last().expect("nonempty schedule"));
    let mut cfg = ProfileConfig::new(args.sampling.eps);
    cfg.samples_override = args.sampling.samples;
    cfg.max_phases = args.sampling.max_phases;
    let profile = volume::volume_profile(&body, &schedule, &cfg, seed)?;
    emit(&profile.to_json()?, &args.output)?;
    if !quiet {
        let last = profile.log_volumes.last().copied().unwrap_or(f64::NAN);
        eprintln!(
            "dimension {delta}, {} phases, log volume {last:.6}",
            profile.phases.len()
        );
        if matches!(args.body, BodyArg::Ball) && profile.phases.len() == schedule.phases() {
            eprintln!(
                "closed form log volume {:.6}",
                volume::log_ball_volume(delta, body.ball_radius())
            );
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct OracleReport {
    similar: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<usize>>,
}

fn cmd_oracle(args: &OracleArgs, quiet: bool) -> Outcome {
    let a = read_graph(&args.a, &args.input)?;
    let b = read_graph(&args.b, &args.input)?;
    let witness = decider::brute_force_similar_capped(&a, &b, args.cap)?;
    let report = OracleReport {
        similar: witness.is_some(),
        witness,
    };
    emit_json(&report, &args.output)?;
    if !quiet {
        eprintln!(
            "{}",
            if report.similar {
                "similar"
            } else {
                "not similar"
            }
        );
    }
    Ok(report.similar)
}
