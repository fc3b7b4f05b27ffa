use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mwis_core::heuristic::{SelectionAmount, SelectionKind, SelectionStrategy};
use mwis_core::kernel::{exact_reduce, ordering_preset, run_ordering_experiment, ExperimentMode};
use mwis_core::metis::{parse_metis, write_metis};
use mwis_core::oracle::{brute_force, OracleLimits};
use mwis_core::solver::{format_solution, solve_with_progress, verify, verify_text, ResultRecord, SolveEvent, SolverConfig};
use mwis_core::WeightedGraph;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "mwis", version, about = "Maximum weight independent sets via reductions and evolutionary search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full solver and print a result record.
    Solve(SolveArgs),
    /// Apply exact reductions and write the kernel in METIS format.
    Reduce(ReduceArgs),
    /// Check a solution file against an instance.
    Verify { instance: PathBuf, solution: PathBuf },
    /// Solve a small instance exactly by branch and bound.
    Exact {
        instance: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 30)]
        max_vertices: usize,
    },
    /// Compare reduction orderings on one instance.
    OrderingBench {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = BenchMode::PresetSweep)]
        mode: BenchMode,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchMode {
    DisableOne,
    PresetSweep,
}

#[derive(Clone, Copy, ValueEnum)]
enum Selection {
    Weight,
    Degree,
    WeightDegree,
    Hybrid,
    Participation,
}

impl From<Selection> for SelectionKind {
    fn from(s: Selection) -> Self {
        match s {
            Selection::Weight => SelectionKind::Weight,
            Selection::Degree => SelectionKind::Degree,
            Selection::WeightDegree => SelectionKind::WeightOverDegree,
            Selection::Hybrid => SelectionKind::Hybrid,
            Selection::Participation => SelectionKind::Participation,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Seconds.
    #[arg(long, default_value_t = 36000.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 250)]
    population_size: usize,
    #[arg(long, default_value_t = 10)]
    pool_size: usize,
    #[arg(long, default_value_t = 15000)]
    ls_iterations: usize,
    #[arg(long, default_value_t = 64)]
    max_blocks: usize,
    #[arg(long, default_value_t = 0.10)]
    mutation_prob: f64,
    #[arg(long, default_value_t = 1000)]
    unsuccessful_limit: usize,
    #[arg(long, default_value = "baseline")]
    ordering: String,
    #[arg(long, value_enum, default_value_t = Selection::Hybrid)]
    selection: Selection,
    /// Share of the fittest solution forced per round; one vertex if unset.
    #[arg(long)]
    selection_fraction: Option<f64>,
    /// Solution file: sorted 0-indexed vertex ids, one per line.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the result record to this file.
    #[arg(long)]
    result: Option<PathBuf>,
    /// No progress lines on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct ReduceArgs {
    instance: PathBuf,
    #[arg(long, default_value = "baseline")]
    ordering: String,
    /// Kernel file; defaults to `<instance>.kernel`.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// An error together with the process exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

const EXIT_USAGE: u8 = 2;
const EXIT_INSTANCE: u8 = 3;
const EXIT_VERIFY: u8 = 4;

fn usage(error: anyhow::Error) -> Failure {
    Failure { code: EXIT_USAGE, error }
}

fn load(path: &Path) -> Result<WeightedGraph, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_metis(&text).map_err(|e| Failure { code: EXIT_INSTANCE, error: anyhow!("{}: {e}", path.display()) })
}

/// Writes via a sibling temporary file and a rename.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| anyhow!("{} is not a file path", path.display()))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let mut file = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    file.write_all(contents.as_bytes())?;
    file.sync_all()?;
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string(value)?)
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    if !(args.time_limit.is_finite() && args.time_limit >= 0.0) {
        return Err(usage(anyhow!("--time-limit must be a non-negative number of seconds")));
    }
    if matches!(args.selection, Selection::Participation) && args.selection_fraction.is_some() {
        return Err(usage(anyhow!("--selection participation conflicts with --selection-fraction: participation always forces one vertex")));
    }
    let amount = match args.selection_fraction {
        None => SelectionAmount::Single,
        Some(f) => SelectionAmount::Fraction(f),
    };
    let config = SolverConfig {
        time_limit: Duration::from_secs_f64(args.time_limit),
        seed: args.seed,
        population_size: args.population_size,
        pool_size: args.pool_size,
        ls_iterations: args.ls_iterations,
        max_blocks: args.max_blocks,
        mutation_prob: args.mutation_prob,
        unsuccessful_limit: args.unsuccessful_limit,
        strategy: SelectionStrategy { kind: args.selection.into(), amount },
        ..SolverConfig::default()
    }
    .with_ordering(&args.ordering)
    .map_err(|e| usage(e.into()))?;
    config.validate().map_err(|e| usage(e.into()))?;

    let g = load(&args.instance)?;
    let quiet = args.quiet;
    let result = solve_with_progress(&g, &config, &mut |event| {
        if quiet {
            return;
        }
        match event {
            SolveEvent::Round { round, live_vertices, offset } => eprintln!("round {round}: kernel {live_vertices} vertices, offset {offset}"),
            SolveEvent::Improved { weight } => eprintln!("best weight {weight}"),
            SolveEvent::Evolve { .. } => {}
        }
    });

    let report = verify(&g, result.solution.members());
    if !report.is_ok() {
        return Err(Failure { code: EXIT_VERIFY, error: anyhow!("solver produced an invalid solution: {report}") });
    }
    if let Some(path) = &args.output {
        write_atomic(path, &format_solution(&result.solution))?;
    }
    let record = ResultRecord::new(&args.instance.display().to_string(), &g, &config, &result);
    let json = to_json(&record)?;
    if let Some(path) = &args.result {
        write_atomic(path, &format!("{json}\n"))?;
    }
    println!("{json}");
    Ok(())
}

#[derive(Serialize)]
struct ReduceRecord {
    instance: String,
    kernel: String,
    ordering: String,
    offset: u64,
    decided: Vec<usize>,
    events: usize,
    kernel_vertices: usize,
    kernel_edges: usize,
}

fn reduce(args: ReduceArgs) -> Result<(), Failure> {
    let ordering = ordering_preset(&args.ordering).map_err(|e| usage(e.into()))?;
    let g = load(&args.instance)?;
    let kernel = exact_reduce(&g, &ordering);
    let output = args.output.unwrap_or_else(|| {
        let mut p = args.instance.clone().into_os_string();
        p.push(".kernel");
        PathBuf::from(p)
    });
    write_atomic(&output, &write_metis(kernel.graph()))?;
    let record = ReduceRecord {
        instance: args.instance.display().to_string(),
        kernel: output.display().to_string(),
        ordering: ordering.name().to_string(),
        offset: kernel.offset(),
        decided: kernel.decided_in().into_vec(),
        events: kernel.events().len(),
        kernel_vertices: kernel.graph().live_count(),
        kernel_edges: kernel.graph().live_edges(),
    };
    println!("{}", to_json(&record)?);
    Ok(())
}

fn verify_cmd(instance: &Path, solution: &Path) -> Result<(), Failure> {
    let g = load(instance)?;
    let text = fs::read_to_string(solution).with_context(|| format!("reading {}", solution.display()))?;
    let report = verify_text(&g, &text).map_err(|e| Failure { code: EXIT_VERIFY, error: anyhow!("{}: {e}", solution.display()) })?;
    println!("{report}");
    if report.is_ok() {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFY, error: anyhow!("{} is not a valid solution", solution.display()) })
    }
}

#[derive(Serialize)]
struct ExactRecord {
    instance: String,
    weight: u64,
    solution: Vec<usize>,
}

fn exact(instance: &Path, output: Option<&Path>, max_vertices: usize) -> Result<(), Failure> {
    let g = load(instance)?;
    let limits = OracleLimits { max_vertices, ..OracleLimits::default() };
    let (weight, witness) = brute_force(&g, limits).map_err(|e| anyhow!("{e}"))?;
    if let Some(path) = output {
        write_atomic(path, &format_solution(&witness))?;
    }
    println!("{}", to_json(&ExactRecord { instance: instance.display().to_string(), weight, solution: witness.into_vec() })?);
    Ok(())
}

fn ordering_bench(instance: &Path, mode: BenchMode) -> Result<(), Failure> {
    let g = load(instance)?;
    let mode = match mode {
        BenchMode::DisableOne => ExperimentMode::DisableOne,
        BenchMode::PresetSweep => ExperimentMode::PresetSweep,
    };
    println!("ordering\tkernel_vertices\tkernel_edges\toffset\treduction_ratio\tseconds");
    for row in run_ordering_experiment(&g, mode) {
        println!(
            "{}\t{}\t{}\t{}\t{:.4}\t{:.6}",
            row.ordering, row.kernel_vertices, row.kernel_edges, row.offset, row.reduction_ratio, row.elapsed_seconds
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Reduce(args) => reduce(args),
        Command::Verify { instance, solution } => verify_cmd(&instance, &solution),
        Command::Exact { instance, output, max_vertices } => exact(&instance, output.as_deref(), max_vertices),
        Command::OrderingBench { instance, mode } => ordering_bench(&instance, mode),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
