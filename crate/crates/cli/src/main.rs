use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use lubysat::generators::bundled_corpus;
use lubysat::harness::{self, BenchConfig, DEFAULT_BASELINE};
use lubysat::restarts::{parse_policy_list, LUBY_SWEEP};
use lubysat::{
    parse_dimacs, walk_solve, write_dimacs, Budget, PolarityMode, RestartPolicy, Solver, SolverConfig,
};

#[derive(Parser)]
#[command(
    name = "lubysat",
    version,
    about = "CDCL SAT solver and restart-strategy benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one DIMACS CNF file.
    Solve(SolveArgs),
    /// Run a configuration sweep over a directory of instances.
    Bench(BenchArgs),
    /// Print the first N restart limits of the Luby sequence.
    Luby(LubyArgs),
    /// Run the UnitWalk-style local search on one file.
    Unitwalk(UnitwalkArgs),
    /// Write the bundled benchmark corpus into a directory.
    GenCorpus(GenCorpusArgs),
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    /// fixed:<n> | geometric:<first>,<factor> | luby:<u> | inout:<base>,<factor>
    #[arg(long, default_value = "luby:6")]
    restart: RestartPolicy,
    /// negative | saving | activity
    #[arg(long, default_value = "saving")]
    polarity: PolarityMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Conflict limit.
    #[arg(long)]
    conflicts: Option<u64>,
}

#[derive(Args)]
struct BenchArgs {
    dir: PathBuf,
    /// Comma-separated restart policies; "luby-sweep" expands to the twelve
    /// unit runs 1..512.
    #[arg(long, default_value = "luby-sweep")]
    restarts: String,
    #[arg(long, default_value = "saving")]
    polarity: PolarityMode,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    seeds: Vec<u64>,
    /// Per-run wall-clock limit in seconds.
    #[arg(long, default_value_t = 5.0)]
    timeout: f64,
    /// Per-run conflict limit.
    #[arg(long)]
    conflicts: Option<u64>,
    /// Conflict table (CSV).
    #[arg(long, default_value = "table.csv")]
    out: PathBuf,
    /// Solved-count histogram (CSV).
    #[arg(long, default_value = "hist.csv")]
    hist: PathBuf,
    /// Optional per-run records (CSV).
    #[arg(long)]
    records: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BASELINE)]
    baseline: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct LubyArgs {
    /// Number of limits to print.
    #[arg(long = "print", value_name = "N")]
    count: u64,
    /// Unit run.
    #[arg(long, default_value_t = 1)]
    unit: u64,
}

#[derive(Args)]
struct UnitwalkArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    periods: u64,
}

#[derive(Args)]
struct GenCorpusArgs {
    dir: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Solve(args) => solve(args),
        Command::Bench(args) => bench(args),
        Command::Luby(args) => {
            let mut state = RestartPolicy::luby(args.unit.max(1)).start();
            let mut out = String::new();
            for _ in 0..args.count {
                out.push_str(&state.next_limit().to_string());
                out.push('\n');
            }
            print!("{out}");
            Ok(0)
        }
        Command::Unitwalk(args) => {
            let formula = read_formula(&args.file)?;
            let outcome = walk_solve(&formula, args.seed, args.periods.max(1));
            println!("c periods {}", outcome.stats.periods);
            print!("{}", outcome.competition_output());
            Ok(outcome.status.exit_code() as u8)
        }
        Command::GenCorpus(args) => {
            fs::create_dir_all(&args.dir).with_context(|| format!("creating {}", args.dir.display()))?;
            for (name, formula) in bundled_corpus() {
                let path = args.dir.join(&name);
                fs::write(&path, write_dimacs(&formula))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(0)
        }
    }
}

fn read_formula(path: &Path) -> Result<lubysat::Formula> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = parse_dimacs(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    for w in &parsed.warnings {
        warn!("{}: {w}", path.display());
    }
    Ok(parsed.formula)
}

fn seconds(s: f64) -> Result<Duration> {
    if !(s.is_finite() && s > 0.0) {
        bail!("timeout must be a positive number of seconds");
    }
    Ok(Duration::from_secs_f64(s))
}

fn solve(args: SolveArgs) -> Result<u8> {
    let formula = read_formula(&args.file)?;
    let budget = Budget {
        timeout: args.timeout.map(seconds).transpose()?,
        conflicts: args.conflicts,
    };
    let config = SolverConfig::new(args.restart, args.polarity, args.seed);
    println!(
        "c {} vars, {} clauses, restart {}, polarity {}, seed {}",
        formula.num_vars(),
        formula.num_clauses(),
        args.restart,
        args.polarity,
        args.seed
    );
    let start = Instant::now();
    let outcome = Solver::new(&formula, config).solve(&budget);
    let s = &outcome.stats;
    println!(
        "c conflicts {} decisions {} propagations {} restarts {} time {:.3}s",
        s.conflicts,
        s.decisions,
        s.propagations,
        s.restarts,
        start.elapsed().as_secs_f64()
    );
    if let Some(model) = &outcome.model {
        if !lubysat::evaluate(&formula, model) {
            bail!("internal error: model does not satisfy the formula");
        }
    }
    print!("{}", outcome.competition_output());
    Ok(outcome.status.exit_code() as u8)
}

fn bench_configs(spec: &str, polarity: PolarityMode) -> Result<Vec<BenchConfig>> {
    // "luby-sweep" expands in place; the pieces around it are ordinary lists
    let mut policies = Vec::new();
    for (i, part) in spec.split("luby-sweep").enumerate() {
        if i > 0 {
            policies.extend(LUBY_SWEEP.iter().map(|&u| RestartPolicy::luby(u)));
        }
        policies.extend(parse_policy_list(part.trim_matches(','))?);
    }
    if policies.is_empty() {
        bail!("no restart policies given");
    }
    let mut configs: Vec<BenchConfig> = Vec::new();
    for p in policies {
        let config = BenchConfig::new(p, polarity);
        if configs.iter().any(|c| c.label == config.label) {
            bail!("duplicate configuration {}", config.label);
        }
        configs.push(config);
    }
    Ok(configs)
}

fn bench(args: BenchArgs) -> Result<u8> {
    let configs = bench_configs(&args.restarts, args.polarity)?;
    if args.seeds.is_empty() {
        bail!("at least one seed is required");
    }
    let budget = Budget {
        timeout: Some(seconds(args.timeout)?),
        conflicts: args.conflicts,
    };
    info!(
        "{} configs x {} seeds on {} with {} workers",
        configs.len(),
        args.seeds.len(),
        args.dir.display(),
        args.workers
    );
    let records = harness::sweep(&args.dir, &configs, &args.seeds, &budget, args.workers)?;
    for r in records.iter().filter(|r| r.note.is_some()) {
        warn!(
            "{} [{} seed {}]: {}",
            r.instance,
            r.config,
            r.seed,
            r.note.as_deref().unwrap_or("")
        );
    }
    let table = harness::aggregate(&records);
    write(&args.out, &harness::emit_table(&table))?;
    write(&args.hist, &harness::emit_histogram(&records, args.baseline))?;
    if let Some(path) = &args.records {
        write(path, &harness::emit_records(&records))?;
    }
    print!("{}", harness::format_table(&table));
    Ok(0)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bench_config_lists() {
        let labels = |s: &str| -> Vec<String> {
            bench_configs(s, PolarityMode::PhaseSaving)
                .unwrap()
                .into_iter()
                .map(|c| c.label)
                .collect()
        };
        assert_eq!(labels("luby-sweep").len(), 12);
        assert_eq!(labels("luby-sweep")[0], "Luby-1");
        assert_eq!(labels("luby-sweep")[11], "Luby-512");
        assert_eq!(labels("fixed:700,luby:6"), vec!["Fixed-700", "Luby-6"]);
        let mixed = labels("fixed:700,luby-sweep,geometric:100,1.5");
        assert_eq!(mixed.len(), 14);
        assert_eq!(mixed[0], "Fixed-700");
        assert_eq!(mixed[1], "Luby-1");
        assert_eq!(mixed[13], "Geometric-100x1.5");
        assert!(bench_configs("luby:1,luby:1", PolarityMode::Negative).is_err());
        assert!(bench_configs("", PolarityMode::Negative).is_err());
    }
}
