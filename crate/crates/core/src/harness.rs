//! Batch experiments: run every (instance, configuration, seed) triple of a
//! corpus, then summarize conflicts and solved counts per configuration.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{evaluate, parse_dimacs, Formula};
use crate::engine::{Budget, Solver, SolverConfig, Status};
use crate::heuristics::PolarityMode;
use crate::restarts::{RestartPolicy, LUBY_SWEEP};

/// Solved-instance reference drawn on every histogram row by default.
pub const DEFAULT_BASELINE: u64 = 100;
/// File extensions picked up from a corpus directory.
pub const INSTANCE_EXTENSIONS: [&str; 2] = ["cnf", "dimacs"];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read corpus directory {path}: {source}")]
    Corpus { path: PathBuf, source: io::Error },
    #[error("no instances (*.cnf, *.dimacs) in {0}")]
    EmptyCorpus(PathBuf),
    #[error("budget must bound the wall-clock time or the number of conflicts")]
    UnboundedBudget,
    #[error("at least one worker is required")]
    NoWorkers,
    #[error("failed to start worker pool: {0}")]
    Pool(String),
    #[error("malformed CSV: {0}")]
    Csv(String),
}

/// One solver configuration of a sweep, without the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub label: String,
    pub restart: RestartPolicy,
    pub polarity: PolarityMode,
}

impl BenchConfig {
    /// Labelled after the restart policy, e.g. `Luby-6`.
    pub fn new(restart: RestartPolicy, polarity: PolarityMode) -> BenchConfig {
        BenchConfig {
            label: restart.label(),
            restart,
            polarity,
        }
    }

    pub fn solver_config(&self, seed: u64) -> SolverConfig {
        SolverConfig::new(self.restart, self.polarity, seed)
    }
}

/// The twelve Luby unit runs with phase-saving.
pub fn luby_sweep_configs() -> Vec<BenchConfig> {
    LUBY_SWEEP
        .iter()
        .map(|&u| BenchConfig::new(RestartPolicy::luby(u), PolarityMode::PhaseSaving))
        .collect()
}

fn status_name<S: serde::Serializer>(status: &Status, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&status.to_string())
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub instance: String,
    pub config: String,
    pub seed: u64,
    #[serde(serialize_with = "status_name")]
    pub status: Status,
    pub conflicts: u64,
    pub decisions: u64,
    pub restarts: u64,
    /// Seconds.
    pub wall_time: f64,
    pub note: Option<String>,
}

impl RunRecord {
    /// Equality ignoring wall time.
    pub fn same_result(&self, other: &RunRecord) -> bool {
        RunRecord {
            wall_time: 0.0,
            ..self.clone()
        } == RunRecord {
            wall_time: 0.0,
            ..other.clone()
        }
    }
}

/// Solves an already parsed formula with a fresh solver.
pub fn run_formula(
    instance: &str,
    formula: &Formula,
    config: &BenchConfig,
    seed: u64,
    budget: &Budget,
) -> RunRecord {
    let start = Instant::now();
    let outcome = Solver::new(formula, config.solver_config(seed)).solve(budget);
    let wall_time = start.elapsed().as_secs_f64();
    let mut status = outcome.status;
    let mut note = None;
    if let Some(model) = &outcome.model {
        if !evaluate(formula, model) {
            status = Status::Unknown;
            note = Some("model failed verification".to_string());
        }
    }
    RunRecord {
        instance: instance.to_string(),
        config: config.label.clone(),
        seed,
        status,
        conflicts: outcome.stats.conflicts,
        decisions: outcome.stats.decisions,
        restarts: outcome.stats.restarts,
        wall_time,
        note,
    }
}

/// Reads, parses and solves one instance file. Read and parse failures give
/// an UNKNOWN record carrying the error.
pub fn run_instance(path: &Path, config: &BenchConfig, seed: u64, budget: &Budget) -> RunRecord {
    let instance = instance_id(path);
    let parsed = fs::read(path)
        .map_err(|e| e.to_string())
        .and_then(|bytes| parse_dimacs(&bytes).map_err(|e| e.to_string()));
    match parsed {
        Ok(parsed) => run_formula(&instance, &parsed.formula, config, seed, budget),
        Err(e) => RunRecord {
            instance,
            config: config.label.clone(),
            seed,
            status: Status::Unknown,
            conflicts: 0,
            decisions: 0,
            restarts: 0,
            wall_time: 0.0,
            note: Some(e),
        },
    }
}

fn instance_id(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Instance files of a corpus directory, sorted by file name.
pub fn list_instances(dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let entries = fs::read_dir(dir).map_err(|source| HarnessError::Corpus {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| INSTANCE_EXTENSIONS.contains(&e))
        })
        .collect();
    files.sort_by_key(|p| instance_id(p));
    Ok(files)
}

/// Runs every (instance, configuration, seed) triple once on `workers`
/// threads.
///
/// Records come back ordered by instance name, then configuration position
/// in `configs`, then seed position in `seeds`, whatever the scheduling.
pub fn sweep(
    corpus: &Path,
    configs: &[BenchConfig],
    seeds: &[u64],
    budget: &Budget,
    workers: usize,
) -> Result<Vec<RunRecord>, HarnessError> {
    if workers == 0 {
        return Err(HarnessError::NoWorkers);
    }
    if !budget.is_bounded() {
        return Err(HarnessError::UnboundedBudget);
    }
    let files = list_instances(corpus)?;
    if files.is_empty() {
        return Err(HarnessError::EmptyCorpus(corpus.to_path_buf()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;

    // Parse once per file; each run still gets a fresh solver.
    let parsed: Vec<(String, Result<Formula, String>)> = pool.install(|| {
        use rayon::prelude::*;
        files
            .par_iter()
            .map(|p| {
                let formula = fs::read(p)
                    .map_err(|e| e.to_string())
                    .and_then(|b| parse_dimacs(&b).map(|r| r.formula).map_err(|e| e.to_string()));
                (instance_id(p), formula)
            })
            .collect()
    });

    let mut jobs = Vec::with_capacity(parsed.len() * configs.len() * seeds.len());
    for (fi, _) in parsed.iter().enumerate() {
        for (ci, _) in configs.iter().enumerate() {
            for (si, _) in seeds.iter().enumerate() {
                jobs.push((fi, ci, si));
            }
        }
    }

    let mut records: Vec<((usize, usize, usize), RunRecord)> = pool.install(|| {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(fi, ci, si)| {
                let (name, formula) = &parsed[fi];
                let config = &configs[ci];
                let seed = seeds[si];
                let record = match formula {
                    Ok(f) => run_formula(name, f, config, seed, budget),
                    Err(e) => RunRecord {
                        instance: name.clone(),
                        config: config.label.clone(),
                        seed,
                        status: Status::Unknown,
                        conflicts: 0,
                        decisions: 0,
                        restarts: 0,
                        wall_time: 0.0,
                        note: Some(e.clone()),
                    },
                };
                ((fi, ci, si), record)
            })
            .collect()
    });
    records.sort_by_key(|(key, _)| *key);
    Ok(records.into_iter().map(|(_, r)| r).collect())
}

/// Mean of a category together with the number of runs behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CategoryMean {
    pub mean: f64,
    pub count: u64,
}

impl CategoryMean {
    fn of(values: impl Iterator<Item = u64>) -> Option<CategoryMean> {
        let (sum, count) = values.fold((0u128, 0u64), |(s, c), v| (s + v as u128, c + 1));
        (count > 0).then(|| CategoryMean {
            mean: sum as f64 / count as f64,
            count,
        })
    }
}

/// Count-weighted mean of several categories; absent parts are skipped.
pub fn combine_means(parts: &[Option<CategoryMean>]) -> Option<CategoryMean> {
    let present: Vec<CategoryMean> = parts.iter().flatten().copied().collect();
    let count: u64 = present.iter().map(|p| p.count).sum();
    (count > 0).then(|| CategoryMean {
        mean: present.iter().map(|p| p.mean * p.count as f64).sum::<f64>() / count as f64,
        count,
    })
}

/// Conflict means of one configuration. `None` marks an empty category.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub strategy: String,
    pub sat: Option<CategoryMean>,
    pub unsat: Option<CategoryMean>,
    pub solved: Option<CategoryMean>,
    pub unsolved: Option<CategoryMean>,
    pub all: Option<CategoryMean>,
}

impl StatsRow {
    pub fn solved_count(&self) -> u64 {
        self.solved.map_or(0, |m| m.count)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StatsTable {
    pub rows: Vec<StatsRow>,
}

impl StatsTable {
    pub fn row(&self, strategy: &str) -> Option<&StatsRow> {
        self.rows.iter().find(|r| r.strategy == strategy)
    }
}

fn group_by_config(records: &[RunRecord]) -> Vec<(&str, Vec<&RunRecord>)> {
    let mut groups: Vec<(&str, Vec<&RunRecord>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(label, _)| *label == r.config) {
            Some((_, members)) => members.push(r),
            None => groups.push((&r.config, vec![r])),
        }
    }
    groups
}

/// Per-configuration conflict means, rows in order of first appearance.
///
/// SAT and UNSAT means come straight from the records; SOLVED combines them
/// weighted by run counts, and ALL combines SOLVED with UNSOLVED the same way.
pub fn aggregate(records: &[RunRecord]) -> StatsTable {
    let rows = group_by_config(records)
        .into_iter()
        .map(|(label, runs)| {
            let of = |status: Status| {
                CategoryMean::of(runs.iter().filter(|r| r.status == status).map(|r| r.conflicts))
            };
            let sat = of(Status::Sat);
            let unsat = of(Status::Unsat);
            let unsolved = of(Status::Unknown);
            let solved = combine_means(&[sat, unsat]);
            let all = combine_means(&[solved, unsolved]);
            StatsRow {
                strategy: label.to_string(),
                sat,
                unsat,
                solved,
                unsolved,
                all,
            }
        })
        .collect();
    StatsTable { rows }
}

/// Rounds half up to an integer.
pub fn round_half_up(x: f64) -> u64 {
    (x + 0.5).floor() as u64
}

pub const TABLE_HEADER: &str = "strategy,sat,unsat,solved,unsolved,all";
pub const HISTOGRAM_HEADER: &str = "strategy,solved,sat_solved,unsat_solved,baseline";

/// A table row as written to CSV: integer means, empty for absent categories.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCsvRow {
    pub strategy: String,
    pub sat: Option<u64>,
    pub unsat: Option<u64>,
    pub solved: Option<u64>,
    pub unsolved: Option<u64>,
    pub all: Option<u64>,
}

impl From<&StatsRow> for TableCsvRow {
    fn from(r: &StatsRow) -> Self {
        let round = |m: Option<CategoryMean>| m.map(|m| round_half_up(m.mean));
        TableCsvRow {
            strategy: r.strategy.clone(),
            sat: round(r.sat),
            unsat: round(r.unsat),
            solved: round(r.solved),
            unsolved: round(r.unsolved),
            all: round(r.all),
        }
    }
}

fn write_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("UTF-8 CSV")
}

fn read_csv<T: for<'de> Deserialize<'de>>(text: &str, header: &str) -> Result<Vec<T>, HarnessError> {
    let first = text.lines().next().unwrap_or_default();
    if first != header {
        return Err(HarnessError::Csv(format!(
            "expected header {header:?}, found {first:?}"
        )));
    }
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| HarnessError::Csv(e.to_string()))
}

/// Table as CSV: `strategy,sat,unsat,solved,unsolved,all`.
pub fn emit_table(table: &StatsTable) -> String {
    if table.rows.is_empty() {
        return format!("{TABLE_HEADER}\n");
    }
    write_csv(table.rows.iter().map(TableCsvRow::from))
}

pub fn parse_table(text: &str) -> Result<Vec<TableCsvRow>, HarnessError> {
    read_csv(text, TABLE_HEADER)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub strategy: String,
    pub solved: u64,
    pub sat_solved: u64,
    pub unsat_solved: u64,
    pub baseline: u64,
}

/// Solved counts per configuration, in order of first appearance.
pub fn histogram(records: &[RunRecord], baseline: u64) -> Vec<HistogramRow> {
    group_by_config(records)
        .into_iter()
        .map(|(label, runs)| {
            let count = |s: Status| runs.iter().filter(|r| r.status == s).count() as u64;
            let (sat, unsat) = (count(Status::Sat), count(Status::Unsat));
            HistogramRow {
                strategy: label.to_string(),
                solved: sat + unsat,
                sat_solved: sat,
                unsat_solved: unsat,
                baseline,
            }
        })
        .collect()
}

/// Histogram as CSV: `strategy,solved,sat_solved,unsat_solved,baseline`.
pub fn emit_histogram(records: &[RunRecord], baseline: u64) -> String {
    let rows = histogram(records, baseline);
    if rows.is_empty() {
        return format!("{HISTOGRAM_HEADER}\n");
    }
    write_csv(rows)
}

pub fn parse_histogram(text: &str) -> Result<Vec<HistogramRow>, HarnessError> {
    read_csv(text, HISTOGRAM_HEADER)
}

/// Raw records as CSV, one line per run.
pub fn emit_records(records: &[RunRecord]) -> String {
    if records.is_empty() {
        return "instance,config,seed,status,conflicts,decisions,restarts,wall_time,note\n".into();
    }
    write_csv(records)
}

/// Plain-text rendering of a table for terminals.
pub fn format_table(table: &StatsTable) -> String {
    let cell = |v: Option<u64>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
    let mut out = format!(
        "{:<16} {:>10} {:>10} {:>10} {:>10} {:>10} {:>7}\n",
        "strategy", "SAT", "UNSAT", "SOLVED", "UNSOLVED", "ALL", "#solved"
    );
    for row in &table.rows {
        let r = TableCsvRow::from(row);
        let _ = writeln!(
            out,
            "{:<16} {:>10} {:>10} {:>10} {:>10} {:>10} {:>7}",
            r.strategy,
            cell(r.sat),
            cell(r.unsat),
            cell(r.solved),
            cell(r.unsolved),
            cell(r.all),
            row.solved_count()
        );
    }
    out
}
