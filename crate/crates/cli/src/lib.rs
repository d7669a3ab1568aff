//! Subcommands behind the `pdsvrp` binary.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use pdsvrp_core::engine::{IncumbentSource, TracePoint};
use pdsvrp_core::io::{
    convert_source, eligible_fraction_from_name, emit_results_table, format_fixed, parse_coordinates, parse_native,
    parse_solution, serialize_solution, ConvertError, ConverterParams, CostParams, DroneMetric, ResultEntry, ResultRow,
    Rounding,
};
use pdsvrp_core::model::{objective_value, validate_solution};
use pdsvrp_core::{build_model, solve, BuildOptions, Instance, ModelKind, SearchConfig, Solution, Status};

pub const RESULTS_FILE: &str = "results.csv";
pub const OUT_DIR_ENV: &str = "PDSVRP_OUT_DIR";

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    /// Command completed; for `validate`, the solution is feasible.
    Ok = 0,
    /// `validate` found the solution infeasible.
    Infeasible = 1,
    /// Bad flags or parameter values.
    Usage = 2,
    /// An input file could not be read or parsed.
    Input = 3,
    /// A model was selected for an instance of the other variant.
    Mismatch = 4,
    /// Results could not be written, or the solver failed.
    Output = 5,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// A failed command: the exit class plus the error chain.
#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub error: anyhow::Error,
}

impl CliError {
    fn new(exit: Exit, error: impl Into<anyhow::Error>) -> Self {
        Self {
            exit,
            error: error.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

trait Classify<T> {
    fn class(self, exit: Exit) -> Result<T, CliError>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn class(self, exit: Exit) -> Result<T, CliError> {
        self.map_err(|e| CliError::new(exit, e))
    }
}

#[derive(Debug, Parser)]
#[command(name = "pdsvrp", version, about = "Parallel drone scheduling vehicle routing solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve instances and write outcome files and a results table.
    Solve(SolveArgs),
    /// Check a solution file against an instance.
    Validate(ValidateArgs),
    /// Turn a TSPLIB or CVRPLIB coordinate file into a native instance.
    Convert(ConvertArgs),
    /// Solve every instance of a directory, skipping finished ones.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunOptions {
    /// Model to run; repeat for several. Defaults to both models of the
    /// instance's variant.
    #[arg(long = "model", value_name = "MODEL")]
    pub models: Vec<ModelKind>,
    /// Wall-clock budget per instance and model, in seconds.
    #[arg(long, default_value_t = 10.0)]
    pub time_limit: f64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stop each search after this many nodes.
    #[arg(long)]
    pub node_limit: Option<u64>,
    /// Skip the heuristic warm start.
    #[arg(long)]
    pub no_heuristics: bool,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = "pdsvrp-out")]
    pub out: PathBuf,
    /// Re-solve instances that already have outcome files.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(required = true)]
    pub instances: Vec<PathBuf>,
    #[command(flatten)]
    pub run: RunOptions,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of `.pdsvrp` instance files.
    pub directory: PathBuf,
    #[command(flatten)]
    pub run: RunOptions,
    /// Instances solved at the same time.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RoundingArg {
    Nearest,
    Ceiling,
    Att,
    ExactScaled,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DroneMetricArg {
    Euclidean,
    SameAsTruck,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// TSPLIB or CVRPLIB coordinate file.
    pub source: PathBuf,
    /// Destination file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub trucks: usize,
    #[arg(long, default_value_t = 1)]
    pub drones: usize,
    /// Share of drone-eligible customers; read from names like `att48_0_80`
    /// when omitted, else 0.8.
    #[arg(long)]
    pub eligible: Option<f64>,
    /// Drone speed relative to the truck.
    #[arg(long, default_value_t = 1.0)]
    pub drone_speed: f64,
    /// Defaults to the rule implied by EDGE_WEIGHT_TYPE, else nearest.
    #[arg(long, value_enum)]
    pub rounding: Option<RoundingArg>,
    #[arg(long, value_enum, default_value = "euclidean")]
    pub drone_metric: DroneMetricArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub scale: i64,
    /// Build a min-cost instance (needs demands in the source).
    #[arg(long)]
    pub min_cost: bool,
    #[arg(long, default_value_t = 1.0)]
    pub truck_cost_rate: f64,
    #[arg(long, default_value_t = 1.0)]
    pub drone_cost_rate: f64,
    /// Overrides the source CAPACITY.
    #[arg(long)]
    pub capacity: Option<f64>,
    /// Source units; the default is effectively unlimited.
    #[arg(long, default_value_t = 1e9)]
    pub truck_time_limit: f64,
    #[arg(long, default_value_t = 1e9)]
    pub drone_time_limit: f64,
}

/// What to solve and where results go.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub instances: Vec<PathBuf>,
    /// Empty means both models of each instance's variant.
    pub models: Vec<ModelKind>,
    pub config: SearchConfig,
    pub out_dir: PathBuf,
    pub force: bool,
}

impl RunManifest {
    pub fn from_options(instances: Vec<PathBuf>, run: &RunOptions) -> Result<Self, CliError> {
        if !(run.time_limit.is_finite() && run.time_limit >= 0.0) {
            return Err(CliError::new(Exit::Usage, anyhow::anyhow!("--time-limit must be a non-negative number")));
        }
        if run.workers == 0 {
            return Err(CliError::new(Exit::Usage, anyhow::anyhow!("--workers must be at least 1")));
        }
        Ok(Self {
            instances,
            models: run.models.clone(),
            config: SearchConfig {
                time_budget: Duration::from_secs_f64(run.time_limit),
                workers: run.workers,
                seed: run.seed,
                node_limit: run.node_limit,
                incumbent_source: if run.no_heuristics {
                    IncumbentSource::None
                } else {
                    IncumbentSource::Heuristics
                },
                ..Default::default()
            },
            out_dir: run.out.clone(),
            force: run.force,
        })
    }

    fn models_for(&self, instance: &Instance) -> Vec<ModelKind> {
        if self.models.is_empty() {
            ModelKind::for_variant(instance.variant()).to_vec()
        } else {
            self.models.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub elapsed_ms: u64,
    pub nodes: u64,
    pub lower_bound: i64,
    pub upper_bound: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub truck_tours: Vec<Vec<usize>>,
    pub drone_missions: Vec<Vec<usize>>,
}

/// Contents of a per-instance, per-model outcome file. Bounds are in
/// fixed-point units; divide by `scale` for source units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeFile {
    pub instance: String,
    pub source: String,
    pub model: String,
    pub status: String,
    pub scale: i64,
    pub trucks: usize,
    pub drones: usize,
    pub lower_bound: Option<i64>,
    pub upper_bound: Option<i64>,
    pub time_budget_ms: u64,
    pub seed: u64,
    pub workers: usize,
    pub nodes: u64,
    pub trace: Vec<TraceRecord>,
    pub solution: Option<SolutionRecord>,
}

impl OutcomeFile {
    fn entry(&self) -> Result<ResultEntry, CliError> {
        let model = self.model.parse::<ModelKind>().map_err(|e| CliError::new(Exit::Input, anyhow::anyhow!(e)))?;
        let status = match self.status.as_str() {
            "optimal" => Status::Optimal,
            "feasible" => Status::Feasible,
            "infeasible" => Status::Infeasible,
            "unknown" => Status::Unknown,
            s => return Err(CliError::new(Exit::Input, anyhow::anyhow!("unknown status {s:?}"))),
        };
        Ok(ResultEntry {
            model,
            status,
            lower_bound: self.lower_bound,
            upper_bound: self.upper_bound,
            time: Duration::from_millis(self.time_budget_ms),
        })
    }
}

fn trace_record(p: &TracePoint) -> TraceRecord {
    TraceRecord {
        elapsed_ms: p.elapsed.as_millis() as u64,
        nodes: p.nodes,
        lower_bound: p.lower_bound,
        upper_bound: p.upper_bound,
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).class(Exit::Output)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("writing into {}", dir.display())).class(Exit::Output)?;
    tmp.write_all(contents).context("writing temporary file").class(Exit::Output)?;
    tmp.persist(path).map_err(|e| e.error).with_context(|| format!("writing {}", path.display())).class(Exit::Output)?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<Instance, CliError> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).class(Exit::Input)?;
    parse_native(&text).with_context(|| format!("parsing {}", path.display())).class(Exit::Input)
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "instance".into(), |s| s.to_string_lossy().into_owned())
}

/// Outcome file for `model` on the instance stored at `path`.
pub fn outcome_path(out_dir: &Path, path: &Path, model: ModelKind) -> PathBuf {
    out_dir.join(format!("{}.{}.json", stem(path), model.name()))
}

struct Loaded {
    path: PathBuf,
    instance: Instance,
    models: Vec<ModelKind>,
}

fn load_all(manifest: &RunManifest) -> Result<Vec<Loaded>, CliError> {
    let mut out = Vec::new();
    for path in &manifest.instances {
        let instance = read_instance(path)?;
        let models = manifest.models_for(&instance);
        if let Some(m) = models.iter().find(|m| m.variant() != instance.variant()) {
            return Err(CliError::new(
                Exit::Mismatch,
                anyhow::anyhow!("model {m} does not apply to {:?} instance {}", instance.variant(), path.display()),
            ));
        }
        out.push(Loaded {
            path: path.clone(),
            instance,
            models,
        });
    }
    out.sort_by(|a, b| (a.instance.name(), &a.path).cmp(&(b.instance.name(), &b.path)));
    Ok(out)
}

fn solve_one(job: &Loaded, model: ModelKind, manifest: &RunManifest) -> Result<OutcomeFile, CliError> {
    let inst = &job.instance;
    let m = build_model(model, inst, &BuildOptions::default()).class(Exit::Mismatch)?;
    let outcome = solve(&m, inst, &manifest.config).class(Exit::Output)?;
    let file = OutcomeFile {
        instance: inst.name().to_string(),
        source: job.path.display().to_string(),
        model: model.name().to_string(),
        status: outcome.status.to_string(),
        scale: inst.scale(),
        trucks: inst.truck_count(),
        drones: inst.drone_count(),
        lower_bound: (outcome.status != Status::Infeasible).then_some(outcome.lower_bound),
        upper_bound: outcome.upper_bound,
        time_budget_ms: manifest.config.time_budget.as_millis() as u64,
        seed: manifest.config.seed,
        workers: manifest.config.workers,
        nodes: outcome.stats.nodes,
        trace: outcome.trace.iter().map(trace_record).collect(),
        solution: outcome.incumbent.as_ref().map(|s| SolutionRecord {
            truck_tours: s.truck_tours.clone(),
            drone_missions: s.drone_missions.clone(),
        }),
    };
    let json = serde_json::to_vec_pretty(&file).class(Exit::Output)?;
    let path = outcome_path(&manifest.out_dir, &job.path, model);
    write_atomic(&path, &json)?;
    if let Some(sol) = &outcome.incumbent {
        write_atomic(&path.with_extension("sol"), serialize_solution(sol).as_bytes())?;
    }
    Ok(file)
}

fn read_outcome(path: &Path) -> Result<OutcomeFile, CliError> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).class(Exit::Input)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).class(Exit::Input)
}

/// Counts of work done by a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub solved: usize,
    pub skipped: usize,
    pub csv_path: PathBuf,
    pub csv: String,
}

fn run(manifest: &RunManifest, jobs: usize, resume: bool) -> Result<RunReport, CliError> {
    let loaded = load_all(manifest)?;
    let mut tasks = Vec::new();
    let mut skipped = 0;
    for (i, job) in loaded.iter().enumerate() {
        for &model in &job.models {
            if resume && !manifest.force && outcome_path(&manifest.out_dir, &job.path, model).exists() {
                skipped += 1;
            } else {
                tasks.push((i, model));
            }
        }
    }
    fs::create_dir_all(&manifest.out_dir).with_context(|| format!("creating {}", manifest.out_dir.display())).class(Exit::Output)?;

    let jobs = jobs.max(1);
    let results: Vec<Result<(), CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|w| {
                let tasks = &tasks;
                let loaded = &loaded;
                scope.spawn(move || -> Result<(), CliError> {
                    for &(i, model) in tasks.iter().skip(w).step_by(jobs) {
                        let f = solve_one(&loaded[i], model, manifest)?;
                        eprintln!(
                            "{} {}: {} lb {} ub {}",
                            f.instance,
                            f.model,
                            f.status,
                            f.lower_bound.map_or("-".into(), |v| format_fixed(v, f.scale)),
                            f.upper_bound.map_or("-".into(), |v| format_fixed(v, f.scale)),
                        );
                    }
                    Ok(())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    });
    for r in results {
        r?;
    }

    let mut columns: Vec<ModelKind> = loaded.iter().flat_map(|j| j.models.iter().copied()).collect();
    if loaded.is_empty() {
        columns = manifest.models.clone();
    }
    columns.sort();
    columns.dedup();
    let mut rows = Vec::new();
    for job in &loaded {
        let mut entries = Vec::new();
        for &model in &job.models {
            entries.push(read_outcome(&outcome_path(&manifest.out_dir, &job.path, model))?.entry()?);
        }
        rows.push(ResultRow {
            instance: job.instance.name().to_string(),
            trucks: job.instance.truck_count(),
            drones: job.instance.drone_count(),
            scale: job.instance.scale(),
            entries,
        });
    }
    let csv = emit_results_table(&columns, &rows);
    let csv_path = manifest.out_dir.join(RESULTS_FILE);
    write_atomic(&csv_path, csv.as_bytes())?;
    Ok(RunReport {
        solved: tasks.len(),
        skipped,
        csv_path,
        csv,
    })
}

/// Solves every instance of the manifest with every selected model. Always
/// re-solves; finishing with Unknown still counts as success.
pub fn cmd_solve(manifest: &RunManifest) -> Result<RunReport, CliError> {
    run(manifest, 1, false)
}

/// Solves the `.pdsvrp` files of `dir` in name order. Instances whose
/// outcome files exist are skipped unless the manifest forces re-solving.
pub fn cmd_bench(dir: &Path, manifest: &RunManifest, jobs: usize) -> Result<RunReport, CliError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display())).class(Exit::Input)? {
        let path = entry.class(Exit::Input)?.path();
        if path.extension().is_some_and(|e| e == "pdsvrp") {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        eprintln!("warning: no .pdsvrp instances in {}", dir.display());
    }
    let manifest = RunManifest {
        instances: files,
        ..manifest.clone()
    };
    run(&manifest, jobs, true)
}

/// Validation result: the exit class and the printed report.
pub fn cmd_validate(instance: &Path, solution: &Path) -> Result<(Exit, String), CliError> {
    let inst = read_instance(instance)?;
    let text = fs::read_to_string(solution).with_context(|| format!("reading {}", solution.display())).class(Exit::Input)?;
    let sol: Solution = parse_solution(&text).with_context(|| format!("parsing {}", solution.display())).class(Exit::Input)?;
    let report = validate_solution(&inst, &sol).with_context(|| format!("checking {}", solution.display())).class(Exit::Input)?;
    if report.feasible() {
        let value = objective_value(&inst, &sol).class(Exit::Output)?;
        Ok((Exit::Ok, format!("feasible\nobjective {} ({value})\n", format_fixed(value, inst.scale()))))
    } else {
        let mut out = String::from("infeasible\n");
        for v in &report.violations {
            out.push_str(&format!("{v}\n"));
        }
        Ok((Exit::Infeasible, out))
    }
}

pub fn converter_params(args: &ConvertArgs, source_name: &str, edge_weight_type: Option<&str>) -> ConverterParams {
    let rounding = match args.rounding {
        Some(RoundingArg::Nearest) => Rounding::Nearest,
        Some(RoundingArg::Ceiling) => Rounding::Ceiling,
        Some(RoundingArg::Att) => Rounding::Att,
        Some(RoundingArg::ExactScaled) => Rounding::ExactScaled,
        None => edge_weight_type.and_then(Rounding::for_edge_weight_type).unwrap_or(Rounding::Nearest),
    };
    ConverterParams {
        eligible_fraction: args.eligible.or_else(|| eligible_fraction_from_name(source_name)).unwrap_or(0.8),
        drone_speed: args.drone_speed,
        rounding,
        drone_metric: match args.drone_metric {
            DroneMetricArg::Euclidean => DroneMetric::Euclidean,
            DroneMetricArg::SameAsTruck => DroneMetric::SameAsTruck,
        },
        seed: args.seed,
        trucks: args.trucks,
        drones: args.drones,
        scale: args.scale,
        min_cost: args.min_cost.then_some(CostParams {
            truck_cost_rate: args.truck_cost_rate,
            drone_cost_rate: args.drone_cost_rate,
            truck_capacity: args.capacity,
            truck_time_limit: args.truck_time_limit,
            drone_time_limit: args.drone_time_limit,
        }),
    }
}

/// Converts a coordinate file and returns the native document.
pub fn cmd_convert(args: &ConvertArgs) -> Result<String, CliError> {
    let text = fs::read_to_string(&args.source).with_context(|| format!("reading {}", args.source.display())).class(Exit::Input)?;
    let src = parse_coordinates(&text).with_context(|| format!("parsing {}", args.source.display())).class(Exit::Input)?;
    let name = if src.name.is_empty() { stem(&args.source) } else { src.name.clone() };
    let params = converter_params(args, &name, src.edge_weight_type.as_deref());
    let inst = convert_source(&src, &params).map_err(|e| {
        let exit = match e {
            ConvertError::BadSpeed(_) | ConvertError::BadFraction(_) | ConvertError::Instance(_) => Exit::Usage,
            _ => Exit::Input,
        };
        CliError::new(exit, e)
    })?;
    let doc = pdsvrp_core::io::serialize_native(&inst);
    if let Some(out) = &args.out {
        write_atomic(out, doc.as_bytes())?;
    }
    Ok(doc)
}

/// Runs a parsed command line, printing results, and returns the exit class.
pub fn run_cli(cli: Cli) -> Exit {
    let result = match cli.command {
        Command::Solve(a) => RunManifest::from_options(a.instances, &a.run).and_then(|m| cmd_solve(&m)).map(|r| {
            println!("{}", r.csv_path.display());
            Exit::Ok
        }),
        Command::Bench(a) => RunManifest::from_options(Vec::new(), &a.run).and_then(|m| cmd_bench(&a.directory, &m, a.jobs)).map(|r| {
            eprintln!("solved {}, skipped {}", r.solved, r.skipped);
            println!("{}", r.csv_path.display());
            Exit::Ok
        }),
        Command::Validate(a) => cmd_validate(&a.instance, &a.solution).map(|(exit, text)| {
            print!("{text}");
            exit
        }),
        Command::Convert(a) => cmd_convert(&a).map(|doc| {
            if a.out.is_none() {
                print!("{doc}");
            }
            Exit::Ok
        }),
    };
    match result {
        Ok(exit) => exit,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn convert_args(extra: &[&str]) -> ConvertArgs {
        let mut argv = vec!["pdsvrp", "convert", "src.tsp"];
        argv.extend_from_slice(extra);
        match Cli::parse_from(argv).command {
            Command::Convert(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn converter_defaults_follow_the_source() {
        let p = converter_params(&convert_args(&[]), "att48_0_80", Some("ATT"));
        assert_eq!((p.eligible_fraction, p.rounding), (0.8, Rounding::Att));
        let p = converter_params(&convert_args(&["--eligible", "0.5", "--rounding", "exact-scaled"]), "att48_0_80", Some("ATT"));
        assert_eq!((p.eligible_fraction, p.rounding), (0.5, Rounding::ExactScaled));
        assert!(p.min_cost.is_none());
        assert!(converter_params(&convert_args(&["--min-cost"]), "x", None).min_cost.is_some());
    }

    #[test]
    fn manifest_rejects_bad_options() {
        let opts = |args: &[&str]| {
            let mut argv = vec!["pdsvrp", "solve", "a.pdsvrp"];
            argv.extend_from_slice(args);
            match Cli::parse_from(argv).command {
                Command::Solve(a) => a.run,
                _ => unreachable!(),
            }
        };
        assert_eq!(RunManifest::from_options(vec![], &opts(&["--workers", "0"])).unwrap_err().exit, Exit::Usage);
        assert_eq!(RunManifest::from_options(vec![], &opts(&["--time-limit=-1"])).unwrap_err().exit, Exit::Usage);
        let m = RunManifest::from_options(vec![], &opts(&["--no-heuristics", "--seed", "4"])).unwrap();
        assert_eq!((m.config.seed, m.config.incumbent_source), (4, IncumbentSource::None));
    }

    #[test]
    fn outcome_entry_reads_back() {
        let f = OutcomeFile {
            instance: "a".into(),
            source: "a.pdsvrp".into(),
            model: "mc-2idx".into(),
            status: "infeasible".into(),
            scale: 100,
            trucks: 1,
            drones: 0,
            lower_bound: None,
            upper_bound: None,
            time_budget_ms: 2500,
            seed: 0,
            workers: 1,
            nodes: 3,
            trace: vec![],
            solution: None,
        };
        let e = f.entry().unwrap();
        assert_eq!((e.model, e.status, e.time), (ModelKind::Mc2Idx, Status::Infeasible, Duration::from_millis(2500)));
        let bad = OutcomeFile { status: "done".into(), ..f };
        assert_eq!(bad.entry().unwrap_err().exit, Exit::Input);
    }
}
