//! Command implementations behind the `circumfeas` binary: generate
//! instances, solve, audit, benchmark and recompute performance profiles.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use circumfeas::bench::{
    default_taus, profile_csv, profile_from_costs, run_suite, write_atomic, write_report, StopPolicy, SuiteKind,
    SuiteOptions,
};
use circumfeas::instances::{gen_suite, GeneratorConfig, Manifest};
use circumfeas::methods::{run_with, RunOptions, Trace};
use circumfeas::regularity::audit::{run_audit, AuditCheck, AuditConfig};
use circumfeas::{EllipsoidInstance64, Error, MethodKind, StopReason, StoppingCriterion};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_ABORT: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "circumfeas", version, about = "Circumcentered-reflection solvers for two-set convex feasibility")]
struct Cli {
    /// Master seed; all randomness derives from it.
    #[arg(long, global = true, default_value_t = 1234)]
    seed: u64,
    /// Ambient dimension of generated instances.
    #[arg(long, global = true, default_value_t = 100)]
    dim: usize,
    /// Output file or directory (meaning depends on the subcommand).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Interior,
    Singleton,
}

impl From<Suite> for SuiteKind {
    fn from(s: Suite) -> Self {
        match s {
            Suite::Interior => SuiteKind::Interior,
            Suite::Singleton => SuiteKind::Singleton,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StopOn {
    /// Gap to the first set below `--eps`.
    Gap,
    /// Distance to the instance witness below `--eps`.
    Witness,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a suite of two-ellipsoid instances and a manifest.
    Gen {
        #[arg(long, default_value_t = 30)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Suite::Interior)]
        suite: Suite,
        /// Overrides the suite's overlap factor (1.1 interior, 1.0 singleton).
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Run one method on one instance file.
    Solve {
        #[arg(long)]
        method: MethodKind,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = StopOn::Gap)]
        stop: StopOn,
    },
    /// Check the structural invariants on seeded random draws.
    Audit {
        /// Comma-separated subset of centralized,qne,oracle,rates,eb.
        #[arg(long, default_value = "centralized,qne,oracle,rates,eb")]
        checks: String,
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        /// Dimension of the audit families (independent of --dim).
        #[arg(long, default_value_t = 6)]
        audit_dim: usize,
    },
    /// Run the method grid on a generated or loaded suite.
    Bench {
        #[arg(long, value_enum, default_value_t = Suite::Interior)]
        suite: Suite,
        #[arg(long, default_value_t = 30)]
        count: usize,
        #[arg(long)]
        lambda: Option<f64>,
        /// Defaults to the suite's tolerance (1e-6 interior, 1e-3 singleton).
        #[arg(long)]
        eps: Option<f64>,
        /// Defaults to the suite's budget (10000 interior, 500000 singleton).
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_delimiter = ',', default_value = "ccrm,map,crmprod")]
        methods: Vec<MethodKind>,
        /// Load instances from a manifest instead of generating them.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Fill the wall_ms column (makes records.csv nondeterministic).
        #[arg(long)]
        wall_time: bool,
    },
    /// Recompute a performance profile from a records.csv file.
    Profile {
        #[arg(long)]
        records: PathBuf,
    },
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::RankDeficient { .. } => EXIT_ABORT,
                Error::Io(_) | Error::Json(_) => EXIT_IO,
                _ => EXIT_USAGE,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() || cause.downcast_ref::<csv::Error>().is_some() {
            return EXIT_IO;
        }
    }
    EXIT_USAGE
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Gen { count, suite, lambda } => {
            let lambda = lambda.unwrap_or(SuiteKind::from(suite).lambda());
            cmd_gen(&GeneratorConfig::new(cli.dim, count, lambda, cli.seed), cli.out.as_deref())
        }
        Command::Solve { method, instance, eps, budget, stop } => {
            cmd_solve(method, &instance, eps, budget, stop, cli.out.as_deref(), cli.format)
        }
        Command::Audit { checks, draws, audit_dim } => {
            let cfg = AuditConfig {
                seed: cli.seed,
                draws,
                dim: audit_dim,
                checks: AuditCheck::parse_list(&checks)?,
                ..AuditConfig::default()
            };
            cmd_audit(&cfg, cli.out.as_deref())
        }
        Command::Bench { suite, count, lambda, eps, budget, methods, manifest, threads, wall_time } => {
            let kind = SuiteKind::from(suite);
            let mut policy = StopPolicy::for_suite(kind);
            if let Some(eps) = eps {
                policy = policy.with_eps(eps);
            }
            if let Some(budget) = budget {
                policy = policy.with_budget(budget);
            }
            let instances = match manifest {
                Some(path) => {
                    let m = Manifest::load(&path)?;
                    m.load_instances(path.parent().unwrap_or(Path::new(".")))?
                }
                None => {
                    let lambda = lambda.unwrap_or(kind.lambda());
                    gen_suite(&GeneratorConfig::new(cli.dim, count, lambda, cli.seed))?
                }
            };
            let out = cli.out.unwrap_or_else(|| PathBuf::from("results"));
            let opts = SuiteOptions { threads, keep_traces: false };
            cmd_bench(&instances, &methods, policy, &opts, &out, wall_time, cli.format)
        }
        Command::Profile { records } => cmd_profile(&records, cli.out.as_deref()),
    }
}

fn cmd_gen(cfg: &GeneratorConfig, out: Option<&Path>) -> anyhow::Result<u8> {
    cfg.validate()?;
    let dir = out.unwrap_or(Path::new("instances"));
    let instances = gen_suite(cfg)?;
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(instances.len());
    for inst in &instances {
        let name = format!("{}.json", inst.id);
        write_atomic(&dir.join(&name), &inst.to_json()?)?;
        println!(
            "{} n={} lambda={} |z0|={:.4} witness_gap_e2={:.3e}",
            inst.id,
            inst.n,
            inst.lambda,
            inst.z0.norm(),
            inst.e2.gap(&inst.witness, 1e-12)?
        );
        files.push(name);
    }
    let manifest = Manifest { config: cfg.clone(), instances: files };
    write_atomic(&dir.join("manifest.json"), &serde_json::to_string_pretty(&manifest)?)?;
    Ok(0)
}

fn cmd_solve(
    method: MethodKind,
    path: &Path,
    eps: f64,
    budget: u64,
    stop_on: StopOn,
    out: Option<&Path>,
    format: Format,
) -> anyhow::Result<u8> {
    let inst = EllipsoidInstance64::load(path).with_context(|| format!("loading {}", path.display()))?;
    let tol = match stop_on {
        StopOn::Gap => StoppingCriterion::GapToFirstSet { eps },
        StopOn::Witness => StoppingCriterion::DistanceToKnownSolution { eps, solution: inst.witness.clone() },
    };
    let stop = [tol, StoppingCriterion::ProjectionBudget { max: budget }];
    let keep = out.is_some() && format == Format::Csv;
    let opts = RunOptions { trace: if keep { Trace::Full } else { Trace::Endpoints }, ..RunOptions::default() };
    let run = run_with(method, &inst.e1, &inst.e2, &inst.z0, &stop, &opts)?;
    println!(
        "{} {} projections={} iterations={} stop={} residual={:e}",
        method.id(),
        inst.id,
        run.total_projections,
        run.iterations(),
        run.stop_reason,
        run.final_residual()
    );
    if run.stop_reason == StopReason::RankDeficient {
        eprintln!("error: circumcenter undefined at iteration {}; no output written", run.iterations());
        return Ok(EXIT_ABORT);
    }
    if let Some(out) = out {
        let body = match format {
            Format::Csv => run.trajectory_csv(false),
            Format::Json => {
                let mut summary = run.summary_json();
                summary["instance_id"] = inst.id.clone().into();
                summary["final_point"] = serde_json::to_value(run.final_point())?;
                serde_json::to_string_pretty(&summary)? + "\n"
            }
        };
        write_atomic(out, &body)?;
    }
    Ok(0)
}

fn cmd_audit(cfg: &AuditConfig, out: Option<&Path>) -> anyhow::Result<u8> {
    let report = run_audit(cfg)?;
    let json = report.to_json()? + "\n";
    match out {
        Some(p) => write_atomic(p, &json)?,
        None => print!("{json}"),
    }
    for c in &report.checks {
        eprintln!(
            "{}: {} evaluated, {} skipped, {} violations",
            c.check,
            c.evaluated,
            c.skipped,
            c.violations.len()
        );
    }
    Ok(if report.passed { 0 } else { 1 })
}

fn cmd_bench(
    instances: &[EllipsoidInstance64],
    methods: &[MethodKind],
    policy: StopPolicy,
    opts: &SuiteOptions,
    out: &Path,
    wall_time: bool,
    format: Format,
) -> anyhow::Result<u8> {
    let report = run_suite(instances, methods, policy, opts)?;
    for r in &report.records {
        println!(
            "{} {} projections={} iterations={} stop={} residual={:e}",
            r.method.id(),
            r.instance_id,
            r.projections,
            r.iterations,
            r.stop_reason,
            r.final_residual
        );
    }
    for s in &report.stats {
        let t = &s.stats;
        eprintln!(
            "{}: solved {}/{} mean {:.2} +- {:.2} median {} min {} max {}",
            s.method, s.solved, t.count, t.mean, t.std, t.median, t.min, t.max
        );
    }
    write_report(&report, out, &default_taus(), wall_time)?;
    if format == Format::Json {
        write_atomic(&out.join("report.json"), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    }
    Ok(0)
}

/// Rebuilds `profile.csv` from `records.csv`; solved means a tolerance stop.
fn cmd_profile(records: &Path, out: Option<&Path>) -> anyhow::Result<u8> {
    let mut reader = csv::Reader::from_path(records)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| anyhow!("records file lacks column '{name}'"))
    };
    let (c_method, c_inst, c_proj, c_stop) = (col("method")?, col("instance_id")?, col("projections")?, col("stop_reason")?);

    let mut methods: Vec<MethodKind> = Vec::new();
    let mut instances: Vec<String> = Vec::new();
    let mut cost: BTreeMap<(MethodKind, String), f64> = BTreeMap::new();
    for row in reader.records() {
        let row = row?;
        let m: MethodKind = row[c_method].parse()?;
        let id = row[c_inst].to_string();
        let solved = matches!(&row[c_stop], "gap" | "distance");
        let p: f64 = row[c_proj].parse().with_context(|| format!("bad projections value '{}'", &row[c_proj]))?;
        if !methods.contains(&m) {
            methods.push(m);
        }
        if !instances.contains(&id) {
            instances.push(id.clone());
        }
        cost.insert((m, id), if solved { p } else { f64::INFINITY });
    }
    if methods.is_empty() {
        bail!(Error::InvalidArgument("records file has no rows".into()));
    }
    let rows: Vec<(MethodKind, Vec<f64>)> = methods
        .iter()
        .map(|&m| (m, instances.iter().map(|i| cost.get(&(m, i.clone())).copied().unwrap_or(f64::INFINITY)).collect()))
        .collect();
    let table = profile_from_costs(&rows, &instances, &default_taus())?;
    let body = profile_csv(&table);
    match out {
        Some(p) => write_atomic(p, &body)?,
        None => print!("{body}"),
    }
    let at_one = &table.rows[0].1;
    for (m, f) in methods.iter().zip(at_one) {
        eprintln!("{m}: rho(1) = {f:.3}");
    }
    Ok(0)
}
