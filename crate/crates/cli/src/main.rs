use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lns2e::bench::{ablate, discover_set, expand_set, run_batch, BksTable, Job, TimePolicy};
use lns2e::instance::{load_instance, Dialect, Severity, Variant};
use lns2e::params::Toggle;
use lns2e::solution::{check_feasibility, evaluate, parse_solution, write_solution};
use lns2e::{solve, Instance, Params};

#[derive(Parser)]
#[command(name = "lns2e", version, about = "Two-echelon routing solver and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance.
    Solve(SolveArgs),
    /// Seeded batch runs against the best-known-solution table.
    Run(RunArgs),
    /// Evaluate a solution file and list constraint violations.
    Verify(VerifyArgs),
    /// Disable operators one at a time and compare with the base run.
    Ablate(AblateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Auto,
    #[value(name = "2evrp")]
    TwoEVrp,
    #[value(name = "2elrpsd")]
    TwoELrpSd,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Args)]
struct InstanceArgs {
    /// File format; guessed from the file when omitted.
    #[arg(long)]
    dialect: Option<Dialect>,
    #[arg(long, value_enum, default_value = "auto")]
    variant: VariantArg,
    /// Per-satellite freighter limit.
    #[arg(long, value_enum)]
    per_satellite_cf: Option<OnOff>,
}

#[derive(Args)]
struct SearchArgs {
    /// Time budget in seconds.
    #[arg(long)]
    time: Option<f64>,
    /// Base seed.
    #[arg(long, env = "LNS2E_SEED")]
    seed: Option<u64>,
    /// File of key=value parameter lines.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    max_iterations: Option<u64>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    inst: InstanceArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Write the solution here.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the run report as JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    /// Benchmark set, e.g. 2a, 4b, Nguyen; `2` expands to 2a, 2b and 2c.
    #[arg(long, group = "source")]
    set: Option<String>,
    /// Glob over instance files.
    #[arg(long, group = "source")]
    glob: Option<String>,
    /// Explicit instance files.
    #[arg(long, group = "source", num_args = 1..)]
    instance: Vec<PathBuf>,
    /// Root holding one directory per set.
    #[arg(long, env = "LNS2E_DATA", default_value = "data")]
    data: PathBuf,
    #[arg(long)]
    dialect: Option<Dialect>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), default_value = "5")]
    runs: u64,
    /// Worker threads.
    #[arg(long, default_value = "1")]
    jobs: usize,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    batch: BatchArgs,
    /// Alternative best-known-solution table (CSV).
    #[arg(long)]
    bks: Option<PathBuf>,
    /// CSV report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// JSON report.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    solution: PathBuf,
    #[command(flatten)]
    inst: InstanceArgs,
}

#[derive(Args)]
struct AblateArgs {
    #[command(flatten)]
    batch: BatchArgs,
    /// Operators to disable, one configuration each.
    #[arg(long, num_args = 1.., required = true)]
    disable: Vec<String>,
    #[arg(long)]
    json: Option<PathBuf>,
}

fn load(path: &Path, args: &InstanceArgs) -> Result<Instance> {
    let cf = args.per_satellite_cf.map(|v| matches!(v, OnOff::On));
    let inst: Instance =
        load_instance(path, args.dialect, cf).with_context(|| format!("reading {}", path.display()))?;
    let wanted = match args.variant {
        VariantArg::Auto => None,
        VariantArg::TwoEVrp => Some(Variant::TwoEVrp),
        VariantArg::TwoELrpSd => Some(Variant::TwoELrpSd),
    };
    if let Some(v) = wanted {
        if v != inst.variant {
            bail!("{} reads as {}, not {v}; pass --dialect explicitly", path.display(), inst.variant);
        }
    }
    for note in &inst.notes {
        eprintln!("note: {note}");
    }
    Ok(inst)
}

fn params(search: &SearchArgs) -> Result<Params> {
    let mut p = match &search.params {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Params::from_kv(&text)?
        }
        None => Params::default(),
    };
    if let Some(t) = search.time {
        p.time_max = Duration::from_secs_f64(t.max(0.0));
    }
    if let Some(s) = search.seed {
        p.seed = s;
    }
    if search.max_iterations.is_some() {
        p.max_iterations = search.max_iterations;
    }
    p.validate()?;
    Ok(p)
}

fn cmd_solve(a: SolveArgs) -> Result<ExitCode> {
    let inst = load(&a.instance, &a.inst)?;
    for d in inst.validate() {
        if d.severity == Severity::Warning {
            eprintln!("warning: {}", d.message);
        }
    }
    let p = params(&a.search)?;
    let (sol, report) = solve(&inst, &p)?;
    let violations = check_feasibility(&inst, &sol);
    let text = write_solution(&inst, &sol);
    match &a.output {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    if let Some(path) = &a.json {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    eprintln!(
        "{}: cost {:.2} after {} iterations, {:.1}s (best at {:.1}s), {} restarts",
        inst.name, report.cost, report.iterations, report.wall_time, report.time_to_best, report.restarts
    );
    for v in &violations {
        eprintln!("violation: {v}");
    }
    Ok(if violations.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn jobs(b: &BatchArgs) -> Result<Vec<Job>> {
    let from_files = |paths: Vec<PathBuf>| -> Result<Vec<Job>> {
        paths
            .into_iter()
            .map(|path| {
                let instance = load_instance(&path, b.dialect, None)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(Job { path, set: None, instance })
            })
            .collect()
    };
    if let Some(set) = &b.set {
        let sets = expand_set(set);
        if sets.is_empty() {
            bail!("unknown set `{set}`");
        }
        let mut out = Vec::new();
        for s in sets {
            out.extend(discover_set(&b.data, &s).with_context(|| {
                format!("loading set {} from {}", s.name, b.data.join(s.name).display())
            })?);
        }
        Ok(out)
    } else if let Some(pattern) = &b.glob {
        let mut paths: Vec<PathBuf> = glob::glob(pattern)?.collect::<Result<_, _>>()?;
        paths.sort();
        from_files(paths)
    } else if !b.instance.is_empty() {
        from_files(b.instance.clone())
    } else {
        bail!("one of --set, --glob or --instance is required")
    }
}

fn policy(search: &SearchArgs) -> TimePolicy {
    match search.time {
        Some(t) => TimePolicy::Fixed(Duration::from_secs_f64(t.max(0.0))),
        None => TimePolicy::BySize,
    }
}

fn cmd_run(a: RunArgs) -> Result<ExitCode> {
    let table = match &a.bks {
        Some(path) => BksTable::load(path)?,
        None => BksTable::bundled(),
    };
    let jobs = jobs(&a.batch)?;
    if jobs.is_empty() {
        bail!("no instances found");
    }
    let p = params(&a.batch.search)?;
    let report = run_batch(&jobs, a.batch.runs as usize, &p, policy(&a.batch.search), a.batch.jobs, &table)?;
    print!("{report}");
    if let Some(path) = &a.report {
        std::fs::write(path, report.to_csv()?)?;
    }
    if let Some(path) = &a.json {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    for r in report.instances.iter().filter(|r| r.beats_proven_optimum()) {
        eprintln!("error: {} undercuts its proven optimum", r.instance);
    }
    Ok(if report.all_ok() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let inst = load(&a.instance, &a.inst)?;
    let text = std::fs::read_to_string(&a.solution).with_context(|| format!("reading {}", a.solution.display()))?;
    let (sol, stated) = parse_solution(&inst, &text)?;
    if !sol.instance_name.is_empty() && sol.instance_name != inst.name {
        bail!("solution is for `{}`, instance is `{}`", sol.instance_name, inst.name);
    }
    let cost = evaluate(&inst, &sol);
    println!("cost {cost:.2}");
    if let Some(s) = stated {
        if (s - cost).abs() > 0.005 {
            println!("stated cost {s:.2} differs");
        }
    }
    let violations = check_feasibility(&inst, &sol);
    if violations.is_empty() {
        println!("feasible");
        Ok(ExitCode::SUCCESS)
    } else {
        for v in &violations {
            println!("{v}");
        }
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_ablate(a: AblateArgs) -> Result<ExitCode> {
    let toggles = a
        .disable
        .iter()
        .flat_map(|s| s.split(','))
        .filter(|s| !s.trim().is_empty())
        .map(str::parse::<Toggle>)
        .collect::<Result<Vec<_>, _>>()?;
    let jobs = jobs(&a.batch)?;
    if jobs.is_empty() {
        bail!("no instances found");
    }
    let p = params(&a.batch.search)?;
    let report = ablate(&jobs, a.batch.runs as usize, &p, policy(&a.batch.search), a.batch.jobs, &toggles)?;
    print!("{report}");
    if let Some(path) = &a.json {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Run(a) => cmd_run(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Ablate(a) => cmd_ablate(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}
