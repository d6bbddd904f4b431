//! Batch runs over benchmark sets, best-known-solution tables and reports.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{load_instance, Dialect};
use crate::lns::solve;
use crate::oracle::{exact_solve_within, TinyLimit};
use crate::params::{Params, Toggle};
use crate::solution::check_feasibility;
use crate::Instance;

const BUNDLED_BKS: &str = include_str!("../data/bks.csv");

/// Published results may sit marginally below a proven optimum because of
/// rounding; gaps down to this (in percent) are not flagged.
pub const OPTIMALITY_SLACK_PCT: f64 = 0.006;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BksEntry {
    pub set: String,
    pub instance: String,
    pub bks: f64,
    pub proven_optimal: bool,
}

#[derive(Debug, Clone, Default)]
pub struct BksTable {
    entries: Vec<BksEntry>,
}

impl BksTable {
    /// The table shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_csv(BUNDLED_BKS.as_bytes()).expect("bundled table is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    pub fn from_csv(reader: impl std::io::Read) -> Result<Self> {
        let mut entries = Vec::new();
        for row in csv::Reader::from_reader(reader).deserialize() {
            let e: BksEntry = row?;
            if e.bks.is_nan() || e.bks <= 0.0 {
                return Err(Error::Params(format!("non-positive BKS for {}/{}", e.set, e.instance)));
            }
            entries.push(e);
        }
        Ok(BksTable { entries })
    }

    pub fn entries(&self) -> &[BksEntry] {
        &self.entries
    }

    pub fn set(&self, set: &str) -> impl Iterator<Item = &BksEntry> {
        let set = set.to_owned();
        self.entries.iter().filter(move |e| e.set.eq_ignore_ascii_case(&set))
    }

    /// Looks an instance up by name. Without a set the name must be
    /// unambiguous. Purely numeric table names (Set 4) also match a file
    /// stem ending in that number.
    pub fn get(&self, set: Option<&str>, name: &str) -> Option<&BksEntry> {
        let pool: Vec<&BksEntry> = match set {
            Some(s) => self.set(s).collect(),
            None => self.entries.iter().collect(),
        };
        let exact: Vec<&&BksEntry> = pool.iter().filter(|e| e.instance == name).collect();
        if exact.len() == 1 {
            return Some(exact[0]);
        }
        if set.is_some() {
            let digits: String = name
                .chars()
                .rev()
                .take_while(char::is_ascii_digit)
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .collect();
            if let Ok(n) = digits.parse::<u32>() {
                return pool
                    .into_iter()
                    .find(|e| e.instance.parse::<u32>().is_ok_and(|k| k == n));
            }
        }
        None
    }
}

/// How the files of a named benchmark set are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetInfo {
    pub name: &'static str,
    pub dialect: Dialect,
    pub per_satellite_cf: Option<bool>,
}

pub const SETS: [SetInfo; 13] = [
    SetInfo { name: "2a", dialect: Dialect::OrlibSet2And3, per_satellite_cf: None },
    SetInfo { name: "2b", dialect: Dialect::OrlibSet2And3, per_satellite_cf: None },
    SetInfo { name: "2c", dialect: Dialect::OrlibSet2And3, per_satellite_cf: None },
    SetInfo { name: "3a", dialect: Dialect::OrlibSet2And3, per_satellite_cf: None },
    SetInfo { name: "3b", dialect: Dialect::OrlibSet2And3, per_satellite_cf: None },
    SetInfo { name: "3c", dialect: Dialect::OrlibSet2And3, per_satellite_cf: None },
    SetInfo { name: "4a", dialect: Dialect::OrlibSet4, per_satellite_cf: Some(true) },
    SetInfo { name: "4b", dialect: Dialect::OrlibSet4, per_satellite_cf: Some(false) },
    SetInfo { name: "5", dialect: Dialect::Set5, per_satellite_cf: None },
    SetInfo { name: "6a", dialect: Dialect::Set6, per_satellite_cf: None },
    SetInfo { name: "6b", dialect: Dialect::Set6, per_satellite_cf: None },
    SetInfo { name: "Nguyen", dialect: Dialect::Nguyen, per_satellite_cf: None },
    SetInfo { name: "Prodhon", dialect: Dialect::Prodhon, per_satellite_cf: None },
];

pub fn set_info(name: &str) -> Option<SetInfo> {
    SETS.into_iter().find(|s| s.name.eq_ignore_ascii_case(name))
}

/// Expands a set name to its member names: `2` means 2a, 2b and 2c.
pub fn expand_set(name: &str) -> Vec<SetInfo> {
    match set_info(name) {
        Some(s) => vec![s],
        None => SETS
            .into_iter()
            .filter(|s| s.name.len() == name.len() + 1 && s.name.starts_with(name))
            .collect(),
    }
}

/// One instance scheduled for a batch.
#[derive(Debug, Clone)]
pub struct Job {
    pub path: PathBuf,
    pub set: Option<String>,
    pub instance: Instance,
}

/// Loads every file of a set from `<root>/<set>/`, sorted by file name.
pub fn discover_set(root: &Path, set: &SetInfo) -> Result<Vec<Job>> {
    let dir = root.join(set.name);
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let instance = load_instance(&path, Some(set.dialect), set.per_satellite_cf)?;
            Ok(Job {
                path,
                set: Some(set.name.to_owned()),
                instance,
            })
        })
        .collect()
}

/// Default budget: one minute up to 50 customers, fifteen beyond.
pub fn default_time(n_customers: usize) -> Duration {
    if n_customers <= 50 {
        Duration::from_secs(60)
    } else {
        Duration::from_secs(900)
    }
}

/// Reference value for a job: the table entry, or the exhaustive optimum
/// for instances small enough to enumerate.
pub fn reference(table: &BksTable, job: &Job) -> Option<BksEntry> {
    if let Some(e) = table.get(job.set.as_deref(), &job.instance.name) {
        return Some(e.clone());
    }
    let (opt, _) = exact_solve_within(&job.instance, TinyLimit::default()).ok()?;
    Some(BksEntry {
        set: job.set.clone().unwrap_or_default(),
        instance: job.instance.name.clone(),
        bks: opt,
        proven_optimal: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub seed: u64,
    pub cost: f64,
    pub wall_time: f64,
    pub time_to_best: f64,
    pub iterations: u64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub set: Option<String>,
    pub instance: String,
    pub runs: Vec<RunRow>,
    pub error: Option<String>,
    pub bks: Option<BksEntry>,
    pub avg: f64,
    pub best: f64,
    pub t_avg: f64,
    pub t_star_avg: f64,
    pub gap_avg: Option<f64>,
    pub gap_best: Option<f64>,
}

pub fn gap_pct(value: f64, bks: f64) -> f64 {
    100.0 * (value - bks) / bks
}

impl InstanceReport {
    /// Aggregates recomputed from the run rows.
    pub fn from_runs(set: Option<String>, instance: String, runs: Vec<RunRow>, bks: Option<BksEntry>) -> Self {
        let n = runs.len().max(1) as f64;
        let avg = runs.iter().map(|r| r.cost).sum::<f64>() / n;
        let best = runs.iter().map(|r| r.cost).fold(f64::INFINITY, f64::min);
        let t_avg = runs.iter().map(|r| r.wall_time).sum::<f64>() / n;
        let t_star_avg = runs.iter().map(|r| r.time_to_best).sum::<f64>() / n;
        let gap_avg = bks.as_ref().map(|b| gap_pct(avg, b.bks));
        let gap_best = bks.as_ref().map(|b| gap_pct(best, b.bks));
        InstanceReport {
            set,
            instance,
            runs,
            error: None,
            bks,
            avg,
            best,
            t_avg,
            t_star_avg,
            gap_avg,
            gap_best,
        }
    }

    fn failed(job: &Job, err: String) -> Self {
        let mut r = Self::from_runs(job.set.clone(), job.instance.name.clone(), Vec::new(), None);
        r.error = Some(err);
        r
    }

    /// Whether the best cost undercuts a proven optimum beyond rounding.
    pub fn beats_proven_optimum(&self) -> bool {
        matches!((&self.bks, self.gap_best), (Some(b), Some(g)) if b.proven_optimal && g < -OPTIMALITY_SLACK_PCT)
    }

    pub fn ok(&self) -> bool {
        self.error.is_none() && !self.runs.is_empty() && self.runs.iter().all(|r| r.feasible) && !self.beats_proven_optimum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSummary {
    pub set: String,
    pub instances: usize,
    pub avg: f64,
    pub best: f64,
    pub bks_avg: Option<f64>,
    pub gap_avg: Option<f64>,
    pub gap_best: Option<f64>,
    pub t_avg: f64,
    pub t_star_avg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub params: Params,
    pub runs_per_instance: usize,
    pub instances: Vec<InstanceReport>,
    pub sets: Vec<SetSummary>,
}

impl BatchReport {
    pub fn new(params: Params, runs_per_instance: usize, instances: Vec<InstanceReport>) -> Self {
        let mut groups: BTreeMap<String, Vec<&InstanceReport>> = BTreeMap::new();
        for r in instances.iter().filter(|r| r.error.is_none()) {
            groups.entry(r.set.clone().unwrap_or_else(|| "-".into())).or_default().push(r);
        }
        let sets = groups
            .into_iter()
            .map(|(set, rs)| {
                let n = rs.len() as f64;
                let mean = |f: &dyn Fn(&InstanceReport) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
                let bks_avg = rs
                    .iter()
                    .map(|r| r.bks.as_ref().map(|b| b.bks))
                    .sum::<Option<f64>>()
                    .map(|s| s / n);
                let avg = mean(&|r| r.avg);
                let best = mean(&|r| r.best);
                SetSummary {
                    set,
                    instances: rs.len(),
                    avg,
                    best,
                    bks_avg,
                    gap_avg: bks_avg.map(|b| gap_pct(avg, b)),
                    gap_best: bks_avg.map(|b| gap_pct(best, b)),
                    t_avg: mean(&|r| r.t_avg),
                    t_star_avg: mean(&|r| r.t_star_avg),
                }
            })
            .collect();
        BatchReport {
            params,
            runs_per_instance,
            instances,
            sets,
        }
    }

    pub fn all_ok(&self) -> bool {
        self.instances.iter().all(InstanceReport::ok)
    }

    /// One CSV row per run, per instance and per set.
    pub fn to_csv(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Row<'a> {
            kind: &'a str,
            set: &'a str,
            instance: &'a str,
            seed: Option<u64>,
            cost: Option<f64>,
            best: Option<f64>,
            t: Option<f64>,
            t_star: Option<f64>,
            bks: Option<f64>,
            gap_avg: Option<f64>,
            gap_best: Option<f64>,
            feasible: Option<bool>,
            error: Option<&'a str>,
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.instances {
            let set = r.set.as_deref().unwrap_or("-");
            for run in &r.runs {
                w.serialize(Row {
                    kind: "run",
                    set,
                    instance: &r.instance,
                    seed: Some(run.seed),
                    cost: Some(run.cost),
                    best: None,
                    t: Some(run.wall_time),
                    t_star: Some(run.time_to_best),
                    bks: None,
                    gap_avg: None,
                    gap_best: None,
                    feasible: Some(run.feasible),
                    error: None,
                })?;
            }
            w.serialize(Row {
                kind: "instance",
                set,
                instance: &r.instance,
                seed: None,
                cost: (!r.runs.is_empty()).then_some(r.avg),
                best: (!r.runs.is_empty()).then_some(r.best),
                t: Some(r.t_avg),
                t_star: Some(r.t_star_avg),
                bks: r.bks.as_ref().map(|b| b.bks),
                gap_avg: r.gap_avg,
                gap_best: r.gap_best,
                feasible: Some(r.ok()),
                error: r.error.as_deref(),
            })?;
        }
        for s in &self.sets {
            w.serialize(Row {
                kind: "set",
                set: &s.set,
                instance: "",
                seed: None,
                cost: Some(s.avg),
                best: Some(s.best),
                t: Some(s.t_avg),
                t_star: Some(s.t_star_avg),
                bks: s.bks_avg,
                gap_avg: s.gap_avg,
                gap_best: s.gap_best,
                feasible: None,
                error: None,
            })?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn opt_num(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.prec$}"))
}

impl fmt::Display for BatchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.runs_per_instance;
        writeln!(
            f,
            "{:<6} {:<26} {:>12} {:>12} {:>8} {:>8} {:>12} {:>8} {:>8}",
            "set",
            "instance",
            format!("Avg. {n}"),
            format!("Best {n}"),
            "t(s)",
            "t*(s)",
            "BKS",
            "gap avg",
            "gap best"
        )?;
        for r in &self.instances {
            let set = r.set.as_deref().unwrap_or("-");
            if let Some(e) = &r.error {
                writeln!(f, "{set:<6} {:<26} error: {e}", r.instance)?;
                continue;
            }
            let star = if r.bks.as_ref().is_some_and(|b| b.proven_optimal) { "*" } else { "" };
            writeln!(
                f,
                "{set:<6} {:<26} {:>12.2} {:>12.2} {:>8.1} {:>8.1} {:>11}{star:1} {:>8} {:>8}",
                r.instance,
                r.avg,
                r.best,
                r.t_avg,
                r.t_star_avg,
                opt_num(r.bks.as_ref().map(|b| b.bks), 2),
                opt_num(r.gap_avg, 3),
                opt_num(r.gap_best, 3),
            )?;
        }
        for s in &self.sets {
            writeln!(
                f,
                "{:<6} {:<26} {:>12.2} {:>12.2} {:>8.1} {:>8.1} {:>12} {:>8} {:>8}",
                s.set,
                format!("Avg. ({} instances)", s.instances),
                s.avg,
                s.best,
                s.t_avg,
                s.t_star_avg,
                opt_num(s.bks_avg, 2),
                opt_num(s.gap_avg, 3),
                opt_num(s.gap_best, 3),
            )?;
        }
        Ok(())
    }
}

/// Budget rule for a batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimePolicy {
    /// [`default_time`] by instance size.
    BySize,
    Fixed(Duration),
}

impl TimePolicy {
    pub fn for_instance(self, inst: &Instance) -> Duration {
        match self {
            TimePolicy::BySize => default_time(inst.n_customers()),
            TimePolicy::Fixed(d) => d,
        }
    }
}

/// Runs `runs` seeded solves per job (seed = base seed + run index) on
/// `threads` workers and aggregates them.
pub fn run_batch(
    jobs: &[Job],
    runs: usize,
    base: &Params,
    policy: TimePolicy,
    threads: usize,
    table: &BksTable,
) -> Result<BatchReport> {
    if runs == 0 {
        return Err(Error::Params("runs per instance must be at least 1".into()));
    }
    base.validate()?;
    let work: Vec<(usize, usize)> = (0..jobs.len()).flat_map(|j| (0..runs).map(move |r| (j, r))).collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, usize, Result<RunRow>)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..threads.max(1).min(work.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(j, r)) = work.get(k) else { break };
                let inst = &jobs[j].instance;
                let params = Params {
                    seed: base.seed.wrapping_add(r as u64),
                    time_max: policy.for_instance(inst),
                    ..base.clone()
                };
                let row = solve(inst, &params).map(|(sol, rep)| RunRow {
                    seed: params.seed,
                    cost: rep.cost,
                    wall_time: rep.wall_time,
                    time_to_best: rep.time_to_best,
                    iterations: rep.iterations,
                    feasible: check_feasibility(inst, &sol).is_empty(),
                });
                results.lock().expect("no worker panicked").push((j, r, row));
            });
        }
    });
    let mut results = results.into_inner().expect("no worker panicked");
    results.sort_by_key(|&(j, r, _)| (j, r));

    let mut per_job: Vec<Vec<Result<RunRow>>> = (0..jobs.len()).map(|_| Vec::new()).collect();
    for (j, _, row) in results {
        per_job[j].push(row);
    }
    let instances = jobs
        .iter()
        .zip(per_job)
        .map(|(job, rows)| match rows.into_iter().collect::<Result<Vec<_>>>() {
            Ok(rows) => InstanceReport::from_runs(job.set.clone(), job.instance.name.clone(), rows, reference(table, job)),
            Err(e) => InstanceReport::failed(job, e.to_string()),
        })
        .collect();
    Ok(BatchReport::new(base.clone(), runs, instances))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    /// `base` or the disabled operator's flag.
    pub config: String,
    pub avg: f64,
    /// Percentage change of the average cost against the base run.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub rows: Vec<AblationRow>,
    pub batches: Vec<BatchReport>,
}

impl fmt::Display for AblationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<14} {:>14} {:>9}", "config", "avg", "gap (%)")?;
        for r in &self.rows {
            writeln!(f, "{:<14} {:>14.2} {:>9.2}", r.config, r.avg, r.gap)?;
        }
        Ok(())
    }
}

/// Runs the base configuration and one configuration per toggle with that
/// operator disabled, on identical seeds.
pub fn ablate(
    jobs: &[Job],
    runs: usize,
    base: &Params,
    policy: TimePolicy,
    threads: usize,
    toggles: &[Toggle],
) -> Result<AblationReport> {
    let table = BksTable::default();
    let mean_cost = |b: &BatchReport| -> Result<f64> {
        if let Some(r) = b.instances.iter().find(|r| r.error.is_some()) {
            return Err(Error::InfeasibleInstance(format!(
                "{}: {}",
                r.instance,
                r.error.as_deref().unwrap_or_default()
            )));
        }
        Ok(b.instances.iter().map(|r| r.avg).sum::<f64>() / b.instances.len().max(1) as f64)
    };
    let base_batch = run_batch(jobs, runs, base, policy, threads, &table)?;
    let base_avg = mean_cost(&base_batch)?;
    let mut rows = vec![AblationRow {
        config: "base".into(),
        avg: base_avg,
        gap: 0.0,
    }];
    let mut batches = vec![base_batch];
    for &t in toggles {
        let params = Params {
            disabled: base.disabled.with(t),
            ..base.clone()
        };
        let batch = run_batch(jobs, runs, &params, policy, threads, &table)?;
        let avg = mean_cost(&batch)?;
        rows.push(AblationRow {
            config: t.flag().into(),
            avg,
            gap: gap_pct(avg, base_avg),
        });
        batches.push(batch);
    }
    Ok(AblationReport { rows, batches })
}
