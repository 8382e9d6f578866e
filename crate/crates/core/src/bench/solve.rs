use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gen::{cmd_gen, Manifest, MANIFEST};
use super::ledger::{LogLine, RunLedger};
use super::plan::{BenchmarkPlan, Cell};
use super::{read_json, write_json};
use crate::hash::sha256_hex;
use crate::instance::InstanceBundle;
use crate::solvers::SolverConfig;
use crate::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Overrides the plan's worker count.
    pub workers: Option<usize>,
    /// Continue a run directory that already holds logs.
    pub resume: bool,
    /// Execute at most this many pending cells, then stop.
    pub limit: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveSummary {
    pub planned: usize,
    pub already_done: usize,
    pub executed: usize,
    pub remaining: usize,
    /// Executed cells that ended with a solver error or failed verification.
    pub flagged_errors: usize,
}

/// Wall-clock cost per native step, kept apart from the deterministic logs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub entries: Vec<CostEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostEntry {
    pub solver_id: String,
    pub params_hash: String,
    pub n: usize,
    pub steps: u64,
    pub wall_ns: u64,
}

impl CostEntry {
    pub fn ns_per_step(&self) -> f64 {
        self.wall_ns as f64 / self.steps.max(1) as f64
    }
}

impl CostModel {
    pub const PATH: &'static str = "meta/cost_model.json";

    pub fn read(run_dir: &Path) -> Result<Self> {
        let p = run_dir.join(Self::PATH);
        if p.exists() {
            read_json(&p)
        } else {
            Ok(CostModel::default())
        }
    }

    pub fn ns_per_step(&self, solver_id: &str, params_hash: &str, n: usize) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.solver_id == solver_id && e.params_hash == params_hash && e.n == n)
            .map(CostEntry::ns_per_step)
    }

    fn add(&mut self, solver_id: &str, params_hash: &str, n: usize, steps: u64, wall_ns: u64) {
        match self
            .entries
            .iter_mut()
            .find(|e| e.solver_id == solver_id && e.params_hash == params_hash && e.n == n)
        {
            Some(e) => {
                e.steps += steps;
                e.wall_ns += wall_ns;
            }
            None => self.entries.push(CostEntry {
                solver_id: solver_id.into(),
                params_hash: params_hash.into(),
                n,
                steps,
                wall_ns,
            }),
        }
    }
}

pub(crate) fn series_dir(cfg: &SolverConfig) -> String {
    format!("{}_{}", cfg.solver_id(), cfg.params_hash())
}

fn run_cell(bundle: &InstanceBundle, cfg: &SolverConfig, cell: &Cell) -> (LogLine, u64) {
    let seed = cell.key.seed;
    let mut line = LogLine {
        solver_id: cfg.solver_id(),
        instance_id: cell.instance_id.clone(),
        seed,
        params_hash: cell.key.params_hash.clone(),
        steps: None,
        cutoff: cfg.cutoff(),
        success: false,
        per_step_cost_ns: None,
        flags: Vec::new(),
    };
    match cfg.run(bundle, seed) {
        Ok(rec) => {
            line.flags = rec.flags.clone();
            if rec.success && !rec.verify(bundle) {
                line.flags.push("verify_failed".into());
            } else {
                line.success = rec.success;
                line.steps = rec.steps_to_solution;
            }
            (line, rec.steps_run)
        }
        Err(e) => {
            line.flags.push(format!("error: {e}"));
            (line, 0)
        }
    }
}

fn ensure_instances(plan: &BenchmarkPlan, dir: &Path) -> Result<Manifest> {
    if dir.join(MANIFEST).exists() {
        return Manifest::read(dir);
    }
    cmd_gen(&plan.sizes, plan.instances_per_size, plan.instance_seed, dir)
}

fn load_bundles(
    manifest: &Manifest,
    plan: &BenchmarkPlan,
    dir: &Path,
) -> Result<HashMap<(usize, usize), InstanceBundle>> {
    plan.select(manifest)?
        .into_iter()
        .map(|e| {
            let path = dir.join(&e.path);
            let bytes = fs::read(&path).map_err(|err| Error::io(&path, err))?;
            if sha256_hex(&bytes) != e.sha256 {
                return Err(Error::data(&path, "content hash differs from manifest"));
            }
            let text = String::from_utf8(bytes).map_err(|err| Error::data(&path, err.to_string()))?;
            let file = serde_json::from_str(&text).map_err(|err| Error::data(&path, err.to_string()))?;
            Ok(((e.n, e.index), InstanceBundle::from_file(file)?))
        })
        .collect()
}

fn append(files: &mut HashMap<PathBuf, File>, path: PathBuf, bytes: &[u8]) -> Result<()> {
    if !files.contains_key(&path) {
        if let Some(d) = path.parent() {
            fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
        }
        let f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        files.insert(path.clone(), f);
    }
    let f = files.get_mut(&path).expect("opened above");
    f.write_all(bytes).map_err(|e| Error::io(&path, e))?;
    f.flush().map_err(|e| Error::io(&path, e))
}

/// Executes every pending cell of `plan`. Relative plan paths resolve
/// against `base`. Each worker appends to its own log file per solver
/// configuration; the ledger is rebuilt from the logs before and after.
pub fn cmd_solve(plan: &BenchmarkPlan, base: &Path, opts: &SolveOptions) -> Result<SolveSummary> {
    plan.validate()?;
    let workers = opts.workers.unwrap_or(plan.workers);
    if workers == 0 {
        return Err(Error::InvalidParameter("workers must be ≥ 1".into()));
    }
    let out = plan.out_dir(base);
    let logs = out.join("logs");
    let inst_dir = plan.instance_dir(base);
    let manifest = ensure_instances(plan, &inst_dir)?;
    let bundles = load_bundles(&manifest, plan, &inst_dir)?;
    let cells = plan.cells(&manifest)?;

    let ledger = RunLedger::rebuild(&logs, true)?;
    if !opts.resume && !ledger.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "{} already holds {} completed cells; pass resume to continue",
            out.display(),
            ledger.len()
        )));
    }

    write_json(&out.join("plan.json"), plan)?;
    for cfg in &plan.solvers {
        write_json(&out.join("params").join(format!("{}.json", series_dir(cfg))), cfg)?;
    }
    let index: BTreeMap<&str, usize> = manifest.entries.iter().map(|e| (e.instance_id.as_str(), e.n)).collect();
    write_json(&out.join("instance_index.json"), &index)?;

    let pending: Vec<&Cell> = cells.iter().filter(|c| !ledger.contains(&c.key)).collect();
    let already_done = cells.len() - pending.len();
    let batch: Vec<&Cell> = match opts.limit {
        Some(k) => pending.iter().copied().take(k).collect(),
        None => pending.clone(),
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    let results: Vec<(usize, u64, u64, bool)> = pool.install(|| {
        batch
            .par_iter()
            .map_init(HashMap::new, |files, cell| {
                let cfg = &plan.solvers[cell.solver];
                let bundle = &bundles[&(cell.n, cell.index)];
                let t0 = Instant::now();
                let (line, steps_run) = run_cell(bundle, cfg, cell);
                let ns = t0.elapsed().as_nanos() as u64;
                let worker = rayon::current_thread_index().unwrap_or(0);
                let path = logs.join(series_dir(cfg)).join(format!("worker-{worker}.jsonl"));
                append(files, path, line.to_jsonl().as_bytes())?;
                let errored = line
                    .flags
                    .iter()
                    .any(|f| f.starts_with("error") || f == "verify_failed");
                Ok((cell.solver, steps_run, ns, errored))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut cost = CostModel::read(&out)?;
    let mut flagged_errors = 0;
    for (cell, (si, steps, ns, errored)) in batch.iter().zip(&results) {
        let cfg = &plan.solvers[*si];
        cost.add(cfg.solver_id().as_str(), &cell.key.params_hash, cell.n, *steps, *ns);
        flagged_errors += usize::from(*errored);
    }
    write_json(&out.join(CostModel::PATH), &cost)?;

    let ledger = RunLedger::rebuild(&logs, false)?;
    ledger.write(&out.join("ledger.jsonl"))?;
    let remaining = cells.iter().filter(|c| !ledger.contains(&c.key)).count();
    Ok(SolveSummary {
        planned: cells.len(),
        already_done,
        executed: batch.len(),
        remaining,
        flagged_errors,
    })
}
