use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::gen::{check_size, Manifest, ManifestEntry};
use super::ledger::CellKey;
use crate::hash::derive_u64;
use crate::solvers::SolverConfig;
use crate::{Error, Result};

fn default_instances_per_size() -> usize {
    100
}

fn default_workers() -> usize {
    1
}

/// A benchmark: instance ensemble, solver matrix and seed policy. Relative
/// paths resolve against the directory holding the plan file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkPlan {
    pub sizes: Vec<usize>,
    #[serde(default = "default_instances_per_size")]
    pub instances_per_size: usize,
    /// Ensemble seed used when the instances still have to be generated.
    #[serde(default)]
    pub instance_seed: u64,
    pub solvers: Vec<SolverConfig>,
    /// Independent executions per (instance, solver configuration).
    pub runs_per_instance: usize,
    pub master_seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    pub out: PathBuf,
    /// Instance directory; defaults to `<out>/instances`.
    #[serde(default)]
    pub instances: Option<PathBuf>,
}

/// One unit of work; fully determined by its fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub index: usize,
    pub instance_id: String,
    pub solver: usize,
    pub replica: usize,
    pub key: CellKey,
}

/// `derive_u64` over the cell coordinates; adding sizes, instances, solver
/// configurations or runs never changes the seed of an existing cell.
pub fn cell_seed(master: u64, n: usize, index: usize, config: &SolverConfig, replica: usize) -> u64 {
    derive_u64(&[
        "cell",
        &master.to_string(),
        &n.to_string(),
        &index.to_string(),
        config.solver_id().as_str(),
        &config.params_hash(),
        &replica.to_string(),
    ])
}

impl BenchmarkPlan {
    pub fn read(path: &Path) -> Result<Self> {
        super::read_json(path)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidParameter("plan lists no sizes".into()));
        }
        for &n in &self.sizes {
            check_size(n)?;
        }
        if self.instances_per_size == 0 || self.runs_per_instance == 0 || self.workers == 0 {
            return Err(Error::InvalidParameter(
                "instances_per_size, runs_per_instance and workers must be ≥ 1".into(),
            ));
        }
        if self.solvers.is_empty() {
            return Err(Error::InvalidParameter("plan lists no solvers".into()));
        }
        let mut seen = BTreeSet::new();
        for s in &self.solvers {
            s.validate()?;
            if !seen.insert(s.params_hash()) {
                return Err(Error::InvalidParameter(format!(
                    "solver configuration {} listed twice",
                    s.params_hash()
                )));
            }
        }
        Ok(())
    }

    pub fn out_dir(&self, base: &Path) -> PathBuf {
        base.join(&self.out)
    }

    pub fn instance_dir(&self, base: &Path) -> PathBuf {
        match &self.instances {
            Some(p) => base.join(p),
            None => self.out_dir(base).join("instances"),
        }
    }

    /// Manifest entries the plan uses: the first `instances_per_size` of
    /// each planned size.
    pub fn select<'m>(&self, manifest: &'m Manifest) -> Result<Vec<&'m ManifestEntry>> {
        let mut out = Vec::new();
        for &n in &self.sizes {
            let mut of_size: Vec<_> = manifest.entries.iter().filter(|e| e.n == n).collect();
            of_size.sort_by_key(|e| e.index);
            if of_size.len() < self.instances_per_size {
                return Err(Error::InvalidParameter(format!(
                    "instance set has {} instances of size {n}, plan needs {}",
                    of_size.len(),
                    self.instances_per_size
                )));
            }
            out.extend(of_size.into_iter().take(self.instances_per_size));
        }
        Ok(out)
    }

    /// Every cell of the plan in a fixed order.
    pub fn cells(&self, manifest: &Manifest) -> Result<Vec<Cell>> {
        let mut cells = Vec::new();
        for e in self.select(manifest)? {
            for (si, cfg) in self.solvers.iter().enumerate() {
                let hash = cfg.params_hash();
                for r in 0..self.runs_per_instance {
                    cells.push(Cell {
                        n: e.n,
                        index: e.index,
                        instance_id: e.instance_id.clone(),
                        solver: si,
                        replica: r,
                        key: CellKey {
                            instance_id: e.instance_id.clone(),
                            solver_id: cfg.solver_id(),
                            params_hash: hash.clone(),
                            seed: cell_seed(self.master_seed, e.n, e.index, cfg, r),
                        },
                    });
                }
            }
        }
        Ok(cells)
    }
}
