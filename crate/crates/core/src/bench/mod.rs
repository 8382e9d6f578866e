//! Benchmark orchestration: instance ensembles on disk, plan execution with a
//! run ledger, and the analysis pipeline.
//!
//! Output layout under a run directory:
//!
//! ```text
//! instances/manifest.json          ensemble manifest with SHA-256 per file
//! instances/n<k>/<instance_id>.json
//! plan.json                        copy of the executed plan
//! params/<solver>_<hash>.json      parameter sidecars
//! logs/<solver>_<hash>/worker-<w>.jsonl
//! ledger.jsonl                     completed cells with log offsets
//! meta/cost_model.json             wall-clock timings (not deterministic)
//! ```

pub mod analyze;
pub mod export;
pub mod gen;
pub mod ledger;
pub mod plan;
pub mod solve;
pub mod validate;

pub use analyze::{cmd_analyze, AnalysisOptions, AnalysisReport, FpExpr, GridSpec, TimeUnit};
pub use export::cmd_export;
pub use gen::{cmd_gen, Manifest, ManifestEntry};
pub use ledger::{CellKey, LogLine, RunLedger};
pub use plan::{BenchmarkPlan, Cell};
pub use solve::{cmd_solve, SolveOptions, SolveSummary};
pub use validate::{cmd_validate, ValidationSummary};

use std::fs;
use std::path::Path;

use crate::{Error, Result};

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let s = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&s).map_err(|e| Error::data(path, e.to_string()))
}
