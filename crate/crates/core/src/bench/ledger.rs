use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::solvers::SolverId;
use crate::{Error, Result};

/// Identity of a plan cell.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub instance_id: String,
    pub solver_id: SolverId,
    pub params_hash: String,
    pub seed: u64,
}

/// One line of a run log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLine {
    pub solver_id: SolverId,
    pub instance_id: String,
    pub seed: u64,
    pub params_hash: String,
    pub steps: Option<u64>,
    pub cutoff: u64,
    pub success: bool,
    pub per_step_cost_ns: Option<f64>,
    pub flags: Vec<String>,
}

impl LogLine {
    pub fn key(&self) -> CellKey {
        CellKey {
            instance_id: self.instance_id.clone(),
            solver_id: self.solver_id,
            params_hash: self.params_hash.clone(),
            seed: self.seed,
        }
    }

    pub fn to_jsonl(&self) -> String {
        let mut s = serde_json::to_string(self).expect("log line serializes");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    #[serde(flatten)]
    pub key: CellKey,
    /// Log file relative to the log directory.
    pub file: String,
    pub offset: u64,
}

/// Index of completed cells, rebuilt by scanning the log files.
#[derive(Clone, Debug, Default)]
pub struct RunLedger {
    cells: BTreeMap<CellKey, (LedgerEntry, LogLine)>,
    /// Lines whose cell was already present earlier in the scan.
    pub duplicates: usize,
    /// Lines that could not be parsed.
    pub malformed: usize,
}

fn log_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    if !dir.exists() {
        return Ok(());
    }
    let rd = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in rd {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            log_files(&path, out)?;
        } else if path.extension().is_some_and(|x| x == "jsonl") {
            out.push(path);
        }
    }
    Ok(())
}

impl RunLedger {
    /// Scans every `*.jsonl` below `logs`. With `repair`, a trailing partial
    /// line left by an interrupted write is truncated away; otherwise it is
    /// skipped. The first occurrence of a cell wins.
    pub fn rebuild(logs: &Path, repair: bool) -> Result<Self> {
        let mut files = Vec::new();
        log_files(logs, &mut files)?;
        files.sort();
        let mut ledger = RunLedger::default();
        for path in files {
            let text = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            let complete = text.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
            if repair && complete < text.len() {
                let f = OpenOptions::new()
                    .write(true)
                    .open(&path)
                    .map_err(|e| Error::io(&path, e))?;
                f.set_len(complete as u64).map_err(|e| Error::io(&path, e))?;
            }
            let rel = path
                .strip_prefix(logs)
                .unwrap_or(&path)
                .to_string_lossy()
                .replace('\\', "/");
            let mut offset = 0usize;
            for raw in text[..complete].split_inclusive(|&b| b == b'\n') {
                let here = offset;
                offset += raw.len();
                let Ok(line) = serde_json::from_slice::<LogLine>(raw) else {
                    ledger.malformed += 1;
                    continue;
                };
                let key = line.key();
                if ledger.cells.contains_key(&key) {
                    ledger.duplicates += 1;
                    continue;
                }
                let entry = LedgerEntry {
                    key: key.clone(),
                    file: rel.clone(),
                    offset: here as u64,
                };
                ledger.cells.insert(key, (entry, line));
            }
        }
        Ok(ledger)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, key: &CellKey) -> bool {
        self.cells.contains_key(key)
    }

    pub fn entries(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.cells.values().map(|(e, _)| e)
    }

    /// Completed log lines in cell order.
    pub fn lines(&self) -> impl Iterator<Item = &LogLine> {
        self.cells.values().map(|(_, l)| l)
    }

    /// Writes the index as JSON Lines sorted by cell.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut s = String::new();
        for e in self.entries() {
            s += &serde_json::to_string(e)?;
            s.push('\n');
        }
        super::write_atomic(path, s.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn line(seed: u64) -> LogLine {
        LogLine {
            solver_id: SolverId::Qg,
            instance_id: "abc".into(),
            seed,
            params_hash: "h".into(),
            steps: Some(seed),
            cutoff: 100,
            success: true,
            per_step_cost_ns: None,
            flags: vec![],
        }
    }

    #[test]
    fn log_line_format() {
        let s = line(7).to_jsonl();
        assert_eq!(
            s,
            "{\"solver_id\":\"qg\",\"instance_id\":\"abc\",\"seed\":7,\"params_hash\":\"h\",\"steps\":7,\
             \"cutoff\":100,\"success\":true,\"per_step_cost_ns\":null,\"flags\":[]}\n"
        );
    }

    #[test]
    fn rescan_dedups_and_repairs() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("qg_h");
        fs::create_dir_all(&sub).unwrap();
        let a = sub.join("worker-0.jsonl");
        let b = sub.join("worker-1.jsonl");
        fs::write(&a, line(1).to_jsonl() + &line(2).to_jsonl()).unwrap();
        let mut partial = line(3).to_jsonl() + &line(1).to_jsonl();
        partial += "{\"solver_id\":\"qg\",\"inst";
        fs::write(&b, &partial).unwrap();

        let l = RunLedger::rebuild(dir.path(), false).unwrap();
        assert_eq!(l.len(), 3);
        assert_eq!(l.duplicates, 1);
        assert_eq!(fs::read_to_string(&b).unwrap(), partial);

        let l = RunLedger::rebuild(dir.path(), true).unwrap();
        assert_eq!(l.len(), 3);
        let repaired = fs::read_to_string(&b).unwrap();
        assert!(repaired.ends_with('\n'));
        let mut f = OpenOptions::new().append(true).open(&b).unwrap();
        f.write_all(line(4).to_jsonl().as_bytes()).unwrap();
        let l = RunLedger::rebuild(dir.path(), false).unwrap();
        assert_eq!((l.len(), l.malformed), (4, 0));

        let e = l.entries().find(|e| e.key.seed == 2).unwrap();
        assert_eq!(e.file, "qg_h/worker-0.jsonl");
        assert_eq!(e.offset as usize, line(1).to_jsonl().len());
    }
}
