use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::gen::{Manifest, MANIFEST};
use crate::instance::{validate_instance, InstanceBundle, InstanceReport};
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckCount {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FileReport {
    pub path: String,
    /// `None` when the file could not be read as an instance.
    pub report: Option<InstanceReport>,
    pub error: Option<String>,
}

impl FileReport {
    pub fn passed(&self) -> bool {
        self.report.as_ref().is_some_and(InstanceReport::passed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationSummary {
    pub files: Vec<FileReport>,
    pub checks: BTreeMap<String, CheckCount>,
    /// Manifest entries whose file hash changed; empty without a manifest.
    pub hash_mismatches: Vec<String>,
}

impl ValidationSummary {
    pub fn passed(&self) -> bool {
        self.hash_mismatches.is_empty() && self.files.iter().all(FileReport::passed)
    }

    pub fn failed_files(&self) -> Vec<&str> {
        self.files
            .iter()
            .filter(|f| !f.passed())
            .map(|f| f.path.as_str())
            .collect()
    }

    /// Plain-text pass/fail report.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let ok = self.files.iter().filter(|f| f.passed()).count();
        s += &format!(
            "instances: {} checked, {} passed, {} failed\n",
            self.files.len(),
            ok,
            self.files.len() - ok
        );
        for (name, c) in &self.checks {
            s += &format!("  {name:<26} pass {:>6}  fail {:>6}\n", c.passed, c.failed);
        }
        for f in &self.files {
            if let Some(e) = &f.error {
                s += &format!("FAIL {}: {e}\n", f.path);
            } else if let Some(r) = f.report.as_ref().filter(|r| !r.passed()) {
                for c in r.checks.iter().filter(|c| !c.passed) {
                    s += &format!("FAIL {}: {} ({})\n", f.path, c.name, c.detail.as_deref().unwrap_or(""));
                }
            }
        }
        for h in &self.hash_mismatches {
            s += &format!("FAIL manifest hash mismatch: {h}\n");
        }
        s += if self.passed() {
            "result: PASS\n"
        } else {
            "result: FAIL\n"
        };
        s
    }
}

fn collect_json(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let rd = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in rd {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            collect_json(&path, out)?;
        } else if path.extension().is_some_and(|x| x == "json") && path.file_name().is_some_and(|n| n != MANIFEST) {
            out.push(path);
        }
    }
    Ok(())
}

/// Validates every instance file below `dir` (or the single file `dir`) and
/// the manifest hashes when a manifest is present. Check failures are report
/// content, not errors.
pub fn cmd_validate(dir: &Path) -> Result<ValidationSummary> {
    let mut paths = Vec::new();
    if dir.is_file() {
        paths.push(dir.to_path_buf());
    } else {
        collect_json(dir, &mut paths)?;
    }
    paths.sort();
    let files: Vec<FileReport> = paths
        .iter()
        .map(|p| {
            let shown = p.strip_prefix(dir).unwrap_or(p).to_string_lossy().into_owned();
            match InstanceBundle::read(p) {
                Ok(b) => FileReport {
                    path: shown,
                    report: Some(validate_instance(&b)),
                    error: None,
                },
                Err(e) => FileReport {
                    path: shown,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let mut checks: BTreeMap<String, CheckCount> = BTreeMap::new();
    for r in files.iter().filter_map(|f| f.report.as_ref()) {
        for c in &r.checks {
            let e = checks.entry(c.name.to_string()).or_default();
            if c.passed {
                e.passed += 1;
            } else {
                e.failed += 1;
            }
        }
    }
    let hash_mismatches = if dir.is_dir() && dir.join(MANIFEST).exists() {
        Manifest::read(dir)?.verify(dir)?.into_iter().map(|e| e.path).collect()
    } else {
        Vec::new()
    };
    Ok(ValidationSummary {
        files,
        checks,
        hash_mismatches,
    })
}
