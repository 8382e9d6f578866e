use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{read_json, write_atomic, write_json};
use crate::hash::{derive_u64, sha256_hex};
use crate::instance::{generate_instance, InstanceBundle};
use crate::{Error, Result};

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub n: usize,
    /// Position within its size; part of every per-cell seed.
    pub index: usize,
    pub instance_id: String,
    /// Path relative to the manifest directory.
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub count: usize,
    pub sizes: Vec<usize>,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self> {
        read_json(&dir.join(MANIFEST))
    }

    /// Entries whose file content no longer matches its recorded hash.
    pub fn verify(&self, dir: &Path) -> Result<Vec<ManifestEntry>> {
        let mut bad = Vec::new();
        for e in &self.entries {
            let path = dir.join(&e.path);
            let bytes = fs::read(&path).map_err(|err| Error::io(&path, err))?;
            if sha256_hex(&bytes) != e.sha256 {
                bad.push(e.clone());
            }
        }
        Ok(bad)
    }

    pub fn size_of(&self, instance_id: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.instance_id == instance_id).map(|e| e.n)
    }
}

/// Seed of instance `index` of size `n` under ensemble seed `seed`.
pub fn instance_seed(seed: u64, n: usize, index: usize) -> u64 {
    derive_u64(&["instance", &seed.to_string(), &n.to_string(), &index.to_string()])
}

pub(crate) fn check_size(n: usize) -> Result<()> {
    if n < 8 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("size n = {n} must be even and ≥ 8")));
    }
    Ok(())
}

/// Writes `count` instances per size under `out/n<k>/` and the manifest.
/// Files are byte-identical across runs and thread counts.
pub fn cmd_gen(sizes: &[usize], count: usize, seed: u64, out: &Path) -> Result<Manifest> {
    if sizes.is_empty() || count == 0 {
        return Err(Error::InvalidParameter("need at least one size and count ≥ 1".into()));
    }
    for &n in sizes {
        check_size(n)?;
    }
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let jobs: Vec<(usize, usize)> = sizes.iter().flat_map(|&n| (0..count).map(move |i| (n, i))).collect();
    let entries = jobs
        .par_iter()
        .map(|&(n, index)| {
            let x = generate_instance(n / 2, instance_seed(seed, n, index))?;
            let bundle = InstanceBundle::from_xorsat(x);
            let json = bundle.to_json();
            let rel = PathBuf::from(format!("n{n}")).join(format!("{}.json", bundle.xorsat.instance_id));
            write_atomic(&out.join(&rel), json.as_bytes())?;
            Ok(ManifestEntry {
                n,
                index,
                instance_id: bundle.xorsat.instance_id.clone(),
                path: rel.to_string_lossy().replace('\\', "/"),
                sha256: sha256_hex(json.as_bytes()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        seed,
        count,
        sizes,
        entries,
    };
    write_json(&out.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_tiny_sizes() {
        let dir = tempfile::tempdir().unwrap();
        assert!(cmd_gen(&[6], 1, 0, dir.path()).is_err());
        assert!(cmd_gen(&[10, 15], 1, 0, dir.path()).is_err());
        assert!(cmd_gen(&[16], 0, 0, dir.path()).is_err());
    }

    #[test]
    fn writes_files_named_by_id() {
        let dir = tempfile::tempdir().unwrap();
        let m = cmd_gen(&[16, 12], 2, 5, dir.path()).unwrap();
        assert_eq!(m.sizes, vec![12, 16]);
        assert_eq!(m.entries.len(), 4);
        for e in &m.entries {
            let b = InstanceBundle::read(&dir.path().join(&e.path)).unwrap();
            assert_eq!(b.xorsat.instance_id, e.instance_id);
            assert_eq!(b.n(), e.n);
        }
        assert_eq!(Manifest::read(dir.path()).unwrap(), m);
        assert!(m.verify(dir.path()).unwrap().is_empty());
    }
}
