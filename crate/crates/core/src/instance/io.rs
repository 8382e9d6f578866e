//! JSON instance files (one instance per file).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ising::{to_ising, IsingInstance};
use super::qubo::{ising_to_qubo, QuboInstance};
use super::xorsat::{instance_content_id, Clause, XorsatInstance};
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingSection {
    pub h: Vec<i64>,
    pub j: Vec<(usize, usize, i64)>,
    pub ground_energy: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuboSection {
    pub q: Vec<(usize, usize, i64)>,
    pub offset: i64,
    pub ground_value: i64,
}

/// On-disk layout. Field order is the serialization order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format_version: u32,
    pub m: usize,
    pub n: usize,
    pub clauses: Vec<[usize; 4]>,
    pub planted: Vec<u8>,
    pub ising: IsingSection,
    pub qubo: QuboSection,
    pub seed: u64,
    pub instance_id: String,
    /// Clause pairs sharing two variables.
    pub shared_pairs: usize,
}

/// Native, Ising and QUBO forms of one instance.
#[derive(Clone, Debug)]
pub struct InstanceBundle {
    pub xorsat: XorsatInstance,
    pub ising: IsingInstance,
    pub qubo: QuboInstance,
}

impl InstanceBundle {
    pub fn from_xorsat(xorsat: XorsatInstance) -> Self {
        let ising = to_ising(&xorsat);
        let qubo = ising_to_qubo(&ising);
        InstanceBundle { xorsat, ising, qubo }
    }

    /// Reduced problem size.
    pub fn n(&self) -> usize {
        self.ising.n()
    }

    pub fn to_file(&self) -> InstanceFile {
        let x = &self.xorsat;
        InstanceFile {
            format_version: FORMAT_VERSION,
            m: x.m,
            n: self.ising.n(),
            clauses: x
                .clauses
                .iter()
                .map(|c| [c.vars[0], c.vars[1], c.vars[2], c.sign as usize])
                .collect(),
            planted: x.planted.clone(),
            ising: IsingSection {
                h: self.ising.h().to_vec(),
                j: self.ising.couplings().to_vec(),
                ground_energy: self.ising.ground_energy,
            },
            qubo: QuboSection {
                q: self.qubo.q.clone(),
                offset: self.qubo.offset,
                ground_value: self.qubo.ground_value,
            },
            seed: x.seed,
            instance_id: x.instance_id.clone(),
            shared_pairs: x.shared_pairs(),
        }
    }

    /// Rebuilds the bundle from the stored terms as they are on disk; no
    /// re-derivation, so corrupted terms stay visible to validation.
    pub fn from_file(file: InstanceFile) -> Result<Self> {
        let m = file.m;
        let clauses = file
            .clauses
            .iter()
            .map(|c| {
                if c[3] > 1 || c[..3].iter().any(|&v| v >= m) {
                    return Err(Error::InvalidParameter(format!("bad clause {c:?}")));
                }
                Ok(Clause {
                    vars: [c[0], c[1], c[2]],
                    sign: c[3] as u8,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let ising = IsingInstance::new(
            file.ising.h,
            file.ising.j,
            file.ising.ground_energy,
            (m..2 * m).collect(),
        )?;
        let qubo = QuboInstance {
            n: file.n,
            q: file.qubo.q,
            offset: file.qubo.offset,
            ground_value: file.qubo.ground_value,
        };
        let xorsat = XorsatInstance {
            m,
            clauses,
            planted: file.planted,
            seed: file.seed,
            instance_id: file.instance_id,
        };
        Ok(InstanceBundle { xorsat, ising, qubo })
    }

    /// Whether the stored id matches the content hash.
    pub fn id_matches_content(&self) -> bool {
        let x = &self.xorsat;
        x.instance_id == instance_content_id(x.m, &x.clauses, &x.planted)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(&self.to_file()).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: InstanceFile = serde_json::from_str(&text).map_err(|e| Error::data(path, e.to_string()))?;
        Self::from_file(file).map_err(|e| Error::data(path, e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::xorsat::generate_instance;

    #[test]
    fn roundtrip_preserves_everything() {
        let b = InstanceBundle::from_xorsat(generate_instance(10, 5).unwrap());
        let json = b.to_json();
        let back = InstanceBundle::from_file(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.xorsat, b.xorsat);
        assert_eq!(back.ising, b.ising);
        assert_eq!(back.qubo, b.qubo);
        assert_eq!(back.to_json(), json);
        assert!(back.id_matches_content());
    }

    #[test]
    fn field_order_and_layout() {
        let b = InstanceBundle::from_xorsat(generate_instance(4, 0).unwrap());
        let json = b.to_json();
        let keys = [
            "\"format_version\"",
            "\"m\"",
            "\"n\"",
            "\"clauses\"",
            "\"planted\"",
            "\"ising\"",
            "\"qubo\"",
            "\"seed\"",
            "\"instance_id\"",
        ];
        let pos: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["n"], 8);
        for e in v["ising"]["j"].as_array().unwrap() {
            assert!(e[0].as_u64().unwrap() < e[1].as_u64().unwrap());
        }
    }
}
