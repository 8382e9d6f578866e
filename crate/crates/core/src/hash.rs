//! Stable content hashes used for instance ids, parameter hashes and derived seeds.

use sha2::{Digest, Sha256};

/// Lowercase hex of the first 16 bytes of the SHA-256 of `bytes`.
pub fn content_id(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    hex::encode(&digest[..16])
}

/// Full lowercase SHA-256 hex digest.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// 64-bit value derived from the SHA-256 of `parts` joined with a separator.
///
/// Used for per-cell seeds so that adding cells to a plan never perturbs the
/// seeds of existing ones.
pub fn derive_u64(parts: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update(p.as_bytes());
        hasher.update([0x1f]);
    }
    let digest = hasher.finalize();
    let mut word = [0u8; 8];
    word.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(word)
}
