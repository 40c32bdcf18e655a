use sha2::{Digest, Sha256};

/// Derives an RNG seed from the master seed, a purpose tag, and indices.
///
/// Stable across platforms and releases, so ledger entries replay anywhere.
pub fn derive_seed(master: u64, domain: &str, parts: &[u64]) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((domain.len() as u64).to_le_bytes());
    h.update(domain.as_bytes());
    for p in parts {
        h.update(p.to_le_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Short hex digest of arbitrary bytes.
pub fn short_hash(bytes: &[u8]) -> String {
    hex::encode(&Sha256::digest(bytes)[..8])
}
