//! Deterministic seed derivation.
//!
//! Every random stream in the workspace is a `ChaCha8Rng` seeded from a
//! value derived here. Derivation is FNV-1a over the base seed's
//! little-endian bytes followed by a textual tag, so independent components
//! (data synthesis, partitioning, per-node training, ...) get decorrelated
//! streams from one master seed without coordinating beyond the tag string.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over a byte slice.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Derive a stream seed from a base seed and a tag.
pub fn mix_seed(base: u64, tag: &str) -> u64 {
    let mut bytes = Vec::with_capacity(8 + tag.len());
    bytes.extend_from_slice(&base.to_le_bytes());
    bytes.extend_from_slice(tag.as_bytes());
    fnv1a(&bytes)
}

/// Derive a stream seed from a base seed, a tag, and an index (node id,
/// round number, ...).
pub fn mix_seed_n(base: u64, tag: &str, n: u64) -> u64 {
    let mut bytes = Vec::with_capacity(16 + tag.len());
    bytes.extend_from_slice(&base.to_le_bytes());
    bytes.extend_from_slice(tag.as_bytes());
    bytes.extend_from_slice(&n.to_le_bytes());
    fnv1a(&bytes)
}
