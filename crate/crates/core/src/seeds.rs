//! Deterministic seed derivation. Every random stream in a run is derived
//! from the single configured seed plus a stable name, so stages can be
//! re-run independently.

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Sub-stream seed for a named stage or job.
pub fn derive(seed: u64, name: &str) -> u64 {
    splitmix64(seed ^ fnv1a(name.as_bytes()))
}

/// Sub-stream seed for an indexed unit of work (e.g. iteration, ant).
pub fn derive_indexed(seed: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(a)) ^ b)
}
