//! Seed derivation for reproducible, order-independent random streams.

/// SplitMix64 finaliser.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into `master`; the same inputs always give the same seed.
pub fn derive(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix(master), |acc, p| mix(acc ^ mix(*p)))
}

/// FNV-1a hash of a label, for keying seeds by names.
pub fn label(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
