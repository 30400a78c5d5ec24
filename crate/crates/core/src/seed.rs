//! Named sub-seeds, so that each consumer of randomness (weight
//! initialization, example shuffling, data generation) draws from its own
//! stream derived from a single run seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stable across platforms and releases (FNV-1a over the name, then a
/// splitmix64 finalizer mixed with `seed`).
pub fn sub_seed(seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn named_rng(seed: u64, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub_seed(seed, name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_separate_streams() {
        assert_eq!(sub_seed(7, "init"), sub_seed(7, "init"));
        assert_ne!(sub_seed(7, "init"), sub_seed(7, "shuffle"));
        assert_ne!(sub_seed(7, "init"), sub_seed(8, "init"));
    }
}
