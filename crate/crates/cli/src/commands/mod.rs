pub mod exp2;
pub mod fixpoint;
pub mod laws;
pub mod tf;
pub mod witness;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn budgets<const N: usize>(
    entries: [(&str, u64); N],
) -> std::collections::BTreeMap<String, u64> {
    entries
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}
