use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit id for an experiment label.
pub fn experiment_id(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Independent stream for `(seed, experiment, replica)`.
pub fn replica_rng(seed: u64, experiment: u64, replica: u64) -> ChaCha8Rng {
    let key = splitmix64(seed ^ splitmix64(experiment));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(replica);
    rng
}

/// Runs `f` for replicas `0..n` in parallel; results come back in replica order.
pub fn run_replicas<T, F>(n: u64, seed: u64, experiment: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, experiment, r);
            f(r, &mut rng)
        })
        .collect()
}
