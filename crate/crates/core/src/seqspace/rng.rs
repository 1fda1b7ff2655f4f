//! Seeded, chunked random streams.
//!
//! Every Monte Carlo routine splits its work into fixed-size chunks; chunk
//! `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `i`. Chunks are
//! mapped in parallel and folded in index order, so output depends only on
//! the seed, never on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type StreamRng = ChaCha8Rng;

pub fn chunk_rng(seed: u64, chunk: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Run `work(rng, items)` over `total` items split into chunks of
/// `chunk_size`, returning per-chunk results in chunk order.
pub fn map_chunks<R, F>(total: u64, chunk_size: u64, seed: u64, work: F) -> Vec<R>
where
    R: Send,
    F: Fn(&mut StreamRng, u64) -> R + Sync,
{
    let chunks = total.div_ceil(chunk_size);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let items = chunk_size.min(total - c * chunk_size);
            work(&mut chunk_rng(seed, c), items)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn independent_of_thread_count() {
        let run =
            || map_chunks(10_000, 333, 42, |rng, items| (0..items).map(|_| rng.random::<u32>() as u64).sum::<u64>());
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(run);
        assert_eq!(single, many);
        assert_eq!(single.len(), 31);
    }

    #[test]
    fn streams_differ() {
        let a: u64 = chunk_rng(1, 0).random();
        let b: u64 = chunk_rng(1, 1).random();
        let c: u64 = chunk_rng(2, 0).random();
        assert!(a != b && a != c);
        assert_eq!(a, chunk_rng(1, 0).random::<u64>());
    }
}
