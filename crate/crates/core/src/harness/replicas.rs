use rayon::prelude::*;

use crate::rng::{derive_seed, RandomStream};

/// Degree of replica parallelism. Results never depend on it.
#[derive(Debug)]
pub enum Workers {
    Serial,
    Pool(rayon::ThreadPool),
}

impl Workers {
    /// `0` means all available cores; `1` runs on the calling thread.
    pub fn new(count: usize) -> Self {
        let count = if count == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            count
        };
        if count <= 1 {
            return Workers::Serial;
        }
        match rayon::ThreadPoolBuilder::new().num_threads(count).build() {
            Ok(pool) => Workers::Pool(pool),
            Err(_) => Workers::Serial,
        }
    }

    pub fn count(&self) -> usize {
        match self {
            Workers::Serial => 1,
            Workers::Pool(p) => p.current_num_threads(),
        }
    }

    /// Maps `f` over `0..n`, returning results in index order.
    pub fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Workers::Serial => (0..n).map(f).collect(),
            Workers::Pool(pool) => pool.install(|| (0..n).into_par_iter().map(f).collect()),
        }
    }
}

/// Runs `task` for replicas `0..n`; replica `i` gets the stream seeded by
/// `seed_of(i)`.
pub fn run_replicas_seeded<T, S, F>(n: usize, workers: &Workers, seed_of: S, task: F) -> Vec<T>
where
    T: Send,
    S: Fn(usize) -> u64 + Sync + Send,
    F: Fn(usize, &mut RandomStream) -> T + Sync + Send,
{
    workers.map(n, |i| task(i, &mut RandomStream::new(seed_of(i))))
}

/// Runs `task` for replicas `0..n`; replica `i` gets the stream derived from
/// `(base_seed, i)`.
pub fn run_replicas<T, F>(n: usize, base_seed: u64, workers: &Workers, task: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut RandomStream) -> T + Sync + Send,
{
    run_replicas_seeded(n, workers, |i| derive_seed(base_seed, &[i as u64]), task)
}
