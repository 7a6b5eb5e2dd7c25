//! Budgets, verification modes and the worker pool.
//!
//! All parallel reductions here are order-stable: a search returns the match
//! with the smallest stream index and a minimisation breaks ties by index, so
//! results do not depend on the number of worker threads.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

/// How a "for every subspace" quantifier is discharged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exhaustive,
    /// `count` random subspaces from a ChaCha stream seeded with `seed`.
    /// Can refute but never certify.
    Sampled { count: u64, seed: u64 },
}

impl Mode {
    pub fn is_exhaustive(self) -> bool {
        matches!(self, Mode::Exhaustive)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exhaustive => write!(f, "exhaustive"),
            Mode::Sampled { count, seed } => write!(f, "sampled(count={count}, seed={seed})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// Maximum number of subspaces enumerated per dimension.
    pub enumeration_cap: u128,
    /// Maximum `D^t` for word powers.
    pub word_cap: u128,
    /// Maximum number of projective rank-one classes in a rank search.
    pub pool_cap: u128,
    /// Maximum `C(pool, r)` examined per rank level.
    pub combination_cap: u128,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            enumeration_cap: 100_000_000,
            word_cap: 1_000_000,
            pool_cap: 10_000,
            combination_cap: 100_000_000,
        }
    }
}

/// Budgets plus a dedicated worker pool.
#[derive(Clone)]
pub struct Config {
    pub budgets: Budgets,
    threads: usize,
    pool: Arc<ThreadPool>,
}

const CHUNK: usize = 2048;

impl Config {
    /// Panics if the thread pool cannot be created.
    pub fn new(threads: usize) -> Self {
        Config::with_budgets(threads, Budgets::default())
    }

    pub fn with_budgets(threads: usize, budgets: Budgets) -> Self {
        let threads = threads.max(1);
        let pool = ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("failed to build worker pool");
        Config {
            budgets,
            threads,
            pool: Arc::new(pool),
        }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> R {
        self.pool.install(op)
    }

    /// First item (by stream position) for which `check` returns `Some`.
    pub fn find_first<T, R, I, F>(&self, items: I, check: F) -> Option<(u64, T, R)>
    where
        T: Send + Sync,
        R: Send,
        I: Iterator<Item = T>,
        F: Fn(&T) -> Option<R> + Sync + Send,
    {
        let mut items = items.fuse();
        let mut base = 0u64;
        loop {
            let chunk: Vec<T> = items.by_ref().take(CHUNK).collect();
            if chunk.is_empty() {
                return None;
            }
            let hit = self.install(|| {
                chunk
                    .par_iter()
                    .enumerate()
                    .find_map_first(|(i, item)| check(item).map(|r| (i, r)))
            });
            if let Some((i, r)) = hit {
                let item = chunk.into_iter().nth(i).expect("index within chunk");
                return Some((base + i as u64, item, r));
            }
            base += chunk.len() as u64;
        }
    }

    /// Item minimising `key`; ties go to the earliest stream position.
    pub fn min_by_key<T, K, I, F>(&self, items: I, key: F) -> Option<(u64, T, K)>
    where
        T: Send + Sync,
        K: Ord + Send + Clone,
        I: Iterator<Item = T>,
        F: Fn(&T) -> K + Sync + Send,
    {
        let mut items = items.fuse();
        let mut base = 0u64;
        let mut best: Option<(u64, T, K)> = None;
        loop {
            let chunk: Vec<T> = items.by_ref().take(CHUNK).collect();
            if chunk.is_empty() {
                return best;
            }
            let len = chunk.len() as u64;
            let local = self.install(|| {
                chunk
                    .par_iter()
                    .enumerate()
                    .map(|(i, item)| (key(item), i))
                    .min()
            });
            if let Some((k, i)) = local {
                if best.as_ref().is_none_or(|(_, _, bk)| k < *bk) {
                    let item = chunk.into_iter().nth(i).expect("index within chunk");
                    best = Some((base + i as u64, item, k));
                }
            }
            base += len;
        }
    }
}

impl Default for Config {
    fn default() -> Self {
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
        Config::new(threads)
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Config")
            .field("budgets", &self.budgets)
            .field("threads", &self.threads)
            .finish()
    }
}
