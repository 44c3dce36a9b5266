//! Data-parallel map with a thread cap taken from `PAINLEVE_DS_THREADS`.

use rayon::prelude::*;

pub const THREADS_ENV: &str = "PAINLEVE_DS_THREADS";

pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|n| *n > 0)
}

/// `f(0..count)` in index order, whatever the scheduling.
pub fn par_map<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let run = || (0..count).into_par_iter().map(&f).collect();
    match thread_cap().and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(run),
        None => run(),
    }
}
