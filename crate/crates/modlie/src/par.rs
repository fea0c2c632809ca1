//! Data-parallel helpers with a sequential fallback.
//!
//! With the `rayon` feature the maps below fan out over the global pool
//! unless parallelism has been switched off at runtime; without it they
//! run on the calling thread. Output order is always the input order.

use std::sync::atomic::{AtomicBool, Ordering};

static PARALLEL: AtomicBool = AtomicBool::new(true);

/// Enable or disable the parallel code paths at runtime.
pub fn set_parallel(on: bool) {
    PARALLEL.store(on, Ordering::SeqCst);
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "rayon") && PARALLEL.load(Ordering::SeqCst)
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "rayon")]
    {
        if parallel_enabled() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "rayon")]
    {
        if parallel_enabled() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}

/// Index of the first element for which `f` returns `Some`, with its value.
/// The result is the lowest such index regardless of scheduling.
pub fn find_first<R, F>(n: usize, f: F) -> Option<(usize, R)>
where
    R: Send,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "rayon")]
    {
        if parallel_enabled() {
            use rayon::prelude::*;
            return (0..n)
                .into_par_iter()
                .filter_map(|i| f(i).map(|r| (i, r)))
                .min_by_key(|(i, _)| *i);
        }
    }
    (0..n).find_map(|i| f(i).map(|r| (i, r)))
}
