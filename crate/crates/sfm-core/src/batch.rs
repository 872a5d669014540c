//! Batch execution helper. Independent work items (instances to solve,
//! subsets to evaluate) run across threads when the `parallel` feature is on
//! and the caller asks for it; the sequential path is always available so
//! the two can be compared.

#[cfg(feature = "parallel")]
pub fn map_batch<T, U, F>(items: Vec<T>, parallel: bool, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Send + Sync,
{
    use rayon::prelude::*;
    if parallel {
        items.into_par_iter().map(f).collect()
    } else {
        items.into_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_batch<T, U, F>(items: Vec<T>, _parallel: bool, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Send + Sync,
{
    items.into_iter().map(f).collect()
}

/// Whether batches run in parallel by default in this build.
pub fn default_parallelism() -> bool {
    cfg!(feature = "parallel")
}
