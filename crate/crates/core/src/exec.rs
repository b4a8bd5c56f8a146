//! Ordered chunked map with an optional rayon backend.
//!
//! Work is split into fixed-size chunks whose results come back in chunk
//! order, so a reduction over them is identical for any number of workers.

use std::ops::Range;

#[cfg(feature = "parallel")]
use crate::error::ChaosError;
use crate::error::Result;

/// Samples per work chunk; part of the reproducibility contract.
pub const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon's global pool. Without the `parallel` feature this runs
    /// sequentially.
    #[default]
    Parallel,
    /// Rayon with a dedicated pool of the given size.
    Workers(usize),
}

impl Execution {
    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

fn chunks(total: usize, chunk: usize) -> Vec<Range<usize>> {
    (0..total.div_ceil(chunk))
        .map(|c| c * chunk..((c + 1) * chunk).min(total))
        .collect()
}

/// Applies `f` to consecutive ranges covering `0..total` and returns the
/// results in range order.
pub fn map_chunks<T, F>(total: usize, chunk: usize, exec: Execution, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let ranges = chunks(total, chunk.max(1));
    match exec {
        Execution::Sequential => Ok(ranges.into_iter().map(f).collect()),
        Execution::Parallel => Ok(parallel_map(ranges, &f)),
        Execution::Workers(w) => in_pool(w, || parallel_map(ranges, &f)),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(ranges: Vec<Range<usize>>, f: &F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    use rayon::prelude::*;
    ranges.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(ranges: Vec<Range<usize>>, f: &F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    ranges.into_iter().map(f).collect()
}

#[cfg(feature = "parallel")]
fn in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ChaosError::WorkerPool(e.to_string()))?;
    Ok(pool.install(job))
}

#[cfg(not(feature = "parallel"))]
fn in_pool<T: Send>(_workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    Ok(job())
}
