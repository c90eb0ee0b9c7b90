//! Data-parallel execution helpers.
//!
//! Work is split into chunks with boundaries that depend only on the item
//! count, never on the thread count. Callers fold the returned chunk values
//! in index order, so results are bit-identical whether the `parallel`
//! feature is on (rayon) or off (plain iteration), and for any pool size.

use std::ops::Range;

/// Fixed chunk boundaries for `n` items.
pub fn chunk_ranges(n: usize, chunk: usize) -> Vec<Range<usize>> {
    assert!(chunk > 0);
    (0..n.div_ceil(chunk))
        .map(|k| k * chunk..((k + 1) * chunk).min(n))
        .collect()
}

/// Map `f` over fixed chunks of `0..n`, results in chunk order.
#[cfg(feature = "parallel")]
pub fn map_chunks<T, F>(n: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync,
{
    use rayon::prelude::*;
    chunk_ranges(n, chunk).into_par_iter().map(f).collect()
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn map_chunks<T, F>(n: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync,
{
    map_chunks_seq(n, chunk, f)
}

/// Always-sequential variant; the benchmark suite compares this against
/// [`map_chunks`] on identical workloads.
pub fn map_chunks_seq<T, F>(n: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync,
{
    chunk_ranges(n, chunk).into_iter().map(f).collect()
}
