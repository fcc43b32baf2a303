//! Chunked data-parallel driver.
//!
//! Work is cut into chunks whose boundaries depend only on the problem, never
//! on the thread count, and chunk results come back in chunk order. Callers
//! reduce them sequentially, so every reduction is deterministic.

use std::cell::Cell;
use std::ops::Range;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Default number of indices per chunk for one-dimensional scans.
pub const DEFAULT_CHUNK: i64 = 4096;

/// Runs `f` with parallel execution disabled on the current thread.
///
/// With the `parallel` feature off this is the only mode anyway.
pub fn with_sequential<R>(f: impl FnOnce() -> R) -> R {
    let prev = FORCE_SEQUENTIAL.with(|c| c.replace(true));
    let out = f();
    FORCE_SEQUENTIAL.with(|c| c.set(prev));
    out
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.with(|c| c.get())
}

/// Splits `range` into consecutive chunks of at most `chunk` indices.
pub fn chunk_ranges(range: Range<i64>, chunk: i64) -> Vec<Range<i64>> {
    assert!(chunk > 0, "chunk size must be positive");
    let mut out = Vec::new();
    let mut lo = range.start;
    while lo < range.end {
        let hi = lo.saturating_add(chunk).min(range.end);
        out.push(lo..hi);
        lo = hi;
    }
    out
}

/// Maps `f` over `items`, returning results in input order.
pub fn map_ordered<I, T, F>(items: Vec<I>, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            use rayon::prelude::*;
            return items.into_par_iter().map(f).collect();
        }
    }
    items.into_iter().map(f).collect()
}

/// Maps `f` over fixed-size chunks of `range`, results in chunk order.
pub fn map_chunks<T, F>(range: Range<i64>, chunk: i64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<i64>) -> T + Sync + Send,
{
    map_ordered(chunk_ranges(range, chunk), f)
}
