//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) these run on the current rayon
//! pool; without it they are plain loops. Every helper merges partial results in
//! index order, so outputs never depend on the number of worker threads.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every index of `range` and collects the results in order.
pub fn map_range<T, F>(range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        range.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.map(f).collect()
    }
}

/// Applies `f` to every element of `items` and collects the results in order.
pub fn map_slice<'a, S, T, F>(items: &'a [S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&'a S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Returns true if `pred` holds for every index in `range`.
pub fn all_range<F>(range: Range<u64>, pred: F) -> bool
where
    F: Fn(u64) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        range.into_par_iter().all(pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.into_iter().all(pred)
    }
}

/// Splits `range` into fixed-size chunks, folds each chunk sequentially with
/// `fold`, then merges the chunk results left to right with `merge`.
///
/// `init` must produce an identity element for `merge`. Chunk boundaries depend
/// only on `chunk`, never on the thread count.
pub fn fold_chunks<A, I, F, M>(range: Range<u64>, chunk: u64, init: I, fold: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, u64) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    fold_ranges(
        range,
        chunk,
        init,
        |acc, sub| {
            for i in sub {
                fold(acc, i);
            }
        },
        merge,
    )
}

/// Like [`fold_chunks`], but hands each whole chunk to `fold` at once.
pub fn fold_ranges<A, I, F, M>(range: Range<u64>, chunk: u64, init: I, fold: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, Range<u64>) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    let chunk = chunk.max(1);
    let len = range.end.saturating_sub(range.start);
    let chunks = len.div_ceil(chunk);
    let start = range.start;
    let end = range.end;
    let parts = map_range(0..chunks, |k| {
        let lo = start + k * chunk;
        let hi = (lo + chunk).min(end);
        let mut acc = init();
        fold(&mut acc, lo..hi);
        acc
    });
    parts.into_iter().fold(init(), merge)
}

/// Runs `f` with at most `threads` workers.
///
/// `threads == 0` uses the ambient pool. Without the `parallel` feature the
/// closure simply runs on the calling thread.
pub fn with_threads<R, F>(threads: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        if threads == 0 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

/// Number of worker threads available to the helpers in this module.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
