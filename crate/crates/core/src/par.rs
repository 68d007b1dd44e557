//! Data-parallel helpers. With the `parallel` feature these dispatch to
//! rayon; without it they run the same closures sequentially.
//!
//! Only order-preserving maps and disjoint mutable chunks are offered, so
//! results are bitwise identical between the two builds and across thread
//! counts. Floating-point reductions stay sequential at the call site.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f` to consecutive mutable chunks of `data`, passing the chunk index.
pub(crate) fn for_each_chunk_mut<T, F>(data: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(chunk_len)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(chunk_len)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
}

/// Order-preserving map over a slice.
pub(crate) fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return items.iter().map(f).collect();
}

/// Order-preserving map over an index range.
pub(crate) fn map_range<U, F>(len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return (0..len).into_par_iter().map(f).collect();
    #[cfg(not(feature = "parallel"))]
    return (0..len).map(f).collect();
}

/// True when the crate was built with rayon support.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Run `f` on a pool of `threads` workers (the global pool when `None`).
/// Sequential builds ignore the count.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> crate::Result<R> {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| crate::Error::Config(format!("thread pool: {e}")))?;
        return Ok(pool.install(f));
    }
    let _ = threads;
    Ok(f())
}
