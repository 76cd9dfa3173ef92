//! Batch evaluation helpers.
//!
//! With the `parallel` feature the helpers fan out over rayon's global pool;
//! without it they are plain iterators. [`with_backend`] forces the
//! sequential path on the current thread, which the benches use to compare
//! both on one build.

use std::cell::Cell;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Sequential,
    Parallel,
}

thread_local! {
    static BACKEND: Cell<Backend> = const { Cell::new(default_backend()) };
}

const fn default_backend() -> Backend {
    if cfg!(feature = "parallel") {
        Backend::Parallel
    } else {
        Backend::Sequential
    }
}

/// Backend used by batch helpers called from this thread.
pub fn backend() -> Backend {
    BACKEND.with(Cell::get)
}

/// Run `f` with the given backend selected on this thread.
///
/// Selecting `Parallel` without the `parallel` feature still runs sequentially.
pub fn with_backend<R>(backend: Backend, f: impl FnOnce() -> R) -> R {
    let previous = BACKEND.with(|b| b.replace(backend));
    let out = f();
    BACKEND.with(|b| b.set(previous));
    out
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if backend() == Backend::Parallel {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Map then fold with an associative `merge`. Merge order follows slice order,
/// so non-commutative merges (ordered witness lists) stay deterministic.
pub fn map_reduce<T, A, F, M, I>(items: &[T], identity: I, f: F, merge: M) -> A
where
    T: Sync,
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&T) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if backend() == Backend::Parallel {
        return items.par_iter().map(f).reduce(&identity, &merge);
    }
    items.iter().map(f).fold(identity(), merge)
}

/// Order-preserving map over an index range.
pub fn map_range<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if backend() == Backend::Parallel {
        return (0..len).into_par_iter().map(f).collect();
    }
    (0..len).map(f).collect()
}
