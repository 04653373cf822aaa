//! Order-preserving map over grid points, parallel when the `parallel`
//! feature is on. `NULLGEO_THREADS` caps the worker count.

pub const THREADS_ENV: &str = "NULLGEO_THREADS";

/// Worker cap from the environment; `None` when unset or unparsable.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

pub fn map_sequential<T: Sync, R>(items: &[T], f: impl Fn(usize, &T) -> R) -> Vec<R> {
    items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

/// Results come back in input order regardless of scheduling.
#[cfg(feature = "parallel")]
pub fn map_parallel<T: Sync, R: Send>(items: &[T], threads: Option<usize>, f: impl Fn(usize, &T) -> R + Sync) -> Vec<R> {
    use rayon::prelude::*;
    let run = || items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect();
    match threads {
        Some(1) => map_sequential(items, f),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_parallel<T: Sync, R: Send>(items: &[T], _threads: Option<usize>, f: impl Fn(usize, &T) -> R + Sync) -> Vec<R> {
    map_sequential(items, f)
}

/// Parallel map honoring [`THREADS_ENV`].
pub fn map_points<T: Sync, R: Send>(items: &[T], f: impl Fn(usize, &T) -> R + Sync) -> Vec<R> {
    map_parallel(items, thread_cap(), f)
}
