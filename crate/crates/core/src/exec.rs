//! Work distribution. With the `parallel` feature the helpers run on rayon;
//! without it, or with [`Parallelism::Sequential`], they run in order on the
//! calling thread. Callers only pass associative, commutative reductions, so
//! the result never depends on how work was split.

/// How many workers to use for a computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    /// rayon's global pool.
    #[default]
    Auto,
    /// A dedicated pool with this many threads.
    Threads(usize),
}

impl Parallelism {
    pub fn is_parallel_build() -> bool {
        cfg!(feature = "parallel")
    }
}

/// `reduce(identity, map(0), map(1), …, map(len - 1))`.
pub(crate) fn map_reduce<T, M, R>(len: u64, par: Parallelism, map: M, reduce: R) -> T
where
    T: Send + Default,
    M: Fn(u64) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let run = || {
            (0..len)
                .into_par_iter()
                .map(&map)
                .reduce(T::default, &reduce)
        };
        match par {
            Parallelism::Sequential => {}
            Parallelism::Auto => return run(),
            Parallelism::Threads(k) => {
                if let Some(pool) = pool(k) {
                    return pool.install(run);
                }
            }
        }
    }
    let _ = par;
    (0..len).map(map).fold(T::default(), reduce)
}

/// Order-preserving parallel map.
pub(crate) fn map_collect<I, T, F>(items: &[I], par: Parallelism, f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let run = || items.par_iter().map(&f).collect();
        match par {
            Parallelism::Sequential => {}
            Parallelism::Auto => return run(),
            Parallelism::Threads(k) => {
                if let Some(pool) = pool(k) {
                    return pool.install(run);
                }
            }
        }
    }
    let _ = par;
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
fn pool(threads: usize) -> Option<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .ok()
}
