//! Execution backends for the data-parallel loops.
//!
//! Work is always split into index ranges fixed by the caller and results
//! are returned in index order, so the backend never changes a result.

/// Where indexed work runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Sequential,
    /// Rayon pool with `workers` threads; `0` uses the global pool. Runs
    /// sequentially when built without the `parallel` feature.
    Parallel {
        workers: usize,
    },
}

impl Default for Backend {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Backend::Parallel { workers: 0 }
        } else {
            Backend::Sequential
        }
    }
}

impl Backend {
    /// `1` means sequential, `0` means all available cores.
    pub fn from_workers(workers: usize) -> Self {
        if workers == 1 {
            Backend::Sequential
        } else {
            Backend::Parallel { workers }
        }
    }

    /// Evaluate `f(0), ..., f(n - 1)` and return the results in order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Backend::Sequential => (0..n).map(f).collect(),
            Backend::Parallel { workers } => parallel_map(workers, n, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(workers: usize, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;

    let run = || (0..n).into_par_iter().map(&f).collect();
    if workers == 0 {
        return run();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(run),
        // a pool that cannot spawn still leaves the global one
        Err(_) => run(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(_workers: usize, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backends_agree() {
        let f = |i: usize| (i as f64).sqrt().sin();
        let seq = Backend::Sequential.map(1000, f);
        for workers in [0, 2, 3] {
            assert_eq!(Backend::Parallel { workers }.map(1000, f), seq);
        }
    }

    #[test]
    fn from_workers() {
        assert_eq!(Backend::from_workers(1), Backend::Sequential);
        assert_eq!(Backend::from_workers(4), Backend::Parallel { workers: 4 });
    }
}
