//! Chunked execution of generation and aggregation work.
//!
//! Work is always expressed as an ordered list of independent chunk tasks;
//! the executor only decides whether the chunks run on the current thread
//! or on a rayon pool. Results come back in chunk order either way, which
//! together with the per-chunk RNG streams makes every survey bit-identical
//! for any thread count.
//!
//! Built without the `parallel` feature, only the sequential path exists
//! and any requested thread count degrades to it.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExecError {
    #[cfg(feature = "parallel")]
    #[error("failed to build thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("execution error: {0}")]
    Other(String),
}

pub enum Executor {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel(rayon::ThreadPool),
}

impl Executor {
    pub fn sequential() -> Self {
        Executor::Sequential
    }

    /// `1` means sequential; `0` means one worker per core (parallel builds)
    /// or sequential (sequential builds); any other value is an explicit
    /// worker count.
    pub fn with_threads(threads: usize) -> Result<Self, ExecError> {
        #[cfg(feature = "parallel")]
        {
            if threads == 1 {
                return Ok(Executor::Sequential);
            }
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
            Ok(Executor::Parallel(pool))
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = threads;
            Ok(Executor::Sequential)
        }
    }

    /// Runs `work` over every input, returning outputs in input order.
    pub fn run<I, T, F>(&self, inputs: Vec<I>, work: F) -> Vec<T>
    where
        I: Send,
        T: Send,
        F: Fn(I) -> T + Sync + Send,
    {
        match self {
            Executor::Sequential => inputs.into_iter().map(work).collect(),
            #[cfg(feature = "parallel")]
            Executor::Parallel(pool) => {
                use rayon::prelude::*;
                pool.install(|| inputs.into_par_iter().map(work).collect())
            }
        }
    }
}
