//! Data-parallel execution of per-partition work.
//!
//! With the `parallel` feature (default) work items run on a bounded rayon
//! pool; without it, or for [`Executor::sequential`], they run in order on
//! the calling thread. Results always come back in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    pub fn sequential() -> Self {
        Executor {
            #[cfg(feature = "parallel")]
            pool: None,
        }
    }

    /// Pool of `workers` threads; `workers <= 1` means sequential.
    #[cfg(feature = "parallel")]
    pub fn parallel(workers: usize) -> Self {
        if workers <= 1 {
            return Self::sequential();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("bsp-worker-{i}"))
            .build()
            .expect("thread pool");
        Executor { pool: Some(pool) }
    }

    #[cfg(not(feature = "parallel"))]
    pub fn parallel(_workers: usize) -> Self {
        Self::sequential()
    }

    pub fn workers(&self) -> usize {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.current_num_threads();
        }
        1
    }

    /// Applies `f` to every item; returns after all items are done.
    pub fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.install(|| items.into_par_iter().map(f).collect());
        }
        items.into_iter().map(f).collect()
    }
}

impl Default for Executor {
    fn default() -> Self {
        Self::sequential()
    }
}
