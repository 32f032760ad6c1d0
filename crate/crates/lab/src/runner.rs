//! Replicate-level parallelism with results returned in replicate order.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{config_err, LabResult};

pub struct Runner {
    pool: ThreadPool,
}

impl Runner {
    /// `threads = None` uses every available core.
    pub fn new(threads: Option<usize>) -> LabResult<Self> {
        let mut builder = ThreadPoolBuilder::new();
        if let Some(n) = threads {
            if n == 0 {
                return Err(config_err!("threads must be at least 1"));
            }
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| config_err!("cannot start worker pool: {e}"))?;
        Ok(Runner { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// `f(0), …, f(n−1)` in parallel, collected by index; the first error wins.
    pub fn map<T, E, F>(&self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(u64) -> Result<T, E> + Sync,
    {
        self.pool
            .install(|| (0..n as u64).into_par_iter().map(&f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_are_ordered() {
        let r = Runner::new(Some(4)).unwrap();
        let v: Vec<u64> = r.map(1000, |i| Ok::<_, ()>(i * i)).unwrap();
        assert!(v.iter().enumerate().all(|(i, &x)| x == (i * i) as u64));
        assert!(Runner::new(Some(0)).is_err());
    }
}
