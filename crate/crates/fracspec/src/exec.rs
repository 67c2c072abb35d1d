//! Parallel executor over a dedicated rayon pool.

use fracspec_core::spectral::Executor;
use fracspec_core::Result;
use rayon::prelude::*;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "FRACSPEC_THREADS";

/// Runs per-mode tasks on a rayon pool. Results are collected in index
/// order, so output does not depend on scheduling.
#[derive(Debug)]
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// `threads = 0` lets rayon pick the number of logical CPUs.
    pub fn new(threads: usize) -> std::result::Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()?;
        Ok(Self { pool })
    }

    /// Pool sized by `FRACSPEC_THREADS` when set.
    pub fn from_env() -> std::result::Result<Self, String> {
        let threads = match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))?,
            Err(_) => 0,
        };
        Self::new(threads).map_err(|e| e.to_string())
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map(
        &self,
        n: usize,
        task: &(dyn Fn(usize) -> Result<Vec<f64>> + Sync),
    ) -> Result<Vec<Vec<f64>>> {
        self.pool
            .install(|| (0..n).into_par_iter().map(task).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fracspec_core::spectral::Sequential;

    #[test]
    fn matches_sequential_order() {
        let task = |i: usize| -> Result<Vec<f64>> { Ok(vec![i as f64, (i as f64).sqrt()]) };
        let par = RayonExecutor::new(4).unwrap().map(100, &task).unwrap();
        let seq = Sequential.map(100, &task).unwrap();
        assert_eq!(par, seq);
    }
}
