//! Block-parallel replication driver.
//!
//! Replications are split into fixed-size blocks. Each block is reduced
//! sequentially and the block results are folded in block order, so the
//! floating-point result depends only on the replication count and never on
//! how rayon schedules the blocks.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::Result;

/// Replications per block.
pub(crate) const BLOCK: u64 = 4096;

/// Smallest replication count accepted by the Monte Carlo estimators.
pub const MIN_REPS: u64 = 1_000;

/// Runs `work` over `0..reps` in blocks and folds the per-block results in
/// order with `merge`.
pub(crate) fn run_blocks<A, W, M>(reps: u64, work: W, mut merge: M) -> Option<A>
where
    A: Send,
    W: Fn(Range<u64>) -> A + Sync,
    M: FnMut(A, A) -> A,
{
    let blocks = reps.div_ceil(BLOCK);
    let parts: Vec<A> = (0..blocks).into_par_iter().map(|b| work(b * BLOCK..((b + 1) * BLOCK).min(reps))).collect();
    let mut it = parts.into_iter();
    let first = it.next()?;
    Some(it.fold(first, &mut merge))
}

/// Runs `f` inside a dedicated pool of `workers` threads, or on the global
/// pool when `workers` is `None`.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build()?;
            Ok(pool.install(f))
        }
    }
}

/// Running sums for a sample mean and its standard error.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(self, o: Moments) -> Moments {
        Moments { n: self.n + o.n, sum: self.sum + o.sum, sum_sq: self.sum_sq + o.sum_sq }
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    /// Standard error of the mean (sample variance with n-1).
    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}
