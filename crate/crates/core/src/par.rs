//! Execution policy for data-parallel sweeps.
//!
//! Every sweep in the crate (frequency grids, seeded verification suites)
//! is an indexed map whose items are independent. [`Exec::Parallel`] runs
//! it on the rayon pool when the `parallel` feature is compiled in and
//! falls back to a plain loop otherwise, so results are identical and
//! ordered the same either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// True when this policy actually fans out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Maps `f` over `0..n`, returning results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Maps `f` over a slice, returning results in slice order.
    pub fn map_slice<I, T, F>(self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    /// Maximum of `f` over a slice (NaN-free inputs assumed); `0.0` when empty.
    pub fn max_over<I, F>(self, items: &[I], f: F) -> f64
    where
        I: Sync,
        F: Fn(&I) -> f64 + Sync + Send,
    {
        self.map_slice(items, f).into_iter().fold(0.0, f64::max)
    }
}
