//! Execution backends for the data-parallel loops.
//!
//! Work is always split into the same index space regardless of backend and
//! results are returned in index order, so reductions performed by the
//! caller are deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

#[allow(clippy::derivable_impls)]
impl Default for Backend {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Backend::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Backend::Sequential
        }
    }
}

impl Backend {
    /// Evaluates `f(i)` for `i in 0..n`, results in index order.
    pub fn map_range<U, F>(self, n: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        match self {
            Backend::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Backend::Parallel => (0..n).into_par_iter().map(f).collect(),
        }
    }

    /// Maps `f` over a slice, results in input order.
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self {
            Backend::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Backend::Parallel => items.par_iter().map(f).collect(),
        }
    }
}
