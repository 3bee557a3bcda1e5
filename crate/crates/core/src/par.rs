//! Data-parallel helpers with a sequential fallback.
//!
//! Workloads here are embarrassingly parallel sweeps (identity checks over
//! basis words, batches of independent validation problems). With the
//! `parallel` feature the sweeps run on rayon; without it the same helpers
//! degrade to plain iteration, which keeps the engine usable on a single
//! thread and gives the bench suite a baseline to compare against.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving input order in the output.
pub fn map_vec<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Returns the first `Some` produced by `f` in input order, if any.
pub fn find_map_first<T, U, F>(items: Vec<T>, f: F) -> Option<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> Option<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.into_par_iter().filter_map(f).find_first(|_| true)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().find_map(f)
    }
}
