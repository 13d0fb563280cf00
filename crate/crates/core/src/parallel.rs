//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature, [`Execution::Parallel`] fans work out over the
//! rayon pool; without it every call runs sequentially. Results always come
//! back in index order, so downstream left-to-right reductions produce the same
//! bits under either policy.

use serde::{Deserialize, Serialize};

/// How independent pieces of work are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    #[default]
    Sequential,
    Parallel,
}

/// Below this many items a parallel map runs inline.
const MIN_PARALLEL_ITEMS: usize = 64;

pub fn is_parallel_available() -> bool {
    cfg!(feature = "parallel")
}

/// Maps `f` over `0..count`, preserving order.
#[cfg(feature = "parallel")]
pub fn map_indexed<U, F>(exec: Execution, count: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Execution::Parallel if count >= MIN_PARALLEL_ITEMS => {
            (0..count).into_par_iter().with_min_len(MIN_PARALLEL_ITEMS / 4).map(f).collect()
        }
        _ => (0..count).map(f).collect(),
    }
}

/// Maps `f` over `0..count`, preserving order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<U, F>(_exec: Execution, count: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    let _ = MIN_PARALLEL_ITEMS;
    (0..count).map(f).collect()
}

/// Like [`map_indexed`] but without the small-input cutoff; for coarse work
/// items such as whole table rows.
#[cfg(feature = "parallel")]
pub fn map_items<T, U, F>(exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Execution::Parallel => items.par_iter().map(f).collect(),
        Execution::Sequential => items.iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_items<T, U, F>(_exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}
