//! Row-parallel execution helpers.
//!
//! Every parallel path in the crate goes through these functions. Work items
//! are independent and each writes only its own output slot, so the parallel
//! and sequential schedules produce bitwise-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution policy for data-parallel loops.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs sequentially.
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Calls `f(row_index, row)` for each `row_len`-sized chunk of `buf`.
pub fn for_each_row<F>(exec: Exec, buf: &mut [f64], row_len: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    if row_len == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        buf.par_chunks_mut(row_len).enumerate().for_each(|(i, row)| f(i, row));
        return;
    }
    let _ = exec;
    buf.chunks_mut(row_len).enumerate().for_each(|(i, row)| f(i, row));
}

/// Fallible variant of [`for_each_row`]. Returns the error of the lowest failing row.
pub fn try_for_each_row<F, E>(exec: Exec, buf: &mut [f64], row_len: usize, f: F) -> Result<(), E>
where
    F: Fn(usize, &mut [f64]) -> Result<(), E> + Sync + Send,
    E: Send,
{
    if row_len == 0 {
        return Ok(());
    }
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        let results: Vec<Result<(), E>> = buf
            .par_chunks_mut(row_len)
            .enumerate()
            .map(|(i, row)| f(i, row))
            .collect();
        return results.into_iter().collect();
    }
    let _ = exec;
    for (i, row) in buf.chunks_mut(row_len).enumerate() {
        f(i, row)?;
    }
    Ok(())
}

/// Maps `f` over `0..len`, preserving order.
pub fn map_indices<T, F>(exec: Exec, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}
