//! Per-node evaluation loops, parallel under the `parallel` feature.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn map_nodes<F>(n: usize, f: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Send + Sync,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_nodes<F>(n: usize, f: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Send + Sync,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn try_map_nodes<F>(n: usize, f: F) -> crate::Result<Vec<f64>>
where
    F: Fn(usize) -> crate::Result<f64> + Send + Sync,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn try_map_nodes<F>(n: usize, f: F) -> crate::Result<Vec<f64>>
where
    F: Fn(usize) -> crate::Result<f64> + Send + Sync,
{
    (0..n).map(f).collect()
}
