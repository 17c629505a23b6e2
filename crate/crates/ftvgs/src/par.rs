//! Data-parallel map over trial/cell indices: rayon when the `parallel`
//! feature is enabled, plain iteration otherwise. Callers must only reduce
//! the results in order-independent ways (counts, maxima, keyed tables).

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T>(count: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..count).map(f).collect()
}
