//! Data-parallel iteration helpers.
//!
//! Hot loops (Monte-Carlo paths, quadrature panels, per-gridpoint maps) go
//! through `map_indexed`, which runs on rayon when the `parallel` feature is
//! enabled and falls back to a plain sequential loop otherwise. Results are
//! collected in index order, so output is identical either way.

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Compensated (Kahan-Babuska-Neumaier) summation; used wherever parallel
/// partial results are reduced so the total does not depend on panel
/// granularity more than rounding allows.
pub(crate) fn kahan_sum<I: IntoIterator<Item = f64>>(items: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for x in items {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}
