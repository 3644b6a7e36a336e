//! Data-parallel execution helpers.
//!
//! With the `parallel` feature (the default) these fan work out over the
//! rayon pool; without it they run sequentially. Both paths return results
//! in input order, so callers observe identical output either way — the
//! worker count is a throughput knob, never a semantics knob.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map over a slice, preserving input order.
#[cfg(feature = "parallel")]
pub fn ordered_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn ordered_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Map over indices 0..n, preserving index order.
#[cfg(feature = "parallel")]
pub fn ordered_map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn ordered_map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_map_preserves_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let ys = ordered_map(&xs, |x| x * 2);
        assert_eq!(ys, xs.iter().map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn ordered_map_indices_preserves_order() {
        assert_eq!(ordered_map_indices(4, |i| i + 1), vec![1, 2, 3, 4]);
    }
}
