//! Data-parallel helpers. With the `parallel` feature these fan out over
//! the rayon pool; without it they run the same closures in order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `items.iter().map(f).collect()`, possibly in parallel. Output order
/// always matches input order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Folds `lo..hi` in chunks of `chunk` and merges the partial states.
/// `merge` must be associative for the result to be independent of how
/// chunks are scheduled; every caller merges exact integers.
pub fn fold_range<S, F, M>(lo: u64, hi: u64, chunk: u64, init: impl Fn() -> S + Sync + Send, fold: F, merge: M) -> S
where
    S: Send,
    F: Fn(S, u64) -> S + Sync + Send,
    M: Fn(S, S) -> S + Sync + Send,
{
    let chunk = chunk.max(1);
    let starts: Vec<u64> = (lo..hi).step_by(chunk as usize).collect();
    let run = |&start: &u64| {
        let end = (start + chunk).min(hi);
        (start..end).fold(init(), &fold)
    };
    #[cfg(feature = "parallel")]
    {
        starts.par_iter().map(run).reduce(&init, &merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        starts.iter().map(run).fold(init(), &merge)
    }
}

/// Whether this build fans work out over rayon.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_keeps_order() {
        let v: Vec<u64> = (0..1000).collect();
        let out = map(&v, |x| x * x);
        assert!(out.iter().enumerate().all(|(i, &y)| y == (i * i) as u64));
    }

    #[test]
    fn fold_range_sums() {
        let total = fold_range(1, 10_001, 97, || 0u64, |acc, n| acc + n, |a, b| a + b);
        assert_eq!(total, 10_000 * 10_001 / 2);
        let empty = fold_range(5, 5, 10, || 7u64, |acc, n| acc + n, |a, b| a + b - 7);
        assert_eq!(empty, 7);
    }
}
