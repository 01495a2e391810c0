//! Execution switch for the data-parallel loops of the crate.
//!
//! Every sweep, Monte-Carlo batch and bound scan goes through the helpers in
//! this module. With the `parallel` feature (on by default) the
//! [`Execution::Parallel`] mode dispatches to rayon; without it both modes run
//! the plain sequential loop. Results never depend on the mode: maps keep input
//! order and reductions are only ever given associative, commutative combiners.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a data-parallel loop is executed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when this mode will actually use the thread pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Order-preserving map over an index range.
pub fn map_range<R, F>(exec: Execution, range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return range.into_par_iter().map(f).collect();
    }
    let _ = exec;
    range.map(f).collect()
}

/// Map every index of `range` to a value and combine the values with `reduce`.
///
/// `reduce` must be associative and commutative with `identity` as neutral
/// element, otherwise the parallel result is not reproducible.
pub fn map_reduce<A, M, R, I>(exec: Execution, range: Range<u64>, identity: I, map: M, reduce: R) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    M: Fn(u64) -> A + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return range.into_par_iter().map(map).reduce(identity, reduce);
    }
    let _ = exec;
    range.map(map).fold(identity(), reduce)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(Execution::Sequential, &xs, |x| x * x);
        let b = map(Execution::Parallel, &xs, |x| x * x);
        assert_eq!(a, b);
        let s = map_reduce(Execution::Sequential, 0..1000, || 0u64, |x| x, |a, b| a + b);
        let p = map_reduce(Execution::Parallel, 0..1000, || 0u64, |x| x, |a, b| a + b);
        assert_eq!(s, p);
        assert_eq!(s, 499_500);
        assert_eq!(
            map_range(Execution::Parallel, 0..10, |i| i + 1),
            (1..11).collect::<Vec<_>>()
        );
    }
}
