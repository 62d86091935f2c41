//! Execution strategy for the data-parallel loops in scoring and sweeps.
//!
//! Results are always collected in index order, so reductions performed by
//! the caller see the same sequence of values regardless of strategy or
//! thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Uses the current rayon pool. Without the `parallel` feature this
    /// runs sequentially.
    #[default]
    Parallel,
}

impl Exec {
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            #[cfg(not(feature = "parallel"))]
            Exec::Parallel => (0..n).map(f).collect(),
        }
    }

    pub fn try_map<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        self.map(n, f).into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_on_order() {
        let seq = Exec::Sequential.map(1000, |i| i * i);
        let par = Exec::Parallel.map(1000, |i| i * i);
        assert_eq!(seq, par);
    }

    #[test]
    fn try_map_reports_first_error_in_index_order() {
        let r: Result<Vec<usize>, usize> =
            Exec::Parallel.try_map(100, |i| if i % 7 == 3 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(3));
    }
}
