//! Data-parallel sweeps over all histories of a length and over seed
//! ranges. With the `parallel` feature (on by default) [`Mode::Parallel`]
//! runs on the rayon pool; without it every mode runs sequentially.

use std::ops::Range;

use crate::history::History;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Parallel,
    Sequential,
}

impl Default for Mode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Mode::Parallel
        } else {
            Mode::Sequential
        }
    }
}

fn map_range<T, F>(range: Range<u64>, mode: Mode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => {
            use rayon::prelude::*;
            range.into_par_iter().map(f).collect()
        }
        _ => range.map(f).collect(),
    }
}

/// `f` applied to each of the `2^len` histories, in index order.
pub fn map_histories<T, F>(len: usize, mode: Mode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(History) -> T + Sync + Send,
{
    assert!(len < 64, "exhaustive sweeps are limited to 63 bits");
    map_range(0..1u64 << len, mode, |k| f(History::from_index(k, len)))
}

/// The lowest-indexed history of length `len` satisfying `pred`.
pub fn find_history<F>(len: usize, mode: Mode, pred: F) -> Option<History>
where
    F: Fn(&History) -> bool + Sync + Send,
{
    assert!(len < 64, "exhaustive sweeps are limited to 63 bits");
    let range = 0..1u64 << len;
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => {
            use rayon::prelude::*;
            range
                .into_par_iter()
                .map(|k| History::from_index(k, len))
                .find_first(|h| pred(h))
        }
        _ => range.map(|k| History::from_index(k, len)).find(|h| pred(h)),
    }
}

/// `f` applied to every seed in `seeds`, in order.
pub fn map_seeds<T, F>(seeds: Range<u64>, mode: Mode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    map_range(seeds, mode, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let a = map_histories(6, Mode::Parallel, |h| h.count(crate::history::Bit::Plus));
        let b = map_histories(6, Mode::Sequential, |h| h.count(crate::history::Bit::Plus));
        assert_eq!(a, b);
        assert_eq!(a.iter().sum::<usize>(), 6 * 32);
        let first = find_history(5, Mode::Parallel, |h| h.to_string().starts_with("+-"));
        assert_eq!(
            first,
            find_history(5, Mode::Sequential, |h| h.to_string().starts_with("+-"))
        );
        assert_eq!(map_seeds(3..6, Mode::Parallel, |s| s * 2), vec![6, 8, 10]);
    }
}
