//! Thin switch between rayon data-parallel maps and plain iteration.
//!
//! Built with the `parallel` feature (the default), `batch_map(true, ..)`
//! runs on the rayon pool; without it, or with `parallel = false`, the same
//! call degrades to a sequential map producing positionally identical
//! results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn default_parallelism() -> bool {
    cfg!(feature = "parallel")
}

pub(crate) fn batch_map<T, R, F>(parallel: bool, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            return items.par_iter().map(&f).collect();
        }
    }
    let _ = parallel;
    items.iter().map(f).collect()
}
