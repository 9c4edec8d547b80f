// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the helpers use rayon when asked to; without
//! it they always run sequentially. Both paths visit the same elements with
//! the same per-element work, so results are identical.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether data-parallel execution is compiled in.
pub const fn available() -> bool {
    cfg!(feature = "parallel")
}

/// Calls `f(lo_index, lo, hi)` for every amplitude pair that differs only in
/// bit `bit`, where `lo` has the bit clear.
pub fn for_each_pair<T, F>(data: &mut [T], bit: usize, parallel: bool, f: F)
where
    T: Send,
    F: Fn(usize, &mut T, &mut T) + Sync,
{
    let stride = 1usize << bit;
    let block = stride * 2;
    #[cfg(feature = "parallel")]
    if parallel {
        data.par_chunks_mut(block).enumerate().for_each(|(ci, chunk)| {
            let (lo, hi) = chunk.split_at_mut(stride);
            let base = ci * block;
            lo.par_iter_mut()
                .zip(hi.par_iter_mut())
                .with_min_len(1 << 10)
                .enumerate()
                .for_each(|(j, (a, b))| f(base + j, a, b));
        });
        return;
    }
    let _ = parallel;
    for (ci, chunk) in data.chunks_mut(block).enumerate() {
        let (lo, hi) = chunk.split_at_mut(stride);
        let base = ci * block;
        for (j, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            f(base + j, a, b);
        }
    }
}

/// `(0..n).map(f).collect()`, in parallel when requested.
pub fn map_range<R, F>(n: usize, parallel: bool, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..n).map(f).collect()
}
