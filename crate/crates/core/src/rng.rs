//! Reproducible random substreams and the partitioned interval driver.
//!
//! A run of `n` intervals is cut into fixed-length blocks of [`BLOCK_LEN`]
//! intervals. Block `b` always draws from the ChaCha8 stream `b` of the run
//! seed, so the random numbers consumed by any given interval do not depend
//! on how blocks are grouped into partitions. Partitions are contiguous block
//! ranges processed concurrently; each owns its own mutable state (detector
//! residuals, for instance) and produces a tally that is merged in partition
//! order afterwards.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{config_err, Result};

/// Number of intervals sharing one random substream.
pub const BLOCK_LEN: u64 = 1 << 14;

/// Random generator used for every Monte Carlo run.
pub type SimRng = ChaCha8Rng;

/// Returns the generator for substream `stream` of `seed`.
///
/// ChaCha is counter based: distinct streams never overlap, and the mapping
/// `(seed, stream) -> sequence` is fixed across platforms and releases of
/// `rand_chacha`.
pub fn substream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Splits `n_intervals` into `partitions` contiguous, block-aligned ranges.
///
/// The first ranges receive one extra block when the block count does not
/// divide evenly; trailing ranges may be empty when there are more
/// partitions than blocks.
pub fn partition_ranges(n_intervals: u64, partitions: usize) -> Result<Vec<Range<u64>>> {
    if partitions == 0 {
        return config_err("partition count must be at least 1");
    }
    let blocks = n_intervals.div_ceil(BLOCK_LEN);
    let parts = partitions as u64;
    let (base, extra) = (blocks / parts, blocks % parts);
    let mut ranges = Vec::with_capacity(partitions);
    let mut next_block = 0;
    for p in 0..parts {
        let len = base + u64::from(p < extra);
        let start = (next_block * BLOCK_LEN).min(n_intervals);
        let end = ((next_block + len) * BLOCK_LEN).min(n_intervals);
        ranges.push(start..end);
        next_block += len;
    }
    Ok(ranges)
}

/// Tally that can absorb the result of another partition.
pub trait Merge {
    fn merge(&mut self, other: Self);
}

/// Runs `step` once per interval across `partitions` concurrent partitions.
///
/// `init` builds the per-partition mutable state. `step` receives that state,
/// the generator positioned for the current interval, the global interval
/// index and the partition tally.
pub fn run_intervals<S, T, I, F>(
    seed: u64,
    n_intervals: u64,
    partitions: usize,
    init: I,
    step: F,
) -> Result<T>
where
    T: Default + Merge + Send,
    I: Fn() -> S + Sync,
    F: Fn(&mut S, &mut SimRng, u64, &mut T) + Sync,
{
    let ranges = partition_ranges(n_intervals, partitions)?;
    let tallies: Vec<T> = ranges
        .into_par_iter()
        .map(|range| {
            let mut state = init();
            let mut tally = T::default();
            let mut index = range.start;
            while index < range.end {
                let block = index / BLOCK_LEN;
                let block_end = ((block + 1) * BLOCK_LEN).min(range.end);
                let mut rng = substream(seed, block);
                for i in index..block_end {
                    step(&mut state, &mut rng, i, &mut tally);
                }
                index = block_end;
            }
            tally
        })
        .collect();
    let mut total = T::default();
    for t in tallies {
        total.merge(t);
    }
    Ok(total)
}

/// Number of partitions matching the available parallelism.
pub fn default_partitions() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}
