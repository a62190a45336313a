//! Crate-private helper for splitting an index range across scoped worker
//! threads. Results come back in range order, so merges are deterministic.

use std::ops::Range;

/// Splits `0..total` into at most `workers` contiguous ranges and runs `f`
/// on each in its own scoped thread (or inline when one worker suffices).
pub(crate) fn map_ranges<R, F>(total: u64, workers: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<u64>) -> R + Sync,
{
    let workers = workers.clamp(1, total.max(1).min(256) as usize);
    if workers == 1 {
        return vec![f(0..total)];
    }
    let chunk = total / workers as u64;
    let rem = total % workers as u64;
    let mut ranges = Vec::with_capacity(workers);
    let mut start = 0u64;
    for i in 0..workers as u64 {
        let len = chunk + u64::from(i < rem);
        ranges.push(start..start + len);
        start += len;
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|r| s.spawn(|| f(r)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covers_range_exactly_once() {
        for workers in [1usize, 2, 3, 7, 300] {
            for total in [0u64, 1, 5, 100] {
                let parts = map_ranges(total, workers, |r| r.sum::<u64>());
                let got: u64 = parts.iter().sum();
                assert_eq!(got, (0..total).sum::<u64>());
            }
        }
    }
}
