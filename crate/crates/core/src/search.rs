//! Enumeration caps and deterministic exhaustive-scan primitives.
//!
//! Every exhaustive check in this crate walks a canonically ordered space
//! (graphs by edge mask, profiles lexicographically by their graph masks) and
//! reports the violation with the smallest canonical index. Parallel scans
//! partition the index range into chunks and reduce to the minimum index, so
//! results are independent of the worker count.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use thiserror::Error;

/// Configurable limits on exhaustive searches. Defaults are sized for a
/// laptop; raise them on bigger machines.
#[derive(Clone, Debug)]
pub struct Caps {
    /// Unfiltered graph streams refuse above `2^max_unfiltered_graph_bits`
    /// graphs (`|V|^2 <= max_unfiltered_graph_bits`).
    pub max_unfiltered_graph_bits: u32,
    /// Property-filtered streams may push one vertex further.
    pub max_filtered_graph_bits: u32,
    /// Largest profile space an exhaustive scan will walk.
    pub max_profiles: u64,
    /// Largest valuation space a modal check will walk.
    pub max_valuations: u64,
    /// Neutral-rule enumeration covers `2^(2^n)` coalition families.
    pub max_family_agents: u32,
    /// Meta-property searches walk `3^(|V|^2)` restriction pairs; the
    /// default admits `|V| = 3`.
    pub max_meta_edge_bits: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_unfiltered_graph_bits: 12,
            max_filtered_graph_bits: 16,
            max_profiles: 1 << 27,
            max_valuations: 1 << 12,
            max_family_agents: 4,
            max_meta_edge_bits: 9,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{space} of size {size} exceeds the cap of {limit} ({hint})")]
pub struct CapExceeded {
    pub space: String,
    pub size: u128,
    pub limit: u128,
    pub hint: String,
}

impl CapExceeded {
    pub fn new(space: &str, size: u128, limit: u128, hint: &str) -> Self {
        CapExceeded {
            space: space.to_string(),
            size,
            limit,
            hint: hint.to_string(),
        }
    }
}

/// Size of the profile space `pool_len^n`, or `None` on overflow.
pub fn profile_space(pool_len: usize, n: usize) -> Option<u64> {
    let mut total: u64 = 1;
    for _ in 0..n {
        total = total.checked_mul(pool_len as u64)?;
    }
    Some(total)
}

/// Mixed-radix profile cursor: digit 0 is agent 1 and the most significant
/// digit, so ascending index order equals lexicographic order on the mask
/// sequence (the canonical profile order).
pub(crate) struct ProfileCursor<'a> {
    pool: &'a [u64],
    digits: Vec<usize>,
    masks: Vec<u64>,
}

impl<'a> ProfileCursor<'a> {
    pub fn new(pool: &'a [u64], n: usize, start_index: u64) -> Self {
        let mut digits = vec![0usize; n];
        let mut rem = start_index;
        let base = pool.len() as u64;
        for k in (0..n).rev() {
            digits[k] = (rem % base) as usize;
            rem /= base;
        }
        let masks = digits.iter().map(|&d| pool[d]).collect();
        ProfileCursor { pool, digits, masks }
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    /// Advances to the next profile; returns false past the end.
    pub fn advance(&mut self) -> bool {
        for k in (0..self.digits.len()).rev() {
            self.digits[k] += 1;
            if self.digits[k] < self.pool.len() {
                self.masks[k] = self.pool[self.digits[k]];
                return true;
            }
            self.digits[k] = 0;
            self.masks[k] = self.pool[0];
        }
        false
    }
}

/// Decodes profile index `idx` into the mask sequence.
pub(crate) fn profile_masks(pool: &[u64], n: usize, idx: u64) -> Vec<u64> {
    ProfileCursor::new(pool, n, idx).masks().to_vec()
}

const MIN_CHUNK: u64 = 1 << 12;

/// Scans profile indices `0..total` for the smallest index on which `check`
/// reports a finding. `check` must be pure.
pub(crate) fn scan_profiles_min<W, F>(
    pool: &[u64],
    n: usize,
    total: u64,
    check: F,
) -> Option<(u64, W)>
where
    W: Send,
    F: Fn(u64, &[u64]) -> Option<W> + Sync,
{
    if total == 0 {
        return None;
    }
    let threads = rayon::current_num_threads() as u64;
    let chunk = (total / (threads * 8)).max(MIN_CHUNK);
    let chunks = total.div_ceil(chunk);
    let best = AtomicU64::new(u64::MAX);

    (0..chunks)
        .into_par_iter()
        .filter_map(|c| {
            let start = c * chunk;
            if start > best.load(Ordering::Relaxed) {
                return None;
            }
            let end = (start + chunk).min(total);
            let mut cursor = ProfileCursor::new(pool, n, start);
            for idx in start..end {
                if let Some(w) = check(idx, cursor.masks()) {
                    best.fetch_min(idx, Ordering::Relaxed);
                    return Some((idx, w));
                }
                cursor.advance();
            }
            None
        })
        .min_by_key(|(idx, _)| *idx)
}

/// Folds over the whole profile space. `merge` must be associative and
/// commutative; chunk results are reduced in unspecified order.
pub(crate) fn scan_profiles_fold<A, Make, Fold, Merge>(
    pool: &[u64],
    n: usize,
    total: u64,
    make: Make,
    fold: Fold,
    merge: Merge,
) -> A
where
    A: Send,
    Make: Fn() -> A + Sync,
    Fold: Fn(&mut A, u64, &[u64]) + Sync,
    Merge: Fn(A, A) -> A + Sync + Send,
{
    let threads = rayon::current_num_threads() as u64;
    let chunk = (total / (threads * 8)).max(MIN_CHUNK);
    let chunks = total.div_ceil(chunk).max(1);

    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(total);
            let mut acc = make();
            if start < end {
                let mut cursor = ProfileCursor::new(pool, n, start);
                for idx in start..end {
                    fold(&mut acc, idx, cursor.masks());
                    cursor.advance();
                }
            }
            acc
        })
        .reduce_with(merge)
        .unwrap_or_else(make)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cursor_walks_lexicographically() {
        let pool = [0u64, 1, 2];
        let mut cursor = ProfileCursor::new(&pool, 2, 0);
        let mut seen = vec![cursor.masks().to_vec()];
        while cursor.advance() {
            seen.push(cursor.masks().to_vec());
        }
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[0], vec![0, 0]);
        assert_eq!(seen[1], vec![0, 1]);
        assert_eq!(seen[3], vec![1, 0]);
        assert_eq!(seen[8], vec![2, 2]);
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
    }

    #[test]
    fn start_index_decodes_correctly() {
        let pool = [10u64, 20, 30, 40];
        for idx in 0..64u64 {
            let direct = profile_masks(&pool, 3, idx);
            let mut cursor = ProfileCursor::new(&pool, 3, 0);
            for _ in 0..idx {
                cursor.advance();
            }
            assert_eq!(direct, cursor.masks());
        }
    }

    #[test]
    fn min_scan_finds_the_smallest_match() {
        let pool: Vec<u64> = (0..32).collect();
        // Violations at many indices; the scan must report the least one.
        let hit = scan_profiles_min(&pool, 3, 32 * 32 * 32, |idx, masks| {
            (masks[2] == 7 && idx > 1000).then_some(idx)
        });
        let (idx, w) = hit.unwrap();
        assert_eq!(idx, w);
        // First index > 1000 with last digit 7 in base 32.
        let expected = (1001..).find(|i| i % 32 == 7).unwrap();
        assert_eq!(idx, expected);
    }

    #[test]
    fn profile_space_overflow_is_detected() {
        assert_eq!(profile_space(3, 2), Some(9));
        assert!(profile_space(1 << 20, 4).is_none());
    }
}
