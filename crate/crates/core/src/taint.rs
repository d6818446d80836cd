//! Zero-execution taint inference.
//!
//! Every vanilla havoc mutant executed during the sampling phase doubles as an
//! inference probe: when it differs from the seed in at most `k` aligned
//! positions and the recorded frontier-branch operands change, each differing
//! position gets one more count. Bytes that really drive the branches appear in
//! every accepted diff, so their counts pull away from the noise.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::distance::byte_diff_positions;
use crate::target::ProgramBehavior;

/// Scaling of the adaptive threshold `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams {
    pub beta: f64,
    pub k_min: usize,
    pub k_max_divisor: usize,
}

impl ThresholdParams {
    /// A 2,603-byte seed with 50,000 sampling mutants lands on `k = 5`.
    pub const DEFAULT_BETA: f64 = 96.0;
}

impl Default for ThresholdParams {
    fn default() -> Self {
        ThresholdParams {
            beta: Self::DEFAULT_BETA,
            k_min: 1,
            k_max_divisor: 32,
        }
    }
}

/// `round(beta * seed_len / n_mut)` clamped to
/// `[k_min, max(k_min, seed_len / k_max_divisor)]`.
pub fn adaptive_k(seed_len: usize, n_mut: usize, params: &ThresholdParams) -> usize {
    let n_mut = n_mut.max(1);
    let raw = (params.beta * seed_len as f64 / n_mut as f64).round();
    let upper = (seed_len / params.k_max_divisor.max(1)).max(params.k_min);
    if raw.is_nan() || raw < params.k_min as f64 {
        params.k_min
    } else if raw > upper as f64 {
        upper
    } else {
        raw as usize
    }
}

/// True when the executed frontier-branch sets differ or a shared branch saw a
/// different operand.
pub fn behavior_differs(a: &ProgramBehavior, b: &ProgramBehavior) -> bool {
    if a.records == b.records {
        return false;
    }
    let left: BTreeMap<_, _> = a.records.iter().copied().collect();
    let right: BTreeMap<_, _> = b.records.iter().copied().collect();
    left != right
}

/// Cumulative per-byte inference counters for one seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaintMap {
    counts: Vec<u64>,
    samples_seen: u64,
    samples_accepted: u64,
}

impl TaintMap {
    pub fn new(seed_len: usize) -> Self {
        TaintMap {
            counts: vec![0; seed_len],
            samples_seen: 0,
            samples_accepted: 0,
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn samples_seen(&self) -> u64 {
        self.samples_seen
    }

    pub fn samples_accepted(&self) -> u64 {
        self.samples_accepted
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Feed one executed mutant; returns whether it was accepted.
    ///
    /// Accepted means at most `k` differing positions, all inside the seed,
    /// and a behavior change.
    pub fn infer_and_accumulate(
        &mut self,
        seed: &[u8],
        seed_behavior: &ProgramBehavior,
        mutant: &[u8],
        mutant_behavior: &ProgramBehavior,
        k: usize,
    ) -> bool {
        debug_assert_eq!(seed.len(), self.counts.len());
        self.samples_seen += 1;
        let diff = byte_diff_positions(seed, mutant);
        if diff.len() > k || diff.iter().any(|&j| j >= self.counts.len()) {
            return false;
        }
        if !behavior_differs(seed_behavior, mutant_behavior) {
            return false;
        }
        self.samples_accepted += 1;
        for j in diff {
            self.counts[j] += 1;
        }
        true
    }

    /// `index,count` CSV preceded by a `#` metadata line.
    pub fn to_csv(&self, seed_id: impl std::fmt::Display, k: usize) -> String {
        let mut out = format!(
            "# seed_id={seed_id},k={k},samples_seen={},samples_accepted={}\nindex,count\n",
            self.samples_seen, self.samples_accepted
        );
        for (i, c) in self.counts.iter().enumerate() {
            let _ = writeln!(out, "{i},{c}");
        }
        out
    }
}
