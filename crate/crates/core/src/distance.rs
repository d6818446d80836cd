//! Perturbation distances between a seed and its mutants.
//!
//! The norms compare the two sequences position by position after zero-padding
//! the shorter one; edit distance works on the unpadded sequences.

use crate::error::{Error, Result};

/// Largest input accepted by [`edit_distance`] on either side.
pub const EDIT_DISTANCE_LIMIT: usize = 1 << 20;

#[inline]
fn padded(x: &[u8], i: usize) -> u8 {
    x.get(i).copied().unwrap_or(0)
}

/// Indices where the zero-padded sequences differ, ascending.
pub fn byte_diff_positions(x: &[u8], y: &[u8]) -> Vec<usize> {
    let n = x.len().max(y.len());
    (0..n).filter(|&i| padded(x, i) != padded(y, i)).collect()
}

/// Number of differing positions (the L0 "norm").
pub fn l0_count(x: &[u8], y: &[u8]) -> usize {
    let common = x.len().min(y.len());
    let head = x[..common].iter().zip(&y[..common]).filter(|(a, b)| a != b).count();
    let tail = x[common..].iter().chain(&y[common..]).filter(|&&b| b != 0).count();
    head + tail
}

/// Exact sum of absolute differences over the padded sequences.
pub fn l1_sum(x: &[u8], y: &[u8]) -> u64 {
    let n = x.len().max(y.len());
    (0..n)
        .map(|i| (padded(x, i) as i64 - padded(y, i) as i64).unsigned_abs())
        .sum()
}

fn squared_sum(x: &[u8], y: &[u8]) -> u64 {
    let n = x.len().max(y.len());
    (0..n)
        .map(|i| {
            let d = padded(x, i) as i64 - padded(y, i) as i64;
            (d * d) as u64
        })
        .sum()
}

/// `(Σ |x_i - y_i|^p)^(1/p)` over the padded sequences, for `p` in `{1, 2}`.
///
/// # Panics
/// For any other `p`.
pub fn lp_norm(x: &[u8], y: &[u8], p: u32) -> f64 {
    match p {
        1 => l1_sum(x, y) as f64,
        2 => (squared_sum(x, y) as f64).sqrt(),
        _ => panic!("lp_norm supports p = 1 or p = 2, got {p}"),
    }
}

/// Levenshtein distance with unit costs.
///
/// Strips the common prefix and suffix, then runs a diagonal-furthest-reaching
/// search whose cost grows with the distance rather than with `x.len() * y.len()`.
pub fn edit_distance(x: &[u8], y: &[u8]) -> Result<usize> {
    for side in [x, y] {
        if side.len() > EDIT_DISTANCE_LIMIT {
            return Err(Error::InputTooLarge {
                len: side.len(),
                limit: EDIT_DISTANCE_LIMIT,
            });
        }
    }
    let prefix = common_prefix(x, y);
    let (x, y) = (&x[prefix..], &y[prefix..]);
    let suffix = common_suffix(x, y);
    let (x, y) = (&x[..x.len() - suffix], &y[..y.len() - suffix]);
    Ok(diagonal_edit_distance(x, y))
}

/// Plain two-row dynamic program; the reference the fast path is checked
/// against.
pub fn edit_distance_dp(x: &[u8], y: &[u8]) -> usize {
    let mut prev: Vec<usize> = (0..=y.len()).collect();
    let mut cur = vec![0; y.len() + 1];
    for (i, &a) in x.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &b) in y.iter().enumerate() {
            let sub = prev[j] + usize::from(a != b);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[y.len()]
}

fn common_prefix(x: &[u8], y: &[u8]) -> usize {
    slide(x, y, 0, 0)
}

fn common_suffix(x: &[u8], y: &[u8]) -> usize {
    x.iter().rev().zip(y.iter().rev()).take_while(|(a, b)| a == b).count()
}

/// Length of the run of equal bytes starting at `x[i]`, `y[j]`.
#[inline]
fn slide(x: &[u8], y: &[u8], i: usize, j: usize) -> usize {
    let (a, b) = (&x[i..], &y[j..]);
    let n = a.len().min(b.len());
    let mut k = 0;
    while k + 8 <= n {
        let wa = u64::from_le_bytes(a[k..k + 8].try_into().unwrap());
        let wb = u64::from_le_bytes(b[k..k + 8].try_into().unwrap());
        let diff = wa ^ wb;
        if diff != 0 {
            return k + (diff.trailing_zeros() / 8) as usize;
        }
        k += 8;
    }
    while k < n && a[k] == b[k] {
        k += 1;
    }
    k
}

/// Furthest-reaching row per diagonal, one edit level at a time.
fn diagonal_edit_distance(x: &[u8], y: &[u8]) -> usize {
    let (n, m) = (x.len() as isize, y.len() as isize);
    if n == 0 {
        return m as usize;
    }
    if m == 0 {
        return n as usize;
    }
    const NONE: isize = isize::MIN;
    let offset = n as usize + 1;
    let width = (n + m) as usize + 3;
    let goal = m - n;
    let mut prev = vec![NONE; width];
    let mut cur = vec![NONE; width];
    let at = |d: isize| (d + offset as isize) as usize;

    prev[at(0)] = slide(x, y, 0, 0) as isize;
    if goal == 0 && prev[at(0)] == n {
        return 0;
    }
    let mut e: isize = 1;
    loop {
        let lo = (-e).max(-n);
        let hi = e.min(m);
        for d in lo..=hi {
            let mut row = NONE;
            let same = prev[at(d)];
            if same != NONE {
                row = row.max(same + 1);
            }
            if d < m {
                let from_above = prev[at(d + 1)];
                if from_above != NONE {
                    row = row.max(from_above + 1);
                }
            }
            if d > -n {
                let from_left = prev[at(d - 1)];
                if from_left != NONE {
                    row = row.max(from_left);
                }
            }
            if row == NONE {
                cur[at(d)] = NONE;
                continue;
            }
            row = row.min(n).min(m - d);
            let reached = row + slide(x, y, row as usize, (row + d) as usize) as isize;
            cur[at(d)] = reached;
            if d == goal && reached == n {
                return e as usize;
            }
        }
        std::mem::swap(&mut prev, &mut cur);
        e += 1;
    }
}

/// All four distances for one (seed, mutant) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDistance {
    pub l0: usize,
    pub l1: u64,
    pub l2: f64,
    pub edit: usize,
}

impl PairDistance {
    pub fn measure(seed: &[u8], mutant: &[u8]) -> Result<Self> {
        Ok(PairDistance {
            l0: l0_count(seed, mutant),
            l1: l1_sum(seed, mutant),
            l2: (squared_sum(seed, mutant) as f64).sqrt(),
            edit: edit_distance(seed, mutant)?,
        })
    }
}

/// Mean, standard deviation and median of one metric.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricSummary {
    pub mean: f64,
    pub stddev: f64,
    pub median: f64,
}

impl MetricSummary {
    pub fn from_values(values: &[f64]) -> Self {
        if values.is_empty() {
            return MetricSummary::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len().is_multiple_of(2) {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        } else {
            sorted[mid]
        };
        MetricSummary {
            mean,
            stddev: var.sqrt(),
            median,
        }
    }
}

/// Distances averaged over a population of (seed, mutant) pairs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DistanceReport {
    pub l0: MetricSummary,
    pub l1: MetricSummary,
    pub l2: MetricSummary,
    pub edit: MetricSummary,
    pub pair_count: usize,
}

impl DistanceReport {
    pub const CSV_HEADER: &'static str = "metric,stack,target,mean,stddev,n";

    pub fn from_pairs(pairs: &[PairDistance]) -> Self {
        let col = |f: fn(&PairDistance) -> f64| -> MetricSummary {
            MetricSummary::from_values(&pairs.iter().map(f).collect::<Vec<_>>())
        };
        DistanceReport {
            l0: col(|p| p.l0 as f64),
            l1: col(|p| p.l1 as f64),
            l2: col(|p| p.l2),
            edit: col(|p| p.edit as f64),
            pair_count: pairs.len(),
        }
    }

    pub fn metrics(&self) -> [(&'static str, MetricSummary); 4] {
        [("l0", self.l0), ("l1", self.l1), ("l2", self.l2), ("edit", self.edit)]
    }

    /// One CSV row per metric, without the header.
    pub fn csv_rows(&self, stack: &str, target: &str) -> String {
        let mut out = String::new();
        for (name, m) in self.metrics() {
            out.push_str(&format!(
                "{name},{stack},{target},{:.6},{:.6},{}\n",
                m.mean, m.stddev, self.pair_count
            ));
        }
        out
    }
}
