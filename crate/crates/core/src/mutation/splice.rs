use rand::Rng;

use crate::error::{Error, Result};

/// First and last differing positions used to pick a splice point.
///
/// Positions are compared over the common prefix. When the lengths differ the
/// last overlapping position counts as a difference.
fn diff_range(a: &[u8], b: &[u8]) -> Option<(usize, usize)> {
    let overlap = a.len().min(b.len());
    let first = (0..overlap).find(|&i| a[i] != b[i]);
    let last = (0..overlap).rev().find(|&i| a[i] != b[i]);
    if a.len() == b.len() {
        return first.zip(last);
    }
    let tail = overlap.checked_sub(1)?;
    Some((first.unwrap_or(tail), tail))
}

/// Join the head of `a` with the tail of `b`.
///
/// The split point is drawn uniformly from `first + 1 ..= last`, where `first`
/// and `last` bound the region where the seeds differ, so the result differs
/// from both parents.
pub fn splice_seeds<R: Rng + ?Sized>(a: &[u8], b: &[u8], rng: &mut R) -> Result<Vec<u8>> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::SpliceInfeasible);
    }
    let (first, last) = diff_range(a, b).ok_or(Error::SpliceInfeasible)?;
    if last <= first {
        return Err(Error::SpliceInfeasible);
    }
    let split = rng.gen_range(first + 1..=last);
    Ok(splice_at(a, b, split))
}

pub(crate) fn splice_at(a: &[u8], b: &[u8], split: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(b.len());
    out.extend_from_slice(&a[..split]);
    out.extend_from_slice(&b[split..]);
    out
}
