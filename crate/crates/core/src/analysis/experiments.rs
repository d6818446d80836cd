//! Measurement procedures over the mutation engine.

use rand::Rng;

use super::Histogram;
use crate::distance::{byte_diff_positions, DistanceReport, PairDistance};
use crate::error::{Error, Result};
use crate::mutation::{
    select_stack, splice_seeds, HavocConfig, HavocEngine, Operator, StackPolicy, NO_DONORS,
};
use crate::rng::seeded_rng;
use crate::target::{target_by_name, Frontier};

fn engine(operators: &[Operator]) -> HavocEngine {
    HavocEngine::new(HavocConfig::with_operators(operators)).expect("operator set is nonempty")
}

fn require_iterations(iterations: usize) -> Result<()> {
    if iterations == 0 {
        return Err(Error::InvalidConfig("iterations must be at least 1".into()));
    }
    Ok(())
}

/// Tally the start position of every unit mutation over `iterations` havoc
/// passes with substitution operators and range stacks.
pub fn experiment_start_positions(seed: &[u8], iterations: usize, rng_seed: u64) -> Result<Histogram> {
    require_iterations(iterations)?;
    if seed.is_empty() {
        return Err(Error::EmptySeed);
    }
    let engine = engine(&Operator::SUBSTITUTION);
    let mut rng = seeded_rng(rng_seed);
    let mut hist = Histogram::new(seed.len());
    for _ in 0..iterations {
        let stack = select_stack(StackPolicy::AflPlusPlusRange, &mut rng);
        let mutant = engine.havoc_mutate(seed, stack, &mut rng, NO_DONORS);
        for r in &mutant.records {
            hist.bins[r.start_position] += 1;
        }
        hist.total_events += mutant.records.len() as u64;
    }
    Ok(hist)
}

/// Tally the differing positions of mutants that keep the seed's coverage.
///
/// With `k` set only mutants with at most `k` differing aligned positions are
/// kept. `total_events` counts retained mutants.
pub fn experiment_influenced_bytes(
    target_name: &str,
    seed: &[u8],
    iterations: usize,
    k: Option<usize>,
    rng_seed: u64,
) -> Result<Histogram> {
    require_iterations(iterations)?;
    if seed.is_empty() {
        return Err(Error::EmptySeed);
    }
    let target = target_by_name(target_name)?;
    let engine = engine(&Operator::WITHOUT_SPLICE);
    let none = Frontier::new();
    let seed_cov = target.execute(seed, &none).coverage;
    let mut rng = seeded_rng(rng_seed);
    let mut hist = Histogram::new(seed.len());
    for _ in 0..iterations {
        let stack = select_stack(StackPolicy::AflPlusPlusRange, &mut rng);
        let mutant = engine.havoc_mutate(seed, stack, &mut rng, NO_DONORS);
        if target.execute(&mutant.bytes, &none).coverage != seed_cov {
            continue;
        }
        let diff = byte_diff_positions(seed, &mutant.bytes);
        if k.is_some_and(|k| diff.len() > k) {
            continue;
        }
        hist.total_events += 1;
        for i in diff.into_iter().filter(|&i| i < seed.len()) {
            hist.bins[i] += 1;
        }
    }
    Ok(hist)
}

/// Mean distances of fixed-stack mutants from `seed`, one report per stack.
pub fn experiment_stack_distance(
    seed: &[u8],
    stacks: &[usize],
    iterations_per_stack: usize,
    rng_seed: u64,
) -> Result<Vec<(usize, DistanceReport)>> {
    stack_distance_with(seed, stacks, iterations_per_stack, rng_seed, &Operator::WITHOUT_SPLICE)
}

/// [`experiment_stack_distance`] over a chosen operator set.
pub fn stack_distance_with(
    seed: &[u8],
    stacks: &[usize],
    iterations_per_stack: usize,
    rng_seed: u64,
    operators: &[Operator],
) -> Result<Vec<(usize, DistanceReport)>> {
    require_iterations(iterations_per_stack)?;
    if stacks.is_empty() || stacks.contains(&0) {
        return Err(Error::InvalidConfig("stacks must be nonempty and at least 1".into()));
    }
    if seed.is_empty() {
        return Err(Error::EmptySeed);
    }
    let engine = HavocEngine::new(HavocConfig::with_operators(operators))?;
    let mut rng = seeded_rng(rng_seed);
    let mut out = Vec::with_capacity(stacks.len());
    for &stack in stacks {
        let mut pairs = Vec::with_capacity(iterations_per_stack);
        for _ in 0..iterations_per_stack {
            let mutant = engine.havoc_mutate(seed, stack, &mut rng, NO_DONORS);
            pairs.push(PairDistance::measure(seed, &mutant.bytes)?);
        }
        out.push((stack, DistanceReport::from_pairs(&pairs)));
    }
    Ok(out)
}

/// Output of [`experiment_splicing`].
#[derive(Debug, Clone, PartialEq)]
pub struct SplicingReport {
    pub normal: DistanceReport,
    pub splicing_stage: DistanceReport,
    pub splice_op: DistanceReport,
    pub other_ops: DistanceReport,
}

impl SplicingReport {
    pub fn csv(&self) -> String {
        let mut out = format!("{}\n", DistanceReport::CSV_HEADER);
        for (label, r) in [
            ("normal", &self.normal),
            ("splicing_stage", &self.splicing_stage),
            ("splice_op", &self.splice_op),
            ("other_ops", &self.other_ops),
        ] {
            let stack = if label.ends_with("ops") || label == "splice_op" { "1" } else { "range" };
            out.push_str(&r.csv_rows(stack, label));
        }
        out
    }
}

/// Compare distances with and without splicing over `corpus`.
///
/// Each iteration draws a seed `s` and a different partner from the corpus.
/// (a) The normal stage mutates `s`; the splicing stage mutates
/// `splice(s, partner)`. Both use range stacks and are measured against `s`.
/// Pairs whose splice is infeasible are skipped.
/// (b) With stack 1, splice-operator mutants of `s` (donors: the rest of the
/// corpus) are compared with mutants from every other operator.
pub fn experiment_splicing(corpus: &[Vec<u8>], iterations: usize, rng_seed: u64) -> Result<SplicingReport> {
    require_iterations(iterations)?;
    if corpus.len() < 2 {
        return Err(Error::CorpusTooSmall);
    }
    if corpus.iter().any(|s| s.is_empty()) {
        return Err(Error::EmptySeed);
    }
    let donor_sets: Vec<Vec<&[u8]>> = (0..corpus.len())
        .map(|i| {
            corpus
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, s)| s.as_slice())
                .collect()
        })
        .collect();
    let vanilla = engine(&Operator::WITHOUT_SPLICE);
    let splice_only = engine(&[Operator::SpliceOp]);
    let mut rng = seeded_rng(rng_seed);
    let (mut normal, mut stage, mut splice_op, mut others) = (vec![], vec![], vec![], vec![]);

    for _ in 0..iterations {
        let i = rng.gen_range(0..corpus.len());
        let mut j = rng.gen_range(0..corpus.len() - 1);
        if j >= i {
            j += 1;
        }
        let s = &corpus[i];

        let stack = vanilla.select_stack(&mut rng);
        let m = vanilla.havoc_mutate(s, stack, &mut rng, NO_DONORS);
        normal.push(PairDistance::measure(s, &m.bytes)?);

        if let Ok(spliced) = splice_seeds(s, &corpus[j], &mut rng) {
            let stack = vanilla.select_stack(&mut rng);
            let m = vanilla.havoc_mutate(&spliced, stack, &mut rng, NO_DONORS);
            stage.push(PairDistance::measure(s, &m.bytes)?);
        }

        let m = splice_only.havoc_mutate(s, 1, &mut rng, &donor_sets[i]);
        splice_op.push(PairDistance::measure(s, &m.bytes)?);
        let m = vanilla.havoc_mutate(s, 1, &mut rng, NO_DONORS);
        others.push(PairDistance::measure(s, &m.bytes)?);
    }
    if stage.is_empty() {
        return Err(Error::CorpusTooSmall);
    }
    Ok(SplicingReport {
        normal: DistanceReport::from_pairs(&normal),
        splicing_stage: DistanceReport::from_pairs(&stage),
        splice_op: DistanceReport::from_pairs(&splice_op),
        other_ops: DistanceReport::from_pairs(&others),
    })
}

/// Grow a pool of `size` seeds from `seed` by repeatedly havocing a random
/// earlier member, the way a normal stage populates a queue.
pub fn build_seed_pool(seed: &[u8], size: usize, rng_seed: u64) -> Result<Vec<Vec<u8>>> {
    if seed.is_empty() {
        return Err(Error::EmptySeed);
    }
    let engine = engine(&Operator::WITHOUT_SPLICE);
    let mut rng = seeded_rng(rng_seed);
    let mut pool = vec![seed.to_vec()];
    while pool.len() < size {
        let parent = rng.gen_range(0..pool.len());
        let stack = engine.select_stack(&mut rng);
        let m = engine.havoc_mutate(&pool[parent], stack, &mut rng, NO_DONORS);
        pool.push(m.bytes);
    }
    Ok(pool)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_byte_seed_puts_all_mass_at_zero() {
        let h = experiment_start_positions(&[7], 500, 1).unwrap();
        assert_eq!(h.bins.len(), 1);
        assert_eq!(h.bins[0], h.total_events);
    }

    #[test]
    fn start_totals_reconcile_with_stacks() {
        let h = experiment_start_positions(&[0; 64], 2_000, 3).unwrap();
        assert_eq!(h.sum(), h.total_events);
        let mut rng = seeded_rng(3);
        let engine = engine(&Operator::SUBSTITUTION);
        let mut draws = 0;
        for _ in 0..2_000 {
            let s = select_stack(StackPolicy::AflPlusPlusRange, &mut rng);
            draws += engine.havoc_mutate(&[0u8; 64], s, &mut rng, NO_DONORS).records.len();
        }
        assert_eq!(h.total_events, draws as u64);
    }

    #[test]
    fn experiments_are_deterministic() {
        let seed = vec![1u8; 100];
        assert_eq!(
            experiment_start_positions(&seed, 300, 9).unwrap(),
            experiment_start_positions(&seed, 300, 9).unwrap()
        );
        assert_eq!(
            experiment_stack_distance(&seed, &[1, 4], 100, 9).unwrap(),
            experiment_stack_distance(&seed, &[1, 4], 100, 9).unwrap()
        );
        let pool = build_seed_pool(&seed, 8, 9).unwrap();
        assert_eq!(experiment_splicing(&pool, 100, 9).unwrap(), experiment_splicing(&pool, 100, 9).unwrap());
    }

    #[test]
    fn zero_iterations_rejected() {
        assert!(experiment_start_positions(&[1], 0, 0).is_err());
        assert!(experiment_influenced_bytes("and3", b"00000000", 0, None, 0).is_err());
        assert!(experiment_stack_distance(&[1], &[1], 0, 0).is_err());
        assert!(experiment_stack_distance(&[1], &[], 1, 0).is_err());
    }

    #[test]
    fn flip_bit_stack_one_has_unit_l0() {
        let r = stack_distance_with(&[0u8; 32], &[1], 500, 2, &[Operator::FlipBit]).unwrap();
        assert_eq!(r[0].1.l0.mean, 1.0);
    }

    #[test]
    fn splicing_needs_two_distinct_seeds() {
        assert!(matches!(experiment_splicing(&[vec![1, 2]], 10, 0), Err(Error::CorpusTooSmall)));
        let same = vec![vec![5u8; 16], vec![5u8; 16]];
        assert!(matches!(experiment_splicing(&same, 10, 0), Err(Error::CorpusTooSmall)));
    }

    #[test]
    fn influenced_bytes_respects_threshold() {
        let seed = crate::target::target_by_name("sparse_hot").unwrap().default_seed().to_vec();
        let h = experiment_influenced_bytes("sparse_hot", &seed, 2_000, Some(2), 4).unwrap();
        assert!(h.sum() <= 2 * h.total_events);
        let loose = experiment_influenced_bytes("sparse_hot", &seed, 2_000, None, 4).unwrap();
        assert!(loose.total_events >= h.total_events);
    }
}
