//! Havoc mutation: unit operators, stacked composition and seed splicing.
//!
//! A havoc mutant is `f(f(...f(s)...))`: `stack` unit mutations applied in
//! sequence, each drawn uniformly from the configured operator set and each
//! seeing the previous output. The splicing stage runs the same composition on
//! `splice_seeds(s, other)` instead of `s`.

mod operator;
mod splice;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

pub use operator::{
    apply_operator, MutationRecord, Operator, MAX_ARITH_DELTA, MAX_BLOCK_LEN, MAX_FIXED_LEN,
    MAX_INSERT_RAND_LEN,
};
pub(crate) use operator::{apply_in_place, PositionPicker, UniformPositions};
pub use splice::splice_seeds;

use crate::error::{Error, Result};
use crate::rng::{seeded_rng, FuzzRng};

/// Corpus-unique seed identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeedId(pub u64);

impl fmt::Display for SeedId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeedOrigin {
    Initial,
    Mutated,
    Spliced,
}

/// A nonempty byte sequence tracked by a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    id: SeedId,
    bytes: Vec<u8>,
    origin: SeedOrigin,
}

impl Seed {
    pub fn new(id: SeedId, bytes: Vec<u8>, origin: SeedOrigin) -> Result<Self> {
        if bytes.is_empty() {
            return Err(Error::EmptySeed);
        }
        Ok(Seed { id, bytes, origin })
    }

    pub fn id(&self) -> SeedId {
        self.id
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn origin(&self) -> SeedOrigin {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl AsRef<[u8]> for Seed {
    fn as_ref(&self) -> &[u8] {
        &self.bytes
    }
}

/// How many unit mutations go into one mutant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StackPolicy {
    /// Uniform over `{2, 4, 8, 16, 32, 64, 128}`.
    AflPowerOfTwo,
    /// Uniform over `1..=16`.
    #[default]
    AflPlusPlusRange,
}

impl FromStr for StackPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "afl" | "afl_power_of_two" | "power-of-two" => Ok(StackPolicy::AflPowerOfTwo),
            "aflpp" | "afl_plus_plus_range" | "range" => Ok(StackPolicy::AflPlusPlusRange),
            _ => Err(Error::Parse(format!("unknown stack policy `{s}`"))),
        }
    }
}

/// Draw a havoc stack size.
pub fn select_stack<R: Rng + ?Sized>(policy: StackPolicy, rng: &mut R) -> usize {
    match policy {
        StackPolicy::AflPowerOfTwo => 1 << rng.gen_range(1..=7u32),
        StackPolicy::AflPlusPlusRange => rng.gen_range(1..=16),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HavocConfig {
    pub stack_policy: StackPolicy,
    pub operator_set: Vec<Operator>,
    pub rng_seed: u64,
    pub splice_operator_enabled: bool,
}

impl Default for HavocConfig {
    fn default() -> Self {
        HavocConfig {
            stack_policy: StackPolicy::default(),
            operator_set: Operator::ALL.to_vec(),
            rng_seed: 0,
            splice_operator_enabled: true,
        }
    }
}

impl HavocConfig {
    pub fn with_operators(operators: &[Operator]) -> Self {
        HavocConfig {
            operator_set: operators.to_vec(),
            ..HavocConfig::default()
        }
    }
}

/// Bytes produced by a havoc pass plus the trail of unit mutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mutant {
    pub bytes: Vec<u8>,
    pub records: Vec<MutationRecord>,
}

/// Validated [`HavocConfig`] ready to generate mutants.
#[derive(Debug, Clone)]
pub struct HavocEngine {
    config: HavocConfig,
    operators: Vec<Operator>,
}

/// Empty donor pool for engines used without a corpus.
pub const NO_DONORS: &[Vec<u8>] = &[];

impl HavocEngine {
    pub fn new(config: HavocConfig) -> Result<Self> {
        let operators: Vec<Operator> = config
            .operator_set
            .iter()
            .copied()
            .filter(|&op| op != Operator::SpliceOp || config.splice_operator_enabled)
            .collect();
        if operators.is_empty() {
            return Err(Error::InvalidConfig("operator set is empty".into()));
        }
        Ok(HavocEngine { config, operators })
    }

    pub fn config(&self) -> &HavocConfig {
        &self.config
    }

    /// Operators actually drawn from (the splice operator is dropped when
    /// disabled).
    pub fn operators(&self) -> &[Operator] {
        &self.operators
    }

    /// Stream seeded from `config.rng_seed`.
    pub fn rng(&self) -> FuzzRng {
        seeded_rng(self.config.rng_seed)
    }

    pub fn select_stack<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        select_stack(self.config.stack_policy, rng)
    }

    /// Apply `stack` uniformly chosen unit mutations to `seed`.
    ///
    /// `donors` feeds the splice operator; with no donors it degrades to
    /// `RAND_BYTE`. Nothing is drawn from `rng` besides the per-unit draws, so
    /// a stack of `h` equals `h` chained stack-1 calls on the same stream.
    pub fn havoc_mutate<R, D>(&self, seed: &[u8], stack: usize, rng: &mut R, donors: &[D]) -> Mutant
    where
        R: Rng + ?Sized,
        D: AsRef<[u8]>,
    {
        self.mutate_with(seed, stack, rng, &UniformPositions, donors)
    }

    pub(crate) fn mutate_with<R, P, D>(
        &self,
        seed: &[u8],
        stack: usize,
        rng: &mut R,
        picker: &P,
        donors: &[D],
    ) -> Mutant
    where
        R: Rng + ?Sized,
        P: PositionPicker,
        D: AsRef<[u8]>,
    {
        let mut buf = seed.to_vec();
        let mut records = Vec::with_capacity(stack);
        for _ in 0..stack {
            if buf.is_empty() {
                buf.push(rng.gen());
            }
            let op = self.operators[rng.gen_range(0..self.operators.len())];
            records.push(apply_in_place(op, &mut buf, rng, picker, donors));
        }
        Mutant { bytes: buf, records }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use proptest::prelude::*;

    use super::*;
    use crate::distance::{byte_diff_positions, l0_count, lp_norm};

    fn engine(ops: &[Operator]) -> HavocEngine {
        HavocEngine::new(HavocConfig::with_operators(ops)).unwrap()
    }

    #[test]
    fn power_of_two_policy_values() {
        let mut rng = seeded_rng(1);
        let seen: HashSet<usize> = (0..5000).map(|_| select_stack(StackPolicy::AflPowerOfTwo, &mut rng)).collect();
        let expect: HashSet<usize> = [2, 4, 8, 16, 32, 64, 128].into_iter().collect();
        assert_eq!(seen, expect);
    }

    #[test]
    fn range_policy_values() {
        let mut rng = seeded_rng(1);
        let seen: HashSet<usize> = (0..5000).map(|_| select_stack(StackPolicy::AflPlusPlusRange, &mut rng)).collect();
        assert_eq!(seen, (1..=16).collect());
    }

    #[test]
    fn stack_draw_is_deterministic() {
        let a = select_stack(StackPolicy::AflPowerOfTwo, &mut seeded_rng(42));
        let b = select_stack(StackPolicy::AflPowerOfTwo, &mut seeded_rng(42));
        assert_eq!(a, b);
    }

    #[test]
    fn empty_operator_set_rejected() {
        assert!(HavocEngine::new(HavocConfig::with_operators(&[])).is_err());
        let only_splice = HavocConfig {
            splice_operator_enabled: false,
            ..HavocConfig::with_operators(&[Operator::SpliceOp])
        };
        assert!(HavocEngine::new(only_splice).is_err());
    }

    #[test]
    fn empty_seed_rejected() {
        assert!(matches!(Seed::new(SeedId(0), vec![], SeedOrigin::Initial), Err(Error::EmptySeed)));
    }

    #[test]
    fn single_flip_bit_changes_one_bit() {
        let e = engine(&[Operator::FlipBit]);
        let seed: Vec<u8> = (0..64).collect();
        let mut rng = seeded_rng(8);
        for _ in 0..500 {
            let m = e.havoc_mutate(&seed, 1, &mut rng, NO_DONORS);
            let bits: u32 = seed.iter().zip(&m.bytes).map(|(a, b)| (a ^ b).count_ones()).sum();
            assert_eq!(bits, 1);
            assert_eq!(m.records.len(), 1);
        }
    }

    #[test]
    fn substitution_diff_bounded_by_operator_table() {
        let e = engine(&Operator::SUBSTITUTION);
        let single = engine(&Operator::SUBSTITUTION[..5]);
        let seed: Vec<u8> = (0..300u32).map(|i| (i * 7) as u8).collect();
        let mut rng = seeded_rng(4);
        for h in 1..=16 {
            for _ in 0..200 {
                let m = e.havoc_mutate(&seed, h, &mut rng, NO_DONORS);
                let bound: usize = m.records.iter().map(|r| r.operator.max_span(seed.len()).unwrap()).sum();
                assert!(byte_diff_positions(&seed, &m.bytes).len() <= bound);
                let m = single.havoc_mutate(&seed, h, &mut rng, NO_DONORS);
                assert!(byte_diff_positions(&seed, &m.bytes).len() <= h);
            }
        }
    }

    #[test]
    fn mean_distance_grows_with_stack() {
        let e = engine(&Operator::WITHOUT_SPLICE);
        let seed: Vec<u8> = (0..512u32).map(|i| (i.wrapping_mul(2654435761) >> 13) as u8).collect();
        let mut rng = seeded_rng(77);
        let mean_l1 = |h: usize, rng: &mut FuzzRng| {
            (0..2000).map(|_| lp_norm(&seed, &e.havoc_mutate(&seed, h, rng, NO_DONORS).bytes, 1)).sum::<f64>() / 2000.0
        };
        let d1 = mean_l1(1, &mut rng);
        let d16 = mean_l1(16, &mut rng);
        assert!(d16 > d1, "{d1} vs {d16}");
    }

    #[test]
    fn records_track_length_changes() {
        let e = engine(&Operator::ALL);
        let donors = vec![vec![1u8; 50], vec![2u8; 9]];
        let seed = vec![0u8; 33];
        let mut rng = seeded_rng(6);
        for _ in 0..500 {
            let mut cur = seed.clone();
            for _ in 0..8 {
                let m = e.havoc_mutate(&cur, 1, &mut rng, &donors);
                let r = m.records[0];
                assert!(r.start_position < cur.len());
                let delta = m.bytes.len() as isize - cur.len() as isize;
                match r.operator {
                    Operator::InsertCopy | Operator::InsertRand => assert_eq!(delta, r.affected_length as isize),
                    Operator::DeleteBytes => assert_eq!(delta, -(r.affected_length as isize)),
                    Operator::SpliceOp => assert!(delta == 0 || delta == r.affected_length as isize),
                    _ => assert_eq!(delta, 0),
                }
                cur = m.bytes;
            }
        }
    }

    #[test]
    fn disabled_splice_never_drawn() {
        let cfg = HavocConfig {
            splice_operator_enabled: false,
            ..HavocConfig::default()
        };
        let e = HavocEngine::new(cfg).unwrap();
        assert!(!e.operators().contains(&Operator::SpliceOp));
        let donors = vec![vec![3u8; 10]];
        let mut rng = seeded_rng(0);
        for _ in 0..300 {
            let m = e.havoc_mutate(&[0u8; 16], 4, &mut rng, &donors);
            assert!(m.records.iter().all(|r| r.operator != Operator::SpliceOp));
        }
    }

    proptest! {
        #[test]
        fn same_inputs_same_mutant(seed in proptest::collection::vec(any::<u8>(), 1..64), s in any::<u64>(), h in 1usize..20) {
            let e = engine(&Operator::ALL);
            let donors = vec![vec![9u8; 12]];
            let a = e.havoc_mutate(&seed, h, &mut seeded_rng(s), &donors);
            let b = e.havoc_mutate(&seed, h, &mut seeded_rng(s), &donors);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn stack_is_markov_composition(seed in proptest::collection::vec(any::<u8>(), 1..64), s in any::<u64>(), h in 1usize..20) {
            let e = engine(&Operator::ALL);
            let donors = vec![vec![9u8; 12], vec![1, 2, 3]];
            let whole = e.havoc_mutate(&seed, h, &mut seeded_rng(s), &donors);
            let mut rng = seeded_rng(s);
            let mut cur = seed.clone();
            let mut records = Vec::new();
            for _ in 0..h {
                let step = e.havoc_mutate(&cur, 1, &mut rng, &donors);
                records.extend(step.records);
                cur = step.bytes;
            }
            prop_assert_eq!(whole.bytes, cur);
            prop_assert_eq!(whole.records, records);
        }

        #[test]
        fn mutants_never_empty(seed in proptest::collection::vec(any::<u8>(), 1..8), s in any::<u64>()) {
            let e = engine(&[Operator::DeleteBytes, Operator::FlipBit]);
            let m = e.havoc_mutate(&seed, 32, &mut seeded_rng(s), NO_DONORS);
            prop_assert!(!m.bytes.is_empty());
            prop_assert!(l0_count(&seed, &m.bytes) <= seed.len().max(m.bytes.len()));
        }
    }
}
