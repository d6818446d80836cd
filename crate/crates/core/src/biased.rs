//! Taint-guided start positions.
//!
//! Position `i` is drawn with probability `counts[i] / Σ counts`. An all-zero
//! map draws uniformly and consumes the stream exactly like vanilla havoc.

use rand::Rng;

use crate::mutation::{HavocEngine, Mutant, PositionPicker};
use crate::taint::TaintMap;

/// Prefix sums over a [`TaintMap`], immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasedSampler {
    cumulative: Vec<u64>,
    total: u64,
}

impl BiasedSampler {
    pub fn from_counts(counts: &[u64]) -> Self {
        let cumulative: Vec<u64> = counts
            .iter()
            .scan(0u64, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect();
        let total = cumulative.last().copied().unwrap_or(0);
        BiasedSampler { cumulative, total }
    }

    pub fn from_taint(map: &TaintMap) -> Self {
        Self::from_counts(map.counts())
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn cumulative_weights(&self) -> &[u64] {
        &self.cumulative
    }

    /// Unnormalized weight of position `i`.
    pub fn weight(&self, i: usize) -> u64 {
        let prev = if i == 0 { 0 } else { self.cumulative[i - 1] };
        self.cumulative[i] - prev
    }

    pub fn probability(&self, i: usize) -> f64 {
        if self.total == 0 {
            1.0 / self.len() as f64
        } else {
            self.weight(i) as f64 / self.total as f64
        }
    }

    /// Draw a position; uniform over `0..len` when every count is zero.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.total == 0 {
            return rng.gen_range(0..self.len());
        }
        let r = rng.gen_range(0..self.total);
        self.cumulative.partition_point(|&c| c <= r)
    }
}

/// Free-function form of [`BiasedSampler::sample`].
pub fn biased_index<R: Rng + ?Sized>(sampler: &BiasedSampler, rng: &mut R) -> usize {
    sampler.sample(rng)
}

impl PositionPicker for BiasedSampler {
    /// With counts, the taint draw is reduced modulo the current length and
    /// pulled back so the operator window fits, which keeps the drawn byte
    /// inside the window.
    fn pick<R: Rng + ?Sized>(&self, rng: &mut R, valid: usize, len: usize) -> usize {
        if self.total == 0 {
            return rng.gen_range(0..valid);
        }
        (self.sample(rng) % len).min(valid - 1)
    }
}

impl HavocEngine {
    /// [`HavocEngine::havoc_mutate`] with every start position drawn from
    /// `sampler`. Operator choice, lengths, values and copy sources stay
    /// uniform.
    pub fn biased_havoc_mutate<R, D>(
        &self,
        seed: &[u8],
        sampler: &BiasedSampler,
        stack: usize,
        rng: &mut R,
        donors: &[D],
    ) -> Mutant
    where
        R: Rng + ?Sized,
        D: AsRef<[u8]>,
    {
        if sampler.is_empty() {
            return self.havoc_mutate(seed, stack, rng, donors);
        }
        self.mutate_with(seed, stack, rng, sampler, donors)
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::mutation::{HavocConfig, Operator, NO_DONORS};
    use crate::rng::seeded_rng;

    #[test]
    fn prefix_sums() {
        let s = BiasedSampler::from_counts(&[1, 0, 3]);
        assert_eq!(s.cumulative_weights(), &[1, 1, 4]);
        assert_eq!(s.total(), 4);
        assert_eq!((s.weight(0), s.weight(1), s.weight(2)), (1, 0, 3));
        assert_eq!(s.probability(2), 0.75);
    }

    #[test]
    fn single_support_point() {
        let s = BiasedSampler::from_counts(&[0, 0, 4]);
        let mut rng = seeded_rng(0);
        assert!((0..1000).all(|_| biased_index(&s, &mut rng) == 2));
    }

    #[test]
    fn zero_counts_are_uniform() {
        let s = BiasedSampler::from_counts(&[0; 5]);
        let mut rng = seeded_rng(1);
        let mut hist = [0u32; 5];
        for _ in 0..50_000 {
            hist[s.sample(&mut rng)] += 1;
        }
        assert!(hist.iter().all(|&h| (9_000..11_000).contains(&h)), "{hist:?}");
    }

    #[test]
    fn zero_counts_match_vanilla_stream() {
        let engine = HavocEngine::new(HavocConfig::default()).unwrap();
        let seed: Vec<u8> = (0..100).collect();
        let sampler = BiasedSampler::from_counts(&[0; 100]);
        let donors = vec![vec![5u8; 20]];
        for s in 0..200 {
            let a = engine.havoc_mutate(&seed, 8, &mut seeded_rng(s), &donors);
            let b = engine.biased_havoc_mutate(&seed, &sampler, 8, &mut seeded_rng(s), &donors);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn concentrated_counts_anchor_the_window() {
        let engine = HavocEngine::new(HavocConfig::with_operators(&Operator::SUBSTITUTION)).unwrap();
        let seed: Vec<u8> = (0..200u32).map(|i| (i * 13 + 1) as u8).collect();
        for j in [0usize, 57, 199] {
            let mut counts = vec![0u64; 200];
            counts[j] = 10;
            let sampler = BiasedSampler::from_counts(&counts);
            let mut rng = seeded_rng(j as u64);
            for _ in 0..2000 {
                let m = engine.biased_havoc_mutate(&seed, &sampler, 1, &mut rng, NO_DONORS);
                let r = m.records[0];
                let window = r.start_position..r.start_position + r.affected_length;
                assert!(window.contains(&j), "{r:?} misses {j}");
                for (i, (a, b)) in seed.iter().zip(&m.bytes).enumerate() {
                    if a != b {
                        assert!(window.contains(&i));
                    }
                }
            }
        }
    }

    #[test]
    fn length_changes_keep_positions_in_range() {
        let engine = HavocEngine::new(HavocConfig::default()).unwrap();
        let seed = vec![1u8; 50];
        let mut counts = vec![0u64; 50];
        counts[49] = 5;
        counts[3] = 1;
        let sampler = BiasedSampler::from_counts(&counts);
        let donors = vec![vec![2u8; 30]];
        let mut rng = seeded_rng(3);
        for _ in 0..2000 {
            let m = engine.biased_havoc_mutate(&seed, &sampler, 16, &mut rng, &donors);
            assert!(!m.bytes.is_empty());
        }
    }

    proptest! {
        #[test]
        fn scaling_preserves_distribution(counts in proptest::collection::vec(0u64..50, 1..30), c in 1u64..100) {
            let a = BiasedSampler::from_counts(&counts);
            let scaled: Vec<u64> = counts.iter().map(|x| x * c).collect();
            let b = BiasedSampler::from_counts(&scaled);
            for i in 0..counts.len() {
                // exact rational equality: w_a / t_a == w_b / t_b
                prop_assert_eq!(a.weight(i) as u128 * b.total() as u128, b.weight(i) as u128 * a.total() as u128);
            }
            let monotone = a.cumulative_weights().windows(2).all(|w| w[0] <= w[1]);
            prop_assert!(monotone);
            prop_assert_eq!(a.cumulative_weights().last().copied(), Some(a.total()));
        }

        #[test]
        fn draws_land_on_support(counts in proptest::collection::vec(0u64..4, 1..20), s in any::<u64>()) {
            let sampler = BiasedSampler::from_counts(&counts);
            let mut rng = seeded_rng(s);
            for _ in 0..50 {
                let i = sampler.sample(&mut rng);
                prop_assert!(i < counts.len());
                if sampler.total() > 0 {
                    prop_assert!(counts[i] > 0);
                }
            }
        }
    }
}
