// Position draws proportional to taint counts, and biased havoc.

use havoc_taint::biased::{biased_index, BiasedSampler};
use havoc_taint::mutation::{HavocConfig, HavocEngine, NO_DONORS};
use havoc_taint::rng::seeded_rng;

pub fn run_example() -> havoc_taint::Result<()> {
    let sampler = BiasedSampler::from_counts(&[1, 0, 3]);
    let mut rng = seeded_rng(5);
    let mut freq = [0u32; 3];
    for _ in 0..100_000 {
        freq[biased_index(&sampler, &mut rng)] += 1;
    }
    let p: Vec<f64> = (0..3).map(|i| sampler.probability(i)).collect();
    println!("P {p:?}, observed {freq:?}");

    let seed = vec![b'.'; 48];
    let mut counts = vec![0u64; seed.len()];
    counts[20] = 10;
    let focused = BiasedSampler::from_counts(&counts);
    let engine = HavocEngine::new(HavocConfig::default())?;
    for _ in 0..4 {
        let m = engine.biased_havoc_mutate(&seed, &focused, 2, &mut rng, NO_DONORS);
        let starts: Vec<usize> = m.records.iter().map(|r| r.start_position).collect();
        println!("{:?} starts {starts:?}", String::from_utf8_lossy(&m.bytes));
    }
    Ok(())
}

fn main() {
    run_example().expect("biased example failed");
}
