// Recover the hot bytes of `sparse_hot` from ordinary havoc mutants.

use havoc_taint::fuzzer::sampling_phase;
use havoc_taint::mutation::{HavocConfig, HavocEngine};
use havoc_taint::rng::{random_bytes, seeded_rng};
use havoc_taint::target::{target_by_name, CoverageMap, Frontier};
use havoc_taint::taint::{adaptive_k, ThresholdParams};

pub fn run_example() -> havoc_taint::Result<()> {
    let target = target_by_name("sparse_hot")?;
    let seed = random_bytes(256, 3);
    let engine = HavocEngine::new(HavocConfig::default())?;

    let mut global = CoverageMap::new();
    global.merge(&target.execute(&seed, &Frontier::new()).coverage);

    let n_mut = 200_000;
    println!("adaptive k for {n_mut} mutants: {}", adaptive_k(seed.len(), n_mut, &ThresholdParams::default()));
    let k = 5;
    let taint = sampling_phase(&target, &engine, &seed, &global, n_mut, k, &mut seeded_rng(1));
    println!("accepted {} of {}", taint.samples_accepted(), taint.samples_seen());

    let mut ranked: Vec<(usize, u64)> = taint.counts().iter().copied().enumerate().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    println!("top bytes {:?}", &ranked[..6]);
    println!("ground truth {:?}", target.ground_truth_hot_bytes());
    Ok(())
}

fn main() {
    run_example().expect("taint example failed");
}
