// Stacked havoc mutation of one seed, with the unit-mutation trail.

use havoc_taint::mutation::{HavocConfig, HavocEngine, MutationRecord, Operator, StackPolicy, NO_DONORS};
use havoc_taint::rng::seeded_rng;

pub fn run_example() -> havoc_taint::Result<()> {
    let seed = b"GET /index.html HTTP/1.1\r\n".to_vec();
    let engine = HavocEngine::new(HavocConfig::default())?;
    let mut rng = seeded_rng(7);

    for policy in [StackPolicy::AflPlusPlusRange, StackPolicy::AflPowerOfTwo] {
        let stacks: Vec<usize> = (0..8).map(|_| havoc_taint::mutation::select_stack(policy, &mut rng)).collect();
        println!("{policy:?} stacks: {stacks:?}");
    }

    let stack = engine.select_stack(&mut rng);
    let mutant = engine.havoc_mutate(&seed, stack, &mut rng, NO_DONORS);
    println!("stack {stack}: {:?}", String::from_utf8_lossy(&mutant.bytes));
    println!("{}", MutationRecord::CSV_HEADER);
    for r in &mutant.records {
        println!("{}", r.csv_row());
    }

    // A single-operator engine: one bit flip changes exactly one bit.
    let flips = HavocEngine::new(HavocConfig::with_operators(&[Operator::FlipBit]))?;
    let m = flips.havoc_mutate(&seed, 1, &mut rng, NO_DONORS);
    let bits: u32 = seed.iter().zip(&m.bytes).map(|(a, b)| (a ^ b).count_ones()).sum();
    println!("flip-bit mutant differs in {bits} bit");
    Ok(())
}

fn main() {
    run_example().expect("havoc example failed");
}
