// Perturbation distances between a seed and its mutants.

use havoc_taint::distance::{byte_diff_positions, edit_distance, l0_count, lp_norm, DistanceReport, PairDistance};
use havoc_taint::mutation::{HavocConfig, HavocEngine, NO_DONORS};
use havoc_taint::rng::seeded_rng;

pub fn run_example() -> havoc_taint::Result<()> {
    let (a, b) = (b"kitten".as_slice(), b"sitting".as_slice());
    println!("diff positions {:?}", byte_diff_positions(a, b));
    println!(
        "l0 {} l1 {} l2 {:.3} edit {}",
        l0_count(a, b),
        lp_norm(a, b, 1),
        lp_norm(a, b, 2),
        edit_distance(a, b)?
    );

    let seed = vec![0x41u8; 256];
    let engine = HavocEngine::new(HavocConfig::default())?;
    let mut rng = seeded_rng(1);
    let pairs = (0..500)
        .map(|_| {
            let stack = engine.select_stack(&mut rng);
            let m = engine.havoc_mutate(&seed, stack, &mut rng, NO_DONORS);
            PairDistance::measure(&seed, &m.bytes)
        })
        .collect::<havoc_taint::Result<Vec<_>>>()?;
    let report = DistanceReport::from_pairs(&pairs);
    print!("{}\n{}", DistanceReport::CSV_HEADER, report.csv_rows("range", "A*256"));
    Ok(())
}

fn main() {
    run_example().expect("distance example failed");
}
