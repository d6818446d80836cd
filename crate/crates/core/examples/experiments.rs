// Small runs of the distribution and distance experiments.

use havoc_taint::analysis::{
    build_seed_pool, experiment_influenced_bytes, experiment_splicing, experiment_stack_distance,
    experiment_start_positions,
};
use havoc_taint::rng::random_bytes;

pub fn run_example() -> havoc_taint::Result<()> {
    let seed = random_bytes(200, 1);

    let starts = experiment_start_positions(&seed, 5_000, 2)?;
    println!(
        "start positions: body mean {:.1}, tail mean {:.1}",
        starts.range_mean(0, 180),
        starts.range_mean(180, 200)
    );

    let seed256 = random_bytes(256, 4);
    for k in [None, Some(5)] {
        let h = experiment_influenced_bytes("sparse_hot", &seed256, 50_000, k, 2)?;
        println!("influenced bytes k={k:?}: cv {:.3} over {} mutants", h.coefficient_of_variation(), h.total_events);
    }

    for (stack, r) in experiment_stack_distance(&seed, &[1, 4, 16], 1_000, 2)? {
        println!("stack {stack:>2}: l0 {:.1} edit {:.1}", r.l0.mean, r.edit.mean);
    }

    let pool = build_seed_pool(&seed, 100, 3)?;
    let s = experiment_splicing(&pool, 1_000, 2)?;
    println!("edit: normal {:.1}, splicing stage {:.1}", s.normal.edit.mean, s.splicing_stage.edit.mean);
    println!("edit at stack 1: splice op {:.1}, others {:.1}", s.splice_op.edit.mean, s.other_ops.edit.mean);
    Ok(())
}

fn main() {
    run_example().expect("experiments example failed");
}
