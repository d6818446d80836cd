// The built-in targets, their coverage and frontier branches.

use havoc_taint::target::{describe_targets, target_by_name, CoverageMap, Frontier};

pub fn run_example() -> havoc_taint::Result<()> {
    print!("{}", describe_targets());

    let target = target_by_name("and3")?;
    let all = target.all_branches();
    for input in [b"00000000", b"00001000", b"00001110"] {
        let run = target.execute(input, &all);
        println!(
            "{:?}: {} edges, operands {:?}",
            String::from_utf8_lossy(input),
            run.coverage.count(),
            run.behavior.records
        );
    }

    // Once both successors of every branch are seen the frontier is empty.
    let mut global = CoverageMap::new();
    global.merge(&target.execute(b"00000000", &Frontier::new()).coverage);
    println!("frontier after zeros: {:?}", target.update_frontier(&global));
    global.merge(&target.execute(b"00001110", &Frontier::new()).coverage);
    println!("frontier after match: {:?}", target.update_frontier(&global));
    Ok(())
}

fn main() {
    run_example().expect("target example failed");
}
