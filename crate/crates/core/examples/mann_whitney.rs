// Comparing two sets of campaign results.

use havoc_taint::analysis::{mann_whitney_u, Alternative};

pub fn run_example() -> havoc_taint::Result<()> {
    let r = mann_whitney_u(&[1.0, 2.0], &[3.0, 4.0]);
    println!("U {} exact p less {:.4}", r.u, r.p(Alternative::Less));

    // Executions to full coverage; INFINITY marks runs that never got there.
    let ztaint = [3451.0, 4727.0, 1626.0, 5069.0, 2921.0, 3083.0, 2646.0, 8051.0, 1404.0, 3347.0];
    let vanilla = [13850.0, 7288.0, 18526.0, f64::INFINITY, 16858.0, 4464.0, 25674.0, 2448.0, 30582.0, 9784.0];
    let r = mann_whitney_u(&ztaint, &vanilla);
    println!(
        "U {} p two-sided {:.2e} less {:.2e} (normal approximation: {})",
        r.u, r.p_two_sided, r.p_less, !r.exact
    );
    Ok(())
}

fn main() {
    run_example().expect("mann-whitney example failed");
}
