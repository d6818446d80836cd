// Vanilla and taint-biased campaigns on the same target and stream.

use havoc_taint::fuzzer::{run_campaign, CampaignConfig, Mode};
use havoc_taint::target::target_by_name;

pub fn run_example() -> havoc_taint::Result<()> {
    let name = "sparse_hot";
    let seed = target_by_name(name)?.default_seed().to_vec();
    for mode in [Mode::Vanilla, Mode::ZTaint] {
        let config = CampaignConfig {
            mode,
            rng_seed: 3,
            max_executions: 60_000,
            ..CampaignConfig::new(name)
        };
        let report = run_campaign(&config, std::slice::from_ref(&seed))?;
        let s = &report.stats;
        println!(
            "{mode:?}: {} edges, corpus {}, accepted {}, full coverage at {:?}",
            s.edges_covered, s.corpus_size, s.accepted_samples, s.full_coverage_at
        );
    }
    Ok(())
}

fn main() {
    run_example().expect("campaign example failed");
}
