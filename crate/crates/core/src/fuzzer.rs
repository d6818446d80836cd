//! Coverage-guided campaign loop.
//!
//! Each pass over a seed runs the seed once to capture its frontier-branch
//! behavior, then splits the planned mutants: the first share are vanilla
//! havoc mutants that also feed the taint map, the rest are drawn with the
//! taint-biased position sampler. Inference only consumes executions the havoc
//! loop performs anyway.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;

use crate::biased::BiasedSampler;
use crate::error::{Error, Result};
use crate::mutation::{splice_seeds, HavocConfig, HavocEngine, Seed, SeedId, SeedOrigin};
use crate::rng::{seeded_rng, FuzzRng};
use crate::target::{target_by_name, CoverageMap, Frontier, SyntheticTarget};
use crate::taint::{adaptive_k, TaintMap, ThresholdParams};

/// Executions between two stats snapshots.
pub const SNAPSHOT_INTERVAL: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Plain havoc; no taint bookkeeping.
    Vanilla,
    /// Sampling with inference, then taint-biased havoc.
    #[default]
    ZTaint,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vanilla" => Ok(Mode::Vanilla),
            "ztaint" => Ok(Mode::ZTaint),
            _ => Err(Error::Parse(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub target_name: String,
    pub rng_seed: u64,
    pub max_executions: u64,
    /// Mutants generated per pass over a seed.
    pub mutants_per_seed: usize,
    /// Share of each pass spent in the sampling phase.
    pub sampling_fraction: f64,
    pub threshold: ThresholdParams,
    pub havoc: HavocConfig,
    pub mode: Mode,
    pub splicing_stage_enabled: bool,
}

impl CampaignConfig {
    pub const DEFAULT_MUTANTS_PER_SEED: usize = 2_048;

    pub fn new(target_name: &str) -> Self {
        CampaignConfig {
            target_name: target_name.to_owned(),
            rng_seed: 0,
            max_executions: 100_000,
            mutants_per_seed: Self::DEFAULT_MUTANTS_PER_SEED,
            sampling_fraction: 0.5,
            threshold: ThresholdParams::default(),
            havoc: HavocConfig::default(),
            mode: Mode::default(),
            splicing_stage_enabled: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_executions == 0 {
            return Err(Error::InvalidConfig("max_executions must be at least 1".into()));
        }
        if self.mutants_per_seed < 2 {
            return Err(Error::InvalidConfig("mutants_per_seed must be at least 2".into()));
        }
        if !(self.sampling_fraction > 0.0 && self.sampling_fraction <= 1.0) {
            return Err(Error::InvalidConfig("sampling_fraction must be in (0, 1]".into()));
        }
        if self.threshold.beta.is_nan() || self.threshold.beta <= 0.0 {
            return Err(Error::InvalidConfig("beta must be positive".into()));
        }
        Ok(())
    }

    /// Vanilla-phase mutants per pass; the biased phase gets the remainder.
    pub fn sampling_mutants(&self) -> usize {
        (self.sampling_fraction * self.mutants_per_seed as f64).floor() as usize
    }
}

/// One row of the stats log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatsSnapshot {
    pub execution: u64,
    pub edges_covered: usize,
    pub corpus_size: usize,
    pub accepted_samples: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CampaignStats {
    pub executions: u64,
    pub seed_executions: u64,
    pub mutant_executions: u64,
    pub edges_covered: usize,
    pub corpus_size: usize,
    pub accepted_samples: u64,
    /// Execution count at which every branch had both successors covered.
    pub full_coverage_at: Option<u64>,
    pub wall_events: Vec<StatsSnapshot>,
}

impl CampaignStats {
    pub const CSV_HEADER: &'static str = "execution,edges_covered,corpus_size,accepted_samples";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for s in &self.wall_events {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                s.execution, s.edges_covered, s.corpus_size, s.accepted_samples
            );
        }
        let full = self
            .full_coverage_at
            .map_or_else(|| "none".to_owned(), |e| e.to_string());
        let _ = writeln!(
            out,
            "summary,executions={},edges_covered={},corpus_size={},accepted_samples={},full_coverage_at={}",
            self.executions, self.edges_covered, self.corpus_size, self.accepted_samples, full
        );
        out
    }
}

/// Parsed `summary` line of a stats CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatsSummary {
    pub executions: u64,
    pub edges_covered: usize,
    pub corpus_size: usize,
    pub accepted_samples: u64,
    pub full_coverage_at: Option<u64>,
}

impl FromStr for StatsSummary {
    type Err = Error;

    /// Accepts a whole stats CSV or just its summary line.
    fn from_str(text: &str) -> Result<Self> {
        let line = text
            .lines()
            .rev()
            .find(|l| l.starts_with("summary,"))
            .ok_or_else(|| Error::Parse("stats file has no summary line".into()))?;
        let mut fields = std::collections::HashMap::new();
        for part in line.split(',').skip(1) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad summary field `{part}`")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| -> Result<&str> {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::Parse(format!("summary lacks `{k}`")))
        };
        let num = |k: &str| -> Result<u64> {
            get(k)?
                .parse()
                .map_err(|_| Error::Parse(format!("summary field `{k}` is not a number")))
        };
        let full = match get("full_coverage_at")? {
            "none" => None,
            v => Some(v.parse().map_err(|_| Error::Parse("bad full_coverage_at".into()))?),
        };
        Ok(StatsSummary {
            executions: num("executions")?,
            edges_covered: num("edges_covered")? as usize,
            corpus_size: num("corpus_size")? as usize,
            accepted_samples: num("accepted_samples")?,
            full_coverage_at: full,
        })
    }
}

/// A corpus entry and the execution count at which it was admitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub seed: Seed,
    pub admitted_at: u64,
}

/// Seeds that each contributed new coverage, plus the merged coverage.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    entries: Vec<CorpusEntry>,
    seeds: Vec<Seed>,
    global_coverage: CoverageMap,
    next_index: usize,
}

impl Corpus {
    pub fn new() -> Self {
        Corpus::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn seeds(&self) -> &[Seed] {
        &self.seeds
    }

    pub fn global_coverage(&self) -> &CoverageMap {
        &self.global_coverage
    }

    /// Admit `bytes` if `coverage` adds an edge; merges on admission.
    pub fn admit(
        &mut self,
        bytes: &[u8],
        coverage: &CoverageMap,
        origin: SeedOrigin,
        execution: u64,
    ) -> Result<bool> {
        if !is_interesting(coverage, &self.global_coverage) {
            return Ok(false);
        }
        let seed = Seed::new(SeedId(self.entries.len() as u64), bytes.to_vec(), origin)?;
        self.global_coverage.merge(coverage);
        self.seeds.push(seed.clone());
        self.entries.push(CorpusEntry {
            seed,
            admitted_at: execution,
        });
        Ok(true)
    }

    /// Round-robin cursor over corpus order.
    pub fn next_seed_index(&mut self) -> usize {
        let i = self.next_index % self.entries.len();
        self.next_index = i + 1;
        i
    }

    /// Write one `id_<n>_exec_<e>` file per seed.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for e in &self.entries {
            let name = format!("id_{}_exec_{}", e.seed.id(), e.admitted_at);
            fs::write(dir.join(name), e.seed.bytes())?;
        }
        Ok(())
    }
}

/// True iff `run` sets a bit absent from `global`.
pub fn is_interesting(run: &CoverageMap, global: &CoverageMap) -> bool {
    run.has_new_bits(global)
}

#[derive(Debug, Clone)]
pub struct CampaignReport {
    pub stats: CampaignStats,
    pub corpus: Corpus,
}

struct Campaign<'a> {
    config: &'a CampaignConfig,
    target: SyntheticTarget,
    engine: HavocEngine,
    rng: FuzzRng,
    corpus: Corpus,
    stats: CampaignStats,
    passes: Vec<u64>,
}

impl Campaign<'_> {
    fn budget_left(&self) -> bool {
        self.stats.executions < self.config.max_executions
    }

    fn run_input(&mut self, input: &[u8], frontier: &Frontier, is_seed: bool) -> crate::target::Execution {
        let run = self.target.execute(input, frontier);
        self.stats.executions += 1;
        if is_seed {
            self.stats.seed_executions += 1;
        } else {
            self.stats.mutant_executions += 1;
        }
        run
    }

    fn observe(&mut self, input: &[u8], run: &crate::target::Execution, origin: SeedOrigin) -> Result<()> {
        if self
            .corpus
            .admit(input, &run.coverage, origin, self.stats.executions)?
        {
            self.passes.push(0);
            if self.stats.full_coverage_at.is_none()
                && self.target.update_frontier(self.corpus.global_coverage()).is_empty()
            {
                self.stats.full_coverage_at = Some(self.stats.executions);
            }
        }
        if self.stats.executions.is_multiple_of(SNAPSHOT_INTERVAL) {
            self.snapshot();
        }
        Ok(())
    }

    fn snapshot(&mut self) {
        let snap = StatsSnapshot {
            execution: self.stats.executions,
            edges_covered: self.corpus.global_coverage().count(),
            corpus_size: self.corpus.len(),
            accepted_samples: self.stats.accepted_samples,
        };
        if self.stats.wall_events.last() != Some(&snap) {
            self.stats.wall_events.push(snap);
        }
    }

    fn pass(&mut self) -> Result<()> {
        let idx = self.corpus.next_seed_index();
        self.passes[idx] += 1;
        let mut base = self.corpus.seeds()[idx].bytes().to_vec();
        let mut origin = SeedOrigin::Mutated;

        if self.config.splicing_stage_enabled && self.corpus.len() >= 2 && self.passes[idx].is_multiple_of(2) {
            let mut other = self.rng.gen_range(0..self.corpus.len() - 1);
            if other >= idx {
                other += 1;
            }
            if let Ok(spliced) = splice_seeds(&base, self.corpus.seeds()[other].bytes(), &mut self.rng) {
                base = spliced;
                origin = SeedOrigin::Spliced;
            }
        }

        let frontier = self.target.update_frontier(self.corpus.global_coverage());
        let seed_run = self.run_input(&base, &frontier, true);
        self.observe(&base, &seed_run, origin)?;
        let seed_behavior = seed_run.behavior;

        let total = self.config.mutants_per_seed;
        let (sampling, k) = match self.config.mode {
            Mode::Vanilla => (total, 0),
            Mode::ZTaint => {
                let n = self.config.sampling_mutants();
                (n, adaptive_k(base.len(), n, &self.config.threshold))
            }
        };
        let no_frontier = Frontier::new();
        let mut taint = TaintMap::new(base.len());

        for _ in 0..sampling {
            if !self.budget_left() {
                return Ok(());
            }
            let stack = self.engine.select_stack(&mut self.rng);
            let mutant = self
                .engine
                .havoc_mutate(&base, stack, &mut self.rng, self.corpus.seeds());
            let frontier_used = match self.config.mode {
                Mode::Vanilla => &no_frontier,
                Mode::ZTaint => &frontier,
            };
            let run = self.run_input(&mutant.bytes, frontier_used, false);
            if self.config.mode == Mode::ZTaint
                && taint.infer_and_accumulate(&base, &seed_behavior, &mutant.bytes, &run.behavior, k)
            {
                self.stats.accepted_samples += 1;
            }
            self.observe(&mutant.bytes, &run, SeedOrigin::Mutated)?;
        }

        if self.config.mode == Mode::Vanilla {
            return Ok(());
        }
        let sampler = BiasedSampler::from_taint(&taint);
        for _ in sampling..total {
            if !self.budget_left() {
                return Ok(());
            }
            let stack = self.engine.select_stack(&mut self.rng);
            let mutant =
                self.engine
                    .biased_havoc_mutate(&base, &sampler, stack, &mut self.rng, self.corpus.seeds());
            let run = self.run_input(&mutant.bytes, &no_frontier, false);
            self.observe(&mutant.bytes, &run, SeedOrigin::Mutated)?;
        }
        Ok(())
    }
}

/// Run a campaign until `max_executions` executions have been spent.
pub fn run_campaign(config: &CampaignConfig, initial_seeds: &[Vec<u8>]) -> Result<CampaignReport> {
    config.validate()?;
    if initial_seeds.is_empty() {
        return Err(Error::InvalidConfig("at least one initial seed is required".into()));
    }
    if initial_seeds.iter().any(|s| s.is_empty()) {
        return Err(Error::EmptySeed);
    }
    let target = target_by_name(&config.target_name)?;
    let engine = HavocEngine::new(config.havoc.clone())?;
    let mut campaign = Campaign {
        config,
        target,
        engine,
        rng: seeded_rng(config.rng_seed),
        corpus: Corpus::new(),
        stats: CampaignStats::default(),
        passes: Vec::new(),
    };

    let empty = Frontier::new();
    for seed in initial_seeds {
        if !campaign.budget_left() {
            break;
        }
        let run = campaign.run_input(seed, &empty, true);
        campaign.observe(seed, &run, SeedOrigin::Initial)?;
    }
    while campaign.budget_left() {
        campaign.pass()?;
    }

    campaign.snapshot();
    let mut stats = campaign.stats;
    stats.edges_covered = campaign.corpus.global_coverage().count();
    stats.corpus_size = campaign.corpus.len();
    Ok(CampaignReport {
        stats,
        corpus: campaign.corpus,
    })
}

/// Run one sampling phase on `seed` against the coverage in `global` and
/// return the resulting taint map. `n_mut` vanilla mutants are executed.
pub fn sampling_phase<R: Rng + ?Sized>(
    target: &SyntheticTarget,
    engine: &HavocEngine,
    seed: &[u8],
    global: &CoverageMap,
    n_mut: usize,
    k: usize,
    rng: &mut R,
) -> TaintMap {
    let frontier = target.update_frontier(global);
    let seed_behavior = target.execute(seed, &frontier).behavior;
    let mut taint = TaintMap::new(seed.len());
    for _ in 0..n_mut {
        let stack = engine.select_stack(rng);
        let mutant = engine.havoc_mutate(seed, stack, rng, crate::mutation::NO_DONORS);
        let run = target.execute(&mutant.bytes, &frontier);
        taint.infer_and_accumulate(seed, &seed_behavior, &mutant.bytes, &run.behavior, k);
    }
    taint
}
