use std::fmt::Write as _;

/// Per-position event counters over a seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub bins: Vec<u64>,
    /// Number of events (unit mutations or retained mutants) that fed `bins`.
    pub total_events: u64,
    pub seed_len: usize,
}

impl Histogram {
    pub const CSV_HEADER: &'static str = "position,count";

    pub fn new(seed_len: usize) -> Self {
        Histogram {
            bins: vec![0; seed_len],
            total_events: 0,
            seed_len,
        }
    }

    pub fn sum(&self) -> u64 {
        self.bins.iter().sum()
    }

    /// Add another histogram over the same seed length bin by bin.
    pub fn merge(&mut self, other: &Histogram) {
        assert_eq!(self.seed_len, other.seed_len, "histograms cover different seeds");
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.total_events += other.total_events;
    }

    pub fn mean(&self) -> f64 {
        self.range_mean(0, self.bins.len())
    }

    /// Mean bin value over `[start, end)`.
    pub fn range_mean(&self, start: usize, end: usize) -> f64 {
        let end = end.min(self.bins.len());
        if start >= end {
            return 0.0;
        }
        self.bins[start..end].iter().sum::<u64>() as f64 / (end - start) as f64
    }

    /// Population standard deviation over mean; zero for an empty histogram.
    pub fn coefficient_of_variation(&self) -> f64 {
        let mean = self.mean();
        if mean == 0.0 {
            return 0.0;
        }
        let var = self
            .bins
            .iter()
            .map(|&b| (b as f64 - mean).powi(2))
            .sum::<f64>()
            / self.bins.len() as f64;
        var.sqrt() / mean
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for (i, b) in self.bins.iter().enumerate() {
            let _ = writeln!(out, "{i},{b}");
        }
        out
    }
}
