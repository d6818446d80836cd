//! Two-sample Mann-Whitney U test.

use statrs::distribution::{ContinuousCDF, Normal};

/// Smallest per-side size that switches to the normal approximation.
pub const NORMAL_APPROX_MIN: usize = 8;

const TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// `U` of the first sample: pairs where it is larger, ties counted half.
    pub u: f64,
    pub p_two_sided: f64,
    /// Alternative: the first sample tends to be smaller.
    pub p_less: f64,
    /// Alternative: the first sample tends to be larger.
    pub p_greater: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Alternative {
    #[default]
    TwoSided,
    Less,
    Greater,
}

impl std::str::FromStr for Alternative {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "two-sided" => Ok(Alternative::TwoSided),
            "less" => Ok(Alternative::Less),
            "greater" => Ok(Alternative::Greater),
            _ => Err(crate::error::Error::Parse(format!("unknown alternative `{s}`"))),
        }
    }
}

impl MannWhitney {
    pub fn p(&self, alternative: Alternative) -> f64 {
        match alternative {
            Alternative::TwoSided => self.p_two_sided,
            Alternative::Less => self.p_less,
            Alternative::Greater => self.p_greater,
        }
    }
}

/// Midranks (1-based) of `values`.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// `U` for `a` against `b`, shortcut for [`mann_whitney_u`]`(a, b).u`.
pub fn u_statistic(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let ra: f64 = ranks[..a.len()].iter().sum();
    let na = a.len() as f64;
    ra - na * (na + 1.0) / 2.0
}

/// Rank-sum test of `a` against `b`. Exact permutation p-values (over the
/// observed midranks, so ties are handled exactly) when either side has fewer
/// than [`NORMAL_APPROX_MIN`] values; otherwise the tie-corrected normal
/// approximation with continuity correction.
///
/// # Panics
/// When either sample is empty.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> MannWhitney {
    assert!(!a.is_empty() && !b.is_empty(), "both samples must be nonempty");
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let (na, nb) = (a.len(), b.len());
    let u = ranks[..na].iter().sum::<f64>() - (na * (na + 1)) as f64 / 2.0;
    if na.min(nb) < NORMAL_APPROX_MIN {
        exact(u, &ranks, na, nb)
    } else {
        normal(u, &ranks, na, nb)
    }
}

fn exact(u: f64, ranks: &[f64], na: usize, nb: usize) -> MannWhitney {
    // Midranks are multiples of 1/2, so doubled rank sums are integers.
    // Count subsets of the smaller side's size by doubled rank sum.
    let small = na.min(nb);
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max_sum: usize = {
        let mut d = doubled.clone();
        d.sort_unstable_by(|x, y| y.cmp(x));
        d[..small].iter().sum()
    };
    let mut ways = vec![vec![0.0f64; max_sum + 1]; small + 1];
    ways[0][0] = 1.0;
    for &d in &doubled {
        for j in (1..=small).rev() {
            let (lo, hi) = ways.split_at_mut(j);
            let (prev, cur) = (&lo[j - 1], &mut hi[0]);
            for s in (d..=max_sum).rev() {
                cur[s] += prev[s - d];
            }
        }
    }
    let dist = &ways[small];
    let total: f64 = dist.iter().sum();
    let mu = (na * nb) as f64 / 2.0;
    let offset = (small * (small + 1)) as f64 / 2.0;
    let (mut less, mut greater, mut two) = (0.0, 0.0, 0.0);
    for (s2, &w) in dist.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let u_small = s2 as f64 / 2.0 - offset;
        let u_a = if small == na { u_small } else { (na * nb) as f64 - u_small };
        if u_a <= u + TIE_EPS {
            less += w;
        }
        if u_a >= u - TIE_EPS {
            greater += w;
        }
        if (u_a - mu).abs() >= (u - mu).abs() - TIE_EPS {
            two += w;
        }
    }
    MannWhitney {
        u,
        p_two_sided: (two / total).min(1.0),
        p_less: (less / total).min(1.0),
        p_greater: (greater / total).min(1.0),
        exact: true,
    }
}

fn normal(u: f64, ranks: &[f64], na: usize, nb: usize) -> MannWhitney {
    let n = (na + nb) as f64;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&r| r == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let nanb = (na * nb) as f64;
    let mu = nanb / 2.0;
    let var = nanb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return MannWhitney {
            u,
            p_two_sided: 1.0,
            p_less: 1.0,
            p_greater: 1.0,
            exact: false,
        };
    }
    let sd = var.sqrt();
    let z = Normal::standard();
    let p_greater = z.sf((u - mu - 0.5) / sd).min(1.0);
    let p_less = z.cdf((u - mu + 0.5) / sd).min(1.0);
    let p_two_sided = (2.0 * z.sf(((u - mu).abs() - 0.5).max(0.0) / sd)).min(1.0);
    MannWhitney {
        u,
        p_two_sided,
        p_less,
        p_greater,
        exact: false,
    }
}
