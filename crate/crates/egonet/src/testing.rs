//! Hypothesis tests: Wilcoxon signed-rank for paired samples and Spearman
//! rank correlation with a Monte Carlo permutation p-value.
//!
//! Both tests are pure functions of their inputs (and seed), so identical
//! calls give identical results. Rank arithmetic runs in f64 internally and
//! converts at the boundary; permutation decisions therefore do not depend
//! on the caller's scalar type.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::num::{real, Real};
use crate::{Error, Result};

/// How a p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Full enumeration of the null distribution.
    Exact,
    /// Monte Carlo permutation.
    Permutation,
    /// Normal approximation with continuity correction.
    NormalApprox,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Permutation => "permutation",
            Method::NormalApprox => "normal_approx",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult<F> {
    pub statistic: F,
    pub p_value: F,
    pub n: usize,
    pub method: Method,
}

/// Exact enumeration is used up to this many nonzero differences; 2^20
/// sign assignments is still fast, and beyond that the normal approximation
/// is accurate.
pub const WILCOXON_EXACT_MAX_N: usize = 20;

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Differences are `a - b` per pair; zero differences are dropped. Tied
/// absolute differences receive average ranks. The statistic is W+, the sum
/// of ranks of positive differences. For n ≤ 20 (after zero removal) the
/// p-value enumerates all 2^n sign assignments exactly; above that it uses
/// the normal approximation with tie-corrected variance and continuity
/// correction. `method` records which path was taken.
pub fn wilcoxon_signed_rank<F: Real>(pairs: &[(F, F)]) -> Result<TestResult<F>> {
    let diffs: Vec<f64> = pairs
        .iter()
        .map(|&(a, b)| (a - b).to_f64().expect("real converts to f64"))
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        if pairs.is_empty() {
            return Err(Error::TooFew {
                what: "pairs",
                needed: 2,
                got: 0,
            });
        }
        return Err(Error::ZeroDifferences);
    }
    let n = diffs.len();
    if n < 2 {
        return Err(Error::TooFew {
            what: "pairs with nonzero difference",
            needed: 2,
            got: n,
        });
    }

    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (rank2, tie_sizes) = doubled_average_ranks(&abs);

    // W+ in doubled-rank units stays in exact integer arithmetic.
    let w2_plus: u64 = diffs
        .iter()
        .zip(&rank2)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r2)| *r2)
        .sum();
    let statistic = w2_plus as f64 / 2.0;

    let (p, method) = if n <= WILCOXON_EXACT_MAX_N {
        (exact_two_sided_p(&rank2, w2_plus), Method::Exact)
    } else {
        (
            normal_two_sided_p(n, &tie_sizes, statistic),
            Method::NormalApprox,
        )
    };

    Ok(TestResult {
        statistic: real(statistic),
        p_value: real(p),
        n,
        method,
    })
}

/// Average ranks of `values`, doubled so that ties stay integral: a tie
/// group spanning sorted positions i..j (0-based, exclusive) gets doubled
/// rank i + j + 1 per member. Also returns the tie-group sizes.
fn doubled_average_ranks(values: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("no NaN"));

    let mut rank2 = vec![0u64; n];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[idx[j]] == values[idx[i]] {
            j += 1;
        }
        let doubled = (i + j + 1) as u64;
        for &k in &idx[i..j] {
            rank2[k] = doubled;
        }
        tie_sizes.push(j - i);
        i = j;
    }
    (rank2, tie_sizes)
}

/// Exact two-sided p for W+ by dynamic programming over the 2^n equally
/// likely sign assignments: p = min(1, 2·min(P(W ≤ w), P(W ≥ w))).
fn exact_two_sided_p(rank2: &[u64], w2_obs: u64) -> f64 {
    let n = rank2.len();
    let max: usize = rank2.iter().map(|&r| r as usize).sum();
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    for &r2 in rank2 {
        let r2 = r2 as usize;
        for w in (r2..=max).rev() {
            counts[w] += counts[w - r2];
        }
    }
    let w = w2_obs as usize;
    let le: u64 = counts[..=w].iter().sum();
    let ge: u64 = counts[w..].iter().sum();
    let total = (1u64 << n) as f64;
    (2.0 * le.min(ge) as f64 / total).min(1.0)
}

fn normal_two_sided_p(n: usize, tie_sizes: &[usize], w_plus: f64) -> f64 {
    let nf = n as f64;
    let mu = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let d = w_plus - mu;
    if d == 0.0 || var <= 0.0 {
        return 1.0;
    }
    // Continuity correction shrinks |d| by 1/2 toward the mean.
    let z = (d.abs() - 0.5).max(0.0) / var.sqrt();
    // 2·(1 − Φ(|z|)) = erfc(|z|/√2)
    libm::erfc(z / std::f64::consts::SQRT_2)
}

/// Spearman rank correlation with a seeded Monte Carlo permutation p-value.
///
/// ρ is the Pearson correlation of average-tie-adjusted ranks. The two-sided
/// p-value counts permutations of y whose |ρ| reaches the observed |ρ|, with
/// the add-one correction (count+1)/(n_perm+1) so p is never zero.
pub fn spearman<F: Real>(x: &[F], y: &[F], n_perm: usize, seed: u64) -> Result<TestResult<F>> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "x and y lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::TooFew {
            what: "observations",
            needed: 3,
            got: x.len(),
        });
    }
    let xf: Vec<f64> = x.iter().map(|v| v.to_f64().expect("real to f64")).collect();
    let yf: Vec<f64> = y.iter().map(|v| v.to_f64().expect("real to f64")).collect();
    let rx = average_ranks(&xf);
    let ry = average_ranks(&yf);
    if is_constant(&rx) {
        return Err(Error::ConstantInput("x"));
    }
    if is_constant(&ry) {
        return Err(Error::ConstantInput("y"));
    }

    let rho = pearson(&rx, &ry);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut permuted = ry.clone();
    let mut n_reached = 0usize;
    for _ in 0..n_perm {
        permuted.shuffle(&mut rng);
        if pearson(&rx, &permuted).abs() >= rho.abs() {
            n_reached += 1;
        }
    }
    let p = (n_reached + 1) as f64 / (n_perm + 1) as f64;

    Ok(TestResult {
        statistic: real(rho),
        p_value: real(p),
        n: x.len(),
        method: Method::Permutation,
    })
}

/// Average (fractional) ranks, 1-based, ties sharing the mean rank.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("no NaN"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[idx[j]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j + 1) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

fn is_constant(values: &[f64]) -> bool {
    values.iter().all(|&v| v == values[0])
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - ma;
        let dy = y - mb;
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    cov / (va * vb).sqrt()
}
