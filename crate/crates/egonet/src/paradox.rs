//! Friendship-paradox prevalence and contact-volume statistics.
//!
//! All operations skip alters whose outdegree is unavailable; egos without a
//! single available alter are excluded from paradox denominators. Medians and
//! quartiles follow the interpolated order-statistic convention of
//! [`crate::num::quantile_sorted`] (even-count median = midpoint).

use std::io;

use crate::ego::EgoDataset;
use crate::num::{mean, quantile_sorted, real, real_u64, real_usize, sorted, Real};
use crate::testing::{wilcoxon_signed_rank, TestResult};
use crate::{Error, Result};

/// How an ego's alters are aggregated for the paradox comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregator {
    Mean,
    Median,
}

/// Fraction of eligible egos whose outdegree is strictly below the
/// aggregated outdegree of their available alters. Eligible means having at
/// least one alter with an available outdegree.
pub fn paradox_prevalence<F: Real>(dataset: &EgoDataset, aggregator: Aggregator) -> Result<F> {
    let mut eligible = 0usize;
    let mut paradoxical = 0usize;
    for ego in &dataset.egos {
        let ks: Vec<F> = ego
            .available_alters()
            .map(|a| real_u64(a.outdegree.expect("available")))
            .collect();
        if ks.is_empty() {
            continue;
        }
        eligible += 1;
        let agg = match aggregator {
            Aggregator::Mean => mean(&ks),
            Aggregator::Median => quantile_sorted(&sorted(&ks), 0.5),
        };
        if real_u64::<F>(ego.outdegree) < agg {
            paradoxical += 1;
        }
    }
    if eligible == 0 {
        return Err(Error::NoEligibleEgos {
            context: "paradox prevalence needs egos with an available alter",
        });
    }
    Ok(real_usize::<F>(paradoxical) / real_usize(eligible))
}

/// Ego vs rank-1 alter comparison over egos whose rank-1 alter outdegree is
/// available.
#[derive(Debug)]
pub struct Rank1Comparison<F> {
    /// Fraction of eligible egos with outdegree strictly below their rank-1
    /// alter's.
    pub fraction_lower: F,
    pub ego_mean: F,
    pub alter1_mean: F,
    pub ego_median: F,
    pub alter1_median: F,
    /// Wilcoxon signed-rank over the paired (ego, rank-1 alter) outdegrees;
    /// carries the zero-differences error when every pair is equal.
    pub wilcoxon: Result<TestResult<F>>,
}

pub fn rank1_comparison<F: Real>(dataset: &EgoDataset) -> Result<Rank1Comparison<F>> {
    let mut pairs: Vec<(F, F)> = Vec::new();
    for ego in &dataset.egos {
        let Some(alter1) = ego.alter_at_rank(1) else {
            continue;
        };
        let Some(k1) = alter1.outdegree else {
            continue;
        };
        pairs.push((real_u64(ego.outdegree), real_u64(k1)));
    }
    if pairs.len() < 2 {
        return Err(Error::TooFew {
            what: "egos with an available rank-1 alter",
            needed: 2,
            got: pairs.len(),
        });
    }
    let ego_ks: Vec<F> = pairs.iter().map(|p| p.0).collect();
    let alter_ks: Vec<F> = pairs.iter().map(|p| p.1).collect();
    let lower = pairs.iter().filter(|(e, a)| e < a).count();
    Ok(Rank1Comparison {
        fraction_lower: real_usize::<F>(lower) / real_usize(pairs.len()),
        ego_mean: mean(&ego_ks),
        alter1_mean: mean(&alter_ks),
        ego_median: quantile_sorted(&sorted(&ego_ks), 0.5),
        alter1_median: quantile_sorted(&sorted(&alter_ks), 0.5),
        wilcoxon: wilcoxon_signed_rank(&pairs),
    })
}

/// Outdegree summary of the available dyads at one alter rank. Ranks with no
/// available dyads carry `n_dyads = 0` and NaN statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSummary<F> {
    pub rank: u32,
    pub n_dyads: usize,
    pub mean_k: F,
    pub median_k: F,
    pub q25: F,
    pub q75: F,
}

pub fn rank_degree_summary<F: Real>(dataset: &EgoDataset, max_rank: u32) -> Vec<RankSummary<F>> {
    let mut by_rank: Vec<Vec<F>> = vec![Vec::new(); max_rank as usize];
    for ego in &dataset.egos {
        for alter in ego.available_alters() {
            if (1..=max_rank).contains(&alter.rank) {
                by_rank[(alter.rank - 1) as usize]
                    .push(real_u64(alter.outdegree.expect("available")));
            }
        }
    }
    by_rank
        .into_iter()
        .enumerate()
        .map(|(i, ks)| {
            let rank = (i + 1) as u32;
            if ks.is_empty() {
                return RankSummary {
                    rank,
                    n_dyads: 0,
                    mean_k: F::nan(),
                    median_k: F::nan(),
                    q25: F::nan(),
                    q75: F::nan(),
                };
            }
            let s = sorted(&ks);
            RankSummary {
                rank,
                n_dyads: ks.len(),
                mean_k: mean(&ks),
                median_k: quantile_sorted(&s, 0.5),
                q25: quantile_sorted(&s, 0.25),
                q75: quantile_sorted(&s, 0.75),
            }
        })
        .collect()
}

/// One contact-volume bin of a decile curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinPoint<F> {
    pub mean_volume: F,
    /// Mean available alter outdegree in the bin, log10-transformed first
    /// when the curve was built with `log10_degree`.
    pub mean_k: F,
    pub n: usize,
}

/// Contact-volume vs alter-outdegree curve for one decile of ego outdegree.
#[derive(Debug, Clone, PartialEq)]
pub struct DecileCurve<F> {
    pub decile: u8,
    /// Bins in ascending contact-volume order; empty when the decile has no
    /// available dyads.
    pub points: Vec<BinPoint<F>>,
}

/// Bins the direct contact-volume/alter-outdegree relationship by deciles of
/// ego outdegree. Egos are assigned to deciles by interpolated quantile
/// boundaries with ties going to the lower decile; within a decile, available
/// dyads are split into `n_bins` equal-population bins of ascending contact
/// volume.
pub fn decile_contact_curves<F: Real>(
    dataset: &EgoDataset,
    log10_degree: bool,
    n_bins: usize,
) -> Result<Vec<DecileCurve<F>>> {
    if n_bins < 2 {
        return Err(Error::invalid(format!("n_bins must be ≥ 2, got {n_bins}")));
    }
    if dataset.egos.len() < 10 {
        return Err(Error::TooFew {
            what: "egos for decile binning",
            needed: 10,
            got: dataset.egos.len(),
        });
    }

    let degrees: Vec<f64> = dataset.egos.iter().map(|e| e.outdegree as f64).collect();
    let mut sorted_degrees = degrees.clone();
    sorted_degrees.sort_unstable_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let boundaries: Vec<f64> = (1..10)
        .map(|d| quantile_sorted(&sorted_degrees, d as f64 / 10.0))
        .collect();
    let decile_of = |k: f64| 1 + boundaries.iter().filter(|&&b| k > b).count();

    // (volume, alter k, ego index, rank) per decile; the trailing indices
    // make the equal-population split deterministic under volume ties.
    let mut dyads: Vec<Vec<(u64, u64, usize, u32)>> = vec![Vec::new(); 10];
    for (ei, ego) in dataset.egos.iter().enumerate() {
        let d = decile_of(ego.outdegree as f64);
        for alter in ego.available_alters() {
            dyads[d - 1].push((
                alter.contact_volume,
                alter.outdegree.expect("available"),
                ei,
                alter.rank,
            ));
        }
    }

    let curves = dyads
        .into_iter()
        .enumerate()
        .map(|(i, mut group)| {
            group.sort_unstable_by_key(|&(v, _, ei, r)| (v, ei, r));
            let mut points = Vec::new();
            for chunk in equal_population_chunks(&group, n_bins) {
                let vols: Vec<F> = chunk.iter().map(|&(v, _, _, _)| real_u64(v)).collect();
                let ks: Vec<F> = chunk
                    .iter()
                    .map(|&(_, k, _, _)| {
                        if log10_degree {
                            real::<F>((k as f64).log10())
                        } else {
                            real_u64(k)
                        }
                    })
                    .collect();
                points.push(BinPoint {
                    mean_volume: mean(&vols),
                    mean_k: mean(&ks),
                    n: chunk.len(),
                });
            }
            DecileCurve {
                decile: (i + 1) as u8,
                points,
            }
        })
        .collect();
    Ok(curves)
}

/// Splits a sorted slice into up to `n_bins` contiguous chunks whose sizes
/// differ by at most one; empty chunks are dropped.
fn equal_population_chunks<T>(items: &[T], n_bins: usize) -> Vec<&[T]> {
    let n = items.len();
    let base = n / n_bins;
    let rem = n % n_bins;
    let mut chunks = Vec::new();
    let mut start = 0;
    for b in 0..n_bins {
        let size = base + usize::from(b < rem);
        if size == 0 {
            break;
        }
        chunks.push(&items[start..start + size]);
        start += size;
    }
    chunks
}

/// Power-law fit of contact volume against alter rank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZipfFit<F> {
    /// Positive exponent in volume ∝ rank^(−exponent).
    pub exponent: F,
    /// Intercept of the log10–log10 regression.
    pub log_prefactor: F,
    pub r_squared: F,
    pub ranks_used: usize,
}

/// Ordinary least squares of log10(volume) on log10(rank) over real-valued
/// `(rank, volume)` points; the exponent is the negated slope. Exactly
/// power-law data is recovered to floating-point accuracy.
pub fn fit_power_law<F: Real>(points: &[(F, F)]) -> Result<ZipfFit<F>> {
    if points.len() < 2 {
        return Err(Error::TooFew {
            what: "ranks for the power-law fit",
            needed: 2,
            got: points.len(),
        });
    }
    for &(r, v) in points {
        if r <= F::zero() || v <= F::zero() {
            return Err(Error::invalid(format!(
                "power-law fit needs positive ranks and volumes, got ({r}, {v})"
            )));
        }
    }
    let ten = real::<F>(10.0);
    let xs: Vec<F> = points.iter().map(|&(r, _)| r.log(ten)).collect();
    let ys: Vec<F> = points.iter().map(|&(_, v)| v.log(ten)).collect();
    let mx = mean(&xs);
    let my = mean(&ys);
    let mut sxx = F::zero();
    let mut sxy = F::zero();
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
    }
    if sxx == F::zero() {
        return Err(Error::invalid(
            "all ranks identical, slope undefined".to_string(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = F::zero();
    let mut ss_tot = F::zero();
    for (&x, &y) in xs.iter().zip(&ys) {
        let e = y - (intercept + slope * x);
        ss_res = ss_res + e * e;
        let d = y - my;
        ss_tot = ss_tot + d * d;
    }
    // Clamped: ss_res/ss_tot can stray past [0,1] by rounding when y is
    // (near-)constant and both sums are at noise level.
    let r_squared = if ss_tot == F::zero() {
        F::one()
    } else {
        (F::one() - ss_res / ss_tot).max(F::zero()).min(F::one())
    };
    Ok(ZipfFit {
        exponent: -slope,
        log_prefactor: intercept,
        r_squared,
        ranks_used: points.len(),
    })
}

/// Zipf fit over a dataset: per-rank mean contact volumes (all dyads — the
/// volume is always known) are regressed on rank, restricted to ranks with
/// at least `min_dyads` dyads. Per-rank means are aggregated before the
/// regression so heavily-populated low ranks do not dominate.
pub fn zipf_fit<F: Real>(dataset: &EgoDataset, min_dyads: usize) -> Result<ZipfFit<F>> {
    let mut sums: Vec<(u64, u64)> = Vec::new(); // (dyad count, volume sum) per rank
    for ego in &dataset.egos {
        for alter in &ego.alters {
            if alter.rank < 1 {
                return Err(Error::invalid(format!(
                    "ego {} has an alter with rank 0; run validation",
                    ego.ego_id
                )));
            }
            let idx = (alter.rank - 1) as usize;
            if idx >= sums.len() {
                sums.resize(idx + 1, (0, 0));
            }
            sums[idx].0 += 1;
            sums[idx].1 += alter.contact_volume;
        }
    }
    let points: Vec<(F, F)> = sums
        .iter()
        .enumerate()
        .filter(|(_, &(n, _))| n as usize >= min_dyads && n > 0)
        .map(|(i, &(n, sum))| {
            (
                real_usize::<F>(i + 1),
                real_u64::<F>(sum) / real_u64(n),
            )
        })
        .collect();
    fit_power_law(&points)
}

/// Writers for the CSV schemas this module emits.
pub fn write_rank_summary_csv<F: Real, W: io::Write>(
    rows: &[RankSummary<F>],
    mut w: W,
) -> io::Result<()> {
    writeln!(w, "rank,n_dyads,mean_k,median_k,q25,q75")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.rank, r.n_dyads, r.mean_k, r.median_k, r.q25, r.q75
        )?;
    }
    Ok(())
}

pub fn write_decile_curves_csv<F: Real, W: io::Write>(
    curves: &[DecileCurve<F>],
    mut w: W,
) -> io::Result<()> {
    writeln!(w, "decile,bin,mean_volume,mean_k,n")?;
    for curve in curves {
        for (b, p) in curve.points.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{}",
                curve.decile,
                b + 1,
                p.mean_volume,
                p.mean_k,
                p.n
            )?;
        }
    }
    Ok(())
}

pub fn write_zipf_csv<F: Real, W: io::Write>(fit: &ZipfFit<F>, mut w: W) -> io::Result<()> {
    writeln!(w, "exponent,log_prefactor,r_squared,ranks_used")?;
    writeln!(
        w,
        "{},{},{},{}",
        fit.exponent, fit.log_prefactor, fit.r_squared, fit.ranks_used
    )?;
    Ok(())
}
