//! Hub-alter analysis: where in the rank order does the highest-degree alter
//! sit, and is the observed placement explainable by chance?
//!
//! The null model accounts for data gaps: an ego's hub rank is drawn
//! uniformly from that ego's *available* ranks only, never from ranks whose
//! alter outdegree is missing. Egos are filtered once (at least
//! `min_available` available alters) and the same eligible set feeds both the
//! observed curve and the permutation band, so the two are comparable.

use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ego::{EgoDataset, EgoRecord};
use crate::num::{mean, quantile_sorted, real_usize, sorted, Real};
use crate::testing::{spearman, TestResult};
use crate::{Error, Result};

/// Default eligibility floor: egos with fewer available alters are skipped,
/// since they cannot help placing hubs at high ranks.
pub const DEFAULT_MIN_AVAILABLE: usize = 5;

/// Rank of the available alter with maximal outdegree; ties break toward the
/// lowest rank.
pub fn hub_rank(ego: &EgoRecord) -> Result<u32> {
    let mut best: Option<(u64, u32)> = None;
    for alter in ego.available_alters() {
        let k = alter.outdegree.expect("available");
        match best {
            Some((bk, _)) if k <= bk => {}
            _ => best = Some((k, alter.rank)),
        }
    }
    best.map(|(_, rank)| rank).ok_or(Error::NoEligibleEgos {
        context: "hub rank needs at least one available alter",
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HubRankPoint<F> {
    pub rank: u32,
    /// Eligible egos with an available alter at this rank.
    pub n_dyads: usize,
    /// Of those, how many have their hub here.
    pub n_hub: usize,
    /// n_hub / n_dyads, or 0 when there are no dyads.
    pub proportion: F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HubProportionCurve<F> {
    /// One point per rank 1..=max available rank.
    pub points: Vec<HubRankPoint<F>>,
    pub n_eligible: usize,
    pub min_available: usize,
}

struct Eligible {
    /// Available ranks per eligible ego, ascending.
    available_ranks: Vec<Vec<u32>>,
    hub_ranks: Vec<u32>,
    max_rank: u32,
}

fn eligible_egos(dataset: &EgoDataset, min_available: usize) -> Result<Eligible> {
    let floor = min_available.max(1);
    let mut available_ranks = Vec::new();
    let mut hub_ranks = Vec::new();
    let mut max_rank = 0;
    for ego in &dataset.egos {
        let ranks: Vec<u32> = ego.available_alters().map(|a| a.rank).collect();
        if ranks.len() < floor {
            continue;
        }
        if ranks.iter().any(|&r| r < 1) {
            return Err(Error::invalid(format!(
                "ego {} has an alter with rank 0; run validation",
                ego.ego_id
            )));
        }
        max_rank = max_rank.max(*ranks.iter().max().expect("nonempty"));
        hub_ranks.push(hub_rank(ego)?);
        available_ranks.push(ranks);
    }
    if available_ranks.is_empty() {
        return Err(Error::NoEligibleEgos {
            context: "hub analysis needs egos with enough available alters",
        });
    }
    Ok(Eligible {
        available_ranks,
        hub_ranks,
        max_rank,
    })
}

fn dyad_counts(eligible: &Eligible) -> Vec<usize> {
    let mut counts = vec![0usize; eligible.max_rank as usize];
    for ranks in &eligible.available_ranks {
        for &r in ranks {
            counts[(r - 1) as usize] += 1;
        }
    }
    counts
}

/// Observed proportion of dyads at each rank whose alter is the ego's hub.
pub fn hub_proportion_by_rank<F: Real>(
    dataset: &EgoDataset,
    min_available: usize,
) -> Result<HubProportionCurve<F>> {
    let eligible = eligible_egos(dataset, min_available)?;
    let n_dyads = dyad_counts(&eligible);
    let mut n_hub = vec![0usize; eligible.max_rank as usize];
    for &r in &eligible.hub_ranks {
        n_hub[(r - 1) as usize] += 1;
    }
    let points = n_dyads
        .iter()
        .zip(&n_hub)
        .enumerate()
        .map(|(i, (&d, &h))| HubRankPoint {
            rank: (i + 1) as u32,
            n_dyads: d,
            n_hub: h,
            proportion: if d == 0 {
                F::zero()
            } else {
                real_usize::<F>(h) / real_usize(d)
            },
        })
        .collect();
    Ok(HubProportionCurve {
        points,
        n_eligible: eligible.available_ranks.len(),
        min_available,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPoint<F> {
    pub rank: u32,
    pub lo: F,
    pub hi: F,
    pub mean: F,
}

/// Pointwise permutation-null envelope of the hub proportion curve.
#[derive(Debug, Clone, PartialEq)]
pub struct NullBand<F> {
    pub points: Vec<BandPoint<F>>,
    pub n_perm: usize,
    pub coverage: f64,
}

/// Permutation null for the hub proportion curve: in each permutation every
/// eligible ego's hub rank is drawn uniformly from that ego's available
/// ranks, and per-rank proportions are recomputed against the observed
/// denominators. The band is the empirical middle-`coverage` interval and
/// mean across permutations, per rank independently.
///
/// Permutation `p` draws from ChaCha8 stream `p` of the master seed, so the
/// band is bit-identical however the permutations are scheduled.
pub fn permutation_null_band<F: Real>(
    dataset: &EgoDataset,
    n_perm: usize,
    seed: u64,
    coverage: f64,
    min_available: usize,
) -> Result<NullBand<F>> {
    if n_perm < 1 {
        return Err(Error::invalid("n_perm must be ≥ 1".to_string()));
    }
    if !(coverage > 0.0 && coverage <= 1.0) {
        return Err(Error::invalid(format!(
            "coverage must be in (0,1], got {coverage}"
        )));
    }
    let eligible = eligible_egos(dataset, min_available)?;
    let n_dyads = dyad_counts(&eligible);
    let n_ranks = eligible.max_rank as usize;

    let per_perm: Vec<Vec<F>> = (0..n_perm)
        .into_par_iter()
        .map(|p| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(p as u64);
            let mut counts = vec![0usize; n_ranks];
            for ranks in &eligible.available_ranks {
                let r = ranks[rng.random_range(0..ranks.len())];
                counts[(r - 1) as usize] += 1;
            }
            counts
                .iter()
                .zip(&n_dyads)
                .map(|(&h, &d)| {
                    if d == 0 {
                        F::zero()
                    } else {
                        real_usize::<F>(h) / real_usize(d)
                    }
                })
                .collect()
        })
        .collect();

    let alpha = (1.0 - coverage) / 2.0;
    let points = (0..n_ranks)
        .map(|i| {
            let column: Vec<F> = per_perm.iter().map(|props| props[i]).collect();
            let s = sorted(&column);
            BandPoint {
                rank: (i + 1) as u32,
                lo: quantile_sorted(&s, alpha),
                hi: quantile_sorted(&s, 1.0 - alpha),
                mean: mean(&column),
            }
        })
        .collect();
    Ok(NullBand {
        points,
        n_perm,
        coverage,
    })
}

/// Spearman trend of hub proportion against rank, over ranks that have
/// dyads.
pub fn hub_trend_test<F: Real>(
    curve: &HubProportionCurve<F>,
    n_perm: usize,
    seed: u64,
) -> Result<TestResult<F>> {
    let (ranks, props): (Vec<F>, Vec<F>) = curve
        .points
        .iter()
        .filter(|p| p.n_dyads > 0)
        .map(|p| (real_usize::<F>(p.rank as usize), p.proportion))
        .unzip();
    if ranks.len() < 3 {
        return Err(Error::TooFew {
            what: "ranks with dyads",
            needed: 3,
            got: ranks.len(),
        });
    }
    spearman(&ranks, &props, n_perm, seed)
}

/// Emits the observed curve joined with its null band:
/// `rank,n_dyads,n_hub,proportion,null_mean,null_lo,null_hi`.
pub fn write_hub_prop_csv<F: Real, W: io::Write>(
    curve: &HubProportionCurve<F>,
    band: &NullBand<F>,
    mut w: W,
) -> Result<()> {
    if curve.points.len() != band.points.len() {
        return Err(Error::invalid(format!(
            "curve has {} ranks but band has {}; compute both from the same dataset",
            curve.points.len(),
            band.points.len()
        )));
    }
    writeln!(w, "rank,n_dyads,n_hub,proportion,null_mean,null_lo,null_hi")?;
    for (c, b) in curve.points.iter().zip(&band.points) {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            c.rank, c.n_dyads, c.n_hub, c.proportion, b.mean, b.lo, b.hi
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ego::AlterRecord;

    fn ego_with_degrees(id: &str, degrees: &[Option<u64>]) -> EgoRecord {
        EgoRecord {
            ego_id: id.into(),
            outdegree: 10,
            alters: degrees
                .iter()
                .enumerate()
                .map(|(i, &k)| AlterRecord {
                    alter_id: format!("{id}.a{}", i + 1),
                    rank: (i + 1) as u32,
                    contact_volume: (degrees.len() - i) as u64,
                    outdegree: k,
                })
                .collect(),
        }
    }

    #[test]
    fn hub_is_argmax_of_available_degrees() {
        let ego = ego_with_degrees("e", &[Some(5), Some(9), Some(3)]);
        assert_eq!(hub_rank(&ego).unwrap(), 2);
    }

    #[test]
    fn hub_tie_breaks_toward_lowest_rank() {
        let ego = ego_with_degrees("e", &[Some(9), Some(4), Some(9)]);
        assert_eq!(hub_rank(&ego).unwrap(), 1);
    }

    #[test]
    fn hub_skips_unavailable_alters() {
        let ego = ego_with_degrees("e", &[Some(2), None, Some(8)]);
        assert_eq!(hub_rank(&ego).unwrap(), 3);
    }

    #[test]
    fn hub_with_no_available_alters_errors() {
        let ego = ego_with_degrees("e", &[None, None]);
        assert!(hub_rank(&ego).is_err());
    }

    #[test]
    fn constructed_hub_at_rank_five() {
        let egos: Vec<EgoRecord> = (0..8)
            .map(|i| {
                ego_with_degrees(
                    &format!("e{i}"),
                    &[Some(10), Some(20), Some(30), Some(40), Some(99)],
                )
            })
            .collect();
        let ds = EgoDataset { egos };
        let curve = hub_proportion_by_rank::<f64>(&ds, 5).unwrap();
        assert_eq!(curve.n_eligible, 8);
        assert_eq!(curve.points[4].proportion, 1.0);
        for p in &curve.points[..4] {
            assert_eq!(p.proportion, 0.0);
            assert_eq!(p.n_dyads, 8);
        }
    }

    #[test]
    fn ego_below_min_available_contributes_nowhere() {
        let ds = EgoDataset {
            egos: vec![
                ego_with_degrees("big", &[Some(1), Some(2), Some(3), Some(4), Some(5)]),
                ego_with_degrees("small", &[Some(9), Some(9), Some(9), Some(9)]),
            ],
        };
        let curve = hub_proportion_by_rank::<f64>(&ds, 5).unwrap();
        assert_eq!(curve.n_eligible, 1);
        assert_eq!(curve.points.iter().map(|p| p.n_dyads).sum::<usize>(), 5);
    }

    #[test]
    fn hub_counts_sum_to_eligible_egos() {
        let ds = EgoDataset {
            egos: (0..20)
                .map(|i| {
                    ego_with_degrees(
                        &format!("e{i}"),
                        &[
                            Some(i),
                            Some(2 * i + 1),
                            Some(7),
                            Some(40 - i),
                            Some(i * i % 13),
                        ],
                    )
                })
                .collect(),
        };
        let curve = hub_proportion_by_rank::<f64>(&ds, 5).unwrap();
        let total_hubs: usize = curve.points.iter().map(|p| p.n_hub).sum();
        assert_eq!(total_hubs, curve.n_eligible);
        for p in &curve.points {
            assert!(p.n_hub <= p.n_dyads);
        }
    }

    #[test]
    fn zero_eligible_egos_errors() {
        let ds = EgoDataset {
            egos: vec![ego_with_degrees("e", &[Some(1), Some(2)])],
        };
        assert!(matches!(
            hub_proportion_by_rank::<f64>(&ds, 5),
            Err(Error::NoEligibleEgos { .. })
        ));
    }

    #[test]
    fn homogeneous_availability_null_mean_is_uniform() {
        // 50 egos, all ranks 1..=10 available: null mean proportion 1/10 per
        // rank, within 3 Monte Carlo standard errors.
        let egos: Vec<EgoRecord> = (0..50)
            .map(|i| {
                let degrees: Vec<Option<u64>> = (0..10).map(|r| Some((i + r) % 17 + 1)).collect();
                ego_with_degrees(&format!("e{i}"), &degrees)
            })
            .collect();
        let ds = EgoDataset { egos };
        let n_perm = 1000;
        let band = permutation_null_band::<f64>(&ds, n_perm, 4, 0.95, 5).unwrap();
        let se = (0.1 * 0.9 / (50.0 * n_perm as f64)).sqrt();
        for p in &band.points {
            assert!(
                (p.mean - 0.1).abs() <= 3.0 * se,
                "rank {}: null mean {} vs 0.1 ± {}",
                p.rank,
                p.mean,
                3.0 * se
            );
            assert!(p.lo <= p.mean && p.mean <= p.hi);
        }
    }

    #[test]
    fn unavailable_rank_never_drawn_under_the_null() {
        // Every ego has only ranks 1 and 3 available, so rank 2 never hosts
        // a null hub: its band is identically zero.
        let egos: Vec<EgoRecord> = (0..10)
            .map(|i| ego_with_degrees(&format!("e{i}"), &[Some(i + 1), None, Some(2 * i + 1)]))
            .collect();
        let ds = EgoDataset { egos };
        let band = permutation_null_band::<f64>(&ds, 200, 9, 0.95, 2).unwrap();
        let rank2 = &band.points[1];
        assert_eq!(rank2.lo, 0.0);
        assert_eq!(rank2.hi, 0.0);
        assert_eq!(rank2.mean, 0.0);
        // Ranks 1 and 3 split the mass evenly.
        assert!((band.points[0].mean - 0.5).abs() < 0.05);
        assert!((band.points[2].mean - 0.5).abs() < 0.05);
    }

    #[test]
    fn single_permutation_band_is_degenerate() {
        let egos: Vec<EgoRecord> = (0..6)
            .map(|i| ego_with_degrees(&format!("e{i}"), &[Some(1), Some(2), Some(3)]))
            .collect();
        let ds = EgoDataset { egos };
        let band = permutation_null_band::<f64>(&ds, 1, 7, 0.95, 3).unwrap();
        for p in &band.points {
            assert_eq!(p.lo, p.mean);
            assert_eq!(p.hi, p.mean);
        }
    }

    #[test]
    fn band_is_deterministic_given_seed() {
        let egos: Vec<EgoRecord> = (0..25)
            .map(|i| {
                let degrees: Vec<Option<u64>> = (0..8)
                    .map(|r| if (i + r) % 5 == 0 { None } else { Some(r + 1) })
                    .collect();
                ego_with_degrees(&format!("e{i}"), &degrees)
            })
            .collect();
        let ds = EgoDataset { egos };
        let a = permutation_null_band::<f64>(&ds, 300, 42, 0.95, 3).unwrap();
        let b = permutation_null_band::<f64>(&ds, 300, 42, 0.95, 3).unwrap();
        assert_eq!(a, b);
        let c = permutation_null_band::<f64>(&ds, 300, 43, 0.95, 3).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn trend_test_hand_value() {
        let curve = HubProportionCurve {
            points: vec![
                HubRankPoint { rank: 1, n_dyads: 10, n_hub: 1, proportion: 0.1_f64 },
                HubRankPoint { rank: 2, n_dyads: 10, n_hub: 3, proportion: 0.3 },
                HubRankPoint { rank: 3, n_dyads: 10, n_hub: 2, proportion: 0.2 },
                HubRankPoint { rank: 4, n_dyads: 10, n_hub: 4, proportion: 0.4 },
            ],
            n_eligible: 10,
            min_available: 5,
        };
        let r = hub_trend_test(&curve, 1000, 5).unwrap();
        assert!((r.statistic - 0.8).abs() < 1e-12);
    }

    #[test]
    fn trend_test_strictly_increasing_is_rho_one() {
        let curve = HubProportionCurve {
            points: (1..=5)
                .map(|rank| HubRankPoint {
                    rank,
                    n_dyads: 10,
                    n_hub: rank as usize,
                    proportion: rank as f64 / 10.0,
                })
                .collect(),
            n_eligible: 15,
            min_available: 5,
        };
        let r = hub_trend_test(&curve, 200, 1).unwrap();
        assert!((r.statistic - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trend_test_constant_proportions_errors() {
        let curve = HubProportionCurve {
            points: (1..=4)
                .map(|rank| HubRankPoint {
                    rank,
                    n_dyads: 10,
                    n_hub: 2,
                    proportion: 0.2_f64,
                })
                .collect(),
            n_eligible: 8,
            min_available: 5,
        };
        assert!(matches!(
            hub_trend_test(&curve, 100, 5),
            Err(Error::ConstantInput("y"))
        ));
    }

    #[test]
    fn csv_join_requires_matching_ranks() {
        let egos: Vec<EgoRecord> = (0..6)
            .map(|i| ego_with_degrees(&format!("e{i}"), &[Some(1), Some(2), Some(3)]))
            .collect();
        let ds = EgoDataset { egos };
        let curve = hub_proportion_by_rank::<f64>(&ds, 3).unwrap();
        let band = permutation_null_band::<f64>(&ds, 50, 1, 0.95, 3).unwrap();
        let mut buf = Vec::new();
        write_hub_prop_csv(&curve, &band, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("rank,n_dyads,n_hub,proportion,null_mean,null_lo,null_hi\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
