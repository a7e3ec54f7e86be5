//! Property tests over the data model, statistics, generators, and
//! simulator.

use proptest::prelude::*;

use egonet::ego::{
    dyads_per_rank, parse_dyad_csv, rank_alters, write_dyad_csv, AlterRecord, EgoDataset,
    EgoRecord,
};
use egonet::graph::configuration_graph;
use egonet::hub::hub_proportion_by_rank;
use egonet::paradox::{fit_power_law, paradox_prevalence, Aggregator};
use egonet::sim::{run_outbreak, OutbreakConfig, SeedNode};
use egonet::synth::{synth_ego_dataset, DegreeSequence, DegreeSpec, SynthParams};
use egonet::testing::{spearman, wilcoxon_signed_rank, Method};

// (ego outdegree, per-alter (volume, outdegree, rank gap))
type EgoSpec = (u64, Vec<(u64, Option<u64>, u32)>);

fn build_dataset(specs: Vec<EgoSpec>) -> EgoDataset {
    let egos = specs
        .into_iter()
        .enumerate()
        .map(|(e, (outdegree, items))| {
            let mut volumes: Vec<u64> = items.iter().map(|t| t.0).collect();
            volumes.sort_unstable_by(|a, b| b.cmp(a));
            let mut rank = 0u32;
            let alters = items
                .into_iter()
                .zip(volumes)
                .enumerate()
                .map(|(i, ((_, outdegree, gap), volume))| {
                    rank += gap;
                    AlterRecord {
                        alter_id: format!("e{e}a{i}"),
                        rank,
                        contact_volume: volume,
                        outdegree,
                    }
                })
                .collect();
            EgoRecord {
                ego_id: format!("e{e}"),
                outdegree,
                alters,
            }
        })
        .collect();
    EgoDataset { egos }
}

fn arb_dataset() -> impl Strategy<Value = EgoDataset> {
    prop::collection::vec(
        (
            0u64..300,
            prop::collection::vec((1u64..60, prop::option::of(0u64..300), 1u32..3), 0..6),
        ),
        0..8,
    )
    .prop_map(build_dataset)
}

proptest! {
    #[test]
    fn dyad_csv_round_trips(ds in arb_dataset()) {
        let mut buf = Vec::new();
        write_dyad_csv(&ds, &mut buf).unwrap();
        let (back, _) = parse_dyad_csv(buf.as_slice()).unwrap();
        // Zero-alter egos have no dyad rows, so the file cannot carry them.
        let representable = EgoDataset {
            egos: ds.egos.into_iter().filter(|e| !e.alters.is_empty()).collect(),
        };
        prop_assert_eq!(representable, back);
    }

    #[test]
    fn ranked_volumes_never_increase(pairs in prop::collection::vec((0u64..1000, 1u64..1000), 0..30)) {
        let pairs: Vec<(String, u64)> = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (tag, v))| (format!("a{tag}x{i}"), v))
            .collect();
        let ranked = rank_alters(pairs);
        for w in ranked.windows(2) {
            prop_assert!(w[0].contact_volume >= w[1].contact_volume);
            prop_assert_eq!(w[1].rank, w[0].rank + 1);
        }
    }

    #[test]
    fn dyad_rank_counts_sum_to_total(ds in arb_dataset()) {
        let counts = dyads_per_rank(&ds, false);
        let total: u64 = counts.iter().map(|&(_, c)| c).sum();
        prop_assert_eq!(total as usize, ds.n_dyads());
        let available: u64 = dyads_per_rank(&ds, true).iter().map(|&(_, c)| c).sum();
        prop_assert_eq!(available as usize, ds.n_dyads_with_degree());
    }

    #[test]
    fn prevalence_bounded_and_order_invariant(ds in arb_dataset(), rotate in 0usize..7) {
        let original = paradox_prevalence::<f64>(&ds, Aggregator::Mean);
        // Permute ego order and relabel every id.
        let mut egos = ds.egos.clone();
        let len = egos.len();
        if len > 0 {
            egos.rotate_left(rotate % len);
        }
        egos.reverse();
        for (i, ego) in egos.iter_mut().enumerate() {
            ego.ego_id = format!("renamed{i}");
            for (j, alter) in ego.alters.iter_mut().enumerate() {
                alter.alter_id = format!("r{i}x{j}");
            }
        }
        let permuted = paradox_prevalence::<f64>(&EgoDataset { egos }, Aggregator::Mean);
        match (original, permuted) {
            (Ok(a), Ok(b)) => {
                prop_assert!((0.0..=1.0).contains(&a));
                prop_assert_eq!(a, b);
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "one order errored: {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn power_law_fit_recovers_any_exponent(alpha in 0.5f64..2.0, c in 0.5f64..1000.0) {
        let points: Vec<(f64, f64)> = (1..=12)
            .map(|r| {
                let r = r as f64;
                (r, c * r.powf(-alpha))
            })
            .collect();
        let fit = fit_power_law(&points).unwrap();
        prop_assert!((fit.exponent - alpha).abs() <= 1e-9 * alpha.max(1.0));
        prop_assert!(fit.r_squared > 1.0 - 1e-9);
    }

    #[test]
    fn wilcoxon_exact_matches_brute_force_oracle(
        raw in prop::collection::vec((-8i32..8, -8i32..8), 2..8)
    ) {
        let pairs: Vec<(f64, f64)> = raw
            .iter()
            .map(|&(a, b)| (a as f64 / 2.0, b as f64 / 2.0))
            .collect();
        match (wilcoxon_signed_rank(&pairs), oracle::wilcoxon_two_sided(&pairs)) {
            (Ok(result), Some(expect)) => {
                prop_assert_eq!(result.method, Method::Exact);
                prop_assert_eq!(result.p_value, expect);
            }
            (Err(_), None) => {}
            (got, want) => prop_assert!(false, "disagree on validity: {got:?} vs {want:?}"),
        }
    }

    #[test]
    fn spearman_bounded_and_antisymmetric(perm in Just((0..8u32).collect::<Vec<_>>()).prop_shuffle()) {
        let x: Vec<f64> = (0..8).map(f64::from).collect();
        let y: Vec<f64> = perm.iter().map(|&v| f64::from(v)).collect();
        let reflected: Vec<f64> = y.iter().map(|v| 7.0 - v).collect();
        prop_assume!(y.windows(2).any(|w| w[0] != w[1]));
        let a = spearman(&x, &y, 50, 1).unwrap();
        let b = spearman(&x, &reflected, 50, 1).unwrap();
        prop_assert!((-1.0..=1.0).contains(&a.statistic));
        prop_assert_eq!(a.statistic, -b.statistic);
    }

    #[test]
    fn configuration_model_conserves_stubs(
        degrees in prop::collection::vec(0usize..7, 2..16),
        seed in 0u64..500,
    ) {
        let seq = DegreeSequence::new(degrees);
        let g = configuration_graph(&seq.degrees, seed, false).unwrap();
        for (node, &want) in seq.degrees.iter().enumerate() {
            prop_assert_eq!(g.degree(node), want);
        }
        let simplified = configuration_graph(&seq.degrees, seed, true).unwrap();
        prop_assert!(simplified.n_edges() <= seq.sum() / 2);
    }

    #[test]
    fn synthetic_datasets_always_validate(
        seed in 0u64..1000,
        coupling in 0.0f64..=1.0,
        frac in 0.0f64..0.9,
    ) {
        let params = SynthParams {
            n_egos: 30,
            alters_per_ego: 8,
            zipf_exponent: 1.2,
            base_volume: 500.0,
            coupling,
            degree_spec: DegreeSpec::Histogram {
                entries: (1..=20).map(|k| (k, 1.0)).collect(),
            },
            min_degree: 1,
            fraction_unavailable: frac,
        };
        let ds = synth_ego_dataset(&params, seed).unwrap();
        let report = ds.validate();
        prop_assert!(report.is_clean(), "violations: {:?}", report.violations);
    }

    #[test]
    fn outbreaks_conserve_and_grow_monotonically(
        degrees in prop::collection::vec(1usize..5, 4..12),
        seed in 0u64..200,
        beta in 0.0f64..=1.0,
        p_mix in 0.0f64..=1.0,
    ) {
        let seq = DegreeSequence::new(degrees);
        let g = configuration_graph(&seq.degrees, seed, true).unwrap();
        let cfg = OutbreakConfig {
            beta,
            p_mix,
            steps: 5,
            replicates: 1,
            seed_node: SeedNode::UniformRandom,
            master_seed: seed,
            clip: true,
        };
        let curve = run_outbreak(&g, &cfg, 0).unwrap();
        prop_assert_eq!(curve.total[0], 1);
        for t in 1..curve.total.len() {
            prop_assert!(curve.total[t] >= curve.total[t - 1]);
            prop_assert_eq!(curve.new[t], curve.total[t] - curve.total[t - 1]);
            prop_assert!(curve.total[t] <= g.n_nodes());
        }
    }

    #[test]
    fn hub_counts_are_consistent(ds in arb_dataset()) {
        match hub_proportion_by_rank::<f64>(&ds, 1) {
            Ok(curve) => {
                let hubs: usize = curve.points.iter().map(|p| p.n_hub).sum();
                prop_assert_eq!(hubs, curve.n_eligible);
                for p in &curve.points {
                    prop_assert!(p.n_hub <= p.n_dyads);
                    prop_assert!((0.0..=1.0).contains(&p.proportion));
                }
            }
            Err(_) => {
                let any_available = ds.egos.iter().any(|e| e.n_available() > 0);
                prop_assert!(!any_available);
            }
        }
    }
}

mod oracle {
    //! Brute-force reference independent of the library implementation.

    pub fn wilcoxon_two_sided(pairs: &[(f64, f64)]) -> Option<f64> {
        let diffs: Vec<f64> = pairs
            .iter()
            .map(|&(a, b)| a - b)
            .filter(|d| *d != 0.0)
            .collect();
        let n = diffs.len();
        if n < 2 {
            return None;
        }
        let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
        let ranks = average_ranks(&abs);
        let w_obs: f64 = diffs
            .iter()
            .zip(&ranks)
            .filter(|(d, _)| **d > 0.0)
            .map(|(_, r)| *r)
            .sum();
        let mut le = 0u64;
        let mut ge = 0u64;
        for mask in 0u64..(1 << n) {
            let w: f64 = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| ranks[i])
                .sum();
            if w <= w_obs {
                le += 1;
            }
            if w >= w_obs {
                ge += 1;
            }
        }
        let total = (1u64 << n) as f64;
        Some((2.0 * le.min(ge) as f64 / total).min(1.0))
    }

    fn average_ranks(values: &[f64]) -> Vec<f64> {
        let n = values.len();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
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
}
