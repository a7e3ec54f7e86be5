//! Statistical behavior of the generators, hub null model, and simulator:
//! checks that hold up to Monte Carlo noise, run against frozen seeds.

use egonet::graph::configuration_graph;
use egonet::hub::{hub_proportion_by_rank, hub_trend_test, permutation_null_band};
use egonet::paradox::decile_contact_curves;
use egonet::sim::{run_ensemble, OutbreakConfig, SeedNode};
use egonet::synth::{sample_degree_sequence, synth_ego_dataset, DegreeSpec, SynthParams};
use egonet::ego::{AlterRecord, EgoDataset, EgoRecord};

fn synth_params(coupling: f64) -> SynthParams {
    SynthParams {
        n_egos: 300,
        alters_per_ego: 10,
        zipf_exponent: 1.2,
        base_volume: 1000.0,
        coupling,
        degree_spec: DegreeSpec::LogNormal {
            mu: 4.6,
            sigma: 0.5,
        },
        min_degree: 1,
        fraction_unavailable: 0.2,
    }
}

#[test]
fn full_coupling_pushes_hubs_to_high_ranks() {
    let ds = synth_ego_dataset(
        &SynthParams {
            fraction_unavailable: 0.0,
            ..synth_params(1.0)
        },
        17,
    )
    .unwrap();
    let curve = hub_proportion_by_rank::<f64>(&ds, 5).unwrap();
    for w in curve.points.windows(2) {
        assert!(
            w[1].proportion >= w[0].proportion,
            "proportion dropped from rank {} ({}) to rank {} ({})",
            w[0].rank,
            w[0].proportion,
            w[1].rank,
            w[1].proportion
        );
    }
    // The top rank dominates outright.
    assert!(curve.points.last().unwrap().proportion > 0.8);
}

#[test]
fn uncoupled_data_stays_inside_the_null_band() {
    // coupling = 0 places hubs uniformly over available ranks, which is
    // exactly the null; the observed curve should rarely leave the band.
    let mut total_inside = 0usize;
    let mut total_ranks = 0usize;
    for seed in 0..10u64 {
        let ds = synth_ego_dataset(&synth_params(0.0), 100 + seed).unwrap();
        let curve = hub_proportion_by_rank::<f64>(&ds, 5).unwrap();
        let band = permutation_null_band::<f64>(&ds, 400, 900 + seed, 0.95, 5).unwrap();
        for (c, b) in curve.points.iter().zip(&band.points) {
            if c.n_dyads == 0 {
                continue;
            }
            total_ranks += 1;
            if c.proportion >= b.lo && c.proportion <= b.hi {
                total_inside += 1;
            }
        }
    }
    let frac = total_inside as f64 / total_ranks as f64;
    assert!(
        frac >= 0.9,
        "only {frac:.3} of ranks inside the 95% null band"
    );
}

#[test]
fn coupled_data_shows_a_strong_increasing_trend() {
    // A high unavailable fraction spreads the hub geometrically across
    // ranks, so every rank carries trend signal rather than only the top
    // few.
    let ds = synth_ego_dataset(
        &SynthParams {
            n_egos: 2500,
            fraction_unavailable: 0.5,
            ..synth_params(0.9)
        },
        5,
    )
    .unwrap();
    let curve = hub_proportion_by_rank::<f64>(&ds, 5).unwrap();
    let trend = hub_trend_test(&curve, 10_000, 3).unwrap();
    assert!(trend.statistic > 0.5, "rho = {}", trend.statistic);
    assert!(trend.p_value < 0.01, "p = {}", trend.p_value);
}

#[test]
fn anticorrelated_dyads_give_downward_decile_curves() {
    // Volume and alter degree in strict inverse relation within every ego.
    let egos: Vec<EgoRecord> = (0..50)
        .map(|e| {
            let alters = (0..8)
                .map(|i| {
                    let volume = 256u64 >> i;
                    AlterRecord {
                        alter_id: format!("e{e}a{i}"),
                        rank: i as u32 + 1,
                        contact_volume: volume,
                        outdegree: Some(10_000 / volume),
                    }
                })
                .collect();
            EgoRecord {
                ego_id: format!("e{e}"),
                outdegree: 10 + e * 7,
                alters,
            }
        })
        .collect();
    let ds = EgoDataset { egos };
    let curves = decile_contact_curves::<f64>(&ds, false, 4).unwrap();
    let mut checked = 0;
    for curve in curves.iter().filter(|c| c.points.len() >= 2) {
        let first = curve.points.first().unwrap();
        let last = curve.points.last().unwrap();
        assert!(last.mean_volume > first.mean_volume);
        assert!(
            last.mean_k < first.mean_k,
            "decile {}: mean k rose from {} to {}",
            curve.decile,
            first.mean_k,
            last.mean_k
        );
        checked += 1;
    }
    assert!(checked >= 5, "too few populated deciles ({checked})");
}

#[test]
fn ensemble_and_band_are_schedule_independent() {
    let seq = sample_degree_sequence(
        &DegreeSpec::LogNormal {
            mu: 2.5,
            sigma: 0.8,
        },
        400,
        2,
        11,
    )
    .unwrap();
    let g = configuration_graph(&seq.degrees, 12, true).unwrap();
    let cfg = OutbreakConfig {
        beta: 0.05,
        p_mix: 0.5,
        steps: 8,
        replicates: 40,
        seed_node: SeedNode::UniformRandom,
        master_seed: 99,
        clip: true,
    };
    let ds = synth_ego_dataset(&synth_params(0.5), 1).unwrap();

    let pool1 = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let pool4 = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();

    let (ens1, band1) = pool1.install(|| {
        (
            run_ensemble::<f64>(&g, &cfg).unwrap(),
            permutation_null_band::<f64>(&ds, 300, 7, 0.95, 5).unwrap(),
        )
    });
    let (ens4, band4) = pool4.install(|| {
        (
            run_ensemble::<f64>(&g, &cfg).unwrap(),
            permutation_null_band::<f64>(&ds, 300, 7, 0.95, 5).unwrap(),
        )
    });
    assert_eq!(ens1, ens4);
    assert_eq!(band1, band4);
}
