//! Synchronous Susceptible-Infected dynamics with rank-dependent
//! transmission.
//!
//! Two regimes: uniform transmission at probability β, and rank-dependent
//! transmission where an infected node of degree n passes to its rank-r
//! neighbor with probability C/r, C = n·β/H(n) (H the harmonic number).
//! C·H(n) = n·β, so both regimes give an infected node with a fully
//! susceptible neighborhood the same expected number of secondary
//! infections. Neighbor ranks order by ascending degree — rank 1 is the
//! least connected neighbor — and are static throughout an outbreak.
//!
//! Mixing: each infection attempt independently uses the rank regime with
//! probability `p_mix` and the uniform regime otherwise.
//!
//! Replicate r draws from ChaCha8 stream r of the master seed, so ensembles
//! are bit-identical whether replicates run serially or in parallel. The
//! simulator expects a simple graph (no self-loops or parallel edges).

use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::graph::Graph;
use crate::num::{real, real_usize, Real};
use crate::{Error, Result};

/// Where an outbreak starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedNode {
    Fixed(usize),
    /// Drawn uniformly per replicate, from the replicate's own stream.
    UniformRandom,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutbreakConfig<F> {
    /// Uniform-regime transmission probability, in [0,1].
    pub beta: F,
    /// Probability that an attempt uses the rank regime, in [0,1].
    pub p_mix: F,
    pub steps: usize,
    pub replicates: usize,
    pub seed_node: SeedNode,
    pub master_seed: u64,
    /// Cap rank-regime probabilities at 1. A single Bernoulli draw cannot
    /// exceed probability 1 either way, so this only affects reporting and
    /// expectations; saturated attempts are counted regardless.
    pub clip: bool,
}

impl<F: Real> OutbreakConfig<F> {
    fn validate(&self, graph: &Graph) -> Result<()> {
        let beta = self.beta.to_f64().expect("real to f64");
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::invalid(format!("beta must be in [0,1], got {beta}")));
        }
        let p = self.p_mix.to_f64().expect("real to f64");
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("p_mix must be in [0,1], got {p}")));
        }
        if self.steps < 1 {
            return Err(Error::invalid("steps must be ≥ 1".to_string()));
        }
        if self.replicates < 1 {
            return Err(Error::invalid("replicates must be ≥ 1".to_string()));
        }
        if graph.n_nodes() == 0 {
            return Err(Error::invalid("graph has no nodes".to_string()));
        }
        if let SeedNode::Fixed(node) = self.seed_node {
            if node >= graph.n_nodes() {
                return Err(Error::InvalidNode {
                    node,
                    n_nodes: graph.n_nodes(),
                });
            }
        }
        Ok(())
    }
}

/// H(n) = Σ_{k=1..n} 1/k.
pub fn harmonic_number<F: Real>(n: usize) -> F {
    let mut h = F::zero();
    for k in 1..=n {
        h = h + F::one() / real_usize(k);
    }
    h
}

/// Rank-regime transmission probability: C/r with C = n_i·β/H(n_i), capped
/// at 1 when `clip` is set. Summed over r = 1..n_i (clip off) this
/// telescopes back to n_i·β.
pub fn rank_beta<F: Real>(n_i: usize, r: u32, beta: F, clip: bool) -> Result<F> {
    if r < 1 || r as usize > n_i {
        return Err(Error::RankOutOfRange { rank: r, degree: n_i });
    }
    let c = real_usize::<F>(n_i) * beta / harmonic_number(n_i);
    let p = c / real_usize(r as usize);
    Ok(if clip { p.min(F::one()) } else { p })
}

/// Static neighbor ranks: for each node, its adjacency entries ranked 1..n
/// by ascending neighbor degree, ties broken by ascending node index. The
/// result is parallel to the adjacency lists.
pub fn neighbor_ranks(graph: &Graph) -> Vec<Vec<u32>> {
    (0..graph.n_nodes())
        .map(|u| {
            let nbrs = graph.neighbors(u);
            let mut order: Vec<usize> = (0..nbrs.len()).collect();
            order.sort_unstable_by_key(|&j| (graph.degree(nbrs[j]), nbrs[j], j));
            let mut ranks = vec![0u32; nbrs.len()];
            for (pos, &j) in order.iter().enumerate() {
                ranks[j] = (pos + 1) as u32;
            }
            ranks
        })
        .collect()
}

/// Per-step outbreak counts. Index t runs 0..=steps; the seed counts as the
/// step-0 infection, so `total[0] = new[0] = 1`. `clipped[t]` is the number
/// of rank-regime attempts at step t whose raw probability exceeded 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpidemicCurve {
    pub total: Vec<usize>,
    pub new: Vec<usize>,
    pub clipped: Vec<u64>,
}

impl EpidemicCurve {
    pub fn final_total(&self) -> usize {
        *self.total.last().expect("at least step 0")
    }

    pub fn total_clipped(&self) -> u64 {
        self.clipped.iter().sum()
    }
}

/// One synchronous SI outbreak. At each step every infected node attempts
/// each neighbor that was susceptible at the start of the step, once; nodes
/// infected at step t become infective at step t+1. Per attempt the regime
/// coin is drawn first, then the transmission coin.
pub fn run_outbreak<F: Real>(
    graph: &Graph,
    config: &OutbreakConfig<F>,
    replicate_index: usize,
) -> Result<EpidemicCurve> {
    config.validate(graph)?;
    let ranks = neighbor_ranks(graph);
    let scale = transmission_scales(graph, config.beta.to_f64().expect("real to f64"));
    outbreak_with(graph, config, replicate_index, &ranks, &scale)
}

/// Per-node C_i = deg·β/H(deg); shared across replicates of an ensemble.
fn transmission_scales(graph: &Graph, beta: f64) -> Vec<f64> {
    let max_deg = graph.max_degree();
    let mut harmonic = vec![0.0f64; max_deg + 1];
    for k in 1..=max_deg {
        harmonic[k] = harmonic[k - 1] + 1.0 / k as f64;
    }
    (0..graph.n_nodes())
        .map(|u| {
            let d = graph.degree(u);
            if d == 0 {
                0.0
            } else {
                d as f64 * beta / harmonic[d]
            }
        })
        .collect()
}

fn outbreak_with<F: Real>(
    graph: &Graph,
    config: &OutbreakConfig<F>,
    replicate_index: usize,
    ranks: &[Vec<u32>],
    scale: &[f64],
) -> Result<EpidemicCurve> {
    let n = graph.n_nodes();
    let beta = config.beta.to_f64().expect("real to f64");
    let p_mix = config.p_mix.to_f64().expect("real to f64");

    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    rng.set_stream(replicate_index as u64);
    let seed = match config.seed_node {
        SeedNode::Fixed(node) => node,
        SeedNode::UniformRandom => rng.random_range(0..n),
    };

    let mut infected = vec![false; n];
    infected[seed] = true;
    let mut newly_flag = vec![false; n];
    let mut total = Vec::with_capacity(config.steps + 1);
    let mut new = Vec::with_capacity(config.steps + 1);
    let mut clipped = Vec::with_capacity(config.steps + 1);
    total.push(1);
    new.push(1);
    clipped.push(0);

    for _ in 1..=config.steps {
        let mut newly: Vec<usize> = Vec::new();
        let mut clipped_step = 0u64;
        for i in 0..n {
            if !infected[i] {
                continue;
            }
            for (j, &v) in graph.neighbors(i).iter().enumerate() {
                if infected[v] {
                    continue;
                }
                let use_rank = rng.random::<f64>() < p_mix;
                let prob = if use_rank {
                    let raw = scale[i] / f64::from(ranks[i][j]);
                    if raw > 1.0 {
                        clipped_step += 1;
                    }
                    if config.clip {
                        raw.min(1.0)
                    } else {
                        raw
                    }
                } else {
                    beta
                };
                if rng.random::<f64>() < prob && !newly_flag[v] {
                    newly_flag[v] = true;
                    newly.push(v);
                }
            }
        }
        for &v in &newly {
            infected[v] = true;
        }
        total.push(total.last().expect("nonempty") + newly.len());
        new.push(newly.len());
        clipped.push(clipped_step);
    }
    Ok(EpidemicCurve {
        total,
        new,
        clipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats<F> {
    pub mean_total: F,
    pub total_ci_lo: F,
    pub total_ci_hi: F,
    pub mean_new: F,
    pub new_ci_lo: F,
    pub new_ci_hi: F,
}

/// Ensemble means with 95% confidence intervals (mean ± 1.96·SEM), one row
/// per step 0..=steps.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult<F> {
    pub steps: Vec<StepStats<F>>,
    /// Saturated rank-regime attempts per step, summed over replicates.
    pub clipped_attempts: Vec<u64>,
    pub replicates: usize,
}

impl<F: Real> EnsembleResult<F> {
    pub fn final_mean_total(&self) -> F {
        self.steps.last().expect("at least step 0").mean_total
    }

    pub fn any_clipping(&self) -> bool {
        self.clipped_attempts.iter().any(|&c| c > 0)
    }
}

/// Runs `config.replicates` independent outbreaks (replicate r on stream r)
/// and aggregates per-step statistics. Replicates execute in parallel;
/// the result does not depend on scheduling.
pub fn run_ensemble<F: Real>(graph: &Graph, config: &OutbreakConfig<F>) -> Result<EnsembleResult<F>> {
    config.validate(graph)?;
    let ranks = neighbor_ranks(graph);
    let scale = transmission_scales(graph, config.beta.to_f64().expect("real to f64"));

    let curves: Vec<EpidemicCurve> = (0..config.replicates)
        .into_par_iter()
        .map(|r| outbreak_with(graph, config, r, &ranks, &scale))
        .collect::<Result<_>>()?;

    let n_steps = config.steps + 1;
    let mut steps = Vec::with_capacity(n_steps);
    let mut clipped_attempts = Vec::with_capacity(n_steps);
    for t in 0..n_steps {
        let totals: Vec<F> = curves.iter().map(|c| real_usize(c.total[t])).collect();
        let news: Vec<F> = curves.iter().map(|c| real_usize(c.new[t])).collect();
        let (mean_total, total_ci_lo, total_ci_hi) = mean_ci(&totals);
        let (mean_new, new_ci_lo, new_ci_hi) = mean_ci(&news);
        steps.push(StepStats {
            mean_total,
            total_ci_lo,
            total_ci_hi,
            mean_new,
            new_ci_lo,
            new_ci_hi,
        });
        clipped_attempts.push(curves.iter().map(|c| c.clipped[t]).sum());
    }
    Ok(EnsembleResult {
        steps,
        clipped_attempts,
        replicates: config.replicates,
    })
}

fn mean_ci<F: Real>(values: &[F]) -> (F, F, F) {
    let n = values.len();
    let mean = values.iter().copied().sum::<F>() / real_usize(n);
    if n < 2 {
        return (mean, mean, mean);
    }
    let var = values
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .sum::<F>()
        / real_usize(n - 1);
    let half = real::<F>(1.96) * var.sqrt() / real_usize::<F>(n).sqrt();
    (mean, mean - half, mean + half)
}

/// Transmission regime for analytic expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Uniform,
    Rank,
}

/// Analytic expected number of secondary infections from `node` in one step,
/// counting only neighbors marked susceptible. The rank regime uses the
/// node's full degree and static ranks, without clipping.
pub fn expected_secondary<F: Real>(
    graph: &Graph,
    node: usize,
    regime: Regime,
    beta: F,
    susceptible: &[bool],
) -> Result<F> {
    if node >= graph.n_nodes() {
        return Err(Error::InvalidNode {
            node,
            n_nodes: graph.n_nodes(),
        });
    }
    if susceptible.len() != graph.n_nodes() {
        return Err(Error::invalid(format!(
            "susceptible mask has {} entries for a {}-node graph",
            susceptible.len(),
            graph.n_nodes()
        )));
    }
    let deg = graph.degree(node);
    match regime {
        Regime::Uniform => {
            let count = graph
                .neighbors(node)
                .iter()
                .filter(|&&v| susceptible[v])
                .count();
            Ok(beta * real_usize(count))
        }
        Regime::Rank => {
            let ranks = {
                let nbrs = graph.neighbors(node);
                let mut order: Vec<usize> = (0..nbrs.len()).collect();
                order.sort_unstable_by_key(|&j| (graph.degree(nbrs[j]), nbrs[j], j));
                let mut ranks = vec![0u32; nbrs.len()];
                for (pos, &j) in order.iter().enumerate() {
                    ranks[j] = (pos + 1) as u32;
                }
                ranks
            };
            let mut sum = F::zero();
            for (j, &v) in graph.neighbors(node).iter().enumerate() {
                if susceptible[v] {
                    sum = sum + rank_beta(deg, ranks[j], beta, false)?;
                }
            }
            Ok(sum)
        }
    }
}

/// Emits `p_mix,step,mean_total,total_ci_lo,total_ci_hi,mean_new,new_ci_lo,new_ci_hi,clipped_attempts`.
pub fn write_epidemic_csv<F: Real, W: io::Write>(
    result: &EnsembleResult<F>,
    p_mix: F,
    mut w: W,
) -> io::Result<()> {
    writeln!(
        w,
        "p_mix,step,mean_total,total_ci_lo,total_ci_hi,mean_new,new_ci_lo,new_ci_hi,clipped_attempts"
    )?;
    for (t, s) in result.steps.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            p_mix,
            t,
            s.mean_total,
            s.total_ci_lo,
            s.total_ci_hi,
            s.mean_new,
            s.new_ci_lo,
            s.new_ci_hi,
            result.clipped_attempts[t]
        )?;
    }
    Ok(())
}
