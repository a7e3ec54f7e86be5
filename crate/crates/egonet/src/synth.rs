//! Degree sequences and synthetic egocentric datasets.
//!
//! Real contact data is proprietary, so analyses run against synthetic
//! datasets whose structure is controllable: contact volume follows
//! round(base_volume · rank^(−zipf_exponent)) floored at 1, alter degrees
//! come from a pluggable degree model, and a `coupling` knob interpolates
//! between "alter degree independent of rank" (0) and "alter degree sorted
//! ascending with rank, so the most contacted alter is the least popular"
//! (1). A fraction of alter degrees can be masked as unavailable to mimic
//! collection gaps.

use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::ego::{AlterRecord, EgoDataset, EgoRecord};
use crate::{Error, Result};

/// A degree sequence for the configuration model; the sum is made even at
/// construction by incrementing node 0 if needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degrees: Vec<usize>,
}

impl DegreeSequence {
    pub fn new(mut degrees: Vec<usize>) -> Self {
        if degrees.iter().sum::<usize>() % 2 != 0 {
            degrees[0] += 1;
        }
        DegreeSequence { degrees }
    }

    pub fn sum(&self) -> usize {
        self.degrees.iter().sum()
    }
}

/// Degree model for sampled nodes and alters.
#[derive(Debug, Clone, PartialEq)]
pub enum DegreeSpec {
    /// Discretized lognormal: degrees are `round(exp(N(mu, sigma²)))`.
    LogNormal { mu: f64, sigma: f64 },
    /// Explicit distribution over degree values; weights need not be
    /// normalized.
    Histogram { entries: Vec<(usize, f64)> },
}

/// Node count of the phone-network-sized preset.
pub const PAPER_SCALE_NODES: usize = 88_137;

impl DegreeSpec {
    /// Lognormal tuned so the mode sits near 100 and the mean near 199,
    /// which at [`PAPER_SCALE_NODES`] nodes targets ≈ 8.77M edges.
    pub fn paper_scale() -> Self {
        // mode = exp(mu − sigma²), mean = exp(mu + sigma²/2):
        // sigma² = ln(199.1/100)/1.5, mu = ln(100) + sigma².
        DegreeSpec::LogNormal {
            mu: 5.0644,
            sigma: 0.6776,
        }
    }

    fn validate(&self, min_degree: usize) -> Result<()> {
        match self {
            DegreeSpec::LogNormal { mu, sigma } => {
                if !mu.is_finite() || !sigma.is_finite() || *sigma <= 0.0 {
                    return Err(Error::invalid(format!(
                        "lognormal needs finite mu and sigma > 0, got mu={mu}, sigma={sigma}"
                    )));
                }
                Ok(())
            }
            DegreeSpec::Histogram { entries } => {
                if entries.is_empty() {
                    return Err(Error::invalid("histogram has no entries".to_string()));
                }
                if entries.iter().any(|&(_, p)| !p.is_finite() || p < 0.0) {
                    return Err(Error::invalid(
                        "histogram probabilities must be finite and ≥ 0".to_string(),
                    ));
                }
                let usable: f64 = entries
                    .iter()
                    .filter(|&&(k, _)| k >= min_degree)
                    .map(|&(_, p)| p)
                    .sum();
                if usable <= 0.0 {
                    return Err(Error::invalid(format!(
                        "histogram has no probability mass at degree ≥ {min_degree}"
                    )));
                }
                Ok(())
            }
        }
    }
}

enum DegreeSampler {
    LogNormal(LogNormal<f64>),
    Histogram { entries: Vec<(usize, f64)>, total: f64 },
}

impl DegreeSampler {
    fn new(spec: &DegreeSpec, min_degree: usize) -> Result<Self> {
        spec.validate(min_degree)?;
        Ok(match spec {
            DegreeSpec::LogNormal { mu, sigma } => DegreeSampler::LogNormal(
                LogNormal::new(*mu, *sigma)
                    .map_err(|e| Error::invalid(format!("lognormal: {e}")))?,
            ),
            DegreeSpec::Histogram { entries } => {
                let total = entries.iter().map(|&(_, p)| p).sum();
                DegreeSampler::Histogram {
                    entries: entries.clone(),
                    total,
                }
            }
        })
    }

    /// One degree ≥ `min_degree`, by rejection below the floor.
    fn draw(&self, min_degree: usize, rng: &mut ChaCha8Rng) -> Result<usize> {
        const MAX_ATTEMPTS: usize = 100_000;
        for _ in 0..MAX_ATTEMPTS {
            let k = match self {
                DegreeSampler::LogNormal(dist) => dist.sample(rng).round() as usize,
                DegreeSampler::Histogram { entries, total } => {
                    let mut u = rng.random::<f64>() * total;
                    let mut chosen = entries[entries.len() - 1].0;
                    for &(k, p) in entries {
                        if u < p {
                            chosen = k;
                            break;
                        }
                        u -= p;
                    }
                    chosen
                }
            };
            if k >= min_degree {
                return Ok(k);
            }
        }
        Err(Error::invalid(format!(
            "degree floor {min_degree} rejected {MAX_ATTEMPTS} consecutive draws"
        )))
    }
}

/// Reads a `degree,probability` CSV (header required) into histogram
/// entries for [`DegreeSpec::Histogram`].
pub fn read_degree_histogram<R: io::Read>(reader: R) -> Result<Vec<(usize, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if headers.len() != 2 || headers.get(0) != Some("degree") || headers.get(1) != Some("probability") {
        return Err(Error::Parse {
            line: 1,
            message: "expected header `degree,probability`".to_string(),
        });
    }
    let mut entries = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let degree: usize = record
            .get(0)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                line,
                message: format!("bad degree `{}`", record.get(0).unwrap_or("")),
            })?;
        let probability: f64 = record
            .get(1)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                line,
                message: format!("bad probability `{}`", record.get(1).unwrap_or("")),
            })?;
        entries.push((degree, probability));
    }
    Ok(entries)
}

/// Samples `n` degrees ≥ `min_degree` from the spec, then fixes parity so the
/// sum is even. Deterministic given the seed.
pub fn sample_degree_sequence(
    spec: &DegreeSpec,
    n: usize,
    min_degree: usize,
    seed: u64,
) -> Result<DegreeSequence> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 nodes, got {n}")));
    }
    let sampler = DegreeSampler::new(spec, min_degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degrees = Vec::with_capacity(n);
    for _ in 0..n {
        degrees.push(sampler.draw(min_degree, &mut rng)?);
    }
    Ok(DegreeSequence::new(degrees))
}

/// Parameters for [`synth_ego_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub n_egos: usize,
    pub alters_per_ego: usize,
    /// Exponent of the rank-volume decay, > 0.
    pub zipf_exponent: f64,
    /// Contact volume at rank 1, > 0.
    pub base_volume: f64,
    /// 0 = alter degrees independent of rank, 1 = always sorted ascending
    /// (rank 1 gets the lowest degree).
    pub coupling: f64,
    pub degree_spec: DegreeSpec,
    pub min_degree: usize,
    /// Probability that an alter's outdegree is masked as unavailable.
    pub fraction_unavailable: f64,
}

impl SynthParams {
    fn validate(&self) -> Result<()> {
        if self.n_egos < 1 {
            return Err(Error::invalid("n_egos must be ≥ 1".to_string()));
        }
        if self.alters_per_ego < 1 {
            return Err(Error::invalid("alters_per_ego must be ≥ 1".to_string()));
        }
        if self.zipf_exponent.is_nan() || self.zipf_exponent <= 0.0 {
            return Err(Error::invalid(format!(
                "zipf_exponent must be > 0, got {}",
                self.zipf_exponent
            )));
        }
        if self.base_volume.is_nan() || self.base_volume <= 0.0 {
            return Err(Error::invalid(format!(
                "base_volume must be > 0, got {}",
                self.base_volume
            )));
        }
        if !(0.0..=1.0).contains(&self.coupling) {
            return Err(Error::invalid(format!(
                "coupling must be in [0,1], got {}",
                self.coupling
            )));
        }
        if !(0.0..1.0).contains(&self.fraction_unavailable) {
            return Err(Error::invalid(format!(
                "fraction_unavailable must be in [0,1), got {}",
                self.fraction_unavailable
            )));
        }
        self.degree_spec.validate(self.min_degree)
    }
}

/// Generates a synthetic dataset. Per ego, the draw order is fixed: ego
/// outdegree, then the alter degrees in rank order, then the coupling coin,
/// then the availability masks in rank order — so output is a deterministic
/// function of (params, seed).
pub fn synth_ego_dataset(params: &SynthParams, seed: u64) -> Result<EgoDataset> {
    params.validate()?;
    let sampler = DegreeSampler::new(&params.degree_spec, params.min_degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let volumes: Vec<u64> = (1..=params.alters_per_ego)
        .map(|r| {
            let v = params.base_volume * (r as f64).powf(-params.zipf_exponent);
            (v.round() as u64).max(1)
        })
        .collect();

    let mut egos = Vec::with_capacity(params.n_egos);
    for e in 0..params.n_egos {
        let ego_outdegree = sampler.draw(params.min_degree, &mut rng)? as u64;
        let mut degrees = Vec::with_capacity(params.alters_per_ego);
        for _ in 0..params.alters_per_ego {
            degrees.push(sampler.draw(params.min_degree, &mut rng)? as u64);
        }
        if rng.random::<f64>() < params.coupling {
            degrees.sort_unstable();
        }
        let mut alters: Vec<AlterRecord> = degrees
            .into_iter()
            .enumerate()
            .map(|(i, k)| AlterRecord {
                alter_id: format!("e{e}a{}", i + 1),
                rank: (i + 1) as u32,
                contact_volume: volumes[i],
                outdegree: Some(k),
            })
            .collect();
        for alter in &mut alters {
            if rng.random::<f64>() < params.fraction_unavailable {
                alter.outdegree = None;
            }
        }
        egos.push(EgoRecord {
            ego_id: format!("e{e}"),
            outdegree: ego_outdegree,
            alters,
        });
    }
    Ok(EgoDataset { egos })
}
