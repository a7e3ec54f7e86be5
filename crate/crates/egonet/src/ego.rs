//! Data model for weighted egocentric network datasets.
//!
//! An ego is an individual with an outdegree (follower count, or count of
//! unique call/text recipients) and a list of alters ranked by how often the
//! ego contacted them: rank 1 is the most contacted alter. An alter's own
//! outdegree may be unavailable; such alters keep their rank but are excluded
//! from degree calculations.
//!
//! Datasets are exchanged as dyad CSV files, one row per ego-alter pair:
//!
//! ```text
//! ego_id,ego_outdegree,alter_id,contact_volume,alter_outdegree[,rank]
//! ```
//!
//! `alter_outdegree` left empty means unavailable (never 0 — 0 is a legal
//! degree). The `rank` column is optional; when present the file's ranks are
//! authoritative, which allows gaps (an excluded alter keeps its original
//! rank). Without it, ranks are assigned by descending contact volume with
//! ties broken by ascending alter id.

use std::cmp::Reverse;
use std::collections::{HashMap, HashSet};
use std::io;

use crate::{Error, Result};

/// One alter of an ego.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlterRecord {
    pub alter_id: String,
    /// 1 = most contacted. Unique within one ego.
    pub rank: u32,
    pub contact_volume: u64,
    /// `None` = unavailable in the source data.
    pub outdegree: Option<u64>,
}

/// An ego with its rank-ordered alters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgoRecord {
    pub ego_id: String,
    pub outdegree: u64,
    /// Sorted strictly ascending by rank.
    pub alters: Vec<AlterRecord>,
}

impl EgoRecord {
    /// Alters whose outdegree is available.
    pub fn available_alters(&self) -> impl Iterator<Item = &AlterRecord> {
        self.alters.iter().filter(|a| a.outdegree.is_some())
    }

    pub fn n_available(&self) -> usize {
        self.available_alters().count()
    }

    pub fn alter_at_rank(&self, rank: u32) -> Option<&AlterRecord> {
        self.alters
            .binary_search_by_key(&rank, |a| a.rank)
            .ok()
            .map(|i| &self.alters[i])
    }
}

/// A collection of egocentric records with unique ego ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EgoDataset {
    pub egos: Vec<EgoRecord>,
}

impl EgoDataset {
    pub fn n_dyads(&self) -> usize {
        self.egos.iter().map(|e| e.alters.len()).sum()
    }

    pub fn n_dyads_with_degree(&self) -> usize {
        self.egos.iter().map(|e| e.n_available()).sum()
    }

    /// Checks every record-level invariant and returns a report; the dataset
    /// itself is left untouched.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut seen_ids = HashSet::new();
        for ego in &self.egos {
            if !seen_ids.insert(ego.ego_id.as_str()) {
                violations.push(Violation {
                    ego_id: ego.ego_id.clone(),
                    description: "duplicate ego_id".into(),
                });
            }
            for pair in ego.alters.windows(2) {
                if pair[1].rank <= pair[0].rank {
                    violations.push(Violation {
                        ego_id: ego.ego_id.clone(),
                        description: format!(
                            "alters not strictly ascending by rank ({} then {})",
                            pair[0].rank, pair[1].rank
                        ),
                    });
                }
                if pair[1].contact_volume > pair[0].contact_volume {
                    violations.push(Violation {
                        ego_id: ego.ego_id.clone(),
                        description: format!(
                            "contact volume increases with rank ({} at rank {} vs {} at rank {})",
                            pair[0].contact_volume,
                            pair[0].rank,
                            pair[1].contact_volume,
                            pair[1].rank
                        ),
                    });
                }
            }
            for alter in &ego.alters {
                if alter.rank < 1 {
                    violations.push(Violation {
                        ego_id: ego.ego_id.clone(),
                        description: format!("alter {} has rank 0", alter.alter_id),
                    });
                }
                if alter.contact_volume < 1 {
                    violations.push(Violation {
                        ego_id: ego.ego_id.clone(),
                        description: format!("alter {} has contact volume 0", alter.alter_id),
                    });
                }
            }
        }
        ValidationReport {
            n_egos: self.egos.len(),
            n_dyads: self.n_dyads(),
            n_dyads_with_degree: self.n_dyads_with_degree(),
            violations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub ego_id: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub n_egos: usize,
    pub n_dyads: usize,
    pub n_dyads_with_degree: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Ranks alters by descending contact volume, ties broken by ascending
/// alter id. Ranks 1..n are assigned consecutively; outdegrees are left
/// unavailable for the caller to fill in.
pub fn rank_alters(pairs: Vec<(String, u64)>) -> Vec<AlterRecord> {
    let mut pairs = pairs;
    pairs.sort_by(|a, b| (Reverse(a.1), &a.0).cmp(&(Reverse(b.1), &b.0)));
    pairs
        .into_iter()
        .enumerate()
        .map(|(i, (alter_id, contact_volume))| AlterRecord {
            alter_id,
            rank: (i + 1) as u32,
            contact_volume,
            outdegree: None,
        })
        .collect()
}

/// Number of dyads at each alter rank, reported for every rank from 1 up to
/// the maximum rank present (zero-count ranks included). With
/// `only_available` set, dyads whose alter outdegree is unavailable are
/// skipped and the maximum is taken over the remaining dyads.
pub fn dyads_per_rank(dataset: &EgoDataset, only_available: bool) -> Vec<(u32, u64)> {
    let mut max_rank = 0u32;
    for ego in &dataset.egos {
        for alter in &ego.alters {
            if only_available && alter.outdegree.is_none() {
                continue;
            }
            max_rank = max_rank.max(alter.rank);
        }
    }
    let mut counts = vec![0u64; max_rank as usize];
    for ego in &dataset.egos {
        for alter in &ego.alters {
            if only_available && alter.outdegree.is_none() {
                continue;
            }
            if alter.rank >= 1 {
                counts[(alter.rank - 1) as usize] += 1;
            }
        }
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| ((i + 1) as u32, c))
        .collect()
}

const BASE_HEADER: [&str; 5] = [
    "ego_id",
    "ego_outdegree",
    "alter_id",
    "contact_volume",
    "alter_outdegree",
];

// (alter_id, volume, outdegree, rank from file, line)
type RawDyad = (String, u64, Option<u64>, Option<u32>, u64);

struct EgoBuilder {
    ego_id: String,
    outdegree: u64,
    rows: Vec<RawDyad>,
}

/// Parses a dyad CSV stream. Rows for one ego need not be contiguous; egos
/// come out in first-appearance order. Returns the dataset together with its
/// validation report.
///
/// Structural problems (bad header, wrong column count, non-numeric counts,
/// duplicate ranks, an ego listed with two different outdegrees) are hard
/// errors; semantic invariant breaches (volume increasing with rank, zero
/// volumes) land in the report.
pub fn parse_dyad_csv<R: io::Read>(reader: R) -> Result<(EgoDataset, ValidationReport)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);

    let headers = rdr.headers().map_err(csv_error)?.clone();
    let has_rank = match headers.len() {
        5 => false,
        6 if headers.get(5) == Some("rank") => true,
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!(
                    "bad header: expected `{}[,rank]`, got `{}`",
                    BASE_HEADER.join(","),
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            })
        }
    };
    for (i, expect) in BASE_HEADER.iter().enumerate() {
        if headers.get(i) != Some(*expect) {
            return Err(Error::Parse {
                line: 1,
                message: format!("bad header: column {} must be `{expect}`", i + 1),
            });
        }
    }

    let mut order: Vec<EgoBuilder> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();

    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");

        let ego_id = field(0).to_string();
        if ego_id.is_empty() {
            return Err(parse_err(line, "empty ego_id"));
        }
        let ego_outdegree = parse_count(field(1), "ego_outdegree", line)?;
        let alter_id = field(2).to_string();
        if alter_id.is_empty() {
            return Err(parse_err(line, "empty alter_id"));
        }
        let contact_volume = parse_count(field(3), "contact_volume", line)?;
        let alter_outdegree = match field(4) {
            "" => None,
            s => Some(parse_count(s, "alter_outdegree", line)?),
        };
        let rank = if has_rank {
            let r = parse_count(field(5), "rank", line)?;
            if r < 1 {
                return Err(parse_err(line, "rank must be ≥ 1"));
            }
            Some(u32::try_from(r).map_err(|_| parse_err(line, "rank does not fit in 32 bits"))?)
        } else {
            None
        };

        let slot = match index.get(&ego_id) {
            Some(&i) => i,
            None => {
                index.insert(ego_id.clone(), order.len());
                order.push(EgoBuilder {
                    ego_id,
                    outdegree: ego_outdegree,
                    rows: Vec::new(),
                });
                order.len() - 1
            }
        };
        let builder = &mut order[slot];
        if builder.outdegree != ego_outdegree {
            return Err(parse_err(
                line,
                format!(
                    "ego {} listed with outdegree {} here but {} earlier",
                    builder.ego_id, ego_outdegree, builder.outdegree
                ),
            ));
        }
        builder
            .rows
            .push((alter_id, contact_volume, alter_outdegree, rank, line));
    }

    let mut egos = Vec::with_capacity(order.len());
    for builder in order {
        let alters = if has_rank {
            let mut seen = HashSet::new();
            for (_, _, _, rank, _) in &builder.rows {
                let rank = rank.expect("rank column parsed");
                if !seen.insert(rank) {
                    return Err(Error::DuplicateRank {
                        ego_id: builder.ego_id,
                        rank,
                    });
                }
            }
            let mut alters: Vec<AlterRecord> = builder
                .rows
                .into_iter()
                .map(|(alter_id, contact_volume, outdegree, rank, _)| AlterRecord {
                    alter_id,
                    rank: rank.expect("rank column parsed"),
                    contact_volume,
                    outdegree,
                })
                .collect();
            alters.sort_by_key(|a| a.rank);
            alters
        } else {
            let mut rows = builder.rows;
            rows.sort_by(|a, b| (Reverse(a.1), &a.0).cmp(&(Reverse(b.1), &b.0)));
            rows.into_iter()
                .enumerate()
                .map(|(i, (alter_id, contact_volume, outdegree, _, _))| AlterRecord {
                    alter_id,
                    rank: (i + 1) as u32,
                    contact_volume,
                    outdegree,
                })
                .collect()
        };
        egos.push(EgoRecord {
            ego_id: builder.ego_id,
            outdegree: builder.outdegree,
            alters,
        });
    }

    let dataset = EgoDataset { egos };
    let report = dataset.validate();
    Ok((dataset, report))
}

/// Writes a dataset in dyad CSV form, always including the rank column so
/// that reparsing reproduces the dataset field for field. The format is one
/// row per dyad, so an ego without alters has no representation and is
/// absent after reparsing.
pub fn write_dyad_csv<W: io::Write>(dataset: &EgoDataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = BASE_HEADER.to_vec();
    header.push("rank");
    wtr.write_record(&header).map_err(csv_error)?;
    for ego in &dataset.egos {
        for alter in &ego.alters {
            wtr.write_record([
                ego.ego_id.as_str(),
                &ego.outdegree.to_string(),
                alter.alter_id.as_str(),
                &alter.contact_volume.to_string(),
                &alter.outdegree.map_or(String::new(), |d| d.to_string()),
                &alter.rank.to_string(),
            ])
            .map_err(csv_error)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

fn parse_count(s: &str, what: &str, line: u64) -> Result<u64> {
    s.trim()
        .parse::<u64>()
        .map_err(|_| parse_err(line, format!("{what} is not a non-negative integer: `{s}`")))
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    match err.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => parse_err(
            line,
            format!("expected {expected_len} columns, got {len}"),
        ),
        csv::ErrorKind::Io(_) => parse_err(line, "I/O error while reading CSV"),
        _ => parse_err(line, err.to_string()),
    }
}
