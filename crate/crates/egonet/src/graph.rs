//! Undirected graphs and the configuration model.
//!
//! A graph is adjacency lists over zero-based node indices. Unsimplified
//! configuration-model output may contain self-loops (the node appears twice
//! in its own list, so the stub count is conserved) and parallel edges
//! (repeated entries). Simplification removes both, which can lower realized
//! degrees below the requested sequence.

use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from undirected edges. Each `(u, v)` pair adds one
    /// edge; a `(u, u)` pair adds a self-loop (u listed twice in its own
    /// list). Adjacency lists come out sorted ascending.
    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n_nodes];
        for &(u, v) in edges {
            if u >= n_nodes || v >= n_nodes {
                return Err(Error::InvalidNode {
                    node: u.max(v),
                    n_nodes,
                });
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph { adjacency })
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of edges, counting self-loops once and parallel edges with
    /// multiplicity.
    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.iter().map(Vec::len)
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().max().unwrap_or(0)
    }
}

/// Uniform random stub matching over a degree sequence. With `simplify` set,
/// self-loops are removed and parallel edges collapsed (node count is
/// preserved, realized degrees may drop); without it the realized degree of
/// every node equals its requested degree exactly.
pub fn configuration_graph(degrees: &[usize], seed: u64, simplify: bool) -> Result<Graph> {
    let total: usize = degrees.iter().sum();
    if !total.is_multiple_of(2) {
        return Err(Error::OddDegreeSum);
    }
    let mut stubs: Vec<usize> = Vec::with_capacity(total);
    for (node, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(node, d));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    stubs.shuffle(&mut rng);

    let mut edges: Vec<(usize, usize)> = stubs
        .chunks_exact(2)
        .map(|pair| (pair[0].min(pair[1]), pair[0].max(pair[1])))
        .collect();
    if simplify {
        edges.retain(|&(u, v)| u != v);
        edges.sort_unstable();
        edges.dedup();
    }
    Graph::from_edges(degrees.len(), &edges)
}

/// Writes the plain-text edge list: one `u v` pair per line, u ≤ v, lines
/// sorted; parallel edges repeat their line, a self-loop is one `u u` line.
pub fn write_edge_list<W: Write>(graph: &Graph, mut w: W) -> io::Result<()> {
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(graph.n_edges());
    for u in 0..graph.n_nodes() {
        let mut loops = 0usize;
        for &v in graph.neighbors(u) {
            if v == u {
                loops += 1;
            } else if v > u {
                edges.push((u, v));
            }
        }
        // Self-loops occupy two adjacency entries each.
        edges.extend(std::iter::repeat_n((u, u), loops / 2));
    }
    edges.sort_unstable();
    for (u, v) in edges {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

/// Reads an edge list written by [`write_edge_list`]. The node count is
/// inferred as the largest index plus one; blank lines are skipped.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut max_node = None::<usize>;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |s: Option<&str>| -> Result<usize> {
            s.and_then(|t| t.parse().ok()).ok_or(Error::Parse {
                line: (i + 1) as u64,
                message: format!("expected `u v` node pair, got `{line}`"),
            })
        };
        let u = parse(parts.next())?;
        let v = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(Error::Parse {
                line: (i + 1) as u64,
                message: format!("trailing fields after node pair in `{line}`"),
            });
        }
        max_node = Some(max_node.map_or(u.max(v), |m| m.max(u.max(v))));
        edges.push((u, v));
    }
    let n = max_node.map_or(0, |m| m + 1);
    Graph::from_edges(n, &edges)
}
