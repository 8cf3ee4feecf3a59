//! Stable-set bounds as polynomial inequalities modulo the edge ideal.
//!
//! With `x_i ∈ {0,1}` encoded by `x_i² = x_i` and edges by `x_i x_j = 0`,
//! a bound `b − Σ x_i ≥ 0` is proved by a Krivine combination that agrees
//! with the target after reduction modulo those equations.

mod ideal;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use ideal::{AxiomMultiple, EdgeIdeal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: cannot parse {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: vertex {vertex} is outside 1..={n}")]
    OutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {u}-{v}")]
    Duplicate { line: usize, u: usize, v: usize },
    #[error("graph has no vertices")]
    Empty,
}

/// Simple undirected graph on vertices `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Stored zero-based with `i < j`.
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from one-based edge pairs.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph { n, edges: BTreeSet::new() };
        for (k, &(u, v)) in edges.iter().enumerate() {
            g.insert(k + 1, u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
        Graph::new(n, &edges).expect("complete graph is simple")
    }

    pub fn edgeless(n: usize) -> Self {
        Graph { n, edges: BTreeSet::new() }
    }

    fn insert(&mut self, line: usize, u: usize, v: usize) -> Result<(), GraphError> {
        for w in [u, v] {
            if w == 0 || w > self.n {
                return Err(GraphError::OutOfRange { line, vertex: w, n: self.n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop { line, vertex: u });
        }
        let key = (u.min(v) - 1, u.max(v) - 1);
        if !self.edges.insert(key) {
            return Err(GraphError::Duplicate { line, u, v });
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Zero-based edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }
}

impl fmt::Display for Graph {
    /// DIMACS-style text accepted by [`parse_graph`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p edge {} {}", self.n, self.edges.len())?;
        for (i, j) in self.edges() {
            writeln!(f, "e {} {}", i + 1, j + 1)?;
        }
        Ok(())
    }
}

/// Parses an edge list (`u v` per line, one-based) or DIMACS text
/// (`p edge n m` header, `e u v` lines). Blank lines and lines starting with
/// `#` or `c` are ignored. Without a header the vertex count is the largest
/// index seen.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut declared: Option<usize> = None;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') || s.starts_with("c ") || s == "c" {
            continue;
        }
        let malformed = || GraphError::Malformed { line, text: raw.to_string() };
        let fields: Vec<&str> = s.split_whitespace().collect();
        match fields.as_slice() {
            ["p", _, n, _] | ["p", _, n] => {
                if declared.is_some() || !pairs.is_empty() {
                    return Err(malformed());
                }
                declared = Some(n.parse().map_err(|_| malformed())?);
            }
            ["e", u, v] | [u, v] => {
                let u: usize = u.parse().map_err(|_| malformed())?;
                let v: usize = v.parse().map_err(|_| malformed())?;
                pairs.push((line, u, v));
            }
            _ => return Err(malformed()),
        }
    }
    let n = match declared {
        Some(n) => n,
        None => pairs.iter().map(|&(_, u, v)| u.max(v)).max().unwrap_or(0),
    };
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut g = Graph::edgeless(n);
    for (line, u, v) in pairs {
        g.insert(line, u, v)?;
    }
    Ok(g)
}
