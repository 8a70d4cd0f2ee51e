//! Problem instances: simple undirected graphs, the edge-list file format,
//! cubic/planarity screening and an exhaustive maximum-independent-set oracle.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default vertex limit for [`mis_oracle`].
pub const DEFAULT_ORACLE_LIMIT: usize = 24;

/// An undirected edge stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(pub usize, pub usize);

impl Edge {
    /// Canonical edge between two distinct vertices.
    pub fn new(a: usize, b: usize) -> Self {
        if a < b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn other(&self, v: usize) -> usize {
        if v == self.0 {
            self.1
        } else {
            self.0
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: malformed input: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: duplicate edge {edge}")]
    DuplicateEdge { line: usize, edge: Edge },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("header declares {declared} edges but {found} were listed")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("instance with {n} vertices exceeds the exhaustive limit of {limit}")]
    TooLarge { n: usize, limit: usize },
}

impl GraphError {
    /// Line number of the offending input line, when there is one.
    pub fn line(&self) -> Option<usize> {
        match self {
            GraphError::Malformed { line, .. }
            | GraphError::VertexOutOfRange { line, .. }
            | GraphError::DuplicateEdge { line, .. }
            | GraphError::SelfLoop { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Simple undirected graph on vertices `0..n`.
///
/// Edges are kept sorted; adjacency lists are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range labels.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (i, (a, b)) in edges.into_iter().enumerate() {
            let line = i + 2;
            if a == b {
                return Err(GraphError::SelfLoop { line, vertex: a });
            }
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { line, vertex: v, n });
                }
            }
            let e = Edge::new(a, b);
            if !set.insert(e) {
                return Err(GraphError::DuplicateEdge { line, edge: e });
            }
        }
        Ok(Self::from_edge_set(n, set))
    }

    fn from_edge_set(n: usize, set: BTreeSet<Edge>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for e in &set {
            adjacency[e.0].push(e.1);
            adjacency[e.1].push(e.0);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph {
            n,
            edges: set.into_iter().collect(),
            adjacency,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn is_cubic(&self) -> bool {
        self.adjacency.iter().all(|a| a.len() == 3)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Bit mask of the neighbourhood of every vertex (requires `n <= 64`).
    pub(crate) fn neighbor_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64, "bit-mask routines support at most 64 vertices");
        self.adjacency
            .iter()
            .map(|adj| adj.iter().fold(0u64, |m, &w| m | (1 << w)))
            .collect()
    }

    /// True when no two members of `set` are adjacent.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &a)| set[i + 1..].iter().all(|&b| !self.has_edge(a, b)))
    }

    /// Serializes to the edge-list format read by [`parse_graph`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for e in &self.edges {
            out.push_str(&format!("{} {}\n", e.0, e.1));
        }
        out
    }

    // Named instances used throughout the test-suite and examples.

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        Self::new(n, edges).expect("complete graph is simple")
    }

    pub fn complete_bipartite(p: usize, q: usize) -> Self {
        let edges = (0..p).flat_map(|a| (0..q).map(move |b| (a, p + b)));
        Self::new(p + q, edges).expect("complete bipartite graph is simple")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|v| (v - 1, v))).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle is simple")
    }

    /// The 3-cube Q3: vertices are 3-bit words, edges join words at Hamming distance 1.
    pub fn cube() -> Self {
        let edges = (0..8usize).flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b)))).filter(|(a, b)| a < b);
        Self::new(8, edges).expect("cube is simple")
    }

    /// The k-prism: two k-cycles joined by a perfect matching (cubic, planar).
    pub fn prism(k: usize) -> Self {
        assert!(k >= 3);
        let mut edges = Vec::new();
        for i in 0..k {
            edges.push((i, (i + 1) % k));
            edges.push((k + i, k + (i + 1) % k));
            edges.push((i, k + i));
        }
        Self::new(2 * k, edges).expect("prism is simple")
    }

    /// Regular dodecahedron (20 vertices, cubic, planar).
    pub fn dodecahedron() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5)); // outer pentagon
            edges.push((i, 5 + 2 * i)); // spokes into the middle 10-cycle
            edges.push((15 + i, 15 + (i + 1) % 5)); // inner pentagon
            edges.push((6 + 2 * i, 15 + i));
        }
        for j in 0..10 {
            edges.push((5 + j, 5 + (j + 1) % 10));
        }
        Self::new(20, edges).expect("dodecahedron is simple")
    }

    /// Two copies of K4 with one edge subdivided, the subdivision vertices
    /// joined by a bridge: a 10-vertex cubic planar graph with a cut edge.
    pub fn bridged_k4_pair() -> Self {
        let mut edges = Vec::new();
        for base in [0, 5] {
            let (a, b, c, d, s) = (base, base + 1, base + 2, base + 3, base + 4);
            edges.extend([(a, c), (a, d), (b, c), (b, d), (c, d), (a, s), (s, b)]);
        }
        edges.push((4, 9));
        Self::new(10, edges).expect("bridged pair is simple")
    }
}

/// Parses the edge-list format: header `n m`, then `m` lines `u v`.
///
/// Lines starting with `#` and blank lines are skipped; CRLF is accepted.
/// Error line numbers are 1-based positions in the original text.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut set = BTreeSet::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = idx + 1;
        let content = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(GraphError::Malformed {
                line,
                message: format!("expected two integers, found {:?}", content),
            });
        }
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| GraphError::Malformed {
                line,
                message: format!("not a non-negative integer: {:?}", s),
            })
        };
        let (a, b) = (parse(fields[0])?, parse(fields[1])?);
        let Some((n, _)) = header else {
            header = Some((a, b));
            continue;
        };
        if a == b {
            return Err(GraphError::SelfLoop { line, vertex: a });
        }
        for v in [a, b] {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { line, vertex: v, n });
            }
        }
        let e = Edge::new(a, b);
        if !set.insert(e) {
            return Err(GraphError::DuplicateEdge { line, edge: e });
        }
    }
    let Some((n, m)) = header else {
        return Err(GraphError::Malformed {
            line: 1,
            message: "missing \"n m\" header".into(),
        });
    };
    if set.len() != m {
        return Err(GraphError::EdgeCountMismatch {
            declared: m,
            found: set.len(),
        });
    }
    Ok(Graph::from_edge_set(n, set))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub is_cubic: bool,
    /// Necessary conditions only (|E| <= 3n - 6); the embedder decides planarity.
    pub is_planar_candidate: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.is_cubic && self.is_planar_candidate
    }
}

pub fn validate_cubic_planar(g: &Graph) -> ValidationReport {
    let mut violations = Vec::new();
    for v in 0..g.n() {
        if g.degree(v) != 3 {
            violations.push(Violation {
                code: "DegreeNotThree".into(),
                message: format!("vertex {} has degree {}", v, g.degree(v)),
            });
        }
    }
    let is_cubic = violations.is_empty();
    // Euler's bound only applies from three vertices on.
    let is_planar_candidate = g.n() < 3 || g.edge_count() <= 3 * g.n() - 6;
    if !is_planar_candidate {
        violations.push(Violation {
            code: "TooManyEdges".into(),
            message: format!("{} edges exceed the planar bound 3n-6 = {}", g.edge_count(), 3 * g.n() - 6),
        });
    }
    ValidationReport {
        is_cubic,
        is_planar_candidate,
        violations,
    }
}

/// A maximum independent set together with its size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependentSetWitness {
    pub members: Vec<usize>,
    pub cardinality: usize,
}

impl fmt::Display for IndependentSetWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.members.iter().map(|v| v.to_string()).collect();
        write!(f, "{}: {{{}}}", self.cardinality, list.join(", "))
    }
}

/// Exhaustive maximum independent set.
///
/// Among all optimal sets, the witness is the lexicographically smallest
/// sorted member list. The search is split on the first vertices and run
/// in parallel; every branch is exhaustive, so the result is deterministic.
pub fn mis_oracle(g: &Graph, limit: usize) -> Result<IndependentSetWitness, GraphError> {
    if g.n() > limit || g.n() > 63 {
        return Err(GraphError::TooLarge { n: g.n(), limit: limit.min(63) });
    }
    let nbr = g.neighbor_masks();
    let n = g.n();
    // Branch on the decisions for the first `split` vertices.
    let split = n.min(6);
    let best = (0u64..1 << split)
        .into_par_iter()
        .filter_map(|prefix| {
            let mut chosen = 0u64;
            for v in 0..split {
                if prefix >> v & 1 == 1 {
                    if chosen & nbr[v] != 0 {
                        return None;
                    }
                    chosen |= 1 << v;
                }
            }
            let mut best = (chosen.count_ones(), chosen);
            search(&nbr, n, split, chosen, &mut best);
            Some(best)
        })
        .reduce_with(better)
        .unwrap_or((0, 0));
    let members: Vec<usize> = (0..n).filter(|&v| best.1 >> v & 1 == 1).collect();
    Ok(IndependentSetWitness {
        cardinality: members.len(),
        members,
    })
}

/// Larger cardinality wins; ties go to the lexicographically smaller sorted member list.
fn better(a: (u32, u64), b: (u32, u64)) -> (u32, u64) {
    match a.0.cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if lex_smaller(a.1, b.1) {
                a
            } else {
                b
            }
        }
    }
}

/// Sorted-member-list comparison of two sets of equal size: the set holding
/// the smallest element of the symmetric difference comes first.
fn lex_smaller(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    diff != 0 && a & (diff & diff.wrapping_neg()) != 0
}

fn search(nbr: &[u64], n: usize, v: usize, chosen: u64, best: &mut (u32, u64)) {
    let size = chosen.count_ones();
    if v == n {
        *best = better(*best, (size, chosen));
        return;
    }
    // Every remaining vertex could still join: prune only when that cannot beat the incumbent.
    if size + ((n - v) as u32) < best.0 {
        return;
    }
    if chosen & nbr[v] == 0 {
        search(nbr, n, v + 1, chosen | 1 << v, best);
    }
    search(nbr, n, v + 1, chosen, best);
}
