//! Planar orthogonal embeddings of graphs with maximum degree three.
//!
//! An embedding places every vertex on a rectangular lattice and routes
//! every edge along an axis-parallel lattice path. Paths may meet only at
//! shared endpoints; their interior points are the dummy sites that later
//! carry the ferromagnetic wires.

mod draw;
mod improve;
mod planar;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, Graph};
use draw::{compact, visibility_drawing, Drawing};
use improve::improve;
use planar::{biconnect, planar_rotations};

/// Rotation systems examined per component before giving up.
const MAX_ROTATION_TRIALS: u64 = 1 << 22;
/// Planar rotation systems tried as starting points for the drawing search.
const ROTATION_CANDIDATES: usize = 8;
/// Best raw drawings handed to the local search.
const POLISHED_CANDIDATES: usize = 4;

pub const STRATEGY: &str = "planar-rotation-search+visibility";

/// Lattice coordinates; origin top-left, rows grow downward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct GridPoint {
    pub row: usize,
    pub col: usize,
}

impl GridPoint {
    pub const fn new(row: usize, col: usize) -> Self {
        GridPoint { row, col }
    }

    pub fn manhattan(&self, other: &GridPoint) -> usize {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }

    pub fn is_adjacent(&self, other: &GridPoint) -> bool {
        self.manhattan(other) == 1
    }
}

impl From<[usize; 2]> for GridPoint {
    fn from(a: [usize; 2]) -> Self {
        GridPoint::new(a[0], a[1])
    }
}

impl From<GridPoint> for [usize; 2] {
    fn from(p: GridPoint) -> Self {
        [p.row, p.col]
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Maximum grid extent accepted by [`embed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridBudget {
    pub rows: usize,
    pub cols: usize,
}

impl GridBudget {
    pub fn square(n: usize) -> Self {
        GridBudget { rows: n, cols: n }
    }

    /// The default budget `n × n` for an `n`-vertex graph.
    pub fn for_graph(g: &Graph) -> Self {
        Self::square(g.n().max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("vertex {vertex} has degree {degree}; orthogonal embedding needs degree <= 3")]
    DegreeTooHigh { vertex: usize, degree: usize },
    #[error("graph is not planar (component containing vertex {witness} admits no planar rotation system)")]
    NonPlanar { witness: usize },
    #[error("embedding needs a {rows}x{cols} grid, budget is {budget_rows}x{budget_cols}")]
    BudgetExceeded {
        rows: usize,
        cols: usize,
        budget_rows: usize,
        budget_cols: usize,
    },
    #[error("planarity search gave up after {0} rotation systems")]
    SearchLimit(u64),
}

/// Vertex positions plus one lattice path per edge.
///
/// `edge_paths[(k, l)]` starts at `vertex_at[k]` and ends at `vertex_at[l]` (k < l).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthogonalEmbedding {
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub strategy: String,
    #[serde(rename = "vertices", with = "vertex_map")]
    pub vertex_at: Vec<GridPoint>,
    #[serde(rename = "paths")]
    pub edge_paths: BTreeMap<Edge, Vec<GridPoint>>,
}

/// `"vertices": {"0": [r, c], ...}` with labels `0..n` in order.
mod vertex_map {
    use super::GridPoint;
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(v: &[GridPoint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(v.iter().enumerate())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<GridPoint>, D::Error> {
        let map = BTreeMap::<usize, GridPoint>::deserialize(d)?;
        for (i, k) in map.keys().enumerate() {
            if *k != i {
                return Err(D::Error::custom(format!("vertex labels must be 0..n, missing {}", i)));
            }
        }
        Ok(map.into_values().collect())
    }
}

/// The dummy chain of one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wire {
    pub edge: Edge,
    /// Interior path points from the `edge.0` end to the `edge.1` end.
    pub dummies: Vec<GridPoint>,
}

impl Wire {
    pub fn dummy_count(&self) -> usize {
        self.dummies.len()
    }
}

impl OrthogonalEmbedding {
    pub fn wires(&self) -> Vec<Wire> {
        self.edge_paths
            .iter()
            .map(|(e, p)| Wire {
                edge: *e,
                dummies: if p.len() > 2 { p[1..p.len() - 1].to_vec() } else { Vec::new() },
            })
            .collect()
    }

    /// All interior path points.
    pub fn dummies(&self) -> BTreeSet<GridPoint> {
        self.wires().into_iter().flat_map(|w| w.dummies).collect()
    }

    /// Vertex images plus dummies.
    pub fn used_sites(&self) -> usize {
        self.vertex_at.len() + self.wires().iter().map(Wire::dummy_count).sum::<usize>()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("embedding serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl Serialize for Edge {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let s = String::deserialize(d)?;
        let (a, b) = s.split_once('-').ok_or_else(|| D::Error::custom("edge key must be \"k-l\""))?;
        let a: usize = a.parse().map_err(D::Error::custom)?;
        let b: usize = b.parse().map_err(D::Error::custom)?;
        if a >= b {
            return Err(D::Error::custom("edge key must satisfy k < l"));
        }
        Ok(Edge(a, b))
    }
}

/// Computes a planar orthogonal embedding that fits `budget`.
///
/// Each connected component is decided by enumerating rotation systems
/// (`NonPlanar` when none is planar), made biconnected by planar chord
/// insertion, and drawn from every choice of outer face and st-edge on a
/// handful of planar rotation systems; the drawing with the fewest used
/// sites (then smallest area) wins. Components are laid out left to right.
/// Deterministic for a fixed input.
pub fn embed(g: &Graph, budget: GridBudget) -> Result<OrthogonalEmbedding, EmbedError> {
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) > 3) {
        return Err(EmbedError::DegreeTooHigh { vertex: v, degree: g.degree(v) });
    }
    let mut vertex_at = vec![GridPoint::new(0, 0); g.n()];
    let mut edge_paths = BTreeMap::new();
    let (mut rows, mut cols) = (0, 0);
    for comp in g.components() {
        let d = embed_component(g, &comp)?;
        for (local, &v) in comp.iter().enumerate() {
            let p = d.points[local];
            vertex_at[v] = GridPoint::new(p.row, p.col + cols);
        }
        for (&(a, b), path) in &d.paths {
            let e = Edge::new(comp[a], comp[b]);
            let mut path: Vec<GridPoint> = path.iter().map(|p| GridPoint::new(p.row, p.col + cols)).collect();
            // Local ids follow the sorted component, so local order matches global order.
            debug_assert!(comp[a] < comp[b]);
            if comp[a] > comp[b] {
                path.reverse();
            }
            edge_paths.insert(e, path);
        }
        rows = rows.max(d.rows);
        cols += d.cols;
    }
    let mut emb = OrthogonalEmbedding {
        grid_rows: rows,
        grid_cols: cols,
        strategy: STRATEGY.to_string(),
        vertex_at,
        edge_paths,
    };
    let fits = |e: &OrthogonalEmbedding| e.grid_rows <= budget.rows && e.grid_cols <= budget.cols;
    if !fits(&emb) {
        let t = transpose(&emb);
        if fits(&t) {
            emb = t;
        } else {
            return Err(EmbedError::BudgetExceeded {
                rows: emb.grid_rows,
                cols: emb.grid_cols,
                budget_rows: budget.rows,
                budget_cols: budget.cols,
            });
        }
    }
    Ok(emb)
}

fn transpose(e: &OrthogonalEmbedding) -> OrthogonalEmbedding {
    let t = |p: &GridPoint| GridPoint::new(p.col, p.row);
    OrthogonalEmbedding {
        grid_rows: e.grid_cols,
        grid_cols: e.grid_rows,
        strategy: e.strategy.clone(),
        vertex_at: e.vertex_at.iter().map(t).collect(),
        edge_paths: e.edge_paths.iter().map(|(k, p)| (*k, p.iter().map(t).collect())).collect(),
    }
}

fn embed_component(g: &Graph, comp: &[usize]) -> Result<Drawing, EmbedError> {
    let local: BTreeMap<usize, usize> = comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adjacency: Vec<Vec<usize>> = comp
        .iter()
        .map(|&v| g.neighbors(v).iter().map(|w| local[w]).collect())
        .collect();
    let real: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .filter(|e| local.contains_key(&e.0))
        .map(|e| (local[&e.0], local[&e.1]))
        .collect();

    let (rotations, exhausted) = planar_rotations(&adjacency, ROTATION_CANDIDATES, MAX_ROTATION_TRIALS);
    if rotations.is_empty() {
        return Err(if exhausted {
            EmbedError::NonPlanar { witness: comp[0] }
        } else {
            EmbedError::SearchLimit(MAX_ROTATION_TRIALS)
        });
    }

    if comp.len() == 1 {
        return Ok(Drawing {
            rows: 1,
            cols: 1,
            points: vec![GridPoint::new(0, 0)],
            paths: BTreeMap::new(),
        });
    }

    let mut raw: Vec<(Key, Drawing)> = Vec::new();
    for rot in rotations {
        let mut aug = rot.clone();
        biconnect(&mut aug);
        let faces = aug.faces();
        for (fi, face) in faces.iter().enumerate() {
            for &(a, b) in face {
                for (s, t) in [(a, b), (b, a)] {
                    let Some(mut d) = visibility_drawing(&aug, &real, fi, s, t) else {
                        continue;
                    };
                    compact(&mut d);
                    raw.push((Key::of(&d), d));
                }
            }
        }
    }
    raw.sort_by(|x, y| x.0.cmp(&y.0));
    raw.dedup_by(|x, y| x.0 == y.0);
    raw.truncate(POLISHED_CANDIDATES);
    let mut best: Option<(Key, Drawing)> = None;
    for (_, mut d) in raw {
        improve(&mut d);
        for cand in [d.transpose(), d] {
            let key = Key::of(&cand);
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, cand));
            }
        }
    }
    Ok(best.expect("a planar rotation always yields a drawing").1)
}

/// Selection order: fewest used sites, smallest area, fewest rows, then layout.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    sites: usize,
    area: usize,
    rows: usize,
    layout: Vec<(usize, usize)>,
}

impl Key {
    fn of(d: &Drawing) -> Self {
        let mut layout: Vec<(usize, usize)> = d.points.iter().map(|p| (p.row, p.col)).collect();
        for p in d.paths.values() {
            layout.extend(p.iter().map(|q| (q.row, q.col)));
        }
        Key {
            sites: d.used_sites(),
            area: d.rows * d.cols,
            rows: d.rows,
            layout,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationKind {
    VertexCountMismatch,
    VertexOutOfBounds,
    VertexCollision,
    MissingPath,
    UnknownPath,
    PathTooShort,
    PathOutOfBounds,
    EndpointMismatch,
    NonOrthogonalStep,
    PathSelfIntersection,
    PathOverlap,
    VertexOnPath,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingViolation {
    pub kind: ViolationKind,
    pub at: Option<GridPoint>,
    pub edge: Option<Edge>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub violations: Vec<EmbeddingViolation>,
}

impl EmbeddingReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

/// Checks every structural requirement of an embedding of `g`.
pub fn validate_embedding(g: &Graph, emb: &OrthogonalEmbedding) -> EmbeddingReport {
    let mut out = Vec::new();
    let mut push = |kind, at: Option<GridPoint>, edge: Option<Edge>, message: String| {
        out.push(EmbeddingViolation { kind, at, edge, message })
    };
    let inside = |p: &GridPoint| p.row < emb.grid_rows && p.col < emb.grid_cols;

    if emb.vertex_at.len() != g.n() {
        push(
            ViolationKind::VertexCountMismatch,
            None,
            None,
            format!("{} vertex images for {} vertices", emb.vertex_at.len(), g.n()),
        );
    }
    let mut owner: BTreeMap<GridPoint, String> = BTreeMap::new();
    for (k, p) in emb.vertex_at.iter().enumerate() {
        if !inside(p) {
            push(ViolationKind::VertexOutOfBounds, Some(*p), None, format!("vertex {} at {}", k, p));
        }
        if let Some(prev) = owner.insert(*p, format!("vertex {}", k)) {
            push(ViolationKind::VertexCollision, Some(*p), None, format!("vertex {} shares {} with {}", k, p, prev));
        }
    }
    for e in g.edges() {
        if !emb.edge_paths.contains_key(e) {
            push(ViolationKind::MissingPath, None, Some(*e), format!("no path for edge {}", e));
        }
    }
    for (e, path) in &emb.edge_paths {
        if !g.has_edge(e.0, e.1) {
            push(ViolationKind::UnknownPath, None, Some(*e), format!("path for non-edge {}", e));
        }
        if path.len() < 2 {
            push(ViolationKind::PathTooShort, None, Some(*e), format!("path of edge {} has {} points", e, path.len()));
            continue;
        }
        for p in path {
            if !inside(p) {
                push(ViolationKind::PathOutOfBounds, Some(*p), Some(*e), format!("edge {} leaves the grid at {}", e, p));
            }
        }
        let ends = (emb.vertex_at.get(e.0), emb.vertex_at.get(e.1));
        if ends != (path.first(), path.last()) {
            push(
                ViolationKind::EndpointMismatch,
                path.first().copied(),
                Some(*e),
                format!("path of edge {} does not run from vertex {} to vertex {}", e, e.0, e.1),
            );
        }
        for w in path.windows(2) {
            if !w[0].is_adjacent(&w[1]) {
                push(
                    ViolationKind::NonOrthogonalStep,
                    Some(w[1]),
                    Some(*e),
                    format!("edge {} steps from {} to {}", e, w[0], w[1]),
                );
            }
        }
        let mut seen = BTreeSet::new();
        for p in &path[1..path.len() - 1] {
            if !seen.insert(*p) {
                push(ViolationKind::PathSelfIntersection, Some(*p), Some(*e), format!("edge {} revisits {}", e, p));
                continue;
            }
            match owner.get(p) {
                Some(other) if other.starts_with("vertex") => push(
                    ViolationKind::VertexOnPath,
                    Some(*p),
                    Some(*e),
                    format!("edge {} passes through {} at {}", e, other, p),
                ),
                Some(other) => push(
                    ViolationKind::PathOverlap,
                    Some(*p),
                    Some(*e),
                    format!("edge {} and {} share {}", e, other, p),
                ),
                None => {}
            }
        }
        for p in seen {
            owner.entry(p).or_insert_with(|| format!("edge {}", e));
        }
    }
    EmbeddingReport { violations: out }
}
