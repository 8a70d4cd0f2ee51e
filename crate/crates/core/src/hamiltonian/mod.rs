//! Nearest-neighbour lattice Hamiltonians built from orthogonal embeddings.
//!
//! Every edge `(k, l)`, `k < l`, becomes a wire along its lattice path
//! `Γk, v1, …, vm, Γl`: ferromagnetic bonds of weight `−c` from `Γk`
//! through the dummies, then one antiferromagnetic `+1` bond into `Γl`.
//! Vertex sites carry a `+1` field, dummies none. When `c` is large enough
//! the dummies copy `Γk`, and the lattice ground states reproduce those of
//! the graph Hamiltonian shifted by `−c·F` (`F` = number of ferromagnetic
//! bonds).

mod checks;
mod io;
mod spectrum;

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{validate_embedding, GridPoint, OrthogonalEmbedding};
use crate::graph::{Edge, Graph};
use crate::reduction::SpinAssignment;

pub use checks::{
    check_correspondence, gap_upper_bound_check, wire_gadget_separation, CorrespondenceReport, GapReport,
    LevelCheck, WireSeparation,
};
pub use io::HamiltonianDocument;
pub use spectrum::{exhaustive_spectrum, DiagonalIsing, Level, Spectrum, DEFAULT_SITE_LIMIT, DEFAULT_WITNESS_CAP};

/// Spins over the used sites of a lattice Hamiltonian, in site order.
pub type SpinConfiguration = SpinAssignment;

/// Default ferromagnetic wire strength; keeps first-excited states aligned too.
pub const DEFAULT_C: i64 = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HamiltonianError {
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("coupling strength c must be positive, got {0}")]
    NonPositiveC(i64),
    #[error("configuration covers {got} sites, Hamiltonian has {expected}")]
    CoverageMismatch { expected: usize, got: usize },
    #[error("{sites} sites exceed the enumeration limit of {limit}")]
    TooManySites { sites: usize, limit: usize },
    #[error("no wire for edge {0}")]
    UnknownWire(Edge),
    #[error("inconsistent Hamiltonian: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "lowercase")]
pub enum SiteRole {
    /// Image of graph vertex `label`.
    Vertex { label: usize },
    /// The `index`-th dummy (1-based, counted from the `edge.0` end) of a wire.
    Dummy { edge: Edge, index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Site {
    pub at: GridPoint,
    pub role: SiteRole,
    pub z_field: i64,
}

/// `weight · Z_a Z_b` between site indices `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Coupling {
    pub a: usize,
    pub b: usize,
    pub weight: i64,
}

/// Site indices `Γk, v1, …, vm, Γl` of one wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeWire {
    pub edge: Edge,
    pub chain: Vec<usize>,
}

impl LatticeWire {
    pub fn dummy_count(&self) -> usize {
        self.chain.len() - 2
    }
}

/// Integer-weighted ZZ couplings and Z fields on the used sites of a grid.
///
/// Sites are stored row-major; couplings sorted by site pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeHamiltonian {
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub c: i64,
    sites: Vec<Site>,
    couplings: Vec<Coupling>,
    wires: Vec<LatticeWire>,
}

impl LatticeHamiltonian {
    /// Assembles and checks a Hamiltonian from raw parts.
    pub fn from_parts(
        grid_rows: usize,
        grid_cols: usize,
        c: i64,
        mut sites: Vec<Site>,
        couplings: Vec<Coupling>,
        wires: Vec<LatticeWire>,
    ) -> Result<Self, HamiltonianError> {
        // Re-index into row-major order.
        let mut order: Vec<usize> = (0..sites.len()).collect();
        order.sort_by_key(|&i| sites[i].at);
        let mut new_index = vec![0; sites.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        sites = order.iter().map(|&i| sites[i]).collect();
        let mut couplings: Vec<Coupling> = couplings
            .into_iter()
            .map(|cp| {
                let (a, b) = (new_index[cp.a], new_index[cp.b]);
                Coupling { a: a.min(b), b: a.max(b), weight: cp.weight }
            })
            .collect();
        couplings.sort();
        let mut wires: Vec<LatticeWire> = wires
            .into_iter()
            .map(|w| LatticeWire { edge: w.edge, chain: w.chain.iter().map(|&i| new_index[i]).collect() })
            .collect();
        wires.sort_by_key(|w| w.edge);
        let h = LatticeHamiltonian { grid_rows, grid_cols, c, sites, couplings, wires };
        let problems = h.problems();
        if let Some(p) = problems.into_iter().next() {
            return Err(HamiltonianError::Inconsistent(p));
        }
        Ok(h)
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn wires(&self) -> &[LatticeWire] {
        &self.wires
    }

    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    pub fn site_index(&self, at: GridPoint) -> Option<usize> {
        self.sites.binary_search_by_key(&at, |s| s.at).ok()
    }

    /// Site index of every graph vertex, by label.
    pub fn vertex_sites(&self) -> Vec<usize> {
        let mut out: Vec<(usize, usize)> = self
            .sites
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s.role {
                SiteRole::Vertex { label } => Some((label, i)),
                SiteRole::Dummy { .. } => None,
            })
            .collect();
        out.sort();
        out.into_iter().map(|(_, i)| i).collect()
    }

    pub fn wire(&self, edge: Edge) -> Result<&LatticeWire, HamiltonianError> {
        self.wires.iter().find(|w| w.edge == edge).ok_or(HamiltonianError::UnknownWire(edge))
    }

    /// Number of `−c` bonds.
    pub fn ferromagnetic_bonds(&self) -> usize {
        self.wires.iter().map(LatticeWire::dummy_count).sum()
    }

    /// Coupling weight keyed by grid-point pair (smaller point first).
    pub fn bond_weights(&self) -> BTreeMap<(GridPoint, GridPoint), i64> {
        self.couplings
            .iter()
            .map(|cp| ((self.sites[cp.a].at, self.sites[cp.b].at), cp.weight))
            .collect()
    }

    /// Restriction of a lattice configuration to the real-vertex sites.
    pub fn restrict(&self, s: &SpinConfiguration) -> SpinAssignment {
        let spins: Vec<i8> = self.vertex_sites().iter().map(|&i| s.spin(i) as i8).collect();
        SpinAssignment::from_spins(&spins)
    }

    /// Extends a graph spin assignment by copying each wire's `Γk` onto its dummies.
    pub fn extend_aligned(&self, s: &SpinAssignment) -> SpinConfiguration {
        let vs = self.vertex_sites();
        let mut up = 0u64;
        for (k, &site) in vs.iter().enumerate() {
            if s.spin(k) > 0 {
                up |= 1 << site;
            }
        }
        for w in &self.wires {
            if s.spin(w.edge.0) > 0 {
                for &d in &w.chain[1..w.chain.len() - 1] {
                    up |= 1 << d;
                }
            }
        }
        SpinConfiguration::from_up_mask(up, self.site_count())
    }

    /// Every invariant violation, as readable strings.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.c < 1 {
            out.push(format!("coupling strength c = {} is not positive", self.c));
        }
        if self.sites.len() > 64 {
            out.push(format!("{} sites exceed the 64-site configuration width", self.sites.len()));
            return out;
        }
        for w in self.sites.windows(2) {
            if w[0].at == w[1].at {
                out.push(format!("two sites at {}", w[0].at));
            }
        }
        for s in &self.sites {
            if s.at.row >= self.grid_rows || s.at.col >= self.grid_cols {
                out.push(format!("site {} outside the {}x{} grid", s.at, self.grid_rows, self.grid_cols));
            }
            match s.role {
                SiteRole::Vertex { label } if s.z_field != 1 => {
                    out.push(format!("vertex {} at {} has field {}, expected 1", label, s.at, s.z_field))
                }
                SiteRole::Dummy { .. } if s.z_field != 0 => {
                    out.push(format!("dummy at {} has field {}, expected 0", s.at, s.z_field))
                }
                _ => {}
            }
        }
        for cp in &self.couplings {
            let (Some(a), Some(b)) = (self.sites.get(cp.a), self.sites.get(cp.b)) else {
                out.push(format!("coupling references missing site {} or {}", cp.a, cp.b));
                continue;
            };
            if !a.at.is_adjacent(&b.at) {
                out.push(format!("coupling between non-adjacent sites {} and {}", a.at, b.at));
            }
        }
        for pair in self.couplings.windows(2) {
            if (pair[0].a, pair[0].b) == (pair[1].a, pair[1].b) {
                out.push(format!("duplicate coupling between sites {} and {}", pair[0].a, pair[0].b));
            }
        }
        // The couplings must be exactly the union of the wire patterns.
        let mut expected = Vec::new();
        for w in &self.wires {
            if w.chain.len() < 2 || w.chain.iter().any(|&i| i >= self.sites.len()) {
                out.push(format!("wire {} has a malformed chain", w.edge));
                continue;
            }
            let ends = (self.sites[w.chain[0]].role, self.sites[*w.chain.last().unwrap()].role);
            if ends != (SiteRole::Vertex { label: w.edge.0 }, SiteRole::Vertex { label: w.edge.1 }) {
                out.push(format!("wire {} does not run from vertex {} to vertex {}", w.edge, w.edge.0, w.edge.1));
            }
            for (i, &d) in w.chain[1..w.chain.len() - 1].iter().enumerate() {
                if self.sites[d].role != (SiteRole::Dummy { edge: w.edge, index: i + 1 }) {
                    out.push(format!("site {} is not dummy {} of wire {}", self.sites[d].at, i + 1, w.edge));
                }
            }
            let m = w.chain.len() - 2;
            for (i, pair) in w.chain.windows(2).enumerate() {
                let weight = if i < m { -self.c } else { 1 };
                expected.push(Coupling { a: pair[0].min(pair[1]), b: pair[0].max(pair[1]), weight });
            }
        }
        expected.sort();
        if expected != self.couplings {
            out.push("couplings do not match the wire pattern (-c along the chain, +1 into the far vertex)".into());
        }
        out
    }

    pub fn to_json(&self) -> String {
        HamiltonianDocument::from_lattice(self).to_json()
    }

    pub fn from_json(text: &str) -> Result<Self, HamiltonianError> {
        HamiltonianDocument::from_json(text)?.into_lattice()
    }
}

pub fn build_lattice_hamiltonian(emb: &OrthogonalEmbedding, c: i64) -> Result<LatticeHamiltonian, HamiltonianError> {
    if c < 1 {
        return Err(HamiltonianError::NonPositiveC(c));
    }
    let g = Graph::new(emb.vertex_at.len(), emb.edge_paths.keys().map(|e| (e.0, e.1)))
        .map_err(|e| HamiltonianError::InvalidEmbedding(e.to_string()))?;
    let report = validate_embedding(&g, emb);
    if let Some(v) = report.violations.first() {
        return Err(HamiltonianError::InvalidEmbedding(v.message.clone()));
    }
    let mut sites: Vec<Site> = emb
        .vertex_at
        .iter()
        .enumerate()
        .map(|(label, &at)| Site { at, role: SiteRole::Vertex { label }, z_field: 1 })
        .collect();
    let mut index: BTreeMap<GridPoint, usize> = emb.vertex_at.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut wires = Vec::new();
    let mut couplings = Vec::new();
    for w in emb.wires() {
        for (i, &at) in w.dummies.iter().enumerate() {
            index.insert(at, sites.len());
            sites.push(Site { at, role: SiteRole::Dummy { edge: w.edge, index: i + 1 }, z_field: 0 });
        }
        let path = &emb.edge_paths[&w.edge];
        let chain: Vec<usize> = path.iter().map(|p| index[p]).collect();
        let m = w.dummy_count();
        for (i, pair) in chain.windows(2).enumerate() {
            let weight = if i < m { -c } else { 1 };
            couplings.push(Coupling { a: pair[0], b: pair[1], weight });
        }
        wires.push(LatticeWire { edge: w.edge, chain });
    }
    LatticeHamiltonian::from_parts(emb.grid_rows, emb.grid_cols, c, sites, couplings, wires)
}

/// `Σ w_ab S_a S_b + Σ w_a S_a`.
pub fn energy_of(h: &LatticeHamiltonian, s: &SpinConfiguration) -> Result<i64, HamiltonianError> {
    if s.len() != h.site_count() {
        return Err(HamiltonianError::CoverageMismatch { expected: h.site_count(), got: s.len() });
    }
    let zz: i64 = h.couplings.iter().map(|cp| cp.weight * s.spin(cp.a) * s.spin(cp.b)).sum();
    let z: i64 = h.sites.iter().enumerate().map(|(i, site)| site.z_field * s.spin(i)).sum();
    Ok(zz + z)
}

/// Broken ferromagnetic bonds along the wire of `edge`.
pub fn wire_mismatch_count(
    h: &LatticeHamiltonian,
    s: &SpinConfiguration,
    edge: Edge,
) -> Result<usize, HamiltonianError> {
    if s.len() != h.site_count() {
        return Err(HamiltonianError::CoverageMismatch { expected: h.site_count(), got: s.len() });
    }
    let w = h.wire(edge)?;
    let ferro = &w.chain[..w.chain.len() - 1];
    Ok(ferro.windows(2).filter(|p| s.spin(p[0]) != s.spin(p[1])).count())
}

/// Random wire-structured Hamiltonian for exercising the pulse compiler.
///
/// Grows up to `attempts` self-avoiding random walks on free grid points;
/// each walk becomes a fresh vertex pair joined by a wire of its interior points.
pub fn random_wired<R: Rng>(rows: usize, cols: usize, c: i64, attempts: usize, rng: &mut R) -> LatticeHamiltonian {
    let mut used: BTreeMap<GridPoint, ()> = BTreeMap::new();
    let mut sites = Vec::new();
    let mut couplings = Vec::new();
    let mut wires = Vec::new();
    let mut label = 0;
    for _ in 0..attempts {
        let start = GridPoint::new(rng.gen_range(0..rows), rng.gen_range(0..cols));
        if used.contains_key(&start) {
            continue;
        }
        let target_len = rng.gen_range(2..=8);
        let mut walk = vec![start];
        while walk.len() < target_len {
            let p = *walk.last().unwrap();
            let options: Vec<GridPoint> = [(0isize, 1isize), (1, 0), (0, -1), (-1, 0)]
                .iter()
                .filter_map(|&(dr, dc)| {
                    let (r, c) = (p.row as isize + dr, p.col as isize + dc);
                    (r >= 0 && c >= 0 && (r as usize) < rows && (c as usize) < cols)
                        .then(|| GridPoint::new(r as usize, c as usize))
                })
                .filter(|q| !used.contains_key(q) && !walk.contains(q))
                .collect();
            if options.is_empty() {
                break;
            }
            walk.push(options[rng.gen_range(0..options.len())]);
        }
        if walk.len() < 2 {
            continue;
        }
        let edge = Edge(label, label + 1);
        label += 2;
        let base = sites.len();
        let last = walk.len() - 1;
        for (i, &at) in walk.iter().enumerate() {
            used.insert(at, ());
            let role = match i {
                0 => SiteRole::Vertex { label: edge.0 },
                i if i == last => SiteRole::Vertex { label: edge.1 },
                i => SiteRole::Dummy { edge, index: i },
            };
            let z_field = if matches!(role, SiteRole::Vertex { .. }) { 1 } else { 0 };
            sites.push(Site { at, role, z_field });
        }
        let chain: Vec<usize> = (base..base + walk.len()).collect();
        for (i, pair) in chain.windows(2).enumerate() {
            let weight = if i + 1 < last { -c } else { 1 };
            couplings.push(Coupling { a: pair[0], b: pair[1], weight });
        }
        wires.push(LatticeWire { edge, chain });
    }
    LatticeHamiltonian::from_parts(rows, cols, c, sites, couplings, wires).expect("random wires are consistent")
}
