//! JSON form shared by lattice and graph Hamiltonians.

use serde::{Deserialize, Serialize};

use super::{Coupling, HamiltonianError, LatticeHamiltonian, LatticeWire, Site, SiteRole};
use crate::embedding::GridPoint;
use crate::graph::Edge;
use crate::reduction::{ProblemHamiltonian, ZTerm, ZzTerm};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<GridPoint>,
    #[serde(flatten)]
    pub role: SiteRole,
    pub z_field: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingRecord {
    pub sites: [usize; 2],
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireRecord {
    pub edge: Edge,
    pub chain: Vec<usize>,
}

/// Sites with fields, site-pair couplings, and (for lattices) grid, `c` and wires.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonianDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<i64>,
    pub sites: Vec<SiteRecord>,
    pub couplings: Vec<CouplingRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wires: Option<Vec<WireRecord>>,
}

impl HamiltonianDocument {
    pub fn from_lattice(h: &LatticeHamiltonian) -> Self {
        HamiltonianDocument {
            grid: Some([h.grid_rows, h.grid_cols]),
            c: Some(h.c),
            sites: h
                .sites()
                .iter()
                .map(|s| SiteRecord { at: Some(s.at), role: s.role, z_field: s.z_field })
                .collect(),
            couplings: h.couplings().iter().map(|c| CouplingRecord { sites: [c.a, c.b], weight: c.weight }).collect(),
            wires: Some(h.wires().iter().map(|w| WireRecord { edge: w.edge, chain: w.chain.clone() }).collect()),
        }
    }

    pub fn from_problem(hp: &ProblemHamiltonian) -> Self {
        let mut fields = vec![0; hp.n];
        for t in &hp.z_terms {
            fields[t.k] += t.weight;
        }
        HamiltonianDocument {
            grid: None,
            c: None,
            sites: fields
                .into_iter()
                .enumerate()
                .map(|(label, z_field)| SiteRecord { at: None, role: SiteRole::Vertex { label }, z_field })
                .collect(),
            couplings: hp.zz_terms.iter().map(|t| CouplingRecord { sites: [t.k, t.l], weight: t.weight }).collect(),
            wires: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, HamiltonianError> {
        serde_json::from_str(text).map_err(|e| HamiltonianError::Inconsistent(e.to_string()))
    }

    pub fn into_lattice(self) -> Result<LatticeHamiltonian, HamiltonianError> {
        let missing = |what: &str| HamiltonianError::Inconsistent(format!("lattice document lacks {}", what));
        let [rows, cols] = self.grid.ok_or_else(|| missing("grid"))?;
        let c = self.c.ok_or_else(|| missing("c"))?;
        let wires = self.wires.ok_or_else(|| missing("wires"))?;
        let n = self.sites.len();
        let mut sites = Vec::with_capacity(n);
        for r in self.sites {
            let at = r.at.ok_or_else(|| missing("site coordinates"))?;
            sites.push(Site { at, role: r.role, z_field: r.z_field });
        }
        let in_range = |i: usize| {
            if i < n {
                Ok(i)
            } else {
                Err(HamiltonianError::Inconsistent(format!("site index {} out of range", i)))
            }
        };
        let couplings = self
            .couplings
            .into_iter()
            .map(|c| Ok(Coupling { a: in_range(c.sites[0])?, b: in_range(c.sites[1])?, weight: c.weight }))
            .collect::<Result<Vec<_>, HamiltonianError>>()?;
        let wires = wires
            .into_iter()
            .map(|w| {
                let chain = w.chain.into_iter().map(in_range).collect::<Result<Vec<_>, _>>()?;
                Ok(LatticeWire { edge: w.edge, chain })
            })
            .collect::<Result<Vec<_>, HamiltonianError>>()?;
        LatticeHamiltonian::from_parts(rows, cols, c, sites, couplings, wires)
    }

    pub fn into_problem(self) -> Result<ProblemHamiltonian, HamiltonianError> {
        let n = self.sites.len();
        let mut z_terms = Vec::with_capacity(n);
        for (i, r) in self.sites.iter().enumerate() {
            match r.role {
                SiteRole::Vertex { label } if label == i => z_terms.push(ZTerm { k: i, weight: r.z_field }),
                _ => return Err(HamiltonianError::Inconsistent(format!("site {} is not vertex {}", i, i))),
            }
        }
        let zz_terms = self
            .couplings
            .iter()
            .map(|c| {
                let [k, l] = c.sites;
                if k >= l || l >= n {
                    return Err(HamiltonianError::Inconsistent(format!("bad coupling {}-{}", k, l)));
                }
                Ok(ZzTerm { k, l, weight: c.weight })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProblemHamiltonian { n, zz_terms, z_terms })
    }
}
