//! The independent-set objective on cubic graphs and its Ising form.
//!
//! With `X_k ∈ {0,1}` marking selected vertices, the objective
//! `L = Σ X_k − Σ_{(k,l)∈E} X_k X_l` is at least `v` exactly when an
//! independent set of size `v` exists (any violating selection can be
//! repaired without dropping below `L`). Substituting `S_k = 2 X_k − 1`
//! on a cubic graph gives `E = Σ S_k + Σ S_k S_l = n/2 − 4 L`, so the ground
//! energy of the field-plus-antiferromagnet Hamiltonian fixes the maximum
//! independent-set size.
//!
//! Assignments are bit masks over vertex indices: bit `k` set means
//! `X_k = 1`, equivalently `S_k = +1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("assignment covers {got} vertices, graph has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("graph is not cubic (vertex {vertex} has degree {degree})")]
    NotCubic { vertex: usize, degree: usize },
    #[error("graph with {0} vertices is too large for bit-mask assignments")]
    TooLarge(usize),
    #[error("ground energy {e_min} is inconsistent with n = {n}: (n/2 - E)/4 is not a non-negative integer")]
    NonIntegral { n: usize, e_min: i64 },
}

/// The 0/1 vertex variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitAssignment {
    bits: u64,
    len: usize,
}

impl BitAssignment {
    pub fn from_mask(bits: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        BitAssignment { bits: bits & mask, len }
    }

    pub fn from_bits(values: &[u8]) -> Self {
        let bits = values.iter().enumerate().fold(0u64, |m, (i, &x)| m | (u64::from(x & 1) << i));
        Self::from_mask(bits, values.len())
    }

    pub fn from_members(members: &[usize], len: usize) -> Self {
        Self::from_mask(members.iter().fold(0u64, |m, &v| m | 1 << v), len)
    }

    pub fn mask(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, k: usize) -> u8 {
        (self.bits >> k & 1) as u8
    }

    pub fn cardinality(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.len).filter(|&k| self.get(k) == 1).collect()
    }
}

/// The ±1 spin variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinAssignment {
    up: u64,
    len: usize,
}

impl SpinAssignment {
    pub fn from_spins(spins: &[i8]) -> Self {
        let up = spins.iter().enumerate().fold(0u64, |m, (i, &s)| if s > 0 { m | 1 << i } else { m });
        SpinAssignment { up, len: spins.len() }
    }

    /// Bit `k` set means `S_k = +1`.
    pub fn from_up_mask(up: u64, len: usize) -> Self {
        BitAssignment::from_mask(up, len).into()
    }

    pub fn up_mask(&self) -> u64 {
        self.up
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spin(&self, k: usize) -> i64 {
        if self.up >> k & 1 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn spins(&self) -> Vec<i8> {
        (0..self.len).map(|k| self.spin(k) as i8).collect()
    }
}

impl From<BitAssignment> for SpinAssignment {
    fn from(x: BitAssignment) -> Self {
        spins_from_bits(&x)
    }
}

impl From<SpinAssignment> for BitAssignment {
    fn from(s: SpinAssignment) -> Self {
        bits_from_spins(&s)
    }
}

fn check_len(g: &Graph, len: usize) -> Result<(), ReductionError> {
    if g.n() != len {
        return Err(ReductionError::SizeMismatch { expected: g.n(), got: len });
    }
    Ok(())
}

pub fn objective_l(g: &Graph, x: &BitAssignment) -> Result<i64, ReductionError> {
    check_len(g, x.len())?;
    Ok(x.cardinality() as i64 - penalty(g, x)? as i64)
}

/// Number of edges with both endpoints selected.
pub fn penalty(g: &Graph, x: &BitAssignment) -> Result<usize, ReductionError> {
    check_len(g, x.len())?;
    Ok(g.edges().iter().filter(|e| x.get(e.0) == 1 && x.get(e.1) == 1).count())
}

/// Unselects endpoints of violated edges until the selection is independent.
///
/// Each step unselects the endpoint with more selected neighbours (ties to
/// the smaller index), scanning edges in canonical order. Every step lowers
/// the cardinality by one and the penalty by at least one, so the result's
/// cardinality never drops below the input's objective.
pub fn repair_to_independent(g: &Graph, x: &BitAssignment) -> Result<BitAssignment, ReductionError> {
    check_len(g, x.len())?;
    let mut bits = x.mask();
    let selected_degree = |bits: u64, v: usize| g.neighbors(v).iter().filter(|&&w| bits >> w & 1 == 1).count();
    while let Some(e) = g.edges().iter().find(|e| bits >> e.0 & 1 == 1 && bits >> e.1 & 1 == 1) {
        let (da, db) = (selected_degree(bits, e.0), selected_degree(bits, e.1));
        let drop = if db > da { e.1 } else { e.0 };
        bits &= !(1u64 << drop);
    }
    Ok(BitAssignment::from_mask(bits, x.len()))
}

pub fn spins_from_bits(x: &BitAssignment) -> SpinAssignment {
    // S = 2X - 1 maps 1 -> +1 and 0 -> -1, which is exactly the up-mask.
    SpinAssignment { up: x.mask(), len: x.len() }
}

pub fn bits_from_spins(s: &SpinAssignment) -> BitAssignment {
    // X = (S + 1) / 2
    BitAssignment::from_mask(s.up_mask(), s.len())
}

/// `Σ_k S_k + Σ_{(k,l)∈E} S_k S_l`.
pub fn energy_e(g: &Graph, s: &SpinAssignment) -> Result<i64, ReductionError> {
    check_len(g, s.len())?;
    let field: i64 = (0..g.n()).map(|k| s.spin(k)).sum();
    let coupling: i64 = g.edges().iter().map(|e| s.spin(e.0) * s.spin(e.1)).sum();
    Ok(field + coupling)
}

/// A weighted ZZ term between two sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZzTerm {
    pub k: usize,
    pub l: usize,
    pub weight: i64,
}

/// A weighted single-site Z term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZTerm {
    pub k: usize,
    pub weight: i64,
}

/// `H_P = Σ_{(k,l)∈E} Z_k Z_l + Σ_k Z_k` over the graph's vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemHamiltonian {
    pub n: usize,
    pub zz_terms: Vec<ZzTerm>,
    pub z_terms: Vec<ZTerm>,
}

impl ProblemHamiltonian {
    /// Diagonal eigenvalue on the basis state described by `s`.
    pub fn energy(&self, s: &SpinAssignment) -> i64 {
        let zz: i64 = self.zz_terms.iter().map(|t| t.weight * s.spin(t.k) * s.spin(t.l)).sum();
        let z: i64 = self.z_terms.iter().map(|t| t.weight * s.spin(t.k)).sum();
        zz + z
    }

    /// Exact minimum energy by enumerating all `2^n` spin assignments.
    pub fn ground_energy(&self) -> Result<i64, ReductionError> {
        if self.n > 30 {
            return Err(ReductionError::TooLarge(self.n));
        }
        let n = self.n;
        Ok((0u64..1 << n)
            .into_par_iter()
            .map(|up| self.energy(&SpinAssignment::from_up_mask(up, n)))
            .min()
            .unwrap_or(0))
    }
}

pub fn build_hp(g: &Graph) -> Result<ProblemHamiltonian, ReductionError> {
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) != 3) {
        return Err(ReductionError::NotCubic { vertex: v, degree: g.degree(v) });
    }
    if g.n() > 64 {
        return Err(ReductionError::TooLarge(g.n()));
    }
    Ok(ProblemHamiltonian {
        n: g.n(),
        zz_terms: g.edges().iter().map(|e| ZzTerm { k: e.0, l: e.1, weight: 1 }).collect(),
        z_terms: (0..g.n()).map(|k| ZTerm { k, weight: 1 }).collect(),
    })
}

/// Inverts `E_min = n/2 − 4 v_max` on a cubic graph.
pub fn mis_from_ground_energy(g: &Graph, e_min: i64) -> Result<usize, ReductionError> {
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) != 3) {
        return Err(ReductionError::NotCubic { vertex: v, degree: g.degree(v) });
    }
    // Work with doubled quantities so that n/2 stays integral: 2(n/2 - E) = n - 2E.
    let twice = g.n() as i64 - 2 * e_min;
    if twice < 0 || twice % 8 != 0 {
        return Err(ReductionError::NonIntegral { n: g.n(), e_min });
    }
    Ok((twice / 8) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{mis_oracle, DEFAULT_ORACLE_LIMIT};

    fn k4() -> Graph {
        Graph::complete(4)
    }

    fn bits(v: &[u8]) -> BitAssignment {
        BitAssignment::from_bits(v)
    }

    #[test]
    fn objective_and_penalty_on_k4() {
        let g = k4();
        assert_eq!(objective_l(&g, &bits(&[1, 0, 0, 0])).unwrap(), 1);
        assert_eq!(objective_l(&g, &bits(&[1, 1, 0, 0])).unwrap(), 1);
        assert_eq!(objective_l(&g, &bits(&[1, 1, 1, 1])).unwrap(), -2);
        assert_eq!(penalty(&g, &bits(&[1, 0, 0, 0])).unwrap(), 0);
        assert_eq!(penalty(&g, &bits(&[1, 1, 0, 0])).unwrap(), 1);
        assert_eq!(penalty(&g, &bits(&[1, 1, 1, 1])).unwrap(), 6);
        assert_eq!(
            objective_l(&g, &bits(&[1, 0, 0])),
            Err(ReductionError::SizeMismatch { expected: 4, got: 3 })
        );
    }

    #[test]
    fn repair_examples() {
        let g = k4();
        let r = repair_to_independent(&g, &bits(&[1, 1, 0, 0])).unwrap();
        assert_eq!(r.cardinality(), 1);
        assert!(g.is_independent(&r.members()));
        assert_eq!(r, bits(&[0, 1, 0, 0]));

        let single = bits(&[1, 0, 0, 0]);
        assert_eq!(repair_to_independent(&g, &single).unwrap(), single);

        let r = repair_to_independent(&g, &bits(&[1, 1, 1, 1])).unwrap();
        assert_eq!(r.cardinality(), 1);
    }

    #[test]
    fn repair_steps_are_monotone() {
        // Replay the repair loop one step at a time and check the per-step bound.
        let g = Graph::cube();
        for mask in 0u64..256 {
            let x = BitAssignment::from_mask(mask, 8);
            let mut cur = x;
            let mut steps = 0;
            loop {
                let p = penalty(&g, &cur).unwrap();
                if p == 0 {
                    break;
                }
                let e = g.edges().iter().find(|e| cur.get(e.0) == 1 && cur.get(e.1) == 1).unwrap();
                let sd = |v: usize| g.neighbors(v).iter().filter(|&&w| cur.get(w) == 1).count();
                let drop = if sd(e.1) > sd(e.0) { e.1 } else { e.0 };
                let next = BitAssignment::from_mask(cur.mask() & !(1 << drop), 8);
                assert_eq!(next.cardinality() + 1, cur.cardinality());
                assert!(penalty(&g, &next).unwrap() < p);
                cur = next;
                steps += 1;
            }
            assert!(steps <= x.cardinality());
            assert_eq!(cur, repair_to_independent(&g, &x).unwrap());
        }
    }

    #[test]
    fn spin_transform() {
        let s = spins_from_bits(&bits(&[0, 1]));
        assert_eq!(s.spins(), vec![-1, 1]);
        for mask in 0u64..64 {
            let x = BitAssignment::from_mask(mask, 6);
            assert_eq!(bits_from_spins(&spins_from_bits(&x)), x);
        }
    }

    #[test]
    fn energy_examples() {
        let g = k4();
        assert_eq!(energy_e(&g, &SpinAssignment::from_spins(&[1, -1, -1, -1])).unwrap(), -2);
        assert_eq!(energy_e(&g, &SpinAssignment::from_spins(&[-1, -1, -1, -1])).unwrap(), 2);
    }

    #[test]
    fn energy_objective_identity_exhaustive() {
        for g in [k4(), Graph::cube(), Graph::prism(3), Graph::prism(5), Graph::bridged_k4_pair(), Graph::prism(6)] {
            let n = g.n();
            for mask in 0u64..1 << n {
                let x = BitAssignment::from_mask(mask, n);
                let e = energy_e(&g, &spins_from_bits(&x)).unwrap();
                let l = objective_l(&g, &x).unwrap();
                // E = -4L + n/2, doubled to stay in integers.
                assert_eq!(2 * e, -8 * l + n as i64);
            }
        }
    }

    #[test]
    fn hp_terms_and_energy() {
        let hp = build_hp(&k4()).unwrap();
        assert_eq!(hp.zz_terms.len(), 6);
        assert_eq!(hp.z_terms.len(), 4);
        assert!(hp.zz_terms.iter().all(|t| t.weight == 1) && hp.z_terms.iter().all(|t| t.weight == 1));
        assert_eq!(hp.energy(&SpinAssignment::from_spins(&[1, -1, -1, -1])), -2);

        let q3 = build_hp(&Graph::cube()).unwrap();
        assert_eq!((q3.zz_terms.len(), q3.z_terms.len()), (12, 8));

        assert!(matches!(build_hp(&Graph::path(3)), Err(ReductionError::NotCubic { .. })));
    }

    #[test]
    fn ground_energy_gives_mis() {
        let g = k4();
        let e = build_hp(&g).unwrap().ground_energy().unwrap();
        assert_eq!(e, -2);
        assert_eq!(mis_from_ground_energy(&g, e).unwrap(), 1);

        let q3 = Graph::cube();
        let e = build_hp(&q3).unwrap().ground_energy().unwrap();
        assert_eq!(e, -12);
        assert_eq!(mis_from_ground_energy(&q3, e).unwrap(), 4);

        assert_eq!(mis_from_ground_energy(&g, 2 - 4).unwrap(), 1);
        assert!(matches!(mis_from_ground_energy(&g, -1), Err(ReductionError::NonIntegral { .. })));
        assert!(matches!(mis_from_ground_energy(&g, 10), Err(ReductionError::NonIntegral { .. })));
    }

    #[test]
    fn energy_bound_and_repair_agree_both_ways() {
        for g in [k4(), Graph::cube(), Graph::prism(3), Graph::prism(5), Graph::bridged_k4_pair()] {
            let n = g.n();
            let half = n as i64; // doubled n/2
            for mask in 0u64..1 << n {
                let x = BitAssignment::from_mask(mask, n);
                let e2 = 2 * energy_e(&g, &spins_from_bits(&x)).unwrap();
                if g.is_independent(&x.members()) {
                    // forward: an independent set of size v gives E <= n/2 - 4v
                    assert!(e2 <= half - 8 * x.cardinality() as i64);
                }
                // backward: the largest v with E <= n/2 - 4v is floor((n/2 - E)/4)
                let v = (half - e2).div_euclid(8);
                if v > 0 {
                    let r = repair_to_independent(&g, &x).unwrap();
                    assert!(g.is_independent(&r.members()));
                    assert!(r.cardinality() as i64 >= v);
                }
            }
            let e_min = build_hp(&g).unwrap().ground_energy().unwrap();
            let mis = mis_oracle(&g, DEFAULT_ORACLE_LIMIT).unwrap().cardinality;
            assert_eq!(2 * e_min, half - 8 * mis as i64);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn repair_never_increases_penalty(mask in 0u64..1 << 10, which in 0usize..3) {
                let g = [Graph::prism(5), Graph::bridged_k4_pair(), Graph::path(10)][which].clone();
                let x = BitAssignment::from_mask(mask, 10);
                let r = repair_to_independent(&g, &x).unwrap();
                prop_assert_eq!(penalty(&g, &r).unwrap(), 0);
                prop_assert!(r.mask() & !x.mask() == 0);
                prop_assert!(r.cardinality() as i64 >= objective_l(&g, &x).unwrap());
            }
        }
    }
}
