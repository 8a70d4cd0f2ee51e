//! Exact low-lying spectrum of diagonal Ising models by exhaustive enumeration.

use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::{HamiltonianError, LatticeHamiltonian};
use crate::reduction::ProblemHamiltonian;

/// Largest model enumerated unless the caller raises the limit.
pub const DEFAULT_SITE_LIMIT: usize = 26;
/// Witnesses kept per level unless the caller asks for more.
pub const DEFAULT_WITNESS_CAP: usize = 64;
/// Hard ceiling; beyond this the enumeration would not finish.
const MAX_SITES: usize = 40;

/// `Σ_a h_a S_a + Σ_{a<b} J_ab S_a S_b`; bit `a` of a configuration set means `S_a = +1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalIsing {
    fields: Vec<i64>,
    neighbors: Vec<Vec<(usize, i64)>>,
}

impl DiagonalIsing {
    pub fn new(fields: Vec<i64>, couplings: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        let mut neighbors = vec![Vec::new(); fields.len()];
        for (a, b, w) in couplings {
            neighbors[a].push((b, w));
            neighbors[b].push((a, w));
        }
        DiagonalIsing { fields, neighbors }
    }

    pub fn from_lattice(h: &LatticeHamiltonian) -> Self {
        Self::new(
            h.sites().iter().map(|s| s.z_field).collect(),
            h.couplings().iter().map(|c| (c.a, c.b, c.weight)),
        )
    }

    pub fn from_problem(hp: &ProblemHamiltonian) -> Self {
        let mut fields = vec![0; hp.n];
        for t in &hp.z_terms {
            fields[t.k] += t.weight;
        }
        Self::new(fields, hp.zz_terms.iter().map(|t| (t.k, t.l, t.weight)))
    }

    pub fn sites(&self) -> usize {
        self.fields.len()
    }

    pub fn energy(&self, config: u64) -> i64 {
        let spin = |a: usize| if config >> a & 1 == 1 { 1 } else { -1 };
        let mut e = 0;
        for (a, &h) in self.fields.iter().enumerate() {
            let sa = spin(a);
            e += h * sa;
            for &(b, w) in &self.neighbors[a] {
                if b > a {
                    e += w * sa * spin(b);
                }
            }
        }
        e
    }

    /// Energy change from flipping site `a` in `config`.
    fn flip_delta(&self, config: u64, a: usize) -> i64 {
        let spin = |x: usize| if config >> x & 1 == 1 { 1 } else { -1 };
        let local: i64 = self.fields[a] + self.neighbors[a].iter().map(|&(b, w)| w * spin(b)).sum::<i64>();
        -2 * spin(a) * local
    }

    /// Largest `|ΔE|` over single-site flips of `config`.
    pub fn max_flip_delta(&self, config: u64) -> i64 {
        (0..self.sites()).map(|a| self.flip_delta(config, a).abs()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub energy: i64,
    pub degeneracy: u64,
    /// Smallest configurations at this energy, ascending.
    pub witnesses: Vec<u64>,
    /// True when `degeneracy` exceeds the witnesses kept.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    pub sites: usize,
    /// The lowest distinct energies, ascending.
    pub levels: Vec<Level>,
}

impl Spectrum {
    pub fn ground(&self) -> &Level {
        &self.levels[0]
    }

    pub fn first_excited(&self) -> Option<&Level> {
        self.levels.get(1)
    }

    pub fn gap(&self) -> Option<i64> {
        self.first_excited().map(|l| l.energy - self.ground().energy)
    }
}

struct Tracker {
    keep: usize,
    cap: usize,
    levels: Vec<(i64, u64, BinaryHeap<u64>)>,
}

impl Tracker {
    fn new(keep: usize, cap: usize) -> Self {
        Tracker { keep, cap, levels: Vec::with_capacity(keep + 1) }
    }

    #[inline]
    fn insert(&mut self, energy: i64, config: u64) {
        if self.levels.len() == self.keep && energy > self.levels[self.keep - 1].0 {
            return;
        }
        let pos = self.levels.partition_point(|l| l.0 < energy);
        if pos == self.levels.len() || self.levels[pos].0 != energy {
            self.levels.insert(pos, (energy, 0, BinaryHeap::new()));
            self.levels.truncate(self.keep);
        }
        let (_, count, heap) = &mut self.levels[pos];
        *count += 1;
        if heap.len() < self.cap {
            heap.push(config);
        } else if self.cap > 0 && config < *heap.peek().unwrap() {
            heap.pop();
            heap.push(config);
        }
    }

    fn merge(mut self, other: Tracker) -> Tracker {
        for (energy, count, heap) in other.levels {
            let pos = self.levels.partition_point(|l| l.0 < energy);
            if pos == self.levels.len() || self.levels[pos].0 != energy {
                self.levels.insert(pos, (energy, 0, BinaryHeap::new()));
            }
            let slot = &mut self.levels[pos];
            slot.1 += count;
            for c in heap {
                if slot.2.len() < self.cap {
                    slot.2.push(c);
                } else if self.cap > 0 && c < *slot.2.peek().unwrap() {
                    slot.2.pop();
                    slot.2.push(c);
                }
            }
        }
        self.levels.truncate(self.keep);
        self
    }
}

/// The `levels` lowest distinct energies with degeneracies and up to
/// `witness_cap` smallest witness configurations each.
///
/// Enumerates all `2^n` configurations in Gray-code order, split into
/// independent chunks over the top bits; the merge is deterministic.
pub fn exhaustive_spectrum(
    model: &DiagonalIsing,
    levels: usize,
    witness_cap: usize,
    site_limit: usize,
) -> Result<Spectrum, HamiltonianError> {
    let n = model.sites();
    let limit = site_limit.min(MAX_SITES);
    if n > limit {
        return Err(HamiltonianError::TooManySites { sites: n, limit });
    }
    let keep = levels.max(1);
    let prefix_bits = n.min(8);
    let low = n - prefix_bits;
    let tracker = (0u64..1 << prefix_bits)
        .into_par_iter()
        .map(|prefix| {
            let mut t = Tracker::new(keep, witness_cap);
            let mut config = prefix << low;
            let mut energy = model.energy(config);
            t.insert(energy, config);
            for i in 1u64..1 << low {
                let a = i.trailing_zeros() as usize;
                energy += model.flip_delta(config, a);
                config ^= 1 << a;
                t.insert(energy, config);
            }
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tracker::new(keep, witness_cap), Tracker::merge);
    Ok(Spectrum {
        sites: n,
        levels: tracker
            .levels
            .into_iter()
            .map(|(energy, degeneracy, heap)| {
                let witnesses = heap.into_sorted_vec();
                Level { energy, degeneracy, truncated: (witnesses.len() as u64) < degeneracy, witnesses }
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::reduction::build_hp;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn brute(model: &DiagonalIsing) -> BTreeMap<i64, Vec<u64>> {
        let mut out: BTreeMap<i64, Vec<u64>> = BTreeMap::new();
        for c in 0..1u64 << model.sites() {
            out.entry(model.energy(c)).or_default().push(c);
        }
        out
    }

    #[test]
    fn k4_problem_spectrum() {
        let hp = build_hp(&Graph::complete(4)).unwrap();
        let s = exhaustive_spectrum(&DiagonalIsing::from_problem(&hp), 3, 64, 26).unwrap();
        let e: Vec<(i64, u64)> = s.levels.iter().map(|l| (l.energy, l.degeneracy)).collect();
        // Singletons and pairs at -2, triples at 2, all-up at 10.
        assert_eq!(e, vec![(-2, 10), (2, 5), (10, 1)]);
        assert_eq!(s.gap(), Some(4));
    }

    #[test]
    fn two_site_examples() {
        // S0 S1 + S0
        let m = DiagonalIsing::new(vec![1, 0], [(0, 1, 1)]);
        let s = exhaustive_spectrum(&m, 4, 64, 26).unwrap();
        let e: Vec<(i64, u64)> = s.levels.iter().map(|l| (l.energy, l.degeneracy)).collect();
        assert_eq!(e, vec![(-2, 1), (0, 2), (2, 1)]);
        assert_eq!(s.gap(), Some(2));
        // Coupling +1, fields (+1, 0), S = (-1, +1).
        assert_eq!(m.energy(0b10), -2);
    }

    #[test]
    fn no_terms_is_one_degenerate_level() {
        let s = exhaustive_spectrum(&DiagonalIsing::new(vec![0; 5], []), 3, 64, 26).unwrap();
        assert_eq!(s.levels.len(), 1);
        assert_eq!((s.ground().energy, s.ground().degeneracy), (0, 32));
    }

    #[test]
    fn witness_cap_keeps_smallest() {
        let hp = build_hp(&Graph::complete(4)).unwrap();
        let s = exhaustive_spectrum(&DiagonalIsing::from_problem(&hp), 1, 3, 26).unwrap();
        let g = s.ground();
        assert!(g.truncated);
        assert_eq!(g.witnesses, vec![0b0001, 0b0010, 0b0011]);
    }

    #[test]
    fn site_limit_enforced() {
        let m = DiagonalIsing::new(vec![1; 5], []);
        assert_eq!(
            exhaustive_spectrum(&m, 1, 1, 4),
            Err(HamiltonianError::TooManySites { sites: 5, limit: 4 })
        );
        let empty = DiagonalIsing::new(vec![], []);
        let s = exhaustive_spectrum(&empty, 2, 4, 26).unwrap();
        assert_eq!(s.levels.len(), 1);
        assert_eq!(s.ground().witnesses, vec![0]);
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            n in 1usize..12,
            raw_fields in proptest::collection::vec(-3i64..4, 12),
            raw in proptest::collection::vec((0usize..12, 0usize..12, -4i64..5), 0..20),
            keep in 1usize..4,
        ) {
            let fields = raw_fields[..n].to_vec();
            let couplings: Vec<(usize, usize, i64)> =
                raw.into_iter().filter(|&(a, b, _)| a < n && b < n && a < b).collect();
            let m = DiagonalIsing::new(fields, couplings);
            let s = exhaustive_spectrum(&m, keep, 1 << 12, 26).unwrap();
            let want: Vec<(i64, Vec<u64>)> = brute(&m).into_iter().take(keep).collect();
            prop_assert_eq!(s.levels.len(), want.len());
            for (lvl, (e, configs)) in s.levels.iter().zip(want) {
                prop_assert_eq!(lvl.energy, e);
                prop_assert_eq!(lvl.degeneracy, configs.len() as u64);
                prop_assert_eq!(&lvl.witnesses, &configs);
            }
        }
    }
}
