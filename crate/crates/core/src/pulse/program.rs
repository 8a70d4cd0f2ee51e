//! Pulse-level propagators for small site subsets.
//!
//! Every operation in a schedule is either an X flip (a permutation of basis
//! states) or a diagonal Z-string evolution (a phase), so the exact
//! propagator is a phased permutation: `U|x⟩ = e^{iθ(x)} |π(x)⟩`. Storing
//! `π` and `θ` is exact and keeps memory linear in the dimension.

use num_complex::Complex;

use super::engine::{lattice_bonds, EffectiveCoupling};
use super::{PulseError, PulseSchedule};
use crate::embedding::GridPoint;
use crate::{Rational, Real};

pub const MAX_PROPAGATOR_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseOp {
    /// X on every site whose bit is set.
    Flip(u64),
    /// Resource evolution `exp(−i d Σ Z_p Z_q)` over lattice bonds inside the subset.
    Couple(Rational),
    /// Local-field evolution `exp(−i d Σ z_p Z_p)`.
    Fields(Rational),
}

/// A schedule unrolled into operations on a subset of lattice sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PulseProgram {
    /// Simulated sites, row-major; bit `i` of a basis state is `sites[i]`.
    pub sites: Vec<GridPoint>,
    bonds: Vec<(usize, usize)>,
    fields: Vec<i64>,
    pub ops: Vec<PulseOp>,
}

impl PulseProgram {
    /// Each step becomes `Flip(mask)`, `substeps` equal `Couple` slices, `Flip(mask)`;
    /// the local-field epoch follows the sixteen steps.
    pub fn from_schedule(s: &PulseSchedule, sites: &[GridPoint], substeps: usize) -> Result<Self, PulseError> {
        let mut sites = sites.to_vec();
        sites.sort();
        sites.dedup();
        if sites.len() > MAX_PROPAGATOR_SITES {
            return Err(PulseError::TooManySites { sites: sites.len(), limit: MAX_PROPAGATOR_SITES });
        }
        if let Some(&at) = sites.iter().find(|p| p.row >= s.rows() || p.col >= s.cols()) {
            return Err(PulseError::SiteOutsideGrid { at, rows: s.rows(), cols: s.cols() });
        }
        let index = |p: &GridPoint| sites.binary_search(p).ok();
        let bonds = lattice_bonds(s.rows(), s.cols())
            .into_iter()
            .filter_map(|(p, q)| Some((index(&p)?, index(&q)?)))
            .collect();
        let mut fields = vec![0; sites.len()];
        for f in &s.local_field_epoch.fields {
            if let Some(i) = index(&f.at) {
                fields[i] += f.z;
            }
        }
        let substeps = substeps.max(1);
        let slice = |d: Rational| d / Rational::from_integer(substeps as i64);
        let mut ops = Vec::new();
        for sub in &s.subroutines {
            for step in &sub.steps {
                let mask = step.flip_mask.iter().filter_map(index).fold(0u64, |m, i| m | 1 << i);
                ops.push(PulseOp::Flip(mask));
                ops.extend(std::iter::repeat_n(PulseOp::Couple(slice(sub.step_duration)), substeps));
                ops.push(PulseOp::Flip(mask));
            }
        }
        ops.push(PulseOp::Fields(s.local_field_epoch.duration));
        Ok(PulseProgram { sites, bonds, fields, ops })
    }

    fn couple_energy(&self, x: u64) -> i64 {
        self.bonds.iter().map(|&(a, b)| if (x >> a ^ x >> b) & 1 == 0 { 1 } else { -1 }).sum()
    }

    fn field_energy(&self, x: u64) -> i64 {
        self.fields.iter().enumerate().map(|(i, &z)| if x >> i & 1 == 1 { z } else { -z }).sum()
    }

    pub fn propagator<T: Real>(&self) -> Propagator<T> {
        let dim = 1usize << self.sites.len();
        let mut perm = Vec::with_capacity(dim);
        let mut angle = Vec::with_capacity(dim);
        for x0 in 0..dim as u64 {
            let mut x = x0;
            let mut theta = Rational::from_integer(0);
            for op in &self.ops {
                match *op {
                    PulseOp::Flip(m) => x ^= m,
                    PulseOp::Couple(d) => theta -= d * Rational::from_integer(self.couple_energy(x)),
                    PulseOp::Fields(d) => theta -= d * Rational::from_integer(self.field_energy(x)),
                }
            }
            perm.push(x as usize);
            angle.push(T::of(*theta.numer() as f64 / *theta.denom() as f64));
        }
        Propagator { perm, angle }
    }

    /// `exp(−i H̄)` for the average Hamiltonian restricted to this program's sites.
    pub fn target<T: Real>(&self, eff: &EffectiveCoupling<Rational>) -> Propagator<T> {
        let dim = 1usize << self.sites.len();
        let to_t = |r: Rational| T::of(*r.numer() as f64 / *r.denom() as f64);
        let bonds: Vec<(usize, usize, T)> = self
            .bonds
            .iter()
            .map(|&(a, b)| (a, b, to_t(eff.bond(self.sites[a], self.sites[b]).unwrap_or_default())))
            .collect();
        let fields: Vec<T> =
            self.sites.iter().map(|p| to_t(eff.fields.get(p).copied().unwrap_or_default())).collect();
        let spin = |x: usize, i: usize| if x >> i & 1 == 1 { T::one() } else { -T::one() };
        let angle = (0..dim)
            .map(|x| {
                let zz = bonds.iter().fold(T::zero(), |acc, &(a, b, w)| acc + w * spin(x, a) * spin(x, b));
                let z = fields.iter().enumerate().fold(T::zero(), |acc, (i, &w)| acc + w * spin(x, i));
                -(zz + z)
            })
            .collect();
        Propagator { perm: (0..dim).collect(), angle }
    }
}

/// `U|x⟩ = e^{i angle[x]} |perm[x]⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator<T> {
    pub perm: Vec<usize>,
    pub angle: Vec<T>,
}

impl<T: Real> Propagator<T> {
    pub fn dimension(&self) -> usize {
        self.perm.len()
    }

    pub fn is_diagonal(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn phase(&self, x: usize) -> Complex<T> {
        Complex::from_polar(T::one(), self.angle[x])
    }

    /// `|Tr(V† U)| / dim`, insensitive to global phase.
    pub fn fidelity(&self, other: &Propagator<T>) -> T {
        let dim = self.dimension();
        if dim != other.dimension() || dim == 0 {
            return T::zero();
        }
        let trace = (0..dim)
            .filter(|&x| self.perm[x] == other.perm[x])
            .fold(Complex::new(T::zero(), T::zero()), |acc, x| acc + other.phase(x).conj() * self.phase(x));
        trace.norm() / T::of(dim as f64)
    }
}

/// Exact pulse-level propagator of `s` on `sites` with each step cut into `substeps` slices.
pub fn pulse_level_evolve<T: Real>(
    s: &PulseSchedule,
    substeps: usize,
    sites: &[GridPoint],
) -> Result<Propagator<T>, PulseError> {
    Ok(PulseProgram::from_schedule(s, sites, substeps)?.propagator())
}
