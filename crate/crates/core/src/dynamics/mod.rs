//! State-vector simulation of `Ĥ(s) = (1 − s) Ĥ_B + s Ĥ_P`, `s = t/T`,
//! with `Ĥ_B = Σ σx` over the used sites and a diagonal `Ĥ_P`.
//!
//! Basis state `x` has bit `i` set when site `i` (row-major) is spin up.

mod gap;
mod trotter;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::hamiltonian::{DiagonalIsing, LatticeHamiltonian};
use crate::pulse::PulseError;
use crate::reduction::{bits_from_spins, objective_l, repair_to_independent, BitAssignment};
use crate::Real;

pub use gap::{gap_scan, GapPoint, MAX_GAP_SITES};
pub use trotter::{trotterized_pulse_run, PhaseSource, MAX_PULSE_RUN_SITES};

pub const MAX_SIM_SITES: usize = 14;

/// Below this dimension the amplitude updates stay on one thread.
const PARALLEL_DIM: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("{sites} sites exceed the simulator limit of {limit}")]
    TooManySites { sites: usize, limit: usize },
    #[error("state has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
    #[error("norm drifted to {norm} at step {step}")]
    NormDrift { step: usize, norm: f64 },
    #[error("non-finite amplitude at step {step}")]
    NonFinite { step: usize },
    #[error("pulse program: {0}")]
    Pulse(#[from] PulseError),
    #[error("pulse program does not return to the computational frame")]
    NotDiagonal,
}

/// Amplitudes over `2^sites` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T> {
    sites: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> State<T> {
    pub fn from_amplitudes(sites: usize, amps: Vec<Complex<T>>) -> Result<Self, DynamicsError> {
        if amps.len() != 1 << sites {
            return Err(DynamicsError::DimensionMismatch { expected: 1 << sites, got: amps.len() });
        }
        Ok(State { sites, amps })
    }

    pub fn basis(sites: usize, x: usize) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << sites];
        amps[x] = Complex::new(T::one(), T::zero());
        State { sites, amps }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dimension(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr().to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &State<T>) -> Complex<T> {
        self.amps.iter().zip(&other.amps).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &State<T>) -> T {
        self.inner(other).norm_sqr()
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &State<T>) -> T {
        self.amps.iter().zip(&other.amps).fold(T::zero(), |acc, (a, b)| acc + (a - b).norm_sqr()).sqrt()
    }

    /// `⟨ψ| Σ σx |ψ⟩`.
    pub fn transverse_energy(&self) -> T {
        let mut e = T::zero();
        for i in 0..self.sites {
            for (x, a) in self.amps.iter().enumerate() {
                e = e + (a.conj() * self.amps[x ^ (1 << i)]).re;
            }
        }
        e
    }

    /// Amplitudes as little-endian `f64` (re, im) pairs in basis order.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 * self.amps.len());
        for a in &self.amps {
            out.extend_from_slice(&a.re.to_f64().unwrap_or(f64::NAN).to_le_bytes());
            out.extend_from_slice(&a.im.to_f64().unwrap_or(f64::NAN).to_le_bytes());
        }
        out
    }
}

/// `Σ σx` with unit weight on each used site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransverseFieldHamiltonian {
    pub sites: usize,
}

impl TransverseFieldHamiltonian {
    pub fn new(sites: usize) -> Self {
        TransverseFieldHamiltonian { sites }
    }

    pub fn term_count(&self) -> usize {
        self.sites
    }
}

/// Ground state of `Σ σx`: every site in `|−⟩`, amplitude `2^{−n/2} (−1)^{popcount x}`.
pub fn initial_ground_state<T: Real>(sites: usize) -> Result<State<T>, DynamicsError> {
    if sites > MAX_SIM_SITES {
        return Err(DynamicsError::TooManySites { sites, limit: MAX_SIM_SITES });
    }
    let scale = T::of(0.5f64.powf(sites as f64 / 2.0));
    let amps = (0..1usize << sites)
        .map(|x| Complex::new(if x.count_ones() % 2 == 0 { scale } else { -scale }, T::zero()))
        .collect();
    Ok(State { sites, amps })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdiabaticRunConfig {
    pub total_time: f64,
    pub dt: f64,
    pub seed: u64,
}

impl AdiabaticRunConfig {
    /// `dt` defaults to `T/1000`.
    pub fn new(total_time: f64, seed: u64) -> Self {
        AdiabaticRunConfig { total_time, dt: total_time / 1000.0, seed }
    }

    pub fn with_dt(self, dt: f64) -> Self {
        AdiabaticRunConfig { dt, ..self }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let (t, dt) = (self.total_time, self.dt);
        if !(t.is_finite() && dt.is_finite() && t > 0.0 && dt > 0.0 && dt <= t) {
            return Err(DynamicsError::InvalidConfig(format!("need 0 < dt <= T, got T = {}, dt = {}", t, dt)));
        }
        Ok(())
    }

    /// Number of equal steps; the step actually used is `T / steps ≤ dt`.
    pub fn steps(&self) -> usize {
        ((self.total_time / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }
}

/// Energies of a diagonal model on every basis state.
pub fn diagonal_energies<T: Real>(model: &DiagonalIsing) -> Vec<T> {
    (0..1u64 << model.sites()).map(|x| T::of(model.energy(x) as f64)).collect()
}

fn norm_tolerance<T: Real>() -> T {
    if T::epsilon() < T::of(1e-10) {
        T::of(1e-9)
    } else {
        T::of(1e-3)
    }
}

fn apply_phase<T: Real>(amps: &mut [Complex<T>], energies: &[T], tau: T) {
    let kick = |(a, &e): (&mut Complex<T>, &T)| *a = *a * Complex::from_polar(T::one(), -tau * e);
    if amps.len() >= PARALLEL_DIM {
        amps.par_iter_mut().zip(energies.par_iter()).for_each(kick);
    } else {
        amps.iter_mut().zip(energies.iter()).for_each(kick);
    }
}

/// `exp(−iθ Σ σx)` as a product of single-site rotations.
fn apply_transverse<T: Real>(amps: &mut [Complex<T>], sites: usize, theta: T) {
    let (c, s) = (theta.cos(), theta.sin());
    let mix = |chunk: &mut [Complex<T>]| {
        let (lo, hi) = chunk.split_at_mut(chunk.len() / 2);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = Complex::new(x.re * c + y.im * s, x.im * c - y.re * s);
            *b = Complex::new(y.re * c + x.im * s, y.im * c - x.re * s);
        }
    };
    for i in 0..sites {
        let width = 2 << i;
        if amps.len() >= PARALLEL_DIM {
            amps.par_chunks_mut(width).for_each(mix);
        } else {
            amps.chunks_mut(width).for_each(mix);
        }
    }
}

/// Symmetric splitting of `(1 − s) Σ σx + s E` from `s = 0` to `1` in `steps` equal steps,
/// with `s` taken at each step's midpoint.
pub(crate) fn integrate<T: Real>(
    mut state: State<T>,
    energies: &[T],
    total_time: f64,
    steps: usize,
) -> Result<State<T>, DynamicsError> {
    if energies.len() != state.dimension() {
        return Err(DynamicsError::DimensionMismatch { expected: state.dimension(), got: energies.len() });
    }
    let dt = total_time / steps as f64;
    let tol = norm_tolerance::<T>();
    for k in 0..steps {
        let s = (k as f64 + 0.5) / steps as f64;
        let half = T::of(s * dt / 2.0);
        apply_phase(&mut state.amps, energies, half);
        apply_transverse(&mut state.amps, state.sites, T::of((1.0 - s) * dt));
        apply_phase(&mut state.amps, energies, half);
        let norm = state.norm_sqr();
        if !norm.is_finite() {
            return Err(DynamicsError::NonFinite { step: k });
        }
        if (norm - T::one()).abs() > tol {
            return Err(DynamicsError::NormDrift { step: k, norm: norm.to_f64().unwrap_or(f64::NAN) });
        }
    }
    Ok(state)
}

/// Evolves the `Ĥ_B` ground state under any diagonal problem model.
pub fn evolve_model<T: Real>(
    h_b: &TransverseFieldHamiltonian,
    model: &DiagonalIsing,
    cfg: &AdiabaticRunConfig,
) -> Result<State<T>, DynamicsError> {
    cfg.validate()?;
    if h_b.sites != model.sites() {
        return Err(DynamicsError::DimensionMismatch { expected: model.sites(), got: h_b.sites });
    }
    let psi = initial_ground_state::<T>(h_b.sites)?;
    integrate(psi, &diagonal_energies::<T>(model), cfg.total_time, cfg.steps())
}

pub fn evolve_adiabatic<T: Real>(
    h_b: &TransverseFieldHamiltonian,
    h_p: &LatticeHamiltonian,
    cfg: &AdiabaticRunConfig,
) -> Result<State<T>, DynamicsError> {
    evolve_model(h_b, &DiagonalIsing::from_lattice(h_p), cfg)
}

/// Graph-level independent set read from a lattice basis state: the spin-up
/// real vertices, repaired to independence.
pub fn decode(g: &Graph, h: &LatticeHamiltonian, x: usize) -> BitAssignment {
    let config = crate::hamiltonian::SpinConfiguration::from_up_mask(x as u64, h.site_count());
    let bits = bits_from_spins(&h.restrict(&config));
    repair_to_independent(g, &bits).expect("restriction matches the graph")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuccessReport {
    pub mis_size: usize,
    /// Weight on states whose vertex spins are a graph ground state,
    /// so that repair yields a maximum independent set.
    pub probability: f64,
    /// Weight on states whose spin-up vertices already form a maximum independent set.
    pub independent_probability: f64,
    /// Weight on states with every wire aligned.
    pub aligned_probability: f64,
}

pub fn success_probability<T: Real>(
    state: &State<T>,
    g: &Graph,
    h: &LatticeHamiltonian,
    mis_size: usize,
) -> Result<SuccessReport, DynamicsError> {
    if state.sites() != h.site_count() {
        return Err(DynamicsError::DimensionMismatch { expected: 1 << h.site_count(), got: state.dimension() });
    }
    if h.vertex_sites().len() != g.n() {
        return Err(DynamicsError::DimensionMismatch { expected: g.n(), got: h.vertex_sites().len() });
    }
    let target = mis_size as i64;
    let mut report = SuccessReport { mis_size, probability: 0.0, independent_probability: 0.0, aligned_probability: 0.0 };
    for (x, p) in state.probabilities().into_iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let config = crate::hamiltonian::SpinConfiguration::from_up_mask(x as u64, h.site_count());
        let bits = bits_from_spins(&h.restrict(&config));
        if objective_l(g, &bits).expect("sizes checked") == target {
            report.probability += p;
            if g.is_independent(&bits.members()) {
                report.independent_probability += p;
            }
        }
        let aligned = h.wires().iter().all(|w| {
            let ferro = &w.chain[..w.chain.len() - 1];
            ferro.windows(2).all(|q| (x >> q[0] & 1) == (x >> q[1] & 1))
        });
        if aligned {
            report.aligned_probability += p;
        }
    }
    Ok(report)
}

/// One basis state drawn from `|amplitude|²`.
pub fn sample_measurement<T: Real>(state: &State<T>, seed: u64) -> usize {
    sample_shots(state, seed, 1)[0]
}

/// `shots` basis states from one seeded stream.
pub fn sample_shots<T: Real>(state: &State<T>, seed: u64, shots: usize) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(state.dimension());
    let mut total = 0.0;
    for p in state.probabilities() {
        total += p;
        cumulative.push(total);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..shots)
        .map(|_| {
            let u = rng.gen::<f64>() * total;
            cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1)
        })
        .collect()
}
