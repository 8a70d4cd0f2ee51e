//! Maximum independent set on cubic planar graphs, encoded in the ground
//! states of a nearest-neighbour Ising Hamiltonian on a rectangular lattice
//! and compiled into X-pulse decoupling schedules for a bare lattice Ising
//! resource.
//!
//! Pipeline: [`graph`] instances are reduced to a spin glass in a field
//! ([`reduction`]), laid out on the lattice ([`embedding`]), turned into a
//! wire-gadget lattice Hamiltonian ([`hamiltonian`]), compiled into a
//! 16-step pulse schedule ([`pulse`]) and simulated adiabatically
//! ([`dynamics`]). Every stage ships an exhaustive or exact checker.

pub mod dynamics;
pub mod embedding;
pub mod graph;
pub mod hamiltonian;
pub mod pulse;
pub mod reduction;
pub mod scalar;

pub use graph::{Edge, Graph};
pub use scalar::{Real, Scalar};

/// Exact rational used by the pulse engine.
pub type Rational = num_rational::Ratio<i64>;

/// Average Hamiltonian with exact rational coefficients.
pub type ExactCoupling = pulse::EffectiveCoupling<Rational>;
/// Average Hamiltonian with floating-point coefficients.
pub type FloatCoupling = pulse::EffectiveCoupling<f64>;

/// Double-precision state vector.
pub type StateVector = dynamics::State<f64>;
/// Single-precision state vector.
pub type StateVector32 = dynamics::State<f32>;
