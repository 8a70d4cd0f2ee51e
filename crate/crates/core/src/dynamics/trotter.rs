//! Adiabatic runs whose problem-Hamiltonian segments come from a compiled pulse schedule.

use super::{diagonal_energies, initial_ground_state, integrate, AdiabaticRunConfig, DynamicsError, State, TransverseFieldHamiltonian};
use crate::hamiltonian::{DiagonalIsing, LatticeHamiltonian};
use crate::pulse::{PulseProgram, PulseSchedule};
use crate::Real;

pub const MAX_PULSE_RUN_SITES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSource {
    /// Phases produced by the pulse program, durations scaled to each segment.
    Pulses,
    /// Phases `exp(−i τ Ĥ_P)` computed directly.
    Exact,
}

/// Splits `[0, T]` into `segments` pieces; each applies half of the
/// problem segment, the transverse segment weighted `1 − s`, then the other
/// half, with `s` at the piece's midpoint.
///
/// With [`PhaseSource::Pulses`] the problem segment of length `τ` is the
/// schedule run with every duration scaled by `τ`. The program's phase is
/// linear in the durations, so one unit-time propagator serves every segment.
pub fn trotterized_pulse_run<T: Real>(
    schedule: &PulseSchedule,
    h_b: &TransverseFieldHamiltonian,
    h_p: &LatticeHamiltonian,
    cfg: &AdiabaticRunConfig,
    segments: usize,
    source: PhaseSource,
) -> Result<State<T>, DynamicsError> {
    cfg.validate()?;
    let n = h_p.site_count();
    if n > MAX_PULSE_RUN_SITES {
        return Err(DynamicsError::TooManySites { sites: n, limit: MAX_PULSE_RUN_SITES });
    }
    if h_b.sites != n {
        return Err(DynamicsError::DimensionMismatch { expected: n, got: h_b.sites });
    }
    if segments == 0 {
        return Err(DynamicsError::InvalidConfig("need at least one segment".into()));
    }
    let energies: Vec<T> = match source {
        PhaseSource::Exact => diagonal_energies(&DiagonalIsing::from_lattice(h_p)),
        PhaseSource::Pulses => {
            let sites: Vec<_> = h_p.sites().iter().map(|s| s.at).collect();
            let u = PulseProgram::from_schedule(schedule, &sites, 1)?.propagator::<T>();
            if !u.is_diagonal() {
                return Err(DynamicsError::NotDiagonal);
            }
            u.angle.into_iter().map(|a| -a).collect()
        }
    };
    integrate(initial_ground_state::<T>(n)?, &energies, cfg.total_time, segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve_adiabatic;
    use crate::embedding::{embed, GridBudget};
    use crate::graph::Graph;
    use crate::hamiltonian::build_lattice_hamiltonian;
    use crate::pulse::compile_schedule;

    fn k4(c: i64) -> (LatticeHamiltonian, PulseSchedule) {
        let g = Graph::complete(4);
        let h = build_lattice_hamiltonian(&embed(&g, GridBudget::for_graph(&g)).unwrap(), c).unwrap();
        let s = compile_schedule(&h).unwrap();
        (h, s)
    }

    #[test]
    fn pulses_match_exact_phases() {
        let (h, s) = k4(9);
        let hb = TransverseFieldHamiltonian::new(h.site_count());
        let cfg = AdiabaticRunConfig::new(5.0, 0);
        let a = trotterized_pulse_run::<f64>(&s, &hb, &h, &cfg, 200, PhaseSource::Pulses).unwrap();
        let b = trotterized_pulse_run::<f64>(&s, &hb, &h, &cfg, 200, PhaseSource::Exact).unwrap();
        assert!(a.distance(&b) < 1e-9);
    }

    #[test]
    fn one_short_segment_agrees_to_second_order() {
        let (h, s) = k4(3);
        let hb = TransverseFieldHamiltonian::new(h.site_count());
        let mut last = f64::INFINITY;
        for t in [0.02, 0.01, 0.005] {
            let cfg = AdiabaticRunConfig::new(t, 0);
            let a = trotterized_pulse_run::<f64>(&s, &hb, &h, &cfg, 1, PhaseSource::Pulses).unwrap();
            let b = evolve_adiabatic::<f64>(&hb, &h, &cfg).unwrap();
            let d = a.distance(&b);
            assert!(d < t * t * 100.0, "T = {}: {}", t, d);
            assert!(d < last / 3.0);
            last = d;
        }
    }

    #[test]
    fn doubling_segments_reduces_infidelity() {
        let (h, s) = k4(9);
        let hb = TransverseFieldHamiltonian::new(h.site_count());
        let cfg = AdiabaticRunConfig::new(2.0, 0).with_dt(1e-4);
        let reference = evolve_adiabatic::<f64>(&hb, &h, &cfg).unwrap();
        let mut last = f64::INFINITY;
        for k in [25, 50, 100, 200, 400] {
            let psi = trotterized_pulse_run::<f64>(&s, &hb, &h, &cfg, k, PhaseSource::Pulses).unwrap();
            let inf = 1.0 - psi.fidelity(&reference);
            assert!(inf < last, "{} segments: {} after {}", k, inf, last);
            last = inf;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn rejects_large_or_empty_runs() {
        let (h, s) = k4(9);
        let hb = TransverseFieldHamiltonian::new(h.site_count());
        let cfg = AdiabaticRunConfig::new(1.0, 0);
        assert!(trotterized_pulse_run::<f64>(&s, &hb, &h, &cfg, 0, PhaseSource::Exact).is_err());
        let g = Graph::cube();
        let big = build_lattice_hamiltonian(&embed(&g, GridBudget::for_graph(&g)).unwrap(), 9).unwrap();
        let sb = compile_schedule(&big).unwrap();
        let hb = TransverseFieldHamiltonian::new(big.site_count());
        assert!(matches!(
            trotterized_pulse_run::<f64>(&sb, &hb, &big, &cfg, 4, PhaseSource::Exact),
            Err(DynamicsError::TooManySites { .. })
        ));
    }
}
