//! Spectral gaps of the interpolated Hamiltonian by dense diagonalization.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::{DynamicsError, TransverseFieldHamiltonian};
use crate::hamiltonian::DiagonalIsing;

pub const MAX_GAP_SITES: usize = 12;

/// Eigenvalues closer than this count as one level.
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapPoint {
    pub s: f64,
    pub e0: f64,
    /// Second-lowest eigenvalue counted with multiplicity, minus `e0`; 0 when degenerate.
    pub gap: f64,
    /// Distance from `e0` to the next distinct level.
    pub level_gap: f64,
    /// Eigenvalues within tolerance of `e0`.
    pub ground_degeneracy: usize,
}

/// Two lowest levels of `(1 − s) Σ σx + s Ĥ_P` for each `s` in `s_grid`.
pub fn gap_scan(
    h_b: &TransverseFieldHamiltonian,
    model: &DiagonalIsing,
    s_grid: &[f64],
) -> Result<Vec<GapPoint>, DynamicsError> {
    let n = model.sites();
    if h_b.sites != n {
        return Err(DynamicsError::DimensionMismatch { expected: n, got: h_b.sites });
    }
    if n > MAX_GAP_SITES {
        return Err(DynamicsError::TooManySites { sites: n, limit: MAX_GAP_SITES });
    }
    if let Some(&s) = s_grid.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(DynamicsError::InvalidConfig(format!("interpolation parameter {} outside [0, 1]", s)));
    }
    let dim = 1usize << n;
    let energies: Vec<f64> = (0..dim as u64).map(|x| model.energy(x) as f64).collect();
    Ok(s_grid
        .iter()
        .map(|&s| {
            // At s = 1 the matrix is already diagonal; the dense solver would only add rounding.
            let mut ev: Vec<f64> = if s == 1.0 {
                energies.clone()
            } else {
                let mut m = DMatrix::<f64>::zeros(dim, dim);
                for x in 0..dim {
                    m[(x, x)] = s * energies[x];
                    for i in 0..n {
                        m[(x, x ^ (1 << i))] += 1.0 - s;
                    }
                }
                SymmetricEigen::new(m).eigenvalues.iter().copied().collect()
            };
            ev.sort_by(f64::total_cmp);
            let e0 = ev[0];
            let degeneracy = ev.iter().take_while(|&&e| e - e0 <= DEGENERACY_TOL).count();
            let second = ev.get(1).map_or(0.0, |&e| e - e0);
            GapPoint {
                s,
                e0,
                gap: if second <= DEGENERACY_TOL { 0.0 } else { second },
                level_gap: ev.get(degeneracy).map_or(0.0, |&e| e - e0),
                ground_degeneracy: degeneracy,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{embed, GridBudget};
    use crate::graph::Graph;
    use crate::hamiltonian::{build_lattice_hamiltonian, exhaustive_spectrum};

    #[test]
    fn single_site_minimum_is_root_two() {
        let model = DiagonalIsing::new(vec![1], []);
        let grid: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
        let scan = gap_scan(&TransverseFieldHamiltonian::new(1), &model, &grid).unwrap();
        let min = scan.iter().min_by(|a, b| a.gap.total_cmp(&b.gap)).unwrap();
        assert_eq!(min.s, 0.5);
        assert!((min.gap - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn transverse_end_has_gap_two() {
        let model = DiagonalIsing::new(vec![1, 1, 1], [(0, 1, 1), (1, 2, 1)]);
        let scan = gap_scan(&TransverseFieldHamiltonian::new(3), &model, &[0.0]).unwrap();
        assert!((scan[0].gap - 2.0).abs() < 1e-9);
        assert!((scan[0].e0 + 3.0).abs() < 1e-9);
    }

    #[test]
    fn diagonal_end_matches_enumeration() {
        let g = Graph::complete(4);
        let h = build_lattice_hamiltonian(&embed(&g, GridBudget::for_graph(&g)).unwrap(), 9).unwrap();
        let model = DiagonalIsing::from_lattice(&h);
        let spec = exhaustive_spectrum(&model, 2, 64, 26).unwrap();
        let p = gap_scan(&TransverseFieldHamiltonian::new(h.site_count()), &model, &[1.0]).unwrap()[0];
        assert_eq!(p.e0, spec.ground().energy as f64);
        assert_eq!(p.level_gap, spec.gap().unwrap() as f64);
        assert_eq!(p.ground_degeneracy as u64, spec.ground().degeneracy);
        assert_eq!(p.gap, 0.0);
    }

    #[test]
    fn dense_path_approaches_the_diagonal_end() {
        let g = Graph::complete(4);
        let h = build_lattice_hamiltonian(&embed(&g, GridBudget::for_graph(&g)).unwrap(), 3).unwrap();
        let model = DiagonalIsing::from_lattice(&h);
        let scan = gap_scan(&TransverseFieldHamiltonian::new(h.site_count()), &model, &[1.0 - 1e-12, 1.0]).unwrap();
        assert!((scan[0].e0 - scan[1].e0).abs() < 1e-6);
        assert!((scan[0].level_gap - scan[1].level_gap).abs() < 1e-6);
    }

    #[test]
    fn limits() {
        let big = DiagonalIsing::new(vec![0; 13], []);
        assert!(gap_scan(&TransverseFieldHamiltonian::new(13), &big, &[0.5]).is_err());
        let one = DiagonalIsing::new(vec![1], []);
        assert!(gap_scan(&TransverseFieldHamiltonian::new(1), &one, &[1.5]).is_err());
    }
}
