use proptest::prelude::*;

use orthoising::dynamics::{evolve_adiabatic, success_probability, AdiabaticRunConfig, TransverseFieldHamiltonian};
use orthoising::embedding::{embed, validate_embedding, GridBudget, OrthogonalEmbedding};
use orthoising::graph::{mis_oracle, parse_graph};
use orthoising::hamiltonian::{build_lattice_hamiltonian, check_correspondence, LatticeHamiltonian};
use orthoising::pulse::{compile_schedule, verify_schedule, PulseSchedule};
use orthoising::reduction::build_hp;
use orthoising::Graph;

#[test]
fn prism_end_to_end() {
    let g = parse_graph("6 9\n0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n0 3\n1 4\n2 5\n").unwrap();
    let emb = embed(&g, GridBudget::for_graph(&g)).unwrap();
    assert!(validate_embedding(&g, &emb).is_valid());
    let h = build_lattice_hamiltonian(&emb, 9).unwrap();
    let report = check_correspondence(&g, &build_hp(&g).unwrap(), &h);
    assert!(report.ground_ok() && report.first_excited_ok());
    let s = compile_schedule(&h).unwrap();
    assert!(verify_schedule(&s, &h).passes());
    assert!(h.site_count() <= 14);
    let cfg = AdiabaticRunConfig::new(40.0, 3);
    let psi = evolve_adiabatic::<f64>(&TransverseFieldHamiltonian::new(h.site_count()), &h, &cfg).unwrap();
    let mis = mis_oracle(&g, 24).unwrap().cardinality;
    assert_eq!(mis, 2);
    assert!(success_probability(&psi, &g, &h, mis).unwrap().probability > 0.5);
}

#[test]
fn artifacts_round_trip() {
    let g = Graph::cube();
    let emb = embed(&g, GridBudget::for_graph(&g)).unwrap();
    assert_eq!(OrthogonalEmbedding::from_json(&emb.to_json()).unwrap(), emb);
    let h = build_lattice_hamiltonian(&emb, 5).unwrap();
    let h2 = LatticeHamiltonian::from_json(&h.to_json()).unwrap();
    assert_eq!(h2.to_json(), h.to_json());
    let s = compile_schedule(&h).unwrap();
    let s2 = PulseSchedule::from_json(&s.to_json()).unwrap();
    assert!(verify_schedule(&s2, &h2).passes());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Subgraphs of planar graphs with degree at most three stay embeddable.
    #[test]
    fn planar_subgraphs_embed(base in 0usize..4, keep in proptest::collection::vec(any::<bool>(), 30)) {
        let host = match base {
            0 => Graph::cube(),
            1 => Graph::prism(5),
            2 => Graph::dodecahedron(),
            _ => Graph::bridged_k4_pair(),
        };
        let edges: Vec<(usize, usize)> = host
            .edges()
            .iter()
            .zip(keep.iter().cycle())
            .filter(|(_, &k)| k)
            .map(|(e, _)| (e.0, e.1))
            .collect();
        let g = Graph::new(host.n(), edges).unwrap();
        let emb = embed(&g, GridBudget::for_graph(&g)).unwrap();
        let report = validate_embedding(&g, &emb);
        prop_assert!(report.is_valid(), "{:?}", report.violations);
        prop_assert!(emb.grid_rows <= g.n() && emb.grid_cols <= g.n());
    }
}
