use stratsym::hamflow::{conservation_report, integrate};
use stratsym::homology::{betti, hodge_duality_check, Operator, Selector};
use stratsym::models::{catalog, load_builtin, ModelCatalogEntry};

const NAMES: [&str; 6] = ["r2n(1)", "r2n(2)", "torus4", "kodaira_thurston", "cz2_cone", "sl2_cone"];

#[test]
fn every_catalog_entry_loads() {
    for item in catalog() {
        let name = if item.name == "r2n(n)" { "r2n(2)" } else { item.name };
        assert!(load_builtin(name).is_ok(), "{name}");
    }
}

#[test]
fn toml_round_trip_is_stable() {
    for name in NAMES {
        let text = load_builtin(name).unwrap().to_toml();
        let back = ModelCatalogEntry::from_toml(&text).unwrap();
        assert_eq!(back.to_toml(), text, "{name}");
    }
}

#[test]
fn reloaded_symplectic_models_keep_their_homology() {
    for name in ["torus4", "kodaira_thurston"] {
        let entry = load_builtin(name).unwrap();
        let back = ModelCatalogEntry::from_toml(&entry.to_toml()).unwrap();
        let (a, b) = (entry.symplectic().unwrap(), back.symplectic().unwrap());
        for op in [Operator::D, Operator::Delta] {
            assert_eq!(betti(a, op, Selector::Compact).unwrap(), betti(b, op, Selector::Compact).unwrap(), "{name}");
        }
        assert!(hodge_duality_check(b, Selector::Compact, 0..=4).unwrap().pass);
    }
    let back = ModelCatalogEntry::from_toml(&load_builtin("r2n(1)").unwrap().to_toml()).unwrap();
    let m = back.symplectic().unwrap();
    for t in 0..=4 {
        assert!(hodge_duality_check(m, Selector::TotalDegree(t), 0..=2).unwrap().pass, "total degree {t}");
    }
}

#[test]
fn reloaded_cones_integrate_identically() {
    for name in ["cz2_cone", "sl2_cone"] {
        let entry = load_builtin(name).unwrap();
        let back = ModelCatalogEntry::from_toml(&entry.to_toml()).unwrap();
        let (s1, s2) = (entry.hamiltonian_system(0).unwrap().unwrap(), back.hamiltonian_system(0).unwrap().unwrap());
        let initial = [0.0, 1.0, 0.0];
        let t1 = integrate(&s1, &initial, 2.0, 1e-3);
        let t2 = integrate(&s2, &initial, 2.0, 1e-3);
        let (a, b) = (t1.unwrap(), t2.unwrap());
        assert_eq!(a.states, b.states, "{name}");
        assert!(conservation_report(&a, &s1).max_drift() < 1e-9, "{name}");
    }
}
