use std::collections::BTreeSet;

use ordcone::structure::validate_structure;
use ordcone::testkit::{random_structure, GeneratorConfig};

#[test]
fn thousand_seeds_validate() {
    for seed in 0..1000 {
        let n = 1 + (seed % 6) as usize;
        let s = random_structure(&GeneratorConfig::new(n, seed)).unwrap();
        let report = validate_structure(&s.to_candidate()).unwrap();
        assert!(report.is_valid(), "seed {seed} n {n}: {report}");
    }
}

#[test]
fn n4_corpus_is_not_degenerate() {
    let mut sizes = BTreeSet::new();
    let mut with_free = 0;
    for seed in 0..1000 {
        let s = random_structure(&GeneratorConfig::new(4, seed)).unwrap();
        sizes.insert(s.lattice().len());
        if s.lattice().iter().any(|&set| !s.e_free(set).unwrap().is_empty()) {
            with_free += 1;
        }
    }
    assert!(sizes.len() >= 2, "lattice sizes {sizes:?}");
    assert!(with_free >= 1);
}
