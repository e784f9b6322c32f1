//! Hand-computed values, frozen.

use ordcone::index_set::IndexSet;
use ordcone::linalg::{rank_one_update_inverse, Matrix, Vector};
use ordcone::maps::{
    alpha_inverse_apply, alpha_matrix, beta_inverse_apply, beta_matrix, phi_inverse_apply, phi_matrix,
};
use ordcone::realization::{absorb, build_chain, epsilon_bound, interpolate, r_threshold, refine, verify_chain};
use ordcone::structure::{validate_structure, Clause, ConeStructure};
use ordcone::testkit::fixtures::{bad2, lex2, orth2};
use ordcone::{LinalgError, Rational};

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn v(vals: &[&str]) -> Vector<Rational> {
    Vector::new(vals.iter().map(|s| q(s)).collect())
}

fn set(e: &[u64]) -> IndexSet {
    IndexSet::from_one_based(e, 2).unwrap()
}

#[test]
fn rank_one_inverse_values() {
    let inv: Matrix<Rational> = rank_one_update_inverse(&q("1"), 3).unwrap();
    assert_eq!(inv, Matrix::identity(3).add(&Matrix::ones(3).scale(&q("-1/4"))).unwrap());
    assert!(rank_one_update_inverse(&q("0"), 5).unwrap().is_identity());
    assert!(matches!(rank_one_update_inverse(&q("-1/2"), 2), Err(LinalgError::SingularParameter { .. })));
}

#[test]
fn derived_data_values() {
    let d = orth2().derive();
    assert_eq!((d.z(0), d.z(1)), (set(&[2]), set(&[1])));
    assert_eq!((d.p(0), d.p(1)), (set(&[1, 2]), set(&[1, 2])));
    assert_eq!(d.block(set(&[2])), Some(set(&[1])));
    assert_eq!(d.block(set(&[1])), Some(set(&[2])));

    let d = lex2().derive();
    assert_eq!((d.z(0), d.z(1)), (IndexSet::EMPTY, IndexSet::EMPTY));
    assert_eq!(d.block(IndexSet::EMPTY), Some(set(&[1, 2])));
    assert_eq!((d.p(0), d.p(1)), (set(&[1, 2]), IndexSet::EMPTY));

    let one = ConeStructure::orthant(1).derive();
    assert_eq!((one.z(0), one.p(0)), (IndexSet::EMPTY, IndexSet::singleton(0)));
}

#[test]
fn membership_values() {
    let (lex, orth) = (lex2(), orth2());
    assert_eq!(lex.support_closure(&v(&["0", "3"])), set(&[1, 2]));
    assert_eq!(orth.support_closure(&v(&["0", "3"])), set(&[2]));
    assert_eq!(lex.member_v(&v(&["1", "-5"])), Some(set(&[1, 2])));
    assert_eq!(lex.member_v(&v(&["0", "3"])), None);
    assert_eq!(lex.member_v(&v(&["0", "0"])), Some(IndexSet::EMPTY));
    assert!(lex.member_u(&v(&["1", "1"])));
    assert!(!lex.member_u(&v(&["1", "0"])));
}

#[test]
fn validator_values() {
    assert!(validate_structure(&orth2().to_candidate()).unwrap().is_valid());
    let report = validate_structure(&bad2()).unwrap();
    assert!(report.cites(Clause::Rv2, &[set(&[1]), set(&[1, 2])]));
    assert_eq!(report.of_clause(Clause::Rv1).count(), 0);
}

#[test]
fn map_values() {
    let (dl, d_o) = (lex2().derive(), orth2().derive());
    assert_eq!(alpha_matrix(&dl, &q("1")).unwrap(), Matrix::from_i64_rows(&[&[2, 1], &[1, 2]]));
    assert_eq!(alpha_matrix(&d_o, &q("1/3")).unwrap(), Matrix::identity(2).scale(&q("4/3")));
    assert_eq!(beta_matrix(&dl, &q("2")).unwrap(), Matrix::from_i64_rows(&[&[1, 0], &[-2, 1]]));
    assert_eq!(alpha_inverse_apply(&dl, &q("1/24"), &v(&["1", "3"])).unwrap(), v(&["11/13", "37/13"]));
    assert_eq!(alpha_inverse_apply(&d_o, &q("1/3"), &v(&["4", "8"])).unwrap(), v(&["3", "6"]));
    assert_eq!(beta_inverse_apply(&dl, &q("8"), &v(&["1", "-5"])).unwrap(), v(&["1", "3"]));
}

#[test]
fn threshold_values() {
    let s = lex2();
    let d = s.derive();
    assert_eq!(epsilon_bound(&v(&["1", "3"]), 2).unwrap(), q("1/24"));
    assert_eq!(epsilon_bound(&v(&["1", "1", "1"]), 3).unwrap(), q("1/12"));
    assert_eq!(r_threshold(&s, &d, &v(&["1", "-5"])).unwrap(), q("6"));
    assert_eq!(beta_inverse_apply(&d, &q("6"), &v(&["1", "-5"])).unwrap(), v(&["1", "1"]));
    assert_eq!(r_threshold(&s, &d, &v(&["1", "0"])).unwrap(), q("1"));
    assert_eq!(r_threshold(&s, &d, &v(&["0", "0"])).unwrap(), q("1"));
}

#[test]
fn refine_values() {
    let s = lex2();
    let d = s.derive();
    let phi1 = phi_matrix(&d, &q("1"), &q("1")).unwrap();
    let cols: Vec<_> = (0..2).map(|j| phi_inverse_apply(&d, &q("4"), &q("1/4"), &phi1.column(j)).unwrap()).collect();
    let psi = Matrix::from_columns(&cols).unwrap();
    assert_eq!(psi, Matrix::from_rows(vec![vec![q("1/2"), q("0")], vec![q("11/2"), q("4")]]).unwrap());

    let plain = refine(&s, &d, &q("1"), &q("1"), &q("2"), &[]).unwrap();
    assert_eq!(plain, (q("3"), q("1/32")));
    assert_eq!(refine(&s, &d, &q("1"), &q("1"), &q("2"), &[Vector::zeros(2)]).unwrap(), plain);
}

#[test]
fn chain_values() {
    let c = build_chain(&orth2(), 3, &q("1"), &q("1")).unwrap();
    for psi in c.connecting() {
        assert!(psi.scalar_multiple_of_identity().is_some_and(|k| k > q("0")));
    }
    assert!(verify_chain(&lex2(), &build_chain(&lex2(), 5, &q("1"), &q("1")).unwrap()).passed());
    assert!(build_chain(&lex2(), 1, &q("1"), &q("1")).unwrap().connecting().is_empty());

    let c = build_chain(&lex2(), 1, &q("1"), &q("1")).unwrap();
    let (extended, index) = absorb(&c, &v(&["1", "-5"])).unwrap();
    assert_eq!(index, 2);
    assert!(extended.stage_coordinates(2, &v(&["1", "-5"])).unwrap().is_nonneg());
    assert_eq!(absorb(&c, &Vector::zeros(2)).unwrap(), (c.clone(), 1));
    let o = build_chain(&orth2(), 1, &q("7"), &q("9")).unwrap();
    assert_eq!(absorb(&o, &v(&["2", "3"])).unwrap().1, 1);
}

#[test]
fn interpolation_values() {
    let o = build_chain(&orth2(), 1, &q("1"), &q("1")).unwrap();
    let (b, _) = interpolate(&o, [&v(&["0", "1"]), &v(&["1", "0"])], [&v(&["1", "1"]), &v(&["2", "2"])]).unwrap();
    assert_eq!(b, v(&["1", "1"]));

    let s = lex2();
    let c = build_chain(&s, 1, &q("1"), &q("1")).unwrap();
    let (a1, a2, c1, c2) = (v(&["0", "0"]), v(&["1/2", "-10"]), v(&["1", "0"]), v(&["2", "-3"]));
    let (b, _) = interpolate(&c, [&a1, &a2], [&c1, &c2]).unwrap();
    for check in [b.sub(&a1), b.sub(&a2), c1.sub(&b), c2.sub(&b)] {
        assert!(s.member_v(&check).is_some(), "b = {b:?}");
    }
}
