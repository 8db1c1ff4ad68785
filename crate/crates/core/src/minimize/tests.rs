use std::sync::Arc;

use super::*;
use crate::homotopy::{nerve_truncated, terminal_map, ThinOperad};
use crate::presheaf::{quotient_by_twist, representable_arc, top_generator};
use crate::site::omega::automorphisms;
use crate::site::Shape;

fn e_nerve() -> Arc<FinitePresheaf> {
    nerve_truncated(&ThinOperad::indiscrete(2), 3).unwrap().presheaf
}

fn run(p: &PresheafMap, d: usize) -> MinimizationResult {
    minimize(p, d, &MinimizeOptions::default()).unwrap()
}

#[test]
fn identity_is_minimal() {
    for code in ["|", "(|)", "(||)", "((|)|)"] {
        let rep = representable_arc(&Shape::from_code(code).unwrap());
        let res = run(&PresheafMap::identity(&rep), 2);
        assert!(res.is_identity(), "{code}");
        assert!(res.fibration.certified);
        assert!(verify_deformation_retract(&res).pass);
        assert!(is_skeletal(&res.q, 2, &OracleOptions::default()).pass);
    }
}

#[test]
fn interval_over_point_is_minimal() {
    let l1 = representable_arc(&Shape::linear(1));
    let p = terminal_map(&l1).unwrap();
    let res = run(&p, 1);
    assert!(res.is_identity());
    assert_eq!(res.report[0].representatives.len(), 2);
    assert!(verify_deformation_retract(&res).pass);
}

#[test]
fn groupoid_collapses_to_a_point() {
    let e = e_nerve();
    let p = terminal_map(&e).unwrap();
    let skel = is_skeletal(&p, 2, &OracleOptions::default());
    assert!(!skel.pass);
    assert!(skel.counterexamples.contains(&("0".to_string(), "1".to_string())));
    let res = run(&p, 2);
    assert_eq!(res.m.len(), 1);
    assert_eq!(res.report[0].classes, vec![vec!["0".to_string(), "1".to_string()]]);
    let v = verify_deformation_retract(&res);
    assert!(v.pass, "{:?}", v.failures);
    assert!(is_skeletal(&res.q, 2, &OracleOptions::default()).pass);
    let again = run(&res.q, 2);
    assert!(again.is_identity());
    let t = verify_retraction_trivial(&res, 2, 1, 1_000_000).unwrap();
    assert!(t.pass, "{:?}", t.rlp.failures);
}

#[test]
fn tampered_log_is_caught() {
    let p = terminal_map(&e_nerve()).unwrap();
    let mut res = run(&p, 2);
    let entry = res.log.iter_mut().find(|e| e.homotopy.is_some()).unwrap();
    let h = entry.homotopy.as_mut().unwrap();
    let last = h.values.len() - 1;
    h.values.swap(0, last);
    assert!(!verify_deformation_retract(&res).pass);
}

#[test]
fn non_normal_base_is_rejected() {
    let c2 = Shape::corolla(2);
    let x = representable_arc(&c2);
    let tau = automorphisms(&c2)[1].clone();
    let q = quotient_by_twist(&x, top_generator(&x), &tau, "C2/tau").unwrap();
    let res = run(&q, 2);
    assert!(matches!(verify_retraction_trivial(&res, 2, 2, 10_000), Err(DendroError::NotNormal(_))));
    let id = PresheafMap::identity(q.target());
    let r = check_pullback_minimality(&q, &id, 2, &OracleOptions::default()).unwrap();
    assert!(!r.hypothesis_holds);
    assert!(r.hypothesis_witness.is_some());
}

#[test]
fn mono_base_change_keeps_minimality() {
    let l2 = Shape::linear(2);
    let b = crate::presheaf::boundary(&l2);
    let id = PresheafMap::identity(b.target());
    let r = check_pullback_minimality(&b, &id, 2, &OracleOptions::default()).unwrap();
    assert!(r.hypothesis_holds);
    assert!(r.pullback.pass);
}

#[test]
fn non_normal_domain_is_rejected() {
    let c2 = Shape::corolla(2);
    let x = representable_arc(&c2);
    let tau = automorphisms(&c2)[1].clone();
    let q = quotient_by_twist(&x, top_generator(&x), &tau, "C2/tau").unwrap();
    let err = minimize(&PresheafMap::identity(q.target()), 2, &MinimizeOptions::default()).unwrap_err();
    assert!(matches!(err.error, DendroError::NotNormal(_)));
}
