use std::sync::Arc;

use super::*;
use crate::presheaf::{pushout, rep_info, representable_arc, yoneda, Element, FinitePresheaf};
use crate::site::omega::{degeneracies, face_with_image};
use crate::site::Shape;

fn counts(x: &FinitePresheaf) -> Vec<usize> {
    let d = x.max_degree().unwrap_or(0);
    (0..=d).map(|n| x.generators().iter().filter(|g| g.shape.degree() == n).count()).collect()
}

fn nerve_e(d: usize) -> Arc<FinitePresheaf> {
    nerve_truncated(&ThinOperad::indiscrete(2), d).unwrap().presheaf
}

fn colour(x: &FinitePresheaf, name: &str) -> Element {
    x.gen_element(x.find(name).unwrap())
}

/// `Δ[2]` with the edge `1 -> 2` collapsed: two arrows `0 -> 1` related by a triangle.
fn collapsed_triangle() -> (Arc<FinitePresheaf>, Element, Element) {
    let l2 = representable_arc(&Shape::linear(2));
    let d0 = face_with_image(&Shape::linear(2), &[0, 1]).unwrap();
    let edge = l2.act(&d0, &l2.gen_element(l2.len() - 1)).unwrap();
    let f = yoneda(&l2, &edge);
    let pt = representable_arc(&Shape::eta());
    let s = degeneracies(&Shape::linear(1), &Shape::eta()).remove(0);
    let g = yoneda(&pt, &pt.act(&s, &pt.gen_element(0)).unwrap());
    let po = pushout(&f, &g, "collapsed").unwrap();
    let y = po.object.clone();
    let top = po.from_b.apply(&l2.gen_element(l2.len() - 1));
    let short = face_with_image(&Shape::linear(2), &[1, 2]).unwrap();
    let long = face_with_image(&Shape::linear(2), &[0, 2]).unwrap();
    (y.clone(), y.act(&short, &top).unwrap(), y.act(&long, &top).unwrap())
}

#[test]
fn colour_cylinder_is_an_interval() {
    let t = tensor_interval(&representable_arc(&Shape::eta())).unwrap();
    assert_eq!(counts(&t.cylinder.object), vec![2, 1]);
    assert!(t.proj.target().len() == 1);
    assert_ne!(t.i0.apply(&t.i0.source().gen_element(0)), t.i1.apply(&t.i1.source().gen_element(0)));
}

#[test]
fn square_has_two_triangles() {
    let t = tensor_interval(&representable_arc(&Shape::linear(1))).unwrap();
    assert_eq!(counts(&t.cylinder.object), vec![4, 5, 2]);
    let cyl = rep_cylinder(&Shape::corolla(2), 1);
    assert!(crate::presheaf::validate_functoriality(&cyl.object, 3).pass);
}

#[test]
fn nerve_of_free_operad_is_representable() {
    for code in ["(||)", "((|)|)", "(()|)"] {
        let t = Shape::from_code(code).unwrap();
        let n = nerve_truncated(&ThinOperad::free_on(&t), 6).unwrap();
        assert!(!n.truncated);
        assert_eq!(counts(&n.presheaf), counts(&representable_arc(&t)), "{code}");
    }
}

#[test]
fn groupoid_nerve_is_truncated() {
    let n = nerve_truncated(&ThinOperad::indiscrete(2), 3).unwrap();
    assert!(n.truncated);
    assert_eq!(counts(&n.presheaf), vec![2, 2, 2, 2]);
    assert!(!nerve_truncated(&ThinOperad::free_on(&Shape::linear(2)), 4).unwrap().truncated);
}

#[test]
fn operads_must_be_closed() {
    let c = vec!["a".to_string(), "b".to_string(), "c".to_string()];
    assert!(ThinOperad::new("broken", c.clone(), [(vec![0], 1), (vec![1], 2)]).is_err());
    assert!(ThinOperad::new("chain", c, [(vec![0], 1), (vec![1], 2), (vec![0], 2)]).is_ok());
}

#[test]
fn inner_horn_fills_in_a_simplex() {
    let l2 = Shape::linear(2);
    let horns = Family::Inner.members(&crate::site::Arities::linear(), 2);
    assert_eq!(horns.len(), 1);
    let i = horns[0].inclusion();
    let b = representable_arc(&l2);
    let top = i.clone().with_target(b.clone());
    let p = terminal_map(&b).unwrap();
    let bottom = terminal_map(i.target()).unwrap();
    let problem = LiftingProblem::new(i, top, bottom, p).unwrap();
    let h = solve_lift(&problem, &mut Budget::new(10_000)).unwrap().unwrap();
    assert!(h.is_iso());
}

#[test]
fn lifting_budget_is_enforced() {
    let e = nerve_e(3);
    let p = terminal_map(&e).unwrap();
    let r = has_rlp(&p, &Family::Inner, 3, 1, 1);
    assert!(!r.pass);
    assert!(!r.budget_exhausted.is_empty());
}

#[test]
fn families_on_simplices() {
    let lin = crate::site::Arities::linear();
    assert_eq!(Family::Inner.members(&lin, 3).len(), 1 + 2);
    assert_eq!(Family::Left.members(&lin, 2).len(), 1 + 2);
    assert_eq!(Family::Trivial.members(&lin, 2).len(), 3);
    let p = terminal_map(&representable_arc(&Shape::linear(2))).unwrap();
    assert!(has_rlp(&p, &Family::Inner, 3, 1, 100_000).pass);
    assert!(!has_rlp(&p, &Family::Left, 2, 1, 100_000).pass);
    let e = terminal_map(&nerve_e(3)).unwrap();
    assert!(has_rlp(&e, &Family::Left, 3, 1, 1_000_000).pass);
}

#[test]
fn colour_witnesses() {
    let e = nerve_e(3);
    let p = terminal_map(&e).unwrap();
    let w = colour_witness(&p, &colour(&e, "0"), &colour(&e, "1"), 1).unwrap();
    assert_eq!(w.triangles.len(), 2);
    let l1 = representable_arc(&Shape::linear(1));
    let q = terminal_map(&l1).unwrap();
    let (a, b) = (l1.gen_element(0), l1.gen_element(1));
    assert!(colour_witness(&q, &a, &b, 0).is_none());
    let opts = OracleOptions::default();
    let h = homotopy_rel(&p, &colour(&e, "0"), &colour(&e, "1"), &opts).unwrap().unwrap();
    assert_eq!(h.kind, WitnessKind::Colour);
    assert!(h.verify(&p, 1).is_ok());
}

#[test]
fn one_step_homotopy_of_arrows() {
    let (y, short, long) = collapsed_triangle();
    let p = terminal_map(&y).unwrap();
    assert_eq!(y.boundary_of(&short), y.boundary_of(&long));
    let mut budget = Budget::new(100_000);
    let h = one_step(&p, &short, &long, &mut budget).unwrap().unwrap();
    assert!(h.verify(&p, &short, &long, true).is_ok());
    assert!(one_step(&p, &long, &short, &mut budget).unwrap().is_none());
    let opts = OracleOptions::default();
    let w = homotopy_rel(&p, &long, &short, &opts).unwrap().unwrap();
    assert!(w.verify(&p, 1).is_ok());
    let c = CylinderMap::constant(&y, &long);
    assert!(c.verify(&p, &long, &long, true).is_ok());
    assert!(compose_homotopies(&p, &h, &c, &mut budget).is_ok_and(|k| k.verify(&p, &short, &long, true).is_ok()));
}

#[test]
fn unrelated_arrows_are_not_homotopic() {
    let l1 = Shape::linear(1);
    let rep = representable_arc(&l1);
    let b = crate::presheaf::boundary(&l1);
    let f = b.clone().with_target(rep.clone());
    let po = pushout(&b, &f, "parallel").unwrap();
    let y = po.object.clone();
    let top = rep_info(&l1).top();
    let (u, v) = (po.from_b.apply(&rep.gen_element(top)), po.from_c.apply(&rep.gen_element(top)));
    let p = terminal_map(&y).unwrap();
    assert!(homotopy_rel(&p, &u, &v, &OracleOptions::default()).unwrap().is_none());
    let w = homotopy_rel(&p, &u, &u, &OracleOptions::default()).unwrap().unwrap();
    assert_eq!(w.kind, WitnessKind::Constant);
}
