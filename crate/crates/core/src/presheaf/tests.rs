use super::*;
use crate::site::omega::{automorphisms, elementary_degeneracies, sections_of};

fn c2() -> Shape {
    Shape::corolla(2)
}

#[test]
fn representable_levels() {
    let x = representable(&c2());
    assert_eq!(x.evaluate(&Shape::eta()).len(), 3);
    assert_eq!(x.evaluate(&c2()).len(), 2);
    assert_eq!(representable(&Shape::eta()).evaluate(&Shape::eta()).len(), 1);
    assert!(x.is_normal());
    assert!(validate_functoriality(&x, 2).pass);
}

#[test]
fn boundaries_and_skeleta() {
    let b = boundary(&c2());
    assert_eq!(b.source().len(), 3);
    assert!(b.source().generators().iter().all(|g| g.shape.degree() == 0));
    assert!(boundary(&Shape::eta()).source().is_empty());
    assert!(b.is_normal_mono().unwrap());
    let rep = representable_arc(&Shape::linear(2));
    let sk = skeleton(&rep, 1);
    assert_eq!(sk.source().len(), boundary(&Shape::linear(2)).source().len());
    assert!(skeleton(&rep, -1).source().is_empty());
    assert_eq!(skeleton(&rep, 5).source().len(), rep.len());
}

#[test]
fn degeneracy_section_round_trip() {
    let x = representable(&Shape::linear(2));
    for s in [Shape::linear(2), Shape::linear(3)] {
        for sigma in elementary_degeneracies(&s).iter() {
            for e in x.evaluate(sigma.target()) {
                let up = x.act(sigma, &e).unwrap();
                for a in sections_of(sigma).unwrap() {
                    assert_eq!(x.act(&a, &up).unwrap(), e);
                }
            }
        }
    }
}

#[test]
fn twist_quotient_is_not_normal() {
    let x = representable_arc(&c2());
    let tau = automorphisms(&c2())[1].clone();
    let q = quotient_by_twist(&x, top_generator(&x), &tau, "C2/tau").unwrap();
    let qq = q.target();
    assert_eq!(qq.len(), 3);
    assert!(!qq.is_normal());
    assert!(validate_functoriality(qq, 2).pass);
    assert_eq!(qq.evaluate(&Shape::eta()).len(), 2);
    let empty = PresheafMap::from_empty(qq);
    assert!(!empty.is_normal_mono().unwrap());
    assert!(check_degenerate_boundary_lemma(qq, 2).is_err());
}

#[test]
fn gluing_two_corollas() {
    let b = boundary(&c2());
    let po = pushout(&b, &b, "C2 u C2").unwrap();
    let p = &po.object;
    assert_eq!(p.len(), 5);
    assert_eq!(p.generators().iter().filter(|g| g.shape == c2()).count(), 2);
    assert!(validate_functoriality(p, 2).pass);
    assert!(po.from_b.is_normal_mono().unwrap());
    assert!(po.from_c.is_normal_mono().unwrap());
}

#[test]
fn pullback_of_points() {
    let eta = representable_arc(&Shape::eta());
    let id = PresheafMap::identity(&eta);
    let pb = pullback(&id, &id, "pt", 2).unwrap();
    assert_eq!(pb.object.evaluate(&Shape::eta()).len(), 1);
    assert_eq!(pb.object.len(), 1);
}

#[test]
fn product_of_intervals() {
    let l1 = representable_arc(&Shape::linear(1));
    let pt = representable_arc(&Shape::eta());
    let to_pt = PresheafMap::new(l1.clone(), pt.clone(), vec![
        Element::raw(0, Morphism::identity(&Shape::eta())),
        Element::raw(0, Morphism::identity(&Shape::eta())),
        Element::raw(0, crate::site::omega::degeneracies(&Shape::linear(1), &Shape::eta())[0].clone()),
    ])
    .unwrap();
    let pb = pullback(&to_pt, &to_pt, "square", 3).unwrap();
    let by_degree = |n| pb.object.generators().iter().filter(|g| g.shape.degree() == n).count();
    assert_eq!((by_degree(0), by_degree(1), by_degree(2)), (4, 5, 2));
    assert!(!pb.truncated);
}
