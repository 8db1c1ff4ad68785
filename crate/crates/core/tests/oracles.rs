mod common;

use std::collections::BTreeSet;

use dendro::site::omega::{elementary_faces, factor_through, hom, proper_faces};
use dendro::site::{MorClass, Omega, Shape};

#[test]
fn tree_enumeration_matches_recursive_count() {
    for cap in 0..=3 {
        let objs = Omega::with_arity_cap(cap).objects(3);
        let codes = common::tree_codes(3, cap);
        for (n, level) in codes.iter().enumerate() {
            let ours: BTreeSet<Shape> = objs.iter().filter(|s| s.degree() == n).cloned().collect();
            let theirs: BTreeSet<Shape> = level.iter().map(|c| Shape::from_code(c).unwrap()).collect();
            assert_eq!(theirs.len(), level.len(), "distinct codes give distinct shapes");
            assert_eq!(ours, theirs, "degree {n}, arity cap {cap}");
        }
    }
}

#[test]
fn elementary_faces_are_the_maximal_faces() {
    let objs = Omega::with_arity_cap(3).objects(3);
    let sources = Omega::with_arity_cap(7).objects(2);
    for t in &objs {
        let elementary = elementary_faces(t);
        for e in elementary.iter() {
            assert_eq!(e.class(), MorClass::Face);
            assert_eq!(e.source().degree() + 1, t.degree(), "{e:?}");
        }
        for s in &sources {
            for f in hom(s, t).iter().filter(|f| f.class() == MorClass::Face) {
                assert!(elementary.iter().any(|e| factor_through(f, e).is_some()), "{f:?} misses every elementary face");
            }
        }
        for a in elementary.iter() {
            for b in elementary.iter().filter(|b| b.image() != a.image()) {
                assert!(factor_through(a, b).is_none(), "{a:?} factors through {b:?}");
            }
        }
        let proper: BTreeSet<_> = proper_faces(t).iter().map(|f| f.image()).collect();
        let expected: BTreeSet<_> = sources
            .iter()
            .flat_map(|s| hom(s, t).iter().filter(|f| f.class() == MorClass::Face).map(|f| f.image()).collect::<Vec<_>>())
            .collect();
        assert_eq!(proper, expected, "{t}");
    }
}
