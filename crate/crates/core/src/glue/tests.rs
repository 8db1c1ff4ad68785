use super::*;
use crate::fixtures;
use crate::presheaf::representable_arc;

fn opts() -> MinimizeOptions {
    MinimizeOptions::default()
}

#[test]
fn fibers_of_simple_maps() {
    let c2 = representable_arc(&Shape::corolla(2));
    let id = PresheafMap::identity(&c2);
    for c in colours(&c2) {
        let f = fiber_over_colour(&id, &c).unwrap();
        assert_eq!(f.len(), 1);
    }
    let p = fixtures::fixture("e-over-point", None, 3).ok().map(|f| match f {
        fixtures::Fixture::Map(m) => m,
        _ => unreachable!(),
    });
    let p = p.unwrap();
    let c = colours(p.target()).remove(0);
    assert_eq!(degree_counts(&fiber_over_colour(&p, &c).unwrap()), degree_counts(p.source()));
}

#[test]
fn gluing_identities() {
    let dia = fixtures::wedge_glue_points().unwrap();
    let res = glue_left_fibrations(&dia, 2, &opts()).unwrap();
    assert!(res.report.pass, "{:?}", res.report);
    assert!(res.q.is_iso());
}

#[test]
fn gluing_groupoid_fibrations() {
    let dia = fixtures::wedge_glue(3).unwrap();
    let cart = check_homotopy_cartesian(&dia, 2, &opts()).unwrap();
    assert!(cart.pass, "{:?}", cart);
    let res = glue_left_fibrations(&dia, 2, &opts()).unwrap();
    assert!(res.report.pass, "{:?}", res.report);
    assert_eq!(res.report.model_sizes, [1, 3, 3]);
    assert_eq!(res.report.glued_size, 5);
    let t = check_trivial_fibers_implies_trivial(&dia.p1, 2, &opts()).unwrap();
    assert_eq!(t.branch, FiberBranch::PointFibers);
}

#[test]
fn trivial_fiber_branches() {
    let e = fixtures::e_nerve(3).unwrap();
    let p = terminal_map(&e).unwrap();
    let r = check_trivial_fibers_implies_trivial(&p, 2, &opts()).unwrap();
    assert_eq!(r.branch, FiberBranch::PointFibers);
    assert!(r.pass, "{:?}", r);
    let two = fixtures::two_points().unwrap();
    let r = check_trivial_fibers_implies_trivial(&two, 2, &opts()).unwrap();
    assert_eq!(r.branch, FiberBranch::FibersNontrivial);
}
