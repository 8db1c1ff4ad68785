mod common;

use dendro::format::{emit_presheaf, parse};
use dendro::homotopy::tensor_interval;
use dendro::minimize::{minimize, MinimizeOptions};
use dendro::presheaf::{skeleton, sub_presheaf, PresheafMap};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_forms_are_unique(seed in any::<u64>()) {
        let x = common::random_normal(seed);
        prop_assert!(x.is_normal());
        prop_assert_eq!(common::normal_form_check(&x, 3), Ok(()));
    }

    #[test]
    fn presheaves_round_trip(seed in any::<u64>()) {
        let x = common::random_normal(seed);
        let doc = parse(&emit_presheaf(&x)).unwrap();
        prop_assert_eq!(&**doc.last_presheaf().unwrap(), &*x);
    }

    #[test]
    fn skeleta_attach_cells(seed in any::<u64>()) {
        let x = common::random_normal(seed);
        for n in 0..=3isize {
            let below = skeleton(&x, n - 1);
            let here = skeleton(&x, n);
            let cells = x.generators().iter().filter(|g| g.shape.degree() as isize == n).count();
            prop_assert_eq!(here.source().len(), below.source().len() + cells);
            let sk = here.source();
            for g in sk.generators().iter().filter(|g| g.shape.degree() as isize == n) {
                prop_assert!(g.faces.iter().all(|e| (sk.generator(e.generator()).shape.degree() as isize) < n));
            }
        }
    }

    #[test]
    fn subobjects_of_normal_presheaves_are_normal(seed in any::<u64>(), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..4)) {
        let x = common::random_normal(seed);
        let seeds: Vec<usize> = picks.iter().map(|i| i.index(x.len())).collect();
        let i = sub_presheaf(&x, seeds, "sub").unwrap();
        prop_assert!(i.is_mono());
        prop_assert!(i.is_normal_mono().unwrap());
    }

    #[test]
    fn cylinder_ends_are_sections(seed in any::<u64>()) {
        let x = common::random_normal(seed);
        let bound = x.generators().iter().map(|g| {
            let t = g.shape.tree();
            g.shape.degree() + t.leaves().len() + t.vertices().iter().filter(|v| v.inputs.is_empty()).count()
        }).max().unwrap_or(0);
        prop_assume!(bound <= 4);
        let t = tensor_interval(&x).unwrap();
        let id = PresheafMap::identity(&x);
        prop_assert!(t.proj.after(&t.i0).unwrap().assignment() == id.assignment());
        prop_assert!(t.proj.after(&t.i1).unwrap().assignment() == id.assignment());
        prop_assert!(t.i0.is_normal_mono().unwrap() && t.i1.is_normal_mono().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn identities_are_minimal(seed in any::<u64>()) {
        let x = common::random_normal(seed);
        let res = minimize(&PresheafMap::identity(&x), 2, &MinimizeOptions::default()).unwrap();
        prop_assert!(res.is_identity());
    }
}
