#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use dendro::presheaf::{
    check_degenerate_boundary_lemma, coproduct, op_arities, pushout, representable_arc, sub_presheaf, validate_functoriality,
    yoneda, FinitePresheaf,
};
use dendro::site::omega::hom;
use dendro::site::tree::trees_up_to;
use dendro::site::{Arities, Shape};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_sub(rng: &mut ChaCha8Rng, shapes: &[Shape], name: &str) -> Arc<FinitePresheaf> {
    let t = shapes.choose(rng).expect("shapes");
    let rep = representable_arc(t);
    let k = rng.gen_range(1..=3);
    let seeds: Vec<usize> = (0..k).map(|_| rng.gen_range(0..rep.len())).collect();
    sub_presheaf(&rep, seeds, name).expect("subobject").source().clone()
}

fn colour(rng: &mut ChaCha8Rng, x: &FinitePresheaf) -> usize {
    let cs: Vec<usize> = (0..x.len()).filter(|&g| x.generator(g).shape.degree() == 0).collect();
    *cs.choose(rng).expect("every nonempty presheaf has a colour")
}

/// A normal presheaf with at most 12 generators of degree at most 3: a subobject of
/// a representable, a coproduct of two, or two glued at a colour.
pub fn random_normal(seed: u64) -> Arc<FinitePresheaf> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes = trees_up_to(3, &Arities::up_to(2));
    loop {
        let a = random_sub(&mut rng, &shapes, "a");
        let x = match rng.gen_range(0..3) {
            0 => a,
            1 => {
                let b = random_sub(&mut rng, &shapes, "b");
                coproduct(&a, &b, "a+b").expect("coproduct").0
            }
            _ => {
                let b = random_sub(&mut rng, &shapes, "b");
                let (ca, cb) = (colour(&mut rng, &a), colour(&mut rng, &b));
                let f = yoneda(&a, &a.gen_element(ca));
                let g = yoneda(&b, &b.gen_element(cb));
                pushout(&f, &g, "a+b/c").expect("pushout of a colour").object
            }
        };
        if x.len() <= 12 {
            return x;
        }
    }
}

/// Functoriality, uniqueness of normal forms against brute-force restriction of
/// every generator along every map, and the degenerate-boundary lemma.
pub fn normal_form_check(x: &FinitePresheaf, d: usize) -> Result<(), String> {
    let f = validate_functoriality(x, d);
    if !f.pass {
        return Err(format!("{}: {:?}", x.name(), f.violations));
    }
    for s in trees_up_to(d, &op_arities(x).with(1)) {
        let listed = x.evaluate(&s);
        let unique: BTreeSet<_> = listed.iter().cloned().collect();
        if unique.len() != listed.len() {
            return Err(format!("{}: repeated element at {s}", x.name()));
        }
        let mut brute = BTreeSet::new();
        for g in 0..x.len() {
            for m in hom(&s, &x.generator(g).shape).iter() {
                brute.insert(x.act(m, &x.gen_element(g)).map_err(|e| e.to_string())?);
            }
        }
        if brute != unique {
            return Err(format!("{}: {} listed and {} reachable elements at {s}", x.name(), unique.len(), brute.len()));
        }
    }
    let b = check_degenerate_boundary_lemma(x, d).map_err(|e| e.to_string())?;
    if !b.pass {
        return Err(format!("{}: {:?}", x.name(), b.counterexamples));
    }
    Ok(())
}

/// Codes of rooted trees of each degree up to `d` with vertex arities at most `cap`,
/// built recursively as a vertex over a multiset of subtrees.
pub fn tree_codes(d: usize, cap: usize) -> Vec<BTreeSet<String>> {
    let mut by_degree: Vec<BTreeSet<String>> = vec![BTreeSet::from(["|".to_string()])];
    for n in 1..=d {
        let mut here = BTreeSet::new();
        for k in 0..=cap {
            let mut stack: Vec<(Vec<String>, usize)> = vec![(Vec::new(), n - 1)];
            while let Some((kids, left)) = stack.pop() {
                if kids.len() == k {
                    if left == 0 {
                        let mut kids = kids;
                        kids.sort();
                        here.insert(format!("({})", kids.concat()));
                    }
                    continue;
                }
                for m in 0..=left {
                    for c in &by_degree[m] {
                        let mut next = kids.clone();
                        next.push(c.clone());
                        stack.push((next, left - m));
                    }
                }
            }
        }
        by_degree.push(here);
    }
    by_degree
}
