//! Consistency checks on presheaf tables.

use std::collections::HashMap;

use serde::Serialize;

use super::colimit::op_arities;
use super::{Element, FinitePresheaf};
use crate::error::{DendroError, Result};
use crate::site::omega::{automorphisms, elementary_degeneracies, elementary_faces, hom};
use crate::site::tree::trees_up_to;
use crate::site::{Morphism, Shape};

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FunctorialityReport {
    pub presheaf: String,
    pub max_degree: usize,
    pub pairs_checked: usize,
    pub violations: Vec<String>,
    pub pass: bool,
}

/// Checks `(g ∘ f)^* x = f^* g^* x` for every generator `x`, every `g` into its
/// shape from a tree of degree at most `d`, and every generating `f` (elementary
/// face, elementary degeneracy or automorphism) into the source of `g`. Every
/// composable pair factors through these, so this covers all pairs.
pub fn validate_functoriality(x: &FinitePresheaf, d: usize) -> FunctorialityReport {
    let arities = op_arities(x);
    let shapes = trees_up_to(d + 1, &arities);
    let mut into: HashMap<Shape, Vec<Morphism>> = HashMap::new();
    for s in &shapes {
        let mut gens: Vec<Morphism> = Vec::new();
        if s.degree() <= d {
            gens.extend(elementary_faces(s).iter().cloned());
            gens.extend(automorphisms(s).iter().skip(1).cloned());
        }
        into.entry(s.clone()).or_default().extend(gens);
        for sigma in elementary_degeneracies(s).iter() {
            if sigma.target().degree() <= d {
                into.entry(sigma.target().clone()).or_default().push(sigma.clone());
            }
        }
    }
    let mut checked = 0;
    let mut violations = Vec::new();
    for (i, gen) in x.generators().iter().enumerate() {
        let top = x.gen_element(i);
        for s in shapes.iter().filter(|s| s.degree() <= d) {
            for g in hom(s, &gen.shape).iter() {
                let y = match x.act(g, &top) {
                    Ok(y) => y,
                    Err(e) => {
                        violations.push(format!("{}: {g:?}: {e}", gen.name));
                        continue;
                    }
                };
                for f in into.get(s).map(Vec::as_slice).unwrap_or(&[]) {
                    checked += 1;
                    let lhs = x.act(&g.after(f), &top);
                    let rhs = x.act(f, &y);
                    match (lhs, rhs) {
                        (Ok(a), Ok(b)) if a == b => {}
                        (a, b) => {
                            if violations.len() < 20 {
                                violations.push(format!(
                                    "{}: g = {g:?}, f = {f:?}: {} versus {}",
                                    gen.name,
                                    a.map(|e| x.display(&e)).unwrap_or_else(|e| e.to_string()),
                                    b.map(|e| x.display(&e)).unwrap_or_else(|e| e.to_string())
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    let pass = violations.is_empty();
    FunctorialityReport { presheaf: x.name().to_string(), max_degree: d, pairs_checked: checked, violations, pass }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BoundaryLemmaReport {
    pub presheaf: String,
    pub max_degree: usize,
    pub degenerate_elements: usize,
    pub counterexamples: Vec<String>,
    pub pass: bool,
}

/// For a normal presheaf, checks that degenerate elements with equal boundary are
/// equal, at every level of degree at most `d`.
pub fn check_degenerate_boundary_lemma(x: &FinitePresheaf, d: usize) -> Result<BoundaryLemmaReport> {
    if let Some((g, phi)) = x.non_normal_witness() {
        return Err(DendroError::NotNormal(format!(
            "{}: generator {} is fixed by {phi:?}",
            x.name(),
            x.generator(g).name
        )));
    }
    let mut count = 0;
    let mut counterexamples = Vec::new();
    for s in trees_up_to(d, &op_arities(x)).iter().filter(|s| s.degree() > 0) {
        let mut by_boundary: HashMap<Vec<Element>, Element> = HashMap::new();
        for e in x.evaluate(s).into_iter().filter(Element::is_degenerate) {
            count += 1;
            let b = x.boundary_of(&e);
            if let Some(other) = by_boundary.insert(b, e.clone()) {
                counterexamples.push(format!("{} and {} at {s}", x.display(&other), x.display(&e)));
            }
        }
    }
    let pass = counterexamples.is_empty();
    Ok(BoundaryLemmaReport {
        presheaf: x.name().to_string(),
        max_degree: d,
        degenerate_elements: count,
        counterexamples,
        pass,
    })
}

/// One nondegenerate element per automorphism orbit at degree `n`.
pub fn generating_nondegenerates(x: &FinitePresheaf, n: usize) -> Result<Vec<Element>> {
    let mut out = Vec::new();
    for (i, g) in x.generators().iter().enumerate().filter(|(_, g)| g.shape.degree() == n) {
        if g.stabilizer.len() > 1 {
            return Err(DendroError::NotNormal(format!("{}: generator {} has a nontrivial stabilizer", x.name(), g.name)));
        }
        out.push(x.gen_element(i));
    }
    Ok(out)
}
