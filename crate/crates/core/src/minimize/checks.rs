//! Verifiers for minimization results and skeletal fibrations.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{deform, MinimizationResult};
use crate::error::{DendroError, Result};
use crate::homotopy::{candidates, has_rlp, rep_cylinder, Family, HomotopyClasses, OracleOptions, RlpReport};
use crate::presheaf::{op_arities, pullback, rep_info, Element, PresheafMap};
use crate::site::omega::automorphisms;
use crate::site::tree::trees_up_to;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SkeletalReport {
    pub max_degree: usize,
    pub elements_checked: usize,
    /// Pairs homotopic relative to the boundary but not related by an automorphism.
    pub counterexamples: Vec<(String, String)>,
    pub budget_exhausted: Vec<String>,
    pub colour_depth: u8,
    pub pass: bool,
}

/// Checks that elements homotopic relative to the boundary over the base differ by
/// an automorphism of their shape, at generators of degree at most `d`.
pub fn is_skeletal(p: &PresheafMap, d: usize, opts: &OracleOptions) -> SkeletalReport {
    let y = p.source();
    let mut seen: HashMap<(Vec<Element>, Element), ()> = HashMap::new();
    let mut counterexamples = BTreeSet::new();
    let mut exhausted = Vec::new();
    let mut checked = 0;
    for g in (0..y.len()).filter(|&g| y.generator(g).shape.degree() <= d) {
        let x = y.gen_element(g);
        let key = (y.boundary_of(&x), p.apply(&x));
        if seen.insert(key, ()).is_some() {
            continue;
        }
        let cands = candidates(p, &x);
        checked += cands.len();
        let classes = match HomotopyClasses::compute(p, cands, opts) {
            Ok(c) => c,
            Err(e) => {
                exhausted.push(format!("{}: {e}", y.generator(g).name));
                continue;
            }
        };
        let n = classes.elements.len();
        for a in 0..n {
            for b in a + 1..n {
                if !classes.related(a, b) {
                    continue;
                }
                let (u, v) = (&classes.elements[a], &classes.elements[b]);
                let twisted = !u.is_degenerate() && y.orbit(u).contains(v);
                if !twisted {
                    counterexamples.insert((y.display(u), y.display(v)));
                }
            }
        }
    }
    let pass = counterexamples.is_empty() && exhausted.is_empty();
    SkeletalReport {
        max_degree: d,
        elements_checked: checked,
        counterexamples: counterexamples.into_iter().collect(),
        budget_exhausted: exhausted,
        colour_depth: opts.colour_depth,
        pass,
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RetractReport {
    pub entries_checked: usize,
    pub failures: Vec<String>,
    pub pass: bool,
}

/// Replays the logged homotopies and checks `r ∘ i = id` and `p ∘ i ∘ r = p`.
pub fn verify_deformation_retract(res: &MinimizationResult) -> RetractReport {
    let y = res.p.source();
    let mut failures = Vec::new();
    for k in 0..res.m.len() {
        let e = res.i.apply(&res.m.gen_element(k));
        match res.domain.preimage(&e) {
            Some(x) if res.r.apply(&x) == res.m.gen_element(k) => {}
            _ => failures.push(format!("r(i({})) differs from {}", res.m.generator(k).name, res.m.generator(k).name)),
        }
    }
    for k in 0..res.domain.source().len() {
        let x = res.domain.source().gen_element(k);
        let full = res.domain.apply(&x);
        if res.p.apply(&res.i.apply(&res.r.apply(&x))) != res.p.apply(&full) {
            failures.push(format!("p(i(r({}))) differs from p", y.display(&full)));
        }
    }
    let homs: HashMap<usize, &crate::homotopy::CylinderMap> = res
        .homs()
        .into_iter()
        .filter(|(g, h)| {
            let target = &res.log.iter().find(|e| e.generator == *g).expect("logged").target;
            h.verify(&res.p, &y.gen_element(*g), target, false).is_ok()
        })
        .collect();
    let mut logged = BTreeSet::new();
    for entry in &res.log {
        let g = entry.generator;
        let name = &y.generator(g).name;
        if !logged.insert(g) {
            failures.push(format!("{name} is logged twice"));
        }
        let x = y.gen_element(g);
        if res.i.preimage(&entry.target).is_none() {
            failures.push(format!("{name} is sent outside the model"));
        }
        match res.domain.preimage(&x) {
            Some(xd) if res.i.apply(&res.r.apply(&xd)) == entry.target => {}
            _ => failures.push(format!("the retraction disagrees with the log at {name}")),
        }
        let Some(h) = &entry.homotopy else {
            if entry.target != x {
                failures.push(format!("{name} moves without a homotopy"));
            }
            continue;
        };
        if let Err(e) = h.verify(&res.p, &x, &entry.target, false) {
            failures.push(format!("{name}: {e}"));
            continue;
        }
        let cyl = rep_cylinder(x.level(), 1);
        let info = rep_info(x.level());
        for c in 0..cyl.len() {
            let (a, m) = cyl.generator_value(c);
            if a.generator() == info.top() {
                continue;
            }
            let face = y.act(&info.morphism(a), &x).expect("level");
            if h.values[c] != deform(y, &homs, &face, m[0]) {
                failures.push(format!("{name}: homotopy disagrees with its faces at {}", cyl.label(&cyl.object.gen_element(c))));
                break;
            }
        }
    }
    for k in 0..res.domain.source().len() {
        let g = res.domain.on_generator(k).generator();
        if !logged.contains(&g) {
            failures.push(format!("{} is not logged", y.generator(g).name));
        }
    }
    let pass = failures.is_empty();
    RetractReport { entries_checked: res.log.len(), failures, pass }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrivialRetractionReport {
    pub rlp: RlpReport,
    pub pass: bool,
}

/// Checks that the retraction has the right lifting property against boundary
/// inclusions up to degree `d`. The base must be normal.
pub fn verify_retraction_trivial(res: &MinimizationResult, d: usize, arity_cap: usize, budget: u64) -> Result<TrivialRetractionReport> {
    let x = res.p.target();
    if let Some((g, phi)) = x.non_normal_witness() {
        return Err(DendroError::NotNormal(format!(
            "base {}: generator {} is fixed by {phi:?}",
            x.name(),
            x.generator(g).name
        )));
    }
    let rlp = has_rlp(&res.r, &Family::Trivial, d, arity_cap, budget);
    let pass = rlp.pass;
    Ok(TrivialRetractionReport { rlp, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct PullbackMinimalityReport {
    pub max_degree: usize,
    pub fibration_skeletal: bool,
    pub hypothesis_holds: bool,
    /// An element whose automorphisms do not match those of its image.
    pub hypothesis_witness: Option<String>,
    pub pullback_truncated: bool,
    pub pullback: SkeletalReport,
}

fn stabilizer_size(x: &crate::presheaf::FinitePresheaf, e: &Element) -> usize {
    automorphisms(e.level()).len() / x.orbit(e).len()
}

/// Checks that `Aut(z) -> Aut(f z)` is bijective for every element `z` of degree
/// at most `d`, and tests the pullback of `p` along `f` for skeletality either way.
pub fn check_pullback_minimality(f: &PresheafMap, p: &PresheafMap, d: usize, opts: &OracleOptions) -> Result<PullbackMinimalityReport> {
    let z = f.source();
    let base = f.target();
    let mut witness = None;
    'outer: for s in trees_up_to(d, &op_arities(z)) {
        for e in z.evaluate(&s) {
            let (a, b) = (stabilizer_size(z, &e), stabilizer_size(base, &f.apply(&e)));
            if a != b {
                witness = Some(format!(
                    "{} has {a} automorphisms but its image {} has {b}",
                    z.display(&e),
                    base.display(&f.apply(&e))
                ));
                break 'outer;
            }
        }
    }
    let fibration_skeletal = is_skeletal(p, d, opts).pass;
    let pb = pullback(f, p, &format!("{} x {}", z.name(), p.source().name()), d)?;
    let report = is_skeletal(&pb.to_x, d, opts);
    Ok(PullbackMinimalityReport {
        max_degree: d,
        fibration_skeletal,
        hypothesis_holds: witness.is_none(),
        hypothesis_witness: witness,
        pullback_truncated: pb.truncated,
        pullback: report,
    })
}
