//! Extending partial maps of presheaves by backtracking over generators.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{DendroError, Result};
use crate::presheaf::{Element, FinitePresheaf, PresheafMap};

/// Step counter for a search. Every candidate value tried costs one step.
#[derive(Clone, Debug)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(DendroError::Budget(self.limit))
        } else {
            Ok(())
        }
    }
}

/// A partial map `B -> Y`, optionally over a fixed map `B -> X` through `p: Y -> X`.
pub struct Extension<'a> {
    pub domain: &'a FinitePresheaf,
    pub target: &'a FinitePresheaf,
    /// Known values, one slot per generator of the domain.
    pub fixed: Vec<Option<Element>>,
    /// `p` and the required image of each domain generator under `p`.
    pub over: Option<(&'a PresheafMap, Vec<Element>)>,
}

impl<'a> Extension<'a> {
    pub fn new(domain: &'a FinitePresheaf, target: &'a FinitePresheaf) -> Self {
        Extension { domain, target, fixed: vec![None; domain.len()], over: None }
    }

    pub fn over(mut self, p: &'a PresheafMap, bottom: Vec<Element>) -> Self {
        self.over = Some((p, bottom));
        self
    }

    fn order(&self) -> Vec<usize> {
        let mut free: Vec<usize> = (0..self.domain.len()).filter(|&g| self.fixed[g].is_none()).collect();
        free.sort_by_key(|&g| (self.domain.generator(g).shape.degree(), g));
        free
    }

    fn candidates(&self, g: usize, assign: &[Option<Element>]) -> Vec<Element> {
        let gen = self.domain.generator(g);
        let boundary: Vec<Element> = gen
            .faces
            .iter()
            .map(|e| {
                let v = assign[e.generator()].as_ref().expect("faces are assigned first");
                self.target.act(e.degeneracy(), v).expect("level")
            })
            .collect();
        let mut out = self.target.with_boundary(&gen.shape, &boundary);
        if let Some((p, bottom)) = &self.over {
            out.retain(|y| p.apply(y) == bottom[g]);
        }
        if gen.stabilizer.len() > 1 {
            out.retain(|y| gen.stabilizer.iter().all(|phi| self.target.act(phi, y).ok().as_ref() == Some(y)));
        }
        out
    }

    /// Calls `visit` on every extension, in a deterministic order, until it breaks.
    pub fn for_each(&self, budget: &mut Budget, visit: &mut dyn FnMut(&[Element]) -> ControlFlow<()>) -> Result<()> {
        let order = self.order();
        let mut assign = self.fixed.clone();
        self.rec(&order, 0, &mut assign, budget, visit).map(|_| ())
    }

    fn rec(
        &self,
        order: &[usize],
        i: usize,
        assign: &mut Vec<Option<Element>>,
        budget: &mut Budget,
        visit: &mut dyn FnMut(&[Element]) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>> {
        if i == order.len() {
            let full: Vec<Element> = assign.iter().map(|v| v.clone().expect("complete")).collect();
            return Ok(visit(&full));
        }
        let g = order[i];
        for y in self.candidates(g, assign) {
            budget.tick()?;
            assign[g] = Some(y);
            if self.rec(order, i + 1, assign, budget, visit)?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        assign[g] = None;
        Ok(ControlFlow::Continue(()))
    }

    /// The first extension found, or `None` when none exists.
    pub fn solve(&self, budget: &mut Budget) -> Result<Option<Vec<Element>>> {
        let mut found = None;
        self.for_each(budget, &mut |a| {
            found = Some(a.to_vec());
            ControlFlow::Break(())
        })?;
        Ok(found)
    }

    /// All extensions, failing if there are more than `limit`.
    pub fn all(&self, budget: &mut Budget, limit: usize) -> Result<Vec<Vec<Element>>> {
        let mut out = Vec::new();
        let mut over = false;
        self.for_each(budget, &mut |a| {
            if out.len() == limit {
                over = true;
                return ControlFlow::Break(());
            }
            out.push(a.to_vec());
            ControlFlow::Continue(())
        })?;
        if over {
            return Err(DendroError::Budget(limit as u64));
        }
        Ok(out)
    }
}

/// A commuting square `top: A -> Y`, `bottom: B -> X`, `i: A -> B`, `p: Y -> X`.
#[derive(Clone, Debug)]
pub struct LiftingProblem {
    pub i: PresheafMap,
    pub top: PresheafMap,
    pub bottom: PresheafMap,
    pub p: PresheafMap,
}

fn same(a: &Arc<FinitePresheaf>, b: &Arc<FinitePresheaf>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl LiftingProblem {
    /// Checks that `i` is a monomorphism and that the square commutes.
    pub fn new(i: PresheafMap, top: PresheafMap, bottom: PresheafMap, p: PresheafMap) -> Result<Self> {
        if !same(i.source(), top.source())
            || !same(i.target(), bottom.source())
            || !same(top.target(), p.source())
            || !same(bottom.target(), p.target())
        {
            return Err(DendroError::Mismatch("the maps of the square do not fit together".into()));
        }
        if let Some(w) = i.mono_witness() {
            return Err(DendroError::NotMono(w));
        }
        for a in 0..i.source().len() {
            let x = i.source().gen_element(a);
            if p.apply(&top.apply(&x)) != bottom.apply(&i.apply(&x)) {
                return Err(DendroError::Precondition(format!(
                    "square does not commute at {}",
                    i.source().generator(a).name
                )));
            }
        }
        Ok(LiftingProblem { i, top, bottom, p })
    }

    fn extension(&self) -> Extension<'_> {
        let b = self.i.target();
        let mut ext = Extension::new(b, self.p.source());
        for a in 0..self.i.source().len() {
            let v = self.i.on_generator(a);
            let psi_inv = v.degeneracy().inverse().expect("monomorphisms hit nondegenerate elements");
            let val = self.p.source().act(&psi_inv, self.top.on_generator(a)).expect("level");
            ext.fixed[v.generator()] = Some(val);
        }
        let bottom = (0..b.len()).map(|h| self.bottom.on_generator(h).clone()).collect();
        ext.over(&self.p, bottom)
    }

    /// Whether `h` makes both triangles commute.
    pub fn is_filler(&self, h: &PresheafMap) -> bool {
        (0..self.i.source().len()).all(|a| {
            let x = self.i.source().gen_element(a);
            h.apply(&self.i.apply(&x)) == self.top.apply(&x)
        }) && (0..h.source().len()).all(|g| self.p.apply(h.on_generator(g)) == *self.bottom.on_generator(g))
    }
}

/// A filler of the square, `None` if none exists, or a budget error.
pub fn solve_lift(problem: &LiftingProblem, budget: &mut Budget) -> Result<Option<PresheafMap>> {
    let found = problem.extension().solve(budget)?;
    let Some(assign) = found else { return Ok(None) };
    let h = PresheafMap::new(problem.i.target().clone(), problem.p.source().clone(), assign)?;
    if !problem.is_filler(&h) {
        return Err(DendroError::Algorithm("search returned a map that is not a filler".into()));
    }
    Ok(Some(h))
}
