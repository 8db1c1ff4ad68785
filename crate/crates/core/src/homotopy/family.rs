//! Families of monomorphisms into representables and right lifting checks.

use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::Serialize;

use super::lifting::{Budget, Extension};
use crate::error::{DendroError, Result};
use crate::presheaf::{op_arities, rep_info, sub_presheaf, Element, PresheafMap};
use crate::site::omega::elementary_faces;
use crate::site::tree::trees_up_to;
use crate::site::{Arities, Shape};

/// A subobject of `Ω[T]` spanned by all elementary faces except those listed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Horn {
    pub shape: Shape,
    pub omit: Vec<usize>,
}

impl Horn {
    pub fn name(&self) -> String {
        if self.omit.is_empty() {
            format!("boundary {}", self.shape.name())
        } else {
            format!("horn {} {:?}", self.shape.name(), self.omit)
        }
    }

    pub fn inclusion(&self) -> PresheafMap {
        let info = rep_info(&self.shape);
        let faces = elementary_faces(&self.shape);
        let seeds: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(k, _)| !self.omit.contains(k))
            .map(|(_, d)| info.element(d).generator())
            .collect();
        sub_presheaf(&info.presheaf, seeds, &self.name()).expect("faces of a representable")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Boundary inclusions.
    Trivial,
    /// Inner horns.
    Inner,
    /// Inner horns and horns missing a top-vertex face.
    Left,
    Custom(Vec<Horn>),
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::Trivial => "trivial".into(),
            Family::Inner => "inner".into(),
            Family::Left => "left".into(),
            Family::Custom(h) => format!("custom({})", h.len()),
        }
    }

    /// Members whose shape has degree at most `d` and arities in `arities`.
    pub fn members(&self, arities: &Arities, d: usize) -> Vec<Horn> {
        if let Family::Custom(list) = self {
            return list.iter().filter(|h| h.shape.degree() <= d).cloned().collect();
        }
        let mut out = Vec::new();
        for t in trees_up_to(d, arities) {
            let faces = elementary_faces(&t);
            let tree = t.tree();
            match self {
                Family::Trivial => out.push(Horn { shape: t.clone(), omit: Vec::new() }),
                Family::Inner | Family::Left => {
                    for (k, f) in faces.iter().enumerate() {
                        let im = f.image();
                        let missing: Vec<u8> = (0..tree.n_edges() as u8).filter(|e| !im.contains(e)).collect();
                        let inner = t.degree() >= 2 && missing.len() == 1 && tree.is_inner(missing[0]);
                        let top = if t.degree() == 1 {
                            im.as_slice() == [tree.root()]
                        } else {
                            !inner && !missing.contains(&tree.root())
                        };
                        if inner || (*self == Family::Left && top) {
                            out.push(Horn { shape: t.clone(), omit: vec![k] });
                        }
                    }
                }
                Family::Custom(_) => unreachable!(),
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LiftFailure {
    pub member: String,
    pub bottom: String,
    pub top: Vec<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RlpReport {
    pub family: String,
    pub max_degree: usize,
    pub arities: Vec<usize>,
    pub budget: u64,
    pub members: usize,
    pub squares: usize,
    pub failures: Vec<LiftFailure>,
    pub budget_exhausted: Vec<String>,
    pub pass: bool,
}

struct MemberOutcome {
    squares: usize,
    failures: Vec<LiftFailure>,
    exhausted: Option<String>,
}

fn check_member(p: &PresheafMap, horn: &Horn, budget: u64) -> MemberOutcome {
    let inc = horn.inclusion();
    let a = inc.source();
    let info = rep_info(&horn.shape);
    let (y, x) = (p.source(), p.target());
    let mut squares = 0;
    let mut failures = Vec::new();
    let mut b = Budget::new(budget);
    let run = |b: &mut Budget, squares: &mut usize, failures: &mut Vec<LiftFailure>| -> Result<()> {
        for xe in x.evaluate(&horn.shape) {
            let bottom: Vec<Element> = info.faces.iter().map(|d| x.act(d, &xe).expect("face")).collect();
            let bottom_a: Vec<Element> = inc.assignment().iter().map(|e| x.act(e.degeneracy(), &bottom[e.generator()]).expect("level")).collect();
            let tops = Extension::new(a, y).over(p, bottom_a);
            let mut inner: Result<()> = Ok(());
            tops.for_each(b, &mut |top| {
                *squares += 1;
                let mut ext = Extension::new(&info.presheaf, y).over(p, bottom.clone());
                for (k, v) in inc.assignment().iter().enumerate() {
                    ext.fixed[v.generator()] = Some(top[k].clone());
                }
                let mut local = Budget::new(budget);
                match ext.solve(&mut local) {
                    Ok(Some(_)) => {}
                    Ok(None) => failures.push(LiftFailure {
                        member: horn.name(),
                        bottom: x.display(&xe),
                        top: top.iter().map(|e| y.display(e)).collect(),
                    }),
                    Err(e) => {
                        inner = Err(e);
                        return ControlFlow::Break(());
                    }
                }
                if failures.len() >= 5 {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            })?;
            inner?;
            if failures.len() >= 5 {
                break;
            }
        }
        Ok(())
    };
    let exhausted = match run(&mut b, &mut squares, &mut failures) {
        Ok(()) => None,
        Err(DendroError::Budget(_)) => Some(horn.name()),
        Err(e) => Some(format!("{}: {e}", horn.name())),
    };
    MemberOutcome { squares, failures, exhausted }
}

/// Checks the right lifting property of `p` against the members of `family` up to
/// degree `d`, with vertex arities bounded by `arity_cap`.
pub fn has_rlp(p: &PresheafMap, family: &Family, d: usize, arity_cap: usize, budget: u64) -> RlpReport {
    let cap = Arities::up_to(arity_cap);
    let arities = Arities::from_set(
        op_arities(p.source()).union(&op_arities(p.target())).iter().filter(|&k| cap.contains(k)),
    );
    let members = family.members(&arities, d);
    let outcomes: Vec<MemberOutcome> = members.par_iter().map(|h| check_member(p, h, budget)).collect();
    let mut report = RlpReport {
        family: family.name(),
        max_degree: d,
        arities: arities.iter().collect(),
        budget,
        members: members.len(),
        squares: 0,
        failures: Vec::new(),
        budget_exhausted: Vec::new(),
        pass: true,
    };
    for o in outcomes {
        report.squares += o.squares;
        report.failures.extend(o.failures);
        report.budget_exhausted.extend(o.exhausted);
    }
    report.pass = report.failures.is_empty() && report.budget_exhausted.is_empty();
    report
}
