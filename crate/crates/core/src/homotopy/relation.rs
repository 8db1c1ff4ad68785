//! Fiberwise homotopies relative to the boundary, and their composition.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use super::cylinder::{rep_cylinder, Cylinder};
use super::lifting::{Budget, Extension};
use crate::error::{DendroError, Result};
use crate::presheaf::{rep_info, Element, FinitePresheaf, PresheafMap};
use crate::site::omega::{degeneracies, face_with_image};
use crate::site::{Morphism, Shape};

#[derive(Clone, Debug, Serialize)]
pub struct OracleOptions {
    pub budget: u64,
    /// 0: arrows both ways; 1: also the two triangles exhibiting them as inverse.
    pub colour_depth: u8,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { budget: 2_000_000, colour_depth: 1 }
    }
}

/// A map `Ω[T] ⊗ Δ[1] -> Y`, stored on the generators of the cylinder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderMap {
    pub shape: Shape,
    pub values: Vec<Element>,
}

fn full(s: &Shape) -> u64 {
    (1u64 << s.n_edges()) - 1
}

impl CylinderMap {
    /// Value on the cylinder element over `a` (an element of `Ω[T]`) with labelling `m`.
    pub fn eval(&self, y: &FinitePresheaf, a: &Element, m: u64) -> Element {
        let cyl = rep_cylinder(&self.shape, 1);
        let e = cyl.locate(a, &[m]);
        y.act(e.degeneracy(), &self.values[e.generator()]).expect("level")
    }

    pub fn start(&self, y: &FinitePresheaf) -> Element {
        let top = rep_info(&self.shape).presheaf.gen_element(rep_info(&self.shape).top());
        self.eval(y, &top, 0)
    }

    pub fn end(&self, y: &FinitePresheaf) -> Element {
        let top = rep_info(&self.shape).presheaf.gen_element(rep_info(&self.shape).top());
        self.eval(y, &top, full(&self.shape))
    }

    /// The constant homotopy on `x`.
    pub fn constant(y: &FinitePresheaf, x: &Element) -> Self {
        let shape = x.level().clone();
        let cyl = rep_cylinder(&shape, 1);
        let info = rep_info(&shape);
        let values = (0..cyl.len())
            .map(|g| {
                let (a, _) = cyl.generator_value(g);
                y.act(&info.morphism(a), x).expect("level")
            })
            .collect();
        CylinderMap { shape, values }
    }

    pub fn as_map(&self, y: &std::sync::Arc<FinitePresheaf>) -> Result<PresheafMap> {
        PresheafMap::new(rep_cylinder(&self.shape, 1).object.clone(), y.clone(), self.values.clone())
    }

    /// Checks naturality, the two ends, the projection to the base and, when
    /// `rel` holds, constancy on the boundary.
    pub fn verify(&self, p: &PresheafMap, from: &Element, to: &Element, rel: bool) -> std::result::Result<(), String> {
        let y = p.source();
        let x = p.target();
        self.as_map(y).map_err(|e| e.to_string())?;
        if self.start(y) != *from || self.end(y) != *to {
            return Err(format!("ends are {} and {}", y.display(&self.start(y)), y.display(&self.end(y))));
        }
        let cyl = rep_cylinder(&self.shape, 1);
        let info = rep_info(&self.shape);
        let base = p.apply(from);
        for g in 0..cyl.len() {
            let (a, _) = cyl.generator_value(g);
            let am = info.morphism(a);
            if p.apply(&self.values[g]) != x.act(&am, &base).expect("level") {
                return Err(format!("not fiberwise at {}", cyl.label(&cyl.object.gen_element(g))));
            }
            if rel && a.generator() != info.top() && self.values[g] != y.act(&am, from).expect("level") {
                return Err(format!("moves the boundary at {}", cyl.label(&cyl.object.gen_element(g))));
            }
        }
        Ok(())
    }
}

/// Equivalence data between two colours over a common colour of the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColourWitness {
    pub forward: Element,
    pub backward: Element,
    pub triangles: Vec<Element>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Cylinder(CylinderMap),
    /// A cylinder homotopy read backwards.
    Reversed(CylinderMap),
    Colour(ColourWitness),
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub enum WitnessKind {
    Constant,
    OneStep,
    Zigzag,
    Colour,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyWitness {
    pub kind: WitnessKind,
    pub from: Element,
    pub to: Element,
    /// Consecutive elements of the chain, starting at `from` and ending at `to`.
    pub chain: Vec<Element>,
    pub steps: Vec<Step>,
}

impl HomotopyWitness {
    /// Replays every step.
    pub fn verify(&self, p: &PresheafMap, depth: u8) -> std::result::Result<(), String> {
        if self.chain.first() != Some(&self.from) || self.chain.last() != Some(&self.to) {
            return Err("chain does not connect the endpoints".into());
        }
        if self.chain.len() != self.steps.len() + 1 {
            return Err("chain and steps have different lengths".into());
        }
        for (k, step) in self.steps.iter().enumerate() {
            let (a, b) = (&self.chain[k], &self.chain[k + 1]);
            match step {
                Step::Cylinder(h) => h.verify(p, a, b, true)?,
                Step::Reversed(h) => h.verify(p, b, a, true)?,
                Step::Colour(w) => verify_colour(p, a, b, w, depth)?,
            }
        }
        Ok(())
    }
}

/// `s_i` as a face of the linear tree: the edge of simplicial vertex `i` of `[n]`.
fn simplex_edge(n: usize, i: usize) -> u8 {
    (n - i) as u8
}

/// The face `d_i: [n-1] -> [n]`.
fn simplex_face(n: usize, i: usize) -> Morphism {
    let t = Shape::linear(n);
    let skip = simplex_edge(n, i);
    let image: Vec<u8> = (0..=n as u8).filter(|&e| e != skip).collect();
    face_with_image(&t, &image).expect("faces of a simplex")
}

fn degenerate_on(x: &FinitePresheaf, c: &Element, n: usize) -> Element {
    let s = degeneracies(&Shape::linear(n), &Shape::eta()).into_iter().next().expect("collapse onto a colour");
    x.act(&s, c).expect("colour")
}

fn arrows(p: &PresheafMap, a: &Element, b: &Element) -> Vec<Element> {
    let y = p.source();
    let over = degenerate_on(p.target(), &p.apply(a), 1);
    let l1 = Shape::linear(1);
    let (d0, d1) = (simplex_face(1, 0), simplex_face(1, 1));
    y.evaluate(&l1)
        .into_iter()
        .filter(|f| {
            y.act(&d1, f).ok().as_ref() == Some(a) && y.act(&d0, f).ok().as_ref() == Some(b) && p.apply(f) == over
        })
        .collect()
}

/// A triangle with `d2 = f`, `d0 = g` and `d1` degenerate, over a degenerate triangle.
fn inverse_triangle(p: &PresheafMap, f: &Element, g: &Element) -> Option<Element> {
    let y = p.source();
    let a = y.act(&simplex_face(1, 1), f).ok()?;
    let over = degenerate_on(p.target(), &p.apply(&a), 2);
    let id = degenerate_on(y, &a, 1);
    let l2 = Shape::linear(2);
    let (d0, d1, d2) = (simplex_face(2, 0), simplex_face(2, 1), simplex_face(2, 2));
    y.evaluate(&l2).into_iter().find(|t| {
        p.apply(t) == over
            && y.act(&d2, t).ok().as_ref() == Some(f)
            && y.act(&d0, t).ok().as_ref() == Some(g)
            && y.act(&d1, t).ok() == Some(id.clone())
    })
}

fn verify_colour(p: &PresheafMap, a: &Element, b: &Element, w: &ColourWitness, depth: u8) -> std::result::Result<(), String> {
    if !arrows(p, a, b).contains(&w.forward) || !arrows(p, b, a).contains(&w.backward) {
        return Err("colour witness arrows do not connect the colours".into());
    }
    if depth >= 1 {
        let ok = w.triangles.len() == 2
            && inverse_triangle(p, &w.forward, &w.backward).is_some_and(|t| t == w.triangles[0])
            && inverse_triangle(p, &w.backward, &w.forward).is_some_and(|t| t == w.triangles[1]);
        if !ok {
            return Err("colour witness triangles are missing".into());
        }
    }
    Ok(())
}

/// Equivalence data between colours `a` and `b` of `Y` lying over the same colour.
pub fn colour_witness(p: &PresheafMap, a: &Element, b: &Element, depth: u8) -> Option<ColourWitness> {
    for f in arrows(p, a, b) {
        for g in arrows(p, b, a) {
            if depth == 0 {
                return Some(ColourWitness { forward: f, backward: g, triangles: Vec::new() });
            }
            if let (Some(t1), Some(t2)) = (inverse_triangle(p, &f, &g), inverse_triangle(p, &g, &f)) {
                return Some(ColourWitness { forward: f, backward: g, triangles: vec![t1, t2] });
            }
        }
    }
    None
}

/// Fills `Ω[T] ⊗ Δ[1]^k -> Y` over the base, given values on some generators.
fn fill(
    cyl: &Cylinder,
    p: &PresheafMap,
    base: &Element,
    known: &dyn Fn(&Element, &[u64]) -> Option<Element>,
    budget: &mut Budget,
) -> Result<Option<Vec<Element>>> {
    let y = p.source();
    let x = p.target();
    let info = rep_info(base.level());
    let mut bottom = Vec::with_capacity(cyl.len());
    let mut fixed = Vec::with_capacity(cyl.len());
    for g in 0..cyl.len() {
        let (a, m) = cyl.generator_value(g);
        bottom.push(x.act(&info.morphism(a), base).expect("level"));
        fixed.push(known(a, m));
    }
    let mut ext = Extension::new(&cyl.object, y).over(p, bottom);
    ext.fixed = fixed;
    let found = ext.solve(budget)?;
    if let Some(values) = &found {
        PresheafMap::new(cyl.object.clone(), y.clone(), values.clone())
            .map_err(|e| DendroError::Algorithm(format!("inconsistent cylinder data: {e}")))?;
    }
    Ok(found)
}

/// A homotopy from `y0` to `y1` relative to the boundary, over the constant
/// homotopy on `p(y0)`.
pub fn one_step(p: &PresheafMap, y0: &Element, y1: &Element, budget: &mut Budget) -> Result<Option<CylinderMap>> {
    let shape = y0.level().clone();
    let cyl = rep_cylinder(&shape, 1);
    let y = p.source();
    let info = rep_info(&shape);
    let known = |a: &Element, m: &[u64]| -> Option<Element> {
        let am = info.morphism(a);
        if m[0] == 0 || a.generator() != info.top() {
            Some(y.act(&am, y0).expect("level"))
        } else if m[0] == full(a.level()) {
            Some(y.act(&am, y1).expect("level"))
        } else {
            None
        }
    };
    Ok(fill(&cyl, p, &p.apply(y0), &known, budget)?.map(|values| CylinderMap { shape, values }))
}

/// Extends `y` at the start of the cylinder and `boundary` on the boundary part to
/// a homotopy starting at `y`.
pub fn extend_from(
    p: &PresheafMap,
    y0: &Element,
    boundary: &dyn Fn(&Element, u64) -> Element,
    budget: &mut Budget,
) -> Result<Option<CylinderMap>> {
    let shape = y0.level().clone();
    let cyl = rep_cylinder(&shape, 1);
    let y = p.source();
    let info = rep_info(&shape);
    let known = |a: &Element, m: &[u64]| -> Option<Element> {
        if a.generator() != info.top() {
            Some(boundary(a, m[0]))
        } else if m[0] == 0 {
            Some(y.act(&info.morphism(a), y0).expect("level"))
        } else {
            None
        }
    };
    Ok(fill(&cyl, p, &p.apply(y0), &known, budget)?.map(|values| CylinderMap { shape, values }))
}

fn read_box(cyl2: &Cylinder, y: &FinitePresheaf, values: &[Element], shape: &Shape) -> CylinderMap {
    let cyl1 = rep_cylinder(shape, 1);
    let out = (0..cyl1.len())
        .map(|g| {
            let (a, m) = cyl1.generator_value(g);
            let e = cyl2.locate(a, &[full(a.level()), m[0]]);
            y.act(e.degeneracy(), &values[e.generator()]).expect("level")
        })
        .collect();
    CylinderMap { shape: shape.clone(), values: out }
}

/// Composes `g: x ~> y` with `h: y ~> z`, where `h` is constant on the boundary.
/// The result agrees with `g` on the boundary.
pub fn compose_homotopies(p: &PresheafMap, g: &CylinderMap, h: &CylinderMap, budget: &mut Budget) -> Result<CylinderMap> {
    let y = p.source();
    if g.shape != h.shape || g.end(y) != h.start(y) {
        return Err(DendroError::Mismatch("homotopies do not compose".into()));
    }
    let shape = g.shape.clone();
    let x0 = g.start(y);
    let cyl2 = rep_cylinder(&shape, 2);
    let info = rep_info(&shape);
    let known = |a: &Element, m: &[u64]| -> Option<Element> {
        let (ms, mt) = (m[0], m[1]);
        let f = full(a.level());
        if a.generator() != info.top() || ms == 0 {
            Some(g.eval(y, a, mt))
        } else if mt == 0 {
            Some(y.act(&info.morphism(a), &x0).expect("level"))
        } else if mt == f {
            Some(h.eval(y, a, ms))
        } else {
            None
        }
    };
    let values = fill(&cyl2, p, &p.apply(&x0), &known, budget)?
        .ok_or_else(|| DendroError::Algorithm("no filler for the composition box".into()))?;
    Ok(read_box(&cyl2, y, &values, &shape))
}

/// Reverses a homotopy that is constant on the boundary.
pub fn invert_homotopy(p: &PresheafMap, g: &CylinderMap, budget: &mut Budget) -> Result<CylinderMap> {
    let y = p.source();
    let shape = g.shape.clone();
    let x0 = g.start(y);
    let cyl2 = rep_cylinder(&shape, 2);
    let info = rep_info(&shape);
    let known = |a: &Element, m: &[u64]| -> Option<Element> {
        let (ms, mt) = (m[0], m[1]);
        let f = full(a.level());
        if mt == 0 {
            Some(g.eval(y, a, ms))
        } else if a.generator() != info.top() || ms == 0 || mt == f {
            Some(y.act(&info.morphism(a), &x0).expect("level"))
        } else {
            None
        }
    };
    let values = fill(&cyl2, p, &p.apply(&x0), &known, budget)?
        .ok_or_else(|| DendroError::Algorithm("no filler for the inversion box".into()))?;
    Ok(read_box(&cyl2, y, &values, &shape))
}

/// Arrows as homotopies of colours.
fn arrow_as_cylinder(y: &FinitePresheaf, f: &Element) -> CylinderMap {
    let eta = Shape::eta();
    let cyl = rep_cylinder(&eta, 1);
    let values = (0..cyl.len())
        .map(|g| {
            let (a, m) = cyl.generator_value(g);
            match (a.level().degree(), m[0]) {
                (0, 0) => y.act(&simplex_face(1, 1), f).expect("source"),
                (0, _) => y.act(&simplex_face(1, 0), f).expect("target"),
                _ => f.clone(),
            }
        })
        .collect();
    CylinderMap { shape: eta, values }
}

/// The homotopy relation on a set of candidates sharing boundary and projection.
pub struct HomotopyClasses {
    pub elements: Vec<Element>,
    /// `class[i]` is the least index in the class of `elements[i]`.
    pub class: Vec<usize>,
    edges: BTreeMap<(usize, usize), Step>,
}

impl HomotopyClasses {
    /// Tests one-step homotopies between all pairs (colour witnesses in degree 0).
    pub fn compute(p: &PresheafMap, elements: Vec<Element>, opts: &OracleOptions) -> Result<Self> {
        let n = elements.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while parent[r] != r {
                r = parent[r];
            }
            parent[i] = r;
            r
        }
        let mut edges = BTreeMap::new();
        let colours = elements.first().is_some_and(|e| e.level().degree() == 0);
        for i in 0..n {
            for j in i + 1..n {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri == rj {
                    continue;
                }
                let step = if colours {
                    colour_witness(p, &elements[i], &elements[j], opts.colour_depth).map(Step::Colour)
                } else {
                    let mut budget = Budget::new(opts.budget);
                    match one_step(p, &elements[i], &elements[j], &mut budget)? {
                        Some(h) => Some(Step::Cylinder(h)),
                        None => {
                            let mut budget = Budget::new(opts.budget);
                            one_step(p, &elements[j], &elements[i], &mut budget)?.map(Step::Reversed)
                        }
                    }
                };
                if let Some(s) = step {
                    edges.insert((i, j), s);
                    let (lo, hi) = (ri.min(rj), ri.max(rj));
                    parent[hi] = lo;
                }
            }
        }
        let class = (0..n).map(|i| find(&mut parent, i)).collect();
        Ok(HomotopyClasses { elements, class, edges })
    }

    pub fn index_of(&self, e: &Element) -> Option<usize> {
        self.elements.iter().position(|x| x == e)
    }

    pub fn related(&self, i: usize, j: usize) -> bool {
        self.class[i] == self.class[j]
    }

    /// A chain of recorded steps from `i` to `j`.
    pub fn witness(&self, i: usize, j: usize) -> Option<HomotopyWitness> {
        if !self.related(i, j) {
            return None;
        }
        let (from, to) = (self.elements[i].clone(), self.elements[j].clone());
        if i == j {
            return Some(HomotopyWitness { kind: WitnessKind::Constant, from: from.clone(), to, chain: vec![from], steps: Vec::new() });
        }
        let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
        let mut queue = VecDeque::from([i]);
        while let Some(u) = queue.pop_front() {
            if u == j {
                break;
            }
            for &(a, b) in self.edges.keys() {
                let v = if a == u { b } else if b == u { a } else { continue };
                if v != i && !prev.contains_key(&v) {
                    prev.insert(v, u);
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![j];
        while *path.last().unwrap() != i {
            path.push(prev[path.last().unwrap()]);
        }
        path.reverse();
        let mut steps = Vec::new();
        for w in path.windows(2) {
            let (u, v) = (w[0], w[1]);
            let step = if u < v {
                self.edges[&(u, v)].clone()
            } else {
                match &self.edges[&(v, u)] {
                    Step::Cylinder(h) => Step::Reversed(h.clone()),
                    Step::Reversed(h) => Step::Cylinder(h.clone()),
                    Step::Colour(c) => Step::Colour(ColourWitness {
                        forward: c.backward.clone(),
                        backward: c.forward.clone(),
                        triangles: c.triangles.iter().rev().cloned().collect(),
                    }),
                }
            };
            steps.push(step);
        }
        let kind = match (&steps[0], steps.len()) {
            (Step::Colour(_), _) => WitnessKind::Colour,
            (_, 1) => WitnessKind::OneStep,
            _ => WitnessKind::Zigzag,
        };
        let chain = path.iter().map(|&k| self.elements[k].clone()).collect();
        Some(HomotopyWitness { kind, from, to, chain, steps })
    }
}

/// Candidates for homotopies from `y0` relative to its boundary: the elements
/// with the same boundary and the same image in the base.
pub fn candidates(p: &PresheafMap, y0: &Element) -> Vec<Element> {
    let y = p.source();
    let b = y.boundary_of(y0);
    let py = p.apply(y0);
    y.with_boundary(y0.level(), &b).into_iter().filter(|z| p.apply(z) == py).collect()
}

/// A fiberwise homotopy from `y0` to `y1` relative to the boundary, if one exists.
pub fn homotopy_rel(p: &PresheafMap, y0: &Element, y1: &Element, opts: &OracleOptions) -> Result<Option<HomotopyWitness>> {
    let y = p.source();
    if y0.level() != y1.level() || p.apply(y0) != p.apply(y1) || y.boundary_of(y0) != y.boundary_of(y1) {
        return Err(DendroError::Precondition("elements differ on the boundary or in the base".into()));
    }
    let classes = HomotopyClasses::compute(p, candidates(p, y0), opts)?;
    let i = classes.index_of(y0).expect("y0 is a candidate");
    let j = classes.index_of(y1).expect("y1 is a candidate");
    Ok(classes.witness(i, j))
}

/// Turns a witness chain into a single cylinder homotopy from its start to its end.
pub fn straighten(p: &PresheafMap, w: &HomotopyWitness, budget: &mut Budget) -> Result<CylinderMap> {
    let y = p.source();
    let mut acc = CylinderMap::constant(y, &w.from);
    for step in &w.steps {
        let h = match step {
            Step::Cylinder(h) => h.clone(),
            Step::Reversed(h) => invert_homotopy(p, h, budget)?,
            Step::Colour(c) => arrow_as_cylinder(y, &c.forward),
        };
        acc = if acc.start(y) == acc.end(y) && acc == CylinderMap::constant(y, &acc.start(y)) {
            h
        } else {
            compose_homotopies(p, &acc, &h, budget)?
        };
    }
    Ok(acc)
}
