//! Finite presheaves on the tree category, stored by nondegenerate generators.

mod checks;
mod colimit;
mod concrete;
mod map;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{DendroError, Result};
use crate::site::omega::{self, automorphisms, degeneracies, elementary_faces, factor_through, factorize, proper_faces};
use crate::site::{Arities, Morphism, Shape};

pub use checks::{
    check_degenerate_boundary_lemma, generating_nondegenerates, validate_functoriality, BoundaryLemmaReport,
    FunctorialityReport,
};
pub use colimit::{op_arities, coproduct, pullback, pullback_induced, pushout, pushout_induced, quotient, quotient_by_twist, Pullback, Pushout};
pub use concrete::{from_concrete, representable, Concrete, Realized};
pub use map::{boundary, rep_info, representable_arc, skeleton, sub_presheaf, top_generator, yoneda, PresheafMap, RepInfo};

/// An element `deg^* g` in normal form: `deg` is a degeneracy (possibly an iso)
/// from the element's level onto the shape of generator `gen`, minimal among
/// `Stab(g) ∘ deg`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    gen: usize,
    deg: Morphism,
}

impl Element {
    pub fn generator(&self) -> usize {
        self.gen
    }

    pub fn degeneracy(&self) -> &Morphism {
        &self.deg
    }

    pub fn level(&self) -> &Shape {
        self.deg.source()
    }

    pub fn is_degenerate(&self) -> bool {
        !self.deg.is_iso()
    }

    pub(crate) fn raw(gen: usize, deg: Morphism) -> Element {
        Element { gen, deg }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.deg.is_identity() {
            write!(f, "#{}", self.gen)
        } else {
            write!(f, "#{}<{:?}>", self.gen, self.deg)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub shape: Shape,
    /// Automorphisms of the shape fixing the generator; a group, sorted.
    pub stabilizer: Vec<Morphism>,
    /// Values on the elementary faces of the shape, in the order of `elementary_faces`.
    pub faces: Vec<Element>,
}

impl Generator {
    pub fn new(name: impl Into<String>, shape: Shape, faces: Vec<Element>) -> Self {
        let id = Morphism::identity(&shape);
        Generator { name: name.into(), shape, stabilizer: vec![id], faces }
    }
}

pub struct FinitePresheaf {
    name: String,
    gens: Vec<Generator>,
    face_cache: Vec<HashMap<Morphism, Element>>,
    levels: RwLock<HashMap<Shape, Arc<Level>>>,
}

/// Elements at one level, grouped by boundary.
struct Level {
    by_boundary: HashMap<Vec<Element>, Vec<Element>>,
}

impl PartialEq for FinitePresheaf {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.gens == other.gens
    }
}

impl fmt::Debug for FinitePresheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "presheaf {} with {} generators", self.name, self.gens.len())
    }
}

pub(crate) fn close_group(shape: &Shape, given: &[Morphism]) -> Vec<Morphism> {
    let mut group: BTreeSet<Morphism> = BTreeSet::new();
    group.insert(Morphism::identity(shape));
    let mut frontier: Vec<Morphism> = given.to_vec();
    while let Some(g) = frontier.pop() {
        if !group.insert(g.clone()) {
            continue;
        }
        let current: Vec<Morphism> = group.iter().cloned().collect();
        for h in current {
            frontier.push(g.after(&h));
            frontier.push(h.after(&g));
        }
    }
    group.into_iter().collect()
}

impl FinitePresheaf {
    pub fn empty(name: impl Into<String>) -> Self {
        FinitePresheaf { name: name.into(), gens: Vec::new(), face_cache: Vec::new(), levels: Default::default() }
    }

    /// Validates the tables and precomputes every proper face of every generator.
    pub fn new(name: impl Into<String>, mut gens: Vec<Generator>) -> Result<Self> {
        let name = name.into();
        let bad = |m: String| DendroError::InvalidPresheaf(format!("{name}: {m}"));
        for g in gens.iter_mut() {
            for phi in &g.stabilizer {
                if !phi.is_iso() || phi.source() != &g.shape || phi.target() != &g.shape {
                    return Err(bad(format!("generator {}: {phi:?} is not an automorphism", g.name)));
                }
            }
            g.stabilizer = close_group(&g.shape, &g.stabilizer);
            let faces = elementary_faces(&g.shape);
            if faces.len() != g.faces.len() {
                return Err(bad(format!(
                    "generator {} has {} face values, its shape {} has {} faces",
                    g.name,
                    g.faces.len(),
                    g.shape,
                    faces.len()
                )));
            }
            for (d, e) in faces.iter().zip(&g.faces) {
                if e.level() != d.source() {
                    return Err(bad(format!("generator {}: face value {e:?} lives at the wrong level", g.name)));
                }
                if !e.deg.is_minus() {
                    return Err(bad(format!("generator {}: face value {e:?} is not in normal form", g.name)));
                }
            }
        }
        let n = gens.len();
        for g in &gens {
            for e in &g.faces {
                if e.gen >= n {
                    return Err(bad(format!("generator {}: face refers to a missing generator", g.name)));
                }
                if e.deg.target() != &gens[e.gen].shape {
                    return Err(bad(format!("generator {}: face value {e:?} has the wrong shape", g.name)));
                }
                if gens[e.gen].shape.degree() >= g.shape.degree() {
                    return Err(bad(format!("generator {}: face value of too high degree", g.name)));
                }
            }
        }
        let mut x = FinitePresheaf { name, gens, face_cache: vec![HashMap::new(); n], levels: Default::default() };
        for i in 0..n {
            let faces: Vec<Element> = x.gens[i].faces.iter().map(|e| x.normalize(e.gen, e.deg.clone())).collect();
            x.gens[i].faces = faces;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| x.gens[i].shape.degree());
        for i in order {
            let shape = x.gens[i].shape.clone();
            let elementary = elementary_faces(&shape);
            let mut cache = HashMap::new();
            for d in proper_faces(&shape).iter() {
                let value = match elementary.iter().position(|e| e == d) {
                    Some(k) => x.gens[i].faces[k].clone(),
                    None => {
                        let (k, rest) = elementary
                            .iter()
                            .enumerate()
                            .find_map(|(k, e)| factor_through(d, e).map(|r| (k, r)))
                            .expect("every proper face factors through an elementary face");
                        x.act(&rest, &x.gens[i].faces[k])?
                    }
                };
                cache.insert(d.clone(), value);
            }
            x.face_cache[i] = cache;
        }
        Ok(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    /// Largest generator degree, `None` when empty.
    pub fn max_degree(&self) -> Option<usize> {
        self.gens.iter().map(|g| g.shape.degree()).max()
    }

    /// Vertex arities occurring in generator shapes.
    pub fn arities(&self) -> Arities {
        Arities::from_set(self.gens.iter().flat_map(|g| g.shape.tree().arities()))
    }

    pub fn is_linear(&self) -> bool {
        self.gens.iter().all(|g| g.shape.is_linear())
    }

    pub fn is_normal(&self) -> bool {
        self.gens.iter().all(|g| g.stabilizer.len() == 1)
    }

    /// A generator with nontrivial stabilizer, if any.
    pub fn non_normal_witness(&self) -> Option<(usize, Morphism)> {
        self.gens.iter().enumerate().find_map(|(i, g)| g.stabilizer.get(1).map(|phi| (i, phi.clone())))
    }

    /// The nondegenerate element `g` itself.
    pub fn gen_element(&self, g: usize) -> Element {
        Element { gen: g, deg: Morphism::identity(&self.gens[g].shape) }
    }

    /// Normal form of `deg^* g`.
    pub fn normalize(&self, gen: usize, deg: Morphism) -> Element {
        let stab = &self.gens[gen].stabilizer;
        if stab.len() <= 1 {
            return Element { gen, deg };
        }
        let deg = stab.iter().map(|phi| phi.after(&deg)).min().expect("nonempty");
        Element { gen, deg }
    }

    /// Builds an element from a generator and a degeneracy, checking endpoints.
    pub fn element(&self, gen: usize, deg: Morphism) -> Result<Element> {
        if gen >= self.gens.len() || deg.target() != &self.gens[gen].shape || !deg.is_minus() {
            return Err(DendroError::InvalidPresheaf(format!("{}: ({gen}, {deg:?}) is not an element", self.name)));
        }
        Ok(self.normalize(gen, deg))
    }

    /// `f^* x`.
    pub fn act(&self, f: &Morphism, x: &Element) -> Result<Element> {
        if f.target() != x.level() {
            return Err(DendroError::Mismatch(format!("cannot restrict {x:?} along {f:?}")));
        }
        let h = x.deg.after(f);
        let (eps, d) = factorize(&h);
        if d.is_identity() {
            return Ok(self.normalize(x.gen, h));
        }
        let y = self.face_cache[x.gen].get(&d).ok_or_else(|| {
            DendroError::InvalidPresheaf(format!("{}: face {d:?} of generator {} not tabulated", self.name, x.gen))
        })?;
        Ok(self.normalize(y.gen, y.deg.after(&eps)))
    }

    /// Value of generator `g` on a proper face `d` of its shape (canonical form).
    pub fn face_value(&self, g: usize, d: &Morphism) -> Option<&Element> {
        self.face_cache[g].get(d)
    }

    /// All elements at level `s`, sorted.
    pub fn evaluate(&self, s: &Shape) -> Vec<Element> {
        let mut out = BTreeSet::new();
        for (i, g) in self.gens.iter().enumerate() {
            if g.shape.degree() > s.degree() {
                continue;
            }
            for d in degeneracies(s, &g.shape) {
                out.insert(self.normalize(i, d));
            }
        }
        out.into_iter().collect()
    }

    fn level(&self, s: &Shape) -> Arc<Level> {
        if let Some(l) = self.levels.read().unwrap().get(s) {
            return l.clone();
        }
        let mut by_boundary: HashMap<Vec<Element>, Vec<Element>> = HashMap::new();
        for e in self.evaluate(s) {
            by_boundary.entry(self.boundary_of(&e)).or_default().push(e);
        }
        let l = Arc::new(Level { by_boundary });
        self.levels.write().unwrap().entry(s.clone()).or_insert(l).clone()
    }

    /// Elements at level `s` with the given boundary, sorted.
    pub fn with_boundary(&self, s: &Shape, boundary: &[Element]) -> Vec<Element> {
        self.level(s).by_boundary.get(boundary).cloned().unwrap_or_default()
    }

    /// Elementary-face values of an element, i.e. its boundary.
    pub fn boundary_of(&self, x: &Element) -> Vec<Element> {
        elementary_faces(x.level()).iter().map(|d| self.act(d, x).expect("face of the level")).collect()
    }

    /// All automorphic images `phi^* x` of a nondegenerate element.
    pub fn orbit(&self, x: &Element) -> BTreeSet<Element> {
        automorphisms(x.level()).iter().map(|phi| self.act(phi, x).expect("automorphism of the level")).collect()
    }

    pub fn display(&self, x: &Element) -> String {
        let g = &self.gens[x.gen];
        if x.deg.is_identity() {
            g.name.clone()
        } else {
            format!("{}{:?}", g.name, x.deg.carrier())
        }
    }
}

/// Restriction along a composite, used by checks: `(g ∘ f)^* x`.
pub fn act_composite(x: &FinitePresheaf, g: &Morphism, f: &Morphism, e: &Element) -> Result<Element> {
    x.act(&omega::compose(g, f), e)
}

#[cfg(test)]
mod tests;
