//! Presheaves given by explicit element sets, and their conversion to generator form.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use super::{Element, FinitePresheaf, Generator};
use crate::error::{DendroError, Result};
use crate::site::omega::{automorphisms, canonical_face, elementary_degeneracies, elementary_faces, proper_faces, sections_of};
use crate::site::tree::trees_up_to;
use crate::site::{Arities, Morphism, Shape};

/// A presheaf described by its element sets and restriction maps.
pub trait Concrete: Sync {
    type Elem: Clone + Ord + Hash + Debug + Send + Sync;

    /// All elements at level `s`.
    fn elements(&self, s: &Shape) -> Vec<Self::Elem>;
    /// `f^* x`.
    fn restrict(&self, f: &Morphism, x: &Self::Elem) -> Self::Elem;
    /// Arities that nondegenerate elements may have.
    fn arities(&self) -> Arities;
    /// Known bound on the degree of nondegenerate elements.
    fn degree_bound(&self) -> Option<usize>;
    fn label(&self, x: &Self::Elem) -> String {
        format!("{x:?}")
    }
}

/// The generator form of a concrete presheaf, with the dictionary between them.
pub struct Realized<E> {
    pub presheaf: Arc<FinitePresheaf>,
    /// Concrete value of each generator.
    pub values: Vec<E>,
    index: HashMap<(Shape, E), Element>,
    stabilizers: Vec<Vec<Morphism>>,
    /// Nondegenerate elements exist above the computed range.
    pub truncated: bool,
}

impl<E: Clone + Ord + Hash + Debug> Realized<E> {
    /// Normal form of a concrete element `x` at level `level`.
    pub fn locate<C: Concrete<Elem = E>>(&self, c: &C, x: &E, level: &Shape) -> Result<Element> {
        if let Some(e) = self.index.get(&(level.clone(), x.clone())) {
            return Ok(e.clone());
        }
        for s in elementary_degeneracies(level).iter() {
            let alpha = &sections_of(s)?[0];
            let y = c.restrict(alpha, x);
            if c.restrict(s, &y) == *x {
                let e = self.locate(c, &y, s.target())?;
                let deg = e.degeneracy().after(s);
                let deg = self.stabilizers[e.generator()].iter().map(|phi| phi.after(&deg)).min().expect("identity");
                return Ok(Element::raw(e.generator(), deg));
            }
        }
        Err(DendroError::Algorithm(format!(
            "{}: nondegenerate element {x:?} at {level} is outside the computed range",
            self.presheaf.name()
        )))
    }

    /// Concrete value of an element.
    pub fn concrete<C: Concrete<Elem = E>>(&self, c: &C, e: &Element) -> E {
        c.restrict(e.degeneracy(), &self.values[e.generator()])
    }
}

fn is_degenerate<C: Concrete>(c: &C, x: &C::Elem, level: &Shape) -> bool {
    elementary_degeneracies(level).iter().any(|s| {
        let alpha = &sections_of(s).expect("degeneracy")[0];
        c.restrict(s, &c.restrict(alpha, x)) == *x
    })
}

/// Converts a concrete presheaf to generator form, scanning trees up to
/// `max_degree` (or the presheaf's own bound if smaller).
pub fn from_concrete<C: Concrete>(c: &C, name: &str, max_degree: usize) -> Result<Realized<C::Elem>> {
    let bound = c.degree_bound().map_or(max_degree, |b| b.min(max_degree));
    let mut gens: Vec<Generator> = Vec::new();
    let mut values = Vec::new();
    let mut realized = Realized {
        presheaf: Arc::new(FinitePresheaf::empty(name)),
        values: Vec::new(),
        index: HashMap::new(),
        stabilizers: Vec::new(),
        truncated: false,
    };
    let arities = c.arities().with(1);
    for t in trees_up_to(bound, &arities) {
        let mut elems = c.elements(&t);
        elems.sort();
        let auts = automorphisms(&t);
        let mut new_here = Vec::new();
        for x in elems {
            if realized.index.contains_key(&(t.clone(), x.clone())) || is_degenerate(c, &x, &t) {
                continue;
            }
            let g = gens.len() + new_here.len();
            let stabilizer: Vec<Morphism> = auts.iter().filter(|phi| c.restrict(phi, &x) == x).cloned().collect();
            for phi in auts.iter() {
                let y = c.restrict(phi, &x);
                let deg = stabilizer.iter().map(|s| s.after(phi)).min().expect("stabilizer has the identity");
                realized.index.entry((t.clone(), y)).or_insert(Element::raw(g, deg));
            }
            realized.stabilizers.push(stabilizer.clone());
            new_here.push((x, stabilizer));
        }
        for (x, stabilizer) in new_here {
            let faces = elementary_faces(&t)
                .iter()
                .map(|d| realized.locate(c, &c.restrict(d, &x), d.source()))
                .collect::<Result<Vec<_>>>()?;
            gens.push(Generator { name: format!("g{}", gens.len()), shape: t.clone(), stabilizer, faces });
            values.push(x);
        }
    }
    let names: Vec<String> = values.iter().map(|v| c.label(v)).collect();
    let mut uniq: BTreeMap<&String, usize> = BTreeMap::new();
    for n in &names {
        *uniq.entry(n).or_default() += 1;
    }
    if uniq.values().all(|&k| k == 1) {
        for (g, n) in gens.iter_mut().zip(&names) {
            g.name = n.clone();
        }
    }
    realized.presheaf = Arc::new(FinitePresheaf::new(name, gens)?);
    realized.values = values;
    if c.degree_bound().is_none_or(|b| b > bound) {
        realized.truncated = trees_up_to(bound + 1, &arities).iter().filter(|t| t.degree() == bound + 1).any(|t| {
            c.elements(t).iter().any(|x| !realized.index.contains_key(&(t.clone(), x.clone())) && !is_degenerate(c, x, t))
        });
    }
    Ok(realized)
}

/// The representable presheaf: generators are the faces into `t`, named by image.
pub fn representable(t: &Shape) -> FinitePresheaf {
    let mut faces: Vec<Morphism> = proper_faces(t).to_vec();
    faces.push(Morphism::identity(t));
    faces.sort_by(|a, b| (a.source(), a.carrier()).cmp(&(b.source(), b.carrier())));
    let index: HashMap<Morphism, usize> = faces.iter().enumerate().map(|(i, d)| (d.clone(), i)).collect();
    let mut images: BTreeMap<_, usize> = BTreeMap::new();
    for d in &faces {
        *images.entry(d.image()).or_default() += 1;
    }
    let gens = faces
        .iter()
        .map(|d| {
            let values = elementary_faces(d.source())
                .iter()
                .map(|e| {
                    let composite = d.after(e);
                    let k = index[&canonical_face(&composite)];
                    let c = &faces[k];
                    let twist = automorphisms(e.source())
                        .iter()
                        .find(|psi| c.after(psi) == composite)
                        .expect("faces with equal image differ by an automorphism")
                        .clone();
                    Element::raw(k, twist)
                })
                .collect();
            let mut name = format!("f{:?}", d.image().as_slice()).replace(' ', "");
            if images[&d.image()] > 1 {
                name = format!("{name}{}", d.source().code());
            }
            Generator::new(name, d.source().clone(), values)
        })
        .collect();
    FinitePresheaf::new(format!("rep {}", t.name()), gens).expect("representable tables are valid")
}
