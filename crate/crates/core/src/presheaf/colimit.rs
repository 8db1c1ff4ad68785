//! Pushouts along monomorphisms, pullbacks, coproducts and quotients by isomorphisms.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use super::concrete::{from_concrete, Concrete};
use super::map::PresheafMap;
use super::{close_group, Element, FinitePresheaf, Generator};
use crate::error::{DendroError, Result};
use crate::site::omega::{automorphisms, elementary_faces};
use crate::site::{Arities, Morphism, Shape};

pub struct Pushout {
    pub object: Arc<FinitePresheaf>,
    /// `B -> P`.
    pub from_b: PresheafMap,
    /// `C -> P`.
    pub from_c: PresheafMap,
}

/// The pushout of `g: A -> C` along a monomorphism `f: A -> B`.
///
/// Generators of the result are those of `C`, followed by the generators of `B`
/// outside the image of `f`.
pub fn pushout(f: &PresheafMap, g: &PresheafMap, name: &str) -> Result<Pushout> {
    if !Arc::ptr_eq(f.source(), g.source()) && **f.source() != **g.source() {
        return Err(DendroError::Mismatch("pushout legs have different sources".into()));
    }
    if let Some(w) = f.mono_witness() {
        return Err(DendroError::NotMono(w));
    }
    let b = f.target();
    let c = g.target();
    let hit = f.image_generators();
    let fresh: Vec<usize> = (0..b.len()).filter(|h| !hit.contains(h)).collect();
    let slot: HashMap<usize, usize> = fresh.iter().enumerate().map(|(i, &h)| (h, c.len() + i)).collect();
    let names: BTreeSet<&str> = c.generators().iter().map(|x| x.name.as_str()).collect();
    let carry = |y: &Element| -> Element {
        match slot.get(&y.generator()) {
            Some(&k) => Element::raw(k, y.degeneracy().clone()),
            None => {
                let a = f.preimage(y).expect("generator in the image");
                g.apply(&a)
            }
        }
    };
    let mut gens: Vec<Generator> = c.generators().to_vec();
    for &h in &fresh {
        let old = b.generator(h);
        let mut nm = old.name.clone();
        while names.contains(nm.as_str()) {
            nm.push('\'');
        }
        gens.push(Generator {
            name: nm,
            shape: old.shape.clone(),
            stabilizer: old.stabilizer.clone(),
            faces: old.faces.iter().map(&carry).collect(),
        });
    }
    let object = Arc::new(FinitePresheaf::new(name, gens)?);
    let from_c = PresheafMap::unchecked(c.clone(), object.clone(), (0..c.len()).map(|k| object.gen_element(k)).collect());
    let assign_b = (0..b.len())
        .map(|h| {
            let y = carry(&b.gen_element(h));
            object.normalize(y.generator(), y.degeneracy().clone())
        })
        .collect();
    let from_b = PresheafMap::new(b.clone(), object.clone(), assign_b)?;
    Ok(Pushout { object, from_b, from_c })
}

/// The map out of a pushout induced by `u: B -> Z` and `v: C -> Z`.
pub fn pushout_induced(f: &PresheafMap, g: &PresheafMap, po: &Pushout, u: &PresheafMap, v: &PresheafMap) -> Result<PresheafMap> {
    for a in 0..f.source().len() {
        let x = f.source().gen_element(a);
        if u.apply(&f.apply(&x)) != v.apply(&g.apply(&x)) {
            return Err(DendroError::InvalidMap(format!("cocone does not commute on {}", f.source().generator(a).name)));
        }
    }
    let c = g.target();
    let hit = f.image_generators();
    let mut assign: Vec<Element> = (0..c.len()).map(|k| v.on_generator(k).clone()).collect();
    assign.extend((0..f.target().len()).filter(|h| !hit.contains(h)).map(|h| u.on_generator(h).clone()));
    PresheafMap::new(po.object.clone(), u.target().clone(), assign)
}

/// The coproduct with its two inclusions.
pub fn coproduct(x: &Arc<FinitePresheaf>, y: &Arc<FinitePresheaf>, name: &str) -> Result<(Arc<FinitePresheaf>, PresheafMap, PresheafMap)> {
    let n = x.len();
    let mut gens: Vec<Generator> = x.generators().to_vec();
    let names: BTreeSet<&str> = x.generators().iter().map(|g| g.name.as_str()).collect();
    for g in y.generators() {
        let mut g = g.clone();
        while names.contains(g.name.as_str()) {
            g.name.push('\'');
        }
        g.faces = g.faces.iter().map(|e| Element::raw(e.generator() + n, e.degeneracy().clone())).collect();
        gens.push(g);
    }
    let s = Arc::new(FinitePresheaf::new(name, gens)?);
    let inl = PresheafMap::unchecked(x.clone(), s.clone(), (0..n).map(|k| s.gen_element(k)).collect());
    let inr = PresheafMap::unchecked(y.clone(), s.clone(), (0..y.len()).map(|k| s.gen_element(n + k)).collect());
    Ok((s, inl, inr))
}

pub struct Pullback {
    pub object: Arc<FinitePresheaf>,
    /// `P -> X`.
    pub to_x: PresheafMap,
    /// `P -> Y`.
    pub to_y: PresheafMap,
    /// Nondegenerate pairs exist above the computed range.
    pub truncated: bool,
}

struct PairConcrete<'a> {
    f: &'a PresheafMap,
    g: &'a PresheafMap,
    arities: Arities,
    bound: usize,
}

impl Concrete for PairConcrete<'_> {
    type Elem = (Element, Element);

    fn elements(&self, s: &Shape) -> Vec<(Element, Element)> {
        let xs = self.f.source().evaluate(s);
        let ys = self.g.source().evaluate(s);
        let mut by_image: HashMap<Element, Vec<&Element>> = HashMap::new();
        for y in &ys {
            by_image.entry(self.g.apply(y)).or_default().push(y);
        }
        let mut out = Vec::new();
        for x in &xs {
            if let Some(list) = by_image.get(&self.f.apply(x)) {
                out.extend(list.iter().map(|&y| (x.clone(), y.clone())));
            }
        }
        out
    }

    fn restrict(&self, m: &Morphism, p: &(Element, Element)) -> (Element, Element) {
        let x = self.f.source().act(m, &p.0).expect("level");
        let y = self.g.source().act(m, &p.1).expect("level");
        (x, y)
    }

    fn arities(&self) -> Arities {
        self.arities.clone()
    }

    fn degree_bound(&self) -> Option<usize> {
        Some(self.bound)
    }

    fn label(&self, p: &(Element, Element)) -> String {
        format!("({},{})", self.f.source().display(&p.0), self.g.source().display(&p.1))
    }
}

/// Arities of all operations (composites of vertices) in generator shapes.
pub fn op_arities(x: &FinitePresheaf) -> Arities {
    let mut out = BTreeSet::from([1]);
    for g in x.generators() {
        for e in 0..g.shape.n_edges() {
            for op in g.shape.ops_at(e as u8) {
                out.insert(op.len());
            }
        }
    }
    Arities::from_set(out)
}

/// The pullback of `f: X -> Z` and `g: Y -> Z`, computed up to `max_degree`.
pub fn pullback(f: &PresheafMap, g: &PresheafMap, name: &str, max_degree: usize) -> Result<Pullback> {
    if !Arc::ptr_eq(f.target(), g.target()) && **f.target() != **g.target() {
        return Err(DendroError::Mismatch("pullback legs have different targets".into()));
    }
    let ax = op_arities(f.source());
    let ay = op_arities(g.source());
    let arities = Arities::from_set(ax.iter().filter(|&k| ay.contains(k)));
    let bound = f.source().max_degree().unwrap_or(0) + g.source().max_degree().unwrap_or(0);
    let pc = PairConcrete { f, g, arities, bound };
    let realized = from_concrete(&pc, name, max_degree)?;
    let truncated = realized.truncated;
    let object = realized.presheaf.clone();
    let to_x =
        PresheafMap::new(object.clone(), f.source().clone(), realized.values.iter().map(|p| p.0.clone()).collect())?;
    let to_y =
        PresheafMap::new(object.clone(), g.source().clone(), realized.values.iter().map(|p| p.1.clone()).collect())?;
    Ok(Pullback { object, to_x, to_y, truncated })
}

/// The map `W -> P` into a pullback induced by `a: W -> X` and `b: W -> Y`.
pub fn pullback_induced(pb: &Pullback, a: &PresheafMap, b: &PresheafMap) -> Result<PresheafMap> {
    let w = a.source();
    let assign = (0..w.len())
        .map(|k| {
            let (u, v) = (a.on_generator(k), b.on_generator(k));
            pb.object
                .evaluate(&w.generator(k).shape)
                .into_iter()
                .find(|e| pb.to_x.apply(e) == *u && pb.to_y.apply(e) == *v)
                .ok_or_else(|| DendroError::Mismatch(format!("no pair over {} in the pullback", w.generator(k).name)))
        })
        .collect::<Result<Vec<_>>>()?;
    PresheafMap::new(w.clone(), pb.object.clone(), assign)
}

/// The quotient of `x` by the relations `a_k = b_k`, where each relation can be
/// realized by identifying nondegenerate elements up to automorphisms.
pub fn quotient(x: &Arc<FinitePresheaf>, relations: &[(Element, Element)], name: &str) -> Result<PresheafMap> {
    let n = x.len();
    // rel[h] = (r, a): generator h equals a^* r in the quotient.
    let mut rel: Vec<(usize, Morphism)> = (0..n).map(|h| (h, Morphism::identity(&x.generator(h).shape))).collect();
    let mut stab: Vec<Vec<Morphism>> = x.generators().iter().map(|g| g.stabilizer.clone()).collect();
    let mut queue: VecDeque<(Element, Element)> = relations.iter().cloned().collect();

    fn push_stab_faces(x: &FinitePresheaf, r: usize, chi: &Morphism, queue: &mut VecDeque<(Element, Element)>) {
        let top = x.gen_element(r);
        for d in elementary_faces(&x.generator(r).shape).iter() {
            let lhs = x.act(d, &top).expect("face");
            let rhs = x.act(&chi.after(d), &top).expect("face");
            if lhs != rhs {
                queue.push_back((lhs, rhs));
            }
        }
    }

    while let Some((u, v)) = queue.pop_front() {
        if u.level() != v.level() {
            return Err(DendroError::Mismatch(format!("relation between {u:?} and {v:?} at different levels")));
        }
        let (r1, a1) = rel[u.generator()].clone();
        let (r2, a2) = rel[v.generator()].clone();
        let m1 = a1.after(u.degeneracy());
        let m2 = a2.after(v.degeneracy());
        if m1.target() != m2.target() {
            return Err(DendroError::Algorithm(format!(
                "identifying {} with {} would collapse a nondegenerate element",
                x.display(&u),
                x.display(&v)
            )));
        }
        let psi = automorphisms(m1.target())
            .iter()
            .find(|psi| psi.after(&m2) == m1)
            .cloned()
            .ok_or_else(|| {
                DendroError::Algorithm(format!(
                    "identifying {} with {} needs a relation between different degeneracies",
                    x.display(&u),
                    x.display(&v)
                ))
            })?;
        // Now r2 = psi^* r1 is required.
        if r1 == r2 {
            if !stab[r1].contains(&psi) {
                let grown = close_group(&x.generator(r1).shape, &[stab[r1].clone(), vec![psi]].concat());
                for chi in grown.iter().filter(|c| !stab[r1].contains(c)) {
                    push_stab_faces(x, r1, chi, &mut queue);
                }
                stab[r1] = grown;
            }
            continue;
        }
        let (keep, gone, b) = if r1 < r2 { (r1, r2, psi) } else { (r2, r1, psi.inverse().expect("iso")) };
        // gone = b^* keep.
        let b_inv = b.inverse().expect("iso");
        for h in 0..n {
            if rel[h].0 == gone {
                rel[h] = (keep, b.after(&rel[h].1));
            }
        }
        let moved: Vec<Morphism> = stab[gone].iter().map(|chi| b.after(chi).after(&b_inv)).collect();
        let grown = close_group(&x.generator(keep).shape, &[stab[keep].clone(), moved].concat());
        for chi in grown.iter().filter(|c| !stab[keep].contains(c)) {
            push_stab_faces(x, keep, chi, &mut queue);
        }
        stab[keep] = grown;
        let top_gone = x.gen_element(gone);
        let top_keep = x.gen_element(keep);
        for d in elementary_faces(&x.generator(gone).shape).iter() {
            queue.push_back((x.act(d, &top_gone)?, x.act(&b.after(d), &top_keep)?));
        }
    }

    let roots: Vec<usize> = (0..n).filter(|&h| rel[h].0 == h).collect();
    let index: HashMap<usize, usize> = roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let resolve = |e: &Element| -> Element {
        let (r, a) = &rel[e.generator()];
        Element::raw(index[r], a.after(e.degeneracy()))
    };
    let gens = roots
        .iter()
        .map(|&r| {
            let old = x.generator(r);
            Generator {
                name: old.name.clone(),
                shape: old.shape.clone(),
                stabilizer: stab[r].clone(),
                faces: old.faces.iter().map(&resolve).collect(),
            }
        })
        .collect();
    let q = Arc::new(FinitePresheaf::new(name, gens)?);
    let assign = (0..n)
        .map(|h| {
            let e = resolve(&x.gen_element(h));
            q.normalize(e.generator(), e.degeneracy().clone())
        })
        .collect();
    PresheafMap::new(x.clone(), q, assign)
}

/// The coequalizer of the identity and the twist `phi` on generator `g`.
pub fn quotient_by_twist(x: &Arc<FinitePresheaf>, g: usize, phi: &Morphism, name: &str) -> Result<PresheafMap> {
    let top = x.gen_element(g);
    let twisted = x.act(phi, &top)?;
    quotient(x, &[(top, twisted)], name)
}
