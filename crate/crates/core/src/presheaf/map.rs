//! Maps between finite presheaves, given on generators.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use super::{representable, Element, FinitePresheaf, Generator};
use crate::error::{DendroError, Result};
use crate::site::omega::{automorphisms, elementary_faces, factorize, proper_faces};
use crate::site::{Morphism, Shape};

/// A natural transformation, stored as the image of each source generator.
#[derive(Clone)]
pub struct PresheafMap {
    source: Arc<FinitePresheaf>,
    target: Arc<FinitePresheaf>,
    assign: Vec<Element>,
}

impl fmt::Debug for PresheafMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}: {:?}", self.source.name(), self.target.name(), self.assign)
    }
}

impl PartialEq for PresheafMap {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.source, &other.source) && Arc::ptr_eq(&self.target, &other.target) && self.assign == other.assign
    }
}

impl PresheafMap {
    /// Checks levels, face compatibility and stabilizer invariance of the assignment.
    pub fn new(source: Arc<FinitePresheaf>, target: Arc<FinitePresheaf>, assign: Vec<Element>) -> Result<Self> {
        let m = PresheafMap { source, target, assign };
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn unchecked(source: Arc<FinitePresheaf>, target: Arc<FinitePresheaf>, assign: Vec<Element>) -> Self {
        PresheafMap { source, target, assign }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| DendroError::InvalidMap(format!("{} -> {}: {m}", self.source.name(), self.target.name()));
        if self.assign.len() != self.source.len() {
            return Err(bad(format!("{} values for {} generators", self.assign.len(), self.source.len())));
        }
        for (i, g) in self.source.generators().iter().enumerate() {
            let y = &self.assign[i];
            if y.generator() >= self.target.len() || y.degeneracy().target() != &self.target.generator(y.generator()).shape {
                return Err(bad(format!("value of {} is not an element of the target", g.name)));
            }
            if y.level() != &g.shape {
                return Err(bad(format!("value of {} lives at {} instead of {}", g.name, y.level(), g.shape)));
            }
            for phi in &g.stabilizer {
                if self.target.act(phi, y)? != *y {
                    return Err(bad(format!("value of {} is not fixed by {phi:?}", g.name)));
                }
            }
            for (d, face) in elementary_faces(&g.shape).iter().zip(&g.faces) {
                let lhs = self.target.act(d, y)?;
                let rhs = self.apply(face);
                if lhs != rhs {
                    return Err(bad(format!(
                        "face {d:?} of {}: {} versus {}",
                        g.name,
                        self.target.display(&lhs),
                        self.target.display(&rhs)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn identity(x: &Arc<FinitePresheaf>) -> Self {
        let assign = (0..x.len()).map(|g| x.gen_element(g)).collect();
        PresheafMap { source: x.clone(), target: x.clone(), assign }
    }

    /// The unique map out of the empty presheaf.
    pub fn from_empty(target: &Arc<FinitePresheaf>) -> Self {
        PresheafMap { source: Arc::new(FinitePresheaf::empty("empty")), target: target.clone(), assign: Vec::new() }
    }

    pub fn source(&self) -> &Arc<FinitePresheaf> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinitePresheaf> {
        &self.target
    }

    pub fn assignment(&self) -> &[Element] {
        &self.assign
    }

    pub fn on_generator(&self, g: usize) -> &Element {
        &self.assign[g]
    }

    pub fn apply(&self, x: &Element) -> Element {
        self.target.act(x.degeneracy(), &self.assign[x.generator()]).expect("degeneracy matches the generator level")
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &PresheafMap) -> Result<PresheafMap> {
        if !Arc::ptr_eq(f.target(), &self.source) && **f.target() != *self.source {
            return Err(DendroError::Mismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.source.name(),
                self.target.name(),
                f.source.name(),
                f.target.name()
            )));
        }
        let assign = f.assign.iter().map(|y| self.apply(y)).collect();
        Ok(PresheafMap { source: f.source.clone(), target: self.target.clone(), assign })
    }

    /// A pair of distinct elements with equal image, or a reason the map fails to
    /// be levelwise injective. `None` means the map is a monomorphism.
    pub fn mono_witness(&self) -> Option<String> {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        for (i, y) in self.assign.iter().enumerate() {
            let g = self.source.generator(i);
            if y.is_degenerate() {
                return Some(format!("generator {} is sent to the degenerate element {}", g.name, self.target.display(y)));
            }
            if let Some(j) = seen.insert(y.generator(), i) {
                return Some(format!(
                    "generators {} and {} have the same image orbit {}",
                    self.source.generator(j).name,
                    g.name,
                    self.target.generator(y.generator()).name
                ));
            }
            let big = self.target.generator(y.generator()).stabilizer.len();
            if big != g.stabilizer.len() {
                let phi = automorphisms(&g.shape)
                    .iter()
                    .find(|phi| !g.stabilizer.contains(phi) && self.target.act(phi, y).ok().as_ref() == Some(y))
                    .cloned();
                return Some(format!(
                    "{} and {:?}^*{} have the same image",
                    g.name,
                    phi.map(|p| p.carrier().to_vec()).unwrap_or_default(),
                    g.name
                ));
            }
        }
        None
    }

    pub fn is_mono(&self) -> bool {
        self.mono_witness().is_none()
    }

    /// Target generators hit by the map.
    pub fn image_generators(&self) -> BTreeSet<usize> {
        self.assign.iter().filter(|y| !y.is_degenerate()).map(|y| y.generator()).collect()
    }

    /// For a monomorphism: whether the automorphism groups act freely on the
    /// nondegenerate elements outside the image. Non-monos are an error.
    pub fn is_normal_mono(&self) -> Result<bool> {
        if let Some(w) = self.mono_witness() {
            return Err(DendroError::NotMono(w));
        }
        let hit = self.image_generators();
        Ok((0..self.target.len()).filter(|g| !hit.contains(g)).all(|g| self.target.generator(g).stabilizer.len() == 1))
    }

    /// A target generator outside the image with a nontrivial stabilizer.
    pub fn normality_witness(&self) -> Option<(usize, Morphism)> {
        let hit = self.image_generators();
        (0..self.target.len())
            .filter(|g| !hit.contains(g))
            .find_map(|g| self.target.generator(g).stabilizer.get(1).map(|phi| (g, phi.clone())))
    }

    pub fn is_iso(&self) -> bool {
        self.is_mono() && self.image_generators().len() == self.target.len()
    }

    /// For a monomorphism, the preimage of `y` if it lies in the image.
    pub fn preimage(&self, y: &Element) -> Option<Element> {
        let (g, x) = self.assign.iter().enumerate().find(|(_, x)| x.generator() == y.generator() && !x.is_degenerate())?;
        let psi_inv = x.degeneracy().inverse().expect("nondegenerate value");
        Some(self.source.normalize(g, psi_inv.after(y.degeneracy())))
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Option<PresheafMap> {
        if !self.is_iso() {
            return None;
        }
        let assign = (0..self.target.len())
            .map(|h| self.preimage(&self.target.gen_element(h)).expect("surjective"))
            .collect();
        Some(PresheafMap { source: self.target.clone(), target: self.source.clone(), assign })
    }

    /// For a monomorphism `self: A -> B` and `h: W -> B` landing in the image,
    /// the map `W -> A`.
    pub fn preimage_map(&self, h: &PresheafMap) -> Result<PresheafMap> {
        let assign = (0..h.source.len())
            .map(|k| {
                self.preimage(&h.assign[k]).ok_or_else(|| {
                    DendroError::Mismatch(format!("{} does not land in {}", h.source.generator(k).name, self.source.name()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PresheafMap::new(h.source.clone(), self.source.clone(), assign)
    }

    pub fn with_target(&self, target: Arc<FinitePresheaf>) -> Self {
        PresheafMap { source: self.source.clone(), target, assign: self.assign.clone() }
    }
}

/// A representable together with the face each of its generators stands for.
pub struct RepInfo {
    pub presheaf: Arc<FinitePresheaf>,
    pub faces: Vec<Morphism>,
    index: HashMap<Morphism, usize>,
}

impl RepInfo {
    /// The morphism into the shape represented by an element.
    pub fn morphism(&self, e: &Element) -> Morphism {
        self.faces[e.generator()].after(e.degeneracy())
    }

    /// The element represented by a morphism into the shape.
    pub fn element(&self, a: &Morphism) -> Element {
        let (eps, d) = factorize(a);
        Element::raw(self.index[&d], eps)
    }

    pub fn top(&self) -> usize {
        self.faces.len() - 1
    }
}

fn rep_cache() -> &'static Mutex<HashMap<Shape, Arc<RepInfo>>> {
    static CACHE: OnceLock<Mutex<HashMap<Shape, Arc<RepInfo>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

pub fn rep_info(t: &Shape) -> Arc<RepInfo> {
    if let Some(r) = rep_cache().lock().unwrap().get(t) {
        return r.clone();
    }
    let mut faces: Vec<Morphism> = proper_faces(t).to_vec();
    faces.push(Morphism::identity(t));
    faces.sort_by(|a, b| (a.source(), a.carrier()).cmp(&(b.source(), b.carrier())));
    let index = faces.iter().enumerate().map(|(i, d)| (d.clone(), i)).collect();
    let info = Arc::new(RepInfo { presheaf: Arc::new(representable(t)), faces, index });
    rep_cache().lock().unwrap().entry(t.clone()).or_insert(info).clone()
}

/// Shared copy of the representable on `t`.
pub fn representable_arc(t: &Shape) -> Arc<FinitePresheaf> {
    rep_info(t).presheaf.clone()
}

/// Index of the top (identity) generator of a representable.
pub fn top_generator(rep: &FinitePresheaf) -> usize {
    rep.len() - 1
}

/// The map `Ω[T] -> X` classifying an element `x` at level `T`.
pub fn yoneda(x: &Arc<FinitePresheaf>, e: &Element) -> PresheafMap {
    let info = rep_info(e.level());
    let assign = info.faces.iter().map(|d| x.act(d, e).expect("face into the level")).collect();
    PresheafMap { source: info.presheaf.clone(), target: x.clone(), assign }
}

/// The subpresheaf generated by `seeds` (closed under faces), with its inclusion.
pub fn sub_presheaf(x: &Arc<FinitePresheaf>, seeds: impl IntoIterator<Item = usize>, name: &str) -> Result<PresheafMap> {
    let mut keep: BTreeSet<usize> = BTreeSet::new();
    let mut stack: Vec<usize> = seeds.into_iter().collect();
    while let Some(g) = stack.pop() {
        if g >= x.len() {
            return Err(DendroError::Unknown(format!("generator {g} of {}", x.name())));
        }
        if keep.insert(g) {
            stack.extend(x.generator(g).faces.iter().map(|e| e.generator()));
        }
    }
    let index: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let gens = keep
        .iter()
        .map(|&g| {
            let old = x.generator(g);
            Generator {
                name: old.name.clone(),
                shape: old.shape.clone(),
                stabilizer: old.stabilizer.clone(),
                faces: old.faces.iter().map(|e| Element::raw(index[&e.generator()], e.degeneracy().clone())).collect(),
            }
        })
        .collect();
    let sub = Arc::new(FinitePresheaf::new(name, gens)?);
    let assign = keep.iter().map(|&g| x.gen_element(g)).collect();
    Ok(PresheafMap { source: sub, target: x.clone(), assign })
}

/// The `n`-skeleton (generators of degree at most `n`) with its inclusion.
/// `n = -1` gives the empty presheaf.
pub fn skeleton(x: &Arc<FinitePresheaf>, n: isize) -> PresheafMap {
    let seeds: Vec<usize> = (0..x.len()).filter(|&g| (x.generator(g).shape.degree() as isize) <= n).collect();
    sub_presheaf(x, seeds, &format!("sk{n} {}", x.name())).expect("skeleta are closed under faces")
}

/// The boundary of the representable on `t`, with its inclusion.
pub fn boundary(t: &Shape) -> PresheafMap {
    let rep = representable_arc(t);
    let seeds: Vec<usize> = (0..rep.len() - 1).collect();
    sub_presheaf(&rep, seeds, &format!("boundary {}", t.name())).expect("faces are closed under faces")
}
