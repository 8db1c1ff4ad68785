//! Eilenberg-Zilber sites: the tree category and a few smaller instances.

pub mod finset;
pub mod gamma;
pub mod group;
pub mod omega;
pub mod simplex;
pub mod tree;

use std::fmt::Debug;
use std::hash::Hash;

use rayon::prelude::*;
use serde::Serialize;

pub use omega::{Morphism, Omega};
pub use tree::{Arities, Edge, Shape, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MorClass {
    Iso,
    /// Plus map.
    Face,
    /// Minus map.
    Degeneracy,
    Mixed,
}

/// A category with a degree function and a plus/minus classification of morphisms.
pub trait EzSite: Sync {
    type Obj: Clone + Eq + Ord + Hash + Debug + Send + Sync;
    type Mor: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    fn name(&self) -> String;
    fn objects(&self, max_degree: usize) -> Vec<Self::Obj>;
    fn degree(&self, x: &Self::Obj) -> usize;
    fn hom(&self, a: &Self::Obj, b: &Self::Obj) -> Vec<Self::Mor>;
    fn source(&self, f: &Self::Mor) -> Self::Obj;
    fn target(&self, f: &Self::Mor) -> Self::Obj;
    /// `g ∘ f`.
    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Self::Mor;
    fn identity(&self, x: &Self::Obj) -> Self::Mor;
    fn classify(&self, f: &Self::Mor) -> MorClass;

    fn is_minus(&self, f: &Self::Mor) -> bool {
        matches!(self.classify(f), MorClass::Iso | MorClass::Degeneracy)
    }

    fn sections(&self, f: &Self::Mor) -> Vec<Self::Mor> {
        let (a, b) = (self.source(f), self.target(f));
        let id = self.identity(&b);
        self.hom(&b, &a).into_iter().filter(|s| self.compose(f, s) == id).collect()
    }
}

impl EzSite for Omega {
    type Obj = Shape;
    type Mor = Morphism;

    fn name(&self) -> String {
        format!("omega(arity<={})", self.arities.cap())
    }
    fn objects(&self, max_degree: usize) -> Vec<Shape> {
        Omega::objects(self, max_degree)
    }
    fn degree(&self, x: &Shape) -> usize {
        x.degree()
    }
    fn hom(&self, a: &Shape, b: &Shape) -> Vec<Morphism> {
        omega::hom(a, b).to_vec()
    }
    fn source(&self, f: &Morphism) -> Shape {
        f.source().clone()
    }
    fn target(&self, f: &Morphism) -> Shape {
        f.target().clone()
    }
    fn compose(&self, g: &Morphism, f: &Morphism) -> Morphism {
        g.after(f)
    }
    fn identity(&self, x: &Shape) -> Morphism {
        Morphism::identity(x)
    }
    fn classify(&self, f: &Morphism) -> MorClass {
        f.class()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EzReport {
    pub site: String,
    pub max_degree: usize,
    pub objects: usize,
    pub morphisms: usize,
    pub minus_maps: usize,
    pub violations: Vec<String>,
    pub pass: bool,
}

const MAX_LISTED: usize = 20;

/// Exhaustively checks the axioms on all objects up to `max_degree`:
/// minus maps are exactly the split epis, isos are exactly the invertible maps,
/// minus maps are determined by their sections, and non-invertible plus/minus maps
/// raise/lower the degree.
pub fn check_ez_axioms<S: EzSite>(site: &S, max_degree: usize) -> EzReport {
    let objs = site.objects(max_degree);
    let pairs: Vec<(usize, usize)> =
        (0..objs.len()).flat_map(|i| (0..objs.len()).map(move |j| (i, j))).collect();
    let per_pair: Vec<(usize, usize, Vec<String>)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&objs[i], &objs[j]);
            let homs = site.hom(a, b);
            let back = site.hom(b, a);
            let id_b = site.identity(b);
            let id_a = site.identity(a);
            let mut bad = Vec::new();
            let mut minus: Vec<(S::Mor, Vec<S::Mor>)> = Vec::new();
            for f in &homs {
                if site.source(f) != *a || site.target(f) != *b {
                    bad.push(format!("{f:?}: endpoints differ from its hom-set"));
                }
                let class = site.classify(f);
                let sections: Vec<S::Mor> = back.iter().filter(|s| site.compose(f, s) == id_b).cloned().collect();
                let is_minus = matches!(class, MorClass::Iso | MorClass::Degeneracy);
                if is_minus != !sections.is_empty() {
                    bad.push(if is_minus {
                        format!("{f:?}: minus map without a section")
                    } else {
                        format!("{f:?}: split epi not classified as a minus map")
                    });
                }
                let invertible = sections.iter().any(|s| site.compose(s, f) == id_a);
                if invertible != (class == MorClass::Iso) {
                    bad.push(format!("{f:?}: invertibility disagrees with class {class:?}"));
                }
                let (da, db) = (site.degree(a), site.degree(b));
                match class {
                    MorClass::Face if da >= db => bad.push(format!("{f:?}: plus map does not raise degree")),
                    MorClass::Degeneracy if da <= db => bad.push(format!("{f:?}: minus map does not lower degree")),
                    MorClass::Iso if da != db => bad.push(format!("{f:?}: iso changes degree")),
                    _ => {}
                }
                if is_minus {
                    minus.push((f.clone(), sections));
                }
            }
            for x in 0..minus.len() {
                for y in x + 1..minus.len() {
                    if minus[x].1 == minus[y].1 {
                        bad.push(format!("{:?} and {:?}: distinct minus maps with equal sections", minus[x].0, minus[y].0));
                    }
                }
            }
            (homs.len(), minus.len(), bad)
        })
        .collect();
    let mut violations = Vec::new();
    let (mut morphisms, mut minus_maps) = (0, 0);
    let mut total_bad = 0;
    for (m, n, bad) in per_pair {
        morphisms += m;
        minus_maps += n;
        total_bad += bad.len();
        for b in bad {
            if violations.len() < MAX_LISTED {
                violations.push(b);
            }
        }
    }
    if total_bad > violations.len() {
        violations.push(format!("... {} more", total_bad - violations.len()));
    }
    EzReport {
        site: site.name(),
        max_degree,
        objects: objs.len(),
        morphisms,
        minus_maps,
        pass: total_bad == 0,
        violations,
    }
}

/// A site with some morphisms deleted from its hom-sets, for fault injection.
pub struct Corrupted<S: EzSite> {
    pub inner: S,
    pub removed: Vec<S::Mor>,
}

impl<S: EzSite> EzSite for Corrupted<S> {
    type Obj = S::Obj;
    type Mor = S::Mor;

    fn name(&self) -> String {
        format!("corrupted {}", self.inner.name())
    }
    fn objects(&self, max_degree: usize) -> Vec<S::Obj> {
        self.inner.objects(max_degree)
    }
    fn degree(&self, x: &S::Obj) -> usize {
        self.inner.degree(x)
    }
    fn hom(&self, a: &S::Obj, b: &S::Obj) -> Vec<S::Mor> {
        self.inner.hom(a, b).into_iter().filter(|f| !self.removed.contains(f)).collect()
    }
    fn source(&self, f: &S::Mor) -> S::Obj {
        self.inner.source(f)
    }
    fn target(&self, f: &S::Mor) -> S::Obj {
        self.inner.target(f)
    }
    fn compose(&self, g: &S::Mor, f: &S::Mor) -> S::Mor {
        self.inner.compose(g, f)
    }
    fn identity(&self, x: &S::Obj) -> S::Mor {
        self.inner.identity(x)
    }
    fn classify(&self, f: &S::Mor) -> MorClass {
        self.inner.classify(f)
    }
}
