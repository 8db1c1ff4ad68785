//! Products with powers of the interval: `X ⊗ Δ[1]` and `X ⊗ Δ[1] ⊗ Δ[1]`.
//!
//! An element of `X ⊗ Δ[1]^k` at `S` is an element of `X(S)` with `k` labellings of
//! the edges of `S` by `{0, 1}`, each weakly increasing from the leaves to the root.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use smallvec::SmallVec;

use crate::error::Result;
use crate::presheaf::{from_concrete, representable_arc, Concrete, Element, FinitePresheaf, PresheafMap, Realized};
use crate::site::{Arities, Morphism, Shape};

pub type Labels = SmallVec<[u64; 2]>;

struct IntervalPower {
    base: Arc<FinitePresheaf>,
    k: usize,
    arities: Arities,
    bound: usize,
}

/// Upward-closed edge sets of `s`, as bit masks.
pub fn monotone_labels(s: &Shape) -> Vec<u64> {
    let tree = s.tree();
    let n = tree.n_edges();
    assert!(n <= 20, "labelling a tree with {n} edges");
    (0..1u64 << n)
        .filter(|&m| {
            tree.vertices().iter().all(|v| m >> v.output & 1 == 1 || v.inputs.iter().all(|&i| m >> i & 1 == 0))
        })
        .collect()
}

pub fn pull_labels(f: &Morphism, m: u64) -> u64 {
    f.carrier().iter().enumerate().fold(0, |acc, (i, &e)| acc | (m >> e & 1) << i)
}

impl Concrete for IntervalPower {
    type Elem = (Element, Labels);

    fn elements(&self, s: &Shape) -> Vec<(Element, Labels)> {
        let xs = self.base.evaluate(s);
        if xs.is_empty() {
            return Vec::new();
        }
        let labels = monotone_labels(s);
        let mut tuples: Vec<Labels> = vec![Labels::new()];
        for _ in 0..self.k {
            tuples = tuples.iter().flat_map(|t| labels.iter().map(move |&m| {
                let mut t = t.clone();
                t.push(m);
                t
            })).collect();
        }
        xs.iter().flat_map(|x| tuples.iter().map(move |t| (x.clone(), t.clone()))).collect()
    }

    fn restrict(&self, f: &Morphism, x: &(Element, Labels)) -> (Element, Labels) {
        (self.base.act(f, &x.0).expect("level"), x.1.iter().map(|&m| pull_labels(f, m)).collect())
    }

    fn arities(&self) -> Arities {
        self.arities.clone()
    }

    fn degree_bound(&self) -> Option<usize> {
        Some(self.bound)
    }

    fn label(&self, x: &(Element, Labels)) -> String {
        let n = x.0.level().n_edges();
        let bits: Vec<String> =
            x.1.iter().map(|m| (0..n).map(|i| if m >> i & 1 == 1 { '1' } else { '0' }).collect()).collect();
        format!("{}@{}", self.base.display(&x.0), bits.join("/"))
    }
}

/// `X ⊗ Δ[1]^k` together with its dictionary to concrete elements.
pub struct Cylinder {
    pub k: usize,
    pub object: Arc<FinitePresheaf>,
    conc: IntervalPower,
    real: Realized<(Element, Labels)>,
}

impl Cylinder {
    pub fn new(base: &Arc<FinitePresheaf>, k: usize) -> Result<Self> {
        let mut arities = crate::presheaf::op_arities(base);
        arities = arities.with(1);
        let bound = base
            .generators()
            .iter()
            .map(|g| {
                let t = g.shape.tree();
                let tips = t.leaves().len() + t.vertices().iter().filter(|v| v.inputs.is_empty()).count();
                g.shape.degree() + k * tips.max(1)
            })
            .max()
            .unwrap_or(0);
        let conc = IntervalPower { base: base.clone(), k, arities, bound };
        let name = if k == 1 { format!("{} x I", base.name()) } else { format!("{} x I^{k}", base.name()) };
        let real = from_concrete(&conc, &name, bound)?;
        Ok(Cylinder { k, object: real.presheaf.clone(), conc, real })
    }

    pub fn base(&self) -> &Arc<FinitePresheaf> {
        &self.conc.base
    }

    /// The cylinder element with base component `x` and labellings `labels`.
    pub fn locate(&self, x: &Element, labels: &[u64]) -> Element {
        self.real.locate(&self.conc, &(x.clone(), labels.iter().copied().collect()), x.level()).expect("within the bound")
    }

    /// Base component and labellings of a cylinder element.
    pub fn concrete(&self, e: &Element) -> (Element, Labels) {
        self.real.concrete(&self.conc, e)
    }

    /// Concrete value of a generator.
    pub fn generator_value(&self, g: usize) -> &(Element, Labels) {
        &self.real.values[g]
    }

    pub fn label(&self, e: &Element) -> String {
        self.conc.label(&self.concrete(e))
    }

    /// The inclusion of the base at the constant labelling `v` in every coordinate.
    pub fn end(&self, v: &[bool]) -> PresheafMap {
        let base = self.base();
        let assign = (0..base.len())
            .map(|g| {
                let x = base.gen_element(g);
                let full = (1u64 << x.level().n_edges()) - 1;
                let labels: Labels = v.iter().map(|&b| if b { full } else { 0 }).collect();
                self.locate(&x, &labels)
            })
            .collect();
        PresheafMap::new(base.clone(), self.object.clone(), assign).expect("ends are natural")
    }

    /// The projection onto the base.
    pub fn projection(&self) -> PresheafMap {
        let assign = self.real.values.iter().map(|(x, _)| x.clone()).collect();
        PresheafMap::new(self.object.clone(), self.base().clone(), assign).expect("projection is natural")
    }

    pub fn len(&self) -> usize {
        self.object.len()
    }

    pub fn is_empty(&self) -> bool {
        self.object.is_empty()
    }
}

/// `X ⊗ Δ[1]` with its end inclusions and projection.
pub struct IntervalTensor {
    pub cylinder: Cylinder,
    pub i0: PresheafMap,
    pub i1: PresheafMap,
    pub proj: PresheafMap,
}

pub fn tensor_interval(x: &Arc<FinitePresheaf>) -> Result<IntervalTensor> {
    let cylinder = Cylinder::new(x, 1)?;
    let i0 = cylinder.end(&[false]);
    let i1 = cylinder.end(&[true]);
    let proj = cylinder.projection();
    Ok(IntervalTensor { cylinder, i0, i1, proj })
}

fn cache() -> &'static Mutex<HashMap<(Shape, usize), Arc<Cylinder>>> {
    static CACHE: OnceLock<Mutex<HashMap<(Shape, usize), Arc<Cylinder>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Shared `Ω[T] ⊗ Δ[1]^k`.
pub fn rep_cylinder(t: &Shape, k: usize) -> Arc<Cylinder> {
    let key = (t.clone(), k);
    if let Some(c) = cache().lock().unwrap().get(&key) {
        return c.clone();
    }
    let c = Arc::new(Cylinder::new(&representable_arc(t), k).expect("cylinders on representables are finite"));
    cache().lock().unwrap().entry(key).or_insert(c).clone()
}
