//! The tree category: morphisms as edge carriers.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;
use serde::Serialize;
use smallvec::SmallVec;

use crate::error::{DendroError, Result};
use crate::site::tree::{trees_up_to, Arities, Edge, EdgeSet, Shape, Tree, Vertex};
use crate::site::MorClass;

pub type Carrier = SmallVec<[Edge; 12]>;

/// A morphism of trees, stored by its map on edges.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    src: Shape,
    dst: Shape,
    carrier: Carrier,
    class: MorClass,
}

impl PartialOrd for Morphism {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Morphism {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.src, &self.dst, &self.carrier).cmp(&(&other.src, &other.dst, &other.carrier))
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}{:?}", self.src, self.dst, self.carrier.as_slice())
    }
}

/// Checks the carrier against the shapes. `Err` for out-of-range data, `Ok(false)`
/// when some vertex does not land on a subtree operation.
pub fn validate_carrier(src: &Shape, dst: &Shape, carrier: &[Edge]) -> Result<bool> {
    if carrier.len() != src.n_edges() {
        return Err(DendroError::MalformedCarrier(format!(
            "carrier has {} entries, source {} has {} edges",
            carrier.len(),
            src,
            src.n_edges()
        )));
    }
    if let Some(&e) = carrier.iter().find(|&&e| e as usize >= dst.n_edges()) {
        return Err(DendroError::MalformedCarrier(format!("edge {e} is not an edge of {dst}")));
    }
    Ok(src.tree().vertices().iter().all(|v| vertex_ok(dst, carrier, v)))
}

fn vertex_ok(dst: &Shape, carrier: &[Edge], v: &Vertex) -> bool {
    let mut ins: EdgeSet = v.inputs.iter().map(|&i| carrier[i as usize]).collect();
    ins.sort_unstable();
    if ins.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    dst.has_op(carrier[v.output as usize], &ins)
}

fn classify(src: &Shape, dst: &Shape, carrier: &[Edge]) -> MorClass {
    let mut hit = vec![false; dst.n_edges()];
    let mut injective = true;
    for &e in carrier {
        injective &= !std::mem::replace(&mut hit[e as usize], true);
    }
    let surjective = hit.iter().all(|&h| h);
    if injective {
        if surjective && src.degree() == dst.degree() {
            MorClass::Iso
        } else {
            MorClass::Face
        }
    } else if surjective && live_vertices(src, carrier) == dst.degree() {
        MorClass::Degeneracy
    } else {
        MorClass::Mixed
    }
}

fn collapsed(v: &Vertex, carrier: &[Edge]) -> bool {
    v.inputs.len() == 1 && carrier[v.inputs[0] as usize] == carrier[v.output as usize]
}

fn live_vertices(src: &Shape, carrier: &[Edge]) -> usize {
    src.tree().vertices().iter().filter(|v| !collapsed(v, carrier)).count()
}

impl Morphism {
    pub fn new(src: Shape, dst: Shape, carrier: &[Edge]) -> Result<Morphism> {
        let carrier: Carrier = SmallVec::from_slice(carrier);
        if !validate_carrier(&src, &dst, &carrier)? {
            return Err(DendroError::InvalidMorphism(format!(
                "{src}->{dst} {:?} violates the subtree condition",
                carrier.as_slice()
            )));
        }
        Ok(Morphism::unchecked(src, dst, carrier))
    }

    pub(crate) fn unchecked(src: Shape, dst: Shape, carrier: Carrier) -> Morphism {
        let class = classify(&src, &dst, &carrier);
        Morphism { src, dst, carrier, class }
    }

    pub fn identity(s: &Shape) -> Morphism {
        Morphism {
            src: s.clone(),
            dst: s.clone(),
            carrier: (0..s.n_edges() as Edge).collect(),
            class: MorClass::Iso,
        }
    }

    pub fn source(&self) -> &Shape {
        &self.src
    }

    pub fn target(&self) -> &Shape {
        &self.dst
    }

    pub fn carrier(&self) -> &[Edge] {
        &self.carrier
    }

    pub fn class(&self) -> MorClass {
        self.class
    }

    pub fn is_iso(&self) -> bool {
        self.class == MorClass::Iso
    }

    pub fn is_identity(&self) -> bool {
        self.src == self.dst && self.carrier.iter().enumerate().all(|(i, &e)| i == e as usize)
    }

    /// Face or iso.
    pub fn is_plus(&self) -> bool {
        matches!(self.class, MorClass::Iso | MorClass::Face)
    }

    /// Degeneracy or iso.
    pub fn is_minus(&self) -> bool {
        matches!(self.class, MorClass::Iso | MorClass::Degeneracy)
    }

    pub fn image(&self) -> EdgeSet {
        let mut im: EdgeSet = self.carrier.iter().copied().collect();
        im.sort_unstable();
        im.dedup();
        im
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &Morphism) -> Morphism {
        assert!(f.dst == self.src, "composing {f:?} with {self:?}");
        let carrier = f.carrier.iter().map(|&e| self.carrier[e as usize]).collect();
        Morphism::unchecked(f.src.clone(), self.dst.clone(), carrier)
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Morphism) -> Morphism {
        g.after(self)
    }

    pub fn inverse(&self) -> Option<Morphism> {
        if !self.is_iso() {
            return None;
        }
        let mut inv: Carrier = SmallVec::from_elem(0, self.carrier.len());
        for (i, &e) in self.carrier.iter().enumerate() {
            inv[e as usize] = i as Edge;
        }
        Some(Morphism::unchecked(self.dst.clone(), self.src.clone(), inv))
    }
}

pub fn compose(g: &Morphism, f: &Morphism) -> Morphism {
    g.after(f)
}

fn cached(slot: &OnceLock<Arc<Vec<Morphism>>>, f: impl FnOnce() -> Vec<Morphism>) -> Arc<Vec<Morphism>> {
    slot.get_or_init(|| Arc::new(f())).clone()
}

/// All morphisms `s -> t`, ordered by carrier.
pub fn hom(s: &Shape, t: &Shape) -> Arc<Vec<Morphism>> {
    if let Some(h) = s.data().homs.read().unwrap().get(t) {
        return h.clone();
    }
    let list = Arc::new(enumerate_hom(s, t));
    s.data().homs.write().unwrap().entry(t.clone()).or_insert(list).clone()
}

fn enumerate_hom(s: &Shape, t: &Shape) -> Vec<Morphism> {
    let st = s.tree();
    let mut out = Vec::new();
    let mut carrier: Carrier = SmallVec::from_elem(0, st.n_edges());
    fn rec(s: &Shape, t: &Shape, vi: usize, carrier: &mut Carrier, out: &mut Vec<Morphism>) {
        let verts = s.tree().vertices();
        if vi == verts.len() {
            out.push(Morphism::unchecked(s.clone(), t.clone(), carrier.clone()));
            return;
        }
        let v = &verts[vi];
        let img = carrier[v.output as usize];
        for op in t.ops_at(img) {
            if op.len() != v.inputs.len() {
                continue;
            }
            let mut perm: SmallVec<[Edge; 4]> = op.clone();
            permutations(&mut perm, 0, &mut |p| {
                for (k, &i) in v.inputs.iter().enumerate() {
                    carrier[i as usize] = p[k];
                }
                rec(s, t, vi + 1, carrier, out);
            });
        }
    }
    for r in 0..t.n_edges() as Edge {
        carrier[st.root() as usize] = r;
        rec(s, t, 0, &mut carrier, &mut out);
    }
    out.sort();
    out
}

fn permutations(xs: &mut [Edge], k: usize, f: &mut dyn FnMut(&[Edge])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permutations(xs, k + 1, f);
        xs.swap(k, i);
    }
}

pub fn automorphisms(t: &Shape) -> Arc<Vec<Morphism>> {
    cached(&t.data().automorphisms, || hom(t, t).iter().filter(|m| m.is_iso()).cloned().collect())
}

/// Degeneracies (including isos) `s -> t`.
pub fn degeneracies(s: &Shape, t: &Shape) -> Vec<Morphism> {
    if s.degree() < t.degree() || s.n_edges() < t.n_edges() {
        return Vec::new();
    }
    hom(s, t).iter().filter(|m| m.is_minus()).cloned().collect()
}

/// Quotient of `tree` by the relation identifying the input and output of each unary
/// vertex in `drop`. Returns the canonical shape and the map on edges.
fn collapse_vertices(tree: &Tree, drop: &[usize]) -> (Shape, Carrier) {
    let n = tree.n_edges();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &vi in drop {
        let v = &tree.vertices()[vi];
        assert_eq!(v.inputs.len(), 1, "only unary vertices collapse");
        let a = find(&mut parent, v.inputs[0] as usize);
        let b = find(&mut parent, v.output as usize);
        parent[a] = b;
    }
    let mut reps: Vec<usize> = (0..n).map(|e| find(&mut parent, e)).collect();
    let mut ids: BTreeMap<usize, Edge> = BTreeMap::new();
    for &r in &reps {
        let next = ids.len() as Edge;
        ids.entry(r).or_insert(next);
    }
    let class: Vec<Edge> = reps.iter_mut().map(|r| ids[r]).collect();
    let vertices = tree
        .vertices()
        .iter()
        .enumerate()
        .filter(|(i, _)| !drop.contains(i))
        .map(|(_, v)| Vertex::new(v.inputs.iter().map(|&i| class[i as usize]).collect(), class[v.output as usize]))
        .collect();
    let q = Tree::new(ids.len(), class[tree.root() as usize], vertices).expect("collapsing unary vertices");
    let (shape, relabel) = Shape::from_tree(&q);
    (shape, class.iter().map(|&c| relabel[c as usize]).collect())
}

/// The canonical degeneracy removing the given unary vertices of `s`.
pub fn collapse(s: &Shape, drop: &[usize]) -> Morphism {
    let (t, carrier) = collapse_vertices(s.tree(), drop);
    Morphism::unchecked(s.clone(), t, carrier)
}

/// One degeneracy per unary vertex, in vertex order.
pub fn elementary_degeneracies(t: &Shape) -> Arc<Vec<Morphism>> {
    cached(&t.data().elementary_degeneracies, || {
        t.tree()
            .vertices()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.arity() == 1)
            .map(|(i, _)| collapse(t, &[i]))
            .collect()
    })
}

/// The unary vertex an elementary degeneracy removes.
pub fn collapsed_vertex(s: &Morphism) -> Option<usize> {
    let verts = s.src.tree().vertices();
    let mut found = verts.iter().enumerate().filter(|(_, v)| collapsed(v, &s.carrier)).map(|(i, _)| i);
    let first = found.next();
    if found.next().is_some() {
        None
    } else {
        first
    }
}

/// Vertices collapsed by a degeneracy.
pub fn collapsed_vertices(s: &Morphism) -> Vec<usize> {
    s.src.tree().vertices().iter().enumerate().filter(|(_, v)| collapsed(v, &s.carrier)).map(|(i, _)| i).collect()
}

/// Builds the face of `t` spanned by `keep` (a sorted edge subset) with the given
/// vertices (expressed in `t`'s edge ids). Returns a morphism into `t`.
fn sub_face(t: &Shape, keep: &[Edge], root: Edge, vertices: Vec<(EdgeSet, Edge)>) -> Morphism {
    let pos = |e: Edge| keep.binary_search(&e).expect("edge kept") as Edge;
    let verts = vertices.into_iter().map(|(ins, out)| Vertex::new(ins.iter().map(|&i| pos(i)).collect(), pos(out))).collect();
    let u = Tree::new(keep.len(), pos(root), verts).expect("face of a valid tree");
    let (shape, relabel) = Shape::from_tree(&u);
    let mut carrier: Carrier = SmallVec::from_elem(0, keep.len());
    for (p, &e) in keep.iter().enumerate() {
        carrier[relabel[p] as usize] = e;
    }
    canonical_face(&Morphism::unchecked(shape, t.clone(), carrier))
}

/// The representative of `d ∘ Aut(source)` with least carrier.
pub fn canonical_face(d: &Morphism) -> Morphism {
    automorphisms(&d.src).iter().map(|a| d.after(a)).min().expect("Aut contains the identity")
}

/// The codegree-one faces of `t`, one per image, ordered by carrier.
pub fn elementary_faces(t: &Shape) -> Arc<Vec<Morphism>> {
    cached(&t.data().elementary_faces, || {
        let tree = t.tree();
        let all: Vec<Edge> = (0..tree.n_edges() as Edge).collect();
        let vs: Vec<(EdgeSet, Edge)> = tree.vertices().iter().map(|v| (v.inputs.clone(), v.output)).collect();
        let mut out: BTreeSet<Morphism> = BTreeSet::new();
        if tree.degree() == 0 {
            return Vec::new();
        }
        if tree.degree() == 1 {
            for e in all {
                out.insert(sub_face(t, &[e], e, vec![]));
            }
            return out.into_iter().collect();
        }
        for e in 0..tree.n_edges() as Edge {
            if !tree.is_inner(e) {
                continue;
            }
            let (p, c) = (tree.producer(e).unwrap(), tree.consumer(e).unwrap());
            let keep: Vec<Edge> = all.iter().copied().filter(|&x| x != e).collect();
            let mut ins: EdgeSet = vs[c].0.iter().copied().filter(|&x| x != e).collect();
            ins.extend(vs[p].0.iter().copied());
            ins.sort_unstable();
            let mut verts: Vec<(EdgeSet, Edge)> =
                vs.iter().enumerate().filter(|&(i, _)| i != p && i != c).map(|(_, v)| v.clone()).collect();
            verts.push((ins, vs[c].1));
            out.insert(sub_face(t, &keep, tree.root(), verts));
        }
        for (vi, v) in tree.vertices().iter().enumerate() {
            if v.output == tree.root() {
                continue;
            }
            if v.inputs.iter().all(|&i| tree.is_leaf(i)) {
                let keep: Vec<Edge> = all.iter().copied().filter(|x| !v.inputs.contains(x)).collect();
                let verts = vs.iter().enumerate().filter(|&(i, _)| i != vi).map(|(_, v)| v.clone()).collect();
                out.insert(sub_face(t, &keep, tree.root(), verts));
            }
        }
        let rv = tree.producer(tree.root()).expect("positive degree");
        let inner: Vec<Edge> = vs[rv].0.iter().copied().filter(|&i| !tree.is_leaf(i)).collect();
        if inner.len() == 1 {
            let mut drop: Vec<Edge> = vs[rv].0.iter().copied().filter(|&i| tree.is_leaf(i)).collect();
            drop.push(tree.root());
            let keep: Vec<Edge> = all.iter().copied().filter(|x| !drop.contains(x)).collect();
            let verts = vs.iter().enumerate().filter(|&(i, _)| i != rv).map(|(_, v)| v.clone()).collect();
            out.insert(sub_face(t, &keep, inner[0], verts));
        }
        out.into_iter().collect()
    })
}

/// All non-invertible faces into `t`, one canonical representative per
/// `Aut(source)`-orbit. Over trees with stumps several faces can share an image.
pub fn proper_faces(t: &Shape) -> Arc<Vec<Morphism>> {
    cached(&t.data().proper_faces, || {
        let mut seen: BTreeSet<Morphism> = BTreeSet::new();
        let mut queue: Vec<Morphism> = elementary_faces(t).iter().cloned().collect();
        while let Some(d) = queue.pop() {
            if seen.contains(&d) {
                continue;
            }
            for e in elementary_faces(&d.src).iter() {
                queue.push(canonical_face(&d.after(e)));
            }
            seen.insert(d);
        }
        seen.into_iter().collect()
    })
}

/// The canonical face into `t` with the given image and the most vertices, if
/// that image spans a face.
pub fn face_with_image(t: &Shape, image: &[Edge]) -> Option<Morphism> {
    if image.len() == t.n_edges() && image.iter().enumerate().all(|(i, &e)| i == e as usize) {
        return Some(Morphism::identity(t));
    }
    proper_faces(t).iter().filter(|d| d.image().as_slice() == image).max_by_key(|d| d.src.degree()).cloned()
}

/// If `d` factors through the face `e` (`d = e ∘ x`), returns `x`.
pub fn factor_through(d: &Morphism, e: &Morphism) -> Option<Morphism> {
    if d.dst != e.dst {
        return None;
    }
    let mut inv: HashMap<Edge, Edge> = HashMap::new();
    for (i, &x) in e.carrier.iter().enumerate() {
        if inv.insert(x, i as Edge).is_some() {
            return None;
        }
    }
    let carrier: Option<Carrier> = d.carrier.iter().map(|x| inv.get(x).copied()).collect();
    let carrier = carrier?;
    if validate_carrier(&d.src, &e.src, &carrier).ok()? {
        Some(Morphism::unchecked(d.src.clone(), e.src.clone(), carrier))
    } else {
        None
    }
}

fn factor_cache() -> &'static RwLock<HashMap<Morphism, (Morphism, Morphism)>> {
    static CACHE: OnceLock<RwLock<HashMap<Morphism, (Morphism, Morphism)>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Splits `f` as a degeneracy followed by a face. The face is the canonical
/// representative for its image.
pub fn factorize(f: &Morphism) -> (Morphism, Morphism) {
    match f.class {
        MorClass::Face => {
            let d = canonical_face(f);
            if d == *f {
                return (Morphism::identity(&f.src), d);
            }
        }
        MorClass::Iso | MorClass::Degeneracy => return (f.clone(), Morphism::identity(&f.dst)),
        MorClass::Mixed => {}
    }
    if let Some(hit) = factor_cache().read().unwrap().get(f) {
        return hit.clone();
    }
    let result = factorize_uncached(f);
    factor_cache().write().unwrap().insert(f.clone(), result.clone());
    result
}

fn factorize_uncached(f: &Morphism) -> (Morphism, Morphism) {
    let image = f.image();
    let pos = |e: Edge| image.binary_search(&e).expect("in image") as Edge;
    let mut verts: BTreeSet<Vertex> = BTreeSet::new();
    for v in f.src.tree().vertices() {
        if collapsed(v, &f.carrier) {
            continue;
        }
        verts.insert(Vertex::new(v.inputs.iter().map(|&i| pos(f.carrier[i as usize])).collect(), pos(f.carrier[v.output as usize])));
    }
    let u = Tree::new(image.len(), pos(f.carrier[f.src.tree().root() as usize]), verts.into_iter().collect())
        .expect("image of a tree map is a tree");
    let (shape, relabel) = Shape::from_tree(&u);
    let mut d: Carrier = SmallVec::from_elem(0, image.len());
    for (p, &e) in image.iter().enumerate() {
        d[relabel[p] as usize] = e;
    }
    let s: Carrier = f.carrier.iter().map(|&e| relabel[pos(e) as usize]).collect();
    let d0 = Morphism::unchecked(shape.clone(), f.dst.clone(), d);
    let s0 = Morphism::unchecked(f.src.clone(), shape.clone(), s);
    let mut best: Option<(Morphism, Morphism)> = None;
    for a in automorphisms(&shape).iter() {
        let d1 = d0.after(a);
        if best.as_ref().is_none_or(|(_, b)| d1 < *b) {
            let s1 = a.inverse().expect("automorphism").after(&s0);
            best = Some((s1, d1));
        }
    }
    best.expect("Aut contains the identity")
}

/// All sections `a` of the degeneracy `s` (`s ∘ a = id`).
pub fn sections_of(s: &Morphism) -> Result<Vec<Morphism>> {
    if !s.is_minus() {
        return Err(DendroError::NotDegeneracy(format!("{s:?}")));
    }
    let id = Morphism::identity(&s.dst);
    Ok(hom(&s.dst, &s.src).iter().filter(|a| s.after(a) == id).cloned().collect())
}

pub fn degeneracies_equal_by_sections(s: &Morphism, t: &Morphism) -> Result<bool> {
    if s.src != t.src || s.dst != t.dst {
        return Err(DendroError::Mismatch(format!("{s:?} and {t:?}")));
    }
    Ok(sections_of(s)? == sections_of(t)?)
}

/// The image subtree in `t` of a map `s -> t`, as a collection of edges.
pub fn image_shape(f: &Morphism) -> Shape {
    factorize(f).1.src.clone()
}

/// The elementary square of a pasted absolute pushout, with compatible sections:
/// `vertical ∘ alpha = alpha_prime ∘ vertical_prime`.
#[derive(Clone, Debug)]
pub struct PasteCell {
    pub row: usize,
    pub col: usize,
    pub horizontal: Morphism,
    pub vertical: Morphism,
    pub horizontal_prime: Morphism,
    pub vertical_prime: Morphism,
    pub alpha: Morphism,
    pub alpha_prime: Morphism,
    pub by_rule: bool,
}

#[derive(Clone, Debug)]
pub struct AbsolutePushout {
    pub s: Morphism,
    pub t: Morphism,
    pub s_prime: Morphism,
    pub t_prime: Morphism,
    pub cells: Vec<PasteCell>,
}

impl AbsolutePushout {
    /// `s' ∘ t = t' ∘ s`, legs are degeneracies, every cell's sections are compatible.
    pub fn verify(&self) -> std::result::Result<(), String> {
        if self.s_prime.after(&self.t) != self.t_prime.after(&self.s) {
            return Err("square does not commute".into());
        }
        if !self.s_prime.is_minus() || !self.t_prime.is_minus() {
            return Err("legs are not degeneracies".into());
        }
        for c in &self.cells {
            if c.horizontal.after(&c.alpha) != Morphism::identity(&c.horizontal.dst)
                || c.horizontal_prime.after(&c.alpha_prime) != Morphism::identity(&c.horizontal_prime.dst)
            {
                return Err(format!("cell ({}, {}): not sections", c.row, c.col));
            }
            if c.vertical.after(&c.alpha) != c.alpha_prime.after(&c.vertical_prime) {
                return Err(format!("cell ({}, {}): sections incompatible", c.row, c.col));
            }
            if c.vertical_prime.after(&c.horizontal) != c.horizontal_prime.after(&c.vertical) {
                return Err(format!("cell ({}, {}): cell does not commute", c.row, c.col));
            }
        }
        Ok(())
    }
}

/// Completes two degeneracies with common source to an absolute pushout square
/// by pasting elementary squares along the collapsed vertices.
pub fn absolute_pushout(s: &Morphism, t: &Morphism) -> Result<AbsolutePushout> {
    if !s.is_minus() || !t.is_minus() {
        return Err(DendroError::NotDegeneracy(format!("{s:?}, {t:?}")));
    }
    if s.src != t.src {
        return Err(DendroError::Mismatch("degeneracies need a common source".into()));
    }
    let base = &s.src;
    let vs = collapsed_vertices(s);
    let vt = collapsed_vertices(t);
    let quotient = |i: usize, j: usize| {
        let mut drop: Vec<usize> = vs[..i].iter().chain(&vt[..j]).copied().collect();
        drop.sort_unstable();
        drop.dedup();
        collapse(base, &drop)
    };
    let mut grid: Vec<Vec<Morphism>> = Vec::new();
    for i in 0..=vs.len() {
        grid.push((0..=vt.len()).map(|j| quotient(i, j)).collect());
    }
    let induced = |a: &Morphism, b: &Morphism| -> Morphism {
        let mut carrier: Carrier = SmallVec::from_elem(0, a.dst.n_edges());
        for (e, &q) in a.carrier.iter().enumerate() {
            carrier[q as usize] = b.carrier[e];
        }
        Morphism::unchecked(a.dst.clone(), b.dst.clone(), carrier)
    };
    let mut cells = Vec::new();
    for i in 0..vs.len() {
        for j in 0..vt.len() {
            let h = induced(&grid[i][j], &grid[i + 1][j]);
            let v = induced(&grid[i][j], &grid[i][j + 1]);
            let h2 = induced(&grid[i][j + 1], &grid[i + 1][j + 1]);
            let v2 = induced(&grid[i + 1][j], &grid[i + 1][j + 1]);
            let ruled = rule_sections(base, &grid[i][j], &grid[i][j + 1], vs[i], vt[j], &h, &h2)
                .filter(|(a, a2)| v.after(a) == a2.after(&v2));
            let (alpha, alpha_prime, by_rule) = match ruled {
                Some((a, a2)) => (a, a2, true),
                None => {
                    let (a, a2) = search_sections(&h, &h2, &v, &v2).ok_or_else(|| {
                        DendroError::Algorithm(format!("no compatible sections in cell ({i}, {j})"))
                    })?;
                    (a, a2, false)
                }
            };
            cells.push(PasteCell {
                row: i,
                col: j,
                horizontal: h,
                vertical: v,
                horizontal_prime: h2,
                vertical_prime: v2,
                alpha,
                alpha_prime,
                by_rule,
            });
        }
    }
    let corner = &grid[vs.len()][vt.len()];
    // s = psi_s ∘ q_{m0}, t = psi_t ∘ q_{0n}
    let psi_s = induced(&grid[vs.len()][0], s);
    let psi_t = induced(&grid[0][vt.len()], t);
    let s_prime = induced(&grid[0][vt.len()], corner).after(&psi_t.inverse().expect("iso"));
    let t_prime = induced(&grid[vs.len()][0], corner).after(&psi_s.inverse().expect("iso"));
    Ok(AbsolutePushout { s: s.clone(), t: t.clone(), s_prime, t_prime, cells })
}

/// The section of an elementary degeneracy that contracts the edge above (`above`)
/// or below its collapsed vertex `v` of `base`, seen through the quotient `q`.
fn contracting_section(h: &Morphism, q: &Morphism, base: &Shape, v: usize, above: bool) -> Option<Morphism> {
    let vert = &base.tree().vertices()[v];
    let edge = if above { vert.inputs[0] } else { vert.output };
    let omit = q.carrier[edge as usize];
    sections_of(h).ok()?.into_iter().find(|a| !a.carrier.contains(&omit))
}

fn rule_sections(
    base: &Shape,
    q: &Morphism,
    q2: &Morphism,
    v: usize,
    w: usize,
    h: &Morphism,
    h2: &Morphism,
) -> Option<(Morphism, Morphism)> {
    if h.is_identity() {
        return Some((Morphism::identity(&h.src), Morphism::identity(&h2.src)));
    }
    if h2.is_identity() {
        return Some((contracting_section(h, q, base, v, false)?, Morphism::identity(&h2.src)));
    }
    let verts = base.tree().vertices();
    let (iv, ov) = (q.carrier[verts[v].inputs[0] as usize], q.carrier[verts[v].output as usize]);
    let (iw, ow) = (q.carrier[verts[w].inputs[0] as usize], q.carrier[verts[w].output as usize]);
    let above = ov == iw && iv != ow;
    Some((contracting_section(h, q, base, v, above)?, contracting_section(h2, q2, base, v, above)?))
}

fn search_sections(h: &Morphism, h2: &Morphism, v: &Morphism, v2: &Morphism) -> Option<(Morphism, Morphism)> {
    let s1 = sections_of(h).ok()?;
    let s2 = sections_of(h2).ok()?;
    for a in &s1 {
        for a2 in &s2 {
            if v.after(a) == a2.after(v2) {
                return Some((a.clone(), a2.clone()));
            }
        }
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct PushoutReport {
    pub max_degree: usize,
    pub arity_cap: usize,
    pub pairs: usize,
    pub elementary_pairs: usize,
    pub failures: Vec<String>,
    pub pass: bool,
}

/// Builds and verifies the absolute pushout of every pair of degeneracies with a
/// common source of degree at most `d`. For elementary `σ_v, σ_w` the diagonal
/// must collapse exactly `{v, w}`; for `v = w` the new legs must be isomorphisms,
/// and identities on the pair `(σ_v, σ_v)`.
pub fn check_absolute_pushouts(omega: &Omega, d: usize) -> PushoutReport {
    let objs = omega.objects(d);
    let per_source: Vec<(usize, usize, Vec<String>)> = objs
        .par_iter()
        .map(|s| {
            let minus: Vec<Morphism> =
                objs.iter().flat_map(|t| hom(s, t).iter().filter(|m| m.is_minus()).cloned().collect::<Vec<_>>()).collect();
            let (mut pairs, mut elementary, mut bad) = (0, 0, Vec::new());
            for a in &minus {
                for b in &minus {
                    pairs += 1;
                    let po = match absolute_pushout(a, b) {
                        Ok(po) => po,
                        Err(e) => {
                            bad.push(format!("{a:?}, {b:?}: {e}"));
                            continue;
                        }
                    };
                    if let Err(e) = po.verify() {
                        bad.push(format!("{a:?}, {b:?}: {e}"));
                        continue;
                    }
                    if let (Some(v), Some(w)) = (collapsed_vertex(a), collapsed_vertex(b)) {
                        elementary += 1;
                        let diagonal = po.s_prime.after(b);
                        let ok = if a == b && *a == collapse(s, &[v]) {
                            po.s_prime.is_identity() && po.t_prime.is_identity()
                        } else if a == b {
                            po.s_prime.is_iso() && po.s_prime == po.t_prime
                        } else if v == w {
                            po.s_prime.is_iso() && po.t_prime.is_iso()
                        } else {
                            let mut vw = vec![v, w];
                            vw.sort_unstable();
                            collapsed_vertices(&diagonal) == vw
                        };
                        if !ok {
                            bad.push(format!("{a:?}, {b:?}: elementary square has the wrong diagonal {diagonal:?}"));
                        }
                    }
                }
            }
            (pairs, elementary, bad)
        })
        .collect();
    let mut failures = Vec::new();
    let (mut pairs, mut elementary_pairs) = (0, 0);
    for (p, e, bad) in per_source {
        pairs += p;
        elementary_pairs += e;
        failures.extend(bad);
    }
    let pass = failures.is_empty();
    failures.truncate(20);
    PushoutReport { max_degree: d, arity_cap: omega.arities.cap(), pairs, elementary_pairs, failures, pass }
}

/// The tree category with vertex arities restricted to `arities` when enumerating.
#[derive(Clone, Debug)]
pub struct Omega {
    pub arities: Arities,
}

impl Omega {
    pub fn with_arity_cap(cap: usize) -> Self {
        Omega { arities: Arities::up_to(cap) }
    }

    pub fn objects(&self, max_degree: usize) -> Vec<Shape> {
        trees_up_to(max_degree, &self.arities)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Shape {
        Shape::corolla(2)
    }

    #[test]
    fn small_hom_sets() {
        assert_eq!(hom(&Shape::eta(), &c2()).len(), 3);
        assert!(hom(&c2(), &Shape::eta()).is_empty());
        assert_eq!(automorphisms(&c2()).len(), 2);
        assert_eq!(automorphisms(&Shape::eta()).len(), 1);
        assert_eq!(hom(&Shape::linear(1), &Shape::eta()).len(), 1);
    }

    #[test]
    fn carrier_errors_are_distinct() {
        let eta = Shape::eta();
        assert!(matches!(validate_carrier(&c2(), &eta, &[0, 0]), Err(DendroError::MalformedCarrier(_))));
        assert!(matches!(validate_carrier(&c2(), &eta, &[0, 0, 3]), Err(DendroError::MalformedCarrier(_))));
        assert!(!validate_carrier(&c2(), &eta, &[0, 0, 0]).unwrap());
        assert!(validate_carrier(&Shape::linear(1), &eta, &[0, 0]).unwrap());
    }

    #[test]
    fn stump_classification() {
        let f = Morphism::new(Shape::eta(), Shape::corolla(0), &[0]).unwrap();
        assert_eq!(f.class(), MorClass::Face);
    }

    #[test]
    fn elementary_face_counts() {
        assert!(elementary_faces(&Shape::eta()).is_empty());
        assert_eq!(elementary_faces(&c2()).len(), 3);
        assert_eq!(elementary_faces(&Shape::corolla(0)).len(), 1);
        assert_eq!(elementary_faces(&Shape::linear(2)).len(), 3);
        assert_eq!(elementary_degeneracies(&Shape::linear(2)).len(), 2);
        assert!(elementary_degeneracies(&c2()).is_empty());
    }

    #[test]
    fn sections_of_elementary_degeneracy() {
        let s = &elementary_degeneracies(&Shape::linear(1))[0];
        assert_eq!(sections_of(s).unwrap().len(), 2);
        let l2 = Shape::linear(2);
        let s = &degeneracies(&l2, &Shape::eta())[0];
        assert_eq!(sections_of(s).unwrap().len(), hom(&Shape::eta(), &l2).len());
    }

    #[test]
    fn factorize_composite() {
        let l2 = Shape::linear(2);
        let sigma = &elementary_degeneracies(&l2)[0];
        let t = Shape::from_code("((||))").unwrap();
        let face = hom(&Shape::linear(1), &t).iter().find(|m| m.class() == MorClass::Face).unwrap().clone();
        let f = face.after(sigma);
        let (a, b) = factorize(&f);
        assert_eq!(b.after(&a), f);
        assert!(a.is_minus() && b.is_plus());
        assert_eq!(a.target(), &Shape::linear(1));
    }
}
