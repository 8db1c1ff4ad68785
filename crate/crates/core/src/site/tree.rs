//! Finite rooted trees and their interned canonical shapes.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock, RwLock};

use smallvec::SmallVec;

use crate::error::{DendroError, Result};
use crate::site::omega::Morphism;

/// Edge identifier inside a single tree.
pub type Edge = u8;

/// Sorted list of edges, used for vertex inputs and leaf sets.
pub type EdgeSet = SmallVec<[Edge; 4]>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub inputs: EdgeSet,
    pub output: Edge,
}

impl Vertex {
    pub fn new(mut inputs: EdgeSet, output: Edge) -> Self {
        inputs.sort_unstable();
        Vertex { inputs, output }
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }
}

/// A finite rooted tree. Edges are `0..n_edges`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree {
    n_edges: usize,
    root: Edge,
    vertices: Vec<Vertex>,
    producer: Vec<Option<u8>>,
    consumer: Vec<Option<u8>>,
}

impl Tree {
    pub fn new(n_edges: usize, root: Edge, vertices: Vec<Vertex>) -> Result<Tree> {
        let bad = |m: String| Err(DendroError::MalformedTree(m));
        if n_edges == 0 {
            return bad("a tree needs at least one edge".into());
        }
        if n_edges > 200 {
            return bad(format!("{n_edges} edges is beyond the supported size"));
        }
        if root as usize >= n_edges {
            return bad(format!("root {root} is not an edge"));
        }
        let mut producer = vec![None; n_edges];
        let mut consumer = vec![None; n_edges];
        for (vi, v) in vertices.iter().enumerate() {
            for w in v.inputs.windows(2) {
                if w[0] == w[1] {
                    return bad(format!("vertex {vi} lists input {} twice", w[0]));
                }
            }
            if v.output as usize >= n_edges || v.inputs.iter().any(|&e| e as usize >= n_edges) {
                return bad(format!("vertex {vi} refers to an unknown edge"));
            }
            if producer[v.output as usize].replace(vi as u8).is_some() {
                return bad(format!("edge {} is the output of two vertices", v.output));
            }
            for &e in &v.inputs {
                if consumer[e as usize].replace(vi as u8).is_some() {
                    return bad(format!("edge {e} is an input of two vertices"));
                }
            }
        }
        if consumer[root as usize].is_some() {
            return bad("the root is an input of a vertex".into());
        }
        let mut seen = vec![false; n_edges];
        let mut stack = vec![root];
        let mut count = 0;
        while let Some(e) = stack.pop() {
            if std::mem::replace(&mut seen[e as usize], true) {
                return bad("the incidence graph has a cycle".into());
            }
            count += 1;
            if let Some(v) = producer[e as usize] {
                stack.extend(vertices[v as usize].inputs.iter().copied());
            }
        }
        if count != n_edges {
            return bad("the incidence graph is not connected".into());
        }
        Ok(Tree { n_edges, root, vertices, producer, consumer })
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn root(&self) -> Edge {
        self.root
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn degree(&self) -> usize {
        self.vertices.len()
    }

    pub fn producer(&self, e: Edge) -> Option<usize> {
        self.producer[e as usize].map(usize::from)
    }

    pub fn consumer(&self, e: Edge) -> Option<usize> {
        self.consumer[e as usize].map(usize::from)
    }

    pub fn is_leaf(&self, e: Edge) -> bool {
        self.producer[e as usize].is_none()
    }

    pub fn is_inner(&self, e: Edge) -> bool {
        self.producer[e as usize].is_some() && self.consumer[e as usize].is_some()
    }

    pub fn leaves(&self) -> Vec<Edge> {
        (0..self.n_edges as Edge).filter(|&e| self.is_leaf(e)).collect()
    }

    pub fn arities(&self) -> BTreeSet<usize> {
        self.vertices.iter().map(Vertex::arity).collect()
    }

    pub fn is_linear(&self) -> bool {
        self.vertices.iter().all(|v| v.arity() == 1)
    }

    /// Structural code of the subtree above `e`: `|` for a leaf, `(..)` for a vertex.
    pub fn code_at(&self, e: Edge) -> String {
        let mut memo = vec![None; self.n_edges];
        self.code_memo(e, &mut memo)
    }

    fn code_memo(&self, e: Edge, memo: &mut Vec<Option<String>>) -> String {
        if let Some(c) = &memo[e as usize] {
            return c.clone();
        }
        let code = match self.producer(e) {
            None => "|".to_string(),
            Some(v) => {
                let mut kids: Vec<String> =
                    self.vertices[v].inputs.iter().map(|&i| self.code_memo(i, memo)).collect();
                kids.sort();
                format!("({})", kids.concat())
            }
        };
        memo[e as usize] = Some(code.clone());
        code
    }

    /// Canonical relabelling: preorder from the root, children ordered by code.
    /// Returns the relabelled tree, the map old edge -> new edge, and the code.
    pub fn canonical(&self) -> (Tree, Vec<Edge>, String) {
        let mut memo = vec![None; self.n_edges];
        let code = self.code_memo(self.root, &mut memo);
        let mut relabel = vec![0 as Edge; self.n_edges];
        let mut next: Edge = 0;
        let mut stack = vec![self.root];
        while let Some(e) = stack.pop() {
            relabel[e as usize] = next;
            next += 1;
            if let Some(v) = self.producer(e) {
                let mut kids: Vec<(String, Edge)> = self.vertices[v]
                    .inputs
                    .iter()
                    .map(|&i| (memo[i as usize].clone().unwrap_or_default(), i))
                    .collect();
                kids.sort();
                stack.extend(kids.into_iter().rev().map(|(_, i)| i));
            }
        }
        let mut vertices: Vec<Vertex> = self
            .vertices
            .iter()
            .map(|v| {
                Vertex::new(v.inputs.iter().map(|&i| relabel[i as usize]).collect(), relabel[v.output as usize])
            })
            .collect();
        vertices.sort_by_key(|v| v.output);
        let tree = Tree::new(self.n_edges, 0, vertices).expect("relabelling preserves validity");
        (tree, relabel, code)
    }

    /// Builds a canonical tree from a structural code such as `((||)|)`.
    pub fn from_code(code: &str) -> Result<Tree> {
        let bytes = code.as_bytes();
        let mut pos = 0;
        let mut vertices = Vec::new();
        let mut n_edges = 0usize;
        fn parse(
            b: &[u8],
            pos: &mut usize,
            edge: Edge,
            n: &mut usize,
            vs: &mut Vec<Vertex>,
        ) -> std::result::Result<(), String> {
            match b.get(*pos) {
                Some(b'|') => {
                    *pos += 1;
                    Ok(())
                }
                Some(b'(') => {
                    *pos += 1;
                    let mut inputs = EdgeSet::new();
                    while b.get(*pos) != Some(&b')') {
                        if *pos >= b.len() {
                            return Err("unterminated vertex".into());
                        }
                        let e = *n as Edge;
                        *n += 1;
                        inputs.push(e);
                        parse(b, pos, e, n, vs)?;
                    }
                    *pos += 1;
                    vs.push(Vertex::new(inputs, edge));
                    Ok(())
                }
                _ => Err(format!("unexpected character at offset {}", *pos)),
            }
        }
        n_edges += 1;
        parse(bytes, &mut pos, 0, &mut n_edges, &mut vertices).map_err(DendroError::MalformedTree)?;
        if pos != bytes.len() {
            return Err(DendroError::MalformedTree(format!("trailing input in tree code {code:?}")));
        }
        Tree::new(n_edges, 0, vertices).map(|t| t.canonical().0)
    }
}

/// Interned canonical tree. Equality is pointer identity.
#[derive(Clone)]
pub struct Shape(Arc<ShapeData>);

pub struct ShapeData {
    tree: Tree,
    code: String,
    ops: Vec<Vec<EdgeSet>>,
    op_set: HashSet<(Edge, EdgeSet)>,
    pub(crate) automorphisms: OnceLock<Arc<Vec<Morphism>>>,
    pub(crate) elementary_faces: OnceLock<Arc<Vec<Morphism>>>,
    pub(crate) elementary_degeneracies: OnceLock<Arc<Vec<Morphism>>>,
    pub(crate) proper_faces: OnceLock<Arc<Vec<Morphism>>>,
    pub(crate) homs: RwLock<HashMap<Shape, Arc<Vec<Morphism>>>>,
}

fn interner() -> &'static RwLock<HashMap<String, Shape>> {
    static INTERNER: OnceLock<RwLock<HashMap<String, Shape>>> = OnceLock::new();
    INTERNER.get_or_init(Default::default)
}

impl Shape {
    /// Interns the canonical form of `tree`; returns the shape and the map from
    /// `tree`'s edges to the shape's edges.
    pub fn from_tree(tree: &Tree) -> (Shape, Vec<Edge>) {
        let (canon, relabel, code) = tree.canonical();
        if let Some(s) = interner().read().unwrap().get(&code) {
            return (s.clone(), relabel);
        }
        let mut table = interner().write().unwrap();
        let shape = table.entry(code.clone()).or_insert_with(|| Shape::build(canon, code)).clone();
        (shape, relabel)
    }

    pub fn of(tree: &Tree) -> Shape {
        Shape::from_tree(tree).0
    }

    pub fn from_code(code: &str) -> Result<Shape> {
        Tree::from_code(code).map(|t| Shape::of(&t))
    }

    fn build(tree: Tree, code: String) -> Shape {
        let n = tree.n_edges();
        let mut ops: Vec<Vec<EdgeSet>> = vec![Vec::new(); n];
        for e in (0..n as Edge).rev() {
            let mut here: BTreeSet<EdgeSet> = BTreeSet::new();
            here.insert(SmallVec::from_slice(&[e]));
            if let Some(v) = tree.producer(e) {
                let mut acc: Vec<EdgeSet> = vec![EdgeSet::new()];
                for &i in &tree.vertices()[v].inputs {
                    let mut next = Vec::new();
                    for a in &acc {
                        for o in &ops[i as usize] {
                            let mut s = a.clone();
                            s.extend(o.iter().copied());
                            next.push(s);
                        }
                    }
                    acc = next;
                }
                for mut s in acc {
                    s.sort_unstable();
                    here.insert(s);
                }
            }
            ops[e as usize] = here.into_iter().collect();
        }
        let op_set =
            ops.iter().enumerate().flat_map(|(e, l)| l.iter().map(move |s| (e as Edge, s.clone()))).collect();
        Shape(Arc::new(ShapeData {
            tree,
            code,
            ops,
            op_set,
            automorphisms: OnceLock::new(),
            elementary_faces: OnceLock::new(),
            elementary_degeneracies: OnceLock::new(),
            proper_faces: OnceLock::new(),
            homs: RwLock::new(HashMap::new()),
        }))
    }

    pub fn eta() -> Shape {
        Shape::from_code("|").expect("valid code")
    }

    pub fn corolla(n: usize) -> Shape {
        Shape::from_code(&format!("({})", "|".repeat(n))).expect("valid code")
    }

    /// The linear tree with `n` unary vertices (the simplex `[n]`).
    pub fn linear(n: usize) -> Shape {
        Shape::from_code(&format!("{}|{}", "(".repeat(n), ")".repeat(n))).expect("valid code")
    }

    /// Parses a short name (`eta`, `C<n>`, `L<n>`) or a structural code.
    pub fn parse(s: &str) -> Result<Shape> {
        let s = s.trim();
        let num = |r: &str| r.parse::<usize>().map_err(|_| DendroError::MalformedTree(format!("bad shape name {s:?}")));
        if s == "eta" {
            Ok(Shape::eta())
        } else if let Some(r) = s.strip_prefix('C') {
            Ok(Shape::corolla(num(r)?))
        } else if let Some(r) = s.strip_prefix('L') {
            Ok(Shape::linear(num(r)?))
        } else {
            Shape::from_code(s)
        }
    }

    pub fn tree(&self) -> &Tree {
        &self.0.tree
    }

    pub(crate) fn data(&self) -> &ShapeData {
        &self.0
    }

    pub fn code(&self) -> &str {
        &self.0.code
    }

    pub fn degree(&self) -> usize {
        self.0.tree.degree()
    }

    pub fn n_edges(&self) -> usize {
        self.0.tree.n_edges()
    }

    pub fn is_linear(&self) -> bool {
        self.0.tree.is_linear()
    }

    /// Leaf sets of the subtrees rooted at `e`, including `{e}` itself.
    pub fn ops_at(&self, e: Edge) -> &[EdgeSet] {
        &self.0.ops[e as usize]
    }

    pub fn has_op(&self, out: Edge, leaves: &EdgeSet) -> bool {
        self.0.op_set.contains(&(out, leaves.clone()))
    }

    fn key(&self) -> (usize, usize, &str) {
        (self.degree(), self.n_edges(), self.code())
    }

    /// A short human name: `eta`, `C<n>`, `L<n>`, or the structural code.
    pub fn name(&self) -> String {
        let t = self.tree();
        if t.degree() == 0 {
            "eta".into()
        } else if t.degree() == 1 {
            format!("C{}", t.vertices()[0].arity())
        } else if t.is_linear() {
            format!("L{}", t.degree())
        } else {
            self.code().to_string()
        }
    }
}

impl PartialEq for Shape {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for Shape {}

impl Hash for Shape {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::ptr::hash(Arc::as_ptr(&self.0), state)
    }
}

impl Ord for Shape {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if self == other {
            return std::cmp::Ordering::Equal;
        }
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Shape {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Which vertex arities may appear when enumerating trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arities(BTreeSet<usize>);

impl Arities {
    pub fn up_to(cap: usize) -> Self {
        Arities((0..=cap).collect())
    }

    pub fn from_set(set: impl IntoIterator<Item = usize>) -> Self {
        Arities(set.into_iter().collect())
    }

    pub fn linear() -> Self {
        Arities::from_set([1])
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0.contains(&k)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn with(mut self, k: usize) -> Self {
        self.0.insert(k);
        self
    }

    pub fn union(&self, other: &Arities) -> Self {
        Arities(self.0.union(&other.0).copied().collect())
    }

    pub fn cap(&self) -> usize {
        self.0.iter().next_back().copied().unwrap_or(0)
    }
}

/// All canonical trees of degree at most `max_degree` whose vertex arities lie in
/// `arities`, ordered by (degree, edge count, code).
pub fn trees_up_to(max_degree: usize, arities: &Arities) -> Vec<Shape> {
    // codes[n] = codes of edge-rooted subtrees with exactly n vertices.
    let mut codes: Vec<Vec<String>> = vec![vec!["|".to_string()]];
    for n in 1..=max_degree {
        let mut level = BTreeSet::new();
        for k in arities.iter() {
            for kids in multisets(&codes, k, n - 1) {
                let mut kids = kids;
                kids.sort();
                level.insert(format!("({})", kids.concat()));
            }
        }
        codes.push(level.into_iter().collect());
    }
    let mut out: Vec<Shape> =
        codes.iter().flatten().map(|c| Shape::from_code(c).expect("generated codes are valid")).collect();
    out.sort();
    out
}

/// Multisets of `k` subtree codes with a total of `total` vertices.
fn multisets(codes: &[Vec<String>], k: usize, total: usize) -> Vec<Vec<String>> {
    let flat: Vec<(usize, &String)> =
        codes.iter().enumerate().flat_map(|(n, l)| l.iter().map(move |c| (n, c))).collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec<'a>(
        flat: &[(usize, &'a String)],
        start: usize,
        k: usize,
        left: usize,
        cur: &mut Vec<&'a String>,
        out: &mut Vec<Vec<String>>,
    ) {
        if k == 0 {
            if left == 0 {
                out.push(cur.iter().map(|s| (*s).clone()).collect());
            }
            return;
        }
        for i in start..flat.len() {
            let (n, c) = flat[i];
            if n > left {
                continue;
            }
            cur.push(c);
            rec(flat, i, k - 1, left - n, cur, out);
            cur.pop();
        }
    }
    rec(&flat, 0, k, total, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_trees() {
        let v = |i: &[Edge], o| Vertex::new(SmallVec::from_slice(i), o);
        assert!(Tree::new(3, 0, vec![v(&[1, 2], 0)]).is_ok());
        assert!(Tree::new(3, 0, vec![v(&[1], 0)]).is_err());
        assert!(Tree::new(3, 0, vec![v(&[1, 2], 0), v(&[0], 1)]).is_err());
        assert!(Tree::new(2, 0, vec![v(&[1, 1], 0)]).is_err());
        assert!(Tree::new(2, 5, vec![]).is_err());
    }

    #[test]
    fn canonical_form_ignores_labels() {
        let v = |i: &[Edge], o| Vertex::new(SmallVec::from_slice(i), o);
        let a = Tree::new(4, 3, vec![v(&[0, 1], 2), v(&[2], 3)]).unwrap();
        let b = Tree::new(4, 0, vec![v(&[1], 0), v(&[2, 3], 1)]).unwrap();
        assert_eq!(Shape::of(&a), Shape::of(&b));
        assert_eq!(Shape::of(&a).code(), "((||))");
    }

    #[test]
    fn named_shapes() {
        assert_eq!(Shape::eta().n_edges(), 1);
        assert_eq!(Shape::corolla(0).n_edges(), 1);
        assert_eq!(Shape::corolla(0).degree(), 1);
        assert_eq!(Shape::linear(3).n_edges(), 4);
        assert_eq!(Shape::linear(1), Shape::corolla(1));
        assert_eq!(Shape::corolla(2).name(), "C2");
    }

    #[test]
    fn low_degree_enumeration() {
        let d0 = trees_up_to(0, &Arities::up_to(3));
        assert_eq!(d0, vec![Shape::eta()]);
        let d1 = trees_up_to(1, &Arities::up_to(3));
        let names: Vec<String> = d1.iter().map(Shape::name).collect();
        assert_eq!(names, ["eta", "C0", "C1", "C2", "C3"]);
    }

    #[test]
    fn ops_of_corolla() {
        let c2 = Shape::corolla(2);
        assert_eq!(c2.ops_at(0).len(), 2);
        assert!(c2.has_op(0, &SmallVec::from_slice(&[1, 2])));
        assert!(c2.has_op(0, &SmallVec::from_slice(&[0])));
        assert!(!c2.has_op(0, &SmallVec::from_slice(&[1])));
    }
}
