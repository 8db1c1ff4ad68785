use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::lexer::{tokenize, Pos, Tok};
use super::Document;
use crate::error::{DendroError, Result};
use crate::glue::GluingDiagram;
use crate::homotopy::Horn;
use crate::presheaf::{Element, FinitePresheaf, Generator, PresheafMap};
use crate::site::omega::elementary_faces;
use crate::site::tree::{Edge, EdgeSet, Tree, Vertex};
use crate::site::{Morphism, Shape};

/// A shape together with the names of its edges, in the order of the shape's edges.
struct Named {
    shape: Shape,
    edges: Vec<String>,
}

impl Named {
    fn canonical(shape: Shape) -> Named {
        let edges = (0..shape.n_edges()).map(|i| format!("e{i}")).collect();
        Named { shape, edges }
    }

    fn edge(&self, name: &str, pos: Pos) -> Result<Edge> {
        self.edges
            .iter()
            .position(|e| e == name)
            .map(|i| i as Edge)
            .ok_or_else(|| pos.err(format!("{name} is not an edge of {}", self.shape)))
    }
}

struct RawElement {
    name: String,
    carrier: Option<Vec<Edge>>,
    pos: Pos,
}

struct RawGenerator {
    name: String,
    shape: Shape,
    stab: Vec<(Vec<Edge>, Pos)>,
    faces: Vec<RawElement>,
    faces_pos: Pos,
}

pub struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    shapes: HashMap<String, Named>,
    presheaves: HashMap<String, Arc<FinitePresheaf>>,
    maps: HashMap<String, PresheafMap>,
    doc: Document,
}

fn lift<T>(pos: Pos, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        DendroError::Parse { .. } => e,
        other => pos.err(other.to_string()),
    })
}

impl Parser {
    pub fn new(src: &str) -> Result<Parser> {
        Ok(Parser {
            toks: tokenize(src)?,
            at: 0,
            shapes: HashMap::new(),
            presheaves: HashMap::new(),
            maps: HashMap::new(),
            doc: Document::default(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if t.0 != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Word(w) => format!("'{w}'"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Punct(c) => format!("'{c}'"),
            Tok::Arrow => "'->'".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<Pos> {
        let (t, pos) = self.bump();
        if t == Tok::Punct(c) {
            Ok(pos)
        } else {
            Err(pos.err(format!("expected '{c}', found {}", Self::describe(&t))))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Punct(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn arrow(&mut self) -> Result<()> {
        let (t, pos) = self.bump();
        if t == Tok::Arrow {
            Ok(())
        } else {
            Err(pos.err(format!("expected '->', found {}", Self::describe(&t))))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Pos> {
        let (t, pos) = self.bump();
        match t {
            Tok::Word(w) if w == kw => Ok(pos),
            t => Err(pos.err(format!("expected '{kw}', found {}", Self::describe(&t)))),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w == kw)
    }

    fn name(&mut self) -> Result<(String, Pos)> {
        let (t, pos) = self.bump();
        match t {
            Tok::Word(w) | Tok::Str(w) => Ok((w, pos)),
            t => Err(pos.err(format!("expected a name, found {}", Self::describe(&t)))),
        }
    }

    fn int(&mut self) -> Result<Edge> {
        let (t, pos) = self.bump();
        match &t {
            Tok::Word(w) => w.parse().map_err(|_| pos.err(format!("expected an edge index, found '{w}'"))),
            t => Err(pos.err(format!("expected an edge index, found {}", Self::describe(t)))),
        }
    }

    /// `[a, b, ...]` of items parsed by `item`.
    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn carrier(&mut self) -> Result<Vec<Edge>> {
        self.list(|p| p.int())
    }

    pub fn document(mut self) -> Result<Document> {
        loop {
            let (t, pos) = self.bump();
            match t {
                Tok::Eof => return Ok(self.doc),
                Tok::Word(w) => match w.as_str() {
                    "shape" => self.shape_decl()?,
                    "tree" => {
                        let named = self.tree_body()?;
                        self.doc.trees.push(named.shape);
                    }
                    "map" => {
                        let m = self.map_body()?;
                        self.doc.morphisms.push(m);
                    }
                    "presheaf" => self.presheaf()?,
                    "hom" => self.hom()?,
                    "diagram" => self.diagram()?,
                    "horn" => self.horn()?,
                    _ => return Err(pos.err(format!("unknown item '{w}'"))),
                },
                t => return Err(pos.err(format!("expected an item, found {}", Self::describe(&t)))),
            }
            self.eat(';');
        }
    }

    fn shape_decl(&mut self) -> Result<()> {
        let (name, pos) = self.name()?;
        if self.shapes.contains_key(&name) {
            return Err(pos.err(format!("shape {name} is declared twice")));
        }
        self.expect('=')?;
        let named = self.shape_ref()?;
        self.shapes.insert(name, named);
        Ok(())
    }

    fn shape_ref(&mut self) -> Result<Named> {
        if self.is_keyword("tree") {
            self.bump();
            return self.tree_body();
        }
        let (name, pos) = self.name()?;
        if let Some(n) = self.shapes.get(&name) {
            return Ok(Named { shape: n.shape.clone(), edges: n.edges.clone() });
        }
        lift(pos, Shape::parse(&name)).map(Named::canonical)
    }

    fn tree_body(&mut self) -> Result<Named> {
        let start = self.expect('{')?;
        self.keyword("edges")?;
        self.expect(':')?;
        let mut edges: Vec<String> = Vec::new();
        for (e, pos) in self.list(|p| p.name())? {
            if edges.contains(&e) {
                return Err(pos.err(format!("duplicate edge id {e}")));
            }
            edges.push(e);
        }
        self.expect(';')?;
        let lookup = |e: &str, pos: Pos, edges: &[String]| {
            edges.iter().position(|x| x == e).map(|i| i as Edge).ok_or_else(|| pos.err(format!("unknown edge {e}")))
        };
        self.keyword("root")?;
        self.expect(':')?;
        let (r, rpos) = self.name()?;
        let root = lookup(&r, rpos, &edges)?;
        self.eat(';');
        let mut vertices = Vec::new();
        let mut vnames = HashSet::new();
        while self.is_keyword("vertex") {
            self.bump();
            let (v, vpos) = self.name()?;
            if !vnames.insert(v.clone()) {
                return Err(vpos.err(format!("duplicate vertex id {v}")));
            }
            self.expect('{')?;
            self.keyword("in")?;
            self.expect(':')?;
            let mut inputs = EdgeSet::new();
            for (e, pos) in self.list(|p| p.name())? {
                inputs.push(lookup(&e, pos, &edges)?);
            }
            self.expect(';')?;
            self.keyword("out")?;
            self.expect(':')?;
            let (o, opos) = self.name()?;
            let out = lookup(&o, opos, &edges)?;
            self.eat(';');
            self.expect('}')?;
            self.eat(';');
            vertices.push(Vertex::new(inputs, out));
        }
        self.expect('}')?;
        let tree = lift(start, Tree::new(edges.len(), root, vertices))?;
        let (shape, relabel) = Shape::from_tree(&tree);
        let mut names = vec![String::new(); edges.len()];
        for (i, e) in edges.into_iter().enumerate() {
            names[relabel[i] as usize] = e;
        }
        Ok(Named { shape, edges: names })
    }

    fn map_body(&mut self) -> Result<Morphism> {
        let start = self.expect('{')?;
        self.keyword("src")?;
        self.expect(':')?;
        let src = self.shape_ref()?;
        self.expect(';')?;
        self.keyword("dst")?;
        self.expect(':')?;
        let dst = self.shape_ref()?;
        self.expect(';')?;
        self.keyword("edges")?;
        self.expect(':')?;
        self.expect('{')?;
        let mut carrier: Vec<Option<Edge>> = vec![None; src.shape.n_edges()];
        if !self.eat('}') {
            loop {
                let (a, apos) = self.name()?;
                self.arrow()?;
                let (b, bpos) = self.name()?;
                let i = src.edge(&a, apos)? as usize;
                if carrier[i].is_some() {
                    return Err(apos.err(format!("edge {a} is assigned twice")));
                }
                carrier[i] = Some(dst.edge(&b, bpos)?);
                if self.eat('}') {
                    break;
                }
                self.expect(',')?;
            }
        }
        self.eat(';');
        self.expect('}')?;
        let carrier: Vec<Edge> = carrier
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| start.err(format!("edge {} is not assigned", src.edges[i]))))
            .collect::<Result<_>>()?;
        lift(start, Morphism::new(src.shape, dst.shape, &carrier))
    }

    fn element(&mut self) -> Result<RawElement> {
        let (name, pos) = self.name()?;
        let carrier = if *self.peek() == Tok::Punct('[') { Some(self.carrier()?) } else { None };
        Ok(RawElement { name, carrier, pos })
    }

    fn resolve(x: &FinitePresheaf, index: &HashMap<String, usize>, level: &Shape, raw: &RawElement) -> Result<Element> {
        let g = *index.get(&raw.name).ok_or_else(|| raw.pos.err(format!("unknown generator {}", raw.name)))?;
        let shape = &x.generator(g).shape;
        resolve_with(shape, level, raw).and_then(|deg| lift(raw.pos, x.element(g, deg)))
    }

    fn presheaf(&mut self) -> Result<()> {
        let (name, pos) = self.name()?;
        if self.presheaves.contains_key(&name) {
            return Err(pos.err(format!("presheaf {name} is declared twice")));
        }
        self.expect('{')?;
        let mut raws: Vec<RawGenerator> = Vec::new();
        let mut index = HashMap::new();
        while !self.eat('}') {
            self.keyword("gen")?;
            let (gname, gpos) = self.name()?;
            if index.insert(gname.clone(), raws.len()).is_some() {
                return Err(gpos.err(format!("duplicate generator {gname}")));
            }
            self.expect(':')?;
            let shape = self.shape_ref()?.shape;
            let mut stab = Vec::new();
            if self.is_keyword("stab") {
                self.bump();
                stab = self.list(|p| {
                    let pos = p.pos();
                    Ok((p.carrier()?, pos))
                })?;
            }
            let faces_pos = self.pos();
            let mut faces = Vec::new();
            if self.is_keyword("faces") {
                self.bump();
                faces = self.list(|p| p.element())?;
            }
            self.expect(';')?;
            raws.push(RawGenerator { name: gname, shape, stab, faces, faces_pos });
        }
        let shapes: Vec<Shape> = raws.iter().map(|r| r.shape.clone()).collect();
        let mut gens = Vec::with_capacity(raws.len());
        for r in &raws {
            let elementary = elementary_faces(&r.shape);
            if elementary.len() != r.faces.len() {
                return Err(r.faces_pos.err(format!(
                    "generator {} has {} face values, its shape {} has {} faces",
                    r.name,
                    r.faces.len(),
                    r.shape,
                    elementary.len()
                )));
            }
            let mut faces = Vec::new();
            for (d, raw) in elementary.iter().zip(&r.faces) {
                let g = *index.get(&raw.name).ok_or_else(|| raw.pos.err(format!("unknown generator {}", raw.name)))?;
                let deg = resolve_with(&shapes[g], d.source(), raw)?;
                if !deg.is_minus() {
                    return Err(raw.pos.err(format!("{deg:?} is not a degeneracy")));
                }
                faces.push(Element::raw(g, deg));
            }
            let mut gen = Generator::new(r.name.clone(), r.shape.clone(), faces);
            for (c, cpos) in &r.stab {
                gen.stabilizer.push(lift(*cpos, Morphism::new(r.shape.clone(), r.shape.clone(), c))?);
            }
            gens.push(gen);
        }
        let x = Arc::new(lift(pos, FinitePresheaf::new(name.clone(), gens))?);
        self.presheaves.insert(name, x.clone());
        self.doc.presheaves.push(x);
        Ok(())
    }

    fn presheaf_ref(&mut self) -> Result<Arc<FinitePresheaf>> {
        let (name, pos) = self.name()?;
        self.presheaves.get(&name).cloned().ok_or_else(|| pos.err(format!("unknown presheaf {name}")))
    }

    fn hom(&mut self) -> Result<()> {
        let (name, pos) = self.name()?;
        if self.maps.contains_key(&name) {
            return Err(pos.err(format!("map {name} is declared twice")));
        }
        self.expect(':')?;
        let source = self.presheaf_ref()?;
        self.arrow()?;
        let target = self.presheaf_ref()?;
        self.expect('{')?;
        let src_index: HashMap<String, usize> = (0..source.len()).map(|g| (source.generator(g).name.clone(), g)).collect();
        let tgt_index: HashMap<String, usize> = (0..target.len()).map(|g| (target.generator(g).name.clone(), g)).collect();
        let mut assign: Vec<Option<Element>> = vec![None; source.len()];
        while !self.eat('}') {
            let (g, gpos) = self.name()?;
            let i = *src_index.get(&g).ok_or_else(|| gpos.err(format!("{g} is not a generator of {}", source.name())))?;
            if assign[i].is_some() {
                return Err(gpos.err(format!("{g} is assigned twice")));
            }
            self.arrow()?;
            let raw = self.element()?;
            assign[i] = Some(Self::resolve(&target, &tgt_index, &source.generator(i).shape, &raw)?);
            self.expect(';')?;
        }
        let assign: Vec<Element> = assign
            .into_iter()
            .enumerate()
            .map(|(i, e)| e.ok_or_else(|| pos.err(format!("{} is not assigned", source.generator(i).name))))
            .collect::<Result<_>>()?;
        let m = lift(pos, PresheafMap::new(source, target, assign))?;
        self.maps.insert(name.clone(), m.clone());
        self.doc.maps.push((name, m));
        Ok(())
    }

    fn horn(&mut self) -> Result<()> {
        let pos = self.pos();
        let shape = self.shape_ref()?.shape;
        let mut omit = Vec::new();
        if self.is_keyword("omit") {
            self.bump();
            omit = self.list(|p| p.int().map(usize::from))?;
        }
        let n = elementary_faces(&shape).len();
        if let Some(k) = omit.iter().find(|&&k| k >= n) {
            return Err(pos.err(format!("{shape} has {n} elementary faces, cannot omit face {k}")));
        }
        omit.sort_unstable();
        omit.dedup();
        self.doc.horns.push(Horn { shape, omit });
        Ok(())
    }

    fn diagram(&mut self) -> Result<()> {
        let (name, pos) = self.name()?;
        self.expect('{')?;
        let keys = ["f", "g", "p0", "p1", "p2", "u1", "u2"];
        let mut legs: [Option<PresheafMap>; 7] = Default::default();
        while !self.eat('}') {
            let (k, kpos) = self.name()?;
            let i = keys.iter().position(|x| *x == k).ok_or_else(|| kpos.err(format!("unknown diagram entry {k}")))?;
            if legs[i].is_some() {
                return Err(kpos.err(format!("{k} is given twice")));
            }
            self.expect(':')?;
            let (m, mpos) = self.name()?;
            legs[i] = Some(self.maps.get(&m).cloned().ok_or_else(|| mpos.err(format!("unknown map {m}")))?);
            self.expect(';')?;
        }
        let mut it = legs.into_iter().zip(keys).map(|(m, k)| m.ok_or_else(|| pos.err(format!("diagram {name} lacks {k}"))));
        let mut next = || it.next().expect("seven legs");
        let (f, g, p0, p1, p2, u1, u2) = (next()?, next()?, next()?, next()?, next()?, next()?, next()?);
        let d = lift(pos, GluingDiagram::new(f, g, p0, p1, p2, u1, u2))?;
        self.doc.diagrams.push((name, d));
        Ok(())
    }
}

fn resolve_with(shape: &Shape, level: &Shape, raw: &RawElement) -> Result<Morphism> {
    match &raw.carrier {
        None if level == shape => Ok(Morphism::identity(shape)),
        None => Err(raw.pos.err(format!("{} has shape {shape} but is used at level {level}", raw.name))),
        Some(c) => lift(raw.pos, Morphism::new(level.clone(), shape.clone(), c)),
    }
}
