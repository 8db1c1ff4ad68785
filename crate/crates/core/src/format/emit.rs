use std::collections::HashMap;
use std::fmt::Write;
use std::sync::Arc;

use super::lexer::quote;
use crate::glue::GluingDiagram;
use crate::presheaf::{Element, FinitePresheaf, PresheafMap};
use crate::site::tree::Edge;
use crate::site::{Morphism, Shape};

fn edge_list(es: impl IntoIterator<Item = Edge>) -> String {
    es.into_iter().map(|e| format!("e{e}")).collect::<Vec<_>>().join(",")
}

/// The canonical tree of a shape, with edges `e0, e1, ...` in shape order.
pub fn emit_tree(s: &Shape) -> String {
    let t = s.tree();
    let mut out = format!("tree {{ edges: [{}]; root: e{}", edge_list(0..t.n_edges() as Edge), t.root());
    for (i, v) in t.vertices().iter().enumerate() {
        write!(out, "; vertex v{i} {{ in: [{}]; out: e{} }}", edge_list(v.inputs.iter().copied()), v.output).unwrap();
    }
    out.push_str(" }");
    out
}

pub fn emit_morphism(f: &Morphism) -> String {
    let edges: Vec<String> = f.carrier().iter().enumerate().map(|(i, c)| format!("e{i}->e{c}")).collect();
    format!("map {{ src: {}; dst: {}; edges: {{ {} }} }}", emit_tree(f.source()), emit_tree(f.target()), edges.join(", "))
}

fn carrier(c: &[Edge]) -> String {
    format!("[{}]", c.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
}

fn element(x: &FinitePresheaf, e: &Element) -> String {
    let name = quote(&x.generator(e.generator()).name);
    if e.degeneracy().is_identity() {
        name
    } else {
        format!("{name}{}", carrier(e.degeneracy().carrier()))
    }
}

/// Accumulates presheaves, maps and diagrams into one document, writing each
/// presheaf once.
#[derive(Default)]
pub struct Writer {
    out: String,
    written: Vec<(Arc<FinitePresheaf>, String)>,
    taken: HashMap<String, usize>,
    maps: usize,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn finish(self) -> String {
        self.out
    }

    /// Writes `x` unless an equal presheaf was already written; returns its name in the document.
    pub fn presheaf(&mut self, x: &Arc<FinitePresheaf>) -> String {
        if let Some((_, n)) = self.written.iter().find(|(y, _)| Arc::ptr_eq(x, y) || **x == **y) {
            return n.clone();
        }
        let count = self.taken.entry(x.name().to_string()).or_insert(0);
        let name = if *count == 0 { x.name().to_string() } else { format!("{}#{count}", x.name()) };
        *count += 1;
        writeln!(self.out, "presheaf {} {{", quote(&name)).unwrap();
        for g in x.generators() {
            write!(self.out, "  gen {} : {}", quote(&g.name), quote(&g.shape.name())).unwrap();
            let stab: Vec<String> = g.stabilizer.iter().filter(|m| !m.is_identity()).map(|m| carrier(m.carrier())).collect();
            if !stab.is_empty() {
                write!(self.out, " stab [{}]", stab.join(", ")).unwrap();
            }
            if !g.faces.is_empty() {
                let faces: Vec<String> = g.faces.iter().map(|e| element(x, e)).collect();
                write!(self.out, " faces [{}]", faces.join(", ")).unwrap();
            }
            self.out.push_str(";\n");
        }
        self.out.push_str("}\n\n");
        self.written.push((x.clone(), name.clone()));
        name
    }

    /// Writes a map and both of its ends; returns the map's name.
    pub fn map(&mut self, name: Option<&str>, f: &PresheafMap) -> String {
        let s = self.presheaf(f.source());
        let t = self.presheaf(f.target());
        self.maps += 1;
        let name = name.map(str::to_string).unwrap_or_else(|| format!("m{}", self.maps));
        writeln!(self.out, "hom {} : {} -> {} {{", quote(&name), quote(&s), quote(&t)).unwrap();
        for (g, e) in f.source().generators().iter().zip(f.assignment()) {
            writeln!(self.out, "  {} -> {};", quote(&g.name), element(f.target(), e)).unwrap();
        }
        self.out.push_str("}\n\n");
        name
    }

    pub fn diagram(&mut self, name: &str, d: &GluingDiagram) {
        let legs = [("f", &d.f), ("g", &d.g), ("p0", &d.p0), ("p1", &d.p1), ("p2", &d.p2), ("u1", &d.u1), ("u2", &d.u2)];
        let names: Vec<String> = legs.iter().map(|(k, m)| self.map(Some(&format!("{name}.{k}")), m)).collect();
        writeln!(self.out, "diagram {} {{", quote(name)).unwrap();
        for ((k, _), n) in legs.iter().zip(names) {
            writeln!(self.out, "  {k}: {};", quote(&n)).unwrap();
        }
        self.out.push_str("}\n");
    }
}

pub fn emit_presheaf(x: &Arc<FinitePresheaf>) -> String {
    let mut w = Writer::new();
    w.presheaf(x);
    w.finish()
}

pub fn emit_map(name: &str, f: &PresheafMap) -> String {
    let mut w = Writer::new();
    w.map(Some(name), f);
    w.finish()
}

pub fn emit_diagram(name: &str, d: &GluingDiagram) -> String {
    let mut w = Writer::new();
    w.diagram(name, d);
    w.finish()
}
