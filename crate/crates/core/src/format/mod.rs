//! The text format for trees, tree morphisms, presheaves, maps and gluing diagrams.
//!
//! A document is a sequence of items:
//!
//! ```text
//! shape T = tree { edges: [a,b,c]; root: a; vertex v { in: [b,c]; out: a } };
//! map { src: eta; dst: T; edges: { e0->b } }
//! presheaf X {
//!   gen x : eta;
//!   gen y : eta;
//!   gen f : L1 faces [y, x];
//!   gen c : C2 stab [[0,2,1]] faces [f, f, x[0]];
//! }
//! hom p : X -> Y { x -> pt; y -> pt; f -> pt[0,0]; c -> pt[0,0,0]; }
//! diagram D { f: a; g: b; p0: c; p1: d; p2: e; u1: h; u2: k; }
//! horn L2 omit [1];
//! ```
//!
//! Names are bare words (`[A-Za-z0-9_.]+`) or double-quoted strings; `#` starts a
//! comment. A shape reference is a declared shape, `eta`, `C<n>`, `L<n>`, a quoted
//! structural code such as `"((|)|)"`, or an inline tree. Built-in shapes have edges
//! `e0, e1, ...` in canonical order.
//!
//! Face tables list the values on the elementary faces of the generator's shape,
//! in canonical face order. An element is a generator name, followed for degenerate
//! or twisted elements by the carrier of its degeneracy: entry `i` is the image of
//! edge `i` of the level in the generator's canonical shape. `stab` lists
//! automorphisms fixing the generator, by carrier. A `horn` item names the
//! subobject of a representable spanned by all elementary faces but the omitted
//! ones; a file of horns is a custom lifting family. Items may only refer to items
//! declared before them. Duplicate ids are rejected.

mod emit;
mod lexer;
mod parse;

use crate::error::{DendroError, Result};
use crate::glue::GluingDiagram;
use crate::homotopy::Horn;
use crate::presheaf::{FinitePresheaf, PresheafMap};
use crate::site::{Morphism, Shape};
use std::sync::Arc;

pub use emit::{emit_diagram, emit_map, emit_morphism, emit_presheaf, emit_tree, Writer};

/// Everything declared in a document, in order.
#[derive(Default)]
pub struct Document {
    pub trees: Vec<Shape>,
    pub morphisms: Vec<Morphism>,
    pub presheaves: Vec<Arc<FinitePresheaf>>,
    pub maps: Vec<(String, PresheafMap)>,
    pub diagrams: Vec<(String, GluingDiagram)>,
    pub horns: Vec<Horn>,
}

pub fn parse(src: &str) -> Result<Document> {
    parse::Parser::new(src)?.document()
}

fn missing(what: &str) -> DendroError {
    DendroError::Parse { line: 1, col: 1, msg: format!("the document declares no {what}") }
}

impl Document {
    /// The last map declared.
    pub fn last_map(&self) -> Result<&PresheafMap> {
        self.maps.last().map(|(_, m)| m).ok_or_else(|| missing("map"))
    }

    pub fn last_presheaf(&self) -> Result<&Arc<FinitePresheaf>> {
        self.presheaves.last().ok_or_else(|| missing("presheaf"))
    }

    pub fn last_diagram(&self) -> Result<&GluingDiagram> {
        self.diagrams.last().map(|(_, d)| d).ok_or_else(|| missing("diagram"))
    }
}
