use dendro::fixtures::{fixture, Fixture, NAMES};
use dendro::format::{emit_diagram, emit_map, emit_morphism, emit_presheaf, emit_tree, parse};
use dendro::presheaf::PresheafMap;
use dendro::site::omega::hom;
use dendro::site::tree::trees_up_to;
use dendro::site::Arities;
use dendro::DendroError;

fn same_map(a: &PresheafMap, b: &PresheafMap) -> bool {
    **a.source() == **b.source() && **a.target() == **b.target() && a.assignment() == b.assignment()
}

fn fixture_names() -> Vec<(String, Option<&'static str>)> {
    let mut out = Vec::new();
    for (name, _) in NAMES {
        if let Some(base) = name.strip_suffix(" <shape>") {
            for s in ["eta", "C0", "C2", "L2", "((|)|)"] {
                out.push((base.to_string(), Some(s)));
            }
        } else {
            out.push((name.to_string(), None));
        }
    }
    out
}

#[test]
fn fixtures_round_trip() {
    for (name, arg) in fixture_names() {
        match fixture(&name, arg, 2).unwrap() {
            Fixture::Presheaf(x) => {
                let text = emit_presheaf(&x);
                let doc = parse(&text).unwrap();
                assert_eq!(**doc.last_presheaf().unwrap(), *x, "{name}");
                assert_eq!(emit_presheaf(doc.last_presheaf().unwrap()), text);
            }
            Fixture::Map(f) => {
                let text = emit_map("p", &f);
                let doc = parse(&text).unwrap();
                assert!(same_map(doc.last_map().unwrap(), &f), "{name} {arg:?}");
                assert_eq!(emit_map("p", doc.last_map().unwrap()), text);
            }
            Fixture::Diagram(d) => {
                let text = emit_diagram("D", &d);
                let doc = parse(&text).unwrap();
                let e = doc.last_diagram().unwrap();
                for (a, b) in [(&d.f, &e.f), (&d.g, &e.g), (&d.p0, &e.p0), (&d.p1, &e.p1), (&d.p2, &e.p2), (&d.u1, &e.u1), (&d.u2, &e.u2)] {
                    assert!(same_map(a, b), "{name}");
                }
                assert_eq!(emit_diagram("D", e), text);
            }
        }
    }
}

#[test]
fn trees_and_morphisms_round_trip() {
    let shapes = trees_up_to(3, &Arities::up_to(3));
    for s in &shapes {
        let doc = parse(&emit_tree(s)).unwrap();
        assert_eq!(&doc.trees[0], s);
    }
    for s in shapes.iter().filter(|s| s.degree() <= 2) {
        for t in shapes.iter().filter(|t| t.degree() <= 2) {
            for f in hom(s, t).iter() {
                let doc = parse(&emit_morphism(f)).unwrap();
                assert_eq!(&doc.morphisms[0], f);
            }
        }
    }
}

#[test]
fn relabelled_trees_are_accepted() {
    let doc = parse(
        "shape T = tree { edges: [r, x, y]; root: r; vertex top { in: [y, x]; out: r } };
         shape S = tree { edges: [r, x, y]; root: r; vertex low { in: [y]; out: x } vertex top { in: [x]; out: r } };
         map { src: eta; dst: T; edges: { e0->y } }
         map { src: tree { edges: [a, b]; root: b; vertex w { in: [a]; out: b } }; dst: S; edges: { b->r, a->y } }",
    )
    .unwrap();
    assert_eq!(doc.morphisms.len(), 2);
    assert_eq!(doc.morphisms[0].target().name(), "C2");
    assert_eq!(doc.morphisms[1].target().name(), "L2");
    assert_eq!(doc.morphisms[1].carrier().len(), 2);
}

fn parse_error(src: &str) -> (usize, usize, String) {
    match parse(src) {
        Err(DendroError::Parse { line, col, msg }) => (line, col, msg),
        Err(e) => panic!("expected a parse error, got {e}"),
        Ok(_) => panic!("expected a parse error"),
    }
}

#[test]
fn errors_carry_positions() {
    let (line, col, msg) = parse_error("tree { edges: [e0,e1,e0]; root: e0 }");
    assert_eq!((line, col), (1, 22));
    assert!(msg.contains("duplicate edge"));
    let (line, _, msg) = parse_error("tree { edges: [e0,e1,e2]; root: e0;\n vertex v { in: [e1]; out: e0 }\n vertex v { in: [e2]; out: e1 } }");
    assert_eq!(line, 3);
    assert!(msg.contains("duplicate vertex"));
    let (line, _, msg) = parse_error("tree { edges: [e0,e1]; root: e0;\n vertex v { in: [e1]; out: e0 }\n vertex w { in: [e0]; out: e1 } }");
    assert_eq!(line, 1);
    assert!(msg.contains("malformed tree"), "{msg}");
    let (line, col, _) = parse_error("presheaf X {\n  gen a : eta;\n  gen f : L1 faces [a, b];\n}");
    assert_eq!((line, col), (3, 24));
    let (_, _, msg) = parse_error("presheaf X { gen a : eta; gen a : eta; }");
    assert!(msg.contains("duplicate generator"));
    let (_, _, msg) = parse_error("map { src: L1; dst: eta; edges: { e0->e0, e0->e0 } }");
    assert!(msg.contains("twice"));
    let (line, col, _) = parse_error("presheaf X { gen a : eta; }\nhom h : X -> Y { }");
    assert_eq!((line, col), (2, 14));
}

#[test]
fn maps_are_checked() {
    let src = "presheaf X { gen a : eta; gen b : eta; gen f : L1 faces [b, a]; }
               presheaf P { gen x : eta; }
               hom p : X -> P { a -> x; b -> x; f -> x[0,0]; }";
    let doc = parse(src).unwrap();
    assert_eq!(doc.last_map().unwrap().source().len(), 3);
    let bad = src.replace("x[0,0]", "x");
    assert!(matches!(parse(&bad), Err(DendroError::Parse { .. })));
}
