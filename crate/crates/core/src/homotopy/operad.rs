//! Thin coloured operads and their dendroidal nerves.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{DendroError, Result};
use crate::presheaf::{from_concrete, op_arities, Concrete, FinitePresheaf, PresheafMap, Realized};
use crate::site::{Arities, Edge, Morphism, Shape};

/// A coloured operad with at most one operation for each profile.
///
/// Operations are stored by their sorted input colours and output colour. When
/// `ops` is `None` every profile with an allowed arity has an operation.
#[derive(Clone, Debug)]
pub struct ThinOperad {
    pub name: String,
    pub colours: Vec<String>,
    pub arities: Arities,
    ops: Option<BTreeSet<(Vec<usize>, usize)>>,
    bound: Option<usize>,
}

impl ThinOperad {
    /// Checks that identities exist and that the operations are closed under
    /// composition.
    pub fn new(name: impl Into<String>, colours: Vec<String>, ops: impl IntoIterator<Item = (Vec<usize>, usize)>) -> Result<Self> {
        let mut set: BTreeSet<(Vec<usize>, usize)> = BTreeSet::new();
        for (mut ins, out) in ops {
            if out >= colours.len() || ins.iter().any(|&c| c >= colours.len()) {
                return Err(DendroError::Precondition("operation with an unknown colour".into()));
            }
            ins.sort_unstable();
            set.insert((ins, out));
        }
        for c in 0..colours.len() {
            set.insert((vec![c], c));
        }
        let list: Vec<(Vec<usize>, usize)> = set.iter().cloned().collect();
        for (ins, out) in &list {
            for (k, &c) in ins.iter().enumerate() {
                for (ins2, _) in list.iter().filter(|(_, o)| *o == c) {
                    let mut comp = ins.clone();
                    comp.remove(k);
                    comp.extend(ins2.iter().copied());
                    comp.sort_unstable();
                    if !set.contains(&(comp.clone(), *out)) {
                        return Err(DendroError::Precondition(format!(
                            "composite {comp:?} -> {out} of {ins:?} -> {out} and {ins2:?} -> {c} is missing"
                        )));
                    }
                }
            }
        }
        let arities = Arities::from_set(list.iter().map(|(i, _)| i.len()));
        Ok(ThinOperad { name: name.into(), colours, arities, ops: Some(set), bound: None })
    }

    /// The one-colour operad with a single operation of each allowed arity.
    pub fn terminal(arities: Arities) -> Self {
        ThinOperad { name: "comm".into(), colours: vec!["*".into()], arities: arities.with(1), ops: None, bound: None }
    }

    /// The operad freely generated by the vertices of a tree.
    pub fn free_on(t: &Shape) -> Self {
        let mut ops = BTreeSet::new();
        for e in 0..t.n_edges() as Edge {
            for op in t.ops_at(e) {
                ops.insert((op.iter().map(|&x| x as usize).collect::<Vec<_>>(), e as usize));
            }
        }
        let arities = Arities::from_set(ops.iter().map(|(i, _)| i.len()));
        let colours = (0..t.n_edges()).map(|e| format!("e{e}")).collect();
        ThinOperad { name: format!("free {}", t.name()), colours, arities, ops: Some(ops), bound: Some(t.degree()) }
    }

    /// The contractible groupoid on `n` objects, as an operad with unary operations.
    pub fn indiscrete(n: usize) -> Self {
        let ops = (0..n).flat_map(|i| (0..n).map(move |j| (vec![i], j))).collect();
        let colours = (0..n).map(|i| i.to_string()).collect();
        ThinOperad { name: format!("indiscrete({n})"), colours, arities: Arities::linear(), ops: Some(ops), bound: None }
    }

    pub fn has_op(&self, ins: &[usize], out: usize) -> bool {
        match &self.ops {
            None => self.arities.contains(ins.len()),
            Some(set) => {
                let mut k = ins.to_vec();
                k.sort_unstable();
                set.contains(&(k, out))
            }
        }
    }
}

/// Elements of the nerve at `S`: colourings of the edges of `S` compatible with
/// every vertex.
struct Nerve<'a>(&'a ThinOperad);

impl Concrete for Nerve<'_> {
    type Elem = Vec<u16>;

    fn elements(&self, s: &Shape) -> Vec<Vec<u16>> {
        let tree = s.tree();
        let n = tree.n_edges();
        let mut order: Vec<usize> = Vec::new();
        let mut stack = vec![tree.root()];
        while let Some(e) = stack.pop() {
            if let Some(v) = tree.producer(e) {
                order.push(v);
                stack.extend(tree.vertices()[v].inputs.iter().copied());
            }
        }
        let k = self.0.colours.len() as u16;
        let mut out = Vec::new();
        let mut cur = vec![u16::MAX; n];
        fn rec(op: &ThinOperad, s: &Shape, order: &[usize], i: usize, k: u16, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
            if i == order.len() {
                out.push(cur.clone());
                return;
            }
            let v = &s.tree().vertices()[order[i]];
            let m = v.inputs.len();
            let mut choice = vec![0u16; m];
            loop {
                let ins: Vec<usize> = choice.iter().map(|&c| c as usize).collect();
                if op.has_op(&ins, cur[v.output as usize] as usize) {
                    for (j, &e) in v.inputs.iter().enumerate() {
                        cur[e as usize] = choice[j];
                    }
                    rec(op, s, order, i + 1, k, cur, out);
                }
                let mut j = 0;
                while j < m {
                    choice[j] += 1;
                    if choice[j] < k {
                        break;
                    }
                    choice[j] = 0;
                    j += 1;
                }
                if j == m {
                    break;
                }
            }
        }
        for c in 0..k {
            cur[tree.root() as usize] = c;
            rec(self.0, s, &order, 0, k, &mut cur, &mut out);
        }
        out
    }

    fn restrict(&self, f: &Morphism, x: &Vec<u16>) -> Vec<u16> {
        f.carrier().iter().map(|&e| x[e as usize]).collect()
    }

    fn arities(&self) -> Arities {
        self.0.arities.clone()
    }

    fn degree_bound(&self) -> Option<usize> {
        self.0.bound
    }

    fn label(&self, x: &Vec<u16>) -> String {
        let names: Vec<&str> = x.iter().map(|&c| self.0.colours[c as usize].as_str()).collect();
        if names.iter().all(|n| n.chars().count() == 1) {
            names.concat()
        } else {
            names.join(",")
        }
    }
}

/// The nerve of `p`, with generators up to degree `d`. The result is flagged as
/// truncated when `p` has nondegenerate elements of degree `d + 1`.
pub fn nerve_truncated(p: &ThinOperad, d: usize) -> Result<Realized<Vec<u16>>> {
    from_concrete(&Nerve(p), &format!("N({})", p.name), d)
}

/// The map from `x` to the nerve of the one-colour operad with `x`'s arities.
/// For linear `x` the target is `Ω[η]`.
pub fn terminal_map(x: &Arc<FinitePresheaf>) -> Result<PresheafMap> {
    let op = ThinOperad::terminal(op_arities(x));
    let d = x.max_degree().unwrap_or(0);
    let nerve = Nerve(&op);
    let real = from_concrete(&nerve, "point", d)?;
    let assign = x
        .generators()
        .iter()
        .map(|g| real.locate(&nerve, &vec![0; g.shape.n_edges()], &g.shape))
        .collect::<Result<Vec<_>>>()?;
    PresheafMap::new(x.clone(), real.presheaf.clone(), assign)
}
