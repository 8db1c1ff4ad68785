//! A finite permutation group as a one-object category. Every map is invertible.

use super::{EzSite, MorClass};

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    elements: Vec<Vec<u8>>,
}

impl FiniteGroup {
    pub fn cyclic(n: usize) -> Self {
        let n = n.max(1);
        let elements = (0..n).map(|k| (0..n).map(|i| ((i + k) % n) as u8).collect()).collect();
        FiniteGroup { name: format!("cyclic({n})"), elements }
    }

    pub fn symmetric(n: usize) -> Self {
        let mut elements = Vec::new();
        let mut p: Vec<u8> = (0..n as u8).collect();
        fn rec(p: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
            if k == p.len() {
                out.push(p.clone());
                return;
            }
            for i in k..p.len() {
                p.swap(k, i);
                rec(p, k + 1, out);
                p.swap(k, i);
            }
        }
        rec(&mut p, 0, &mut elements);
        elements.sort();
        FiniteGroup { name: format!("symmetric({n})"), elements }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    fn index(&self, p: &[u8]) -> usize {
        self.elements.iter().position(|q| q == p).expect("closed under composition")
    }
}

impl EzSite for FiniteGroup {
    type Obj = ();
    type Mor = usize;

    fn name(&self) -> String {
        format!("group:{}", self.name)
    }
    fn objects(&self, _max_degree: usize) -> Vec<()> {
        vec![()]
    }
    fn degree(&self, _x: &()) -> usize {
        0
    }
    fn hom(&self, _a: &(), _b: &()) -> Vec<usize> {
        (0..self.elements.len()).collect()
    }
    fn source(&self, _f: &usize) {}
    fn target(&self, _f: &usize) {}
    fn compose(&self, g: &usize, f: &usize) -> usize {
        let (g, f) = (&self.elements[*g], &self.elements[*f]);
        let gf: Vec<u8> = f.iter().map(|&i| g[i as usize]).collect();
        self.index(&gf)
    }
    fn identity(&self, _x: &()) -> usize {
        let id: Vec<u8> = (0..self.elements[0].len() as u8).collect();
        self.index(&id)
    }
    fn classify(&self, _f: &usize) -> MorClass {
        MorClass::Iso
    }
}
