//! The simplex category: monotone maps between finite ordinals.

use serde::Serialize;

use super::{EzSite, MorClass};

/// A monotone map `[src] -> [dst]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Monotone {
    pub src: usize,
    pub dst: usize,
    pub map: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Simplex;

fn monotone_maps(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m + 1);
    fn rec(len: usize, n: usize, lo: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for x in lo..=n {
            cur.push(x);
            rec(len, n, x, cur, out);
            cur.pop();
        }
    }
    rec(m + 1, n, 0, &mut cur, &mut out);
    out
}

impl EzSite for Simplex {
    type Obj = usize;
    type Mor = Monotone;

    fn name(&self) -> String {
        "delta".into()
    }
    fn objects(&self, max_degree: usize) -> Vec<usize> {
        (0..=max_degree).collect()
    }
    fn degree(&self, x: &usize) -> usize {
        *x
    }
    fn hom(&self, a: &usize, b: &usize) -> Vec<Monotone> {
        monotone_maps(*a, *b).into_iter().map(|map| Monotone { src: *a, dst: *b, map }).collect()
    }
    fn source(&self, f: &Monotone) -> usize {
        f.src
    }
    fn target(&self, f: &Monotone) -> usize {
        f.dst
    }
    fn compose(&self, g: &Monotone, f: &Monotone) -> Monotone {
        Monotone { src: f.src, dst: g.dst, map: f.map.iter().map(|&i| g.map[i]).collect() }
    }
    fn identity(&self, x: &usize) -> Monotone {
        Monotone { src: *x, dst: *x, map: (0..=*x).collect() }
    }
    fn classify(&self, f: &Monotone) -> MorClass {
        let injective = f.map.windows(2).all(|w| w[0] < w[1]);
        let surjective = f.map.first() == Some(&0) && f.map.last() == Some(&f.dst) && f.map.windows(2).all(|w| w[1] - w[0] <= 1);
        match (injective, surjective) {
            (true, true) => MorClass::Iso,
            (true, false) => MorClass::Face,
            (false, true) => MorClass::Degeneracy,
            (false, false) => MorClass::Mixed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hom_sizes_are_binomial() {
        // |Hom([m],[n])| = C(m+n+1, m+1)
        assert_eq!(Simplex.hom(&1, &2).len(), 6);
        assert_eq!(Simplex.hom(&2, &1).len(), 4);
        assert_eq!(Simplex.hom(&0, &3).len(), 4);
    }

    #[test]
    fn degeneracy_has_sections() {
        let s = Monotone { src: 1, dst: 0, map: vec![0, 0] };
        assert_eq!(Simplex.classify(&s), MorClass::Degeneracy);
        assert_eq!(Simplex.sections(&s).len(), 2);
    }
}
