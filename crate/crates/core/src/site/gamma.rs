//! Segal's category, presented as the opposite of finite pointed sets.
//!
//! The object `n` is the pointed set `{0, 1, ..., n}` with basepoint `0`. A morphism
//! `a -> b` is a pointed map `{0..b} -> {0..a}`.

use serde::Serialize;

use super::{EzSite, MorClass};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GammaMap {
    pub src: usize,
    pub dst: usize,
    /// `pointed[i]` for `i` in `0..=dst`; `pointed[0] == 0`.
    pub pointed: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Gamma;

impl EzSite for Gamma {
    type Obj = usize;
    type Mor = GammaMap;

    fn name(&self) -> String {
        "gamma".into()
    }
    fn objects(&self, max_degree: usize) -> Vec<usize> {
        (0..=max_degree).collect()
    }
    fn degree(&self, x: &usize) -> usize {
        *x
    }
    fn hom(&self, a: &usize, b: &usize) -> Vec<GammaMap> {
        let mut out = Vec::new();
        let mut cur = vec![0];
        fn rec(a: usize, b: usize, cur: &mut Vec<usize>, out: &mut Vec<GammaMap>) {
            if cur.len() == b + 1 {
                out.push(GammaMap { src: a, dst: b, pointed: cur.clone() });
                return;
            }
            for x in 0..=a {
                cur.push(x);
                rec(a, b, cur, out);
                cur.pop();
            }
        }
        rec(*a, *b, &mut cur, &mut out);
        out
    }
    fn source(&self, f: &GammaMap) -> usize {
        f.src
    }
    fn target(&self, f: &GammaMap) -> usize {
        f.dst
    }
    fn compose(&self, g: &GammaMap, f: &GammaMap) -> GammaMap {
        GammaMap { src: f.src, dst: g.dst, pointed: g.pointed.iter().map(|&i| f.pointed[i]).collect() }
    }
    fn identity(&self, x: &usize) -> GammaMap {
        GammaMap { src: *x, dst: *x, pointed: (0..=*x).collect() }
    }
    fn classify(&self, f: &GammaMap) -> MorClass {
        let mut hit = vec![0usize; f.src + 1];
        for &x in &f.pointed {
            hit[x] += 1;
        }
        let injective = hit.iter().all(|&h| h <= 1);
        let surjective = hit.iter().all(|&h| h >= 1);
        match (injective, surjective) {
            (true, true) => MorClass::Iso,
            (true, false) => MorClass::Degeneracy,
            (false, true) => MorClass::Face,
            (false, false) => MorClass::Mixed,
        }
    }
}
