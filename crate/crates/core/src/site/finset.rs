//! Nonempty finite sets and all maps. The set `{0..n-1}` has degree `n - 1`.

use serde::Serialize;

use super::{EzSite, MorClass};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SetMap {
    pub src: usize,
    pub dst: usize,
    pub map: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FinSet;

impl EzSite for FinSet {
    type Obj = usize;
    type Mor = SetMap;

    fn name(&self) -> String {
        "finset".into()
    }
    fn objects(&self, max_degree: usize) -> Vec<usize> {
        (1..=max_degree + 1).collect()
    }
    fn degree(&self, x: &usize) -> usize {
        x - 1
    }
    fn hom(&self, a: &usize, b: &usize) -> Vec<SetMap> {
        let total = (*b as u64).pow(*a as u32);
        (0..total)
            .map(|mut code| {
                let map = (0..*a)
                    .map(|_| {
                        let x = (code % *b as u64) as usize;
                        code /= *b as u64;
                        x
                    })
                    .collect();
                SetMap { src: *a, dst: *b, map }
            })
            .collect()
    }
    fn source(&self, f: &SetMap) -> usize {
        f.src
    }
    fn target(&self, f: &SetMap) -> usize {
        f.dst
    }
    fn compose(&self, g: &SetMap, f: &SetMap) -> SetMap {
        SetMap { src: f.src, dst: g.dst, map: f.map.iter().map(|&i| g.map[i]).collect() }
    }
    fn identity(&self, x: &usize) -> SetMap {
        SetMap { src: *x, dst: *x, map: (0..*x).collect() }
    }
    fn classify(&self, f: &SetMap) -> MorClass {
        let mut hit = vec![0usize; f.dst];
        for &x in &f.map {
            hit[x] += 1;
        }
        let injective = hit.iter().all(|&h| h <= 1);
        let surjective = hit.iter().all(|&h| h >= 1);
        match (injective, surjective) {
            (true, true) => MorClass::Iso,
            (true, false) => MorClass::Face,
            (false, true) => MorClass::Degeneracy,
            (false, false) => MorClass::Mixed,
        }
    }
}
