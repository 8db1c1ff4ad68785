//! Gluing left fibrations along cofibrations, and fiberwise criteria.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{DendroError, Result};
use crate::homotopy::{has_rlp, terminal_map, Family, RlpReport};
use crate::minimize::{minimize, minimize_preferring, MinimizationResult, MinimizeOptions};
use crate::presheaf::{pullback, pullback_induced, pushout, pushout_induced, yoneda, Element, FinitePresheaf, PresheafMap};
use crate::site::Shape;

/// Left fibrations `Y_i -> X_i` over a cospan `X_1 <- X_0 -> X_2` of normal
/// monomorphisms, with comparison maps `Y_0 -> Y_i` over the legs.
#[derive(Clone, Debug)]
pub struct GluingDiagram {
    pub f: PresheafMap,
    pub g: PresheafMap,
    pub p0: PresheafMap,
    pub p1: PresheafMap,
    pub p2: PresheafMap,
    pub u1: PresheafMap,
    pub u2: PresheafMap,
}

fn same(a: &Arc<FinitePresheaf>, b: &Arc<FinitePresheaf>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl GluingDiagram {
    pub fn new(
        f: PresheafMap,
        g: PresheafMap,
        p0: PresheafMap,
        p1: PresheafMap,
        p2: PresheafMap,
        u1: PresheafMap,
        u2: PresheafMap,
    ) -> Result<Self> {
        let fits = same(f.source(), g.source())
            && same(p0.target(), f.source())
            && same(p1.target(), f.target())
            && same(p2.target(), g.target())
            && same(u1.source(), p0.source())
            && same(u2.source(), p0.source())
            && same(u1.target(), p1.source())
            && same(u2.target(), p2.source());
        if !fits {
            return Err(DendroError::Mismatch("the maps of the gluing diagram do not fit together".into()));
        }
        for (name, leg) in [("first", &f), ("second", &g)] {
            if !leg.is_normal_mono()? {
                return Err(DendroError::Precondition(format!("the {name} leg is not a normal monomorphism")));
            }
        }
        for (k, (u, p, leg)) in [(&u1, &p1, &f), (&u2, &p2, &g)].into_iter().enumerate() {
            let y0 = u.source();
            for a in 0..y0.len() {
                let x = y0.gen_element(a);
                if p.apply(&u.apply(&x)) != leg.apply(&p0.apply(&x)) {
                    return Err(DendroError::Precondition(format!(
                        "square {} does not commute at {}",
                        k + 1,
                        y0.generator(a).name
                    )));
                }
            }
        }
        Ok(GluingDiagram { f, g, p0, p1, p2, u1, u2 })
    }

    fn side(&self, k: usize) -> (&PresheafMap, &PresheafMap, &PresheafMap) {
        if k == 0 {
            (&self.f, &self.p1, &self.u1)
        } else {
            (&self.g, &self.p2, &self.u2)
        }
    }
}

/// The fiber `Y ×_X η` of `p: Y -> X` over a colour `c` of `X`.
pub fn fiber_over_colour(p: &PresheafMap, c: &Element) -> Result<Arc<FinitePresheaf>> {
    if c.level().degree() != 0 {
        return Err(DendroError::Precondition("fibers are taken over colours".into()));
    }
    let x = p.target();
    let d = p.source().max_degree().unwrap_or(0);
    let pb = pullback(p, &yoneda(x, c), &format!("fiber over {}", x.display(c)), d)?;
    let fiber = pb.object.clone();
    if !fiber.is_linear() {
        return Err(DendroError::Algorithm("fiber over a colour has non-linear generators".into()));
    }
    Ok(fiber)
}

fn colours(x: &FinitePresheaf) -> Vec<Element> {
    x.evaluate(&Shape::eta())
}

fn degree_counts(x: &FinitePresheaf) -> Vec<usize> {
    let d = x.max_degree().unwrap_or(0);
    (0..=d).map(|n| x.generators().iter().filter(|g| g.shape.degree() == n).count()).collect()
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberVerdict {
    pub side: usize,
    pub colour: String,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CartesianReport {
    pub max_degree: usize,
    pub fibers: Vec<FiberVerdict>,
    pub pass: bool,
}

/// Decides whether a map of Kan complexes is a weak equivalence by comparing
/// minimal models: the induced map between them must be an isomorphism.
fn fiber_equivalence(h: &PresheafMap, d: usize, opts: &MinimizeOptions) -> (Verdict, String) {
    if h.is_iso() {
        return (Verdict::Equivalent, "isomorphism".into());
    }
    let (a, b) = (h.source(), h.target());
    let (ma, mb) = match (terminal_map(a), terminal_map(b)) {
        (Ok(ta), Ok(tb)) => match (minimize(&ta, d, opts), minimize(&tb, d, opts)) {
            (Ok(ma), Ok(mb)) => (ma, mb),
            (Err(e), _) | (_, Err(e)) => return (Verdict::Undetermined, e.to_string()),
        },
        (Err(e), _) | (_, Err(e)) => return (Verdict::Undetermined, e.to_string()),
    };
    let (na, nb) = (colours(&ma.m).len(), colours(&mb.m).len());
    if na != nb {
        return (Verdict::NotEquivalent, format!("{na} and {nb} components"));
    }
    let induced = h
        .after(&ma.i)
        .and_then(|hm| mb.domain.preimage_map(&hm))
        .and_then(|hm| mb.r.after(&hm));
    match induced {
        Ok(k) if k.is_iso() => (Verdict::Equivalent, format!("minimal models {:?} match", degree_counts(&ma.m))),
        Ok(_) => (Verdict::Undetermined, "induced map of minimal models is not an isomorphism".into()),
        Err(e) => (Verdict::Undetermined, e.to_string()),
    }
}

/// Compares `Y_0` with the pullbacks `Y_i ×_{X_i} X_0` fiberwise over the colours
/// of `X_0`.
pub fn check_homotopy_cartesian(dia: &GluingDiagram, d: usize, opts: &MinimizeOptions) -> Result<CartesianReport> {
    let x0 = dia.f.source();
    let mut fibers = Vec::new();
    for k in 0..2 {
        let (leg, p, u) = dia.side(k);
        let dmax = p.source().max_degree().unwrap_or(0).max(dia.p0.source().max_degree().unwrap_or(0));
        let pb = pullback(p, leg, "pullback", dmax)?;
        let cmp = pullback_induced(&pb, u, &dia.p0)?;
        for c in colours(x0) {
            let inc = yoneda(x0, &c);
            let f0 = pullback(&dia.p0, &inc, "fiber", dmax)?;
            let over = pb.to_y.clone();
            let f1 = pullback(&over, &inc, "fiber", dmax)?;
            let a = cmp.after(&f0.to_x)?;
            let h = pullback_induced(&f1, &a, &f0.to_y)?;
            let (verdict, detail) = fiber_equivalence(&h, d, opts);
            fibers.push(FiberVerdict { side: k + 1, colour: x0.display(&c), verdict, detail });
        }
    }
    let pass = fibers.iter().all(|v| v.verdict == Verdict::Equivalent);
    Ok(CartesianReport { max_degree: d, fibers, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct GlueReport {
    pub max_degree: usize,
    pub cartesian: CartesianReport,
    pub model_sizes: [usize; 3],
    pub base_size: usize,
    pub glued_size: usize,
    pub restrictions_iso: [bool; 2],
    pub fibers_match: Vec<(String, bool)>,
    pub rlp: RlpReport,
    pub pass: bool,
}

pub struct GlueResult {
    /// `M_1 ∪_{M_0} M_2 -> X_1 ∪_{X_0} X_2`.
    pub q: PresheafMap,
    pub minimized: [MinimizationResult; 3],
    /// `M_i -> q ×_X X_i`, isomorphisms.
    pub restrictions: [PresheafMap; 2],
    pub report: GlueReport,
}

fn model_map(from: &MinimizationResult, u: &PresheafMap, to: &MinimizationResult) -> Result<PresheafMap> {
    let into = u.after(&from.i)?;
    let into = to.domain.preimage_map(&into)?;
    to.r.after(&into)
}

/// Minimizes the three fibrations compatibly, checks that the minimal models form
/// pullback squares, and glues them along `M_0`.
pub fn glue_left_fibrations(dia: &GluingDiagram, d: usize, opts: &MinimizeOptions) -> Result<GlueResult> {
    let cartesian = check_homotopy_cartesian(dia, d, opts)?;
    if !cartesian.pass {
        return Err(DendroError::Precondition("the diagram is not homotopy cartesian at every colour".into()));
    }
    let m0 = minimize(&dia.p0, d, opts)?;
    let mut sides = Vec::new();
    for k in 0..2 {
        let (leg, p, u) = dia.side(k);
        let prefer: BTreeSet<usize> =
            (0..m0.m.len()).map(|a| u.apply(&m0.i.apply(&m0.m.gen_element(a))).generator()).collect();
        let mi = minimize_preferring(p, d, opts, &prefer)?;
        let j = model_map(&m0, u, &mi)?;
        let pb = pullback(&mi.q, leg, "restriction", d)?;
        let cmp = pullback_induced(&pb, &j, &m0.q)?;
        if !cmp.is_iso() {
            return Err(DendroError::Algorithm(format!(
                "the minimal model over side {} does not restrict to the minimal model of the overlap",
                k + 1
            )));
        }
        if !j.is_mono() {
            return Err(DendroError::Algorithm("overlap model does not embed".into()));
        }
        sides.push((mi, j));
    }
    let (m2, j2) = sides.pop().expect("two sides");
    let (m1, j1) = sides.pop().expect("two sides");
    let xb = pushout(&dia.f, &dia.g, "base")?;
    let mb = pushout(&j1, &j2, "glued")?;
    let q = pushout_induced(&j1, &j2, &mb, &xb.from_b.after(&m1.q)?, &xb.from_c.after(&m2.q)?)?;
    let rlp = has_rlp(&q, &Family::Left, d, opts.arity_cap, opts.oracle.budget);
    let mut restrictions_iso = [false; 2];
    let mut restrictions = Vec::new();
    for (k, (mi, inc, into)) in [(&m1, &xb.from_b, &mb.from_b), (&m2, &xb.from_c, &mb.from_c)].into_iter().enumerate() {
        let pb = pullback(&q, inc, "restriction", d)?;
        let cmp = pullback_induced(&pb, into, &mi.q)?;
        restrictions_iso[k] = cmp.is_iso();
        restrictions.push(cmp);
    }
    let mut fibers_match = Vec::new();
    for (mi, inc) in [(&m1, &xb.from_b), (&m2, &xb.from_c)] {
        let xi = mi.q.target();
        for c in colours(xi) {
            let a = fiber_over_colour(&q, &inc.apply(&c))?;
            let b = fiber_over_colour(&mi.q, &c)?;
            fibers_match.push((format!("{} in {}", xi.display(&c), xi.name()), degree_counts(&a) == degree_counts(&b)));
        }
    }
    let pass = rlp.pass && restrictions_iso.iter().all(|&b| b) && fibers_match.iter().all(|(_, b)| *b);
    let report = GlueReport {
        max_degree: d,
        cartesian,
        model_sizes: [m0.m.len(), m1.m.len(), m2.m.len()],
        base_size: xb.object.len(),
        glued_size: mb.object.len(),
        restrictions_iso,
        fibers_match,
        rlp,
        pass,
    };
    let r2 = restrictions.pop().expect("two sides");
    let r1 = restrictions.pop().expect("two sides");
    Ok(GlueResult { q, minimized: [m0, m1, m2], restrictions: [r1, r2], report })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub enum FiberBranch {
    /// Every fiber of the minimal model is a point.
    PointFibers,
    /// Some fiber of the minimal model is not a point; no claim is made.
    FibersNontrivial,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrivialFibersReport {
    pub max_degree: usize,
    pub branch: FiberBranch,
    pub nontrivial: Vec<String>,
    pub model_is_iso: Option<bool>,
    pub rlp: Option<RlpReport>,
    pub pass: bool,
}

/// If every fiber of the minimal model of `p` is a point, checks that the model
/// is an isomorphism and that `p` lifts against boundary inclusions up to `d`.
pub fn check_trivial_fibers_implies_trivial(p: &PresheafMap, d: usize, opts: &MinimizeOptions) -> Result<TrivialFibersReport> {
    let res = minimize(p, d, opts)?;
    let x = p.target();
    let mut nontrivial = Vec::new();
    for c in colours(x) {
        let fib = fiber_over_colour(&res.q, &c)?;
        if fib.len() != 1 || fib.max_degree() != Some(0) {
            nontrivial.push(format!("{}: {:?}", x.display(&c), degree_counts(&fib)));
        }
    }
    if !nontrivial.is_empty() {
        return Ok(TrivialFibersReport {
            max_degree: d,
            branch: FiberBranch::FibersNontrivial,
            nontrivial,
            model_is_iso: None,
            rlp: None,
            pass: true,
        });
    }
    let iso = res.q.is_iso();
    let rlp = has_rlp(p, &Family::Trivial, d, opts.arity_cap, opts.oracle.budget);
    let pass = iso && rlp.pass;
    Ok(TrivialFibersReport { max_degree: d, branch: FiberBranch::PointFibers, nontrivial, model_is_iso: Some(iso), rlp: Some(rlp), pass })
}

#[cfg(test)]
mod tests;
