//! Minimal fibrations as fiberwise strong deformation retracts.

mod checks;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{DendroError, Result};
use crate::homotopy::{
    extend_from, has_rlp, rep_cylinder, straighten, Budget, CylinderMap, Family, HomotopyClasses, OracleOptions,
    RlpReport, WitnessKind,
};
use crate::presheaf::{rep_info, skeleton, sub_presheaf, Element, FinitePresheaf, PresheafMap};

pub use checks::{
    check_pullback_minimality, is_skeletal, verify_deformation_retract, verify_retraction_trivial, PullbackMinimalityReport,
    RetractReport, SkeletalReport, TrivialRetractionReport,
};

#[derive(Clone, Debug)]
pub struct MinimizeOptions {
    pub oracle: OracleOptions,
    /// Family used to certify that the input is a fibration.
    pub family: Family,
    pub arity_cap: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { oracle: OracleOptions::default(), family: Family::Inner, arity_cap: 3 }
    }
}

/// How a generator of the domain was handled.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub enum Case {
    /// Attached to the minimal model.
    Representative,
    /// Homotopic relative to the boundary to an element of the model.
    IntoModel,
    /// Homotopic relative to the boundary to a degenerate element.
    Degenerate,
    /// Boundary pushed into the model by a lift, then one of the cases above.
    Lifted,
}

#[derive(Clone, Debug)]
pub struct LogEntry {
    pub generator: usize,
    pub case: Case,
    /// Where the generator is sent by the retraction, as an element of the domain.
    pub target: Element,
    /// Homotopy from the generator to `target`; `None` means constant.
    pub homotopy: Option<CylinderMap>,
    pub witness: Option<WitnessKind>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LogLine {
    pub generator: String,
    pub degree: usize,
    pub case: Case,
    pub target: String,
    pub witness: Option<WitnessKind>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DegreeReport {
    pub degree: usize,
    /// Generators with boundary in the model that are not homotopic to a degenerate element.
    pub candidates: Vec<String>,
    pub classes: Vec<Vec<String>>,
    pub representatives: Vec<String>,
    pub into_model: usize,
    pub degenerate: usize,
    pub lifted: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FibrationStamp {
    pub family: String,
    pub max_degree: usize,
    pub certified: bool,
    pub failures: usize,
    pub budget_exhausted: usize,
}

impl FibrationStamp {
    fn from_report(r: &RlpReport) -> Self {
        FibrationStamp {
            family: r.family.clone(),
            max_degree: r.max_degree,
            certified: r.pass,
            failures: r.failures.len(),
            budget_exhausted: r.budget_exhausted.len(),
        }
    }
}

/// Output of [`minimize`]. The domain is the `bound`-skeleton of the input.
#[derive(Clone, Debug)]
pub struct MinimizationResult {
    pub p: PresheafMap,
    /// Inclusion of the skeleton that was minimized.
    pub domain: PresheafMap,
    pub m: Arc<FinitePresheaf>,
    /// `M -> Y`.
    pub i: PresheafMap,
    /// `sk Y -> M`.
    pub r: PresheafMap,
    /// `M -> X`.
    pub q: PresheafMap,
    pub log: Vec<LogEntry>,
    pub report: Vec<DegreeReport>,
    pub bound: usize,
    pub fibration: FibrationStamp,
}

impl MinimizationResult {
    pub fn log_lines(&self) -> Vec<LogLine> {
        let y = self.p.source();
        self.log
            .iter()
            .map(|e| LogLine {
                generator: y.generator(e.generator).name.clone(),
                degree: y.generator(e.generator).shape.degree(),
                case: e.case.clone(),
                target: y.display(&e.target),
                witness: e.witness,
            })
            .collect()
    }

    /// `H(x, m)`: the logged deformation at an element `x` of the domain and a
    /// labelling `m` of its level.
    pub fn deformation(&self, x: &Element, m: u64) -> Element {
        deform(self.p.source(), &self.homs(), x, m)
    }

    fn homs(&self) -> HashMap<usize, &CylinderMap> {
        self.log.iter().filter_map(|e| e.homotopy.as_ref().map(|h| (e.generator, h))).collect()
    }

    /// Whether the retraction is the identity, i.e. the input was already minimal.
    pub fn is_identity(&self) -> bool {
        self.m.len() == self.domain.source().len()
    }
}

fn deform(y: &FinitePresheaf, homs: &HashMap<usize, &CylinderMap>, x: &Element, m: u64) -> Element {
    match homs.get(&x.generator()) {
        None => x.clone(),
        Some(h) => {
            let info = rep_info(&y.generator(x.generator()).shape);
            h.eval(y, &info.element(x.degeneracy()), m)
        }
    }
}

/// Minimization that stopped early, with the entries logged so far.
#[derive(Debug)]
pub struct MinimizeFailure {
    pub error: DendroError,
    pub log: Vec<LogLine>,
}

impl fmt::Display for MinimizeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} logged generators)", self.error, self.log.len())
    }
}

impl std::error::Error for MinimizeFailure {}

impl From<MinimizeFailure> for DendroError {
    fn from(f: MinimizeFailure) -> Self {
        f.error
    }
}

struct State<'a> {
    p: &'a PresheafMap,
    opts: &'a MinimizeOptions,
    in_m: BTreeSet<usize>,
    log: BTreeMap<usize, LogEntry>,
    classes: HashMap<(Vec<Element>, Element), Arc<HomotopyClasses>>,
}

impl State<'_> {
    fn y(&self) -> &Arc<FinitePresheaf> {
        self.p.source()
    }

    fn homs(&self) -> HashMap<usize, &CylinderMap> {
        self.log.values().filter_map(|e| e.homotopy.as_ref().map(|h| (e.generator, h))).collect()
    }

    fn budget(&self) -> Budget {
        Budget::new(self.opts.oracle.budget)
    }

    fn in_model(&self, x: &Element) -> bool {
        self.in_m.contains(&x.generator())
    }

    fn classes_of(&mut self, x: &Element) -> Result<Arc<HomotopyClasses>> {
        let key = (self.y().boundary_of(x), self.p.apply(x));
        if let Some(c) = self.classes.get(&key) {
            return Ok(c.clone());
        }
        let c = Arc::new(HomotopyClasses::compute(self.p, crate::homotopy::candidates(self.p, x), &self.opts.oracle)?);
        self.classes.insert(key, c.clone());
        Ok(c)
    }

    /// Cases for an element whose boundary lies in the model: a homotopy to a
    /// degenerate element or into the model, if one exists.
    fn settle(&mut self, x: &Element) -> Result<Option<(Case, Element, Option<CylinderMap>, Option<WitnessKind>)>> {
        let classes = self.classes_of(x)?;
        let i = classes.index_of(x).expect("an element is its own candidate");
        let related: Vec<usize> = (0..classes.elements.len()).filter(|&j| classes.related(i, j)).collect();
        let pick = related
            .iter()
            .copied()
            .find(|&j| classes.elements[j].is_degenerate())
            .map(|j| (Case::Degenerate, j))
            .or_else(|| related.iter().copied().find(|&j| self.in_model(&classes.elements[j])).map(|j| (Case::IntoModel, j)));
        let Some((case, j)) = pick else { return Ok(None) };
        if j == i {
            return Ok(Some((case, x.clone(), None, None)));
        }
        let w = classes.witness(i, j).expect("related elements have a witness");
        let mut budget = self.budget();
        let h = straighten(self.p, &w, &mut budget).map_err(|e| match e {
            DendroError::Budget(n) => DendroError::Budget(n),
            e => DendroError::Algorithm(format!("could not straighten a homotopy (fibration hypothesis unverified?): {e}")),
        })?;
        Ok(Some((case, classes.elements[j].clone(), Some(h), Some(w.kind))))
    }

    fn record(&mut self, g: usize, case: Case, target: Element, homotopy: Option<CylinderMap>, witness: Option<WitnessKind>) {
        self.log.insert(g, LogEntry { generator: g, case, target, homotopy, witness });
    }

    fn lift(&mut self, g: usize) -> Result<()> {
        let y = self.y().clone();
        let x = y.gen_element(g);
        let homs = self.homs();
        let info = rep_info(x.level());
        let boundary = |a: &Element, m: u64| deform(&y, &homs, &y.act(&info.morphism(a), &x).expect("level"), m);
        let mut budget = self.budget();
        let h1 = extend_from(self.p, &x, &boundary, &mut budget)?.ok_or_else(|| {
            DendroError::Algorithm(format!(
                "no lift pushing the boundary of {} into the model (fibration hypothesis unverified?)",
                y.generator(g).name
            ))
        })?;
        let x1 = h1.end(&y);
        let cyl = rep_cylinder(x.level(), 1);
        let values = (0..cyl.len())
            .map(|c| {
                let (a, m) = cyl.generator_value(c);
                deform(&y, &homs, &y.act(&info.morphism(a), &x1).expect("level"), m[0])
            })
            .collect();
        let k = CylinderMap { shape: x.level().clone(), values };
        drop(homs);
        let (h, target) = if k == CylinderMap::constant(&y, &x1) {
            (h1, x1)
        } else {
            let end = k.end(&y);
            let mut budget = self.budget();
            let h = crate::homotopy::compose_homotopies(self.p, &h1, &k, &mut budget).map_err(|e| match e {
                DendroError::Budget(n) => DendroError::Budget(n),
                e => DendroError::Algorithm(format!("could not compose homotopies (fibration hypothesis unverified?): {e}")),
            })?;
            (h, end)
        };
        self.record(g, Case::Lifted, target, Some(h), None);
        Ok(())
    }
}

/// Computes a skeletal fibration `q: M -> X` inside `p: Y -> X`, working through
/// the generators of `Y` of degree at most `d`.
pub fn minimize(p: &PresheafMap, d: usize, opts: &MinimizeOptions) -> std::result::Result<MinimizationResult, MinimizeFailure> {
    minimize_preferring(p, d, opts, &BTreeSet::new())
}

/// As [`minimize`], but generators in `prefer` are considered first within each
/// degree, so they become representatives of their classes when possible.
pub fn minimize_preferring(
    p: &PresheafMap,
    d: usize,
    opts: &MinimizeOptions,
    prefer: &BTreeSet<usize>,
) -> std::result::Result<MinimizationResult, MinimizeFailure> {
    let y = p.source().clone();
    if let Some((g, phi)) = y.non_normal_witness() {
        return Err(MinimizeFailure {
            error: DendroError::NotNormal(format!("{}: generator {} is fixed by {phi:?}", y.name(), y.generator(g).name)),
            log: Vec::new(),
        });
    }
    let rlp = has_rlp(p, &opts.family, d + 1, opts.arity_cap, opts.oracle.budget);
    let mut st = State { p, opts, in_m: BTreeSet::new(), log: BTreeMap::new(), classes: HashMap::new() };
    let mut report = Vec::new();
    let fail = |st: &State, error: DendroError| {
        let lines = st
            .log
            .values()
            .map(|e| LogLine {
                generator: y.generator(e.generator).name.clone(),
                degree: y.generator(e.generator).shape.degree(),
                case: e.case.clone(),
                target: y.display(&e.target),
                witness: e.witness,
            })
            .collect();
        MinimizeFailure { error, log: lines }
    };
    for n in 0..=d {
        let mut gens: Vec<usize> = (0..y.len()).filter(|&g| y.generator(g).shape.degree() == n).collect();
        gens.sort_by_key(|g| (!prefer.contains(g), *g));
        let mut deg = DegreeReport { degree: n, ..Default::default() };
        let (ready, rest): (Vec<usize>, Vec<usize>) =
            gens.iter().partition(|&&g| y.boundary_of(&y.gen_element(g)).iter().all(|f| st.in_model(f)));
        let mut class_of: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for &g in &ready {
            let x = y.gen_element(g);
            match st.settle(&x).map_err(|e| fail(&st, e))? {
                Some((Case::Degenerate, target, h, w)) => {
                    deg.degenerate += 1;
                    st.record(g, Case::Degenerate, target, h, w);
                }
                Some((case, target, h, w)) => {
                    deg.into_model += 1;
                    deg.candidates.push(y.generator(g).name.clone());
                    class_of.entry(target.generator()).or_default().push(y.generator(g).name.clone());
                    st.record(g, case, target, h, w);
                }
                None => {
                    st.in_m.insert(g);
                    deg.candidates.push(y.generator(g).name.clone());
                    deg.representatives.push(y.generator(g).name.clone());
                    class_of.entry(g).or_default().insert(0, y.generator(g).name.clone());
                    st.record(g, Case::Representative, x, None, None);
                }
            }
        }
        for &g in &rest {
            st.lift(g).map_err(|e| fail(&st, e))?;
            deg.lifted += 1;
        }
        deg.classes = class_of.into_values().collect();
        report.push(deg);
    }
    let build = || -> Result<MinimizationResult> {
        let domain = skeleton(&y, d as isize);
        let i = sub_presheaf(&y, st.in_m.iter().copied(), &format!("min {}", y.name()))?;
        let m = i.source().clone();
        let assign = (0..domain.source().len())
            .map(|k| {
                let g = domain.on_generator(k).generator();
                let t = &st.log[&g].target;
                i.preimage(t).ok_or_else(|| DendroError::Algorithm(format!("{} is not sent into the model", y.generator(g).name)))
            })
            .collect::<Result<Vec<_>>>()?;
        let r = PresheafMap::new(domain.source().clone(), m.clone(), assign)?;
        let q = p.after(&i)?;
        Ok(MinimizationResult {
            p: p.clone(),
            domain,
            m,
            i,
            r,
            q,
            log: st.log.values().cloned().collect(),
            report,
            bound: d,
            fibration: FibrationStamp::from_report(&rlp),
        })
    };
    build().map_err(|e| fail(&st, e))
}

#[cfg(test)]
mod tests;
