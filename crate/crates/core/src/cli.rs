//! The `dendro` command line: argument parsing, dispatch and reports.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{DendroError, Result};
use crate::fixtures::{fixture, Fixture, NAMES};
use crate::format::{emit_diagram, emit_map, emit_presheaf, parse, Document, Writer};
use crate::glue::glue_left_fibrations;
use crate::homotopy::{has_rlp, Family, OracleOptions};
use crate::minimize::{is_skeletal, minimize, verify_deformation_retract, MinimizeOptions};
use crate::presheaf::{skeleton, validate_functoriality, FinitePresheaf};
use crate::site::finset::FinSet;
use crate::site::gamma::Gamma;
use crate::site::group::FiniteGroup;
use crate::site::omega::check_absolute_pushouts;
use crate::site::simplex::Simplex;
use crate::site::{check_ez_axioms, Omega};

pub const PASS: i32 = 0;
pub const FAIL: i32 = 1;
pub const BUDGET: i32 = 2;
pub const INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "dendro", version, about = "Minimal fibrations of finite dendroidal sets")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Highest generator degree considered.
    #[arg(long, global = true)]
    max_degree: Option<usize>,
    /// Largest vertex arity used when enumerating trees.
    #[arg(long, global = true, default_value_t = 3)]
    arity_cap: usize,
    /// Step budget for each search.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    budget: u64,
    /// Lifting family: trivial, inner, left or custom:<file>.
    #[arg(long, global = true, default_value = "inner")]
    family: String,
    /// Files to write; the meaning depends on the command.
    #[arg(long, global = true, num_args = 1..=3)]
    emit: Vec<PathBuf>,
    /// Print the JSON report instead of a summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a file and check functoriality and normality of its presheaves.
    Validate { file: PathBuf },
    /// Emit the skeleton of the last presheaf in a file.
    Skeleton { file: PathBuf },
    /// Check the Eilenberg-Zilber axioms of a site.
    CheckEz {
        /// omega, simplex, finset, gamma, cyclic<n> or symmetric<n>.
        #[arg(long, default_value = "omega")]
        site: String,
    },
    /// Check the right lifting property of the last map in a file.
    CheckFibration { file: PathBuf },
    /// Minimize the last map in a file.
    Minimize { file: PathBuf },
    /// Glue the minimal models of the last diagram in a file.
    Glue { file: PathBuf },
    /// List the shipped fixtures or emit one.
    Fixtures {
        name: String,
        /// Shape argument of parametrized fixtures.
        arg: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Budget,
    InputError,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Pass => PASS,
            Status::Fail => FAIL,
            Status::Budget => BUDGET,
            Status::InputError => INPUT,
        }
    }

    fn of(pass: bool, budget_hit: bool) -> Status {
        if pass {
            Status::Pass
        } else if budget_hit {
            Status::Budget
        } else {
            Status::Fail
        }
    }

    fn of_error(e: &DendroError) -> Status {
        match e {
            DendroError::Budget(_) => Status::Budget,
            DendroError::NotNormal(_)
            | DendroError::NotMono(_)
            | DendroError::NotDegeneracy(_)
            | DendroError::Precondition(_)
            | DendroError::Algorithm(_) => Status::Fail,
            _ => Status::InputError,
        }
    }
}

/// The result of one invocation: exit code, JSON report and the text printed
/// without `--json`.
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    pub text: String,
    pub json: bool,
}

impl Outcome {
    /// What the command prints on standard output.
    pub fn output(&self) -> String {
        if self.json {
            serde_json::to_string_pretty(&self.report).expect("reports serialize") + "\n"
        } else {
            self.text.clone()
        }
    }
}

struct Done {
    status: Status,
    result: Value,
    text: String,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn read_doc(path: &Path) -> Result<Document> {
    let src = fs::read_to_string(path)?;
    parse(&src)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(DendroError::from)
}

fn degree_counts(x: &FinitePresheaf) -> Vec<usize> {
    let top = x.max_degree().map_or(0, |d| d + 1);
    (0..top).map(|n| x.generators().iter().filter(|g| g.shape.degree() == n).count()).collect()
}

fn family(arg: &str) -> Result<Family> {
    match arg {
        "trivial" => Ok(Family::Trivial),
        "inner" => Ok(Family::Inner),
        "left" => Ok(Family::Left),
        s => match s.strip_prefix("custom:") {
            Some(file) => Ok(Family::Custom(read_doc(Path::new(file))?.horns)),
            None => Err(DendroError::Unknown(format!("family {s}"))),
        },
    }
}

fn minimize_options(c: &Common) -> Result<MinimizeOptions> {
    Ok(MinimizeOptions {
        oracle: OracleOptions { budget: c.budget, ..OracleOptions::default() },
        family: family(&c.family)?,
        arity_cap: c.arity_cap,
    })
}

/// Runs the command line `args` (without the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let echo: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let json_flag = echo.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(std::iter::once("dendro".into()).chain(args)) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INPUT } else { PASS };
            return Outcome {
                code,
                report: json!({ "command": echo, "status": Status::InputError, "error": e.to_string() }),
                text: e.to_string(),
                json: json_flag && code != PASS,
            };
        }
    };
    let (common, done) = dispatch(cli);
    let bounds = json!({
        "max_degree": common.max_degree,
        "arity_cap": common.arity_cap,
        "budget": common.budget,
        "family": common.family,
    });
    let (status, result, text) = match done {
        Ok(d) => (d.status, d.result, d.text),
        Err(e) => {
            let status = Status::of_error(&e);
            (status, json!({ "error": e.to_string() }), format!("error: {e}\n"))
        }
    };
    let report = json!({ "command": echo, "bounds": bounds, "status": status, "result": result });
    Outcome { code: status.code(), report, text, json: common.json }
}

fn dispatch(cli: Cli) -> (Common, Result<Done>) {
    let mut c = cli.common;
    let default = match &cli.command {
        Command::Skeleton { .. } => None,
        Command::CheckFibration { .. } | Command::Minimize { .. } | Command::Glue { .. } => Some(2),
        _ => Some(3),
    };
    c.max_degree = c.max_degree.or(default);
    let done = match cli.command {
        Command::Validate { file } => validate(&file, &c),
        Command::Skeleton { file } => skeleton_cmd(&file, &c),
        Command::CheckEz { site } => check_ez(&site, &c),
        Command::CheckFibration { file } => check_fibration(&file, &c),
        Command::Minimize { file } => minimize_cmd(&file, &c),
        Command::Glue { file } => glue_cmd(&file, &c),
        Command::Fixtures { name, arg } => fixtures_cmd(&name, arg.as_deref(), &c),
    };
    (c, done)
}

fn validate(file: &Path, c: &Common) -> Result<Done> {
    let doc = read_doc(file)?;
    let d = c.max_degree.unwrap_or(3);
    let mut items = Vec::new();
    let mut text = String::new();
    let mut pass = true;
    for x in &doc.presheaves {
        let f = validate_functoriality(x, d);
        let normal = x.non_normal_witness().map(|(g, phi)| format!("generator {} is fixed by {phi:?}", x.generator(g).name));
        let ok = f.pass && normal.is_none();
        pass &= ok;
        text += &format!("presheaf {}: functoriality {}, normal {}\n", x.name(), verdict(f.pass), verdict(normal.is_none()));
        if let Some(w) = &normal {
            text += &format!("  witness: {w}\n");
        }
        for v in &f.violations {
            text += &format!("  violation: {v}\n");
        }
        items.push(json!({
            "presheaf": x.name(),
            "generators": degree_counts(x),
            "functoriality": f,
            "normality_witness": normal,
            "pass": ok,
        }));
    }
    let maps: Vec<Value> = doc
        .maps
        .iter()
        .map(|(name, m)| json!({ "map": name, "mono": m.is_mono(), "normal_mono": m.is_normal_mono().unwrap_or(false) }))
        .collect();
    text += &format!(
        "{} trees, {} tree maps, {} maps, {} diagrams parsed\n",
        doc.trees.len(),
        doc.morphisms.len(),
        doc.maps.len(),
        doc.diagrams.len()
    );
    text += &format!("status: {}\n", verdict(pass));
    let result = json!({
        "max_degree": d,
        "presheaves": items,
        "maps": maps,
        "trees": doc.trees.len(),
        "tree_maps": doc.morphisms.len(),
        "diagrams": doc.diagrams.len(),
    });
    Ok(Done { status: Status::of(pass, false), result, text })
}

fn need_degree(c: &Common) -> Result<usize> {
    c.max_degree.ok_or_else(|| DendroError::Unknown("this command needs --max-degree".into()))
}

fn skeleton_cmd(file: &Path, c: &Common) -> Result<Done> {
    let doc = read_doc(file)?;
    let x = doc.last_presheaf()?;
    let n = need_degree(c)?;
    let sk = skeleton(x, n as isize);
    let text = emit_presheaf(sk.source());
    let result = json!({
        "presheaf": x.name(),
        "generators": degree_counts(x),
        "skeleton": degree_counts(sk.source()),
        "normal": x.is_normal(),
    });
    Ok(Done { status: Status::Pass, result, text: emit_or_print(&c.emit, text)? })
}

/// Writes `text` to the first `--emit` path, or returns it for printing.
fn emit_or_print(emit: &[PathBuf], text: String) -> Result<String> {
    match emit.first() {
        Some(path) => {
            write(path, &text)?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(text),
    }
}

fn check_ez(site: &str, c: &Common) -> Result<Done> {
    let d = c.max_degree.unwrap_or(3);
    let group = |prefix: &str| site.strip_prefix(prefix).and_then(|n| n.parse::<usize>().ok());
    let report = match site {
        "omega" => check_ez_axioms(&Omega::with_arity_cap(c.arity_cap), d),
        "simplex" => check_ez_axioms(&Simplex, d),
        "finset" => check_ez_axioms(&FinSet, d),
        "gamma" => check_ez_axioms(&Gamma, d),
        _ => match (group("cyclic"), group("symmetric")) {
            (Some(n), _) => check_ez_axioms(&FiniteGroup::cyclic(n), d),
            (_, Some(n)) => check_ez_axioms(&FiniteGroup::symmetric(n), d),
            _ => return Err(DendroError::Unknown(format!("site {site}"))),
        },
    };
    let mut text = format!(
        "{}: {} objects, {} morphisms, {} minus maps up to degree {d}: {}\n",
        report.site,
        report.objects,
        report.morphisms,
        report.minus_maps,
        verdict(report.pass)
    );
    for v in &report.violations {
        text += &format!("  violation: {v}\n");
    }
    let mut pass = report.pass;
    let mut result = json!({ "axioms": report });
    if site == "omega" {
        let po = check_absolute_pushouts(&Omega::with_arity_cap(c.arity_cap), d);
        text += &format!(
            "absolute pushouts: {} pairs, {} elementary: {}\n",
            po.pairs,
            po.elementary_pairs,
            verdict(po.pass)
        );
        for f in &po.failures {
            text += &format!("  failure: {f}\n");
        }
        pass &= po.pass;
        result["absolute_pushouts"] = to_value(&po);
    }
    text += &format!("status: {}\n", verdict(pass));
    Ok(Done { status: Status::of(pass, false), result, text })
}

fn check_fibration(file: &Path, c: &Common) -> Result<Done> {
    let doc = read_doc(file)?;
    let p = doc.last_map()?;
    let d = c.max_degree.unwrap_or(2);
    let r = has_rlp(p, &family(&c.family)?, d, c.arity_cap, c.budget);
    let mut text = format!(
        "{} -> {}: {} members, {} squares, family {} up to degree {d}: {}\n",
        p.source().name(),
        p.target().name(),
        r.members,
        r.squares,
        r.family,
        verdict(r.pass)
    );
    for f in &r.failures {
        text += &format!("  no lift for {} at {} with top {:?}\n", f.member, f.bottom, f.top);
    }
    for b in &r.budget_exhausted {
        text += &format!("  budget exhausted: {b}\n");
    }
    let status = Status::of(r.pass, r.failures.is_empty() && !r.budget_exhausted.is_empty());
    Ok(Done { status, result: to_value(&r), text })
}

fn minimize_cmd(file: &Path, c: &Common) -> Result<Done> {
    let doc = read_doc(file)?;
    let p = doc.last_map()?;
    let d = c.max_degree.unwrap_or(2);
    let opts = minimize_options(c)?;
    let res = match minimize(p, d, &opts) {
        Ok(res) => res,
        Err(f) => {
            let status = Status::of_error(&f.error);
            let text = format!("minimization stopped: {f}\nstatus: {}\n", verdict(false));
            let result = json!({ "error": f.error.to_string(), "logged": f.log.len() });
            return Ok(Done { status, result, text });
        }
    };
    let retract = verify_deformation_retract(&res);
    let skeletal = is_skeletal(&res.q, d, &opts.oracle);
    let pass = res.fibration.certified && retract.pass && skeletal.pass;
    let budget_hit = res.fibration.budget_exhausted > 0 || !skeletal.budget_exhausted.is_empty();
    let mut text = format!(
        "input {:?} -> model {:?} over {}\nfibration ({} up to degree {}): {}\n",
        degree_counts(p.source()),
        degree_counts(&res.m),
        p.target().name(),
        res.fibration.family,
        res.fibration.max_degree,
        verdict(res.fibration.certified)
    );
    for r in &res.report {
        text += &format!(
            "degree {}: {} classes, {} representatives, {} into the model, {} degenerate, {} lifted\n",
            r.degree,
            r.classes.len(),
            r.representatives.len(),
            r.into_model,
            r.degenerate,
            r.lifted
        );
    }
    text += &format!("deformation retract: {}\n", verdict(retract.pass));
    for f in &retract.failures {
        text += &format!("  {f}\n");
    }
    text += &format!("model skeletal: {}\n", verdict(skeletal.pass));
    for (a, b) in &skeletal.counterexamples {
        text += &format!("  {a} ~ {b}\n");
    }
    text += &format!("status: {}\n", verdict(pass));
    let result = json!({
        "bound": res.bound,
        "input": degree_counts(p.source()),
        "model": degree_counts(&res.m),
        "fibration": res.fibration,
        "degrees": res.report,
        "log": res.log_lines(),
        "retract": retract,
        "skeletal": skeletal,
    });
    let status = Status::of(pass, budget_hit);
    let full = json!({ "command": "minimize", "status": status, "result": result });
    let outputs = [emit_presheaf(&res.m), emit_map("r", &res.r), serde_json::to_string_pretty(&full).expect("reports serialize") + "\n"];
    for (path, out) in c.emit.iter().zip(outputs) {
        write(path, &out)?;
        text += &format!("wrote {}\n", path.display());
    }
    Ok(Done { status, result, text })
}

fn glue_cmd(file: &Path, c: &Common) -> Result<Done> {
    let doc = read_doc(file)?;
    let dia = doc.last_diagram()?;
    let d = c.max_degree.unwrap_or(2);
    let opts = minimize_options(c)?;
    let g = glue_left_fibrations(dia, d, &opts)?;
    let r = &g.report;
    let mut text = format!(
        "models {:?}, glued model with {} generators over a base with {}\n",
        r.model_sizes, r.glued_size, r.base_size
    );
    for f in &r.cartesian.fibers {
        text += &format!("side {} colour {}: {:?} ({})\n", f.side, f.colour, f.verdict, f.detail);
    }
    text += &format!(
        "restrictions isomorphic: {:?}; fibers match: {}; {} family up to degree {}: {}\nstatus: {}\n",
        r.restrictions_iso,
        verdict(r.fibers_match.iter().all(|(_, ok)| *ok)),
        r.rlp.family,
        r.rlp.max_degree,
        verdict(r.rlp.pass),
        verdict(r.pass)
    );
    if let Some(path) = c.emit.first() {
        let mut w = Writer::new();
        w.map(Some("q"), &g.q);
        w.map(Some("restriction1"), &g.restrictions[0]);
        w.map(Some("restriction2"), &g.restrictions[1]);
        write(path, &w.finish())?;
        text += &format!("wrote {}\n", path.display());
    }
    let status = Status::of(r.pass, !r.rlp.budget_exhausted.is_empty());
    Ok(Done { status, result: to_value(r), text })
}

fn fixtures_cmd(name: &str, arg: Option<&str>, c: &Common) -> Result<Done> {
    if name == "list" {
        let text: String = NAMES.iter().map(|(n, d)| format!("{n:<26} {d}\n")).collect();
        let result = json!(NAMES.iter().map(|(n, d)| json!({ "name": n, "description": d })).collect::<Vec<_>>());
        return Ok(Done { status: Status::Pass, result, text });
    }
    let d = c.max_degree.unwrap_or(3);
    let (text, result) = match fixture(name, arg, d)? {
        Fixture::Presheaf(x) => (
            emit_presheaf(&x),
            json!({ "kind": "presheaf", "name": x.name(), "generators": degree_counts(&x), "normal": x.is_normal() }),
        ),
        Fixture::Map(f) => (
            emit_map(name, &f),
            json!({
                "kind": "map",
                "source": degree_counts(f.source()),
                "target": degree_counts(f.target()),
                "source_normal": f.source().is_normal(),
                "target_normal": f.target().is_normal(),
            }),
        ),
        Fixture::Diagram(dia) => (emit_diagram(name, &dia), json!({ "kind": "diagram" })),
    };
    let text = emit_or_print(&c.emit, text)?;
    Ok(Done { status: Status::Pass, result, text })
}
