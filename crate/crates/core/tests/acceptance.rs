//! Runs the ten acceptance criteria and prints one line per criterion.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;

use dendro::fixtures::{self, fixture, Fixture};
use dendro::glue::{check_trivial_fibers_implies_trivial, glue_left_fibrations, FiberBranch};
use dendro::homotopy::{has_rlp, rep_cylinder, tensor_interval, Family, OracleOptions};
use dendro::minimize::{
    check_pullback_minimality, is_skeletal, minimize, verify_deformation_retract, verify_retraction_trivial, MinimizeOptions,
};
use dendro::presheaf::{representable_arc, FinitePresheaf, PresheafMap};
use dendro::site::omega::{check_absolute_pushouts, degeneracies, face_with_image};
use dendro::site::simplex::Simplex;
use dendro::site::{check_ez_axioms, Omega, Shape};
use dendro::DendroError;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn map_fixture(name: &str, arg: Option<&str>, d: usize) -> PresheafMap {
    match fixture(name, arg, d).unwrap() {
        Fixture::Map(m) => m,
        _ => panic!("{name} is not a map"),
    }
}

fn counts(x: &FinitePresheaf) -> Vec<usize> {
    let top = x.max_degree().map_or(0, |d| d + 1);
    (0..top).map(|n| x.generators().iter().filter(|g| g.shape.degree() == n).count()).collect()
}

fn ez_axioms() -> Outcome {
    let omega = check_ez_axioms(&Omega::with_arity_cap(3), 3);
    ensure(omega.pass, format!("omega: {:?}", omega.violations))?;
    let delta = check_ez_axioms(&Simplex, 4);
    ensure(delta.pass, format!("simplex: {:?}", delta.violations))?;
    let codes = common::tree_codes(3, 3);
    let expected: usize = codes.iter().map(|c| c.len()).sum();
    ensure(omega.objects == expected, format!("{} trees enumerated, {expected} generated recursively", omega.objects))?;
    Ok(format!("{} trees, {} morphisms; simplex {} morphisms", omega.objects, omega.morphisms, delta.morphisms))
}

fn absolute_pushouts() -> Outcome {
    let r = check_absolute_pushouts(&Omega::with_arity_cap(3), 3);
    ensure(r.pass, format!("{:?}", r.failures))?;
    ensure(r.elementary_pairs > 0, "no elementary pairs")?;
    Ok(format!("{} pairs, {} elementary", r.pairs, r.elementary_pairs))
}

fn normal_forms() -> Outcome {
    let mut generators = 0;
    for seed in 0..100u64 {
        let x = common::random_normal(seed);
        ensure(x.len() <= 12 && x.max_degree().unwrap_or(0) <= 3, "fixture out of range")?;
        ensure(x.is_normal(), format!("seed {seed}: not normal"))?;
        common::normal_form_check(&x, 3).map_err(|e| format!("seed {seed}: {e}"))?;
        generators += x.len();
    }
    Ok(format!("100 fixtures, {generators} generators"))
}

fn cylinders() -> Outcome {
    let eta = tensor_interval(&representable_arc(&Shape::eta())).map_err(|e| e.to_string())?;
    let l1 = representable_arc(&Shape::linear(1));
    ensure(counts(&eta.cylinder.object) == counts(&l1), "eta x I is not an interval")?;
    ensure(eta.cylinder.object.generators().iter().any(|g| g.shape == Shape::linear(1)), "no arrow")?;
    let square = rep_cylinder(&Shape::linear(1), 1);
    let shuffles = {
        let points = [(0, 0), (0, 1), (1, 0), (1, 1)];
        let lt = |a: (i32, i32), b: (i32, i32)| a != b && a.0 <= b.0 && a.1 <= b.1;
        let mut n = 0;
        for a in points {
            for b in points {
                for c in points {
                    if lt(a, b) && lt(b, c) {
                        n += 1;
                    }
                }
            }
        }
        n
    };
    let top = counts(&square.object).get(2).copied().unwrap_or(0);
    ensure(top == 2 && top == shuffles, format!("{top} triangles, {shuffles} shuffles"))?;
    let mut fixtures: Vec<Arc<FinitePresheaf>> =
        ["|", "(|)", "()", "(||)", "((|))", "(()|)", "((|)|)"].iter().map(|c| representable_arc(&Shape::from_code(c).unwrap())).collect();
    fixtures.push(fixtures::e_nerve(3).unwrap());
    fixtures.push(map_fixture("two-points", None, 2).source().clone());
    fixtures.push(map_fixture("e-times-interval", None, 2).source().clone());
    for x in &fixtures {
        let t = tensor_interval(x).map_err(|e| e.to_string())?;
        let id = PresheafMap::identity(x);
        for end in [&t.i0, &t.i1] {
            ensure(t.proj.after(end).unwrap().assignment() == id.assignment(), format!("{}: end is not a section", x.name()))?;
        }
    }
    Ok(format!("{} fixtures", fixtures.len()))
}

fn minimization() -> Outcome {
    let opts = MinimizeOptions::default();
    let mut cases: Vec<(String, PresheafMap)> = Omega::with_arity_cap(3)
        .objects(2)
        .into_iter()
        .map(|s| (format!("identity {s}"), PresheafMap::identity(&representable_arc(&s))))
        .collect();
    cases.push(("e-over-point".into(), map_fixture("e-over-point", None, 3)));
    cases.push(("interval-over-point".into(), map_fixture("interval-over-point", None, 2)));
    for (name, p) in &cases {
        let res = minimize(p, 2, &opts).map_err(|e| format!("{name}: {e}"))?;
        ensure(res.fibration.certified, format!("{name}: not certified as a fibration"))?;
        let v = verify_deformation_retract(&res);
        ensure(v.pass, format!("{name}: {:?}", v.failures))?;
        let s = is_skeletal(&res.q, 2, &opts.oracle);
        ensure(s.pass, format!("{name}: model not skeletal {:?}", s.counterexamples))?;
        let again = minimize(&res.q, 2, &opts).map_err(|e| format!("{name}: {e}"))?;
        ensure(again.is_identity(), format!("{name}: not idempotent"))?;
        match name.as_str() {
            "e-over-point" => ensure(res.m.len() == 1, "groupoid nerve does not collapse to a point")?,
            "interval-over-point" => ensure(res.is_identity(), "interval is changed")?,
            _ => ensure(res.is_identity(), format!("{name}: identity is changed"))?,
        }
    }
    Ok(format!("{} fibrations", cases.len()))
}

fn retraction_trivial() -> Outcome {
    let opts = MinimizeOptions::default();
    let mut checked = 0;
    let mut maps: Vec<PresheafMap> =
        Omega::with_arity_cap(2).objects(2).iter().map(|s| PresheafMap::identity(&representable_arc(s))).collect();
    maps.push(map_fixture("e-over-point", None, 3));
    maps.push(map_fixture("interval-over-point", None, 2));
    maps.push(map_fixture("two-points", None, 2));
    maps.push(map_fixture("e-times-interval", None, 3));
    for p in &maps {
        let res = minimize(p, 2, &opts).map_err(|e| e.to_string())?;
        let t = verify_retraction_trivial(&res, 2, 2, 2_000_000).map_err(|e| e.to_string())?;
        ensure(t.pass, format!("{}: {:?}", p.source().name(), t.rlp.failures))?;
        checked += 1;
    }
    let q = map_fixture("c2-quotient", None, 2);
    let res = minimize(&q, 2, &opts).map_err(|e| e.to_string())?;
    match verify_retraction_trivial(&res, 2, 2, 100_000) {
        Err(DendroError::NotNormal(w)) if w.contains("fixed by") => {}
        other => return Err(format!("quotient base accepted: {:?}", other.map(|r| r.pass))),
    }
    Ok(format!("{checked} fibrations, quotient base rejected"))
}

fn pullback_minimality() -> Outcome {
    let opts = OracleOptions::default();
    let l1 = Shape::linear(1);
    let (p, _) = fixtures::e_times_interval(3).unwrap();
    let q = minimize(&p, 2, &MinimizeOptions::default()).map_err(|e| e.to_string())?.q;
    let x = representable_arc(&l1);
    let colour = {
        let d = face_with_image(&l1, &[1]).unwrap();
        dendro::presheaf::yoneda(&x, &x.act(&d, &x.gen_element(x.len() - 1)).unwrap())
    };
    let boundary = dendro::presheaf::boundary(&l1);
    let sigma = degeneracies(&Shape::linear(2), &l1).remove(0);
    let info = dendro::presheaf::rep_info(&l1);
    let collapse = dendro::presheaf::yoneda(&x, &info.element(&sigma));
    for (name, f) in [("colour", colour), ("boundary", boundary), ("degeneracy", collapse)] {
        let f = f.with_target(q.target().clone());
        let r = check_pullback_minimality(&f, &q, 2, &opts).map_err(|e| e.to_string())?;
        ensure(r.fibration_skeletal, "model is not skeletal")?;
        ensure(r.hypothesis_holds, format!("{name}: {:?}", r.hypothesis_witness))?;
        ensure(r.pullback.pass, format!("{name}: pullback not skeletal {:?}", r.pullback.counterexamples))?;
    }
    let tq = map_fixture("c2-quotient", None, 2);
    let id = PresheafMap::identity(tq.target());
    let r = check_pullback_minimality(&tq, &id, 2, &opts).map_err(|e| e.to_string())?;
    ensure(!r.hypothesis_holds && r.hypothesis_witness.is_some(), "no witness on the quotient projection")?;
    Ok(format!("3 base changes, witness: {}", r.hypothesis_witness.unwrap()))
}

fn gluing() -> Outcome {
    let dia = fixtures::wedge_glue(3).unwrap();
    let g = glue_left_fibrations(&dia, 2, &MinimizeOptions::default()).map_err(|e| e.to_string())?;
    let r = &g.report;
    ensure(r.rlp.pass && r.rlp.family == "left", format!("{:?}", r.rlp.failures))?;
    ensure(r.restrictions_iso == [true, true], "restrictions are not isomorphisms")?;
    ensure(r.fibers_match.iter().all(|(_, ok)| *ok), format!("{:?}", r.fibers_match))?;
    let again = has_rlp(&g.q, &Family::Left, 2, 3, 2_000_000);
    ensure(again.pass, "left lifting fails on recheck")?;
    ensure(r.pass, "report fails")?;
    Ok(format!("models {:?} glued to {}", r.model_sizes, r.glued_size))
}

fn trivial_fibers() -> Outcome {
    let opts = MinimizeOptions::default();
    let p = map_fixture("e-over-point", None, 3);
    let r = check_trivial_fibers_implies_trivial(&p, 2, &opts).map_err(|e| e.to_string())?;
    ensure(r.branch == FiberBranch::PointFibers, "point fibers not detected")?;
    ensure(r.model_is_iso == Some(true), "minimal model is not an isomorphism")?;
    ensure(r.rlp.as_ref().is_some_and(|x| x.pass) && r.pass, "trivial lifting fails")?;
    let two = map_fixture("two-points", None, 2);
    let r = check_trivial_fibers_implies_trivial(&two, 2, &opts).map_err(|e| e.to_string())?;
    ensure(r.branch == FiberBranch::FibersNontrivial, "two-point fiber not detected")?;
    Ok(format!("negative branch: {:?}", r.nontrivial))
}

fn workdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dendro-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn determinism() -> Outcome {
    let dir = workdir();
    let bin = env!("CARGO_BIN_EXE_dendro");
    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).current_dir(&dir).output().expect("binary runs");
        (out.status.code(), out.stdout)
    };
    for setup in [
        &["fixtures", "c2-quotient", "--emit", "c.dmap"][..],
        &["fixtures", "e-over-point", "--max-degree", "3", "--emit", "e.dmap"],
        &["fixtures", "e-nerve", "--max-degree", "3", "--emit", "e.dpsh"],
        &["fixtures", "wedge-glue", "--max-degree", "3", "--emit", "w.dglue"],
    ] {
        ensure(run(setup).0 == Some(0), format!("{setup:?} failed"))?;
    }
    let commands: Vec<Vec<&str>> = vec![
        vec!["fixtures", "list", "--json"],
        vec!["fixtures", "e-nerve", "--max-degree", "3", "--json"],
        vec!["fixtures", "rep", "C2", "--json"],
        vec!["validate", "c.dmap", "--json"],
        vec!["validate", "e.dmap", "--json"],
        vec!["skeleton", "e.dpsh", "--max-degree", "1", "--json"],
        vec!["check-ez", "--site", "omega", "--max-degree", "3", "--arity-cap", "3", "--json"],
        vec!["check-ez", "--site", "simplex", "--max-degree", "4", "--json"],
        vec!["check-fibration", "e.dmap", "--family", "left", "--max-degree", "3", "--arity-cap", "1", "--json"],
        vec!["minimize", "e.dmap", "--max-degree", "2", "--emit", "M.dpsh", "r.dmap", "report.json", "--json"],
        vec!["glue", "w.dglue", "--max-degree", "2", "--json"],
    ];
    let outputs = ["M.dpsh", "r.dmap", "report.json"];
    for args in &commands {
        let first = run(args);
        let files: Vec<Vec<u8>> = outputs.iter().map(|f| std::fs::read(dir.join(f)).unwrap_or_default()).collect();
        let second = run(args);
        let again: Vec<Vec<u8>> = outputs.iter().map(|f| std::fs::read(dir.join(f)).unwrap_or_default()).collect();
        ensure(first == second && files == again, format!("{args:?} differs between runs"))?;
        serde_json::from_slice::<serde_json::Value>(&first.1).map_err(|e| format!("{args:?}: {e}"))?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} commands", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("EZ axioms", ez_axioms),
        ("absolute pushouts", absolute_pushouts),
        ("EZ normal form", normal_forms),
        ("cylinder sanity", cylinders),
        ("minimization", minimization),
        ("trivial retraction", retraction_trivial),
        ("pullback minimality", pullback_minimality),
        ("gluing", gluing),
        ("trivial fibers", trivial_fibers),
        ("determinism", determinism),
    ];
    let mut failed = BTreeSet::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
                failed.insert(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
