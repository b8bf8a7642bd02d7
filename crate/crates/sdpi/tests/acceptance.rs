//! The acceptance criteria, one PASS/FAIL line each. Exits non-zero if any
//! criterion fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use sdpi::alpha::{alpha_eq_fun, alpha_eq_proc, alpha_eq_sess, alpha_eq_term};
use sdpi::cli::{closed_process, main_with};
use sdpi::dynamics::{run, run_observed, Event, Outcome};
use sdpi::embed::{embed_decl, embed_term};
use sdpi::equality::{
    fun_eq_fuel, kind_eq_fuel, nf_term, proc_eq_with, sess_eq_fuel, term_eq_fuel, Fuel, Verdict,
};
use sdpi::meta::gen::Gen;
use sdpi::meta::{correspond, run_suite, worked_example, Suite};
use sdpi::surface::{parse_fun, parse_kind, parse_proc, parse_sess, parse_term, DeclBody, Pretty};
use sdpi::syntax::*;
use sdpi::typing::{check_file, Report};

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
}

fn load(name: &str) -> Report {
    let src = std::fs::read_to_string(example(name)).expect("example file");
    check_file(&src, name)
}

type Verdictish = Result<String, String>;

fn datadep() -> Verdictish {
    let t0 = Instant::now();
    let loose = load("datadep.sdp");
    let flipped = load("datadep_flipped.sdp");
    let row = |r: &Report, name: &str| r.get(name).is_some();
    let table = [
        ("Q at T", row(&loose, "Q"), true),
        ("Qflip at T", row(&loose, "Qflip"), true),
        ("R at T'", row(&loose, "R"), true),
        ("Rflip at T'", row(&flipped, "Rflip"), false),
    ];
    let elapsed = t0.elapsed();
    let shown: Vec<String> = table
        .iter()
        .map(|(n, got, _)| format!("{n} {}", if *got { "accepted" } else { "rejected" }))
        .collect();
    if table.iter().any(|(_, got, want)| got != want) {
        return Err(format!("verdicts {}", shown.join(", ")));
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} ({elapsed:?})", shown.join(", ")))
}

fn counter() -> Verdictish {
    let r = load("counter.sdp");
    let Some(d) = r.get("counter") else {
        return Err(format!("counter does not check: {:?}", r.diagnostics));
    };
    let want = parse_fun("pi x:Nat. { |- c: countDown [x] }").unwrap();
    let DeclBody::Term { ty, .. } = &d.body else {
        return Err("counter is not a term".into());
    };
    // the declared type mentions the family by name; compare after unfolding
    let unfold = |t: &FunType| {
        let fam = parse_sess("\\x:Nat. natrecS x 1 (n, r => exists y:Nat. r)").unwrap();
        sdpi::subst::Substitutable::subst_sess(t, "countDown", &fam)
    };
    if fun_eq_fuel(
        &Psi::new(),
        &unfold(ty),
        &unfold(&want),
        &mut Fuel::default(),
    ) != Verdict::Yes
    {
        return Err(format!("counter has type {ty}"));
    }
    let demo = r.get("demo").ok_or("demo does not check")?;
    let (p, root) = closed_process(demo).ok_or("demo is not closed")?;
    let mut reference: Option<Vec<u64>> = None;
    for seed in 0..50 {
        let run = run(&p, &root, seed, 10_000);
        if run.outcome != Outcome::Quiescent || !run.stuck().is_empty() {
            return Err(format!("seed {seed}: did not quiesce cleanly"));
        }
        let mut payloads = vec![];
        for e in &run.trace {
            if let Event::ValueComm { payload, .. } = &e.event {
                let m = parse_term(payload).map_err(|e| format!("payload {payload}: {e}"))?;
                let n = nf_term(&m, &mut Fuel::default())
                    .ok()
                    .and_then(|n| n.as_nat())
                    .ok_or(format!("payload {payload} is not a numeral"))?;
                payloads.push(n);
            }
        }
        payloads.sort();
        if payloads != [1, 2] {
            return Err(format!("seed {seed}: payloads {payloads:?}"));
        }
        match &reference {
            None => reference = Some(payloads),
            Some(r) if *r != payloads => return Err(format!("seed {seed}: payloads differ")),
            _ => {}
        }
    }
    Ok("2 ValueComm events carrying 2 and 1 under 50 seeds".into())
}

fn worked_embedding() -> Verdictish {
    let r = load("embed_id.sdp");
    let d = r.get("example").ok_or("example does not check")?;
    let e = embed_decl(d).map_err(|e| e.to_string())?;
    let DeclBody::Proc { body, .. } = &e.body else {
        return Err("translation is not a process".into());
    };
    let u = "{ |- c:1 }";
    let f = format!("{u} => {u} => 1");
    let ff = format!("{{ |- c:{f} }} => {f}");
    let printed = format!(
        "nu c:{ff}. (recv c (x). y : {f} <- x; fwd y c || send c <{{ w <- recv w (x). recv w (y). d : 1 <- y; fwd d w }} : {ff}>. fwd c z)"
    );
    let expected = parse_proc(&printed).map_err(|e| e.to_string())?;
    if !alpha_eq_proc(body, &expected) {
        return Err(format!("got {}", body.pretty()));
    }
    let (m, t) = worked_example();
    let z: Name = "z".into();
    let p = embed_term(&m, &t, &z).map_err(|e| e.to_string())?;
    let target = embed_term(
        &parse_term(&format!("\\x:{u}. \\y:{u}. y")).unwrap(),
        &t,
        &z,
    )
    .map_err(|e| e.to_string())?;
    for seed in 0..20 {
        let mut at = None;
        let mut n = 0;
        run_observed(&p, &z, seed, 4, |cfg, _| {
            n += 1;
            if at.is_none()
                && proc_eq_with(&cfg.rebuild(), &target, &z, &mut Fuel::default()).is_yes()
            {
                at = Some(n);
            }
        });
        if at.is_none() {
            return Err(format!("seed {seed}: target not reached in 4 steps"));
        }
    }
    Ok("translation matches the printed one; target reached within 4 steps".into())
}

fn equality_axioms() -> Verdictish {
    let psi = Psi::new()
        .with_term("f", parse_fun("pi x:Bool. Bool").unwrap())
        .with_term("m", parse_fun("{ |- c:1 }").unwrap());
    let t = |s: &str| parse_term(s).unwrap();
    let s = |x: &str| parse_sess(x).unwrap();
    let p = |x: &str| parse_proc(x).unwrap();
    let fuel = || Fuel::default();
    let c: Name = "c".into();
    let cases: Vec<(&str, Verdict, Verdict)> = vec![
        (
            "beta",
            term_eq_fuel(
                &psi,
                &t("(\\x:Bool. ifT x ff tt) tt"),
                &t("ff"),
                &mut fuel(),
            ),
            Verdict::Yes,
        ),
        (
            "eta",
            term_eq_fuel(&psi, &t("\\x:Bool. f x"), &t("f"), &mut fuel()),
            Verdict::Yes,
        ),
        (
            "monadic eta",
            term_eq_fuel(&psi, &t("{ c <- y <- m; fwd y c }"), &t("m"), &mut fuel()),
            Verdict::Yes,
        ),
        (
            "type-level beta",
            sess_eq_fuel(
                &psi,
                &s("(\\x:Bool. ifS x (Nat /\\ 1) 1) [tt]"),
                &s("Nat /\\ 1"),
                &mut fuel(),
            ),
            Verdict::Yes,
        ),
        (
            "forall eta",
            proc_eq_with(
                &p("fwd d c"),
                &p("recv c (x). send d <x : forall x:Nat. 1>. fwd d c"),
                &c,
                &mut fuel(),
            ),
            Verdict::Yes,
        ),
        (
            "forall commuting conversion",
            proc_eq_with(
                &p("nu d:Nat /\\ 1. (send d <1 : Nat /\\ 1>. end || recv c (x). recv d (y). end)"),
                &p("recv c (x). nu d:Nat /\\ 1. (send d <1 : Nat /\\ 1>. end || recv d (y). end)"),
                &c,
                &mut fuel(),
            ),
            Verdict::Yes,
        ),
        (
            "false terms",
            term_eq_fuel(&psi, &t("tt"), &t("ff"), &mut fuel()),
            Verdict::No,
        ),
        (
            "false types",
            fun_eq_fuel(
                &psi,
                &parse_fun("Bool").unwrap(),
                &parse_fun("Nat").unwrap(),
                &mut fuel(),
            ),
            Verdict::No,
        ),
        (
            "false session types",
            sess_eq_fuel(&psi, &s("Nat /\\ 1"), &s("Bool /\\ 1"), &mut fuel()),
            Verdict::No,
        ),
        (
            "false kinds",
            kind_eq_fuel(
                &psi,
                &parse_kind("type").unwrap(),
                &parse_kind("stype").unwrap(),
                &mut fuel(),
            ),
            Verdict::No,
        ),
        (
            "false processes",
            proc_eq_with(
                &p("send c <tt : Bool /\\ 1>. end"),
                &p("send c <ff : Bool /\\ 1>. end"),
                &c,
                &mut fuel(),
            ),
            Verdict::No,
        ),
    ];
    let undecided = cases
        .iter()
        .filter(|(_, got, _)| *got == Verdict::Undecided)
        .count();
    let wrong: Vec<String> = cases
        .iter()
        .filter(|(_, got, want)| got != want)
        .map(|(n, got, _)| format!("{n}: {got}"))
        .collect();
    if !wrong.is_empty() || undecided > 0 {
        return Err(wrong.join(", "));
    }
    Ok(format!(
        "{} instances as expected, none undecided",
        cases.len()
    ))
}

fn metatheory() -> Verdictish {
    let t0 = Instant::now();
    let mut parts = vec![];
    for suite in [
        Suite::SubjectReductionTerms,
        Suite::SubjectReductionProcs,
        Suite::Progress,
    ] {
        let r = run_suite(suite, 500, 0);
        if r.failed > 0 {
            return Err(format!(
                "{suite}: {} failures, first: {} -- {}",
                r.failed, r.failures[0].reason, r.failures[0].counterexample
            ));
        }
        parts.push(format!(
            "{suite} {}/{} (skipped {}, undecided {})",
            r.passed, r.iters, r.skipped, r.undecided
        ));
    }
    let elapsed = t0.elapsed();
    if elapsed >= Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} in {elapsed:?}", parts.join("; ")))
}

fn embedding_suites() -> Verdictish {
    let typing = run_suite(Suite::EmbedTyping, 300, 0);
    if typing.failed > 0 {
        return Err(format!("embed-typing: {}", typing.failures[0].reason));
    }
    let comp = run_suite(Suite::EmbedCompositionality, 300, 0);
    if comp.failed > 0 {
        return Err(format!(
            "embed-compositionality: {}",
            comp.failures[0].reason
        ));
    }
    if comp.undecided * 20 > comp.iters {
        return Err(format!(
            "embed-compositionality: {} undecided",
            comp.undecided
        ));
    }
    let (m, t) = worked_example();
    match correspond(&m, &t, 0) {
        sdpi::meta::Outcome::Pass => {}
        other => return Err(format!("corpus correspondence: {other:?}")),
    }
    let corr = run_suite(Suite::EmbedCorrespondence, 300, 0);
    if corr.failed > 0 || corr.undecided > 0 {
        return Err(format!(
            "embed-correspondence: {} failed, {} undecided",
            corr.failed, corr.undecided
        ));
    }
    Ok(format!(
        "typing {}/300, compositionality {}/300 ({} undecided), correspondence corpus + {}/300",
        typing.passed, comp.passed, comp.undecided, corr.passed
    ))
}

/// Counts the nodes of a process, terms and types included.
fn size(p: &Process) -> usize {
    p.pretty()
        .split(|c: char| c.is_whitespace() || "().<>{}".contains(c))
        .filter(|w| !w.is_empty())
        .count()
}

fn round_trip_and_determinism() -> Verdictish {
    let mut nodes = 0;
    let mut artifacts = 0;
    let mut seed = 0;
    while nodes < 1000 || artifacts < 300 {
        let mut g = Gen::new(seed, seed % 3 == 0);
        seed += 1;
        let a = g.sess(3);
        let t = g.fun_type(2);
        if !parse_sess(&a.pretty()).is_ok_and(|b| alpha_eq_sess(&a, &b)) {
            return Err(format!("session type {a} does not read back"));
        }
        if !parse_fun(&t.pretty()).is_ok_and(|u| alpha_eq_fun(&t, &u)) {
            return Err(format!("type {t} does not read back"));
        }
        if let Some(m) = g.term(&Psi::new(), &t, 3) {
            if !parse_term(&m.pretty()).is_ok_and(|n| alpha_eq_term(&m, &n)) {
                return Err(format!("term {m} does not read back"));
            }
        }
        if let Some(p) = g.proc(&Psi::new(), &"c".into(), &a, 3) {
            if !parse_proc(&p.pretty()).is_ok_and(|q| alpha_eq_proc(&p, &q)) {
                return Err(format!("process {p} does not read back"));
            }
            nodes += size(&p);
        }
        artifacts += 1;
    }
    let path = example("counter.sdp").display().to_string();
    let invoke = || {
        let mut out = vec![];
        let mut err = vec![];
        let args = [
            "sdpi",
            "run",
            path.as_str(),
            "--main",
            "demo",
            "--seed",
            "17",
            "--json",
        ]
        .map(String::from);
        let code = main_with(args, &mut out, &mut err);
        (code, out)
    };
    let first = invoke();
    for _ in 0..5 {
        if invoke() != first {
            return Err("run output differs between invocations".into());
        }
    }
    if first.0 != 0 {
        return Err(format!("run exited {}", first.0));
    }
    Ok(format!("{artifacts} artifacts ({nodes}+ process nodes) read back up to bound names; 6 identical runs"))
}

fn main() {
    let criteria: [(&str, fn() -> Verdictish); 7] = [
        ("1 data-dependent protocol verdicts", datadep),
        ("2 indexed counter", counter),
        ("3 worked embedding", worked_embedding),
        ("4 equality axioms", equality_axioms),
        ("5 metatheory suites", metatheory),
        ("6 embedding suites", embedding_suites),
        ("7 round trip and determinism", round_trip_and_determinism),
    ];
    let mut failed = BTreeMap::new();
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                println!("FAIL {name}: {why}");
                failed.insert(name, why);
            }
        }
    }
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
