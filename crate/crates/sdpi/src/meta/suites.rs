use rand::Rng;

use super::gen::Gen;
use super::{Outcome, Suite};
use crate::dynamics::{run, run_observed, step_term};
use crate::embed::{embed_fun, embed_term, embed_term_in, EmbedError};
use crate::equality::{proc_eq_with, sess_eq_fuel, term_eq_fuel, Fuel, Verdict};
use crate::subst::Substitutable;
use crate::syntax::*;
use crate::typing::{check_closed, check_term, elaborate_term};

/// Generation depth of a fresh case; failures are retried shallower.
const DEPTH: usize = 4;
/// Target steps allowed per source step in the correspondence check.
pub const K: usize = 8;
const SEEDS: u64 = 3;

pub(super) fn run_case(suite: Suite, seed: u64) -> Outcome {
    let case = |depth| match suite {
        Suite::SubjectReductionTerms => sr_terms(seed, depth),
        Suite::SubjectReductionProcs => sr_procs(seed, depth),
        Suite::Progress => progress(seed, depth),
        Suite::EmbedTyping => embed_typing(seed, depth),
        Suite::EmbedCompositionality => compositionality(seed, depth),
        Suite::EmbedCorrespondence => correspondence(seed, depth),
        Suite::EqualityLaws => laws(seed, depth),
    };
    let first = case(DEPTH);
    if !matches!(first, Outcome::Fail { .. }) {
        return first;
    }
    // shrink: the same seed at smaller depths, keeping the last failure
    let mut best = first;
    for d in (0..DEPTH).rev() {
        match case(d) {
            f @ Outcome::Fail { .. } => best = f,
            _ => break,
        }
    }
    best
}

fn fail(counterexample: impl std::fmt::Display, reason: impl Into<String>) -> Outcome {
    Outcome::Fail {
        counterexample: counterexample.to_string(),
        reason: reason.into(),
    }
}

fn verdict(v: Verdict, what: impl std::fmt::Display, reason: &str) -> Outcome {
    match v {
        Verdict::Yes => Outcome::Pass,
        Verdict::No => fail(what, reason),
        Verdict::Undecided => Outcome::Undecided(what.to_string()),
    }
}

fn checked_term(g: &mut Gen, psi: &Psi, t: &FunType, depth: usize) -> Option<Term> {
    let m = g.term(psi, t, depth)?;
    elaborate_term(psi, &m, t).ok()
}

/// A closed system: a provider of `x:B` composed with a client of `x`
/// offering `c:A`. Returned elaborated.
fn system(g: &mut Gen, a: &SessType, depth: usize) -> Option<Process> {
    let b = g.sess(depth.min(3));
    let x = g.fresh("x");
    let c: Name = "c".into();
    let provider = g.proc(&Psi::new(), &x, &b, depth)?;
    let client = g.proc_using(&Psi::new(), &[(x.clone(), b.clone())], &c, a, depth)?;
    let p = Process::New {
        bind: x,
        anno: Some(b),
        left: Box::new(provider),
        right: Box::new(client),
    };
    check_closed(&TriCtx::default(), &p, &c, a).ok()
}

fn sr_terms(seed: u64, depth: usize) -> Outcome {
    let mut g = Gen::new(seed, false);
    let t = if g.rng.gen_bool(0.6) {
        FunType::Base(if g.rng.gen_bool(0.5) {
            Base::Bool
        } else {
            Base::Nat
        })
    } else {
        g.fun_type(2)
    };
    let Some(mut m) = checked_term(&mut g, &Psi::new(), &t, depth) else {
        return Outcome::Skip;
    };
    for _ in 0..64 {
        let Some(next) = step_term(&m) else { break };
        if let Err(e) = check_term(&Psi::new(), &next, &t) {
            return fail(
                format!("{m} ~> {next} at {t}"),
                format!("reduct is ill typed: {e}"),
            );
        }
        m = next;
    }
    Outcome::Pass
}

fn sr_procs(seed: u64, depth: usize) -> Outcome {
    let mut g = Gen::new(seed, false);
    let a = g.sess(depth.min(3));
    let Some(p) = system(&mut g, &a, depth) else {
        return Outcome::Skip;
    };
    let c: Name = "c".into();
    let mut bad = None;
    run_observed(&p, &c, seed, 200, |cfg, ev| {
        if bad.is_none() {
            let q = cfg.rebuild();
            if let Err(e) = check_closed(&TriCtx::default(), &q, &c, &a) {
                bad = Some((q, format!("after {ev}: {e}")));
            }
        }
    });
    match bad {
        None => Outcome::Pass,
        Some((q, why)) => fail(format!("{p}  ~>*  {q}  at c:{a}"), why),
    }
}

fn progress(seed: u64, depth: usize) -> Outcome {
    let mut g = Gen::new(seed, false);
    let Some(p) = system(&mut g, &SessType::One, depth) else {
        return Outcome::Skip;
    };
    let r = run(&p, &"c".into(), seed, 10_000);
    if r.outcome != crate::dynamics::Outcome::Quiescent {
        return Outcome::Undecided(p.to_string());
    }
    let stuck = r.stuck();
    if stuck.is_empty() {
        Outcome::Pass
    } else {
        fail(
            format!("{p}  ~>*  {}", r.final_process()),
            format!("{} live threads blocked", stuck.len()),
        )
    }
}

/// A context of up to two variables for the fragment.
fn fragment_psi(g: &mut Gen) -> Psi {
    let mut psi = Psi::new();
    for _ in 0..g.rng.gen_range(0..3) {
        let x = g.fresh("v");
        let t = g.fun_type(1);
        psi = psi.with_term(&x, t);
    }
    psi
}

fn embed_typing(seed: u64, depth: usize) -> Outcome {
    let mut g = Gen::new(seed, true);
    let psi = fragment_psi(&mut g);
    let t = g.fun_type(2);
    let Some(m) = checked_term(&mut g, &psi, &t, depth) else {
        return Outcome::Skip;
    };
    let z: Name = "z".into();
    let shown = || format!("{m} : {t}");
    let (psi2, p) = match embed_term_in(&psi, &m, &t, &z) {
        Ok(r) => r,
        Err(e) => return fail(shown(), e.to_string()),
    };
    let a = match embed_fun(&t) {
        Ok(a) => a,
        Err(e) => return fail(shown(), e.to_string()),
    };
    let ctx = TriCtx {
        psi: psi2,
        ..TriCtx::default()
    };
    match check_closed(&ctx, &p, &z, &a) {
        Ok(_) => Outcome::Pass,
        Err(e) => fail(
            format!("{}  ==>  {p}", shown()),
            format!("translation does not check at z:{a}: {e}"),
        ),
    }
}

fn compositionality(seed: u64, depth: usize) -> Outcome {
    let mut g = Gen::new(seed, true);
    let s = g.fun_type(1);
    let t = g.fun_type(2);
    let x = g.fresh("v");
    let psi = Psi::new().with_term(&x, s.clone());
    // prefer bodies that mention the variable
    let mut m = None;
    for _ in 0..6 {
        m = checked_term(&mut g, &psi, &t, depth);
        if m.as_ref().is_some_and(|m| m.free_names().contains(&x)) {
            break;
        }
    }
    let Some(m) = m else { return Outcome::Skip };
    let Some(n) = checked_term(&mut g, &Psi::new(), &s, depth.min(2)) else {
        return Outcome::Skip;
    };
    let z: Name = "z".into();
    let shown = format!("M = {m}, N = {n}, x = {x}");
    let go = || -> Result<(Process, Process), EmbedError> {
        let lhs = embed_term(&m.subst_term(&x, &n), &t, &z)?;
        let (_, pm) = embed_term_in(&psi, &m, &t, &z)?;
        let mut avoid = all_names(&pm);
        avoid.insert(z.clone());
        let w = fresh_name("w", &avoid);
        let pn = embed_term(&n, &s, &w)?;
        Ok((lhs, pm.subst_term(&x, &monad_val(&w, pn))))
    };
    match go() {
        Ok((l, r)) => verdict(
            proc_eq_with(&l, &r, &z, &mut Fuel::default()),
            format!("{shown}: {l}  vs  {r}"),
            "translations differ",
        ),
        Err(e) => fail(shown, e.to_string()),
    }
}

/// Whether some run of `p` reaches a process equal to `target` within `K`
/// steps, at least one step in.
fn reaches(p: &Process, target: &Process, z: &Name, seed: u64) -> Verdict {
    let mut seen = Verdict::No;
    run_observed(p, z, seed, K, |cfg, _| {
        if seen != Verdict::Yes {
            match proc_eq_with(&cfg.rebuild(), target, z, &mut Fuel::default()) {
                Verdict::Yes => seen = Verdict::Yes,
                Verdict::Undecided => seen = Verdict::Undecided,
                Verdict::No => {}
            }
        }
    });
    seen
}

/// The worked example: `(\x:F. x) (\x:U. \y:U. y)` at `F = U -> U -> U`.
pub fn worked_example() -> (Term, FunType) {
    let u = monad_ty("c", SessType::One);
    let f = pi("x", u.clone(), pi("y", u.clone(), u.clone()));
    let m = app(
        lam("x", f.clone(), var("x")),
        lam("x", u.clone(), lam("y", u, var("y"))),
    );
    (m, f)
}

fn correspondence(seed: u64, depth: usize) -> Outcome {
    let mut g = Gen::new(seed, true);
    let (m, t) = if g.rng.gen_bool(0.1) {
        worked_example()
    } else {
        let t = g.fun_type(2);
        let m = if g.rng.gen_bool(0.8) {
            g.redex(&Psi::new(), &t, depth)
        } else {
            g.term(&Psi::new(), &t, depth)
        };
        match m.and_then(|m| elaborate_term(&Psi::new(), &m, &t).ok()) {
            Some(m) => (m, t),
            None => return Outcome::Skip,
        }
    };
    correspond(&m, &t, seed)
}

/// Follows the source reduction of `m` for up to eight steps; each source
/// step must be matched by the translation within `K` target steps, under
/// several scheduler seeds.
pub fn correspond(m: &Term, t: &FunType, seed: u64) -> Outcome {
    let z: Name = "z".into();
    let mut m = m.clone();
    let mut steps = 0;
    let mut undecided = false;
    while let Some(next) = step_term(&m) {
        let (p, q) = match (embed_term(&m, t, &z), embed_term(&next, t, &z)) {
            (Ok(p), Ok(q)) => (p, q),
            (Err(e), _) | (_, Err(e)) => return fail(format!("{m} ~> {next}"), e.to_string()),
        };
        for s in 0..SEEDS {
            match reaches(&p, &q, &z, seed.wrapping_add(s)) {
                Verdict::Yes => {}
                Verdict::Undecided => undecided = true,
                Verdict::No => {
                    return fail(
                        format!("{m} ~> {next}  ({p}  vs  {q})"),
                        format!("scheduler seed {s}: target not reached within {K} steps"),
                    );
                }
            }
        }
        m = next;
        steps += 1;
        if steps == 8 {
            break;
        }
    }
    if steps == 0 {
        Outcome::Skip
    } else if undecided {
        Outcome::Undecided(m.to_string())
    } else {
        Outcome::Pass
    }
}

fn laws(seed: u64, depth: usize) -> Outcome {
    let mut g = Gen::new(seed, false);
    let d = depth.min(3);
    let psi = Psi::new();
    let mut fuel = Fuel::default();
    match g.rng.gen_range(0..6) {
        // beta
        0 => {
            let s = g.fun_type(1);
            let t = g.fun_type(1);
            let x = g.fresh("v");
            let Some(body) = checked_term(&mut g, &psi.with_term(&x, s.clone()), &t, d) else {
                return Outcome::Skip;
            };
            let Some(n) = checked_term(&mut g, &psi, &s, d) else {
                return Outcome::Skip;
            };
            let l = app(lam(&x, s, body.clone()), n.clone());
            let r = body.subst_term(&x, &n);
            verdict(
                term_eq_fuel(&psi, &l, &r, &mut fuel),
                format!("{l} = {r}"),
                "beta instance not equal",
            )
        }
        // eta at functions
        1 => {
            let s = g.fun_type(1);
            let t = g.fun_type(1);
            let f = pi("x", s.clone(), t);
            let Some(m) = checked_term(&mut g, &psi, &f, d) else {
                return Outcome::Skip;
            };
            let y = fresh_name("y", &m.free_names());
            let r = lam(&y, s, app(m.clone(), var(&y)));
            verdict(
                term_eq_fuel(&psi, &m, &r, &mut fuel),
                format!("{m} = {r}"),
                "eta instance not equal",
            )
        }
        // eta at the monad
        2 => {
            let a = g.sess(2);
            let t = monad_ty("c", a.clone());
            let Some(m) = checked_term(&mut g, &psi, &t, d) else {
                return Outcome::Skip;
            };
            let r = monad_val(
                "c",
                Process::Spawn(Box::new(Spawn {
                    bind: "x".into(),
                    anno: Some(a),
                    term: m.clone(),
                    shared: vec![],
                    linear: vec![],
                    cont: fwd("x", "c"),
                })),
            );
            verdict(
                term_eq_fuel(&psi, &m, &r, &mut fuel),
                format!("{m} = {r}"),
                "monadic eta instance not equal",
            )
        }
        // beta at session-type families
        3 => {
            let x = g.fresh("x");
            let (a1, a2) = (g.sess(2), g.sess(2));
            let body = SessType::IfS(Box::new(var(&x)), Box::new(a1), Box::new(a2));
            let n = if g.rng.gen_bool(0.5) {
                Term::TT
            } else {
                Term::FF
            };
            let n = app(lam("b", FunType::Base(Base::Bool), var("b")), n);
            let l = SessType::AppTm(
                Box::new(SessType::LamTm(
                    x.clone(),
                    Box::new(FunType::Base(Base::Bool)),
                    Box::new(body.clone()),
                )),
                Box::new(n.clone()),
            );
            let r = body.subst_term(&x, &n);
            verdict(
                sess_eq_fuel(&psi, &l, &r, &mut fuel),
                format!("{l} = {r}"),
                "type-level beta instance not equal",
            )
        }
        // forwarder eta at a universal
        4 => {
            let t = if g.rng.gen_bool(0.5) {
                FunType::Base(Base::Bool)
            } else {
                FunType::Base(Base::Nat)
            };
            let x = g.fresh("x");
            let a = forall(&x, t, g.sess(2));
            let y = g.fresh("y");
            let l = fwd("d", "c");
            let r = Process::In {
                on: "c".into(),
                bind: y.clone(),
                body: Box::new(Process::OutTerm {
                    on: "d".into(),
                    payload: var(&y),
                    anno: a,
                    body: Box::new(fwd("d", "c")),
                }),
            };
            verdict(
                proc_eq_with(&l, &r, &"c".into(), &mut fuel),
                format!("{l} = {r}"),
                "forwarder eta instance not equal",
            )
        }
        // a composition commutes with input on the offered channel
        _ => {
            let t = if g.rng.gen_bool(0.5) {
                FunType::Base(Base::Bool)
            } else {
                FunType::Base(Base::Nat)
            };
            let x = g.fresh("x");
            let a = g.sess(2);
            let b = g.sess(2);
            let dch = g.fresh("d");
            let c: Name = "c".into();
            let Some(provider) = g.proc(&psi, &dch, &b, d) else {
                return Outcome::Skip;
            };
            let inner = psi.with_term(&x, t.clone());
            let Some(client) = g.proc_using(&inner, &[(dch.clone(), b.clone())], &c, &a, d) else {
                return Outcome::Skip;
            };
            let l = Process::New {
                bind: dch.clone(),
                anno: Some(b.clone()),
                left: Box::new(provider.clone()),
                right: Box::new(Process::In {
                    on: c.clone(),
                    bind: x.clone(),
                    body: Box::new(client.clone()),
                }),
            };
            let r = Process::In {
                on: c.clone(),
                bind: x.clone(),
                body: Box::new(Process::New {
                    bind: dch,
                    anno: Some(b),
                    left: Box::new(provider),
                    right: Box::new(client),
                }),
            };
            let whole = forall(&x, t, a);
            if check_closed(&TriCtx::default(), &l, &c, &whole).is_err()
                || check_closed(&TriCtx::default(), &r, &c, &whole).is_err()
            {
                return Outcome::Skip;
            }
            verdict(
                proc_eq_with(&l, &r, &c, &mut fuel),
                format!("{l} = {r}"),
                "commuting conversion instance not equal",
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_checks() {
        let (m, t) = worked_example();
        assert!(check_term(&Psi::new(), &m, &t).is_ok());
    }
}
