//! Bidirectional checking of terms and processes.
//!
//! Linear channels are threaded through process checking as a ledger: each
//! rule receives the channels available to it and returns those it did not
//! touch. A channel that a process acts on must be used up by that process
//! (channels of type `1` may be dropped silently). Checking also elaborates:
//! compositions and spawns come back annotated with the session types that
//! were inferred for them, and compositions are oriented provider-first.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::diag::Diagnostic;
use crate::equality::{
    fun_eq, nf_term, sess_eq, whnf_fun, whnf_sess, whnf_sess_default, Fuel, Verdict,
};
use crate::subst::Substitutable;
use crate::surface::file::{expand, proc_as_term};
use crate::surface::{Decl, DeclBody, SourceFile, TypeBody};
use crate::syntax::*;
use crate::wf::{
    check_fun_type, check_kind, check_stype, infer_kind_fun, infer_kind_sess, kind_head, same_fun,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeError {
    pub rule: &'static str,
    pub message: String,
}

impl TypeError {
    pub fn new(rule: &'static str, msg: impl Into<String>) -> Self {
        TypeError {
            rule,
            message: msg.into(),
        }
    }

    pub fn context(mut self, what: impl fmt::Display) -> Self {
        self.message = format!("{} ({what})", self.message);
        self
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.rule, self.message)
    }
}

impl std::error::Error for TypeError {}

pub type TypeResult<T> = Result<T, TypeError>;

fn err<T>(rule: &'static str, msg: impl Into<String>) -> TypeResult<T> {
    Err(TypeError::new(rule, msg))
}

pub type Gamma = BTreeMap<Name, SessType>;
pub type Ledger = BTreeMap<Name, SessType>;

fn bool_ty() -> FunType {
    FunType::Base(Base::Bool)
}

fn nat_ty() -> FunType {
    FunType::Base(Base::Nat)
}

fn whnf_s(a: &SessType) -> TypeResult<SessType> {
    whnf_sess(a, &mut Fuel::default())
        .map_err(|_| TypeError::new("conv-undecided", format!("ran out of fuel normalizing {a}")))
}

fn whnf_f(t: &FunType) -> TypeResult<FunType> {
    whnf_fun(t, &mut Fuel::default())
        .map_err(|_| TypeError::new("conv-undecided", format!("ran out of fuel normalizing {t}")))
}

fn same_sess(
    psi: &Psi,
    found: &SessType,
    want: &SessType,
    rule: &'static str,
    what: &str,
) -> TypeResult<()> {
    match sess_eq(psi, found, want) {
        Verdict::Yes => Ok(()),
        Verdict::No => {
            let (w, f) = (whnf_sess_default(want), whnf_sess_default(found));
            err(rule, format!("{what}: expected {w}, found {f}"))
        }
        Verdict::Undecided => err(
            "conv-undecided",
            format!("{what}: cannot decide whether {found} and {want} are equal"),
        ),
    }
}

fn is_one(a: &SessType) -> bool {
    matches!(whnf_sess(a, &mut Fuel::default()), Ok(SessType::One))
}

// ---------------------------------------------------------------------------
// terms

pub fn infer_term(psi: &Psi, m: &Term) -> TypeResult<FunType> {
    infer(psi, m).map(|(t, _)| t)
}

pub fn check_term(psi: &Psi, m: &Term, t: &FunType) -> TypeResult<()> {
    check(psi, m, t).map(|_| ())
}

/// Checks `m` against `t` and returns it with process annotations filled in.
pub fn elaborate_term(psi: &Psi, m: &Term, t: &FunType) -> TypeResult<Term> {
    check(psi, m, t)
}

fn fresh_in_psi(psi: &Psi, x: &Name, extra: &BTreeSet<Name>) -> Name {
    if psi.names().contains(x) || extra.contains(x) {
        let mut avoid = psi.names();
        avoid.extend(extra.iter().cloned());
        fresh_name(x, &avoid)
    } else {
        x.clone()
    }
}

fn infer(psi: &Psi, m: &Term) -> TypeResult<(FunType, Term)> {
    match m {
        Term::Var(x) => match psi.lookup_term(x) {
            Some(t) => Ok((t.clone(), m.clone())),
            None if psi.lookup_type(x).is_some() => {
                err("var", format!("{x} is a type, not a term"))
            }
            None => err("var", format!("unbound variable {x}")),
        },
        Term::Lam(x, a, b) => {
            check_fun_type(psi, a)?;
            let x2 = fresh_in_psi(psi, x, &b.free_names());
            let b = b.rename(x, &x2);
            let (tb, b2) = infer(&psi.with_term(&x2, (**a).clone()), &b)?;
            Ok((pi(&x2, (**a).clone(), tb), lam(&x2, (**a).clone(), b2)))
        }
        Term::App(f, a) => {
            let (tf, f2) = infer(psi, f)?;
            match whnf_f(&tf)? {
                FunType::Pi(x, dom, cod) => {
                    let a2 = check(psi, a, &dom)?;
                    Ok((cod.subst_term(&x, a), app(f2, a2)))
                }
                t => err(
                    "pi-E",
                    format!("{f} has type {t}, which is not a function type"),
                ),
            }
        }
        Term::MonadVal(v) if v.shared.is_empty() && v.linear.is_empty() => {
            match synth_offer(psi, &Gamma::new(), &Ledger::new(), &v.body, &v.offered) {
                Some(a) => {
                    let t = monad_ty(&v.offered, a);
                    let m2 = check(psi, m, &t)?;
                    Ok((t, m2))
                }
                None => err("monad-I", "a monadic value needs a known type here"),
            }
        }
        Term::MonadVal(_) => err(
            "monad-I",
            "a monadic value with channel arguments needs a known type here",
        ),
        Term::TT | Term::FF => Ok((bool_ty(), m.clone())),
        Term::Zero => Ok((nat_ty(), m.clone())),
        Term::Succ(a) => Ok((nat_ty(), succ(check(psi, a, &nat_ty())?))),
        Term::IfT(c, a, b) => {
            let c2 = check(psi, c, &bool_ty())?;
            let (t, a2) = infer(psi, a)?;
            let b2 = check(psi, b, &t)?;
            Ok((t, Term::IfT(Box::new(c2), Box::new(a2), Box::new(b2))))
        }
        Term::NatRecT {
            motive,
            target,
            zero,
            pred,
            rec,
            succ: s,
        } => {
            let target2 = check(psi, target, &nat_ty())?;
            let k = infer_kind_fun(psi, motive)?;
            let mut avoid = s.free_names();
            avoid.extend(motive.free_names());
            let p = fresh_in_psi(psi, pred, &avoid);
            avoid.insert(p.clone());
            let r = fresh_in_psi(psi, rec, &avoid);
            let body = s.rename(pred, &p).rename(rec, &r);
            let (zt, rt, st, result) = match &k {
                Kind::Type => (
                    (**motive).clone(),
                    (**motive).clone(),
                    (**motive).clone(),
                    (**motive).clone(),
                ),
                Kind::PiTerm(_, dom, inner) if **inner == Kind::Type => {
                    same_fun(psi, dom, &nat_ty(), "natrec")?;
                    let at = |n: Term| FunType::AppT(motive.clone(), Box::new(n));
                    (
                        at(Term::Zero),
                        at(var(&p)),
                        at(succ(var(&p))),
                        at((**target).clone()),
                    )
                }
                k => {
                    return err(
                        "natrec",
                        format!(
                            "the motive {motive} has kind {k}; expected type or pi x:Nat. type"
                        ),
                    )
                }
            };
            let zero2 = check(psi, zero, &zt)?;
            let inner = psi.with_term(&p, nat_ty()).with_term(&r, rt);
            let body2 = check(&inner, &body, &st)?;
            Ok((
                result,
                Term::NatRecT {
                    motive: motive.clone(),
                    target: Box::new(target2),
                    zero: Box::new(zero2),
                    pred: p,
                    rec: r,
                    succ: Box::new(body2),
                },
            ))
        }
    }
}

fn check(psi: &Psi, m: &Term, t: &FunType) -> TypeResult<Term> {
    let tw = whnf_f(t)?;
    match (m, &tw) {
        (Term::Lam(x, a, b), FunType::Pi(y, dom, cod)) => {
            check_fun_type(psi, a)?;
            same_fun(psi, a, dom, "pi-I")?;
            let mut avoid = b.free_names();
            avoid.extend(cod.free_names());
            let x2 = fresh_in_psi(psi, x, &avoid);
            let b2 = check(
                &psi.with_term(&x2, (**a).clone()),
                &b.rename(x, &x2),
                &cod.rename(y, &x2),
            )?;
            Ok(lam(&x2, (**a).clone(), b2))
        }
        (Term::MonadVal(mv), FunType::Monad(mt)) => {
            Ok(Term::MonadVal(Box::new(check_monad(psi, mv, mt)?)))
        }
        (Term::MonadVal(_), other) => err(
            "monad-I",
            format!("a monadic value cannot have type {other}"),
        ),
        (Term::IfT(c, a, b), _) => {
            let c2 = check(psi, c, &bool_ty())?;
            Ok(Term::IfT(
                Box::new(c2),
                Box::new(check(psi, a, t)?),
                Box::new(check(psi, b, t)?),
            ))
        }
        // a redex whose function does not synthesize, e.g. because its body
        // is a monadic value: check the body at the expected type instead
        (Term::App(f, n), _) if matches!(&**f, Term::Lam(..)) && infer(psi, m).is_err() => {
            let Term::Lam(x, a, b) = &**f else {
                unreachable!()
            };
            check_fun_type(psi, a)?;
            let n2 = check(psi, n, a)?;
            let mut avoid = b.free_names();
            avoid.extend(t.free_names());
            let x2 = fresh_in_psi(psi, x, &avoid);
            let b2 = check(&psi.with_term(&x2, (**a).clone()), &b.rename(x, &x2), t)?;
            Ok(app(lam(&x2, (**a).clone(), b2), n2))
        }
        _ => {
            let (found, m2) = infer(psi, m)?;
            match fun_eq(psi, &found, t) {
                Verdict::Yes => Ok(m2),
                Verdict::No => err("conv", format!("{m} has type {found}, expected {t}")),
                Verdict::Undecided => err(
                    "conv-undecided",
                    format!("cannot decide whether {found} and {t} are equal (for {m})"),
                ),
            }
        }
    }
}

fn check_monad(psi: &Psi, mv: &MonadVal, mt: &MonadType) -> TypeResult<MonadVal> {
    if mv.shared.len() != mt.shared.len() || mv.linear.len() != mt.linear.len() {
        return err(
            "monad-I",
            format!(
                "the value binds {} shared and {} linear channels, its type has {} and {}",
                mv.shared.len(),
                mv.linear.len(),
                mt.shared.len(),
                mt.linear.len()
            ),
        );
    }
    let mut seen = BTreeSet::new();
    for c in mv.shared.iter().chain(&mv.linear).chain([&mv.offered]) {
        if !seen.insert(c) {
            return err("monad-I", format!("channel {c} is bound twice"));
        }
        if psi.names().contains(c) {
            return err(
                "monad-I",
                format!("channel {c} clashes with a variable in scope"),
            );
        }
    }
    let mut gamma = Gamma::new();
    let mut led = Ledger::new();
    for (u, (_, b)) in mv.shared.iter().zip(&mt.shared) {
        gamma.insert(u.clone(), b.clone());
    }
    for (d, (_, a)) in mv.linear.iter().zip(&mt.linear) {
        bind_channel(&mut gamma, &mut led, d, a.clone());
    }
    let ck = Checker {
        psi: psi.clone(),
        gamma,
    };
    let (left, body) = ck.proc(led, &mv.body, &mv.offered, &mt.offered_ty)?;
    ensure_empty(left, "monad-I")?;
    Ok(MonadVal { body, ..mv.clone() })
}

fn ensure_empty(mut left: Ledger, rule: &'static str) -> TypeResult<()> {
    left.retain(|_, a| !is_one(a));
    if left.is_empty() {
        Ok(())
    } else {
        let names: Vec<String> = left.iter().map(|(n, a)| format!("{n}:{a}")).collect();
        err(
            rule,
            format!("linear channels left unused: {}", names.join(", ")),
        )
    }
}

/// Binds a channel: `!`-typed ones become shared.
fn bind_channel(gamma: &mut Gamma, led: &mut Ledger, x: &Name, a: SessType) {
    match whnf_sess(&a, &mut Fuel::default()) {
        Ok(SessType::Bang(inner)) => {
            gamma.insert(x.clone(), *inner);
        }
        _ => {
            led.insert(x.clone(), a);
        }
    }
}

// ---------------------------------------------------------------------------
// processes

#[derive(Clone)]
struct Checker {
    psi: Psi,
    gamma: Gamma,
}

/// Checks `p` offering `c:a`; returns the untouched part of `ledger`.
pub fn check_proc(
    psi: &Psi,
    gamma: &Gamma,
    ledger: Ledger,
    p: &Process,
    c: &Name,
    a: &SessType,
) -> TypeResult<Ledger> {
    elaborate_proc(psi, gamma, ledger, p, c, a).map(|(l, _)| l)
}

pub fn elaborate_proc(
    psi: &Psi,
    gamma: &Gamma,
    ledger: Ledger,
    p: &Process,
    c: &Name,
    a: &SessType,
) -> TypeResult<(Ledger, Process)> {
    let mut gamma = gamma.clone();
    let mut led = Ledger::new();
    for (d, t) in ledger {
        bind_channel(&mut gamma, &mut led, &d, t);
    }
    Checker {
        psi: psi.clone(),
        gamma,
    }
    .proc(led, p, c, a)
}

/// Checks a closed process offering `c:a` with the given contexts and
/// requires every linear channel to be used.
pub fn check_closed(ctx: &TriCtx, p: &Process, c: &Name, a: &SessType) -> TypeResult<Process> {
    let (left, q) = elaborate_proc(&ctx.psi, &ctx.gamma, ctx.delta.clone(), p, c, a)?;
    ensure_empty(left, "leftover")?;
    Ok(q)
}

impl Checker {
    fn taken(&self, led: &Ledger, c: &Name) -> BTreeSet<Name> {
        let mut s = self.psi.names();
        s.extend(self.gamma.keys().cloned());
        s.extend(led.keys().cloned());
        s.insert(c.clone());
        s
    }

    /// Renames a binder if it would shadow something in scope.
    fn fresh_binder<'p>(
        &self,
        led: &Ledger,
        c: &Name,
        x: &Name,
        bodies: &[&'p Process],
    ) -> (Name, Vec<Process>) {
        let taken = self.taken(led, c);
        if !taken.contains(x) {
            return (x.clone(), bodies.iter().map(|b| (*b).clone()).collect());
        }
        let mut avoid = taken;
        for b in bodies {
            avoid.extend(all_names(b));
        }
        let y = fresh_name(x, &avoid);
        (y.clone(), bodies.iter().map(|b| b.rename(x, &y)).collect())
    }

    fn with_term(&self, x: &Name, t: FunType) -> Checker {
        Checker {
            psi: self.psi.with_term(x, t),
            gamma: self.gamma.clone(),
        }
    }

    /// A channel acted on must be used up by the continuation.
    fn close(&self, mut left: Ledger, x: &Name, rule: &'static str) -> TypeResult<Ledger> {
        if let Some(a) = left.remove(x) {
            if !is_one(&a) {
                return err(
                    rule,
                    format!("linear channel {x} is not used up (remaining {a})"),
                );
            }
        }
        Ok(left)
    }

    fn proc(
        &self,
        mut led: Ledger,
        p: &Process,
        c: &Name,
        a: &SessType,
    ) -> TypeResult<(Ledger, Process)> {
        use Process::*;
        let aw = whnf_s(a)?;
        match p {
            Fwd { from, to } => {
                let d = if to == c && from != c {
                    from
                } else if from == c && to != c {
                    to
                } else {
                    return err(
                        "id",
                        format!("a forwarder here must involve the offered channel {c}"),
                    );
                };
                let ty = match led.remove(d) {
                    Some(ty) => ty,
                    // a shared channel may stand in for a replicated provider
                    None => match (self.gamma.get(d), &aw) {
                        (Some(b), SessType::Bang(_)) => SessType::Bang(Box::new(b.clone())),
                        _ => return err("id", format!("{d} is not an available linear channel")),
                    },
                };
                same_sess(&self.psi, &ty, a, "id", &format!("forwarding {d} to {c}"))?;
                Ok((led, p.clone()))
            }
            Nil => {
                if aw != SessType::One {
                    return err("1R", format!("inaction offers {c}:{a}, which is not 1"));
                }
                Ok((led, Nil))
            }
            OutTerm {
                on,
                payload,
                anno,
                body,
            } => {
                if on == c {
                    let SessType::Exists(x, t, b) = &aw else {
                        return err(
                            "exists-R",
                            format!("{c} offers {a}, which does not send a value"),
                        );
                    };
                    same_sess(
                        &self.psi,
                        anno,
                        a,
                        "conv",
                        &format!("annotation of the output on {c}"),
                    )?;
                    let m = check(&self.psi, payload, t)?;
                    let (left, body) = self.proc(led, body, c, &b.subst_term(x, payload))?;
                    Ok((
                        left,
                        OutTerm {
                            on: on.clone(),
                            payload: m,
                            anno: anno.clone(),
                            body: Box::new(body),
                        },
                    ))
                } else if let Some(ty) = led.get(on).cloned() {
                    let SessType::Forall(x, t, b) = whnf_s(&ty)? else {
                        return err(
                            "forall-L",
                            format!("{on} has type {ty}, which does not receive a value"),
                        );
                    };
                    same_sess(
                        &self.psi,
                        anno,
                        &ty,
                        "conv",
                        &format!("annotation of the output on {on}"),
                    )?;
                    let m = check(&self.psi, payload, &t)?;
                    led.insert(on.clone(), b.subst_term(&x, payload));
                    let (left, body) = self.proc(led, body, c, a)?;
                    let left = self.close(left, on, "forall-L")?;
                    Ok((
                        left,
                        OutTerm {
                            on: on.clone(),
                            payload: m,
                            anno: anno.clone(),
                            body: Box::new(body),
                        },
                    ))
                } else {
                    self.unavailable(on, "forall-L")
                }
            }
            In { on, bind, body } => {
                let (y, bodies) = self.fresh_binder(&led, c, bind, &[body]);
                let body = &bodies[0];
                let rebuild = |b: Process| In {
                    on: on.clone(),
                    bind: y.clone(),
                    body: Box::new(b),
                };
                if on == c {
                    match &aw {
                        SessType::Forall(x, t, b) => {
                            let (left, body) = self.with_term(&y, (**t).clone()).proc(
                                led,
                                body,
                                c,
                                &b.rename(x, &y),
                            )?;
                            Ok((left, rebuild(body)))
                        }
                        SessType::Lolli(a1, b1) => {
                            let mut ck = self.clone();
                            bind_channel(&mut ck.gamma, &mut led, &y, (**a1).clone());
                            let (left, body) = ck.proc(led, body, c, b1)?;
                            let left = self.close(left, &y, "lolli-R")?;
                            Ok((left, rebuild(body)))
                        }
                        _ => err(
                            "forall-R",
                            format!("{c} offers {a}, which does not receive"),
                        ),
                    }
                } else if let Some(ty) = led.get(on).cloned() {
                    match whnf_s(&ty)? {
                        SessType::Exists(x, t, b) => {
                            led.insert(on.clone(), b.rename(&x, &y));
                            let (left, body) =
                                self.with_term(&y, (*t).clone()).proc(led, body, c, a)?;
                            let left = self.close(left, on, "exists-L")?;
                            Ok((left, rebuild(body)))
                        }
                        SessType::Tensor(a1, b1) => {
                            let mut ck = self.clone();
                            led.insert(on.clone(), *b1);
                            bind_channel(&mut ck.gamma, &mut led, &y, *a1);
                            let (left, body) = ck.proc(led, body, c, a)?;
                            let left = self.close(left, &y, "tensor-L")?;
                            let left = self.close(left, on, "tensor-L")?;
                            Ok((left, rebuild(body)))
                        }
                        ty => err(
                            "exists-L",
                            format!("{on} has type {ty}, which does not send"),
                        ),
                    }
                } else {
                    self.unavailable(on, "exists-L")
                }
            }
            OutFresh {
                on,
                bind,
                left,
                right,
            } => {
                let (w, bodies) = self.fresh_binder(&led, c, bind, &[left, right]);
                let (l, r) = (&bodies[0], &bodies[1]);
                let rebuild = |l: Process, r: Process| OutFresh {
                    on: on.clone(),
                    bind: w.clone(),
                    left: Box::new(l),
                    right: Box::new(r),
                };
                if on == c {
                    let SessType::Tensor(a1, a2) = &aw else {
                        return err(
                            "tensor-R",
                            format!("{c} offers {a}, which does not send a channel"),
                        );
                    };
                    let (lo, l2) = self.proc(led, l, &w, a1)?;
                    let (lo, r2) = self.proc(lo, r, c, a2)?;
                    Ok((lo, rebuild(l2, r2)))
                } else if let Some(ty) = led.remove(on) {
                    let SessType::Lolli(d1, d2) = whnf_s(&ty)? else {
                        return err(
                            "lolli-L",
                            format!("{on} has type {ty}, which does not receive a channel"),
                        );
                    };
                    let (mut lo, l2) = self.proc(led, l, &w, &d1)?;
                    lo.insert(on.clone(), *d2);
                    let (lo, r2) = self.proc(lo, r, c, a)?;
                    let lo = self.close(lo, on, "lolli-L")?;
                    Ok((lo, rebuild(l2, r2)))
                } else {
                    self.unavailable(on, "lolli-L")
                }
            }
            Repl { on, bind, body } => {
                if on != c {
                    return err(
                        "bang-R",
                        format!("a replicated input must be on the offered channel {c}"),
                    );
                }
                let SessType::Bang(inner) = &aw else {
                    return err("bang-R", format!("{c} offers {a}, which is not replicated"));
                };
                let (x, bodies) = self.fresh_binder(&led, c, bind, &[body]);
                let (left, body) = self.proc(Ledger::new(), &bodies[0], &x, inner)?;
                ensure_empty(left, "bang-R")?;
                Ok((
                    led,
                    Repl {
                        on: on.clone(),
                        bind: x,
                        body: Box::new(body),
                    },
                ))
            }
            Copy { on, bind, body } => {
                let mut ck = self.clone();
                let a0 = if let Some(b) = self.gamma.get(on) {
                    b.clone()
                } else if let Some(ty) = led.get(on).cloned() {
                    match whnf_s(&ty)? {
                        SessType::Bang(b) => {
                            led.remove(on);
                            ck.gamma.insert(on.clone(), (*b).clone());
                            *b
                        }
                        ty => {
                            return err(
                                "copy",
                                format!("{on} has type {ty}, which is not replicated"),
                            )
                        }
                    }
                } else {
                    return self.unavailable(on, "copy");
                };
                let (y, bodies) = ck.fresh_binder(&led, c, bind, &[body]);
                bind_channel(&mut ck.gamma, &mut led, &y, a0);
                let (left, body) = ck.proc(led, &bodies[0], c, a)?;
                let left = self.close(left, &y, "copy")?;
                Ok((
                    left,
                    Copy {
                        on: on.clone(),
                        bind: y,
                        body: Box::new(body),
                    },
                ))
            }
            Case { on, branches } => {
                if on == c {
                    let SessType::With(bs) = &aw else {
                        return err(
                            "with-R",
                            format!("{c} offers {a}, which is not an external choice"),
                        );
                    };
                    same_labels(branches, bs, "with-R")?;
                    let mut outs = vec![];
                    let mut elab = Branches::new();
                    for (l, q) in branches {
                        let (lo, q2) = self
                            .proc(led.clone(), q, c, &bs[l])
                            .map_err(|e| e.context(format!("branch {l}")))?;
                        outs.push(lo);
                        elab.insert(l.clone(), q2);
                    }
                    Ok((
                        merge(&led, outs, "with-R")?,
                        Case {
                            on: on.clone(),
                            branches: elab,
                        },
                    ))
                } else if let Some(ty) = led.get(on).cloned() {
                    let SessType::Plus(bs) = whnf_s(&ty)? else {
                        return err(
                            "plus-L",
                            format!("{on} has type {ty}, which is not an internal choice"),
                        );
                    };
                    same_labels(branches, &bs, "plus-L")?;
                    let mut outs = vec![];
                    let mut elab = Branches::new();
                    for (l, q) in branches {
                        let mut led2 = led.clone();
                        led2.insert(on.clone(), bs[l].clone());
                        let (lo, q2) = self
                            .proc(led2, q, c, a)
                            .map_err(|e| e.context(format!("branch {l}")))?;
                        outs.push(self.close(lo, on, "plus-L")?);
                        elab.insert(l.clone(), q2);
                    }
                    let mut base = led.clone();
                    base.remove(on);
                    Ok((
                        merge(&base, outs, "plus-L")?,
                        Case {
                            on: on.clone(),
                            branches: elab,
                        },
                    ))
                } else if let Some(t) = self.psi.lookup_term(on) {
                    if whnf_f(t)? != bool_ty() {
                        return err(
                            "case-bool",
                            format!("{on} has type {t}; only booleans can be cased on"),
                        );
                    }
                    let labels: BTreeSet<&str> = branches.keys().map(|s| s.as_str()).collect();
                    if labels != BTreeSet::from(["tt", "ff"]) {
                        return err(
                            "case-bool",
                            "a case on a boolean needs exactly the branches tt and ff",
                        );
                    }
                    let (t2, f2, lo) =
                        self.bool_branches(&led, on, &branches["tt"], &branches["ff"], c, a)?;
                    let elab = Branches::from([("tt".to_string(), t2), ("ff".to_string(), f2)]);
                    Ok((
                        lo,
                        Case {
                            on: on.clone(),
                            branches: elab,
                        },
                    ))
                } else {
                    self.unavailable(on, "case")
                }
            }
            If { cond, then, other } => {
                let cond2 = check(&self.psi, cond, &bool_ty())?;
                match nf_term(cond, &mut Fuel::default()) {
                    Ok(Term::TT) => {
                        let (lo, t2) = self.proc(led, then, c, a)?;
                        Ok((
                            lo,
                            If {
                                cond: cond2,
                                then: Box::new(t2),
                                other: other.clone(),
                            },
                        ))
                    }
                    Ok(Term::FF) => {
                        let (lo, f2) = self.proc(led, other, c, a)?;
                        Ok((
                            lo,
                            If {
                                cond: cond2,
                                then: then.clone(),
                                other: Box::new(f2),
                            },
                        ))
                    }
                    Ok(Term::Var(x)) if self.psi.lookup_term(&x).is_some() => {
                        let (t2, f2, lo) = self.bool_branches(&led, &x, then, other, c, a)?;
                        Ok((
                            lo,
                            If {
                                cond: cond2,
                                then: Box::new(t2),
                                other: Box::new(f2),
                            },
                        ))
                    }
                    _ => {
                        let (l1, t2) = self.proc(led.clone(), then, c, a)?;
                        let (l2, f2) = self.proc(led.clone(), other, c, a)?;
                        Ok((
                            merge(&led, vec![l1, l2], "if")?,
                            If {
                                cond: cond2,
                                then: Box::new(t2),
                                other: Box::new(f2),
                            },
                        ))
                    }
                }
            }
            Select { on, label, body } => {
                let rebuild = |b: Process| Select {
                    on: on.clone(),
                    label: label.clone(),
                    body: Box::new(b),
                };
                if on == c {
                    let SessType::Plus(bs) = &aw else {
                        return err(
                            "plus-R",
                            format!("{c} offers {a}, which is not an internal choice"),
                        );
                    };
                    let Some(next) = bs.get(label) else {
                        return err(
                            "plus-R",
                            format!("label {label} is not among {}", label_list(bs)),
                        );
                    };
                    let (lo, b) = self.proc(led, body, c, next)?;
                    Ok((lo, rebuild(b)))
                } else if let Some(ty) = led.get(on).cloned() {
                    let SessType::With(bs) = whnf_s(&ty)? else {
                        return err(
                            "with-L",
                            format!("{on} has type {ty}, which is not an external choice"),
                        );
                    };
                    let Some(next) = bs.get(label) else {
                        return err(
                            "with-L",
                            format!("label {label} is not among {}", label_list(&bs)),
                        );
                    };
                    led.insert(on.clone(), next.clone());
                    let (lo, b) = self.proc(led, body, c, a)?;
                    Ok((self.close(lo, on, "with-L")?, rebuild(b)))
                } else {
                    self.unavailable(on, "with-L")
                }
            }
            New {
                bind,
                anno,
                left,
                right,
            } => {
                let (x, bodies) = self.fresh_binder(&led, c, bind, &[left, right]);
                let (l, r) = (&bodies[0], &bodies[1]);
                if let Some(t) = anno {
                    check_stype(&self.psi, t)?;
                }
                let first = self.cut(&led, &x, anno.as_ref(), l, r, c, a);
                match first {
                    Ok(ok) => Ok(ok),
                    Err(e) => self.cut(&led, &x, anno.as_ref(), r, l, c, a).map_err(|_| e),
                }
            }
            Spawn(s) => self.spawn(led, s, c, a),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn cut(
        &self,
        led: &Ledger,
        x: &Name,
        anno: Option<&SessType>,
        provider: &Process,
        user: &Process,
        c: &Name,
        a: &SessType,
    ) -> TypeResult<(Ledger, Process)> {
        let ty = match anno {
            Some(t) => t.clone(),
            None => match synth_offer(&self.psi, &self.gamma, led, provider, x) {
                Some(t) => t,
                None => {
                    return err(
                        "cut",
                        format!("cannot infer the type of {x}; add an annotation"),
                    )
                }
            },
        };
        let (mut lo, p2) = self
            .proc(led.clone(), provider, x, &ty)
            .map_err(|e| e.context(format!("providing {x}")))?;
        let mut ck = self.clone();
        bind_channel(&mut ck.gamma, &mut lo, x, ty.clone());
        let (lo, q2) = ck.proc(lo, user, c, a)?;
        let lo = self.close(lo, x, "cut")?;
        Ok((
            lo,
            Process::New {
                bind: x.clone(),
                anno: Some(ty),
                left: Box::new(p2),
                right: Box::new(q2),
            },
        ))
    }

    fn spawn(
        &self,
        mut led: Ledger,
        s: &Spawn,
        c: &Name,
        a: &SessType,
    ) -> TypeResult<(Ledger, Process)> {
        let mut ck = self.clone();
        let mut shared = vec![];
        for u in &s.shared {
            if let Some(b) = ck.gamma.get(u) {
                shared.push((u.clone(), b.clone()));
            } else if let Some(ty) = led.get(u).cloned() {
                match whnf_s(&ty)? {
                    SessType::Bang(b) => {
                        led.remove(u);
                        ck.gamma.insert(u.clone(), (*b).clone());
                        shared.push((u.clone(), *b));
                    }
                    ty => {
                        return err(
                            "spawn",
                            format!("{u} has type {ty}; a shared channel is required"),
                        )
                    }
                }
            } else {
                return err("spawn", format!("{u} is not a shared channel in scope"));
            }
        }
        let mut linear = vec![];
        for d in &s.linear {
            match led.remove(d) {
                Some(t) => linear.push((d.clone(), t)),
                None => return err("spawn", format!("{d} is not an available linear channel")),
            }
        }
        let offered = fresh_name("c", &self.taken(&led, c));
        let (ty, term) = match &s.anno {
            Some(t) => {
                check_stype(&self.psi, t)?;
                let mt = MonadType {
                    shared: shared.clone(),
                    linear: linear.clone(),
                    offered,
                    offered_ty: Box::new(t.clone()),
                };
                (t.clone(), check(&self.psi, &s.term, &FunType::Monad(mt))?)
            }
            None => match infer(&self.psi, &s.term) {
                Ok((found, term)) => {
                    let FunType::Monad(mt) = whnf_f(&found)? else {
                        return err(
                            "spawn",
                            format!("{} has type {found}, which is not a monad type", s.term),
                        );
                    };
                    if mt.shared.len() != shared.len() || mt.linear.len() != linear.len() {
                        return err(
                            "spawn",
                            format!(
                                "arity mismatch: {} expects {} shared and {} linear channels, {} and {} supplied",
                                s.term,
                                mt.shared.len(),
                                mt.linear.len(),
                                shared.len(),
                                linear.len()
                            ),
                        );
                    }
                    for ((n, want), (_, have)) in mt
                        .shared
                        .iter()
                        .zip(&shared)
                        .chain(mt.linear.iter().zip(&linear))
                    {
                        same_sess(
                            &self.psi,
                            have,
                            want,
                            "spawn",
                            &format!("channel supplied for {n}"),
                        )?;
                    }
                    ((*mt.offered_ty).clone(), term)
                }
                Err(e) => match &s.term {
                    Term::MonadVal(mv) => {
                        let mut g = ck.gamma.clone();
                        let mut l = Ledger::new();
                        for (n, (_, t)) in mv.shared.iter().zip(&shared) {
                            g.insert(n.clone(), t.clone());
                        }
                        for (n, (_, t)) in mv.linear.iter().zip(&linear) {
                            l.insert(n.clone(), t.clone());
                        }
                        let Some(t) = synth_offer(&self.psi, &g, &l, &mv.body, &mv.offered) else {
                            return Err(e);
                        };
                        let mt = MonadType {
                            shared: shared.clone(),
                            linear: linear.clone(),
                            offered,
                            offered_ty: Box::new(t.clone()),
                        };
                        (t, check(&self.psi, &s.term, &FunType::Monad(mt))?)
                    }
                    _ => return Err(e),
                },
            },
        };
        let (x, bodies) = ck.fresh_binder(&led, c, &s.bind, &[&s.cont]);
        bind_channel(&mut ck.gamma, &mut led, &x, ty.clone());
        let (lo, cont) = ck.proc(led, &bodies[0], c, a)?;
        let lo = self.close(lo, &x, "spawn")?;
        Ok((
            lo,
            Process::Spawn(Box::new(Spawn {
                bind: x,
                anno: Some(ty),
                term,
                shared: s.shared.clone(),
                linear: s.linear.clone(),
                cont,
            })),
        ))
    }

    /// Both arms of a case on the boolean variable `x`, each checked with
    /// `x` replaced by the corresponding constant.
    fn bool_branches(
        &self,
        led: &Ledger,
        x: &Name,
        then: &Process,
        other: &Process,
        c: &Name,
        a: &SessType,
    ) -> TypeResult<(Process, Process, Ledger)> {
        let mut outs = vec![];
        let mut elab = vec![];
        for (val, q) in [(Term::TT, then), (Term::FF, other)] {
            let refined: Ledger = led
                .iter()
                .map(|(n, t)| (n.clone(), t.subst_term(x, &val)))
                .collect();
            let gamma: Gamma = self
                .gamma
                .iter()
                .map(|(n, t)| (n.clone(), t.subst_term(x, &val)))
                .collect();
            let ck = Checker {
                psi: self.psi.clone(),
                gamma,
            };
            let (lo, q2) = ck
                .proc(refined, &q.subst_term(x, &val), c, &a.subst_term(x, &val))
                .map_err(|e| e.context(format!("branch {val}")))?;
            outs.push(lo);
            elab.push(q2);
        }
        let lo = merge(led, outs, "case-bool")?;
        let f = elab.pop().unwrap();
        let t = elab.pop().unwrap();
        Ok((t, f, lo))
    }

    fn unavailable<T>(&self, on: &Name, rule: &'static str) -> TypeResult<T> {
        if self.gamma.contains_key(on) {
            err(rule, format!("{on} is shared; copy it before use"))
        } else {
            err(rule, format!("{on} is not an available channel"))
        }
    }
}

fn label_list(bs: &Branches<SessType>) -> String {
    format!("{{{}}}", bs.keys().cloned().collect::<Vec<_>>().join(", "))
}

fn same_labels<T>(
    branches: &Branches<T>,
    bs: &Branches<SessType>,
    rule: &'static str,
) -> TypeResult<()> {
    if branches.keys().eq(bs.keys()) {
        Ok(())
    } else {
        let have: Vec<_> = branches.keys().cloned().collect();
        err(
            rule,
            format!(
                "branches {{{}}} do not match the labels {}",
                have.join(", "),
                label_list(bs)
            ),
        )
    }
}

/// Leftovers of alternative branches must agree, up to channels of type 1.
/// Untouched channels keep the types they had on entry.
fn merge(input: &Ledger, outs: Vec<Ledger>, rule: &'static str) -> TypeResult<Ledger> {
    let all: BTreeSet<&Name> = outs.iter().flat_map(|o| o.keys()).collect();
    let mut result = Ledger::new();
    for n in all {
        let everywhere = outs.iter().all(|o| o.contains_key(n));
        let ty = input
            .get(n)
            .cloned()
            .or_else(|| outs.iter().find_map(|o| o.get(n).cloned()))
            .unwrap();
        // a channel refined to 1 in every branch that kept it is spent
        if outs.iter().filter_map(|o| o.get(n)).all(is_one) {
            continue;
        }
        if everywhere {
            result.insert(n.clone(), ty);
        } else if !is_one(&ty) {
            return err(
                rule,
                format!("{n} is used in some branches but not in others"),
            );
        }
    }
    Ok(result)
}

/// Best-effort synthesis of the session type a process offers on `c`.
pub fn synth_offer(
    psi: &Psi,
    gamma: &Gamma,
    led: &Ledger,
    p: &Process,
    c: &Name,
) -> Option<SessType> {
    use Process::*;
    let mut fuel = 64;
    fn go(
        psi: &Psi,
        gamma: &Gamma,
        led: &Ledger,
        p: &Process,
        c: &Name,
        fuel: &mut u32,
    ) -> Option<SessType> {
        *fuel = fuel.checked_sub(1)?;
        match p {
            Nil => Some(SessType::One),
            Fwd { from, to } => {
                let d = if to == c {
                    from
                } else if from == c {
                    to
                } else {
                    return None;
                };
                led.get(d)
                    .cloned()
                    .or_else(|| gamma.get(d).map(|b| SessType::Bang(Box::new(b.clone()))))
            }
            OutTerm { on, anno, body, .. } => {
                if on == c {
                    Some(anno.clone())
                } else {
                    go(psi, gamma, led, body, c, fuel)
                }
            }
            Repl { on, bind, body } if on == c => Some(SessType::Bang(Box::new(go(
                psi,
                gamma,
                &Ledger::new(),
                body,
                bind,
                fuel,
            )?))),
            OutFresh {
                on,
                bind,
                left,
                right,
            } if on == c => Some(SessType::Tensor(
                Box::new(go(psi, gamma, led, left, bind, fuel)?),
                Box::new(go(psi, gamma, led, right, c, fuel)?),
            )),
            Case { on, branches } if on == c => {
                let mut bs = Branches::new();
                for (l, q) in branches {
                    bs.insert(l.clone(), go(psi, gamma, led, q, c, fuel)?);
                }
                Some(SessType::With(bs))
            }
            In { on, .. } | Select { on, .. } | Repl { on, .. } | OutFresh { on, .. }
                if on == c =>
            {
                None
            }
            Copy { on, bind, body } => {
                let b = gamma.get(on).cloned().or_else(|| {
                    match led.get(on).map(|t| whnf_sess(t, &mut Fuel::default())) {
                        Some(Ok(SessType::Bang(b))) => Some(*b),
                        _ => None,
                    }
                });
                let mut l2 = led.clone();
                if let Some(b) = b {
                    l2.insert(bind.clone(), b);
                }
                go(psi, gamma, &l2, body, c, fuel)
            }
            In { body, .. } | Select { body, .. } | Repl { body, .. } => {
                go(psi, gamma, led, body, c, fuel)
            }
            OutFresh { right, .. } => go(psi, gamma, led, right, c, fuel),
            Case { branches, .. } => branches
                .values()
                .find_map(|q| go(psi, gamma, led, q, c, fuel)),
            If { then, other, .. } => {
                go(psi, gamma, led, then, c, fuel).or_else(|| go(psi, gamma, led, other, c, fuel))
            }
            New {
                right,
                bind,
                anno,
                left,
            } => {
                let mut l2 = led.clone();
                if let Some(t) = anno
                    .clone()
                    .or_else(|| go(psi, gamma, led, left, bind, fuel))
                {
                    l2.insert(bind.clone(), t);
                }
                go(psi, gamma, &l2, right, c, fuel)
            }
            Spawn(s) => {
                let mut l2 = led.clone();
                let t = s.anno.clone().or_else(|| {
                    match infer_term(psi, &s.term).ok().and_then(|t| whnf_f(&t).ok()) {
                        Some(FunType::Monad(mt)) => Some(*mt.offered_ty),
                        _ => None,
                    }
                });
                if let Some(t) = t {
                    l2.insert(s.bind.clone(), t);
                }
                go(psi, gamma, &l2, &s.cont, c, fuel)
            }
        }
    }
    go(psi, gamma, led, p, c, &mut fuel)
}

// ---------------------------------------------------------------------------
// files

/// A checked declaration, with its body elaborated.
#[derive(Clone, Debug)]
pub struct Checked {
    pub decl: Decl,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub diagnostics: Vec<Diagnostic>,
    pub checked: Vec<Checked>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.diagnostics
            .iter()
            .all(|d| d.severity != crate::diag::Severity::Error)
    }

    pub fn get(&self, name: &str) -> Option<&Decl> {
        self.checked
            .iter()
            .map(|c| &c.decl)
            .find(|d| d.name == name)
    }
}

pub fn check_decl(d: &Decl) -> TypeResult<Decl> {
    let psi = Psi::new();
    let body = match &d.body {
        DeclBody::Type { kind, body } => {
            check_kind(&psi, kind)?;
            match body {
                TypeBody::Fun(t) => crate::wf::check_fun_kind(&psi, t, kind)?,
                TypeBody::Sess(a) => crate::wf::check_sess_kind(&psi, a, kind)?,
            }
            d.body.clone()
        }
        DeclBody::Term { ty, term } => {
            check_fun_type(&psi, ty)?;
            DeclBody::Term {
                ty: ty.clone(),
                term: check(&psi, term, ty)?,
            }
        }
        DeclBody::Proc { ty, body } => {
            let t = FunType::Monad(ty.clone());
            check_fun_type(&psi, &t)?;
            let mv = MonadVal {
                offered: ty.offered.clone(),
                body: body.clone(),
                shared: ty.shared.iter().map(|(n, _)| n.clone()).collect(),
                linear: ty.linear.iter().map(|(n, _)| n.clone()).collect(),
            };
            let checked = check_monad(&psi, &mv, ty)?;
            DeclBody::Proc {
                ty: ty.clone(),
                body: checked.body,
            }
        }
    };
    Ok(Decl {
        name: d.name.clone(),
        pos: d.pos,
        body,
    })
}

/// Checks every declaration of a parsed file after inlining definitions.
pub fn check_source(file: &SourceFile, filename: &str) -> Report {
    let mut report = Report::default();
    let decls = match expand(file) {
        Ok(ds) => ds,
        Err(e) => {
            report.diagnostics.push(Diagnostic::error(
                filename,
                e.pos,
                "cycle",
                format!(
                    "{} refers to {}, which is not defined before it",
                    e.decl, e.refers_to
                ),
            ));
            return report;
        }
    };
    for d in &decls {
        match check_decl(d) {
            Ok(decl) => report.checked.push(Checked { decl }),
            Err(e) => report.diagnostics.push(Diagnostic::error(
                filename,
                d.pos,
                e.rule,
                format!("in {}: {}", d.name, e.message),
            )),
        }
    }
    report
}

/// Parses and checks a source text.
pub fn check_file(src: &str, filename: &str) -> Report {
    match crate::surface::parse_file(src) {
        Ok(f) => check_source(&f, filename),
        Err(e) => Report {
            diagnostics: vec![Diagnostic::error(filename, e.pos, "parse", e.to_string())],
            checked: vec![],
        },
    }
}

/// The term a declaration stands for, if it denotes one.
pub fn decl_term(d: &Decl) -> Option<(Term, FunType)> {
    match &d.body {
        DeclBody::Term { ty, term } => Some((term.clone(), ty.clone())),
        DeclBody::Proc { ty, body } => Some((proc_as_term(ty, body), FunType::Monad(ty.clone()))),
        DeclBody::Type { .. } => None,
    }
}

#[allow(dead_code)]
fn kind_is_type(k: &Kind) -> bool {
    *kind_head(k) == Kind::Type
}

#[allow(dead_code)]
fn sess_kind(psi: &Psi, a: &SessType) -> TypeResult<Kind> {
    infer_kind_sess(psi, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_fun, parse_proc, parse_sess, parse_term};

    fn ok_proc(src: &str, c: &str, a: &str, delta: &[(&str, &str)]) -> TypeResult<Process> {
        let ctx = TriCtx {
            delta: delta
                .iter()
                .map(|(n, t)| (n.to_string(), parse_sess(t).unwrap()))
                .collect(),
            ..TriCtx::default()
        };
        check_closed(
            &ctx,
            &parse_proc(src).unwrap(),
            &c.to_string(),
            &parse_sess(a).unwrap(),
        )
    }

    #[test]
    fn terms() {
        let psi = Psi::new();
        let t = infer_term(&psi, &parse_term("\\x:Bool. x").unwrap()).unwrap();
        assert_eq!(
            fun_eq(&psi, &t, &parse_fun("pi x:Bool. Bool").unwrap()),
            Verdict::Yes
        );
        assert!(check_term(&psi, &Term::TT, &nat_ty()).is_err());
        assert!(check_term(
            &psi,
            &parse_term("{c <- end}").unwrap(),
            &parse_fun("{ |- c:1 }").unwrap()
        )
        .is_ok());
        let t = infer_term(&psi, &parse_term("{c <- end}").unwrap()).unwrap();
        assert_eq!(t, monad_ty("c", SessType::One));
        assert!(infer_term(&psi, &parse_term("{c <- fwd d c <- ; d}").unwrap()).is_err());
    }

    #[test]
    fn identity_forwarder() {
        assert!(ok_proc("fwd d c", "c", "Nat /\\ 1", &[("d", "Nat /\\ 1")]).is_ok());
        assert!(ok_proc("fwd d c", "c", "Nat /\\ 1", &[("d", "Bool /\\ 1")]).is_err());
    }

    #[test]
    fn linearity() {
        // d unused
        let e = ok_proc("end", "c", "1", &[("d", "Nat /\\ 1")]).unwrap_err();
        assert_eq!(e.rule, "leftover");
        // d of type 1 may be dropped
        assert!(ok_proc("end", "c", "1", &[("d", "1")]).is_ok());
        // partially used then abandoned
        let e = ok_proc("recv d (x). end", "c", "1", &[("d", "Nat /\\ Bool /\\ 1")]).unwrap_err();
        assert_eq!(e.rule, "exists-L");
    }

    #[test]
    fn composition_in_either_order() {
        let l = "nu x:Nat /\\ 1. (send x <2 : Nat /\\ 1>. end || recv x (n). end)";
        let r = "nu x:Nat /\\ 1. (recv x (n). end || send x <2 : Nat /\\ 1>. end)";
        let p = ok_proc(l, "c", "1", &[]).unwrap();
        let q = ok_proc(r, "c", "1", &[]).unwrap();
        assert!(crate::alpha::alpha_eq_proc(&p, &q));
    }

    #[test]
    fn data_dependent_choice() {
        let t = "Bool => +{t: Nat /\\ 1, f: Bool /\\ 1}";
        let t2 = "forall x:Bool. ifS x (Nat /\\ 1) (Bool /\\ 1)";
        let q = "recv z (x). case x { tt => z.t; send z <23 : Nat /\\ 1>. end, ff => z.f; send z <tt : Bool /\\ 1>. end }";
        let qf = "recv z (x). case x { tt => z.f; send z <tt : Bool /\\ 1>. end, ff => z.t; send z <23 : Nat /\\ 1>. end }";
        let r = "recv z (x). case x { tt => send z <23 : Nat /\\ 1>. end, ff => send z <tt : Bool /\\ 1>. end }";
        let rf = "recv z (x). case x { tt => send z <tt : Bool /\\ 1>. end, ff => send z <23 : Nat /\\ 1>. end }";
        assert!(ok_proc(q, "z", t, &[]).is_ok());
        assert!(ok_proc(qf, "z", t, &[]).is_ok());
        assert!(ok_proc(r, "z", t2, &[]).is_ok());
        assert!(ok_proc(rf, "z", t2, &[]).is_err());
    }

    #[test]
    fn sharing() {
        assert!(ok_proc(
            "copy u (a). copy u (b). fwd a c",
            "c",
            "Nat /\\ 1",
            &[("u", "!(Nat /\\ 1)")]
        )
        .is_err());
        assert!(ok_proc(
            "copy u (a). fwd a c",
            "c",
            "Nat /\\ 1",
            &[("u", "!(Nat /\\ 1)")]
        )
        .is_ok());
        assert!(ok_proc(
            "serve c (x). send x <1 : Nat /\\ 1>. end",
            "c",
            "!(Nat /\\ 1)",
            &[]
        )
        .is_ok());
    }

    #[test]
    fn spawning() {
        let p = "x <- {d <- send d <1 : Nat /\\ 1>. end}; fwd x c";
        let q = ok_proc(p, "c", "Nat /\\ 1", &[]).unwrap();
        match q {
            Process::Spawn(s) => assert!(s.anno.is_some()),
            _ => panic!(),
        }
    }
}
