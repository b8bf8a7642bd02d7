//! Algorithmic definitional equality.
//!
//! Terms and types are compared by normalization followed by a congruence
//! check with eta on demand. Processes are compared by closing both sides
//! under reduction, forwarder-eta contraction and prefix-hoisting commuting
//! conversions, then testing structural congruence. Every comparison runs on
//! a fuel budget; running out yields `Undecided`, never `No`.

use std::collections::BTreeSet;
use std::fmt;

use crate::alpha::{alpha_eq_term, struct_cong};
use crate::dynamics::Config;
use crate::subst::{rename_simultaneous, Substitutable};
use crate::syntax::*;

pub const DEFAULT_FUEL: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Undecided,
}

impl Verdict {
    fn and(self, other: impl FnOnce() -> Verdict) -> Verdict {
        match self {
            Verdict::No => Verdict::No,
            Verdict::Yes => other(),
            Verdict::Undecided => match other() {
                Verdict::No => Verdict::No,
                _ => Verdict::Undecided,
            },
        }
    }

    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Undecided => "undecided",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutOfFuel;

pub type Fueled<T> = Result<T, OutOfFuel>;

#[derive(Clone, Debug)]
pub struct Fuel {
    pub left: u64,
}

impl Fuel {
    pub fn new(n: u64) -> Self {
        Fuel { left: n }
    }

    pub fn tick(&mut self) -> Fueled<()> {
        if self.left == 0 {
            return Err(OutOfFuel);
        }
        self.left -= 1;
        Ok(())
    }
}

/// The fuel budget in effect: `SDPI_FUEL` if set, otherwise the default.
pub fn default_fuel() -> u64 {
    std::env::var("SDPI_FUEL")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_FUEL)
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel::new(default_fuel())
    }
}

fn verdict(r: Fueled<Verdict>) -> Verdict {
    r.unwrap_or(Verdict::Undecided)
}

// ---------------------------------------------------------------------------
// terms

/// Weak-head normal form: beta and the built-in eliminators on constructors.
pub fn whnf_term(m: &Term, fuel: &mut Fuel) -> Fueled<Term> {
    let mut m = m.clone();
    loop {
        match m {
            Term::App(f, a) => {
                let f = whnf_term(&f, fuel)?;
                match f {
                    Term::Lam(x, _, b) => {
                        fuel.tick()?;
                        m = b.subst_term(&x, &a);
                    }
                    f => return Ok(Term::App(Box::new(f), a)),
                }
            }
            Term::IfT(c, a, b) => {
                let c = whnf_term(&c, fuel)?;
                match c {
                    Term::TT => {
                        fuel.tick()?;
                        m = *a;
                    }
                    Term::FF => {
                        fuel.tick()?;
                        m = *b;
                    }
                    c => return Ok(Term::IfT(Box::new(c), a, b)),
                }
            }
            Term::NatRecT {
                motive,
                target,
                zero,
                pred,
                rec,
                succ,
            } => {
                let t = whnf_term(&target, fuel)?;
                match t {
                    Term::Zero => {
                        fuel.tick()?;
                        m = *zero;
                    }
                    Term::Succ(k) => {
                        fuel.tick()?;
                        let again = Term::NatRecT {
                            motive,
                            target: k.clone(),
                            zero,
                            pred: pred.clone(),
                            rec: rec.clone(),
                            succ: succ.clone(),
                        };
                        m = subst_two(&succ, &pred, &k, &rec, &again);
                    }
                    t => {
                        return Ok(Term::NatRecT {
                            motive,
                            target: Box::new(t),
                            zero,
                            pred,
                            rec,
                            succ,
                        })
                    }
                }
            }
            _ => return Ok(m),
        }
    }
}

/// `body{a/x}{b/y}` done simultaneously.
fn subst_two(body: &Term, x: &Name, a: &Term, y: &Name, b: &Term) -> Term {
    let mut avoid = body.free_names();
    avoid.extend(a.free_names());
    avoid.extend(b.free_names());
    avoid.insert(x.clone());
    avoid.insert(y.clone());
    let y2 = fresh_name(y, &avoid);
    body.rename(y, &y2).subst_term(x, a).subst_term(&y2, b)
}

/// Full normal form in normal order, with monadic-eta contraction. Monad
/// bodies are left alone.
pub fn nf_term(m: &Term, fuel: &mut Fuel) -> Fueled<Term> {
    let m = whnf_term(m, fuel)?;
    Ok(match m {
        Term::Lam(x, t, b) => Term::Lam(x, t, Box::new(nf_term(&b, fuel)?)),
        Term::App(f, a) => Term::App(Box::new(nf_term(&f, fuel)?), Box::new(nf_term(&a, fuel)?)),
        Term::Succ(a) => Term::Succ(Box::new(nf_term(&a, fuel)?)),
        Term::IfT(c, a, b) => Term::IfT(
            Box::new(nf_term(&c, fuel)?),
            Box::new(nf_term(&a, fuel)?),
            Box::new(nf_term(&b, fuel)?),
        ),
        Term::NatRecT {
            motive,
            target,
            zero,
            pred,
            rec,
            succ,
        } => Term::NatRecT {
            motive,
            target: Box::new(nf_term(&target, fuel)?),
            zero: Box::new(nf_term(&zero, fuel)?),
            pred,
            rec,
            succ: Box::new(nf_term(&succ, fuel)?),
        },
        Term::MonadVal(mv) => match monad_eta(&mv) {
            Some(n) => {
                fuel.tick()?;
                nf_term(&n, fuel)?
            }
            None => Term::MonadVal(mv),
        },
        other => other,
    })
}

/// `{c <- (y <- M <- us; ds; fwd y c) <- us; ds}` contracts to `M`.
fn monad_eta(mv: &MonadVal) -> Option<Term> {
    let Process::Spawn(s) = &mv.body else {
        return None;
    };
    let fwd_ok = match &s.cont {
        Process::Fwd { from, to } => {
            (from == &s.bind && to == &mv.offered) || (to == &s.bind && from == &mv.offered)
        }
        _ => false,
    };
    let chans: BTreeSet<&Name> = mv
        .shared
        .iter()
        .chain(mv.linear.iter())
        .chain([&mv.offered])
        .collect();
    let term_free = s.term.free_names();
    if fwd_ok
        && s.bind != mv.offered
        && s.shared == mv.shared
        && s.linear == mv.linear
        && !term_free.iter().any(|n| chans.contains(n))
    {
        Some(s.term.clone())
    } else {
        None
    }
}

/// Normalizes a term with the default fuel budget.
pub fn normalize_term(_psi: &Psi, m: &Term) -> Fueled<Term> {
    nf_term(m, &mut Fuel::default())
}

/// Deep normal form used inside process comparison: monad bodies are
/// normalized as processes.
fn deep_nf_term(m: &Term, fuel: &mut Fuel) -> Fueled<Term> {
    let m = nf_term(m, fuel)?;
    Ok(match m {
        Term::MonadVal(mv) => {
            let body = nf_proc(&mv.body, Some(&mv.offered), fuel)?;
            Term::MonadVal(Box::new(MonadVal { body, ..*mv }))
        }
        Term::Lam(x, t, b) => Term::Lam(x, t, Box::new(deep_nf_term(&b, fuel)?)),
        Term::App(f, a) => Term::App(
            Box::new(deep_nf_term(&f, fuel)?),
            Box::new(deep_nf_term(&a, fuel)?),
        ),
        other => other,
    })
}

fn head_stuck_term(m: &Term) -> bool {
    match m {
        Term::IfT(..) | Term::NatRecT { .. } => true,
        Term::App(f, _) => head_stuck_term(f),
        _ => false,
    }
}

struct Conv<'f> {
    fuel: &'f mut Fuel,
    avoid: BTreeSet<Name>,
}

impl Conv<'_> {
    fn fresh(&mut self, base: &str) -> Name {
        let n = fresh_name(base, &self.avoid);
        self.avoid.insert(n.clone());
        n
    }

    fn see<T: FreeNames>(&mut self, x: &T) {
        self.avoid.extend(x.free_names());
    }

    fn term(&mut self, m: &Term, n: &Term) -> Fueled<Verdict> {
        self.fuel.tick()?;
        let m = nf_term(m, self.fuel)?;
        let n = nf_term(n, self.fuel)?;
        if alpha_eq_term(&m, &n) {
            return Ok(Verdict::Yes);
        }
        self.see(&m);
        self.see(&n);
        use Term::*;
        Ok(match (&m, &n) {
            (Lam(x, t, b), Lam(y, s, c)) => {
                let v = self.fun(t, s)?;
                if v == Verdict::No {
                    return Ok(v);
                }
                let z = self.fresh(x);
                let r = self.term(&b.rename(x, &z), &c.rename(y, &z))?;
                v.and(|| r)
            }
            (Lam(x, _, b), other) | (other, Lam(x, _, b)) => {
                let z = self.fresh(x);
                self.term(&b.rename(x, &z), &app(other.clone(), var(&z)))?
            }
            (MonadVal(v), MonadVal(w)) => {
                if v.shared.len() != w.shared.len() || v.linear.len() != w.linear.len() {
                    return Ok(Verdict::No);
                }
                let body = rename_channels(&w.body, w, v);
                proc_eq_fuel(&v.body, &body, Some(&v.offered), self.fuel)?
            }
            (MonadVal(v), other) | (other, MonadVal(v)) => {
                let y = self.fresh("y");
                let expanded = Process::Spawn(Box::new(Spawn {
                    bind: y.clone(),
                    anno: None,
                    term: other.clone(),
                    shared: v.shared.clone(),
                    linear: v.linear.clone(),
                    cont: fwd(&y, &v.offered),
                }));
                proc_eq_fuel(&v.body, &expanded, Some(&v.offered), self.fuel)?
            }
            (Var(x), Var(y)) => {
                if x == y {
                    Verdict::Yes
                } else {
                    Verdict::No
                }
            }
            (App(f, a), App(g, b)) => {
                let h = self.term(f, g)?;
                if h == Verdict::No {
                    return Ok(self.rigid(&m, &n));
                }
                let r = self.term(a, b)?;
                h.and(|| r)
            }
            (Succ(a), Succ(b)) => self.term(a, b)?,
            (IfT(c1, a1, b1), IfT(c2, a2, b2)) => {
                let c = self.term(c1, c2)?;
                if c == Verdict::No {
                    return Ok(Verdict::Undecided);
                }
                let a = self.term(a1, a2)?;
                let b = self.term(b1, b2)?;
                c.and(|| a).and(|| b)
            }
            (
                NatRecT {
                    motive: t1,
                    target: m1,
                    zero: z1,
                    pred: p1,
                    rec: r1,
                    succ: s1,
                },
                NatRecT {
                    motive: t2,
                    target: m2,
                    zero: z2,
                    pred: p2,
                    rec: r2,
                    succ: s2,
                },
            ) => {
                let c = self.term(m1, m2)?;
                if c == Verdict::No {
                    return Ok(Verdict::Undecided);
                }
                let t = self.fun(t1, t2)?;
                let z = self.term(z1, z2)?;
                let (p, r) = (self.fresh(p1), self.fresh(r1));
                let s = self.term(
                    &s1.rename(p1, &p).rename(r1, &r),
                    &s2.rename(p2, &p).rename(r2, &r),
                )?;
                c.and(|| t).and(|| z).and(|| s)
            }
            _ => self.rigid(&m, &n),
        })
    }

    fn rigid(&self, m: &Term, n: &Term) -> Verdict {
        if head_stuck_term(m) || head_stuck_term(n) {
            Verdict::Undecided
        } else {
            Verdict::No
        }
    }

    fn kind(&mut self, a: &Kind, b: &Kind) -> Fueled<Verdict> {
        self.fuel.tick()?;
        Ok(match (a, b) {
            (Kind::Type, Kind::Type) | (Kind::SType, Kind::SType) => Verdict::Yes,
            (Kind::PiTerm(x, t, k), Kind::PiTerm(y, s, j)) => {
                let d = self.fun(t, s)?;
                let z = self.fresh(x);
                let r = self.kind(&k.rename(x, &z), &j.rename(y, &z))?;
                d.and(|| r)
            }
            (Kind::PiType(x, k1, k2), Kind::PiType(y, j1, j2)) => {
                let d = self.kind(k1, j1)?;
                let z = self.fresh(x);
                let r = self.kind(&k2.rename(x, &z), &j2.rename(y, &z))?;
                d.and(|| r)
            }
            _ => Verdict::No,
        })
    }

    fn fun(&mut self, a: &FunType, b: &FunType) -> Fueled<Verdict> {
        use FunType::*;
        self.fuel.tick()?;
        let a = whnf_fun(a, self.fuel)?;
        let b = whnf_fun(b, self.fuel)?;
        self.see(&a);
        self.see(&b);
        Ok(match (&a, &b) {
            (Pi(x, t, u), Pi(y, s, v)) | (LamT(x, t, u), LamT(y, s, v)) => {
                let d = self.fun(t, s)?;
                let z = self.fresh(x);
                let r = self.fun(&u.rename(x, &z), &v.rename(y, &z))?;
                d.and(|| r)
            }
            (LamK(x, k, u), LamK(y, j, v)) => {
                let d = self.kind(k, j)?;
                let z = self.fresh(x);
                let r = self.fun(&u.rename(x, &z), &v.rename(y, &z))?;
                d.and(|| r)
            }
            (AppT(f, m), AppT(g, n)) => {
                let h = self.fun(f, g)?;
                let r = self.term(m, n)?;
                h.and(|| r)
            }
            (AppK(f, s), AppK(g, t)) => {
                let h = self.fun(f, g)?;
                let r = self.fun(s, t)?;
                h.and(|| r)
            }
            (Monad(m), Monad(n)) => {
                if m.shared.len() != n.shared.len() || m.linear.len() != n.linear.len() {
                    return Ok(Verdict::No);
                }
                let mut v = Verdict::Yes;
                for (x, y) in m
                    .shared
                    .iter()
                    .zip(&n.shared)
                    .chain(m.linear.iter().zip(&n.linear))
                {
                    let r = self.sess(&x.1, &y.1)?;
                    v = v.and(|| r);
                }
                let r = self.sess(&m.offered_ty, &n.offered_ty)?;
                v.and(|| r)
            }
            (TVar(x), TVar(y)) if x == y => Verdict::Yes,
            (Base(x), Base(y)) if x == y => Verdict::Yes,
            _ => Verdict::No,
        })
    }

    fn sess(&mut self, a: &SessType, b: &SessType) -> Fueled<Verdict> {
        use SessType::*;
        self.fuel.tick()?;
        let a = whnf_sess(a, self.fuel)?;
        let b = whnf_sess(b, self.fuel)?;
        self.see(&a);
        self.see(&b);
        Ok(match (&a, &b) {
            (One, One) => Verdict::Yes,
            (Bang(x), Bang(y)) => self.sess(x, y)?,
            (Lolli(x, u), Lolli(y, v))
            | (Tensor(x, u), Tensor(y, v))
            | (AppTy(x, u), AppTy(y, v)) => {
                let h = self.sess(x, y)?;
                let r = self.sess(u, v)?;
                h.and(|| r)
            }
            (Forall(x, t, u), Forall(y, s, v))
            | (Exists(x, t, u), Exists(y, s, v))
            | (LamTm(x, t, u), LamTm(y, s, v)) => {
                let d = self.fun(t, s)?;
                let z = self.fresh(x);
                let r = self.sess(&u.rename(x, &z), &v.rename(y, &z))?;
                d.and(|| r)
            }
            (LamTy(x, k, u), LamTy(y, j, v)) => {
                let d = self.kind(k, j)?;
                let z = self.fresh(x);
                let r = self.sess(&u.rename(x, &z), &v.rename(y, &z))?;
                d.and(|| r)
            }
            // eta for session-level abstractions
            (LamTm(x, _, u), other) | (other, LamTm(x, _, u)) => {
                let z = self.fresh(x);
                self.sess(
                    &u.rename(x, &z),
                    &AppTm(Box::new(other.clone()), Box::new(var(&z))),
                )?
            }
            (LamTy(x, _, u), other) | (other, LamTy(x, _, u)) => {
                let z = self.fresh(x);
                self.sess(
                    &u.rename(x, &z),
                    &AppTy(Box::new(other.clone()), Box::new(SVar(z))),
                )?
            }
            (With(x), With(y)) | (Plus(x), Plus(y)) => {
                if !x.keys().eq(y.keys()) {
                    return Ok(Verdict::No);
                }
                let mut v = Verdict::Yes;
                for (p, q) in x.values().zip(y.values()) {
                    let r = self.sess(p, q)?;
                    v = v.and(|| r);
                }
                v
            }
            (AppTm(x, m), AppTm(y, n)) => {
                let h = self.sess(x, y)?;
                let r = self.term(m, n)?;
                if h == Verdict::No {
                    self.rigid_sess(&a, &b)
                } else {
                    h.and(|| r)
                }
            }
            (SVar(x), SVar(y)) if x == y => Verdict::Yes,
            (IfS(m, x, u), IfS(n, y, v)) => {
                let c = self.term(m, n)?;
                if c == Verdict::No {
                    return Ok(Verdict::Undecided);
                }
                let p = self.sess(x, y)?;
                let q = self.sess(u, v)?;
                c.and(|| p).and(|| q)
            }
            (
                NatRecS {
                    target: m,
                    zero: z1,
                    pred: p1,
                    rec: r1,
                    succ: s1,
                },
                NatRecS {
                    target: n,
                    zero: z2,
                    pred: p2,
                    rec: r2,
                    succ: s2,
                },
            ) => {
                let c = self.term(m, n)?;
                if c == Verdict::No {
                    return Ok(Verdict::Undecided);
                }
                let z = self.sess(z1, z2)?;
                let (p, r) = (self.fresh(p1), self.fresh(r1));
                let s = self.sess(
                    &s1.rename(p1, &p).rename(r1, &r),
                    &s2.rename(p2, &p).rename(r2, &r),
                )?;
                c.and(|| z).and(|| s)
            }
            _ => self.rigid_sess(&a, &b),
        })
    }

    fn rigid_sess(&self, a: &SessType, b: &SessType) -> Verdict {
        fn stuck(a: &SessType) -> bool {
            match a {
                SessType::IfS(..) | SessType::NatRecS { .. } => true,
                SessType::AppTm(f, _) | SessType::AppTy(f, _) => stuck(f),
                _ => false,
            }
        }
        if stuck(a) || stuck(b) {
            Verdict::Undecided
        } else {
            Verdict::No
        }
    }
}

/// Renames the channels bound by `from` to those bound by `to`, positionally.
fn rename_channels(body: &Process, from: &MonadVal, to: &MonadVal) -> Process {
    let olds = [&from.offered]
        .into_iter()
        .chain(&from.shared)
        .chain(&from.linear);
    let news = [&to.offered]
        .into_iter()
        .chain(&to.shared)
        .chain(&to.linear);
    let pairs: Vec<(Name, Name)> = olds
        .zip(news)
        .map(|(a, b)| (a.clone(), b.clone()))
        .collect();
    rename_simultaneous(body, &pairs)
}

// ---------------------------------------------------------------------------
// types

pub fn whnf_fun(t: &FunType, fuel: &mut Fuel) -> Fueled<FunType> {
    let mut t = t.clone();
    loop {
        match t {
            FunType::AppT(f, m) => match whnf_fun(&f, fuel)? {
                FunType::LamT(x, _, b) => {
                    fuel.tick()?;
                    t = b.subst_term(&x, &m);
                }
                f => return Ok(FunType::AppT(Box::new(f), m)),
            },
            FunType::AppK(f, a) => match whnf_fun(&f, fuel)? {
                FunType::LamK(x, _, b) => {
                    fuel.tick()?;
                    t = b.subst_fun(&x, &a);
                }
                f => return Ok(FunType::AppK(Box::new(f), a)),
            },
            _ => return Ok(t),
        }
    }
}

pub fn whnf_sess(a: &SessType, fuel: &mut Fuel) -> Fueled<SessType> {
    use SessType::*;
    let mut a = a.clone();
    loop {
        match a {
            AppTm(f, m) => match whnf_sess(&f, fuel)? {
                LamTm(x, _, b) => {
                    fuel.tick()?;
                    a = b.subst_term(&x, &m);
                }
                f => return Ok(AppTm(Box::new(f), m)),
            },
            AppTy(f, s) => match whnf_sess(&f, fuel)? {
                LamTy(x, _, b) => {
                    fuel.tick()?;
                    a = b.subst_sess(&x, &s);
                }
                f => return Ok(AppTy(Box::new(f), s)),
            },
            IfS(m, x, y) => match nf_term(&m, fuel)? {
                Term::TT => {
                    fuel.tick()?;
                    a = *x;
                }
                Term::FF => {
                    fuel.tick()?;
                    a = *y;
                }
                m => return Ok(IfS(Box::new(m), x, y)),
            },
            NatRecS {
                target,
                zero,
                pred,
                rec,
                succ,
            } => match whnf_term(&target, fuel)? {
                Term::Zero => {
                    fuel.tick()?;
                    a = *zero;
                }
                Term::Succ(k) => {
                    fuel.tick()?;
                    let again = NatRecS {
                        target: k.clone(),
                        zero,
                        pred: pred.clone(),
                        rec: rec.clone(),
                        succ: succ.clone(),
                    };
                    let mut avoid = succ.free_names();
                    avoid.extend(k.free_names());
                    avoid.extend(again.free_names());
                    avoid.insert(pred.clone());
                    let r2 = fresh_name(&rec, &avoid);
                    a = succ
                        .rename(&rec, &r2)
                        .subst_term(&pred, &k)
                        .subst_sess(&r2, &again);
                }
                t => {
                    return Ok(NatRecS {
                        target: Box::new(nf_term(&t, fuel)?),
                        zero,
                        pred,
                        rec,
                        succ,
                    });
                }
            },
            _ => return Ok(a),
        }
    }
}

/// Weak-head normal form with the default budget; the input is returned
/// unchanged if the budget runs out.
pub fn whnf_sess_default(a: &SessType) -> SessType {
    whnf_sess(a, &mut Fuel::default()).unwrap_or_else(|_| a.clone())
}

fn conv<'f>(psi: &Psi, fuel: &'f mut Fuel) -> Conv<'f> {
    Conv {
        fuel,
        avoid: psi.names(),
    }
}

pub fn term_eq(psi: &Psi, m: &Term, n: &Term, _at: &FunType) -> Verdict {
    term_eq_fuel(psi, m, n, &mut Fuel::default())
}

pub fn term_eq_fuel(psi: &Psi, m: &Term, n: &Term, fuel: &mut Fuel) -> Verdict {
    verdict(conv(psi, fuel).term(m, n))
}

pub fn fun_eq(psi: &Psi, a: &FunType, b: &FunType) -> Verdict {
    verdict(conv(psi, &mut Fuel::default()).fun(a, b))
}

pub fn fun_eq_fuel(psi: &Psi, a: &FunType, b: &FunType, fuel: &mut Fuel) -> Verdict {
    verdict(conv(psi, fuel).fun(a, b))
}

pub fn kind_eq_fuel(psi: &Psi, a: &Kind, b: &Kind, fuel: &mut Fuel) -> Verdict {
    verdict(conv(psi, fuel).kind(a, b))
}

pub fn sess_eq(psi: &Psi, a: &SessType, b: &SessType) -> Verdict {
    verdict(conv(psi, &mut Fuel::default()).sess(a, b))
}

pub fn sess_eq_fuel(psi: &Psi, a: &SessType, b: &SessType, fuel: &mut Fuel) -> Verdict {
    verdict(conv(psi, fuel).sess(a, b))
}

pub fn kind_eq(psi: &Psi, a: &Kind, b: &Kind) -> Verdict {
    verdict(conv(psi, &mut Fuel::default()).kind(a, b))
}

// ---------------------------------------------------------------------------
// processes

/// Process equality at an offered channel.
pub fn proc_eq(_ctx: &TriCtx, p: &Process, q: &Process, offered: (&Name, &SessType)) -> Verdict {
    proc_eq_with(p, q, offered.0, &mut Fuel::default())
}

pub fn proc_eq_with(p: &Process, q: &Process, offered: &Name, fuel: &mut Fuel) -> Verdict {
    verdict(proc_eq_fuel(p, q, Some(offered), fuel))
}

fn proc_eq_fuel(
    p: &Process,
    q: &Process,
    offered: Option<&Name>,
    fuel: &mut Fuel,
) -> Fueled<Verdict> {
    if struct_cong(p, q) {
        return Ok(Verdict::Yes);
    }
    let p = nf_proc(p, offered, fuel)?;
    let q = nf_proc(q, offered, fuel)?;
    Ok(if struct_cong(&p, &q) {
        Verdict::Yes
    } else {
        Verdict::No
    })
}

/// Normal form of a process for comparison purposes.
pub fn nf_proc(p: &Process, offered: Option<&Name>, fuel: &mut Fuel) -> Fueled<Process> {
    let mut cur = p.clone();
    loop {
        fuel.tick()?;
        let mut cfg = Config::flatten(&cur, offered.cloned());
        cfg.quiesce(fuel)?;
        if cfg.threads.len() >= 2 {
            if let Some(h) = hoist(&cfg, offered) {
                return nf_prefix(&h, offered, fuel);
            }
        }
        let mut changed = false;
        for t in cfg.threads.iter_mut() {
            let n = nf_prefix(&t.proc, t.offers.as_ref().or(offered), fuel)?;
            if !matches!(t.proc, Process::Fwd { .. }) && matches!(n, Process::Fwd { .. }) {
                changed = true;
            }
            t.proc = n;
        }
        let next = cfg.rebuild();
        if !changed {
            return Ok(next);
        }
        cur = next;
    }
}

/// Normalizes under the head prefix, then tries forwarder-eta at the head.
fn nf_prefix(p: &Process, offered: Option<&Name>, fuel: &mut Fuel) -> Fueled<Process> {
    use Process::*;
    let b = |q: &Process, f: &mut Fuel| -> Fueled<Box<Process>> {
        Ok(Box::new(nf_proc(q, offered, f)?))
    };
    let out = match p {
        OutFresh {
            on,
            bind,
            left,
            right,
        } => OutFresh {
            on: on.clone(),
            bind: bind.clone(),
            left: Box::new(nf_proc(left, Some(bind), fuel)?),
            right: b(right, fuel)?,
        },
        In { on, bind, body } => In {
            on: on.clone(),
            bind: bind.clone(),
            body: b(body, fuel)?,
        },
        Repl { on, bind, body } => Repl {
            on: on.clone(),
            bind: bind.clone(),
            body: Box::new(nf_proc(body, Some(bind), fuel)?),
        },
        Copy { on, bind, body } => Copy {
            on: on.clone(),
            bind: bind.clone(),
            body: b(body, fuel)?,
        },
        OutTerm {
            on,
            payload,
            anno,
            body,
        } => OutTerm {
            on: on.clone(),
            payload: deep_nf_term(payload, fuel)?,
            anno: anno.clone(),
            body: b(body, fuel)?,
        },
        Case { on, branches } => {
            let mut bs = Branches::new();
            for (l, q) in branches {
                bs.insert(l.clone(), nf_proc(q, offered, fuel)?);
            }
            Case {
                on: on.clone(),
                branches: bs,
            }
        }
        If { cond, then, other } => match nf_term(cond, fuel)? {
            Term::TT => nf_proc(then, offered, fuel)?,
            Term::FF => nf_proc(other, offered, fuel)?,
            c => If {
                cond: c,
                then: b(then, fuel)?,
                other: b(other, fuel)?,
            },
        },
        Select { on, label, body } => Select {
            on: on.clone(),
            label: label.clone(),
            body: b(body, fuel)?,
        },
        Spawn(s) => Spawn(Box::new(crate::syntax::Spawn {
            bind: s.bind.clone(),
            anno: s.anno.clone(),
            term: deep_nf_term(&s.term, fuel)?,
            shared: s.shared.clone(),
            linear: s.linear.clone(),
            cont: nf_proc(&s.cont, offered, fuel)?,
        })),
        New { .. } => nf_proc(p, offered, fuel)?,
        Fwd { .. } | Nil => p.clone(),
    };
    Ok(eta_contract(&out).unwrap_or(out))
}

fn fwd_between(p: &Process, a: &Name, b: &Name) -> bool {
    matches!(p, Process::Fwd { from, to } if (from == a && to == b) || (from == b && to == a))
}

/// Forwarder-eta: the expansion of a forwarder at any connective contracts to
/// the forwarder itself.
pub fn eta_contract(p: &Process) -> Option<Process> {
    use Process::*;
    match p {
        // value input then output of the same value
        In {
            on: a,
            bind: x,
            body,
        } if x != a => match &**body {
            OutTerm {
                on: b,
                payload: Term::Var(y),
                body: k,
                ..
            } if y == x && b != a && b != x && fwd_between(k, a, b) => Some(fwd(a, b)),
            OutFresh {
                on: b,
                bind: w,
                left,
                right,
            } if b != a
                && b != x
                && w != a
                && fwd_between(left, w, x)
                && fwd_between(right, a, b) =>
            {
                Some(fwd(a, b))
            }
            _ => None,
        },
        Case { on: a, branches } => {
            let mut target: Option<&Name> = None;
            for (l, q) in branches {
                match q {
                    Select { on: b, label, body }
                        if label == l && b != a && fwd_between(body, a, b) =>
                    {
                        if target.is_some_and(|t| t != b) {
                            return None;
                        }
                        target = Some(b);
                    }
                    _ => return None,
                }
            }
            target.map(|b| fwd(a, b))
        }
        Repl {
            on: a,
            bind: x,
            body,
        } => match &**body {
            Copy {
                on: b,
                bind: y,
                body: k,
            } if b != a && y != x && fwd_between(k, x, y) => Some(fwd(a, b)),
            _ => None,
        },
        _ => None,
    }
}

/// Commuting conversion: lifts a prefix on a free channel out of a
/// composition. The offered channel is preferred, then channel order.
fn hoist(cfg: &Config, offered: Option<&Name>) -> Option<Process> {
    use Process::*;
    let mut cands: Vec<(u8, Name, usize)> = vec![];
    for (i, t) in cfg.threads.iter().enumerate() {
        let key = match &t.proc {
            In { on, .. }
            | OutTerm { on, .. }
            | Select { on, .. }
            | Case { on, .. }
            | OutFresh { on, .. }
            | Copy { on, .. }
                if !cfg.restricted.contains(on) =>
            {
                Some(on.clone())
            }
            If { .. } => Some(String::new()),
            _ => None,
        };
        if let Some(k) = key {
            let rank = if Some(&k) == offered {
                0
            } else if k.is_empty() {
                2
            } else {
                1
            };
            cands.push((rank, k, i));
        }
    }
    cands.sort();
    for (_, _, i) in cands {
        if let Some(p) = hoist_thread(cfg, i) {
            return Some(p);
        }
    }
    None
}

fn hoist_thread(cfg: &Config, i: usize) -> Option<Process> {
    use Process::*;
    let others: Vec<usize> = (0..cfg.threads.len()).filter(|j| *j != i).collect();
    let mut avoid: BTreeSet<Name> = cfg
        .threads
        .iter()
        .flat_map(|t| all_names(&t.proc))
        .collect();
    avoid.extend(cfg.restricted.iter().cloned());
    let with = |cont: &Process| -> Process { cfg.group_with(i, cont.clone(), &others) };
    let mut freshen = |bind: &Name, body: &Process| -> (Name, Process) {
        let b = fresh_name(bind, &avoid);
        avoid.insert(b.clone());
        (b.clone(), body.rename(bind, &b))
    };
    Some(match &cfg.threads[i].proc {
        In { on, bind, body } => {
            let (b, body) = freshen(bind, body);
            In {
                on: on.clone(),
                bind: b,
                body: Box::new(with(&body)),
            }
        }
        Copy { on, bind, body } => {
            let (b, body) = freshen(bind, body);
            Copy {
                on: on.clone(),
                bind: b,
                body: Box::new(with(&body)),
            }
        }
        OutTerm {
            on,
            payload,
            anno,
            body,
        } => OutTerm {
            on: on.clone(),
            payload: payload.clone(),
            anno: anno.clone(),
            body: Box::new(with(body)),
        },
        Select { on, label, body } => Select {
            on: on.clone(),
            label: label.clone(),
            body: Box::new(with(body)),
        },
        Case { on, branches } => Case {
            on: on.clone(),
            branches: branches.iter().map(|(l, q)| (l.clone(), with(q))).collect(),
        },
        If { cond, then, other } => If {
            cond: cond.clone(),
            then: Box::new(with(then)),
            other: Box::new(with(other)),
        },
        OutFresh {
            on,
            bind,
            left,
            right,
        } => {
            let b = fresh_name(bind, &avoid);
            let left = left.rename(bind, &b);
            let right = right.rename(bind, &b);
            let (to_left, to_right) = cfg.split_for(&others, &left, &right)?;
            OutFresh {
                on: on.clone(),
                bind: b.clone(),
                left: Box::new(cfg.group_with(i, left, &to_left)),
                right: Box::new(cfg.group_with(i, right, &to_right)),
            }
        }
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_proc, parse_sess, parse_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn yes_terms(a: &str, b: &str) {
        assert_eq!(
            term_eq_fuel(&Psi::new(), &t(a), &t(b), &mut Fuel::default()),
            Verdict::Yes,
            "{a} = {b}"
        );
    }

    #[test]
    fn beta_and_iota() {
        assert_eq!(
            normalize_term(&Psi::new(), &t("(\\x:Bool. x) tt")).unwrap(),
            Term::TT
        );
        assert_eq!(
            normalize_term(&Psi::new(), &t("natrecT Nat (succ z) z (n, r => succ r)")).unwrap(),
            nat(1)
        );
        assert_eq!(
            normalize_term(&Psi::new(), &t("natrecT Nat 3 z (n, r => succ (succ r))")).unwrap(),
            nat(6)
        );
    }

    #[test]
    fn monadic_eta() {
        assert_eq!(
            normalize_term(&Psi::new(), &t("{ c <- y <- m; fwd y c }")).unwrap(),
            var("m")
        );
        // not an eta redex: the forwarder goes elsewhere
        assert!(matches!(
            normalize_term(&Psi::new(), &t("{ c <- y <- m; fwd y d }")).unwrap(),
            Term::MonadVal(_)
        ));
    }

    #[test]
    fn eta_at_functions() {
        yes_terms("\\x:Bool. f x", "f");
        assert_eq!(
            term_eq_fuel(&Psi::new(), &Term::TT, &Term::FF, &mut Fuel::default()),
            Verdict::No
        );
    }

    #[test]
    fn stuck_eliminators_are_undecided() {
        let v = term_eq_fuel(
            &Psi::new(),
            &t("ifT x tt ff"),
            &t("x"),
            &mut Fuel::default(),
        );
        assert_eq!(v, Verdict::Undecided);
    }

    #[test]
    fn session_types() {
        let psi = Psi::new();
        let a = parse_sess("ifS tt (Nat /\\ 1) (Bool /\\ 1)").unwrap();
        assert_eq!(
            sess_eq(&psi, &a, &parse_sess("Nat /\\ 1").unwrap()),
            Verdict::Yes
        );
        assert_eq!(
            sess_eq(
                &psi,
                &parse_sess("Nat /\\ 1").unwrap(),
                &parse_sess("Bool /\\ 1").unwrap()
            ),
            Verdict::No
        );
        let cd = "(\\x:Nat. natrecS x 1 (n, r => exists y:Nat. r))";
        let lhs = parse_sess(&format!("(\\x:Nat. {cd} [x]) [succ z]")).unwrap();
        let rhs = parse_sess(&format!("exists y:Nat. {cd} [z]")).unwrap();
        assert_eq!(sess_eq(&psi, &lhs, &rhs), Verdict::Yes);
    }

    #[test]
    fn fuel_exhaustion_is_undecided() {
        let omega_ish = t("natrecT Nat 50 z (n, r => succ (succ r))");
        assert_eq!(
            term_eq_fuel(&Psi::new(), &omega_ish, &nat(100), &mut Fuel::new(5)),
            Verdict::Undecided
        );
    }

    #[test]
    fn process_eta_and_commuting_conversion() {
        let ctx = TriCtx::default();
        let a = parse_sess("forall x:Nat. 1").unwrap();
        let p = parse_proc("fwd d c").unwrap();
        let q = parse_proc("recv c (x). send d <x : forall x:Nat. 1>. fwd d c").unwrap();
        assert_eq!(proc_eq(&ctx, &p, &q, (&"c".to_string(), &a)), Verdict::Yes);
        let l = parse_proc("nu d:1. (end || recv c (x). fwd e c)").unwrap();
        let r = parse_proc("recv c (x). nu d:1. (end || fwd e c)").unwrap();
        assert_eq!(proc_eq(&ctx, &l, &r, (&"c".to_string(), &a)), Verdict::Yes);
        let s1 = parse_proc("send c <tt : Bool /\\ 1>. end").unwrap();
        let s2 = parse_proc("send c <ff : Bool /\\ 1>. end").unwrap();
        assert_eq!(
            proc_eq(&ctx, &s1, &s2, (&"c".to_string(), &SessType::One)),
            Verdict::No
        );
    }
}
