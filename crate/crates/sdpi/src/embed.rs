//! Translation of the functional layer into the process layer.
//!
//! Functions become processes that input monadic values and variables are
//! run by spawning them, so every functional type `t` turns into a session
//! type and every term of type `t` into a process offering it on a result
//! channel. The translation is type directed: the annotations that the
//! target calculus needs (cut types, dependent output types) are computed
//! from the source typing, so the input must be checked and elaborated.
//!
//! Booleans, naturals and their eliminators are not covered.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::equality::{whnf_fun, whnf_sess, Fuel};
use crate::subst::Substitutable;
use crate::surface::{Decl, DeclBody, TypeBody};
use crate::syntax::*;
use crate::typing::infer_term;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("outside embedding fragment: {0}")]
    Fragment(String),
    /// The input was not well typed after all.
    #[error("ill-typed input: {0}")]
    Ill(String),
}

pub type EmbedResult<T> = Result<T, EmbedError>;

fn outside<T>(what: impl std::fmt::Display) -> EmbedResult<T> {
    Err(EmbedError::Fragment(what.to_string()))
}

fn ill<T>(what: impl Into<String>) -> EmbedResult<T> {
    Err(EmbedError::Ill(what.into()))
}

fn whnf_f(t: &FunType) -> EmbedResult<FunType> {
    whnf_fun(t, &mut Fuel::default()).map_err(|_| EmbedError::Ill(format!("cannot normalize {t}")))
}

fn whnf_s(a: &SessType) -> EmbedResult<SessType> {
    whnf_sess(a, &mut Fuel::default()).map_err(|_| EmbedError::Ill(format!("cannot normalize {a}")))
}

/// The names in a term, bound or free.
fn term_names(m: &Term) -> BTreeSet<Name> {
    all_names(&Process::Spawn(Box::new(Spawn {
        bind: "_".into(),
        anno: None,
        term: m.clone(),
        shared: vec![],
        linear: vec![],
        cont: Process::Nil,
    })))
}

/// `{ |- c:a }`, the type of closed processes offering `a`.
pub fn thunk(a: SessType) -> FunType {
    let c = fresh_name("c", &a.free_names());
    monad_ty(&c, a)
}

/// Translator state: the supply of fresh names.
#[derive(Clone, Debug, Default)]
pub struct Embedder {
    used: BTreeSet<Name>,
}

type Chans = BTreeMap<Name, SessType>;

impl Embedder {
    /// An embedder whose fresh names avoid everything in `names`.
    pub fn avoiding(names: impl IntoIterator<Item = Name>) -> Self {
        Embedder {
            used: names.into_iter().collect(),
        }
    }

    pub fn for_term(m: &Term) -> Self {
        Self::avoiding(term_names(m))
    }

    pub fn for_proc(p: &Process) -> Self {
        Self::avoiding(all_names(p))
    }

    fn fresh(&mut self, stem: &str) -> Name {
        let n = fresh_name(stem, &self.used);
        self.used.insert(n.clone());
        n
    }

    fn reserve(&mut self, names: impl IntoIterator<Item = Name>) {
        self.used.extend(names);
    }

    // -- kinds and types ---------------------------------------------------

    pub fn kind(&mut self, psi: &Psi, k: &Kind) -> EmbedResult<Kind> {
        Ok(match k {
            Kind::Type | Kind::SType => Kind::SType,
            Kind::PiTerm(x, t, k) => {
                let t2 = thunk(self.fun(psi, t)?);
                Kind::PiTerm(
                    x.clone(),
                    Box::new(t2),
                    Box::new(self.kind(&psi.with_term(x, (**t).clone()), k)?),
                )
            }
            Kind::PiType(t, k1, k2) => Kind::PiType(
                t.clone(),
                Box::new(self.kind(psi, k1)?),
                Box::new(self.kind(&psi.with_type(t, (**k1).clone()), k2)?),
            ),
        })
    }

    /// Functional types become session types.
    pub fn fun(&mut self, psi: &Psi, t: &FunType) -> EmbedResult<SessType> {
        use FunType::*;
        Ok(match t {
            Pi(x, a, b) => {
                let a2 = thunk(self.fun(psi, a)?);
                SessType::Forall(
                    x.clone(),
                    Box::new(a2),
                    Box::new(self.fun(&psi.with_term(x, (**a).clone()), b)?),
                )
            }
            LamT(x, a, b) => {
                let a2 = thunk(self.fun(psi, a)?);
                SessType::LamTm(
                    x.clone(),
                    Box::new(a2),
                    Box::new(self.fun(&psi.with_term(x, (**a).clone()), b)?),
                )
            }
            AppT(f, m) => {
                SessType::AppTm(Box::new(self.fun(psi, f)?), Box::new(self.suspend(psi, m)?))
            }
            LamK(x, k, b) => SessType::LamTy(
                x.clone(),
                Box::new(self.kind(psi, k)?),
                Box::new(self.fun(&psi.with_type(x, (**k).clone()), b)?),
            ),
            AppK(f, s) => SessType::AppTy(Box::new(self.fun(psi, f)?), Box::new(self.fun(psi, s)?)),
            Monad(mt) => self.monad_type(psi, mt)?,
            TVar(x) => SessType::SVar(x.clone()),
            Base(_) => return outside(format!("the built-in type {t}")),
        })
    }

    /// `!B1 -o ... -o Bn -o A`, shared channels first.
    fn monad_type(&mut self, psi: &Psi, mt: &MonadType) -> EmbedResult<SessType> {
        let mut acc = self.sess(psi, &mt.offered_ty)?;
        for (_, b) in mt.linear.iter().rev() {
            acc = SessType::Lolli(Box::new(self.sess(psi, b)?), Box::new(acc));
        }
        for (_, b) in mt.shared.iter().rev() {
            acc = SessType::Lolli(
                Box::new(SessType::Bang(Box::new(self.sess(psi, b)?))),
                Box::new(acc),
            );
        }
        Ok(acc)
    }

    pub fn sess(&mut self, psi: &Psi, a: &SessType) -> EmbedResult<SessType> {
        use SessType::*;
        Ok(match a {
            One => One,
            Bang(a) => Bang(Box::new(self.sess(psi, a)?)),
            Lolli(a, b) => Lolli(Box::new(self.sess(psi, a)?), Box::new(self.sess(psi, b)?)),
            Tensor(a, b) => Tensor(Box::new(self.sess(psi, a)?), Box::new(self.sess(psi, b)?)),
            Forall(x, t, b) | Exists(x, t, b) | LamTm(x, t, b) => {
                let t2 = Box::new(thunk(self.fun(psi, t)?));
                let b2 = Box::new(self.sess(&psi.with_term(x, (**t).clone()), b)?);
                match a {
                    Forall(..) => Forall(x.clone(), t2, b2),
                    Exists(..) => Exists(x.clone(), t2, b2),
                    _ => LamTm(x.clone(), t2, b2),
                }
            }
            With(bs) | Plus(bs) => {
                let mut out = Branches::new();
                for (l, b) in bs {
                    out.insert(l.clone(), self.sess(psi, b)?);
                }
                if matches!(a, With(_)) {
                    With(out)
                } else {
                    Plus(out)
                }
            }
            AppTm(f, m) => AppTm(
                Box::new(self.sess(psi, f)?),
                Box::new(self.suspend(psi, m)?),
            ),
            LamTy(x, k, b) => LamTy(
                x.clone(),
                Box::new(self.kind(psi, k)?),
                Box::new(self.sess(&psi.with_type(x, (**k).clone()), b)?),
            ),
            AppTy(f, s) => AppTy(Box::new(self.sess(psi, f)?), Box::new(self.sess(psi, s)?)),
            SVar(x) => SVar(x.clone()),
            IfS(..) => return outside("the boolean type conditional"),
            NatRecS { .. } => return outside("recursion on naturals in session types"),
        })
    }

    /// `{ c <- [[m]]_c }`
    fn suspend(&mut self, psi: &Psi, m: &Term) -> EmbedResult<Term> {
        let c = self.fresh("c");
        let (_, p) = self.term(psi, m, &c)?;
        Ok(monad_val(&c, p))
    }

    pub fn psi(&mut self, psi: &Psi) -> EmbedResult<Psi> {
        let mut out = Psi::new();
        let mut src = Psi::new();
        for e in &psi.entries {
            match e {
                PsiEntry::Term(x, t) => {
                    out = out.with_term(x, thunk(self.fun(&src, t)?));
                    src = src.with_term(x, t.clone());
                }
                PsiEntry::Type(x, k) => {
                    out = out.with_type(x, self.kind(&src, k)?);
                    src = src.with_type(x, k.clone());
                }
            }
        }
        Ok(out)
    }

    // -- terms -------------------------------------------------------------

    /// `[[m]]_z` together with the (source) type of `m`.
    pub fn term(&mut self, psi: &Psi, m: &Term, z: &Name) -> EmbedResult<(FunType, Process)> {
        self.reserve(term_names(m));
        self.used.insert(z.clone());
        match m {
            Term::Var(x) => {
                let Some(t) = psi.lookup_term(x) else {
                    return ill(format!("unbound variable {x}"));
                };
                let t = t.clone();
                let y = self.fresh("y");
                let a = self.fun(psi, &t)?;
                Ok((
                    t,
                    Process::Spawn(Box::new(Spawn {
                        bind: y.clone(),
                        anno: Some(a),
                        term: m.clone(),
                        shared: vec![],
                        linear: vec![],
                        cont: fwd(&y, z),
                    })),
                ))
            }
            Term::Lam(x, t, body) => {
                let (x, body) = self.unclash(x, body, z);
                let (tb, pb) = self.term(&psi.with_term(&x, (**t).clone()), &body, z)?;
                Ok((
                    pi(&x, (**t).clone(), tb),
                    Process::In {
                        on: z.clone(),
                        bind: x,
                        body: Box::new(pb),
                    },
                ))
            }
            Term::App(f, n) => {
                let c = self.fresh("c");
                let (tf, pf) = self.term(psi, f, &c)?;
                let FunType::Pi(v, dom, cod) = whnf_f(&tf)? else {
                    return ill(format!("{f} is applied but has type {tf}"));
                };
                let w = self.fresh("w");
                let pn = self.check(psi, n, &dom, &w)?;
                let anno = self.fun(psi, &FunType::Pi(v.clone(), dom.clone(), cod.clone()))?;
                let user = Process::OutTerm {
                    on: c.clone(),
                    payload: monad_val(&w, pn),
                    anno: anno.clone(),
                    body: Box::new(fwd(&c, z)),
                };
                Ok((
                    cod.subst_term(&v, n),
                    Process::New {
                        bind: c,
                        anno: Some(anno),
                        left: Box::new(pf),
                        right: Box::new(user),
                    },
                ))
            }
            Term::MonadVal(mv) => {
                let Ok(t) = infer_term(psi, m) else {
                    return ill("a monadic value needs a known type");
                };
                let FunType::Monad(mt) = &t else {
                    return ill(format!("{m} inferred at {t}"));
                };
                let p = self.monad(psi, mv, mt, z)?;
                Ok((t, p))
            }
            Term::TT
            | Term::FF
            | Term::Zero
            | Term::Succ(_)
            | Term::IfT(..)
            | Term::NatRecT { .. } => outside(format!("the built-in term {m}")),
        }
    }

    /// `[[m]]_z` for `m` checked against `t`.
    pub fn check(&mut self, psi: &Psi, m: &Term, t: &FunType, z: &Name) -> EmbedResult<Process> {
        self.reserve(term_names(m));
        self.used.insert(z.clone());
        match (m, whnf_f(t)?) {
            (Term::MonadVal(mv), FunType::Monad(mt)) => self.monad(psi, mv, &mt, z),
            (Term::Lam(x, a, body), FunType::Pi(y, _, cod)) => {
                let (x, body) = self.unclash(x, body, z);
                let cod = cod.rename(&y, &x);
                let pb = self.check(&psi.with_term(&x, (**a).clone()), &body, &cod, z)?;
                Ok(Process::In {
                    on: z.clone(),
                    bind: x,
                    body: Box::new(pb),
                })
            }
            (Term::App(f, n), _)
                if matches!(&**f, Term::Lam(..)) && infer_term(psi, m).is_err() =>
            {
                let Term::Lam(x, a, _) = &**f else {
                    unreachable!()
                };
                // the function's type, read off the expected one
                let mut avoid = t.free_names();
                avoid.insert(x.clone());
                let v = fresh_name("x", &avoid);
                let ft = pi(&v, (**a).clone(), t.clone());
                let c = self.fresh("c");
                let pf = self.check(psi, f, &ft, &c)?;
                let w = self.fresh("w");
                let pn = self.check(psi, n, a, &w)?;
                let anno = self.fun(psi, &ft)?;
                let user = Process::OutTerm {
                    on: c.clone(),
                    payload: monad_val(&w, pn),
                    anno: anno.clone(),
                    body: Box::new(fwd(&c, z)),
                };
                Ok(Process::New {
                    bind: c,
                    anno: Some(anno),
                    left: Box::new(pf),
                    right: Box::new(user),
                })
            }
            _ => Ok(self.term(psi, m, z)?.1),
        }
    }

    /// Renames binder `x` of `body` away from the result channel.
    fn unclash(&mut self, x: &Name, body: &Term, z: &Name) -> (Name, Term) {
        if x == z {
            let x2 = self.fresh(x);
            (x2.clone(), body.rename(x, &x2))
        } else {
            (x.clone(), body.clone())
        }
    }

    /// `{ c <- P <- us; ds }` at `z`: input every channel on `z`, then run `P`.
    fn monad(
        &mut self,
        psi: &Psi,
        mv: &MonadVal,
        mt: &MonadType,
        z: &Name,
    ) -> EmbedResult<Process> {
        if mv.shared.len() != mt.shared.len() || mv.linear.len() != mt.linear.len() {
            return ill("monadic value and type disagree on their channels");
        }
        let mut body = mv.body.clone();
        let mut shared = mv.shared.clone();
        let mut linear = mv.linear.clone();
        for n in shared.iter_mut().chain(linear.iter_mut()) {
            if n == z {
                let n2 = self.fresh(n);
                body = body.rename(n, &n2);
                *n = n2;
            }
        }
        if &mv.offered != z {
            body = body.rename(&mv.offered, z);
        }
        let mut gamma = Chans::new();
        let mut chans = Chans::new();
        for (u, (_, b)) in shared.iter().zip(&mt.shared) {
            gamma.insert(u.clone(), b.clone());
        }
        for (d, (_, b)) in linear.iter().zip(&mt.linear) {
            bind_channel(&mut gamma, &mut chans, d, b.clone())?;
        }
        let mut p = self.proc(psi, &gamma, &chans, &body, z, &mt.offered_ty)?;
        for n in shared.iter().chain(&linear).rev() {
            p = Process::In {
                on: z.clone(),
                bind: n.clone(),
                body: Box::new(p),
            };
        }
        Ok(p)
    }

    // -- processes ---------------------------------------------------------

    /// `[[p]]` for `p` offering `c:a`, with shared channels `gamma` (their
    /// underlying types) and linear channels `chans`.
    pub fn proc(
        &mut self,
        psi: &Psi,
        gamma: &Chans,
        chans: &Chans,
        p: &Process,
        c: &Name,
        a: &SessType,
    ) -> EmbedResult<Process> {
        use Process::*;
        self.reserve(all_names(p));
        let mut chans = chans.clone();
        let mut gamma = gamma.clone();
        let aw = whnf_s(a)?;
        let here = |on: &Name| on == c;
        Ok(match p {
            Fwd { .. } | Nil => p.clone(),
            OutTerm {
                on,
                payload,
                anno,
                body,
            } => {
                let (x, t, rest) = match whnf_s(anno)? {
                    SessType::Exists(x, t, b) | SessType::Forall(x, t, b) => (x, t, b),
                    other => return ill(format!("output on {on} annotated with {other}")),
                };
                let next = rest.subst_term(&x, payload);
                let w = self.fresh("w");
                let pm = self.check(psi, payload, &t, &w)?;
                let anno2 = self.sess(psi, anno)?;
                let body2 = if here(on) {
                    self.proc(psi, &gamma, &chans, body, c, &next)?
                } else {
                    chans.insert(on.clone(), next);
                    self.proc(psi, &gamma, &chans, body, c, a)?
                };
                OutTerm {
                    on: on.clone(),
                    payload: monad_val(&w, pm),
                    anno: anno2,
                    body: Box::new(body2),
                }
            }
            In { on, bind, body } => {
                let ty = if here(on) {
                    aw.clone()
                } else {
                    self.linear(&chans, on)?
                };
                let mut psi2 = psi.clone();
                let mut a2 = a.clone();
                match (here(on), ty) {
                    (true, SessType::Forall(x, t, b)) => {
                        psi2 = psi.with_term(bind, (*t).clone());
                        a2 = b.rename(&x, bind);
                    }
                    (true, SessType::Lolli(a1, b1)) => {
                        bind_channel(&mut gamma, &mut chans, bind, *a1)?;
                        a2 = *b1;
                    }
                    (false, SessType::Exists(x, t, b)) => {
                        psi2 = psi.with_term(bind, (*t).clone());
                        chans.insert(on.clone(), b.rename(&x, bind));
                    }
                    (false, SessType::Tensor(a1, b1)) => {
                        chans.insert(on.clone(), *b1);
                        bind_channel(&mut gamma, &mut chans, bind, *a1)?;
                    }
                    (_, ty) => return ill(format!("input on {on} of type {ty}")),
                }
                In {
                    on: on.clone(),
                    bind: bind.clone(),
                    body: Box::new(self.proc(&psi2, &gamma, &chans, body, c, &a2)?),
                }
            }
            OutFresh {
                on,
                bind,
                left,
                right,
            } => {
                let (l, r) = if here(on) {
                    let SessType::Tensor(a1, a2) = aw else {
                        return ill(format!("channel output on {c} of type {a}"));
                    };
                    (
                        self.proc(psi, &gamma, &chans, left, bind, &a1)?,
                        self.proc(psi, &gamma, &chans, right, c, &a2)?,
                    )
                } else {
                    let SessType::Lolli(d1, d2) = self.linear(&chans, on)? else {
                        return ill(format!("channel output on {on}"));
                    };
                    let l = self.proc(psi, &gamma, &chans, left, bind, &d1)?;
                    chans.insert(on.clone(), *d2);
                    (l, self.proc(psi, &gamma, &chans, right, c, a)?)
                };
                OutFresh {
                    on: on.clone(),
                    bind: bind.clone(),
                    left: Box::new(l),
                    right: Box::new(r),
                }
            }
            Repl { on, bind, body } => {
                let SessType::Bang(inner) = aw else {
                    return ill(format!("replicated input on {c} of type {a}"));
                };
                Repl {
                    on: on.clone(),
                    bind: bind.clone(),
                    body: Box::new(self.proc(psi, &gamma, &Chans::new(), body, bind, &inner)?),
                }
            }
            Copy { on, bind, body } => {
                let b = match gamma.get(on) {
                    Some(b) => b.clone(),
                    None => match self.linear(&chans, on)? {
                        SessType::Bang(b) => {
                            chans.remove(on);
                            gamma.insert(on.clone(), (*b).clone());
                            *b
                        }
                        ty => return ill(format!("copy of {on} at {ty}")),
                    },
                };
                bind_channel(&mut gamma, &mut chans, bind, b)?;
                Copy {
                    on: on.clone(),
                    bind: bind.clone(),
                    body: Box::new(self.proc(psi, &gamma, &chans, body, c, a)?),
                }
            }
            Case { on, branches } => {
                let mut out = Branches::new();
                if here(on) {
                    let SessType::With(bs) = aw else {
                        return ill(format!("case on {c} of type {a}"));
                    };
                    for (l, q) in branches {
                        out.insert(l.clone(), self.proc(psi, &gamma, &chans, q, c, &bs[l])?);
                    }
                } else if chans.contains_key(on) {
                    let SessType::Plus(bs) = self.linear(&chans, on)? else {
                        return ill(format!("case on {on}"));
                    };
                    for (l, q) in branches {
                        chans.insert(on.clone(), bs[l].clone());
                        out.insert(l.clone(), self.proc(psi, &gamma, &chans, q, c, a)?);
                    }
                } else {
                    return outside("case analysis on a boolean");
                }
                Case {
                    on: on.clone(),
                    branches: out,
                }
            }
            If { .. } => return outside("case analysis on a boolean"),
            Select { on, label, body } => {
                let body2 = if here(on) {
                    let SessType::Plus(bs) = aw else {
                        return ill(format!("selection on {c} of type {a}"));
                    };
                    self.proc(psi, &gamma, &chans, body, c, &bs[label])?
                } else {
                    let SessType::With(bs) = self.linear(&chans, on)? else {
                        return ill(format!("selection on {on}"));
                    };
                    chans.insert(on.clone(), bs[label].clone());
                    self.proc(psi, &gamma, &chans, body, c, a)?
                };
                Select {
                    on: on.clone(),
                    label: label.clone(),
                    body: Box::new(body2),
                }
            }
            New {
                bind,
                anno,
                left,
                right,
            } => {
                let Some(t) = anno else {
                    return ill(format!(
                        "composition over {bind} without a type; check the input first"
                    ));
                };
                let l = self.proc(psi, &gamma, &chans, left, bind, t)?;
                bind_channel(&mut gamma, &mut chans, bind, t.clone())?;
                let r = self.proc(psi, &gamma, &chans, right, c, a)?;
                New {
                    bind: bind.clone(),
                    anno: Some(self.sess(psi, t)?),
                    left: Box::new(l),
                    right: Box::new(r),
                }
            }
            Spawn(s) => self.spawn(psi, gamma, chans, s, c, a)?,
        })
    }

    fn linear(&self, chans: &Chans, on: &Name) -> EmbedResult<SessType> {
        match chans.get(on) {
            Some(t) => whnf_s(t),
            None => ill(format!("{on} is not a linear channel in scope")),
        }
    }

    /// `x <- M <- us; ys; Q` runs `[[M]]` on a fresh composition channel and
    /// feeds it one fresh channel per argument: a server copying from `u`
    /// for each shared `u`, a forwarder from `y` for each linear `y`.
    fn spawn(
        &mut self,
        psi: &Psi,
        mut gamma: Chans,
        mut chans: Chans,
        s: &Spawn,
        c: &Name,
        a: &SessType,
    ) -> EmbedResult<Process> {
        let mut shared = vec![];
        for u in &s.shared {
            match gamma.get(u) {
                Some(b) => shared.push((u.clone(), b.clone())),
                None => match self.linear(&chans, u)? {
                    SessType::Bang(b) => {
                        chans.remove(u);
                        gamma.insert(u.clone(), (*b).clone());
                        shared.push((u.clone(), *b));
                    }
                    t => return ill(format!("{u} supplied as shared at {t}")),
                },
            }
        }
        let mut linear = vec![];
        for y in &s.linear {
            match chans.remove(y) {
                Some(t) => linear.push((y.clone(), t)),
                None => return ill(format!("{y} is not a linear channel in scope")),
            }
        }
        let mt = match infer_term(psi, &s.term) {
            Ok(t) => match whnf_f(&t)? {
                FunType::Monad(mt) => mt,
                t => return ill(format!("spawn of a term of type {t}")),
            },
            Err(_) => match &s.anno {
                Some(t) => MonadType {
                    shared: shared.clone(),
                    linear: linear.clone(),
                    offered: self.fresh("c"),
                    offered_ty: Box::new(t.clone()),
                },
                None => return ill("spawn without a type; check the input first"),
            },
        };
        let offered = (*mt.offered_ty).clone();
        let x = s.bind.clone();
        let provider = self.check(psi, &s.term, &FunType::Monad(mt.clone()), &x)?;
        bind_channel(&mut gamma, &mut chans, &x, offered)?;
        let mut user = self.proc(psi, &gamma, &chans, &s.cont, c, a)?;
        for (y, _) in linear.iter().rev() {
            let d = self.fresh("d");
            user = Process::OutFresh {
                on: x.clone(),
                bind: d.clone(),
                left: Box::new(fwd(y, &d)),
                right: Box::new(user),
            };
        }
        for (u, _) in shared.iter().rev() {
            let v = self.fresh("v");
            let r = self.fresh("r");
            let b = self.fresh("a");
            let server = Process::Repl {
                on: v.clone(),
                bind: r.clone(),
                body: Box::new(Process::Copy {
                    on: u.clone(),
                    bind: b.clone(),
                    body: Box::new(fwd(&b, &r)),
                }),
            };
            user = Process::OutFresh {
                on: x.clone(),
                bind: v,
                left: Box::new(server),
                right: Box::new(user),
            };
        }
        let anno = self.fun(psi, &FunType::Monad(mt))?;
        Ok(Process::New {
            bind: x,
            anno: Some(anno),
            left: Box::new(provider),
            right: Box::new(user),
        })
    }

    // -- declarations ------------------------------------------------------

    /// Translates a checked declaration. Terms become closed processes
    /// offering their translated type on `z`.
    pub fn decl(&mut self, d: &Decl) -> EmbedResult<Decl> {
        let psi = Psi::new();
        let body = match &d.body {
            DeclBody::Type { kind, body } => {
                let kind = self.kind(&psi, kind)?;
                let body = match body {
                    TypeBody::Fun(t) => self.fun(&psi, t)?,
                    TypeBody::Sess(a) => self.sess(&psi, a)?,
                };
                DeclBody::Type {
                    kind,
                    body: TypeBody::Sess(body),
                }
            }
            DeclBody::Term { ty, term } => {
                let z = self.fresh("z");
                let p = self.check(&psi, term, ty, &z)?;
                let a = self.fun(&psi, ty)?;
                DeclBody::Proc {
                    ty: MonadType {
                        shared: vec![],
                        linear: vec![],
                        offered: z,
                        offered_ty: Box::new(a),
                    },
                    body: p,
                }
            }
            DeclBody::Proc { ty, body } => {
                let mut gamma = Chans::new();
                let mut chans = Chans::new();
                for (u, b) in &ty.shared {
                    gamma.insert(u.clone(), b.clone());
                }
                for (y, b) in &ty.linear {
                    bind_channel(&mut gamma, &mut chans, y, b.clone())?;
                }
                self.reserve(ty.shared.iter().chain(&ty.linear).map(|(n, _)| n.clone()));
                let p = self.proc(&psi, &gamma, &chans, body, &ty.offered, &ty.offered_ty)?;
                let emb =
                    |xs: &[(Name, SessType)], e: &mut Self| -> EmbedResult<Vec<(Name, SessType)>> {
                        xs.iter()
                            .map(|(n, b)| Ok((n.clone(), e.sess(&psi, b)?)))
                            .collect()
                    };
                let shared = emb(&ty.shared, self)?;
                let linear = emb(&ty.linear, self)?;
                let offered_ty = Box::new(self.sess(&psi, &ty.offered_ty)?);
                DeclBody::Proc {
                    ty: MonadType {
                        shared,
                        linear,
                        offered: ty.offered.clone(),
                        offered_ty,
                    },
                    body: p,
                }
            }
        };
        Ok(Decl {
            name: d.name.clone(),
            pos: d.pos,
            body,
        })
    }
}

fn bind_channel(gamma: &mut Chans, chans: &mut Chans, x: &Name, a: SessType) -> EmbedResult<()> {
    match whnf_s(&a)? {
        SessType::Bang(b) => {
            gamma.insert(x.clone(), *b);
        }
        _ => {
            chans.insert(x.clone(), a);
        }
    }
    Ok(())
}

/// `[[m]]_z` for a closed, checked term.
pub fn embed_term(m: &Term, ty: &FunType, z: &Name) -> EmbedResult<Process> {
    let mut e = Embedder::for_term(m);
    e.check(&Psi::new(), m, ty, z)
}

/// `[[m]]_z` under a context; returns the translated context as well.
pub fn embed_term_in(psi: &Psi, m: &Term, ty: &FunType, z: &Name) -> EmbedResult<(Psi, Process)> {
    let mut e = Embedder::for_term(m);
    e.reserve(psi.names());
    Ok((e.psi(psi)?, e.check(psi, m, ty, z)?))
}

pub fn embed_fun(t: &FunType) -> EmbedResult<SessType> {
    Embedder::default().fun(&Psi::new(), t)
}

pub fn embed_sess(a: &SessType) -> EmbedResult<SessType> {
    Embedder::default().sess(&Psi::new(), a)
}

pub fn embed_kind(k: &Kind) -> EmbedResult<Kind> {
    Embedder::default().kind(&Psi::new(), k)
}

pub fn embed_decl(d: &Decl) -> EmbedResult<Decl> {
    Embedder::default().decl(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::alpha_eq_proc;
    use crate::surface::{parse_fun, parse_kind, parse_proc, parse_sess, parse_term};
    use crate::typing::{check_closed, check_term};

    fn u() -> String {
        "{ |- c:1 }".into()
    }

    #[test]
    fn types() {
        let k = embed_kind(&parse_kind(&format!("pi x:{}. type", u())).unwrap()).unwrap();
        assert_eq!(k, parse_kind("pi x:{ |- c:1 }. stype").unwrap());
        let t = embed_fun(&parse_fun(&format!("pi x:{0}. {0}", u())).unwrap()).unwrap();
        assert_eq!(t, parse_sess("forall x:{ |- c:1 }. 1").unwrap());
        let m = embed_fun(&parse_fun("{ u:1 ; d:1 |- c:1 }").unwrap()).unwrap();
        assert_eq!(m, parse_sess("!1 -o 1 -o 1").unwrap());
        assert_eq!(embed_sess(&SessType::One).unwrap(), SessType::One);
        assert!(matches!(
            embed_fun(&parse_fun("Nat").unwrap()),
            Err(EmbedError::Fragment(_))
        ));
    }

    #[test]
    fn variables_spawn_and_forward() {
        let psi = Psi::new().with_term("x", parse_fun(&u()).unwrap());
        let (_, p) =
            embed_term_in(&psi, &var("x"), &parse_fun(&u()).unwrap(), &"z".into()).unwrap();
        assert!(alpha_eq_proc(
            &p,
            &parse_proc("y : 1 <- x; fwd y z").unwrap()
        ));
    }

    #[test]
    fn empty_monad_is_its_body() {
        let p = embed_term(
            &parse_term("{c <- end}").unwrap(),
            &parse_fun(&u()).unwrap(),
            &"z".into(),
        )
        .unwrap();
        assert_eq!(p, Process::Nil);
    }

    #[test]
    fn worked_example() {
        let u = u();
        let f = format!("pi x:{u}. pi y:{u}. {u}");
        let m = parse_term(&format!("(\\x:{f}. x) (\\x:{u}. \\y:{u}. y)")).unwrap();
        let ty = parse_fun(&f).unwrap();
        check_term(&Psi::new(), &m, &ty).unwrap();
        let p = embed_term(&m, &ty, &"z".into()).unwrap();
        let a = embed_fun(&ty).unwrap();
        let expected = parse_proc(&format!(
            "nu c:{fa}. (recv c (x). y : {a} <- x; fwd y c || send c <{{w <- recv w (x). recv w (y). d : 1 <- y; fwd d w}} : {fa}>. fwd c z)",
            a = a,
            fa = parse_sess(&format!("forall x:{{ |- c:{a} }}. {a}")).unwrap()
        ))
        .unwrap();
        assert!(alpha_eq_proc(&p, &expected), "{p}");
        let ctx = TriCtx::default();
        check_closed(&ctx, &p, &"z".into(), &a).unwrap();
    }

    #[test]
    fn spawn_with_channels() {
        let src = "x <- {c <- copy w (a). fwd a c <- w ; } <- u ; ; fwd x z";
        let ctx = TriCtx {
            delta: [("u".to_string(), parse_sess("!1").unwrap())]
                .into_iter()
                .collect(),
            ..TriCtx::default()
        };
        let a = SessType::One;
        let p = check_closed(&ctx, &parse_proc(src).unwrap(), &"z".into(), &a).unwrap();
        let mut e = Embedder::for_proc(&p);
        let gamma: Chans = [("u".to_string(), SessType::One)].into_iter().collect();
        let q = e
            .proc(&Psi::new(), &gamma, &Chans::new(), &p, &"z".into(), &a)
            .unwrap();
        check_closed(&ctx, &q, &"z".into(), &a).unwrap();
    }

    #[test]
    fn worked_example_runs_to_the_translated_result() {
        use crate::dynamics::run_observed;
        use crate::equality::proc_eq_with;
        let u = u();
        let f = format!("pi x:{u}. pi y:{u}. {u}");
        let m = parse_term(&format!("(\\x:{f}. x) (\\x:{u}. \\y:{u}. y)")).unwrap();
        let ty = parse_fun(&f).unwrap();
        let z: Name = "z".into();
        let p = embed_term(&m, &ty, &z).unwrap();
        let target = embed_term(
            &parse_term(&format!("\\x:{u}. \\y:{u}. y")).unwrap(),
            &ty,
            &z,
        )
        .unwrap();
        for seed in 0..10 {
            let mut hit = None;
            run_observed(&p, &z, seed, 4, |cfg, _| {
                if hit.is_none()
                    && proc_eq_with(&cfg.rebuild(), &target, &z, &mut Fuel::default()).is_yes()
                {
                    hit = Some(());
                }
            });
            assert!(hit.is_some(), "seed {seed}");
        }
    }
}
