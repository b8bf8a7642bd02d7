//! Abstract syntax for the five mutually recursive sorts: kinds, functional
//! types, session types, terms and processes.
//!
//! Binding is name based. Term variables, type variables and channel names
//! share a single namespace, so a binder of any sort shadows every free
//! occurrence of the same name below it.

use std::collections::{BTreeMap, BTreeSet};

pub type Name = String;
pub type Label = String;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Type,
    SType,
    /// `pi x:T. K`
    PiTerm(Name, Box<FunType>, Box<Kind>),
    /// `pi t::K. K2`
    PiType(Name, Box<Kind>, Box<Kind>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Base {
    Bool,
    Nat,
}

/// Contextual monad type `{ u:B,... ; d:A,... |- c:A }`.
///
/// Channel names are positional: two monad types with the same component
/// types are the same type whatever their channel names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonadType {
    pub shared: Vec<(Name, SessType)>,
    pub linear: Vec<(Name, SessType)>,
    pub offered: Name,
    pub offered_ty: Box<SessType>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunType {
    Pi(Name, Box<FunType>, Box<FunType>),
    LamT(Name, Box<FunType>, Box<FunType>),
    AppT(Box<FunType>, Box<Term>),
    LamK(Name, Box<Kind>, Box<FunType>),
    AppK(Box<FunType>, Box<FunType>),
    Monad(MonadType),
    TVar(Name),
    Base(Base),
}

pub type Branches<T> = BTreeMap<Label, T>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SessType {
    One,
    Bang(Box<SessType>),
    Lolli(Box<SessType>, Box<SessType>),
    Tensor(Box<SessType>, Box<SessType>),
    Forall(Name, Box<FunType>, Box<SessType>),
    Exists(Name, Box<FunType>, Box<SessType>),
    With(Branches<SessType>),
    Plus(Branches<SessType>),
    LamTm(Name, Box<FunType>, Box<SessType>),
    AppTm(Box<SessType>, Box<Term>),
    LamTy(Name, Box<Kind>, Box<SessType>),
    AppTy(Box<SessType>, Box<SessType>),
    SVar(Name),
    IfS(Box<Term>, Box<SessType>, Box<SessType>),
    /// `natrecS M A (n, r => B)`: `n` is the predecessor, `r` the session
    /// type computed for it.
    NatRecS {
        target: Box<Term>,
        zero: Box<SessType>,
        pred: Name,
        rec: Name,
        succ: Box<SessType>,
    },
}

/// `{ c <- P <- u1,...; d1,... }`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonadVal {
    pub offered: Name,
    pub body: Process,
    pub shared: Vec<Name>,
    pub linear: Vec<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(Name),
    Lam(Name, Box<FunType>, Box<Term>),
    App(Box<Term>, Box<Term>),
    MonadVal(Box<MonadVal>),
    TT,
    FF,
    Zero,
    Succ(Box<Term>),
    IfT(Box<Term>, Box<Term>, Box<Term>),
    /// The motive is either a plain type or a family `pi x:Nat. type`.
    NatRecT {
        motive: Box<FunType>,
        target: Box<Term>,
        zero: Box<Term>,
        pred: Name,
        rec: Name,
        succ: Box<Term>,
    },
}

/// `x <- M <- u1,...; d1,... ; Q`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spawn {
    pub bind: Name,
    /// Session type offered on `bind`, filled in by elaboration.
    pub anno: Option<SessType>,
    pub term: Term,
    pub shared: Vec<Name>,
    pub linear: Vec<Name>,
    pub cont: Process,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Process {
    /// `out c (x). (P || Q)`: fresh output, `x` bound in both components.
    OutFresh {
        on: Name,
        bind: Name,
        left: Box<Process>,
        right: Box<Process>,
    },
    /// `nu x:A. (P || Q)`: composition over a private channel.
    New {
        bind: Name,
        anno: Option<SessType>,
        left: Box<Process>,
        right: Box<Process>,
    },
    In {
        on: Name,
        bind: Name,
        body: Box<Process>,
    },
    /// `send c <M : S>. P`, `S` the dependent annotation.
    OutTerm {
        on: Name,
        payload: Term,
        anno: SessType,
        body: Box<Process>,
    },
    Repl {
        on: Name,
        bind: Name,
        body: Box<Process>,
    },
    /// `copy u (x). P`: fresh output on a shared channel.
    Copy {
        on: Name,
        bind: Name,
        body: Box<Process>,
    },
    Case {
        on: Name,
        branches: Branches<Process>,
    },
    /// Case analysis on a boolean term.
    If {
        cond: Term,
        then: Box<Process>,
        other: Box<Process>,
    },
    Select {
        on: Name,
        label: Label,
        body: Box<Process>,
    },
    Fwd {
        from: Name,
        to: Name,
    },
    Nil,
    Spawn(Box<Spawn>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsiEntry {
    Term(Name, FunType),
    Type(Name, Kind),
}

impl PsiEntry {
    pub fn name(&self) -> &Name {
        match self {
            PsiEntry::Term(n, _) | PsiEntry::Type(n, _) => n,
        }
    }
}

/// Dependent context: ordered, later entries may mention earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Psi {
    pub entries: Vec<PsiEntry>,
}

impl Psi {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_term(&self, x: &str, ty: FunType) -> Psi {
        let mut p = self.clone();
        p.entries.push(PsiEntry::Term(x.to_string(), ty));
        p
    }

    pub fn with_type(&self, t: &str, k: Kind) -> Psi {
        let mut p = self.clone();
        p.entries.push(PsiEntry::Type(t.to_string(), k));
        p
    }

    pub fn lookup_term(&self, x: &str) -> Option<&FunType> {
        match self.entries.iter().rev().find(|e| e.name() == x) {
            Some(PsiEntry::Term(_, t)) => Some(t),
            _ => None,
        }
    }

    pub fn lookup_type(&self, t: &str) -> Option<&Kind> {
        match self.entries.iter().rev().find(|e| e.name() == t) {
            Some(PsiEntry::Type(_, k)) => Some(k),
            _ => None,
        }
    }

    pub fn names(&self) -> BTreeSet<Name> {
        self.entries.iter().map(|e| e.name().clone()).collect()
    }
}

/// The three-zone context: dependent, shared and linear.
#[derive(Clone, Debug, Default)]
pub struct TriCtx {
    pub psi: Psi,
    pub gamma: BTreeMap<Name, SessType>,
    pub delta: BTreeMap<Name, SessType>,
}

// ---------------------------------------------------------------------------
// constructors

pub fn var(x: &str) -> Term {
    Term::Var(x.to_string())
}

pub fn lam(x: &str, ty: FunType, body: Term) -> Term {
    Term::Lam(x.to_string(), Box::new(ty), Box::new(body))
}

pub fn app(f: Term, a: Term) -> Term {
    Term::App(Box::new(f), Box::new(a))
}

pub fn succ(m: Term) -> Term {
    Term::Succ(Box::new(m))
}

pub fn nat(n: u64) -> Term {
    (0..n).fold(Term::Zero, |acc, _| succ(acc))
}

pub fn monad_val(c: &str, body: Process) -> Term {
    Term::MonadVal(Box::new(MonadVal {
        offered: c.to_string(),
        body,
        shared: vec![],
        linear: vec![],
    }))
}

pub fn monad_ty(c: &str, a: SessType) -> FunType {
    FunType::Monad(MonadType {
        shared: vec![],
        linear: vec![],
        offered: c.to_string(),
        offered_ty: Box::new(a),
    })
}

pub fn pi(x: &str, dom: FunType, cod: FunType) -> FunType {
    FunType::Pi(x.to_string(), Box::new(dom), Box::new(cod))
}

pub fn exists(x: &str, dom: FunType, body: SessType) -> SessType {
    SessType::Exists(x.to_string(), Box::new(dom), Box::new(body))
}

pub fn forall(x: &str, dom: FunType, body: SessType) -> SessType {
    SessType::Forall(x.to_string(), Box::new(dom), Box::new(body))
}

pub fn fwd(from: &str, to: &str) -> Process {
    Process::Fwd {
        from: from.to_string(),
        to: to.to_string(),
    }
}

pub fn spawn(bind: &str, term: Term, cont: Process) -> Process {
    Process::Spawn(Box::new(Spawn {
        bind: bind.to_string(),
        anno: None,
        term,
        shared: vec![],
        linear: vec![],
        cont,
    }))
}

impl Term {
    pub fn is_value(&self) -> bool {
        matches!(
            self,
            Term::Lam(..) | Term::MonadVal(_) | Term::TT | Term::FF | Term::Zero | Term::Succ(_)
        )
    }

    /// Reads a closed unary numeral.
    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Term::Zero => Some(0),
            Term::Succ(m) => m.as_nat().map(|n| n + 1),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// free names

/// Collection of free names, shared by every sort.
pub trait FreeNames {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>);

    fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn mentions(&self, x: &str) -> bool {
        self.free_names().contains(x)
    }
}

fn note(x: &Name, bound: &[Name], out: &mut BTreeSet<Name>) {
    if !bound.contains(x) {
        out.insert(x.clone());
    }
}

fn under<F: FnOnce(&mut Vec<Name>)>(bound: &mut Vec<Name>, names: &[&Name], f: F) {
    let n = bound.len();
    bound.extend(names.iter().map(|s| (*s).clone()));
    f(bound);
    bound.truncate(n);
}

impl FreeNames for Kind {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Kind::Type | Kind::SType => {}
            Kind::PiTerm(x, t, k) => {
                t.collect_free(bound, out);
                under(bound, &[x], |b| k.collect_free(b, out));
            }
            Kind::PiType(x, k1, k2) => {
                k1.collect_free(bound, out);
                under(bound, &[x], |b| k2.collect_free(b, out));
            }
        }
    }
}

impl FreeNames for FunType {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            FunType::Pi(x, a, b) | FunType::LamT(x, a, b) => {
                a.collect_free(bound, out);
                under(bound, &[x], |bd| b.collect_free(bd, out));
            }
            FunType::AppT(f, m) => {
                f.collect_free(bound, out);
                m.collect_free(bound, out);
            }
            FunType::LamK(t, k, b) => {
                k.collect_free(bound, out);
                under(bound, &[t], |bd| b.collect_free(bd, out));
            }
            FunType::AppK(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            FunType::Monad(m) => {
                for (_, a) in m.shared.iter().chain(m.linear.iter()) {
                    a.collect_free(bound, out);
                }
                m.offered_ty.collect_free(bound, out);
            }
            FunType::TVar(t) => note(t, bound, out),
            FunType::Base(_) => {}
        }
    }
}

impl FreeNames for SessType {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        use SessType::*;
        match self {
            One => {}
            Bang(a) => a.collect_free(bound, out),
            Lolli(a, b) | Tensor(a, b) | AppTy(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Forall(x, t, a) | Exists(x, t, a) | LamTm(x, t, a) => {
                t.collect_free(bound, out);
                under(bound, &[x], |bd| a.collect_free(bd, out));
            }
            With(bs) | Plus(bs) => bs.values().for_each(|a| a.collect_free(bound, out)),
            AppTm(a, m) => {
                a.collect_free(bound, out);
                m.collect_free(bound, out);
            }
            LamTy(t, k, a) => {
                k.collect_free(bound, out);
                under(bound, &[t], |bd| a.collect_free(bd, out));
            }
            SVar(t) => note(t, bound, out),
            IfS(m, a, b) => {
                m.collect_free(bound, out);
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            NatRecS {
                target,
                zero,
                pred,
                rec,
                succ,
            } => {
                target.collect_free(bound, out);
                zero.collect_free(bound, out);
                under(bound, &[pred, rec], |bd| succ.collect_free(bd, out));
            }
        }
    }
}

impl FreeNames for Term {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => note(x, bound, out),
            Term::Lam(x, t, m) => {
                t.collect_free(bound, out);
                under(bound, &[x], |bd| m.collect_free(bd, out));
            }
            Term::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            Term::MonadVal(mv) => {
                let mut names: Vec<&Name> = vec![&mv.offered];
                names.extend(mv.shared.iter());
                names.extend(mv.linear.iter());
                under(bound, &names, |bd| mv.body.collect_free(bd, out));
            }
            Term::TT | Term::FF | Term::Zero => {}
            Term::Succ(m) => m.collect_free(bound, out),
            Term::IfT(a, b, c) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
                c.collect_free(bound, out);
            }
            Term::NatRecT {
                motive,
                target,
                zero,
                pred,
                rec,
                succ,
            } => {
                motive.collect_free(bound, out);
                target.collect_free(bound, out);
                zero.collect_free(bound, out);
                under(bound, &[pred, rec], |bd| succ.collect_free(bd, out));
            }
        }
    }
}

impl FreeNames for Process {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        use Process::*;
        match self {
            OutFresh {
                on,
                bind,
                left,
                right,
            } => {
                note(on, bound, out);
                under(bound, &[bind], |bd| {
                    left.collect_free(bd, out);
                    right.collect_free(bd, out);
                });
            }
            New {
                bind,
                anno,
                left,
                right,
            } => {
                if let Some(a) = anno {
                    a.collect_free(bound, out);
                }
                under(bound, &[bind], |bd| {
                    left.collect_free(bd, out);
                    right.collect_free(bd, out);
                });
            }
            In { on, bind, body } | Repl { on, bind, body } | Copy { on, bind, body } => {
                note(on, bound, out);
                under(bound, &[bind], |bd| body.collect_free(bd, out));
            }
            OutTerm {
                on,
                payload,
                anno,
                body,
            } => {
                note(on, bound, out);
                payload.collect_free(bound, out);
                anno.collect_free(bound, out);
                body.collect_free(bound, out);
            }
            Case { on, branches } => {
                note(on, bound, out);
                branches.values().for_each(|p| p.collect_free(bound, out));
            }
            If { cond, then, other } => {
                cond.collect_free(bound, out);
                then.collect_free(bound, out);
                other.collect_free(bound, out);
            }
            Select { on, body, .. } => {
                note(on, bound, out);
                body.collect_free(bound, out);
            }
            Fwd { from, to } => {
                note(from, bound, out);
                note(to, bound, out);
            }
            Nil => {}
            Spawn(s) => {
                s.term.collect_free(bound, out);
                if let Some(a) = &s.anno {
                    a.collect_free(bound, out);
                }
                for u in s.shared.iter().chain(s.linear.iter()) {
                    note(u, bound, out);
                }
                under(bound, &[&s.bind], |bd| s.cont.collect_free(bd, out));
            }
        }
    }
}

/// Picks a variant of `base` that is not in `avoid`.
///
/// Generated names carry a `'` followed by a counter, which the surface
/// lexer accepts inside identifiers.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Name>) -> Name {
    let stem = base.split('\'').next().unwrap_or(base);
    let stem = if stem.is_empty() { "v" } else { stem };
    if !avoid.contains(stem) && stem != "_" {
        return stem.to_string();
    }
    (1..)
        .map(|i| format!("{stem}'{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply")
}

/// Every name occurring anywhere in a process, bound or free.
pub fn all_names(p: &Process) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_all_proc(p, &mut out);
    out
}

fn collect_all_proc(p: &Process, out: &mut BTreeSet<Name>) {
    use Process::*;
    out.extend(p.free_names());
    match p {
        OutFresh {
            bind, left, right, ..
        }
        | New {
            bind, left, right, ..
        } => {
            out.insert(bind.clone());
            collect_all_proc(left, out);
            collect_all_proc(right, out);
        }
        In { bind, body, .. } | Repl { bind, body, .. } | Copy { bind, body, .. } => {
            out.insert(bind.clone());
            collect_all_proc(body, out);
        }
        OutTerm { payload, body, .. } => {
            collect_all_term(payload, out);
            collect_all_proc(body, out);
        }
        Case { branches, .. } => branches.values().for_each(|b| collect_all_proc(b, out)),
        If { cond, then, other } => {
            collect_all_term(cond, out);
            collect_all_proc(then, out);
            collect_all_proc(other, out);
        }
        Select { body, .. } => collect_all_proc(body, out),
        Fwd { .. } | Nil => {}
        Spawn(s) => {
            out.insert(s.bind.clone());
            collect_all_term(&s.term, out);
            collect_all_proc(&s.cont, out);
        }
    }
}

fn collect_all_term(m: &Term, out: &mut BTreeSet<Name>) {
    out.extend(m.free_names());
    match m {
        Term::Lam(x, _, b) => {
            out.insert(x.clone());
            collect_all_term(b, out);
        }
        Term::App(f, a) => {
            collect_all_term(f, out);
            collect_all_term(a, out);
        }
        Term::MonadVal(mv) => {
            out.insert(mv.offered.clone());
            out.extend(mv.shared.iter().cloned());
            out.extend(mv.linear.iter().cloned());
            collect_all_proc(&mv.body, out);
        }
        Term::Succ(a) => collect_all_term(a, out),
        Term::IfT(a, b, c) => {
            collect_all_term(a, out);
            collect_all_term(b, out);
            collect_all_term(c, out);
        }
        Term::NatRecT {
            target,
            zero,
            pred,
            rec,
            succ,
            ..
        } => {
            out.insert(pred.clone());
            out.insert(rec.clone());
            collect_all_term(target, out);
            collect_all_term(zero, out);
            collect_all_term(succ, out);
        }
        Term::Var(_) | Term::TT | Term::FF | Term::Zero => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_names_respect_binders() {
        let m = lam("x", FunType::Base(Base::Bool), app(var("x"), var("y")));
        assert_eq!(m.free_names(), ["y".to_string()].into_iter().collect());
        let p = Process::New {
            bind: "c".into(),
            anno: None,
            left: Box::new(fwd("c", "d")),
            right: Box::new(Process::Nil),
        };
        assert_eq!(p.free_names(), ["d".to_string()].into_iter().collect());
    }

    #[test]
    fn fresh_names_avoid() {
        let avoid: BTreeSet<Name> = ["x", "x'1"].iter().map(|s| s.to_string()).collect();
        assert_eq!(fresh_name("x", &avoid), "x'2");
        assert_eq!(fresh_name("y'7", &avoid), "y");
    }

    #[test]
    fn numerals() {
        assert_eq!(nat(3).as_nat(), Some(3));
        assert_eq!(var("n").as_nat(), None);
    }
}
