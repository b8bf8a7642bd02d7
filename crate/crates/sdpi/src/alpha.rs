//! Alpha-equivalence for every sort and structural congruence for processes.
//!
//! Both sides are first renamed so that every binder is unique. After that a
//! single partial bijection between the bound names of the two sides is
//! enough: scopes can no longer shadow each other, which is what lets the
//! congruence check match parallel components in any order.

use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::*;

// ---------------------------------------------------------------------------
// making binders unique

struct Renamer {
    scopes: Vec<(Name, Name)>,
    used: BTreeSet<Name>,
    bound: BTreeSet<Name>,
    /// New-bound names, tagged with the index of their composition group.
    groups: BTreeMap<Name, usize>,
    next_group: usize,
}

impl Renamer {
    fn new(used: BTreeSet<Name>) -> Self {
        Renamer {
            scopes: vec![],
            used,
            bound: BTreeSet::new(),
            groups: BTreeMap::new(),
            next_group: 0,
        }
    }

    fn occ(&self, n: &Name) -> Name {
        self.scopes
            .iter()
            .rev()
            .find(|(o, _)| o == n)
            .map(|(_, f)| f.clone())
            .unwrap_or_else(|| n.clone())
    }

    fn enter(&mut self, n: &Name) -> Name {
        let f = fresh_name(n, &self.used);
        self.used.insert(f.clone());
        self.bound.insert(f.clone());
        self.scopes.push((n.clone(), f.clone()));
        f
    }

    fn exit(&mut self, k: usize) {
        for _ in 0..k {
            self.scopes.pop();
        }
    }
}

fn uq_kind(k: &Kind, r: &mut Renamer) -> Kind {
    match k {
        Kind::Type | Kind::SType => k.clone(),
        Kind::PiTerm(x, t, b) => {
            let t = uq_fun(t, r);
            let x = r.enter(x);
            let b = uq_kind(b, r);
            r.exit(1);
            Kind::PiTerm(x, Box::new(t), Box::new(b))
        }
        Kind::PiType(x, k1, k2) => {
            let k1 = uq_kind(k1, r);
            let x = r.enter(x);
            let k2 = uq_kind(k2, r);
            r.exit(1);
            Kind::PiType(x, Box::new(k1), Box::new(k2))
        }
    }
}

fn uq_fun(t: &FunType, r: &mut Renamer) -> FunType {
    match t {
        FunType::Pi(x, a, b) | FunType::LamT(x, a, b) => {
            let a = uq_fun(a, r);
            let nx = r.enter(x);
            let b = uq_fun(b, r);
            r.exit(1);
            if matches!(t, FunType::Pi(..)) {
                FunType::Pi(nx, Box::new(a), Box::new(b))
            } else {
                FunType::LamT(nx, Box::new(a), Box::new(b))
            }
        }
        FunType::AppT(f, m) => FunType::AppT(Box::new(uq_fun(f, r)), Box::new(uq_term(m, r))),
        FunType::LamK(x, k, b) => {
            let k = uq_kind(k, r);
            let x = r.enter(x);
            let b = uq_fun(b, r);
            r.exit(1);
            FunType::LamK(x, Box::new(k), Box::new(b))
        }
        FunType::AppK(f, a) => FunType::AppK(Box::new(uq_fun(f, r)), Box::new(uq_fun(a, r))),
        FunType::Monad(m) => FunType::Monad(MonadType {
            shared: m
                .shared
                .iter()
                .map(|(n, a)| (n.clone(), uq_sess(a, r)))
                .collect(),
            linear: m
                .linear
                .iter()
                .map(|(n, a)| (n.clone(), uq_sess(a, r)))
                .collect(),
            offered: m.offered.clone(),
            offered_ty: Box::new(uq_sess(&m.offered_ty, r)),
        }),
        FunType::TVar(x) => FunType::TVar(r.occ(x)),
        FunType::Base(_) => t.clone(),
    }
}

fn uq_sess(a: &SessType, r: &mut Renamer) -> SessType {
    use SessType::*;
    match a {
        One => One,
        Bang(b) => Bang(Box::new(uq_sess(b, r))),
        Lolli(x, y) => Lolli(Box::new(uq_sess(x, r)), Box::new(uq_sess(y, r))),
        Tensor(x, y) => Tensor(Box::new(uq_sess(x, r)), Box::new(uq_sess(y, r))),
        AppTy(x, y) => AppTy(Box::new(uq_sess(x, r)), Box::new(uq_sess(y, r))),
        Forall(x, t, b) | Exists(x, t, b) | LamTm(x, t, b) => {
            let t = Box::new(uq_fun(t, r));
            let nx = r.enter(x);
            let b = Box::new(uq_sess(b, r));
            r.exit(1);
            match a {
                Forall(..) => Forall(nx, t, b),
                Exists(..) => Exists(nx, t, b),
                _ => LamTm(nx, t, b),
            }
        }
        With(bs) => With(bs.iter().map(|(l, b)| (l.clone(), uq_sess(b, r))).collect()),
        Plus(bs) => Plus(bs.iter().map(|(l, b)| (l.clone(), uq_sess(b, r))).collect()),
        AppTm(b, m) => AppTm(Box::new(uq_sess(b, r)), Box::new(uq_term(m, r))),
        LamTy(x, k, b) => {
            let k = uq_kind(k, r);
            let x = r.enter(x);
            let b = uq_sess(b, r);
            r.exit(1);
            LamTy(x, Box::new(k), Box::new(b))
        }
        SVar(x) => SVar(r.occ(x)),
        IfS(m, x, y) => IfS(
            Box::new(uq_term(m, r)),
            Box::new(uq_sess(x, r)),
            Box::new(uq_sess(y, r)),
        ),
        NatRecS {
            target,
            zero,
            pred,
            rec,
            succ,
        } => {
            let target = Box::new(uq_term(target, r));
            let zero = Box::new(uq_sess(zero, r));
            let pred = r.enter(pred);
            let rec = r.enter(rec);
            let succ = Box::new(uq_sess(succ, r));
            r.exit(2);
            NatRecS {
                target,
                zero,
                pred,
                rec,
                succ,
            }
        }
    }
}

fn uq_term(m: &Term, r: &mut Renamer) -> Term {
    match m {
        Term::Var(x) => Term::Var(r.occ(x)),
        Term::Lam(x, t, b) => {
            let t = uq_fun(t, r);
            let x = r.enter(x);
            let b = uq_term(b, r);
            r.exit(1);
            Term::Lam(x, Box::new(t), Box::new(b))
        }
        Term::App(f, a) => Term::App(Box::new(uq_term(f, r)), Box::new(uq_term(a, r))),
        Term::MonadVal(mv) => {
            let offered = r.enter(&mv.offered);
            let shared: Vec<Name> = mv.shared.iter().map(|u| r.enter(u)).collect();
            let linear: Vec<Name> = mv.linear.iter().map(|d| r.enter(d)).collect();
            let body = uq_proc(&mv.body, r);
            r.exit(1 + shared.len() + linear.len());
            Term::MonadVal(Box::new(MonadVal {
                offered,
                body,
                shared,
                linear,
            }))
        }
        Term::TT | Term::FF | Term::Zero => m.clone(),
        Term::Succ(a) => Term::Succ(Box::new(uq_term(a, r))),
        Term::IfT(a, b, c) => Term::IfT(
            Box::new(uq_term(a, r)),
            Box::new(uq_term(b, r)),
            Box::new(uq_term(c, r)),
        ),
        Term::NatRecT {
            motive,
            target,
            zero,
            pred,
            rec,
            succ,
        } => {
            let motive = Box::new(uq_fun(motive, r));
            let target = Box::new(uq_term(target, r));
            let zero = Box::new(uq_term(zero, r));
            let pred = r.enter(pred);
            let rec = r.enter(rec);
            let succ = Box::new(uq_term(succ, r));
            r.exit(2);
            Term::NatRecT {
                motive,
                target,
                zero,
                pred,
                rec,
                succ,
            }
        }
    }
}

fn uq_proc(p: &Process, r: &mut Renamer) -> Process {
    use Process::*;
    match p {
        OutFresh {
            on,
            bind,
            left,
            right,
        } => {
            let on = r.occ(on);
            let bind = r.enter(bind);
            let left = Box::new(uq_proc(left, r));
            let right = Box::new(uq_proc(right, r));
            r.exit(1);
            OutFresh {
                on,
                bind,
                left,
                right,
            }
        }
        New { .. } => {
            // a whole chain of compositions shares one group tag
            let g = r.next_group;
            r.next_group += 1;
            uq_group(p, g, r)
        }
        In { on, bind, body } | Repl { on, bind, body } | Copy { on, bind, body } => {
            let on2 = r.occ(on);
            let b2 = r.enter(bind);
            let body2 = Box::new(uq_proc(body, r));
            r.exit(1);
            match p {
                In { .. } => In {
                    on: on2,
                    bind: b2,
                    body: body2,
                },
                Repl { .. } => Repl {
                    on: on2,
                    bind: b2,
                    body: body2,
                },
                _ => Copy {
                    on: on2,
                    bind: b2,
                    body: body2,
                },
            }
        }
        OutTerm {
            on,
            payload,
            anno,
            body,
        } => OutTerm {
            on: r.occ(on),
            payload: uq_term(payload, r),
            anno: uq_sess(anno, r),
            body: Box::new(uq_proc(body, r)),
        },
        Case { on, branches } => Case {
            on: r.occ(on),
            branches: branches
                .iter()
                .map(|(l, q)| (l.clone(), uq_proc(q, r)))
                .collect(),
        },
        If { cond, then, other } => If {
            cond: uq_term(cond, r),
            then: Box::new(uq_proc(then, r)),
            other: Box::new(uq_proc(other, r)),
        },
        Select { on, label, body } => Select {
            on: r.occ(on),
            label: label.clone(),
            body: Box::new(uq_proc(body, r)),
        },
        Fwd { from, to } => Fwd {
            from: r.occ(from),
            to: r.occ(to),
        },
        Nil => Nil,
        Spawn(s) => {
            let term = uq_term(&s.term, r);
            let anno = s.anno.as_ref().map(|a| uq_sess(a, r));
            let shared = s.shared.iter().map(|u| r.occ(u)).collect();
            let linear = s.linear.iter().map(|u| r.occ(u)).collect();
            let bind = r.enter(&s.bind);
            let cont = uq_proc(&s.cont, r);
            r.exit(1);
            Spawn(Box::new(crate::syntax::Spawn {
                bind,
                anno,
                term,
                shared,
                linear,
                cont,
            }))
        }
    }
}

fn uq_group(p: &Process, g: usize, r: &mut Renamer) -> Process {
    match p {
        Process::New {
            bind,
            anno,
            left,
            right,
        } => {
            let anno = anno.as_ref().map(|a| uq_sess(a, r));
            let bind = r.enter(bind);
            r.groups.insert(bind.clone(), g);
            let left = Box::new(uq_group(left, g, r));
            let right = Box::new(uq_group(right, g, r));
            r.exit(1);
            Process::New {
                bind,
                anno,
                left,
                right,
            }
        }
        _ => uq_proc(p, r),
    }
}

struct Side {
    bound: BTreeSet<Name>,
    groups: BTreeMap<Name, usize>,
}

fn prepare<T>(x: &T, used: BTreeSet<Name>, f: impl FnOnce(&T, &mut Renamer) -> T) -> (T, Side) {
    let mut r = Renamer::new(used);
    let y = f(x, &mut r);
    (
        y,
        Side {
            bound: r.bound,
            groups: r.groups,
        },
    )
}

// ---------------------------------------------------------------------------
// comparison under a bijection of bound names

#[derive(Clone)]
struct Cmp<'a> {
    cong: bool,
    l: &'a Side,
    r: &'a Side,
    map: BTreeMap<Name, Name>,
    inv: BTreeMap<Name, Name>,
}

impl<'a> Cmp<'a> {
    fn name(&mut self, a: &Name, b: &Name) -> bool {
        let la = self.l.bound.contains(a);
        let rb = self.r.bound.contains(b);
        if !la && !rb {
            return a == b;
        }
        if la != rb {
            return false;
        }
        match (self.map.get(a), self.inv.get(b)) {
            (Some(x), _) => x == b,
            (None, Some(_)) => false,
            (None, None) => {
                // composition-bound names may only pair with each other
                if self.l.groups.contains_key(a) != self.r.groups.contains_key(b) {
                    return false;
                }
                self.map.insert(a.clone(), b.clone());
                self.inv.insert(b.clone(), a.clone());
                true
            }
        }
    }

    fn names(&mut self, a: &[Name], b: &[Name]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.name(x, y))
    }

    fn kind(&mut self, a: &Kind, b: &Kind) -> bool {
        match (a, b) {
            (Kind::Type, Kind::Type) | (Kind::SType, Kind::SType) => true,
            (Kind::PiTerm(x, t, k), Kind::PiTerm(y, s, j)) => {
                self.fun(t, s) && self.name(x, y) && self.kind(k, j)
            }
            (Kind::PiType(x, t, k), Kind::PiType(y, s, j)) => {
                self.kind(t, s) && self.name(x, y) && self.kind(k, j)
            }
            _ => false,
        }
    }

    fn fun(&mut self, a: &FunType, b: &FunType) -> bool {
        use FunType::*;
        match (a, b) {
            (Pi(x, t, u), Pi(y, s, v)) | (LamT(x, t, u), LamT(y, s, v)) => {
                self.fun(t, s) && self.name(x, y) && self.fun(u, v)
            }
            (AppT(f, m), AppT(g, n)) => self.fun(f, g) && self.term(m, n),
            (LamK(x, k, u), LamK(y, j, v)) => self.kind(k, j) && self.name(x, y) && self.fun(u, v),
            (AppK(f, t), AppK(g, s)) => self.fun(f, g) && self.fun(t, s),
            (Monad(m), Monad(n)) => {
                m.shared.len() == n.shared.len()
                    && m.linear.len() == n.linear.len()
                    && m.shared
                        .iter()
                        .zip(&n.shared)
                        .all(|(x, y)| self.sess(&x.1, &y.1))
                    && m.linear
                        .iter()
                        .zip(&n.linear)
                        .all(|(x, y)| self.sess(&x.1, &y.1))
                    && self.sess(&m.offered_ty, &n.offered_ty)
            }
            (TVar(x), TVar(y)) => self.name(x, y),
            (Base(x), Base(y)) => x == y,
            _ => false,
        }
    }

    fn branches<T>(
        &mut self,
        a: &Branches<T>,
        b: &Branches<T>,
        f: impl Fn(&mut Self, &T, &T) -> bool,
    ) -> bool {
        a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|((l, x), (k, y))| l == k && f(self, x, y))
    }

    fn sess(&mut self, a: &SessType, b: &SessType) -> bool {
        use SessType::*;
        match (a, b) {
            (One, One) => true,
            (Bang(x), Bang(y)) => self.sess(x, y),
            (Lolli(x, u), Lolli(y, v))
            | (Tensor(x, u), Tensor(y, v))
            | (AppTy(x, u), AppTy(y, v)) => self.sess(x, y) && self.sess(u, v),
            (Forall(x, t, u), Forall(y, s, v))
            | (Exists(x, t, u), Exists(y, s, v))
            | (LamTm(x, t, u), LamTm(y, s, v)) => {
                self.fun(t, s) && self.name(x, y) && self.sess(u, v)
            }
            (With(x), With(y)) | (Plus(x), Plus(y)) => self.branches(x, y, |c, p, q| c.sess(p, q)),
            (AppTm(x, m), AppTm(y, n)) => self.sess(x, y) && self.term(m, n),
            (LamTy(x, k, u), LamTy(y, j, v)) => {
                self.kind(k, j) && self.name(x, y) && self.sess(u, v)
            }
            (SVar(x), SVar(y)) => self.name(x, y),
            (IfS(m, x, u), IfS(n, y, v)) => self.term(m, n) && self.sess(x, y) && self.sess(u, v),
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
                self.term(m, n)
                    && self.sess(z1, z2)
                    && self.name(p1, p2)
                    && self.name(r1, r2)
                    && self.sess(s1, s2)
            }
            _ => false,
        }
    }

    fn term(&mut self, a: &Term, b: &Term) -> bool {
        use Term::*;
        match (a, b) {
            (Var(x), Var(y)) => self.name(x, y),
            (Lam(x, t, m), Lam(y, s, n)) => self.fun(t, s) && self.name(x, y) && self.term(m, n),
            (App(f, m), App(g, n)) => self.term(f, g) && self.term(m, n),
            (MonadVal(v), MonadVal(w)) => {
                self.name(&v.offered, &w.offered)
                    && self.names(&v.shared, &w.shared)
                    && self.names(&v.linear, &w.linear)
                    && self.proc(&v.body, &w.body)
            }
            (TT, TT) | (FF, FF) | (Zero, Zero) => true,
            (Succ(m), Succ(n)) => self.term(m, n),
            (IfT(a1, b1, c1), IfT(a2, b2, c2)) => {
                self.term(a1, a2) && self.term(b1, b2) && self.term(c1, c2)
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
                self.fun(t1, t2)
                    && self.term(m1, m2)
                    && self.term(z1, z2)
                    && self.name(p1, p2)
                    && self.name(r1, r2)
                    && self.term(s1, s2)
            }
            _ => false,
        }
    }

    fn proc(&mut self, p: &Process, q: &Process) -> bool {
        if self.cong {
            return self.cong_proc(p, q);
        }
        self.head(p, q)
    }

    /// Compares the outermost constructor and recurses.
    fn head(&mut self, p: &Process, q: &Process) -> bool {
        use Process::*;
        match (p, q) {
            (
                OutFresh {
                    on: c1,
                    bind: x1,
                    left: l1,
                    right: r1,
                },
                OutFresh {
                    on: c2,
                    bind: x2,
                    left: l2,
                    right: r2,
                },
            ) => self.name(c1, c2) && self.name(x1, x2) && self.proc(l1, l2) && self.proc(r1, r2),
            (
                New {
                    bind: x1,
                    anno: a1,
                    left: l1,
                    right: r1,
                },
                New {
                    bind: x2,
                    anno: a2,
                    left: l2,
                    right: r2,
                },
            ) => {
                let annos = match (a1, a2) {
                    (None, None) => true,
                    (Some(a), Some(b)) => self.sess(a, b),
                    _ => false,
                };
                annos && self.name(x1, x2) && self.proc(l1, l2) && self.proc(r1, r2)
            }
            (
                In {
                    on: c1,
                    bind: x1,
                    body: b1,
                },
                In {
                    on: c2,
                    bind: x2,
                    body: b2,
                },
            )
            | (
                Repl {
                    on: c1,
                    bind: x1,
                    body: b1,
                },
                Repl {
                    on: c2,
                    bind: x2,
                    body: b2,
                },
            )
            | (
                Copy {
                    on: c1,
                    bind: x1,
                    body: b1,
                },
                Copy {
                    on: c2,
                    bind: x2,
                    body: b2,
                },
            ) => self.name(c1, c2) && self.name(x1, x2) && self.proc(b1, b2),
            (
                OutTerm {
                    on: c1,
                    payload: m1,
                    anno: a1,
                    body: b1,
                },
                OutTerm {
                    on: c2,
                    payload: m2,
                    anno: a2,
                    body: b2,
                },
            ) => self.name(c1, c2) && self.term(m1, m2) && self.sess(a1, a2) && self.proc(b1, b2),
            (
                Case {
                    on: c1,
                    branches: b1,
                },
                Case {
                    on: c2,
                    branches: b2,
                },
            ) => self.name(c1, c2) && self.branches(b1, b2, |c, x, y| c.proc(x, y)),
            (
                If {
                    cond: m1,
                    then: t1,
                    other: o1,
                },
                If {
                    cond: m2,
                    then: t2,
                    other: o2,
                },
            ) => self.term(m1, m2) && self.proc(t1, t2) && self.proc(o1, o2),
            (
                Select {
                    on: c1,
                    label: l1,
                    body: b1,
                },
                Select {
                    on: c2,
                    label: l2,
                    body: b2,
                },
            ) => l1 == l2 && self.name(c1, c2) && self.proc(b1, b2),
            (Fwd { from: a1, to: b1 }, Fwd { from: a2, to: b2 }) => {
                // a forwarder links two endpoints; congruence ignores direction
                let mut straight = self.clone();
                if straight.name(a1, a2) && straight.name(b1, b2) {
                    *self = straight;
                    true
                } else {
                    self.cong && self.name(a1, b2) && self.name(b1, a2)
                }
            }
            (Nil, Nil) => true,
            (Spawn(s1), Spawn(s2)) => {
                let annos = self.cong
                    || match (&s1.anno, &s2.anno) {
                        (None, None) => true,
                        (Some(a), Some(b)) => self.sess(a, b),
                        _ => false,
                    };
                annos
                    && self.term(&s1.term, &s2.term)
                    && self.names(&s1.shared, &s2.shared)
                    && self.names(&s1.linear, &s2.linear)
                    && self.name(&s1.bind, &s2.bind)
                    && self.proc(&s1.cont, &s2.cont)
            }
            _ => false,
        }
    }

    fn cong_proc(&mut self, p: &Process, q: &Process) -> bool {
        let mut ps = vec![];
        components(p, &mut ps);
        let mut qs = vec![];
        components(q, &mut qs);
        if ps.len() != qs.len() {
            return false;
        }
        if ps.len() == 1 {
            return self.head(ps[0], qs[0]);
        }
        let mut used = vec![false; qs.len()];
        match self.clone().match_components(&ps, &qs, &mut used) {
            Some(done) => {
                *self = done;
                true
            }
            None => false,
        }
    }

    fn match_components(
        self,
        ps: &[&Process],
        qs: &[&Process],
        used: &mut [bool],
    ) -> Option<Cmp<'a>> {
        let Some((first, rest)) = ps.split_first() else {
            return Some(self);
        };
        for j in 0..qs.len() {
            if used[j] {
                continue;
            }
            let mut trial = self.clone();
            if trial.head(first, qs[j]) {
                used[j] = true;
                let found = trial.match_components(rest, qs, used);
                used[j] = false;
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }
}

/// Flattens a chain of compositions into its non-composition components,
/// dropping inactive ones.
fn components<'p>(p: &'p Process, out: &mut Vec<&'p Process>) {
    match p {
        Process::New { left, right, .. } => {
            components(left, out);
            components(right, out);
        }
        Process::Nil => {}
        _ => out.push(p),
    }
}

fn run<T>(
    a: &T,
    b: &T,
    cong: bool,
    names: impl Fn(&T) -> BTreeSet<Name>,
    uq: impl Fn(&T, &mut Renamer) -> T,
    cmp: impl Fn(&mut Cmp, &T, &T) -> bool,
) -> bool {
    let mut used = names(a);
    used.extend(names(b));
    let (a2, sa) = prepare(a, used.clone(), &uq);
    let (b2, sb) = prepare(b, used, &uq);
    let mut c = Cmp {
        cong,
        l: &sa,
        r: &sb,
        map: BTreeMap::new(),
        inv: BTreeMap::new(),
    };
    cmp(&mut c, &a2, &b2)
}

fn names_of<T: FreeNames>(x: &T) -> BTreeSet<Name> {
    // fresh binders only have to avoid the free names of both sides
    x.free_names()
}

pub fn alpha_eq_kind(a: &Kind, b: &Kind) -> bool {
    run(a, b, false, names_of, uq_kind, |c, x, y| c.kind(x, y))
}

pub fn alpha_eq_fun(a: &FunType, b: &FunType) -> bool {
    run(a, b, false, names_of, uq_fun, |c, x, y| c.fun(x, y))
}

pub fn alpha_eq_sess(a: &SessType, b: &SessType) -> bool {
    run(a, b, false, names_of, uq_sess, |c, x, y| c.sess(x, y))
}

pub fn alpha_eq_term(a: &Term, b: &Term) -> bool {
    run(a, b, false, names_of, uq_term, |c, x, y| c.term(x, y))
}

pub fn alpha_eq_proc(a: &Process, b: &Process) -> bool {
    run(a, b, false, names_of, uq_proc, |c, x, y| c.proc(x, y))
}

/// Structural congruence: alpha, commutativity and associativity of
/// composition, inactive components and scope extrusion.
pub fn struct_cong(p: &Process, q: &Process) -> bool {
    run(p, q, true, names_of, uq_proc, |c, x, y| c.proc(x, y))
}

/// Terms compared with structural congruence inside monadic values.
pub fn cong_term(a: &Term, b: &Term) -> bool {
    run(a, b, true, names_of, uq_term, |c, x, y| c.term(x, y))
}

/// Renames every binder of a process apart from all other names.
pub fn freshen_proc(p: &Process) -> Process {
    prepare(p, all_names(p), uq_proc).0
}

pub fn freshen_term(m: &Term) -> Term {
    prepare(m, names_of(m), uq_term).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bool_ty() -> FunType {
        FunType::Base(Base::Bool)
    }

    fn new(x: &str, l: Process, r: Process) -> Process {
        Process::New {
            bind: x.into(),
            anno: None,
            left: Box::new(l),
            right: Box::new(r),
        }
    }

    #[test]
    fn terms_up_to_renaming() {
        assert!(alpha_eq_term(
            &lam("x", bool_ty(), var("x")),
            &lam("y", bool_ty(), var("y"))
        ));
        assert!(!alpha_eq_term(
            &lam("x", bool_ty(), var("x")),
            &lam("x", bool_ty(), Term::TT)
        ));
        assert!(!alpha_eq_term(
            &lam("x", bool_ty(), var("y")),
            &lam("y", bool_ty(), var("y"))
        ));
        // shadowing on one side only
        let a = lam("x", bool_ty(), lam("x", bool_ty(), var("x")));
        let b = lam("x", bool_ty(), lam("y", bool_ty(), var("x")));
        assert!(!alpha_eq_term(&a, &b));
    }

    #[test]
    fn bound_channels() {
        let a = new("c", fwd("c", "d"), Process::Nil);
        let b = new("e", fwd("e", "d"), Process::Nil);
        assert!(alpha_eq_proc(&a, &b));
        let c = new("e", fwd("d", "e"), Process::Nil);
        assert!(!alpha_eq_proc(&a, &c));
    }

    #[test]
    fn congruence_laws() {
        let p = fwd("c", "a");
        let q = fwd("b", "c");
        let r = fwd("d", "e");
        assert!(struct_cong(
            &new("c", p.clone(), q.clone()),
            &new("c", q.clone(), p.clone())
        ));
        assert!(!alpha_eq_proc(
            &new("c", p.clone(), q.clone()),
            &new("c", q.clone(), p.clone())
        ));
        // unit
        assert!(struct_cong(&new("x", p.clone(), Process::Nil), &p));
        // associativity with renaming
        let lhs = new("c", new("d", p.clone(), q.clone()), r.clone());
        let rhs = new("k", r.clone(), new("j", fwd("k", "a"), fwd("b", "k")));
        assert!(struct_cong(&lhs, &rhs));
        assert!(!struct_cong(&lhs, &new("c", p, fwd("b", "a"))));
    }

    #[test]
    fn monad_type_channel_names_are_irrelevant() {
        assert!(alpha_eq_fun(
            &monad_ty("c", SessType::One),
            &monad_ty("d", SessType::One)
        ));
    }
}
