//! Capture-avoiding substitution over all five sorts.

use std::collections::BTreeSet;

use crate::syntax::*;

#[derive(Clone, Debug)]
pub enum Replacement {
    Term(Term),
    Fun(FunType),
    Sess(SessType),
    /// Renames every free occurrence, whatever role the name plays.
    Rename(Name),
}

#[derive(Clone, Debug)]
pub struct Subst {
    victim: Name,
    repl: Replacement,
    repl_fv: BTreeSet<Name>,
}

impl Subst {
    pub fn new(victim: &str, repl: Replacement) -> Self {
        let repl_fv = match &repl {
            Replacement::Term(m) => m.free_names(),
            Replacement::Fun(t) => t.free_names(),
            Replacement::Sess(a) => a.free_names(),
            Replacement::Rename(n) => [n.clone()].into_iter().collect(),
        };
        Subst {
            victim: victim.to_string(),
            repl,
            repl_fv,
        }
    }

    pub fn term(victim: &str, m: &Term) -> Self {
        Self::new(victim, Replacement::Term(m.clone()))
    }

    pub fn rename(victim: &str, to: &str) -> Self {
        Self::new(victim, Replacement::Rename(to.to_string()))
    }

    fn is_trivial(&self) -> bool {
        matches!(&self.repl, Replacement::Rename(n) if *n == self.victim)
            || matches!(&self.repl, Replacement::Term(Term::Var(n)) if *n == self.victim)
    }

    fn name(&self, n: &Name) -> Name {
        match &self.repl {
            Replacement::Rename(to) if *n == self.victim => to.clone(),
            Replacement::Term(Term::Var(to)) if *n == self.victim => to.clone(),
            _ => n.clone(),
        }
    }

    fn names(&self, ns: &[Name]) -> Vec<Name> {
        ns.iter().map(|n| self.name(n)).collect()
    }

    /// Decides what happens at a binder group. `None` means the victim is
    /// shadowed and the bodies are left alone; otherwise the returned
    /// binders have been freshened away from the replacement.
    fn enter(
        &self,
        binders: &[Name],
        bodies_fv: impl FnOnce() -> BTreeSet<Name>,
    ) -> Option<Vec<Name>> {
        if binders.contains(&self.victim) {
            return None;
        }
        if !binders.iter().any(|b| self.repl_fv.contains(b)) {
            return Some(binders.to_vec());
        }
        let mut avoid = bodies_fv();
        avoid.extend(self.repl_fv.iter().cloned());
        avoid.insert(self.victim.clone());
        avoid.extend(binders.iter().cloned());
        let mut out = Vec::with_capacity(binders.len());
        for b in binders {
            if self.repl_fv.contains(b) {
                let f = fresh_name(b, &avoid);
                avoid.insert(f.clone());
                out.push(f);
            } else {
                out.push(b.clone());
            }
        }
        Some(out)
    }
}

/// Renames `old` binders to `new` inside `body` before substituting.
fn rebind<T: Substitutable>(body: &T, old: &[Name], new: &[Name]) -> T {
    let mut b = body.clone_sub();
    for (o, n) in old.iter().zip(new) {
        if o != n {
            b = b.subst(&Subst::rename(o, n));
        }
    }
    b
}

pub trait Substitutable: FreeNames + Sized {
    fn subst(&self, s: &Subst) -> Self;
    fn clone_sub(&self) -> Self;

    fn subst_term(&self, x: &str, m: &Term) -> Self {
        self.subst(&Subst::term(x, m))
    }

    fn rename(&self, from: &str, to: &str) -> Self {
        if from == to {
            return self.clone_sub();
        }
        self.subst(&Subst::rename(from, to))
    }

    fn subst_fun(&self, t: &str, ty: &FunType) -> Self {
        self.subst(&Subst::new(t, Replacement::Fun(ty.clone())))
    }

    fn subst_sess(&self, t: &str, a: &SessType) -> Self {
        self.subst(&Subst::new(t, Replacement::Sess(a.clone())))
    }
}

/// Binder with a single body: returns the possibly renamed binder and body.
fn bind1<T: Substitutable>(s: &Subst, x: &Name, body: &T) -> (Name, T) {
    match s.enter(std::slice::from_ref(x), || body.free_names()) {
        None => (x.clone(), body.clone_sub()),
        Some(nx) => {
            let b = rebind(body, std::slice::from_ref(x), &nx);
            (nx[0].clone(), b.subst(s))
        }
    }
}

impl Substitutable for Kind {
    fn clone_sub(&self) -> Self {
        self.clone()
    }

    fn subst(&self, s: &Subst) -> Self {
        match self {
            Kind::Type | Kind::SType => self.clone(),
            Kind::PiTerm(x, t, k) => {
                let t = t.subst(s);
                let (x, k) = bind1(s, x, k.as_ref());
                Kind::PiTerm(x, Box::new(t), Box::new(k))
            }
            Kind::PiType(x, k1, k2) => {
                let k1 = k1.subst(s);
                let (x, k2) = bind1(s, x, k2.as_ref());
                Kind::PiType(x, Box::new(k1), Box::new(k2))
            }
        }
    }
}

impl Substitutable for FunType {
    fn clone_sub(&self) -> Self {
        self.clone()
    }

    fn subst(&self, s: &Subst) -> Self {
        if s.is_trivial() {
            return self.clone();
        }
        match self {
            FunType::Pi(x, a, b) => {
                let a = a.subst(s);
                let (x, b) = bind1(s, x, b.as_ref());
                FunType::Pi(x, Box::new(a), Box::new(b))
            }
            FunType::LamT(x, a, b) => {
                let a = a.subst(s);
                let (x, b) = bind1(s, x, b.as_ref());
                FunType::LamT(x, Box::new(a), Box::new(b))
            }
            FunType::AppT(f, m) => FunType::AppT(Box::new(f.subst(s)), Box::new(m.subst(s))),
            FunType::LamK(t, k, b) => {
                let k = k.subst(s);
                let (t, b) = bind1(s, t, b.as_ref());
                FunType::LamK(t, Box::new(k), Box::new(b))
            }
            FunType::AppK(f, a) => FunType::AppK(Box::new(f.subst(s)), Box::new(a.subst(s))),
            FunType::Monad(m) => FunType::Monad(MonadType {
                shared: m
                    .shared
                    .iter()
                    .map(|(n, a)| (n.clone(), a.subst(s)))
                    .collect(),
                linear: m
                    .linear
                    .iter()
                    .map(|(n, a)| (n.clone(), a.subst(s)))
                    .collect(),
                offered: m.offered.clone(),
                offered_ty: Box::new(m.offered_ty.subst(s)),
            }),
            FunType::TVar(t) if *t == s.victim => match &s.repl {
                Replacement::Fun(ty) => ty.clone(),
                Replacement::Rename(n) => FunType::TVar(n.clone()),
                _ => self.clone(),
            },
            FunType::TVar(_) | FunType::Base(_) => self.clone(),
        }
    }
}

impl Substitutable for SessType {
    fn clone_sub(&self) -> Self {
        self.clone()
    }

    fn subst(&self, s: &Subst) -> Self {
        use SessType::*;
        if s.is_trivial() {
            return self.clone();
        }
        let bx = |a: &SessType| Box::new(a.subst(s));
        match self {
            One => One,
            Bang(a) => Bang(bx(a)),
            Lolli(a, b) => Lolli(bx(a), bx(b)),
            Tensor(a, b) => Tensor(bx(a), bx(b)),
            AppTy(a, b) => AppTy(bx(a), bx(b)),
            Forall(x, t, a) => {
                let t = t.subst(s);
                let (x, a) = bind1(s, x, a.as_ref());
                Forall(x, Box::new(t), Box::new(a))
            }
            Exists(x, t, a) => {
                let t = t.subst(s);
                let (x, a) = bind1(s, x, a.as_ref());
                Exists(x, Box::new(t), Box::new(a))
            }
            LamTm(x, t, a) => {
                let t = t.subst(s);
                let (x, a) = bind1(s, x, a.as_ref());
                LamTm(x, Box::new(t), Box::new(a))
            }
            With(bs) => With(bs.iter().map(|(l, a)| (l.clone(), a.subst(s))).collect()),
            Plus(bs) => Plus(bs.iter().map(|(l, a)| (l.clone(), a.subst(s))).collect()),
            AppTm(a, m) => AppTm(bx(a), Box::new(m.subst(s))),
            LamTy(t, k, a) => {
                let k = k.subst(s);
                let (t, a) = bind1(s, t, a.as_ref());
                LamTy(t, Box::new(k), Box::new(a))
            }
            SVar(t) if *t == s.victim => match &s.repl {
                Replacement::Sess(a) => a.clone(),
                Replacement::Rename(n) => SVar(n.clone()),
                _ => self.clone(),
            },
            SVar(_) => self.clone(),
            IfS(m, a, b) => IfS(Box::new(m.subst(s)), bx(a), bx(b)),
            NatRecS {
                target,
                zero,
                pred,
                rec,
                succ,
            } => {
                let target = Box::new(target.subst(s));
                let zero = bx(zero);
                let binders = [pred.clone(), rec.clone()];
                match s.enter(&binders, || succ.free_names()) {
                    None => NatRecS {
                        target,
                        zero,
                        pred: pred.clone(),
                        rec: rec.clone(),
                        succ: succ.clone(),
                    },
                    Some(nb) => {
                        let body = rebind(succ.as_ref(), &binders, &nb).subst(s);
                        NatRecS {
                            target,
                            zero,
                            pred: nb[0].clone(),
                            rec: nb[1].clone(),
                            succ: Box::new(body),
                        }
                    }
                }
            }
        }
    }
}

impl Substitutable for Term {
    fn clone_sub(&self) -> Self {
        self.clone()
    }

    fn subst(&self, s: &Subst) -> Self {
        if s.is_trivial() {
            return self.clone();
        }
        match self {
            Term::Var(x) if *x == s.victim => match &s.repl {
                Replacement::Term(m) => m.clone(),
                Replacement::Rename(n) => Term::Var(n.clone()),
                _ => self.clone(),
            },
            Term::Var(_) | Term::TT | Term::FF | Term::Zero => self.clone(),
            Term::Lam(x, t, b) => {
                let t = t.subst(s);
                let (x, b) = bind1(s, x, b.as_ref());
                Term::Lam(x, Box::new(t), Box::new(b))
            }
            Term::App(f, a) => Term::App(Box::new(f.subst(s)), Box::new(a.subst(s))),
            Term::MonadVal(mv) => {
                let mut binders = vec![mv.offered.clone()];
                binders.extend(mv.shared.iter().cloned());
                binders.extend(mv.linear.iter().cloned());
                match s.enter(&binders, || mv.body.free_names()) {
                    None => self.clone(),
                    Some(nb) => {
                        let body = rebind(&mv.body, &binders, &nb).subst(s);
                        let ns = mv.shared.len();
                        Term::MonadVal(Box::new(MonadVal {
                            offered: nb[0].clone(),
                            shared: nb[1..1 + ns].to_vec(),
                            linear: nb[1 + ns..].to_vec(),
                            body,
                        }))
                    }
                }
            }
            Term::Succ(m) => Term::Succ(Box::new(m.subst(s))),
            Term::IfT(a, b, c) => Term::IfT(
                Box::new(a.subst(s)),
                Box::new(b.subst(s)),
                Box::new(c.subst(s)),
            ),
            Term::NatRecT {
                motive,
                target,
                zero,
                pred,
                rec,
                succ,
            } => {
                let motive = Box::new(motive.subst(s));
                let target = Box::new(target.subst(s));
                let zero = Box::new(zero.subst(s));
                let binders = [pred.clone(), rec.clone()];
                match s.enter(&binders, || succ.free_names()) {
                    None => Term::NatRecT {
                        motive,
                        target,
                        zero,
                        pred: pred.clone(),
                        rec: rec.clone(),
                        succ: succ.clone(),
                    },
                    Some(nb) => Term::NatRecT {
                        motive,
                        target,
                        zero,
                        pred: nb[0].clone(),
                        rec: nb[1].clone(),
                        succ: Box::new(rebind(succ.as_ref(), &binders, &nb).subst(s)),
                    },
                }
            }
        }
    }
}

fn is_bool_case(branches: &Branches<Process>) -> bool {
    branches.len() == 2 && branches.contains_key("tt") && branches.contains_key("ff")
}

impl Substitutable for Process {
    fn clone_sub(&self) -> Self {
        self.clone()
    }

    fn subst(&self, s: &Subst) -> Self {
        use Process::*;
        if s.is_trivial() {
            return self.clone();
        }
        let bx = |p: &Process| Box::new(p.subst(s));
        match self {
            OutFresh {
                on,
                bind,
                left,
                right,
            } => {
                let binders = [bind.clone()];
                let on = s.name(on);
                match s.enter(&binders, || {
                    let mut f = left.free_names();
                    f.extend(right.free_names());
                    f
                }) {
                    None => OutFresh {
                        on,
                        bind: bind.clone(),
                        left: left.clone(),
                        right: right.clone(),
                    },
                    Some(nb) => OutFresh {
                        on,
                        bind: nb[0].clone(),
                        left: Box::new(rebind(left.as_ref(), &binders, &nb).subst(s)),
                        right: Box::new(rebind(right.as_ref(), &binders, &nb).subst(s)),
                    },
                }
            }
            New {
                bind,
                anno,
                left,
                right,
            } => {
                let binders = [bind.clone()];
                let anno = anno.as_ref().map(|a| a.subst(s));
                match s.enter(&binders, || {
                    let mut f = left.free_names();
                    f.extend(right.free_names());
                    f
                }) {
                    None => New {
                        bind: bind.clone(),
                        anno,
                        left: left.clone(),
                        right: right.clone(),
                    },
                    Some(nb) => New {
                        bind: nb[0].clone(),
                        anno,
                        left: Box::new(rebind(left.as_ref(), &binders, &nb).subst(s)),
                        right: Box::new(rebind(right.as_ref(), &binders, &nb).subst(s)),
                    },
                }
            }
            In { on, bind, body } => {
                let (bind, body) = bind1(s, bind, body.as_ref());
                In {
                    on: s.name(on),
                    bind,
                    body: Box::new(body),
                }
            }
            Repl { on, bind, body } => {
                let (bind, body) = bind1(s, bind, body.as_ref());
                Repl {
                    on: s.name(on),
                    bind,
                    body: Box::new(body),
                }
            }
            Copy { on, bind, body } => {
                let (bind, body) = bind1(s, bind, body.as_ref());
                Copy {
                    on: s.name(on),
                    bind,
                    body: Box::new(body),
                }
            }
            OutTerm {
                on,
                payload,
                anno,
                body,
            } => OutTerm {
                on: s.name(on),
                payload: payload.subst(s),
                anno: anno.subst(s),
                body: bx(body),
            },
            Case { on, branches } => {
                let branches: Branches<Process> = branches
                    .iter()
                    .map(|(l, p)| (l.clone(), p.subst(s)))
                    .collect();
                match &s.repl {
                    Replacement::Term(m) if *on == s.victim && is_bool_case(&branches) => match m {
                        Term::Var(y) => Case {
                            on: y.clone(),
                            branches,
                        },
                        _ => {
                            let mut branches = branches;
                            let then = branches.remove("tt").unwrap();
                            let other = branches.remove("ff").unwrap();
                            If {
                                cond: m.clone(),
                                then: Box::new(then),
                                other: Box::new(other),
                            }
                        }
                    },
                    _ => Case {
                        on: s.name(on),
                        branches,
                    },
                }
            }
            If { cond, then, other } => If {
                cond: cond.subst(s),
                then: bx(then),
                other: bx(other),
            },
            Select { on, label, body } => Select {
                on: s.name(on),
                label: label.clone(),
                body: bx(body),
            },
            Fwd { from, to } => Fwd {
                from: s.name(from),
                to: s.name(to),
            },
            Nil => Nil,
            Spawn(sp) => {
                let term = sp.term.subst(s);
                let anno = sp.anno.as_ref().map(|a| a.subst(s));
                let shared = s.names(&sp.shared);
                let linear = s.names(&sp.linear);
                let (bind, cont) = bind1(s, &sp.bind, &sp.cont);
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
}

/// Renames several names at once; `pairs` may swap names.
pub fn rename_simultaneous<T: Substitutable>(x: &T, pairs: &[(Name, Name)]) -> T {
    let mut avoid = x.free_names();
    avoid.extend(pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]));
    let mut out = x.clone_sub();
    let mut temps = Vec::with_capacity(pairs.len());
    for (from, _) in pairs {
        let t = fresh_name(&format!("{from}_t"), &avoid);
        avoid.insert(t.clone());
        out = out.rename(from, &t);
        temps.push(t);
    }
    for (t, (_, to)) in temps.iter().zip(pairs) {
        out = out.rename(t, to);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::alpha_eq_term;

    fn bool_ty() -> FunType {
        FunType::Base(Base::Bool)
    }

    #[test]
    fn no_capture_needed() {
        let m = lam("y", bool_ty(), var("x"));
        assert_eq!(m.subst_term("x", &Term::TT), lam("y", bool_ty(), Term::TT));
    }

    #[test]
    fn shadowing_stops_substitution() {
        let m = lam("x", bool_ty(), var("x"));
        assert_eq!(m.subst_term("x", &Term::TT), m);
    }

    #[test]
    fn capture_is_avoided() {
        // (\y. x y){y/x} must not capture y
        let m = lam("y", bool_ty(), app(var("x"), var("y")));
        let r = m.subst_term("x", &var("y"));
        match &r {
            Term::Lam(b, _, body) => {
                assert_ne!(b, "y");
                assert_eq!(**body, app(var("y"), var(b)));
            }
            _ => panic!(),
        }
        assert!(alpha_eq_term(
            &r,
            &lam("w", bool_ty(), app(var("y"), var("w")))
        ));
    }

    #[test]
    fn channel_renaming_in_processes() {
        let p = Process::In {
            on: "c".into(),
            bind: "x".into(),
            body: Box::new(fwd("x", "c")),
        };
        let q = p.rename("c", "d");
        assert_eq!(
            q,
            Process::In {
                on: "d".into(),
                bind: "x".into(),
                body: Box::new(fwd("x", "d"))
            }
        );
        // renaming into a bound name freshens the binder
        let r = p.rename("c", "x");
        match r {
            Process::In { on, bind, body } => {
                assert_eq!(on, "x");
                assert_ne!(bind, "x");
                assert_eq!(*body, fwd(&bind, "x"));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn boolean_case_becomes_if_under_substitution() {
        let mut branches = Branches::new();
        branches.insert("tt".to_string(), Process::Nil);
        branches.insert("ff".to_string(), fwd("d", "c"));
        let p = Process::Case {
            on: "x".into(),
            branches,
        };
        match p.subst_term("x", &Term::TT) {
            Process::If { cond, .. } => assert_eq!(cond, Term::TT),
            other => panic!("{other:?}"),
        }
    }
}
