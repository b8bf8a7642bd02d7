//! Random generation of well-typed terms and processes by inverting the
//! typing rules. Every artifact is still run through the checker before it
//! is used; generation only aims to make that gate pass almost always.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::equality::{fun_eq, whnf_fun, whnf_sess, Fuel, Verdict};
use crate::subst::Substitutable;
use crate::syntax::*;

pub struct Gen {
    pub rng: ChaCha8Rng,
    /// Restrict to the fragment without booleans and naturals.
    pub fragment: bool,
    next: usize,
}

#[derive(Clone, Default)]
struct Env {
    psi: Psi,
    gamma: Vec<(Name, SessType)>,
    led: Vec<(Name, SessType)>,
}

impl Env {
    fn closed(&self) -> Env {
        Env {
            psi: self.psi.clone(),
            gamma: self.gamma.clone(),
            led: vec![],
        }
    }

    fn bind(&mut self, x: &Name, a: SessType) {
        match whnf_sess(&a, &mut Fuel::default()) {
            Ok(SessType::Bang(b)) => self.gamma.push((x.clone(), *b)),
            _ => self.led.push((x.clone(), a)),
        }
    }
}

fn whnf_s(a: &SessType) -> Option<SessType> {
    whnf_sess(a, &mut Fuel::default()).ok()
}

impl Gen {
    pub fn new(seed: u64, fragment: bool) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            fragment,
            next: 0,
        }
    }

    pub fn fresh(&mut self, stem: &str) -> Name {
        self.next += 1;
        format!("{stem}{}", self.next)
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.rng.gen_range(0..xs.len())]
    }

    // -- types ---------------------------------------------------------------

    pub fn fun_type(&mut self, depth: usize) -> FunType {
        if self.fragment {
            if depth == 0 || self.chance(0.5) {
                let a = self.sess(depth.saturating_sub(1));
                return monad_ty("c", a);
            }
            let x = self.fresh("x");
            return pi(&x, self.fun_type(depth - 1), self.fun_type(depth - 1));
        }
        let roll = if depth == 0 {
            self.rng.gen_range(0..2)
        } else {
            self.rng.gen_range(0..4)
        };
        match roll {
            0 => FunType::Base(Base::Bool),
            1 => FunType::Base(Base::Nat),
            2 => {
                let x = self.fresh("x");
                pi(&x, self.fun_type(depth - 1), self.fun_type(depth - 1))
            }
            _ => {
                let a = self.sess(depth - 1);
                monad_ty("c", a)
            }
        }
    }

    /// A small value type for communication.
    fn payload_type(&mut self, depth: usize) -> FunType {
        if self.fragment {
            self.fun_type(depth.min(1))
        } else if self.chance(0.5) {
            FunType::Base(Base::Bool)
        } else {
            FunType::Base(Base::Nat)
        }
    }

    pub fn sess(&mut self, depth: usize) -> SessType {
        if depth == 0 {
            return SessType::One;
        }
        let d = depth - 1;
        let n = if self.fragment { 8 } else { 9 };
        match self.rng.gen_range(0..n) {
            0 => SessType::One,
            1 => {
                let x = self.fresh("x");
                exists(&x, self.payload_type(d), self.sess(d))
            }
            2 => {
                let x = self.fresh("x");
                forall(&x, self.payload_type(d), self.sess(d))
            }
            3 => SessType::Tensor(Box::new(self.sess(d)), Box::new(self.sess(d))),
            4 => SessType::Lolli(Box::new(self.sess(d)), Box::new(self.sess(d))),
            5 => SessType::With(
                [
                    ("a".to_string(), self.sess(d)),
                    ("b".to_string(), self.sess(d)),
                ]
                .into(),
            ),
            6 => SessType::Plus(
                [
                    ("a".to_string(), self.sess(d)),
                    ("b".to_string(), self.sess(d)),
                ]
                .into(),
            ),
            7 => SessType::Bang(Box::new(self.sess(d))),
            _ => {
                // a data-dependent protocol
                let x = self.fresh("x");
                let branch = SessType::IfS(
                    Box::new(var(&x)),
                    Box::new(self.sess(d)),
                    Box::new(self.sess(d)),
                );
                forall(&x, FunType::Base(Base::Bool), branch)
            }
        }
    }

    // -- terms ---------------------------------------------------------------

    /// A term of type `t` under `psi`, or `None` when generation gets stuck.
    pub fn term(&mut self, psi: &Psi, t: &FunType, depth: usize) -> Option<Term> {
        let tw = whnf_fun(t, &mut Fuel::default()).ok()?;
        let vars: Vec<Name> = psi
            .entries
            .iter()
            .filter_map(|e| match e {
                PsiEntry::Term(x, s)
                    if psi.lookup_term(x) == Some(s) && fun_eq(psi, s, &tw) == Verdict::Yes =>
                {
                    Some(x.clone())
                }
                _ => None,
            })
            .collect();
        if !vars.is_empty() && self.chance(if depth == 0 { 0.8 } else { 0.3 }) {
            return Some(var(self.pick(&vars)));
        }
        // apply a function variable with a non-dependent result of this type
        if depth > 0 && self.chance(0.2) {
            let fs: Vec<(Name, FunType)> = psi
                .entries
                .iter()
                .filter_map(|e| match e {
                    PsiEntry::Term(f, s) if psi.lookup_term(f) == Some(s) => {
                        match whnf_fun(s, &mut Fuel::default()) {
                            Ok(FunType::Pi(x, a, b))
                                if !b.free_names().contains(&x)
                                    && fun_eq(psi, &b, &tw) == Verdict::Yes =>
                            {
                                Some((f.clone(), *a))
                            }
                            _ => None,
                        }
                    }
                    _ => None,
                })
                .collect();
            if !fs.is_empty() {
                let (f, a) = self.pick(&fs).clone();
                let n = self.term(psi, &a, depth - 1)?;
                return Some(app(var(&f), n));
            }
        }
        // a beta redex
        if depth > 0 && self.chance(0.3) {
            let s = self.fun_type(1);
            let x = self.fresh("v");
            let body = self.term(&psi.with_term(&x, s.clone()), &tw, depth - 1)?;
            let arg = self.term(psi, &s, depth - 1)?;
            return Some(app(lam(&x, s, body), arg));
        }
        match &tw {
            FunType::Base(Base::Bool) => {
                if depth > 0 && self.chance(0.2) {
                    let c = self.term(psi, &tw, depth - 1)?;
                    let a = self.term(psi, &tw, depth - 1)?;
                    let b = self.term(psi, &tw, depth - 1)?;
                    return Some(Term::IfT(Box::new(c), Box::new(a), Box::new(b)));
                }
                Some(if self.chance(0.5) { Term::TT } else { Term::FF })
            }
            FunType::Base(Base::Nat) => {
                if depth > 0 && self.chance(0.2) {
                    let target = self.term(psi, &tw, depth - 1)?;
                    let zero = self.term(psi, &tw, depth - 1)?;
                    let (n, r) = (self.fresh("n"), self.fresh("r"));
                    let inner = psi.with_term(&n, tw.clone()).with_term(&r, tw.clone());
                    let s = self.term(&inner, &tw, depth - 1)?;
                    return Some(Term::NatRecT {
                        motive: Box::new(tw.clone()),
                        target: Box::new(target),
                        zero: Box::new(zero),
                        pred: n,
                        rec: r,
                        succ: Box::new(s),
                    });
                }
                if depth > 0 && self.chance(0.3) {
                    return Some(succ(self.term(psi, &tw, depth - 1)?));
                }
                Some(nat(self.rng.gen_range(0..3)))
            }
            FunType::Pi(x, a, b) => {
                let y = self.fresh("v");
                let body = self.term(
                    &psi.with_term(&y, (**a).clone()),
                    &b.rename(x, &y),
                    depth.saturating_sub(1),
                )?;
                Some(lam(&y, (**a).clone(), body))
            }
            FunType::Monad(mt) if mt.shared.is_empty() && mt.linear.is_empty() => {
                let c = self.fresh("c");
                let env = Env {
                    psi: psi.clone(),
                    ..Env::default()
                };
                let p = self.proc_in(&env, &c, &mt.offered_ty, depth.saturating_sub(1))?;
                Some(monad_val(&c, p))
            }
            _ => None,
        }
    }

    /// A beta redex of type `t`: `(\x:s. M) N`.
    pub fn redex(&mut self, psi: &Psi, t: &FunType, depth: usize) -> Option<Term> {
        let s = self.fun_type(1);
        let x = self.fresh("v");
        let body = self.term(&psi.with_term(&x, s.clone()), t, depth)?;
        let arg = self.term(psi, &s, depth.saturating_sub(1))?;
        Some(app(lam(&x, s, body), arg))
    }

    // -- processes -------------------------------------------------------

    /// A closed process offering `c:a`.
    pub fn proc(&mut self, psi: &Psi, c: &Name, a: &SessType, depth: usize) -> Option<Process> {
        let env = Env {
            psi: psi.clone(),
            ..Env::default()
        };
        self.proc_in(&env, c, a, depth)
    }

    /// A process offering `c:a` that uses up the linear channels `uses`.
    pub fn proc_using(
        &mut self,
        psi: &Psi,
        uses: &[(Name, SessType)],
        c: &Name,
        a: &SessType,
        depth: usize,
    ) -> Option<Process> {
        let mut env = Env {
            psi: psi.clone(),
            ..Env::default()
        };
        for (x, b) in uses {
            env.bind(x, b.clone());
        }
        self.proc_in(&env, c, a, depth)
    }

    fn proc_in(&mut self, env: &Env, c: &Name, a: &SessType, depth: usize) -> Option<Process> {
        // use up the linear channels first
        if let Some((x, b)) = env.led.last().cloned() {
            let mut rest = env.clone();
            rest.led.pop();
            let bw = whnf_s(&b)?;
            if bw == SessType::One {
                return self.proc_in(&rest, c, a, depth);
            }
            if env.led.len() == 1
                && self.chance(0.3)
                && crate::equality::sess_eq(&env.psi, &b, a) == Verdict::Yes
            {
                return Some(fwd(&x, c));
            }
            return self.use_chan(&rest, &x, &bw, &b, c, a, depth);
        }
        if depth > 0 && !env.gamma.is_empty() && self.chance(0.15) {
            let (u, b) = self.pick(&env.gamma).clone();
            let y = self.fresh("y");
            let mut next = env.clone();
            next.bind(&y, b);
            let body = self.proc_in(&next, c, a, depth - 1)?;
            return Some(Process::Copy {
                on: u,
                bind: y,
                body: Box::new(body),
            });
        }
        if depth > 0 && self.chance(0.25) {
            let b = self.sess(depth.min(2));
            let x = self.fresh("ch");
            let provider = self.proc_in(&env.closed(), &x, &b, depth - 1)?;
            let mut next = env.clone();
            next.bind(&x, b.clone());
            let user = self.proc_in(&next, c, a, depth - 1)?;
            return Some(Process::New {
                bind: x,
                anno: Some(b),
                left: Box::new(provider),
                right: Box::new(user),
            });
        }
        if depth > 0 && self.chance(0.15) {
            let b = self.sess(depth.min(2));
            let (x, d) = (self.fresh("sp"), self.fresh("c"));
            // spawned bodies see no channels of ours
            let inner = Env {
                psi: env.psi.clone(),
                ..Env::default()
            };
            let body = self.proc_in(&inner, &d, &b, depth - 1)?;
            let mut next = env.clone();
            next.bind(&x, b.clone());
            let cont = self.proc_in(&next, c, a, depth - 1)?;
            return Some(Process::Spawn(Box::new(Spawn {
                bind: x,
                anno: Some(b),
                term: monad_val(&d, body),
                shared: vec![],
                linear: vec![],
                cont,
            })));
        }
        let d = depth.saturating_sub(1);
        match whnf_s(a)? {
            SessType::One => Some(Process::Nil),
            SessType::Exists(x, t, b) => {
                let m = self.term(&env.psi, &t, d.min(2))?;
                let body = self.proc_in(env, c, &b.subst_term(&x, &m), d)?;
                Some(Process::OutTerm {
                    on: c.clone(),
                    payload: m,
                    anno: a.clone(),
                    body: Box::new(body),
                })
            }
            SessType::Forall(x, t, b) => {
                let y = self.fresh("v");
                let next = Env {
                    psi: env.psi.with_term(&y, (*t).clone()),
                    ..env.clone()
                };
                let body = self.proc_in(&next, c, &b.rename(&x, &y), d)?;
                Some(Process::In {
                    on: c.clone(),
                    bind: y,
                    body: Box::new(body),
                })
            }
            SessType::Tensor(a1, a2) => {
                let y = self.fresh("y");
                let l = self.proc_in(&env.closed(), &y, &a1, d)?;
                let r = self.proc_in(env, c, &a2, d)?;
                Some(Process::OutFresh {
                    on: c.clone(),
                    bind: y,
                    left: Box::new(l),
                    right: Box::new(r),
                })
            }
            SessType::Lolli(a1, a2) => {
                let y = self.fresh("y");
                let mut next = env.clone();
                next.bind(&y, *a1);
                let body = self.proc_in(&next, c, &a2, d)?;
                Some(Process::In {
                    on: c.clone(),
                    bind: y,
                    body: Box::new(body),
                })
            }
            SessType::With(bs) => {
                let mut out = Branches::new();
                for (l, b) in bs {
                    out.insert(l, self.proc_in(env, c, &b, d)?);
                }
                Some(Process::Case {
                    on: c.clone(),
                    branches: out,
                })
            }
            SessType::Plus(bs) => {
                let labels: Vec<Label> = bs.keys().cloned().collect();
                let l = self.pick(&labels).clone();
                let body = self.proc_in(env, c, &bs[&l], d)?;
                Some(Process::Select {
                    on: c.clone(),
                    label: l,
                    body: Box::new(body),
                })
            }
            SessType::Bang(b) => {
                let y = self.fresh("y");
                let body = self.proc_in(&env.closed(), &y, &b, d)?;
                Some(Process::Repl {
                    on: c.clone(),
                    bind: y,
                    body: Box::new(body),
                })
            }
            SessType::IfS(m, a1, a2) => {
                let Term::Var(v) = *m else { return None };
                let then = self.proc_in(&refine(env, &v, &Term::TT), c, &a1, d)?;
                let other = self.proc_in(&refine(env, &v, &Term::FF), c, &a2, d)?;
                Some(Process::If {
                    cond: var(&v),
                    then: Box::new(then),
                    other: Box::new(other),
                })
            }
            _ => None,
        }
    }

    /// Uses up channel `x` (of type `b`, head normal form `bw`), then
    /// continues offering `c:a`.
    #[allow(clippy::too_many_arguments)]
    fn use_chan(
        &mut self,
        env: &Env,
        x: &Name,
        bw: &SessType,
        b: &SessType,
        c: &Name,
        a: &SessType,
        depth: usize,
    ) -> Option<Process> {
        let d = depth.saturating_sub(1);
        let with = |env: &Env, t: SessType| {
            let mut e = env.clone();
            e.led.push((x.clone(), t));
            e
        };
        match bw.clone() {
            SessType::One => self.proc_in(env, c, a, depth),
            SessType::Exists(y, t, rest) => {
                let v = self.fresh("v");
                let next = with(
                    &Env {
                        psi: env.psi.with_term(&v, (*t).clone()),
                        ..env.clone()
                    },
                    rest.rename(&y, &v),
                );
                let body = self.proc_in(&next, c, a, d)?;
                Some(Process::In {
                    on: x.clone(),
                    bind: v,
                    body: Box::new(body),
                })
            }
            SessType::Forall(y, t, rest) => {
                let m = self.term(&env.psi, &t, d.min(2))?;
                let body = self.proc_in(&with(env, rest.subst_term(&y, &m)), c, a, d)?;
                Some(Process::OutTerm {
                    on: x.clone(),
                    payload: m,
                    anno: b.clone(),
                    body: Box::new(body),
                })
            }
            SessType::Tensor(b1, b2) => {
                let y = self.fresh("y");
                let mut next = with(env, *b2);
                next.bind(&y, *b1);
                let body = self.proc_in(&next, c, a, d)?;
                Some(Process::In {
                    on: x.clone(),
                    bind: y,
                    body: Box::new(body),
                })
            }
            SessType::Lolli(b1, b2) => {
                let y = self.fresh("y");
                let l = self.proc_in(&env.closed(), &y, &b1, d)?;
                let r = self.proc_in(&with(env, *b2), c, a, d)?;
                Some(Process::OutFresh {
                    on: x.clone(),
                    bind: y,
                    left: Box::new(l),
                    right: Box::new(r),
                })
            }
            SessType::With(bs) => {
                let labels: Vec<Label> = bs.keys().cloned().collect();
                let l = self.pick(&labels).clone();
                let body = self.proc_in(&with(env, bs[&l].clone()), c, a, d)?;
                Some(Process::Select {
                    on: x.clone(),
                    label: l,
                    body: Box::new(body),
                })
            }
            SessType::Plus(bs) => {
                let mut out = Branches::new();
                for (l, t) in bs {
                    out.insert(l, self.proc_in(&with(env, t), c, a, d)?);
                }
                Some(Process::Case {
                    on: x.clone(),
                    branches: out,
                })
            }
            SessType::Bang(inner) => {
                let y = self.fresh("y");
                let mut next = env.clone();
                next.gamma.push((x.clone(), (*inner).clone()));
                next.bind(&y, *inner);
                let body = self.proc_in(&next, c, a, d)?;
                Some(Process::Copy {
                    on: x.clone(),
                    bind: y,
                    body: Box::new(body),
                })
            }
            SessType::IfS(m, b1, b2) => {
                let Term::Var(v) = *m else { return None };
                let then = self.proc_in(
                    &with(&refine(env, &v, &Term::TT), *b1),
                    &c.clone(),
                    &a.subst_term(&v, &Term::TT),
                    d,
                )?;
                let other = self.proc_in(
                    &with(&refine(env, &v, &Term::FF), *b2),
                    c,
                    &a.subst_term(&v, &Term::FF),
                    d,
                )?;
                Some(Process::If {
                    cond: var(&v),
                    then: Box::new(then),
                    other: Box::new(other),
                })
            }
            _ => None,
        }
    }
}

/// The environment with boolean variable `v` known to be `val`.
fn refine(env: &Env, v: &Name, val: &Term) -> Env {
    Env {
        psi: env.psi.clone(),
        gamma: env
            .gamma
            .iter()
            .map(|(n, t)| (n.clone(), t.subst_term(v, val)))
            .collect(),
        led: env
            .led
            .iter()
            .map(|(n, t)| (n.clone(), t.subst_term(v, val)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typing::{check_closed, check_term};

    #[test]
    fn booleans_at_depth_one() {
        let mut g = Gen::new(1, false);
        for _ in 0..20 {
            let m = g.term(&Psi::new(), &FunType::Base(Base::Bool), 0).unwrap();
            assert!(m == Term::TT || m == Term::FF);
        }
    }

    #[test]
    fn generated_terms_check() {
        let t = pi("x", FunType::Base(Base::Bool), FunType::Base(Base::Bool));
        let mut ok = 0;
        for seed in 0..1000 {
            let mut g = Gen::new(seed, false);
            if let Some(m) = g.term(&Psi::new(), &t, 4) {
                if check_term(&Psi::new(), &m, &t).is_ok() {
                    ok += 1;
                }
            }
        }
        assert!(ok >= 900, "{ok}");
    }

    #[test]
    fn generated_processes_check() {
        let mut ok = 0;
        for seed in 0..300 {
            let mut g = Gen::new(seed, false);
            let a = g.sess(3);
            let c: Name = "c".into();
            if let Some(p) = g.proc(&Psi::new(), &c, &a, 4) {
                match check_closed(&TriCtx::default(), &p, &c, &a) {
                    Ok(_) => ok += 1,
                    Err(e) => panic!("{p} at {a}: {e}"),
                }
            }
        }
        assert!(ok >= 270, "{ok}");
    }

    #[test]
    fn external_choice_offers_every_branch() {
        let a: SessType = SessType::With(
            [
                ("a".to_string(), SessType::One),
                ("b".to_string(), SessType::One),
            ]
            .into(),
        );
        let mut g = Gen::new(0, false);
        let p = g.proc(&Psi::new(), &"c".into(), &a, 0).unwrap();
        let Process::Case { branches, .. } = p else {
            panic!()
        };
        assert!(branches.values().all(|b| *b == Process::Nil));
    }
}
