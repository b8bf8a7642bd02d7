//! Single-line printer whose output the parser reads back.

use std::fmt::{self, Write};

use super::{Decl, DeclBody, SourceFile, TypeBody};
use crate::syntax::*;

pub trait Pretty {
    fn pretty(&self) -> String;
}

// precedence levels, loosest first
const BIND: u8 = 0;
const TENSOR: u8 = 1;
const APP: u8 = 2;
const ATOM: u8 = 3;

fn paren(out: &mut String, yes: bool, f: impl FnOnce(&mut String)) {
    if yes {
        out.push('(');
    }
    f(out);
    if yes {
        out.push(')');
    }
}

pub fn kind(out: &mut String, k: &Kind) {
    match k {
        Kind::Type => out.push_str("type"),
        Kind::SType => out.push_str("stype"),
        Kind::PiTerm(x, t, b) => {
            write!(out, "pi {x}:").unwrap();
            fun(out, t, APP);
            out.push_str(". ");
            kind(out, b);
        }
        Kind::PiType(x, k1, k2) => {
            write!(out, "pi {x}::").unwrap();
            paren(out, !matches!(**k1, Kind::Type | Kind::SType), |o| {
                kind(o, k1)
            });
            out.push_str(". ");
            kind(out, k2);
        }
    }
}

/// Functional types use three levels: binders, application, atoms.
pub fn fun(out: &mut String, t: &FunType, prec: u8) {
    match t {
        FunType::Pi(x, a, b) | FunType::LamT(x, a, b) => paren(out, prec > BIND, |o| {
            let kw = if matches!(t, FunType::Pi(..)) {
                "pi "
            } else {
                "\\"
            };
            write!(o, "{kw}{x}:").unwrap();
            fun(o, a, APP);
            o.push_str(". ");
            fun(o, b, BIND);
        }),
        FunType::LamK(x, k, b) => paren(out, prec > BIND, |o| {
            write!(o, "\\{x}::").unwrap();
            paren(o, !matches!(**k, Kind::Type | Kind::SType), |o| kind(o, k));
            o.push_str(". ");
            fun(o, b, BIND);
        }),
        FunType::AppT(f, m) => paren(out, prec > APP, |o| {
            fun(o, f, APP);
            o.push_str(" [");
            term(o, m, BIND);
            o.push(']');
        }),
        FunType::AppK(f, a) => paren(out, prec > APP, |o| {
            fun(o, f, APP);
            o.push(' ');
            fun(o, a, ATOM);
        }),
        FunType::Monad(m) => monad_type(out, m),
        FunType::TVar(x) => out.push_str(x),
        FunType::Base(Base::Bool) => out.push_str("Bool"),
        FunType::Base(Base::Nat) => out.push_str("Nat"),
    }
}

fn typed_names(out: &mut String, xs: &[(Name, SessType)]) {
    for (i, (n, a)) in xs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write!(out, "{n}:").unwrap();
        sess(out, a, BIND);
    }
}

pub fn monad_type(out: &mut String, m: &MonadType) {
    out.push_str("{ ");
    monad_type_inner(out, m);
}

fn monad_type_inner(out: &mut String, m: &MonadType) {
    if !m.shared.is_empty() || !m.linear.is_empty() {
        typed_names(out, &m.shared);
        out.push_str(if m.shared.is_empty() { "; " } else { " ; " });
        typed_names(out, &m.linear);
        if !m.linear.is_empty() {
            out.push(' ');
        }
    }
    write!(out, "|- {}:", m.offered).unwrap();
    sess(out, &m.offered_ty, BIND);
    out.push_str(" }");
}

fn branches(out: &mut String, open: &str, bs: &Branches<SessType>) {
    out.push_str(open);
    for (i, (l, a)) in bs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write!(out, "{l}: ").unwrap();
        sess(out, a, BIND);
    }
    out.push('}');
}

pub fn sess(out: &mut String, a: &SessType, prec: u8) {
    use SessType::*;
    match a {
        Forall(x, t, b) | Exists(x, t, b) => paren(out, prec > BIND, |o| {
            let is_all = matches!(a, Forall(..));
            if x == "_" || !b.mentions(x) {
                fun(o, t, APP);
                o.push_str(if is_all { " => " } else { " /\\ " });
            } else {
                write!(o, "{} {x}:", if is_all { "forall" } else { "exists" }).unwrap();
                fun(o, t, APP);
                o.push_str(". ");
            }
            sess(o, b, BIND);
        }),
        LamTm(x, t, b) => paren(out, prec > BIND, |o| {
            write!(o, "\\{x}:").unwrap();
            fun(o, t, APP);
            o.push_str(". ");
            sess(o, b, BIND);
        }),
        LamTy(x, k, b) => paren(out, prec > BIND, |o| {
            write!(o, "\\{x}::").unwrap();
            paren(o, !matches!(**k, Kind::Type | Kind::SType), |o| kind(o, k));
            o.push_str(". ");
            sess(o, b, BIND);
        }),
        Lolli(x, y) => paren(out, prec > BIND, |o| {
            sess(o, x, TENSOR);
            o.push_str(" -o ");
            sess(o, y, BIND);
        }),
        Tensor(x, y) => paren(out, prec > TENSOR, |o| {
            sess(o, x, APP);
            o.push_str(" * ");
            sess(o, y, TENSOR);
        }),
        Bang(x) => paren(out, prec > APP, |o| {
            o.push('!');
            sess(o, x, ATOM);
        }),
        AppTm(x, m) => paren(out, prec > APP, |o| {
            sess(o, x, APP);
            o.push_str(" [");
            term(o, m, BIND);
            o.push(']');
        }),
        AppTy(x, y) => paren(out, prec > APP, |o| {
            sess(o, x, APP);
            o.push(' ');
            sess(o, y, ATOM);
        }),
        IfS(m, x, y) => paren(out, prec > APP, |o| {
            o.push_str("ifS ");
            term(o, m, ATOM);
            o.push(' ');
            sess(o, x, ATOM);
            o.push(' ');
            sess(o, y, ATOM);
        }),
        NatRecS {
            target,
            zero,
            pred,
            rec,
            succ,
        } => paren(out, prec > APP, |o| {
            o.push_str("natrecS ");
            term(o, target, ATOM);
            o.push(' ');
            sess(o, zero, ATOM);
            write!(o, " ({pred}, {rec} => ").unwrap();
            sess(o, succ, BIND);
            o.push(')');
        }),
        With(bs) => branches(out, "&{", bs),
        Plus(bs) => branches(out, "+{", bs),
        One => out.push('1'),
        SVar(x) => out.push_str(x),
    }
}

/// Terms: binders, application, atoms.
pub fn term(out: &mut String, m: &Term, prec: u8) {
    if let Some(n) = m.as_nat() {
        if n > 0 {
            write!(out, "{n}").unwrap();
            return;
        }
    }
    match m {
        Term::Var(x) => out.push_str(x),
        Term::Lam(x, t, b) => paren(out, prec > BIND, |o| {
            write!(o, "\\{x}:").unwrap();
            fun(o, t, APP);
            o.push_str(". ");
            term(o, b, BIND);
        }),
        Term::App(f, a) => paren(out, prec > APP, |o| {
            term(o, f, APP);
            o.push(' ');
            term(o, a, ATOM);
        }),
        Term::MonadVal(mv) => {
            write!(out, "{{ {} <- ", mv.offered).unwrap();
            process(out, &mv.body);
            if !mv.shared.is_empty() || !mv.linear.is_empty() {
                write!(
                    out,
                    " <- {} ; {}",
                    mv.shared.join(", "),
                    mv.linear.join(", ")
                )
                .unwrap();
            }
            out.push_str(" }");
        }
        Term::TT => out.push_str("tt"),
        Term::FF => out.push_str("ff"),
        Term::Zero => out.push('z'),
        Term::Succ(a) => paren(out, prec > APP, |o| {
            o.push_str("succ ");
            term(o, a, ATOM);
        }),
        Term::IfT(a, b, c) => paren(out, prec > APP, |o| {
            o.push_str("ifT ");
            term(o, a, ATOM);
            o.push(' ');
            term(o, b, ATOM);
            o.push(' ');
            term(o, c, ATOM);
        }),
        Term::NatRecT {
            motive,
            target,
            zero,
            pred,
            rec,
            succ,
        } => paren(out, prec > APP, |o| {
            o.push_str("natrecT ");
            fun(o, motive, ATOM);
            o.push(' ');
            term(o, target, ATOM);
            o.push(' ');
            term(o, zero, ATOM);
            write!(o, " ({pred}, {rec} => ").unwrap();
            term(o, succ, BIND);
            o.push(')');
        }),
    }
}

pub fn process(out: &mut String, p: &Process) {
    use Process::*;
    match p {
        OutFresh {
            on,
            bind,
            left,
            right,
        } => {
            write!(out, "out {on} ({bind}). (").unwrap();
            process(out, left);
            out.push_str(" || ");
            process(out, right);
            out.push(')');
        }
        New {
            bind,
            anno,
            left,
            right,
        } => {
            write!(out, "nu {bind}").unwrap();
            if let Some(a) = anno {
                out.push(':');
                sess(out, a, BIND);
            }
            out.push_str(". (");
            process(out, left);
            out.push_str(" || ");
            process(out, right);
            out.push(')');
        }
        In { on, bind, body } | Repl { on, bind, body } | Copy { on, bind, body } => {
            let kw = match p {
                In { .. } => "recv",
                Repl { .. } => "serve",
                _ => "copy",
            };
            write!(out, "{kw} {on} ({bind}). ").unwrap();
            process(out, body);
        }
        OutTerm {
            on,
            payload,
            anno,
            body,
        } => {
            write!(out, "send {on} <").unwrap();
            term(out, payload, BIND);
            out.push_str(" : ");
            sess(out, anno, BIND);
            out.push_str(">. ");
            process(out, body);
        }
        Case { on, branches } => {
            write!(out, "case {on} ").unwrap();
            proc_branches(out, branches.iter());
        }
        If { cond, then, other } => {
            out.push_str("case ");
            // a bare name would read back as a case on a channel
            paren(out, matches!(cond, Term::Var(_)), |o| term(o, cond, ATOM));
            out.push(' ');
            proc_branches(out, [("tt", &**then), ("ff", &**other)].into_iter());
        }
        Select { on, label, body } => {
            write!(out, "{on}.{label}; ").unwrap();
            process(out, body);
        }
        Fwd { from, to } => write!(out, "fwd {from} {to}").unwrap(),
        Nil => out.push_str("end"),
        Spawn(s) => {
            out.push_str(&s.bind);
            if let Some(a) = &s.anno {
                out.push_str(" : ");
                sess(out, a, BIND);
            }
            out.push_str(" <- ");
            term(out, &s.term, BIND);
            if !s.shared.is_empty() || !s.linear.is_empty() {
                write!(out, " <- {} ; {}", s.shared.join(", "), s.linear.join(", ")).unwrap();
            }
            out.push_str("; ");
            process(out, &s.cont);
        }
    }
}

fn proc_branches<'a, L: AsRef<str>>(out: &mut String, bs: impl Iterator<Item = (L, &'a Process)>) {
    out.push_str("{ ");
    for (i, (l, p)) in bs.enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write!(out, "{} => ", l.as_ref()).unwrap();
        process(out, p);
    }
    out.push_str(" }");
}

pub fn decl(out: &mut String, d: &Decl) {
    match &d.body {
        DeclBody::Type { kind: k, body } => {
            write!(out, "type {} :: ", d.name).unwrap();
            kind(out, k);
            out.push_str(" = ");
            match body {
                TypeBody::Fun(t) => fun(out, t, BIND),
                TypeBody::Sess(a) => sess(out, a, BIND),
            }
        }
        DeclBody::Term { ty, term: m } => {
            write!(out, "def {} : ", d.name).unwrap();
            fun(out, ty, BIND);
            out.push_str(" = ");
            term(out, m, BIND);
        }
        DeclBody::Proc { ty, body } => {
            write!(out, "proc {} {{ ", d.name).unwrap();
            monad_type_inner(out, ty);
            out.push_str(" = ");
            process(out, body);
        }
    }
}

macro_rules! pretty {
    ($ty:ty, |$o:ident, $x:ident| $body:expr) => {
        impl Pretty for $ty {
            fn pretty(&self) -> String {
                let mut $o = String::new();
                let $x = self;
                $body;
                $o
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.pretty())
            }
        }
    };
}

pretty!(Kind, |o, x| kind(&mut o, x));
pretty!(FunType, |o, x| fun(&mut o, x, BIND));
pretty!(SessType, |o, x| sess(&mut o, x, BIND));
pretty!(Term, |o, x| term(&mut o, x, BIND));
pretty!(Process, |o, x| process(&mut o, x));
pretty!(Decl, |o, x| decl(&mut o, x));

impl Pretty for SourceFile {
    fn pretty(&self) -> String {
        self.decls.iter().map(|d| d.pretty() + "\n").collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::*;
    use crate::surface::parser::*;

    #[test]
    fn forwarder() {
        assert_eq!(fwd("d", "c").pretty(), "fwd d c");
    }

    #[test]
    fn choice_with_sugar() {
        let a = parse_sess("+{dec: Nat /\\ simpleCounterT, done: 1}").unwrap();
        assert_eq!(a.pretty(), "+{dec: Nat /\\ simpleCounterT, done: 1}");
    }

    #[test]
    fn round_trips() {
        let procs = [
            "recv z (x). case x { ff => send z <tt : Bool /\\ 1>. end, tt => send z <23 : Nat /\\ 1>. end }",
            "nu c:forall x:Nat. 1. (recv c (x). end || send c <2 : forall x:Nat. 1>. fwd c d)",
            "x : Nat /\\ 1 <- (\\n:Nat. { c <- send c <n : Nat /\\ 1>. end }) 3; fwd x c",
            "y <- f <- u ; d; out y (k). (fwd k a || case (g tt) { tt => end, ff => y.l; end })",
            "case (x) { tt => end, ff => end }",
            "serve u (a). copy v (b). fwd b a",
        ];
        for src in procs {
            let p = parse_proc(src).unwrap();
            let back = parse_proc(&p.pretty()).unwrap_or_else(|e| panic!("{}: {e}", p.pretty()));
            assert!(alpha_eq_proc(&p, &back), "{src}\n{}", p.pretty());
        }
        let types = [
            "\\k:Nat. natrecS k (+{done: 1}) (n, r => +{dec: Nat /\\ r, done: 1})",
            "!(A -o B) * C [succ n] -o ifS x (Nat /\\ 1) (Bool /\\ 1)",
            "(\\t::pi x:Nat. stype. t [z]) A",
            "forall f:(pi x:Nat. { u:!1 ; d:1 |- c:1 }). exists y:Nat. f",
        ];
        for src in types {
            let a = parse_sess(src).unwrap();
            let back = parse_sess(&a.pretty()).unwrap_or_else(|e| panic!("{}: {e}", a.pretty()));
            assert!(alpha_eq_sess(&a, &back), "{src}\n{}", a.pretty());
        }
        let terms = [
            "natrecT (\\k:Nat. Nat) (succ x) z (n, r => succ r)",
            "ifT (f tt) 2 z",
            "(tt : Bool)",
        ];
        for src in terms {
            let m = parse_term(src).unwrap();
            let back = parse_term(&m.pretty()).unwrap();
            assert!(alpha_eq_term(&m, &back), "{src}\n{}", m.pretty());
        }
    }
}
