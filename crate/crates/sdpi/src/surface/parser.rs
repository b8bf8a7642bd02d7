//! Recursive-descent parser. Every failure is a positioned error carrying the
//! set of tokens that would have been accepted.

use std::collections::BTreeSet;
use std::fmt;

use super::lexer::{lex, Pos, Spanned, Tok};
use super::{is_reserved, Decl, DeclBody, SourceFile, TypeBody};
use crate::syntax::*;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: Pos,
    pub expected: BTreeSet<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exp: Vec<&str> = self.expected.iter().map(String::as_str).collect();
        write!(
            f,
            "{}: expected {}, found {}",
            self.pos,
            exp.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

struct Parser {
    toks: Vec<Spanned>,
    i: usize,
}

const MAX_DEPTH: usize = 400;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        let toks = lex(src).map_err(|e| ParseError {
            pos: e.pos,
            expected: ["a token".to_string()].into_iter().collect(),
            found: e.msg,
        })?;
        Ok(Parser { toks, i: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i.min(self.toks.len() - 1)].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i.min(self.toks.len() - 1)].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek().clone();
        if self.i < self.toks.len() - 1 {
            self.i += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(t) if t == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.fail(&[&format!("`{s}`")])
        }
    }

    fn is_name(&self) -> bool {
        matches!(self.peek(), Tok::Word(w) if !is_reserved(w))
    }

    fn name(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Word(w) if !is_reserved(&w) => {
                self.bump();
                Ok(w)
            }
            _ => self.fail(&["a name"]),
        }
    }

    /// Labels may be any word, including `tt` and `ff`.
    fn label(&mut self) -> PResult<Label> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.bump();
                Ok(w)
            }
            _ => self.fail(&["a label"]),
        }
    }

    fn depth_guard(&self, depth: usize) -> PResult<()> {
        if depth > MAX_DEPTH {
            return Err(ParseError {
                pos: self.pos(),
                expected: ["less deeply nested input".to_string()]
                    .into_iter()
                    .collect(),
                found: "nesting limit".into(),
            });
        }
        Ok(())
    }

    // -----------------------------------------------------------------------
    // kinds

    fn kind(&mut self, d: usize) -> PResult<Kind> {
        self.depth_guard(d)?;
        if self.eat_word("type") {
            return Ok(Kind::Type);
        }
        if self.eat_word("stype") {
            return Ok(Kind::SType);
        }
        if self.eat_sym("(") {
            let k = self.kind(d + 1)?;
            self.sym(")")?;
            return Ok(k);
        }
        if self.eat_word("pi") {
            let x = self.binder()?;
            if self.eat_sym("::") {
                let k1 = self.kind(d + 1)?;
                self.sym(".")?;
                let k2 = self.kind(d + 1)?;
                return Ok(Kind::PiType(x, Box::new(k1), Box::new(k2)));
            }
            self.sym(":")?;
            let t = self.fun(d + 1)?;
            self.sym(".")?;
            let k = self.kind(d + 1)?;
            return Ok(Kind::PiTerm(x, Box::new(t), Box::new(k)));
        }
        self.fail(&["`type`", "`stype`", "`pi`", "`(`"])
    }

    fn binder(&mut self) -> PResult<Name> {
        self.name()
    }

    // -----------------------------------------------------------------------
    // functional types

    fn fun(&mut self, d: usize) -> PResult<FunType> {
        self.depth_guard(d)?;
        if self.eat_word("pi") {
            let x = self.binder()?;
            self.sym(":")?;
            let a = self.fun(d + 1)?;
            self.sym(".")?;
            let b = self.fun(d + 1)?;
            return Ok(FunType::Pi(x, Box::new(a), Box::new(b)));
        }
        if self.eat_sym("\\") {
            let x = self.binder()?;
            if self.eat_sym("::") {
                let k = self.kind(d + 1)?;
                self.sym(".")?;
                let b = self.fun(d + 1)?;
                return Ok(FunType::LamK(x, Box::new(k), Box::new(b)));
            }
            self.sym(":")?;
            let a = self.fun(d + 1)?;
            self.sym(".")?;
            let b = self.fun(d + 1)?;
            return Ok(FunType::LamT(x, Box::new(a), Box::new(b)));
        }
        self.fun_app(d)
    }

    fn starts_fun_atom(&self) -> bool {
        self.is_name()
            || self.is_word("Bool")
            || self.is_word("Nat")
            || self.is_sym("(")
            || self.is_sym("{")
    }

    fn fun_app(&mut self, d: usize) -> PResult<FunType> {
        let mut head = self.fun_atom(d)?;
        loop {
            if self.eat_sym("[") {
                let m = self.term(d + 1)?;
                self.sym("]")?;
                head = FunType::AppT(Box::new(head), Box::new(m));
            } else if self.starts_fun_atom() {
                let a = self.fun_atom(d + 1)?;
                head = FunType::AppK(Box::new(head), Box::new(a));
            } else {
                return Ok(head);
            }
        }
    }

    fn fun_atom(&mut self, d: usize) -> PResult<FunType> {
        self.depth_guard(d)?;
        if self.eat_word("Bool") {
            return Ok(FunType::Base(Base::Bool));
        }
        if self.eat_word("Nat") {
            return Ok(FunType::Base(Base::Nat));
        }
        if self.is_name() {
            return Ok(FunType::TVar(self.name()?));
        }
        if self.eat_sym("(") {
            let t = self.fun(d + 1)?;
            self.sym(")")?;
            return Ok(t);
        }
        if self.eat_sym("{") {
            let m = self.monad_type_inner(d + 1)?;
            return Ok(FunType::Monad(m));
        }
        self.fail(&["a type", "`Bool`", "`Nat`", "`(`", "`{`"])
    }

    /// The part of a monad type after the opening brace.
    fn monad_type_inner(&mut self, d: usize) -> PResult<MonadType> {
        let (mut shared, mut linear) = (vec![], vec![]);
        if !self.eat_sym("|-") {
            if !self.is_sym(";") {
                shared = self.typed_names(d)?;
            }
            self.sym(";")?;
            if !self.is_sym("|-") {
                linear = self.typed_names(d)?;
            }
            self.sym("|-")?;
        }
        let offered = self.name()?;
        self.sym(":")?;
        let a = self.sess(d + 1)?;
        self.sym("}")?;
        let mut seen: Vec<&Name> = shared.iter().chain(linear.iter()).map(|(n, _)| n).collect();
        seen.push(&offered);
        let distinct: BTreeSet<&&Name> = seen.iter().collect();
        if distinct.len() != seen.len() {
            return self.fail(&["pairwise distinct channel names"]);
        }
        Ok(MonadType {
            shared,
            linear,
            offered,
            offered_ty: Box::new(a),
        })
    }

    fn typed_names(&mut self, d: usize) -> PResult<Vec<(Name, SessType)>> {
        let mut out = vec![];
        loop {
            let n = self.name()?;
            self.sym(":")?;
            out.push((n, self.sess(d + 1)?));
            if !self.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    // -----------------------------------------------------------------------
    // session types

    fn sess(&mut self, d: usize) -> PResult<SessType> {
        self.depth_guard(d)?;
        for (kw, is_all) in [("forall", true), ("exists", false)] {
            if self.eat_word(kw) {
                let x = self.binder_or_blank()?;
                self.sym(":")?;
                let t = self.fun(d + 1)?;
                self.sym(".")?;
                let a = self.sess(d + 1)?;
                return Ok(if is_all {
                    forall(&x, t, a)
                } else {
                    exists(&x, t, a)
                });
            }
        }
        if self.eat_sym("\\") {
            let x = self.binder()?;
            if self.eat_sym("::") {
                let k = self.kind(d + 1)?;
                self.sym(".")?;
                let a = self.sess(d + 1)?;
                return Ok(SessType::LamTy(x, Box::new(k), Box::new(a)));
            }
            self.sym(":")?;
            let t = self.fun(d + 1)?;
            self.sym(".")?;
            let a = self.sess(d + 1)?;
            return Ok(SessType::LamTm(x, Box::new(t), Box::new(a)));
        }
        // `T /\ A` and `T => A`
        let save = self.i;
        if let Ok(t) = self.fun(d + 1) {
            if self.eat_sym("/\\") {
                let a = self.sess(d + 1)?;
                return Ok(exists("_", t, a));
            }
            if self.eat_sym("=>") {
                let a = self.sess(d + 1)?;
                return Ok(forall("_", t, a));
            }
        }
        self.i = save;
        let lhs = self.sess_tensor(d)?;
        if self.eat_sym("-o") {
            let rhs = self.sess(d + 1)?;
            return Ok(SessType::Lolli(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn binder_or_blank(&mut self) -> PResult<Name> {
        self.name()
    }

    fn sess_tensor(&mut self, d: usize) -> PResult<SessType> {
        let lhs = self.sess_app(d)?;
        if self.eat_sym("*") {
            let rhs = self.sess_tensor(d + 1)?;
            return Ok(SessType::Tensor(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn starts_sess_atom(&self) -> bool {
        matches!(self.peek(), Tok::Num(1))
            || self.is_name()
            || self.is_sym("(")
            || self.is_sym("&")
            || self.is_sym("+")
    }

    fn sess_app(&mut self, d: usize) -> PResult<SessType> {
        self.depth_guard(d)?;
        let mut head = if self.eat_sym("!") {
            SessType::Bang(Box::new(self.sess_atom(d + 1)?))
        } else if self.eat_word("ifS") {
            let m = self.term_atom(d + 1)?;
            let a = self.sess_atom(d + 1)?;
            let b = self.sess_atom(d + 1)?;
            SessType::IfS(Box::new(m), Box::new(a), Box::new(b))
        } else if self.eat_word("natrecS") {
            let m = self.term_atom(d + 1)?;
            let z = self.sess_atom(d + 1)?;
            let (pred, rec) = self.rec_binders()?;
            let s = self.sess(d + 1)?;
            self.sym(")")?;
            SessType::NatRecS {
                target: Box::new(m),
                zero: Box::new(z),
                pred,
                rec,
                succ: Box::new(s),
            }
        } else {
            self.sess_atom(d)?
        };
        loop {
            if self.eat_sym("[") {
                let m = self.term(d + 1)?;
                self.sym("]")?;
                head = SessType::AppTm(Box::new(head), Box::new(m));
            } else if self.starts_sess_atom() {
                let a = self.sess_atom(d + 1)?;
                head = SessType::AppTy(Box::new(head), Box::new(a));
            } else {
                return Ok(head);
            }
        }
    }

    /// `(n, r =>`
    fn rec_binders(&mut self) -> PResult<(Name, Name)> {
        self.sym("(")?;
        let n = self.binder()?;
        self.sym(",")?;
        let r = self.binder()?;
        if n == r {
            return self.fail(&["two distinct names"]);
        }
        self.sym("=>")?;
        Ok((n, r))
    }

    fn sess_atom(&mut self, d: usize) -> PResult<SessType> {
        self.depth_guard(d)?;
        if let Tok::Num(1) = self.peek() {
            self.bump();
            return Ok(SessType::One);
        }
        if self.is_name() {
            return Ok(SessType::SVar(self.name()?));
        }
        if self.eat_sym("(") {
            let a = self.sess(d + 1)?;
            self.sym(")")?;
            return Ok(a);
        }
        for (s, with) in [("&", true), ("+", false)] {
            if self.eat_sym(s) {
                self.sym("{")?;
                let mut bs = Branches::new();
                loop {
                    let l = self.label()?;
                    self.sym(":")?;
                    let a = self.sess(d + 1)?;
                    if bs.insert(l, a).is_some() {
                        return self.fail(&["a label not used before"]);
                    }
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.sym("}")?;
                return Ok(if with {
                    SessType::With(bs)
                } else {
                    SessType::Plus(bs)
                });
            }
        }
        self.fail(&["a session type", "`1`", "`(`", "`&{`", "`+{`"])
    }

    // -----------------------------------------------------------------------
    // terms

    fn term(&mut self, d: usize) -> PResult<Term> {
        self.depth_guard(d)?;
        if self.eat_sym("\\") {
            let x = self.binder()?;
            self.sym(":")?;
            let t = self.fun(d + 1)?;
            self.sym(".")?;
            let m = self.term(d + 1)?;
            return Ok(lam(&x, t, m));
        }
        let mut head = self.term_head(d)?;
        while self.starts_term_atom() {
            let a = self.term_atom(d + 1)?;
            head = app(head, a);
        }
        Ok(head)
    }

    fn starts_term_atom(&self) -> bool {
        self.is_name()
            || self.is_word("tt")
            || self.is_word("ff")
            || matches!(self.peek(), Tok::Num(_))
            || self.is_sym("(")
            || self.is_sym("{")
    }

    fn term_head(&mut self, d: usize) -> PResult<Term> {
        if self.eat_word("succ") {
            return Ok(succ(self.term_atom(d + 1)?));
        }
        if self.eat_word("ifT") {
            let a = self.term_atom(d + 1)?;
            let b = self.term_atom(d + 1)?;
            let c = self.term_atom(d + 1)?;
            return Ok(Term::IfT(Box::new(a), Box::new(b), Box::new(c)));
        }
        if self.eat_word("natrecT") {
            let motive = self.fun_atom(d + 1)?;
            let target = self.term_atom(d + 1)?;
            let zero = self.term_atom(d + 1)?;
            let (pred, rec) = self.rec_binders()?;
            let s = self.term(d + 1)?;
            self.sym(")")?;
            return Ok(Term::NatRecT {
                motive: Box::new(motive),
                target: Box::new(target),
                zero: Box::new(zero),
                pred,
                rec,
                succ: Box::new(s),
            });
        }
        self.term_atom(d)
    }

    fn term_atom(&mut self, d: usize) -> PResult<Term> {
        self.depth_guard(d)?;
        match self.peek().clone() {
            Tok::Word(w) if w == "z" => {
                self.bump();
                Ok(Term::Zero)
            }
            Tok::Word(w) if w == "tt" => {
                self.bump();
                Ok(Term::TT)
            }
            Tok::Word(w) if w == "ff" => {
                self.bump();
                Ok(Term::FF)
            }
            Tok::Num(n) => {
                self.bump();
                if n > 100_000 {
                    return self.fail(&["a numeral below 100000"]);
                }
                Ok(nat(n))
            }
            Tok::Word(w) if !is_reserved(&w) => {
                self.bump();
                Ok(Term::Var(w))
            }
            Tok::Sym("(") => {
                self.bump();
                let m = self.term(d + 1)?;
                if self.eat_sym(":") {
                    let t = self.fun(d + 1)?;
                    self.sym(")")?;
                    return Ok(app(lam("_asc", t, var("_asc")), m));
                }
                self.sym(")")?;
                Ok(m)
            }
            Tok::Sym("{") => {
                self.bump();
                let c = self.name()?;
                self.sym("<-")?;
                let body = self.proc(d + 1)?;
                let (shared, linear) = if self.eat_sym("<-") {
                    self.channel_lists(false)?
                } else {
                    (vec![], vec![])
                };
                self.sym("}")?;
                Ok(Term::MonadVal(Box::new(MonadVal {
                    offered: c,
                    body,
                    shared,
                    linear,
                })))
            }
            _ => self.fail(&["a term", "`tt`", "`ff`", "`z`", "a numeral", "`(`", "`{`"]),
        }
    }

    /// `u1, u2 ; d1, d2` with an optional trailing `;` terminator.
    fn channel_lists(&mut self, terminated: bool) -> PResult<(Vec<Name>, Vec<Name>)> {
        let shared = if self.is_sym(";") {
            vec![]
        } else {
            self.names()?
        };
        self.sym(";")?;
        let stop = if terminated { ";" } else { "}" };
        let linear = if self.is_sym(stop) {
            vec![]
        } else {
            self.names()?
        };
        Ok((shared, linear))
    }

    fn names(&mut self) -> PResult<Vec<Name>> {
        let mut out = vec![self.name()?];
        while self.eat_sym(",") {
            out.push(self.name()?);
        }
        Ok(out)
    }

    // -----------------------------------------------------------------------
    // processes

    fn par(&mut self, d: usize) -> PResult<(Process, Process)> {
        self.sym("(")?;
        let p = self.proc(d + 1)?;
        self.sym("||")?;
        let q = self.proc(d + 1)?;
        self.sym(")")?;
        Ok((p, q))
    }

    fn bound(&mut self) -> PResult<Name> {
        self.sym("(")?;
        let x = self.name()?;
        self.sym(")")?;
        self.sym(".")?;
        Ok(x)
    }

    fn proc(&mut self, d: usize) -> PResult<Process> {
        use Process::*;
        self.depth_guard(d)?;
        if self.eat_word("out") {
            let on = self.name()?;
            let bind = self.bound()?;
            let (l, r) = self.par(d)?;
            return Ok(OutFresh {
                on,
                bind,
                left: Box::new(l),
                right: Box::new(r),
            });
        }
        if self.eat_word("nu") {
            let bind = self.name()?;
            let anno = if self.eat_sym(":") {
                Some(self.sess(d + 1)?)
            } else {
                None
            };
            self.sym(".")?;
            let (l, r) = self.par(d)?;
            return Ok(New {
                bind,
                anno,
                left: Box::new(l),
                right: Box::new(r),
            });
        }
        for kw in ["recv", "serve", "copy"] {
            if self.eat_word(kw) {
                let on = self.name()?;
                let bind = self.bound()?;
                let body = Box::new(self.proc(d + 1)?);
                return Ok(match kw {
                    "recv" => In { on, bind, body },
                    "serve" => Repl { on, bind, body },
                    _ => Copy { on, bind, body },
                });
            }
        }
        if self.eat_word("send") {
            let on = self.name()?;
            self.sym("<")?;
            let payload = self.term(d + 1)?;
            self.sym(":")?;
            let anno = self.sess(d + 1)?;
            self.sym(">")?;
            self.sym(".")?;
            let body = Box::new(self.proc(d + 1)?);
            return Ok(OutTerm {
                on,
                payload,
                anno,
                body,
            });
        }
        if self.eat_word("case") {
            if self.is_name() && self.peek_at(1) == &Tok::Sym("{") {
                let on = self.name()?;
                let branches = self.proc_branches(d)?;
                return Ok(Case { on, branches });
            }
            let cond = self.term_atom(d + 1)?;
            let mut branches = self.proc_branches(d)?;
            let labels: Vec<&Label> = branches.keys().collect();
            if labels != ["ff", "tt"] {
                return self.fail(&["exactly the branches `tt` and `ff`"]);
            }
            let then = branches.remove("tt").unwrap();
            let other = branches.remove("ff").unwrap();
            return Ok(If {
                cond,
                then: Box::new(then),
                other: Box::new(other),
            });
        }
        if self.eat_word("fwd") {
            let from = self.name()?;
            let to = self.name()?;
            return Ok(Fwd { from, to });
        }
        if self.eat_word("end") {
            return Ok(Nil);
        }
        if self.eat_sym("(") {
            let p = self.proc(d + 1)?;
            self.sym(")")?;
            return Ok(p);
        }
        if self.is_name() {
            let x = self.name()?;
            if self.eat_sym(".") {
                let label = self.label()?;
                self.sym(";")?;
                let body = Box::new(self.proc(d + 1)?);
                return Ok(Select { on: x, label, body });
            }
            let anno = if self.eat_sym(":") {
                Some(self.sess(d + 1)?)
            } else {
                None
            };
            self.sym("<-")?;
            let term = self.term(d + 1)?;
            let (shared, linear) = if self.eat_sym("<-") {
                self.channel_lists(true)?
            } else {
                (vec![], vec![])
            };
            self.sym(";")?;
            let cont = self.proc(d + 1)?;
            return Ok(Process::Spawn(Box::new(crate::syntax::Spawn {
                bind: x,
                anno,
                term,
                shared,
                linear,
                cont,
            })));
        }
        self.fail(&[
            "a process",
            "`out`",
            "`nu`",
            "`recv`",
            "`send`",
            "`serve`",
            "`copy`",
            "`case`",
            "`fwd`",
            "`end`",
            "`(`",
            "a name",
        ])
    }

    fn proc_branches(&mut self, d: usize) -> PResult<Branches<Process>> {
        self.sym("{")?;
        let mut bs = Branches::new();
        loop {
            let l = self.label()?;
            self.sym("=>")?;
            let p = self.proc(d + 1)?;
            if bs.insert(l, p).is_some() {
                return self.fail(&["a label not used before"]);
            }
            if !self.eat_sym(",") {
                break;
            }
        }
        self.sym("}")?;
        Ok(bs)
    }

    // -----------------------------------------------------------------------
    // declarations

    fn decl(&mut self) -> PResult<Decl> {
        let pos = self.pos();
        if self.eat_word("type") {
            let name = self.name()?;
            self.sym("::")?;
            let kind = self.kind(0)?;
            self.sym("=")?;
            let body = match kind_head(&kind) {
                Kind::SType => TypeBody::Sess(self.sess(0)?),
                _ => TypeBody::Fun(self.fun(0)?),
            };
            return Ok(Decl {
                name,
                pos,
                body: DeclBody::Type { kind, body },
            });
        }
        if self.eat_word("def") {
            let name = self.name()?;
            self.sym(":")?;
            let ty = self.fun(0)?;
            self.sym("=")?;
            let term = self.term(0)?;
            return Ok(Decl {
                name,
                pos,
                body: DeclBody::Term { ty, term },
            });
        }
        if self.eat_word("proc") {
            let name = self.name()?;
            self.sym("{")?;
            let ty = self.monad_type_inner(0)?;
            self.sym("=")?;
            let body = self.proc(0)?;
            return Ok(Decl {
                name,
                pos,
                body: DeclBody::Proc { ty, body },
            });
        }
        self.fail(&["`type`", "`def`", "`proc`"])
    }

    fn file(&mut self) -> PResult<SourceFile> {
        let mut decls: Vec<Decl> = vec![];
        while self.peek() != &Tok::Eof {
            let pos = self.pos();
            let d = self.decl()?;
            if decls.iter().any(|e| e.name == d.name) {
                return Err(ParseError {
                    pos,
                    expected: ["a name not defined before".to_string()]
                        .into_iter()
                        .collect(),
                    found: format!("`{}`", d.name),
                });
            }
            decls.push(d);
        }
        Ok(SourceFile { decls })
    }

    fn finish<T>(&mut self, v: T) -> PResult<T> {
        if self.peek() != &Tok::Eof {
            return self.fail(&["end of input"]);
        }
        Ok(v)
    }
}

/// The base kind a kind returns after all its arguments.
pub fn kind_head(k: &Kind) -> &Kind {
    match k {
        Kind::PiTerm(_, _, b) | Kind::PiType(_, _, b) => kind_head(b),
        _ => k,
    }
}

macro_rules! entry {
    ($name:ident, $ty:ty, $method:ident) => {
        pub fn $name(src: &str) -> PResult<$ty> {
            let mut p = Parser::new(src)?;
            let v = p.$method(0)?;
            p.finish(v)
        }
    };
}

entry!(parse_kind, Kind, kind);
entry!(parse_fun, FunType, fun);
entry!(parse_sess, SessType, sess);
entry!(parse_term, Term, term);
entry!(parse_proc, Process, proc);

pub fn parse_file(src: &str) -> PResult<SourceFile> {
    let mut p = Parser::new(src)?;
    p.file()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forwarder() {
        assert_eq!(parse_proc("fwd d c").unwrap(), fwd("d", "c"));
    }

    #[test]
    fn unannotated_lambda_is_rejected() {
        let e = parse_term("\\x. x").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 3 });
        assert!(e.expected.contains("`:`"));
    }

    #[test]
    fn data_dependent_process() {
        let src = "recv z (x). case x { tt => send z <23 : exists y:Nat. 1>. end, \
                   ff => send z <tt : exists y:Bool. 1>. end }";
        let p = parse_proc(src).unwrap();
        let mut bs = Branches::new();
        let nat_ty = FunType::Base(Base::Nat);
        let bool_ty = FunType::Base(Base::Bool);
        bs.insert(
            "tt".to_string(),
            Process::OutTerm {
                on: "z".into(),
                payload: nat(23),
                anno: exists("y", nat_ty, SessType::One),
                body: Box::new(Process::Nil),
            },
        );
        bs.insert(
            "ff".to_string(),
            Process::OutTerm {
                on: "z".into(),
                payload: Term::TT,
                anno: exists("y", bool_ty, SessType::One),
                body: Box::new(Process::Nil),
            },
        );
        let expected = Process::In {
            on: "z".into(),
            bind: "x".into(),
            body: Box::new(Process::Case {
                on: "x".into(),
                branches: bs,
            }),
        };
        assert_eq!(p, expected);
    }

    #[test]
    fn sugar_for_dependent_pairs() {
        let a = parse_sess("Nat /\\ 1").unwrap();
        assert_eq!(a, exists("_", FunType::Base(Base::Nat), SessType::One));
        let b = parse_sess("Bool => +{t: Nat /\\ 1, f: Bool /\\ 1}").unwrap();
        assert!(matches!(b, SessType::Forall(..)));
        // a plain session variable is not mistaken for the sugar
        assert_eq!(
            parse_sess("A -o B").unwrap(),
            SessType::Lolli(
                Box::new(SessType::SVar("A".into())),
                Box::new(SessType::SVar("B".into()))
            )
        );
    }

    #[test]
    fn monad_forms() {
        let t = parse_fun("{ u:!1 ; d:1 |- c:1 }").unwrap();
        match t {
            FunType::Monad(m) => {
                assert_eq!(m.shared.len(), 1);
                assert_eq!(m.linear.len(), 1);
            }
            _ => panic!(),
        }
        let v = parse_term("{ c <- fwd d c <- ; d }").unwrap();
        match v {
            Term::MonadVal(mv) => assert_eq!(mv.linear, vec!["d".to_string()]),
            _ => panic!(),
        }
        let s = parse_proc("x <- f 2; fwd x c").unwrap();
        assert!(matches!(s, Process::Spawn(_)));
    }

    #[test]
    fn errors_are_positioned() {
        let e = parse_proc("recv c (x).\n  send c <tt : Bool /\\ 1> end").unwrap_err();
        assert_eq!(e.pos.line, 2);
        assert!(parse_file("type T :: stype = +{}").is_err());
        assert!(parse_file("def x : Bool = tt def x : Bool = ff").is_err());
    }
}
