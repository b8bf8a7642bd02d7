//! Concrete syntax: lexer, parser, printer and the source-file format.

pub mod file;
pub mod lexer;
pub mod parser;
pub mod printer;

use crate::syntax::{FunType, Kind, MonadType, Name, Process, SessType, Term};
pub use lexer::Pos;
pub use parser::{
    parse_file, parse_fun, parse_kind, parse_proc, parse_sess, parse_term, ParseError,
};
pub use printer::Pretty;

#[derive(Clone, Debug, PartialEq)]
pub enum TypeBody {
    Fun(FunType),
    Sess(SessType),
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeclBody {
    Type {
        kind: Kind,
        body: TypeBody,
    },
    Term {
        ty: FunType,
        term: Term,
    },
    /// A named process, usable as a monadic value of the declared type.
    Proc {
        ty: MonadType,
        body: Process,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decl {
    pub name: Name,
    pub pos: Pos,
    pub body: DeclBody,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SourceFile {
    pub decls: Vec<Decl>,
}

impl SourceFile {
    pub fn get(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|d| d.name == name)
    }
}

/// Words that can never be used as names.
pub const RESERVED: &[&str] = &[
    "type", "stype", "pi", "forall", "exists", "ifS", "natrecS", "ifT", "natrecT", "tt", "ff",
    "succ", "out", "nu", "recv", "send", "serve", "copy", "case", "fwd", "end", "def", "proc",
    "Bool", "Nat",
];

pub fn is_reserved(w: &str) -> bool {
    RESERVED.contains(&w)
}
