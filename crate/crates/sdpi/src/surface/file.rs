//! Definitions are transparent: every reference to an earlier declaration is
//! replaced by its (already expanded) body before checking.

use std::collections::BTreeSet;

use super::{Decl, DeclBody, SourceFile, TypeBody};
use crate::subst::{Replacement, Subst, Substitutable};
use crate::syntax::*;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleError {
    pub decl: Name,
    pub pos: super::Pos,
    pub refers_to: Name,
}

/// The monadic value a process declaration stands for, ascribed with its
/// declared type so that it can be used wherever a term is expected.
pub fn proc_as_term(ty: &MonadType, body: &Process) -> Term {
    let value = Term::MonadVal(Box::new(MonadVal {
        offered: ty.offered.clone(),
        body: body.clone(),
        shared: ty.shared.iter().map(|(n, _)| n.clone()).collect(),
        linear: ty.linear.iter().map(|(n, _)| n.clone()).collect(),
    }));
    app(lam("_asc", FunType::Monad(ty.clone()), var("_asc")), value)
}

fn replacement(d: &Decl) -> Replacement {
    match &d.body {
        DeclBody::Type {
            body: TypeBody::Sess(a),
            ..
        } => Replacement::Sess(a.clone()),
        DeclBody::Type {
            body: TypeBody::Fun(t),
            ..
        } => Replacement::Fun(t.clone()),
        DeclBody::Term { term, .. } => Replacement::Term(term.clone()),
        DeclBody::Proc { ty, body } => Replacement::Term(proc_as_term(ty, body)),
    }
}

fn free_in(d: &Decl) -> BTreeSet<Name> {
    match &d.body {
        DeclBody::Type { kind, body } => {
            let mut s = kind.free_names();
            match body {
                TypeBody::Sess(a) => s.extend(a.free_names()),
                TypeBody::Fun(t) => s.extend(t.free_names()),
            }
            s
        }
        DeclBody::Term { ty, term } => {
            let mut s = ty.free_names();
            s.extend(term.free_names());
            s
        }
        DeclBody::Proc { ty, body } => {
            let t = FunType::Monad(ty.clone());
            let mut s = t.free_names();
            let mut inner = body.free_names();
            for (n, _) in ty.shared.iter().chain(ty.linear.iter()) {
                inner.remove(n);
            }
            inner.remove(&ty.offered);
            s.extend(inner);
            s
        }
    }
}

fn apply(d: &Decl, s: &Subst) -> Decl {
    let body = match &d.body {
        DeclBody::Type { kind, body } => DeclBody::Type {
            kind: kind.subst(s),
            body: match body {
                TypeBody::Sess(a) => TypeBody::Sess(a.subst(s)),
                TypeBody::Fun(t) => TypeBody::Fun(t.subst(s)),
            },
        },
        DeclBody::Term { ty, term } => DeclBody::Term {
            ty: ty.subst(s),
            term: term.subst(s),
        },
        DeclBody::Proc { ty, body } => {
            let t = match FunType::Monad(ty.clone()).subst(s) {
                FunType::Monad(m) => m,
                _ => unreachable!(),
            };
            DeclBody::Proc {
                ty: t,
                body: body.subst(s),
            }
        }
    };
    Decl {
        name: d.name.clone(),
        pos: d.pos,
        body,
    }
}

/// Expands every declaration; a reference to the declaration itself or to a
/// later one is a cycle.
pub fn expand(file: &SourceFile) -> Result<Vec<Decl>, CycleError> {
    let mut done: Vec<Decl> = Vec::new();
    for (i, d) in file.decls.iter().enumerate() {
        let free = free_in(d);
        if let Some(later) = file.decls[i..].iter().find(|e| free.contains(&e.name)) {
            return Err(CycleError {
                decl: d.name.clone(),
                pos: d.pos,
                refers_to: later.name.clone(),
            });
        }
        let mut e = d.clone();
        for prev in &done {
            if free.contains(&prev.name) {
                e = apply(&e, &Subst::new(&prev.name, replacement(prev)));
            }
        }
        done.push(e);
    }
    Ok(done)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_file;

    #[test]
    fn earlier_definitions_are_inlined() {
        let f = parse_file("type A :: stype = Nat /\\ 1\n def f : Nat = 2\n proc p { |- c:A } = send c <f : A>. end").unwrap();
        let ds = expand(&f).unwrap();
        match &ds[2].body {
            DeclBody::Proc { ty, body } => {
                assert!(matches!(*ty.offered_ty, SessType::Exists(..)));
                assert!(!body.free_names().contains("f"));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn forward_references_are_cycles() {
        let f = parse_file("def f : Nat = g\n def g : Nat = 2").unwrap();
        let e = expand(&f).unwrap_err();
        assert_eq!(e.refers_to, "g");
        let f = parse_file("def f : Nat = succ f").unwrap();
        assert!(expand(&f).is_err());
    }
}
