//! Well-formedness of contexts, kinds and types, with kind synthesis.
//!
//! Synthesis is directed: abstractions synthesize from their annotated
//! domains, applications from their heads, and kind conversion is tried only
//! at argument positions and against explicit annotations.

use crate::equality::{fun_eq, kind_eq, Verdict};
use crate::subst::Substitutable;
use crate::syntax::*;
use crate::typing::{check_term, TypeError, TypeResult};

fn err<T>(rule: &'static str, msg: impl Into<String>) -> TypeResult<T> {
    Err(TypeError::new(rule, msg))
}

/// The base kind a kind classifies into after all its arguments.
pub fn kind_head(k: &Kind) -> &Kind {
    match k {
        Kind::PiTerm(_, _, k) | Kind::PiType(_, _, k) => kind_head(k),
        k => k,
    }
}

pub fn check_ctx(psi: &Psi) -> TypeResult<()> {
    let mut prefix = Psi::new();
    for e in &psi.entries {
        match e {
            PsiEntry::Term(x, t) => {
                check_fun_type(&prefix, t).map_err(|e| e.context(format!("in the type of {x}")))?;
                prefix = prefix.with_term(x, t.clone());
            }
            PsiEntry::Type(t, k) => {
                check_kind(&prefix, k).map_err(|e| e.context(format!("in the kind of {t}")))?;
                prefix = prefix.with_type(t, k.clone());
            }
        }
    }
    Ok(())
}

pub fn check_kind(psi: &Psi, k: &Kind) -> TypeResult<()> {
    match k {
        Kind::Type | Kind::SType => Ok(()),
        Kind::PiTerm(x, t, k) => {
            check_fun_type(psi, t)?;
            check_kind(&psi.with_term(x, (**t).clone()), k)
        }
        Kind::PiType(t, k1, k2) => {
            check_kind(psi, k1)?;
            check_kind(&psi.with_type(t, (**k1).clone()), k2)
        }
    }
}

fn expect_kind(psi: &Psi, found: &Kind, want: &Kind, what: &str) -> TypeResult<()> {
    match kind_eq(psi, found, want) {
        Verdict::Yes => Ok(()),
        Verdict::No => err("kind", format!("{what} has kind {found}, expected {want}")),
        Verdict::Undecided => err(
            "conv-undecided",
            format!("cannot decide whether {found} and {want} are equal ({what})"),
        ),
    }
}

/// `psi |- t :: type`
pub fn check_fun_type(psi: &Psi, t: &FunType) -> TypeResult<()> {
    let k = infer_kind_fun(psi, t)?;
    expect_kind(psi, &k, &Kind::Type, &t.to_string())
}

/// `psi |- a :: stype`
pub fn check_stype(psi: &Psi, a: &SessType) -> TypeResult<()> {
    let k = infer_kind_sess(psi, a)?;
    expect_kind(psi, &k, &Kind::SType, &a.to_string())
}

pub fn infer_kind_fun(psi: &Psi, t: &FunType) -> TypeResult<Kind> {
    use FunType::*;
    match t {
        Base(_) => Ok(Kind::Type),
        TVar(x) => match psi.lookup_type(x) {
            Some(k) if *kind_head(k) == Kind::Type => Ok(k.clone()),
            Some(k) => err(
                "sort",
                format!("{x} has kind {k}, but a functional type is required here"),
            ),
            None if psi.lookup_term(x).is_some() => {
                err("sort", format!("{x} is a term, not a type"))
            }
            None => err("var", format!("unbound type variable {x}")),
        },
        Pi(x, a, b) => {
            check_fun_type(psi, a)?;
            check_fun_type(&psi.with_term(x, (**a).clone()), b)?;
            Ok(Kind::Type)
        }
        LamT(x, a, b) => {
            check_fun_type(psi, a)?;
            let k = infer_kind_fun(&psi.with_term(x, (**a).clone()), b)?;
            Ok(Kind::PiTerm(x.clone(), a.clone(), Box::new(k)))
        }
        AppT(f, m) => match infer_kind_fun(psi, f)? {
            Kind::PiTerm(x, a, k) => {
                check_term(psi, m, &a)?;
                Ok(k.subst_term(&x, m))
            }
            k => err(
                "kind",
                format!("{f} has kind {k} and cannot be applied to a term"),
            ),
        },
        LamK(x, k, b) => {
            check_kind(psi, k)?;
            if *kind_head(k) != Kind::Type {
                return err("sort", format!("{x} ranges over {k}, but a functional type abstraction needs a kind ending in type"));
            }
            let kb = infer_kind_fun(&psi.with_type(x, (**k).clone()), b)?;
            Ok(Kind::PiType(x.clone(), k.clone(), Box::new(kb)))
        }
        AppK(f, s) => match infer_kind_fun(psi, f)? {
            Kind::PiType(x, k1, k2) => {
                let ks = infer_kind_fun(psi, s)?;
                expect_kind(psi, &ks, &k1, &s.to_string())?;
                Ok(k2.subst_fun(&x, s))
            }
            k => err(
                "kind",
                format!("{f} has kind {k} and cannot be applied to a type"),
            ),
        },
        Monad(m) => {
            let mut seen = std::collections::BTreeSet::new();
            for (c, a) in m
                .shared
                .iter()
                .chain(&m.linear)
                .chain([(m.offered.clone(), (*m.offered_ty).clone())].iter())
            {
                if !seen.insert(c) {
                    return err("monad", format!("channel {c} is listed twice"));
                }
                check_stype(psi, a)?;
            }
            Ok(Kind::Type)
        }
    }
}

pub fn infer_kind_sess(psi: &Psi, a: &SessType) -> TypeResult<Kind> {
    use SessType::*;
    let st = Kind::SType;
    match a {
        One => Ok(st),
        Bang(a) => check_stype(psi, a).map(|_| st),
        Lolli(a, b) | Tensor(a, b) => {
            check_stype(psi, a)?;
            check_stype(psi, b)?;
            Ok(st)
        }
        Forall(x, t, b) | Exists(x, t, b) => {
            check_fun_type(psi, t)?;
            check_stype(&psi.with_term(x, (**t).clone()), b)?;
            Ok(st)
        }
        With(bs) | Plus(bs) => {
            if bs.is_empty() {
                return err("choice", "a choice needs at least one label");
            }
            for b in bs.values() {
                check_stype(psi, b)?;
            }
            Ok(st)
        }
        LamTm(x, t, b) => {
            check_fun_type(psi, t)?;
            let k = infer_kind_sess(&psi.with_term(x, (**t).clone()), b)?;
            Ok(Kind::PiTerm(x.clone(), t.clone(), Box::new(k)))
        }
        AppTm(f, m) => match infer_kind_sess(psi, f)? {
            Kind::PiTerm(x, t, k) => {
                check_term(psi, m, &t)?;
                Ok(k.subst_term(&x, m))
            }
            k => err(
                "kind",
                format!("{f} has kind {k} and cannot be applied to a term"),
            ),
        },
        LamTy(x, k, b) => {
            check_kind(psi, k)?;
            if *kind_head(k) != Kind::SType {
                return err("sort", format!("{x} ranges over {k}, but a session type abstraction needs a kind ending in stype"));
            }
            let kb = infer_kind_sess(&psi.with_type(x, (**k).clone()), b)?;
            Ok(Kind::PiType(x.clone(), k.clone(), Box::new(kb)))
        }
        AppTy(f, s) => match infer_kind_sess(psi, f)? {
            Kind::PiType(x, k1, k2) => {
                let ks = infer_kind_sess(psi, s)?;
                expect_kind(psi, &ks, &k1, &s.to_string())?;
                Ok(k2.subst_sess(&x, s))
            }
            k => err(
                "kind",
                format!("{f} has kind {k} and cannot be applied to a type"),
            ),
        },
        SVar(x) => match psi.lookup_type(x) {
            Some(k) if *kind_head(k) == Kind::SType => Ok(k.clone()),
            Some(k) => err(
                "sort",
                format!("{x} has kind {k}, but a session type is required here"),
            ),
            None if psi.lookup_term(x).is_some() => {
                err("sort", format!("{x} is a term, not a type"))
            }
            None => err("var", format!("unbound type variable {x}")),
        },
        IfS(m, a, b) => {
            check_term(psi, m, &FunType::Base(Base::Bool))?;
            check_stype(psi, a)?;
            check_stype(psi, b)?;
            Ok(st)
        }
        NatRecS {
            target,
            zero,
            pred,
            rec,
            succ,
        } => {
            check_term(psi, target, &FunType::Base(Base::Nat))?;
            check_stype(psi, zero)?;
            let inner = psi
                .with_term(pred, FunType::Base(Base::Nat))
                .with_type(rec, Kind::SType);
            check_stype(&inner, succ)?;
            Ok(st)
        }
    }
}

/// Checks a type against a declared kind.
pub fn check_fun_kind(psi: &Psi, t: &FunType, k: &Kind) -> TypeResult<()> {
    let found = infer_kind_fun(psi, t)?;
    expect_kind(psi, &found, k, &t.to_string())
}

pub fn check_sess_kind(psi: &Psi, a: &SessType, k: &Kind) -> TypeResult<()> {
    let found = infer_kind_sess(psi, a)?;
    expect_kind(psi, &found, k, &a.to_string())
}

/// Domain equality for lambda-bound variables, used by term checking.
pub fn same_fun(psi: &Psi, a: &FunType, b: &FunType, rule: &'static str) -> TypeResult<()> {
    match fun_eq(psi, a, b) {
        Verdict::Yes => Ok(()),
        Verdict::No => err(rule, format!("expected {b}, found {a}")),
        Verdict::Undecided => err(
            "conv-undecided",
            format!("cannot decide whether {a} and {b} are equal"),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_fun, parse_kind, parse_sess};

    fn bool_ty() -> FunType {
        FunType::Base(Base::Bool)
    }

    #[test]
    fn contexts() {
        assert!(check_ctx(&Psi::new()).is_ok());
        let ok = Psi::new()
            .with_term("x", FunType::Base(Base::Nat))
            .with_type("t", parse_kind("pi y:Nat. stype").unwrap());
        assert!(check_ctx(&ok).is_ok());
        // a session type where a functional one is required
        let bad = Psi::new()
            .with_term("x", bool_ty())
            .with_term("y", FunType::TVar("s".into()));
        assert!(check_ctx(&bad).is_err());
    }

    #[test]
    fn functional_kinds() {
        let psi = Psi::new();
        assert_eq!(
            infer_kind_fun(&psi, &parse_fun("{ |- c:1 }").unwrap()).unwrap(),
            Kind::Type
        );
        assert_eq!(
            infer_kind_fun(&psi, &parse_fun("pi x:Bool. { |- c:1 }").unwrap()).unwrap(),
            Kind::Type
        );
        let cd = "(\\x:Nat. natrecS x 1 (n, r => exists y:Nat. r))";
        let fam = parse_fun(&format!("\\x:Nat. {{ |- c: {cd} [x] }}")).unwrap();
        let k = infer_kind_fun(&psi, &fam).unwrap();
        assert_eq!(
            kind_eq(&psi, &k, &parse_kind("pi x:Nat. type").unwrap()),
            Verdict::Yes
        );
    }

    #[test]
    fn session_kinds() {
        let psi = Psi::new();
        assert_eq!(infer_kind_sess(&psi, &SessType::One).unwrap(), Kind::SType);
        let t2 = parse_sess("forall x:Bool. ifS x (Nat /\\ 1) (Bool /\\ 1)").unwrap();
        assert_eq!(infer_kind_sess(&psi, &t2).unwrap(), Kind::SType);
        let cd = parse_sess("\\x:Nat. natrecS x 1 (n, r => exists y:Nat. r)").unwrap();
        let k = infer_kind_sess(&psi, &cd).unwrap();
        assert_eq!(
            kind_eq(&psi, &k, &parse_kind("pi x:Nat. stype").unwrap()),
            Verdict::Yes
        );
        assert!(infer_kind_sess(&psi, &parse_sess("ifS 3 1 1").unwrap()).is_err());
    }
}
