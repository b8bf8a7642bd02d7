use proptest::prelude::*;

use sdpi::alpha::{alpha_eq_proc, alpha_eq_sess, alpha_eq_term, freshen_proc, struct_cong};
use sdpi::dynamics::run;
use sdpi::meta::gen::Gen;
use sdpi::subst::Substitutable;
use sdpi::surface::{parse_proc, parse_sess, parse_term, Pretty};
use sdpi::syntax::*;
use sdpi::typing::{check_closed, check_term};

fn bool_ty() -> FunType {
    FunType::Base(Base::Bool)
}

/// A closed, checked process offering `c`, from a seed.
fn closed(seed: u64) -> Option<(Process, SessType)> {
    let mut g = Gen::new(seed, false);
    let a = g.sess(3);
    let p = g.proc(&Psi::new(), &"c".into(), &a, 3)?;
    let p = check_closed(&TriCtx::default(), &p, &"c".into(), &a).ok()?;
    Some((p, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printed_syntax_reads_back(seed in any::<u64>(), fragment in any::<bool>()) {
        let mut g = Gen::new(seed, fragment);
        let a = g.sess(3);
        prop_assert!(alpha_eq_sess(&a, &parse_sess(&a.pretty()).unwrap()));
        let t = g.fun_type(2);
        if let Some(m) = g.term(&Psi::new(), &t, 3) {
            prop_assert!(alpha_eq_term(&m, &parse_term(&m.pretty()).unwrap()), "{}", m);
        }
        if let Some(p) = g.proc(&Psi::new(), &"c".into(), &a, 3) {
            prop_assert!(alpha_eq_proc(&p, &parse_proc(&p.pretty()).unwrap()), "{}", p);
        }
    }

    #[test]
    fn substituting_an_absent_variable_changes_nothing(seed in any::<u64>()) {
        let mut g = Gen::new(seed, false);
        let t = g.fun_type(2);
        if let Some(m) = g.term(&Psi::new(), &t, 3) {
            prop_assert!(alpha_eq_term(&m.subst_term("absent", &Term::TT), &m));
        }
    }

    #[test]
    fn substitution_replaces_free_occurrences_only(seed in any::<u64>()) {
        let mut g = Gen::new(seed, false);
        let psi = Psi::new().with_term("x", bool_ty());
        if let Some(m) = g.term(&psi, &bool_ty(), 3) {
            let n = m.subst_term("x", &var("q"));
            prop_assert!(!n.free_names().contains("x"));
            let mut want = m.free_names();
            if want.remove("x") {
                want.insert("q".into());
            }
            prop_assert_eq!(n.free_names(), want);
            // and renaming back restores the term
            prop_assert!(alpha_eq_term(&n.rename("q", "x"), &m));
        }
    }

    #[test]
    fn substitution_preserves_typing(seed in any::<u64>(), b in any::<bool>()) {
        let mut g = Gen::new(seed, false);
        let psi = Psi::new().with_term("x", bool_ty());
        let t = g.fun_type(1);
        if let Some(m) = g.term(&psi, &t, 3) {
            prop_assume!(check_term(&psi, &m, &t).is_ok());
            let v = if b { Term::TT } else { Term::FF };
            prop_assert!(check_term(&Psi::new(), &m.subst_term("x", &v), &t).is_ok());
        }
    }

    #[test]
    fn congruence_ignores_bound_names_and_order(seed in any::<u64>()) {
        if let Some((p, _)) = closed(seed) {
            prop_assert!(struct_cong(&p, &p));
            prop_assert!(struct_cong(&p, &freshen_proc(&p)));
            let swapped = Process::New {
                bind: "k".into(),
                anno: Some(SessType::One),
                left: Box::new(Process::Nil),
                right: Box::new(p.clone()),
            };
            prop_assert!(struct_cong(&p, &swapped));
        }
    }

    #[test]
    fn runs_are_reproducible(seed in any::<u64>(), sched in 0u64..1000) {
        if let Some((p, _)) = closed(seed) {
            let a = run(&p, &"c".into(), sched, 500);
            let b = run(&p, &"c".into(), sched, 500);
            prop_assert_eq!(
                serde_json::to_string(&a.trace).unwrap(),
                serde_json::to_string(&b.trace).unwrap()
            );
            prop_assert!(alpha_eq_proc(&a.final_process(), &b.final_process()));
        }
    }
}

#[test]
fn shadowing_is_respected_when_reading_back() {
    let m = parse_term("\\x:Bool. \\x:Bool. x").unwrap();
    let n = parse_term(&m.pretty()).unwrap();
    assert!(alpha_eq_term(&m, &n));
    assert!(!alpha_eq_term(
        &n,
        &parse_term("\\x:Bool. \\y:Bool. x").unwrap()
    ));
}
