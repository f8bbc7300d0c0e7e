mod common;

use std::collections::BTreeMap;

use hycoa::coalgebra::{frame_check, Functor, SearchBounds};
use hycoa::namedmodel::{is_one_pasted, named_model_search, saturate, verify_named_model, ABoxLabel, NamedModelProblem, SearchOutcome};
use hycoa::syntax::{parse, Formula, Nominal, Signature};
use hycoa::Error;
use proptest::prelude::*;

use common::{eval, random_sig_formula, rng};

fn bounded_ops(which: usize) -> (Signature, Vec<(String, usize)>) {
    match which {
        0 => (Signature::hybrid_k(), vec![("dia".into(), 1)]),
        _ => (Signature::graded(1), vec![("<0>".into(), 1), ("<1>".into(), 1)]),
    }
}

fn random_abox(seed: u64, ops: &[(String, usize)]) -> ABoxLabel {
    let mut r = rng(seed);
    let subjects = ["i", "j"];
    let fs = (0..3).map(|x| {
        let body = random_sig_formula(&mut r, ops, &["p", "q"], &subjects, 6, false);
        Formula::at(Nominal::new(subjects[x % 2]), body)
    });
    ABoxLabel::new(fs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn saturation_is_idempotent_and_pasted(seed in any::<u64>(), which in 0usize..2) {
        let (sig, ops) = bounded_ops(which);
        let k = random_abox(seed, &ops);
        let bounds = SearchBounds { max_states: 12, ..SearchBounds::default() };
        let s = match saturate(&k, &sig, &bounds) {
            Ok(s) => s,
            Err(Error::ResourceBound(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(k.iter().all(|f| s.contains(f)));
        let (pasted, missing) = is_one_pasted(&s, &sig).unwrap();
        prop_assert!(pasted, "missing witnesses for {:?}", missing);
        let again = saturate(&s, &sig, &bounds).unwrap();
        prop_assert_eq!(again, s);
    }
}

fn frame_axioms() -> Vec<Vec<Formula>> {
    let k = Signature::hybrid_k();
    let refl = parse("(i' -> dia i')", &k).unwrap();
    let sym = parse("(i' -> box dia i')", &k).unwrap();
    vec![vec![], vec![refl.clone()], vec![sym.clone()], vec![refl, sym]]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn search_results_satisfy_frame_conditions(seed in any::<u64>(), which in 0usize..4) {
        let axioms = frame_axioms().swap_remove(which);
        let mut r = rng(seed);
        let ops = vec![("box".to_string(), 1), ("dia".to_string(), 1)];
        let goal = random_sig_formula(&mut r, &ops, &["p", "q"], &["i", "j"], 8, false);
        let bounds = SearchBounds { max_states: 3, ..SearchBounds::default() };
        let prob = NamedModelProblem::new(Functor::Kripke, axioms.clone(), vec![], vec![goal.clone()], bounds);
        match named_model_search(&prob).unwrap() {
            SearchOutcome::Found(nm) => {
                prop_assert!(frame_check(&nm.model, &axioms).unwrap().is_none());
                prop_assert!(verify_named_model(&nm.model, nm.designated, &prob).passed());
                prop_assert!(nm.model.is_named());
                prop_assert!(eval(&nm.model, &goal, &BTreeMap::new()) >> nm.designated & 1 == 1);
            }
            SearchOutcome::Exhausted => {
                // the same goal must then fail on every small reflexive/symmetric frame; spot check
                // the one-point reflexive frame when it satisfies the axioms
                let mut m = hycoa::coalgebra::HybridModel::with_size(Functor::Kripke, 1);
                m.set_gamma(0, hycoa::coalgebra::TxElem::Set(hycoa::coalgebra::StateSet::singleton(0)));
                m.set_nominal("i", 0);
                m.set_nominal("j", 0);
                for val in 0..4u64 {
                    m.set_prop("p", hycoa::coalgebra::StateSet(val & 1));
                    m.set_prop("q", hycoa::coalgebra::StateSet(val >> 1));
                    prop_assert_eq!(eval(&m, &goal, &BTreeMap::new()), 0);
                }
            }
        }
    }
}
