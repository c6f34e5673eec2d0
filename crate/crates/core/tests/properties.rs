use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use procalc::equivalence::{check_correspondence, replay_witness, strong_bisim, LabelMap};
use procalc::generate::{nary_sync, random_ccs, random_cspmn, random_cspmn_default, CcsShape};
use procalc::io::{parse_ccs, parse_cspmn, print_ccs, print_csp};
use procalc::mn2csp::{explicit_arity, mn2csp};
use procalc::semantics::{build_lts, ccs_step, cspmn_step, Ccs, CspMn, ExplorationBudget};
use procalc::syntax::{CcsProc, CspProc, Interface, Label, Multiplicity, Name, Term};
use procalc::translate::{c2ccstau, ccs2csp3, ccs2csp_legacy, conm_rename, g2, gstar2g2, tl3};

fn names() -> Vec<String> {
    vec!["a".into(), "b".into()]
}

fn ccs_term(seed: u64) -> CcsProc {
    random_ccs(&mut StdRng::seed_from_u64(seed), &CcsShape::default())
}

fn cspmn_term(seed: u64) -> CspProc {
    random_cspmn(&mut StdRng::seed_from_u64(seed), &names(), 4, 3)
}

fn base_name() -> impl Strategy<Value = Name> {
    "[a-z][a-z0-9]{0,4}".prop_filter_map("reserved", |s| Name::new(s).ok())
}

fn complementable() -> impl Strategy<Value = Label> {
    (base_name(), 0..5usize, prop::collection::btree_set(1..9u32, 1..4)).prop_map(|(n, kind, idx)| {
        let idx: Vec<u32> = idx.into_iter().collect();
        match kind {
            0 => Label::Name(n),
            1 => Label::CoName(n),
            2 => Label::SyncName(n),
            3 => Label::indexed(n, idx).unwrap(),
            _ => Label::co_indexed(n, idx).unwrap(),
        }
    })
}

fn budget() -> ExplorationBudget {
    ExplorationBudget::new(2000, 64)
}

fn canon_steps(steps: Vec<(Label, CcsProc)>) -> BTreeSet<(Label, CcsProc)> {
    steps.into_iter().map(|(l, p)| (l, p.canonicalise())).collect()
}

fn canon_csp_steps(steps: Vec<(Label, CspProc)>) -> BTreeSet<(Label, CspProc)> {
    steps.into_iter().map(|(l, p)| (l, p.canonicalise())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn complement_is_an_involution(l in complementable()) {
        let co = l.complement().unwrap();
        prop_assert_ne!(&co, &l);
        prop_assert_eq!(co.complement().unwrap(), l);
    }

    #[test]
    fn canonicalise_is_idempotent(seed in any::<u64>()) {
        let p = ccs_term(seed).canonicalise();
        prop_assert_eq!(p.canonicalise(), p);
        let q = cspmn_term(seed).canonicalise();
        prop_assert_eq!(q.canonicalise(), q);
    }

    #[test]
    fn canonical_form_keeps_transitions(seed in any::<u64>()) {
        let p = ccs_term(seed);
        prop_assert_eq!(canon_steps(ccs_step(&p)), canon_steps(ccs_step(&p.canonicalise())));
        let q = cspmn_term(seed);
        let (a, b) = (cspmn_step(&q, false).unwrap(), cspmn_step(&q.canonicalise(), false).unwrap());
        prop_assert_eq!(canon_csp_steps(a), canon_csp_steps(b));
    }

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        let p = ccs_term(seed);
        prop_assert_eq!(parse_ccs(&print_ccs(&p)).unwrap().canonicalise(), p.canonicalise());
        let q = cspmn_term(seed);
        prop_assert_eq!(parse_cspmn(&print_csp(&q)).unwrap().canonicalise(), q.canonicalise());
    }

    #[test]
    fn sort_distributes_over_parallel(a in any::<u64>(), b in any::<u64>()) {
        let (p, q) = (ccs_term(a), ccs_term(b));
        let both: BTreeSet<Label> = p.sort().union(&q.sort()).cloned().collect();
        prop_assert_eq!(CcsProc::par(p.clone(), q.clone()).sort(), both);
        let (p, q) = (cspmn_term(a), cspmn_term(b));
        let joint = CspProc::par(p.clone(), q.clone(), Default::default());
        let both: BTreeSet<Label> = p.alphabet().union(&q.alphabet()).cloned().collect();
        prop_assert_eq!(joint.alphabet(), both);
    }

    #[test]
    fn steps_are_deterministic(seed in any::<u64>()) {
        let p = ccs_term(seed);
        prop_assert_eq!(ccs_step(&p), ccs_step(&p));
        let q = cspmn_term(seed);
        prop_assert_eq!(cspmn_step(&q, false).unwrap(), cspmn_step(&q, false).unwrap());
    }

    #[test]
    fn hiding_turns_hidden_labels_into_tau(seed in any::<u64>()) {
        let p = cspmn_term(seed);
        let hidden = BTreeSet::from([Label::name("a")]);
        let wrapped = CspProc::Hide(Box::new(p.clone()), hidden.clone());
        let mut expect = BTreeSet::new();
        for (l, p2) in cspmn_step(&p, false).unwrap() {
            let l = if hidden.contains(&l) { Label::Tau } else { l };
            expect.insert((l, CspProc::Hide(Box::new(p2), hidden.clone()).canonicalise()));
        }
        prop_assert_eq!(canon_csp_steps(cspmn_step(&wrapped, false).unwrap()), expect);
    }

    #[test]
    fn full_multiplicity_coincides_with_default(seed in any::<u64>()) {
        let p = random_cspmn_default(&mut StdRng::seed_from_u64(seed), &names(), 4, 3);
        let lts = build_lts(&p, &CspMn::default(), budget()).unwrap();
        for s in &lts.states {
            let plain = canon_csp_steps(cspmn_step(s, false).unwrap());
            let lifted: BTreeSet<_> = plain.iter().map(|(l, q)| (l.clone(), explicit_arity(q).canonicalise())).collect();
            prop_assert_eq!(canon_csp_steps(cspmn_step(&explicit_arity(s), false).unwrap()), lifted);
        }
    }

    #[test]
    fn pairwise_sync_moves_exactly_two(n in 3..5usize) {
        let p = nary_sync(n, 2);
        for (l, q) in cspmn_step(&p, false).unwrap() {
            prop_assert_eq!(l, Label::name("a"));
            prop_assert_eq!(print_csp(&q).matches("a ->").count(), n - 2);
        }
    }

    #[test]
    fn count_matches_binomial(n in 2..6usize, m in 2..6u32) {
        prop_assume!(m as usize <= n);
        let binom = |n: usize, k: usize| (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
        prop_assert_eq!(cspmn_step(&nary_sync(n, m), false).unwrap().len(), binom(n, m as usize));
        let names: BTreeSet<Label> = mn2csp(&nary_sync(n, m)).unwrap().alphabet();
        prop_assert_eq!(names.len(), binom(n, m as usize));
        if m as usize == n {
            prop_assert_eq!(names.len(), 1);
        }
    }

    #[test]
    fn elaboration_corresponds(seed in any::<u64>()) {
        let p = cspmn_term(seed);
        let q = mn2csp(&p).unwrap();
        prop_assert!(interfaces(&q).iter().all(|i| i.is_plain()));
        let (l1, l2) = (build_lts(&p, &CspMn::default(), budget()).unwrap(), build_lts(&q, &CspMn::default(), budget()).unwrap());
        prop_assume!(l1.complete && l2.complete);
        let r = strong_bisim(&l1, &l2, &LabelMap::EraseIndices).unwrap();
        prop_assert!(r.verdict, "{} vs {}: {:?}", p, q, r.counterexample);
        let replay = replay_witness((&CspMn::default(), &l1), (&CspMn::default(), &l2), &LabelMap::EraseIndices, &r.witness).unwrap();
        prop_assert!(replay.is_empty());
        prop_assert!(check_correspondence(&l1, &l2, &LabelMap::EraseIndices).unwrap().pass);
    }

    #[test]
    fn elaboration_is_stable_after_erasure(seed in any::<u64>()) {
        let p = random_cspmn(&mut StdRng::seed_from_u64(seed), &names(), 3, 2);
        let once = mn2csp(&p).unwrap();
        let erased = erase(&once).canonicalise();
        let twice = mn2csp(&erased).unwrap();
        prop_assert_eq!(erase(&twice).canonicalise(), erased.canonicalise(), "{}", p);
    }

    #[test]
    fn bisimilarity_is_an_equivalence(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let lts = |s| build_lts(&ccs_term(s), &Ccs, budget()).unwrap();
        let (la, lb, lc) = (lts(a), lts(b), lts(c));
        prop_assume!(la.complete && lb.complete && lc.complete);
        let id = LabelMap::Identity;
        prop_assert!(strong_bisim(&la, &la, &id).unwrap().verdict);
        let ab = strong_bisim(&la, &lb, &id).unwrap().verdict;
        prop_assert_eq!(ab, strong_bisim(&lb, &la, &id).unwrap().verdict);
        if ab && strong_bisim(&lb, &lc, &id).unwrap().verdict {
            prop_assert!(strong_bisim(&la, &lc, &id).unwrap().verdict);
        }
    }

    #[test]
    fn transitivity_on_bisimilar_variants(seed in any::<u64>()) {
        let p = ccs_term(seed);
        let twice = CcsProc::sum(p.clone(), p.clone());
        let thrice = CcsProc::sum(twice.clone(), p.clone());
        let lts = |q: &CcsProc| build_lts(q, &Ccs, budget()).unwrap();
        let (l1, l2, l3) = (lts(&p), lts(&twice), lts(&thrice));
        prop_assume!(l1.complete && l2.complete && l3.complete);
        let id = LabelMap::Identity;
        prop_assert!(strong_bisim(&l1, &l2, &id).unwrap().verdict);
        prop_assert!(strong_bisim(&l2, &l3, &id).unwrap().verdict);
        prop_assert!(strong_bisim(&l1, &l3, &id).unwrap().verdict);
    }

    #[test]
    fn witnesses_replay(a in any::<u64>(), b in any::<u64>()) {
        let lts = |s| build_lts(&ccs_term(s), &Ccs, budget()).unwrap();
        let (la, lb) = (lts(a), lts(b));
        prop_assume!(la.complete && lb.complete);
        for (x, y) in [(&la, &la), (&la, &lb)] {
            let r = strong_bisim(x, y, &LabelMap::Identity).unwrap();
            if r.verdict {
                prop_assert!(replay_witness((&Ccs, x), (&Ccs, y), &LabelMap::Identity, &r.witness).unwrap().is_empty());
            } else {
                prop_assert!(!r.counterexample.is_empty());
            }
        }
    }

    #[test]
    fn correspondence_agrees_with_bisimulation(a in any::<u64>(), b in any::<u64>()) {
        let lts = |s| build_lts(&ccs_term(s), &Ccs, budget()).unwrap();
        let (la, lb) = (lts(a), lts(b));
        prop_assume!(la.complete && lb.complete);
        let bisim = strong_bisim(&la, &lb, &LabelMap::Identity).unwrap().verdict;
        prop_assert_eq!(check_correspondence(&la, &lb, &LabelMap::Identity).unwrap().pass, bisim);
    }

    #[test]
    fn translation_keeps_one_sync_name_per_base(seed in any::<u64>()) {
        let p = ccs_term(seed);
        let out = ccs2csp3(&p).unwrap();
        let bases: Vec<_> = out.alphabet().into_iter().filter(|l| matches!(l, Label::SyncName(_))).collect();
        let distinct: BTreeSet<_> = bases.iter().map(|l| l.base().cloned()).collect();
        prop_assert_eq!(bases.len(), distinct.len());
        let renamed = conm_rename(&g2(&c2ccstau(&p)));
        let shown = format!("{:?}", renamed);
        prop_assert!(!shown.contains("CoSyncName"));
        let t = tl3(&renamed).unwrap();
        prop_assert!(interfaces(&t).iter().all(|i| i.iter().all(|(_, m)| *m == Multiplicity::Explicit(2))));
    }

    #[test]
    fn translation_is_correct(seed in any::<u64>()) {
        let p = ccs_term(seed);
        let l1 = build_lts(&p, &Ccs, budget()).unwrap();
        prop_assume!(l1.complete);
        let l2 = build_lts(&ccs2csp3(&p).unwrap(), &CspMn::default(), budget()).unwrap();
        prop_assume!(l2.complete);
        let r = strong_bisim(&l1, &l2, &LabelMap::Identity).unwrap();
        prop_assert!(r.verdict, "{}: {:?}", p, r.counterexample);
    }

    #[test]
    fn bridge_agrees_with_direct_translation(seed in any::<u64>()) {
        let p = ccs_term(seed);
        prop_assume!(!p.has_parallel_under_rec());
        let legacy = gstar2g2(&ccs2csp_legacy(&p).unwrap()).unwrap();
        prop_assert_eq!(print_csp(&legacy.canonicalise()), print_csp(&ccs2csp3(&p).unwrap().canonicalise()), "{}", p);
    }
}

fn erase(p: &CspProc) -> CspProc {
    fn go(p: &CspProc) -> CspProc {
        match p {
            CspProc::Prefix(l, q) => CspProc::prefix(l.erase_indices(), go(q)),
            CspProc::Par(a, b, i) => CspProc::par(go(a), go(b), Interface::plain(i.events().map(Label::erase_indices))),
            CspProc::ExtChoice(a, b) => CspProc::ext(go(a), go(b)),
            CspProc::IntChoice(a, b) => CspProc::int(go(a), go(b)),
            CspProc::Hide(q, s) => CspProc::hide(go(q), s.iter().map(Label::erase_indices)),
            CspProc::Restrict(q, s) => CspProc::restrict(go(q), s.iter().map(Label::erase_indices)),
            CspProc::Rec(x, q) => CspProc::rec(x.clone(), go(q)),
            other => other.clone(),
        }
    }
    go(p)
}

fn interfaces(p: &CspProc) -> Vec<Interface> {
    let found = std::cell::RefCell::new(Vec::new());
    p.map_interfaces(&|i| {
        found.borrow_mut().push(i.clone());
        i.clone()
    });
    found.into_inner()
}
