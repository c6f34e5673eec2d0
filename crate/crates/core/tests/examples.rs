use std::collections::{BTreeMap, BTreeSet};

use procalc::io::{export_cspm, parse_ccs, parse_cspmn, print_ccs};
use procalc::mn2csp::{gsharp_event, mn2csp};
use procalc::semantics::{build_lts, ccs_step, Ccs, CspMn, ExplorationBudget};
use procalc::syntax::{CcsProc, CspProc, Label, Name, Term};

fn labels(xs: &[&str]) -> BTreeSet<Label> {
    xs.iter().map(|s| procalc::io::parse_event(s).unwrap()).collect()
}

fn idx(i: &[u32]) -> Label {
    Label::indexed(Name::new("a").unwrap(), i.to_vec()).unwrap()
}

#[test]
fn sort_of_recursive_spawner_is_a_fixpoint_of_unfolding() {
    let p = parse_ccs("rec X. (a.0 | 'a.X)").unwrap();
    let mut unfolded = p.clone();
    for _ in 0..3 {
        unfolded = match unfolded {
            CcsProc::Rec(..) => unfolded.unfold(),
            other => other.substitute("X", &p),
        };
    }
    assert_eq!(p.sort(), unfolded.sort());
    assert_eq!(p.sort(), BTreeSet::from([Label::name("a"), Label::coname("a")]));
    assert!(parse_ccs("0").unwrap().sort().is_empty());
}

#[test]
fn alphabet_of_renaming_matches_lts_labels() {
    let mut map = BTreeMap::new();
    map.insert(Label::name("a"), BTreeSet::from([idx(&[1, 2]), idx(&[1, 3])]));
    let p = CspProc::rename(CspProc::prefix(Label::name("a"), CspProc::Stop), map);
    let lts = build_lts(&p, &CspMn::default(), ExplorationBudget::default()).unwrap();
    let seen: BTreeSet<Label> = lts.transitions.iter().map(|t| t.label.clone()).collect();
    assert_eq!(p.alphabet(), seen);
    assert_eq!(seen, BTreeSet::from([idx(&[1, 2]), idx(&[1, 3])]));
    let hidden = parse_cspmn("(a_S -> STOP) \\ {a_S}").unwrap();
    assert!(hidden.alphabet().is_empty());
    assert_eq!(parse_cspmn("a -> STOP [] a_S -> STOP").unwrap().alphabet(), labels(&["a", "a_S"]));
}

#[test]
fn canonical_forms() {
    let c = |s: &str| parse_ccs(s).unwrap().canonicalise();
    assert_eq!(c("a.0 + b.0"), c("b.0 + a.0"));
    assert_eq!(c("rec X. a.X"), c("rec Y. a.Y"));
    assert_ne!(c("a.0"), c("a.0 + 0"));
}

#[test]
fn parsing_examples() {
    let p = parse_ccs("a.0 | 'a.0").unwrap();
    let expect = CcsProc::par(
        CcsProc::prefix(Label::name("a"), CcsProc::Nil),
        CcsProc::prefix(Label::coname("a"), CcsProc::Nil),
    );
    assert_eq!(p, expect);
    assert_eq!(print_ccs(&expect), "a.0 | 'a.0");
    assert!(matches!(parse_ccs("rec X. (a.0 | 'a.X)").unwrap(), CcsProc::Rec(..)));
    assert!(parse_cspmn("a -> STOP [| {a#1} |] a -> STOP").is_err());
}

#[test]
fn handshake_lts_is_a_diamond_with_a_chord() {
    let lts = build_lts(&parse_ccs("a.0 | 'a.0").unwrap(), &Ccs, ExplorationBudget::default()).unwrap();
    assert_eq!(lts.state_count(), 4);
    let from_initial: BTreeSet<String> = lts.successors(lts.initial).map(|t| t.label.to_string()).collect();
    assert_eq!(from_initial, BTreeSet::from(["a".to_string(), "'a".to_string(), "τ".to_string()]));
    assert_eq!(lts.transitions.len(), 5);
}

#[test]
fn restricted_handshake_only_synchronises() {
    let steps = ccs_step(&parse_ccs("(a.0 |_T 'a.0) \\ {a}").unwrap());
    assert_eq!(steps.len(), 1);
    assert_eq!(steps[0].0.to_string(), "tau[a|'a]");
}

#[test]
fn spawner_outgrows_any_small_budget() {
    let p = parse_ccs("rec X. (a.0 | 'a.X)").unwrap();
    for bound in [10, 50, 200] {
        let lts = build_lts(&p, &Ccs, ExplorationBudget::new(bound, 1000)).unwrap();
        assert!(!lts.complete);
        assert_eq!(lts.state_count(), bound);
    }
}

#[test]
fn gsharp_event_examples() {
    let ctx2: BTreeMap<Label, u32> = (1..=3).map(|i| (idx(&[i]), 2)).collect();
    let env = BTreeSet::from([idx(&[2]), idx(&[3])]);
    assert_eq!(gsharp_event(&ctx2, &env, &idx(&[1])), BTreeSet::from([idx(&[1, 2]), idx(&[1, 3])]));
    let ctx3: BTreeMap<Label, u32> = (1..=4).map(|i| (idx(&[i]), 3)).collect();
    let env = BTreeSet::from([idx(&[2]), idx(&[3]), idx(&[4])]);
    assert_eq!(
        gsharp_event(&ctx3, &env, &idx(&[1])),
        BTreeSet::from([idx(&[1, 2, 3]), idx(&[1, 2, 4]), idx(&[1, 3, 4])])
    );
    assert_eq!(gsharp_event(&BTreeMap::new(), &env, &idx(&[1])), BTreeSet::from([idx(&[1])]));
}

#[test]
fn three_way_mapping_by_hand() {
    let p = parse_cspmn("a -> STOP [| {a#2} |] a -> STOP [| {a#2} |] a -> STOP").unwrap();
    let by_hand = "(a_{1,2} -> STOP [] a_{1,3} -> STOP [| {a_{1,2}} |] a_{1,2} -> STOP [] a_{2,3} -> STOP) \
                   [| {a_{1,3}, a_{2,3}} |] a_{1,3} -> STOP [] a_{2,3} -> STOP";
    assert_eq!(mn2csp(&p).unwrap().canonicalise(), parse_cspmn(by_hand).unwrap().canonicalise());
    let four = parse_cspmn("a -> STOP [| {a#4} |] a -> STOP [| {a#4} |] a -> STOP [| {a#4} |] a -> STOP").unwrap();
    assert_eq!(mn2csp(&four).unwrap().alphabet(), BTreeSet::from([idx(&[1, 2, 3, 4])]));
    let out = export_cspm(&mn2csp(&p).unwrap()).unwrap();
    assert!(out.starts_with("channel a_1_2, a_1_3, a_2_3\n"));
}

#[test]
fn ix_hides_indexed_names() {
    let p = parse_cspmn("(a -> STOP) \\ {a}").unwrap();
    let got = procalc::mn2csp::ix_csp(&p, &mut procalc::mn2csp::IndexScheme::new()).unwrap();
    assert_eq!(got, parse_cspmn("(a_{1} -> STOP) \\ {a_{1}}").unwrap());
}
