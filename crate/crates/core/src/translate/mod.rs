//! CCS to CSPmn translation: `c2ccstau`, `g2`, `conm`, `tl3` and their
//! compositions, plus the older index-based pipeline and the bridge that
//! renames its output into the sync-name form.

mod legacy;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{CcsProc, CspProc, Interface, Label, Multiplicity};

pub use legacy::{ai2a, ccs2csp_legacy, conm_indexed, gstar2g2, gstar_proc, ix, tl};

/// The environment set threaded through `g2` and `g*`.
pub type EnvSet = BTreeSet<Label>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("parallel composition under recursion cannot be indexed; use the `mn` pipeline")]
    ParallelUnderRecursion,
    #[error("pipeline order violated: {0}")]
    PipelineOrder(String),
    #[error("unsupported construct: {0}")]
    Unsupported(String),
}

fn tau_pairs(p: &CcsProc, q: &CcsProc) -> BTreeSet<Label> {
    let sq = q.sort();
    p.sort()
        .into_iter()
        .filter(|l| matches!(l, Label::Name(_) | Label::CoName(_)))
        .filter(|l| l.complement().is_ok_and(|c| sq.contains(&c)))
        .map(|l| Label::TauPair(l.base().expect("names have a base").clone()))
        .collect()
}

/// CCS to CCSTau: every `P | Q` becomes `(P |_T Q) \_T {τ[a|'a], ...}`
/// over the pairs that can synchronise.
pub fn c2ccstau(p: &CcsProc) -> CcsProc {
    match p {
        CcsProc::Par(a, b) => {
            let pairs = tau_pairs(a, b);
            let body = CcsProc::tpar(c2ccstau(a), c2ccstau(b));
            if pairs.is_empty() {
                body
            } else {
                CcsProc::THide(Box::new(body), pairs)
            }
        }
        CcsProc::Nil | CcsProc::Var(_) => p.clone(),
        CcsProc::Prefix(l, q) => CcsProc::prefix(l.clone(), c2ccstau(q)),
        CcsProc::Sum(a, b) => CcsProc::sum(c2ccstau(a), c2ccstau(b)),
        CcsProc::TPar(a, b) => CcsProc::tpar(c2ccstau(a), c2ccstau(b)),
        CcsProc::Restrict(q, s) => CcsProc::Restrict(Box::new(c2ccstau(q)), s.clone()),
        CcsProc::THide(q, s) => CcsProc::THide(Box::new(c2ccstau(q)), s.clone()),
        CcsProc::Rec(x, q) => CcsProc::rec(x.clone(), c2ccstau(q)),
    }
}

fn env_part(sort: BTreeSet<Label>) -> impl Iterator<Item = Label> {
    sort.into_iter().filter(|l| matches!(l, Label::Name(_) | Label::CoName(_)))
}

/// `g2(S, α)`: a name also gets its sync twin when its complement is in `S`.
pub fn g2_action(env: &EnvSet, l: &Label) -> BTreeSet<Label> {
    let mut out = BTreeSet::from([l.clone()]);
    match l {
        Label::Name(a) if env.contains(&Label::CoName(a.clone())) => {
            out.insert(Label::SyncName(a.clone()));
        }
        Label::CoName(a) if env.contains(&Label::Name(a.clone())) => {
            out.insert(Label::CoSyncName(a.clone()));
        }
        _ => {}
    }
    out
}

fn sync_twin(l: &Label) -> Option<Label> {
    match l {
        Label::Name(a) => Some(Label::SyncName(a.clone())),
        Label::CoName(a) => Some(Label::CoSyncName(a.clone())),
        _ => None,
    }
}

/// Restricted set of `g2(S, P \ B)`: `B` plus the sync names of `B` that
/// have a partner in `S` and occur in the translated body.
pub fn g2_restrict_set(env: &EnvSet, set: &BTreeSet<Label>, body_sort: &BTreeSet<Label>) -> BTreeSet<Label> {
    let mut out = set.clone();
    for l in crate::syntax::complement_closure(set) {
        let partnered = l.complement().is_ok_and(|c| env.contains(&c));
        if let (true, Some(s)) = (partnered, sync_twin(&l)) {
            if body_sort.contains(&s) {
                out.insert(s);
            }
        }
    }
    out
}

/// Hidden set of `g2(S, P \_T B)`, i.e. `g2(S ∪ B, B)`.
pub fn g2_hide_set(env: &EnvSet, set: &BTreeSet<Label>) -> BTreeSet<Label> {
    let mut wider = env.clone();
    wider.extend(crate::syntax::complement_closure(set));
    set.iter().flat_map(|l| g2_action(&wider, l)).collect()
}

pub fn g2_proc(env: &EnvSet, p: &CcsProc) -> CcsProc {
    match p {
        CcsProc::Nil | CcsProc::Var(_) => p.clone(),
        CcsProc::Prefix(l, q) => {
            let body = g2_proc(env, q);
            CcsProc::sum_of(g2_action(env, l).into_iter().map(|b| CcsProc::prefix(b, body.clone())).collect())
        }
        CcsProc::Sum(a, b) => CcsProc::sum(g2_proc(env, a), g2_proc(env, b)),
        CcsProc::TPar(a, b) | CcsProc::Par(a, b) => {
            let mut env_a = env.clone();
            env_a.extend(env_part(b.sort()));
            let mut env_b = env.clone();
            env_b.extend(env_part(a.sort()));
            let (a2, b2) = (g2_proc(&env_a, a), g2_proc(&env_b, b));
            if matches!(p, CcsProc::TPar(..)) {
                CcsProc::tpar(a2, b2)
            } else {
                CcsProc::par(a2, b2)
            }
        }
        CcsProc::Restrict(q, set) => {
            let body = g2_proc(env, q);
            let restricted = g2_restrict_set(env, set, &body.sort());
            CcsProc::Restrict(Box::new(body), restricted)
        }
        CcsProc::THide(q, set) => CcsProc::THide(Box::new(g2_proc(env, q)), g2_hide_set(env, set)),
        CcsProc::Rec(x, q) => CcsProc::rec(x.clone(), g2_proc(env, q)),
    }
}

pub fn g2(p: &CcsProc) -> CcsProc {
    g2_proc(&EnvSet::new(), p)
}

fn conm_label(l: &Label) -> Label {
    match l {
        Label::CoSyncName(a) => Label::SyncName(a.clone()),
        other => other.clone(),
    }
}

/// Folds every `'a_S` into `a_S`.
pub fn conm_rename(p: &CcsProc) -> CcsProc {
    let set = |s: &BTreeSet<Label>| s.iter().map(conm_label).collect::<BTreeSet<_>>();
    match p {
        CcsProc::Nil | CcsProc::Var(_) => p.clone(),
        CcsProc::Prefix(l, q) => CcsProc::prefix(conm_label(l), conm_rename(q)),
        CcsProc::Sum(a, b) => CcsProc::sum(conm_rename(a), conm_rename(b)),
        CcsProc::Par(a, b) => CcsProc::par(conm_rename(a), conm_rename(b)),
        CcsProc::TPar(a, b) => CcsProc::tpar(conm_rename(a), conm_rename(b)),
        CcsProc::Restrict(q, s) => CcsProc::Restrict(Box::new(conm_rename(q)), set(s)),
        CcsProc::THide(q, s) => CcsProc::THide(Box::new(conm_rename(q)), set(s)),
        CcsProc::Rec(x, q) => CcsProc::rec(x.clone(), conm_rename(q)),
    }
}

/// Events a CSP `Hide` needs to match a CCSTau `\_T B`: plain names with
/// both polarities, sync names as given, `τ[a|'a]` dropped.
pub(crate) fn csp_hide_set(set: &BTreeSet<Label>) -> BTreeSet<Label> {
    let mut out = BTreeSet::new();
    for l in set {
        match l {
            Label::TauPair(_) => {}
            Label::Name(_) | Label::CoName(_) => {
                out.insert(l.clone());
                out.insert(l.complement().expect("names have complements"));
            }
            Label::Indexed(_, i) | Label::CoIndexed(_, i) if i.len() == 1 => {
                out.insert(l.clone());
                out.insert(l.complement().expect("names have complements"));
            }
            other => {
                out.insert(other.clone());
            }
        }
    }
    out
}

pub(crate) fn hide_if_any(p: CspProc, set: BTreeSet<Label>) -> CspProc {
    if set.is_empty() {
        p
    } else {
        CspProc::Hide(Box::new(p), set)
    }
}

/// CCSTau (after `g2` and `conm`) to CSPmn.
pub fn tl3(p: &CcsProc) -> Result<CspProc, TranslateError> {
    Ok(match p {
        CcsProc::Nil => CspProc::Stop,
        CcsProc::Var(x) => CspProc::var(x.clone()),
        CcsProc::Prefix(Label::Tau, q) => CspProc::prefix(Label::TauEvent, tl3(q)?),
        CcsProc::Prefix(l @ Label::CoSyncName(_), _) => {
            return Err(TranslateError::PipelineOrder(format!("`{l}` reached tl3; apply conm first")))
        }
        CcsProc::Prefix(l, q) => CspProc::prefix(l.clone(), tl3(q)?),
        CcsProc::Sum(a, b) => CspProc::ext(tl3(a)?, tl3(b)?),
        CcsProc::TPar(a, b) => {
            let (l, r) = (tl3(a)?, tl3(b)?);
            let (al, ar) = (l.alphabet(), r.alphabet());
            let shared = al.intersection(&ar).filter(|e| matches!(e, Label::SyncName(_))).cloned();
            let iface = Interface::with_multiplicity(shared, 2);
            CspProc::par(l, r, iface)
        }
        CcsProc::Par(..) => {
            return Err(TranslateError::PipelineOrder("plain `|` reached tl3; apply c2ccstau first".into()))
        }
        CcsProc::Restrict(q, s) => CspProc::Restrict(Box::new(tl3(q)?), s.clone()),
        CcsProc::THide(q, s) => hide_if_any(tl3(q)?, csp_hide_set(s)),
        CcsProc::Rec(x, q) => CspProc::rec(x.clone(), tl3(q)?),
    })
}

pub fn t2csp3(p: &CcsProc) -> Result<CspProc, TranslateError> {
    Ok(CspProc::hide(tl3(&conm_rename(&g2(p)))?, [Label::TauEvent]))
}

/// The full CCS to CSPmn translation.
pub fn ccs2csp3(p: &CcsProc) -> Result<CspProc, TranslateError> {
    let inner = t2csp3(&c2ccstau(p))?;
    let syncs: BTreeSet<Label> = inner.alphabet().into_iter().filter(|l| matches!(l, Label::SyncName(_))).collect();
    Ok(hide_if_any(inner, syncs))
}

/// True when every clause of every parallel has multiplicity exactly 2.
pub fn clauses_all_binary(p: &CspProc) -> bool {
    match p {
        CspProc::Par(a, b, i) => {
            i.iter().all(|(_, m)| *m == Multiplicity::Explicit(2)) && clauses_all_binary(a) && clauses_all_binary(b)
        }
        CspProc::Stop | CspProc::Skip | CspProc::Var(_) => true,
        CspProc::Prefix(_, q)
        | CspProc::Hide(q, _)
        | CspProc::Rename(q, _)
        | CspProc::Restrict(q, _)
        | CspProc::Rec(_, q) => clauses_all_binary(q),
        CspProc::ExtChoice(a, b) | CspProc::IntChoice(a, b) => clauses_all_binary(a) && clauses_all_binary(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_ccs, parse_cspmn};
    use crate::syntax::Term;

    fn ccs(s: &str) -> CcsProc {
        parse_ccs(s).unwrap()
    }

    fn same_ccs(a: &CcsProc, b: &str) {
        assert_eq!(a.canonicalise(), ccs(b).canonicalise(), "got {a}");
    }

    fn same_csp(a: &CspProc, b: &str) {
        assert_eq!(a.canonicalise(), parse_cspmn(b).unwrap().canonicalise(), "got {a}");
    }

    #[test]
    fn c2ccstau_hides_pairs() {
        same_ccs(&c2ccstau(&ccs("a.0 | 'a.0")), "(a.0 |_T 'a.0) \\_T {tau[a|'a]}");
        same_ccs(&c2ccstau(&ccs("a.0")), "a.0");
        same_ccs(&c2ccstau(&ccs("a.0 | 'a.0 | a.0")), "((a.0 |_T 'a.0) \\_T {tau[a|'a]} |_T a.0) \\_T {tau[a|'a]}");
    }

    #[test]
    fn g2_action_cases() {
        let a = Label::name("a");
        assert_eq!(g2_action(&EnvSet::from([Label::coname("a")]), &a), BTreeSet::from([a.clone(), Label::sync("a")]));
        assert_eq!(g2_action(&EnvSet::new(), &a), BTreeSet::from([a.clone()]));
        let pair = crate::io::parse_label("tau[a|'a]").unwrap();
        assert_eq!(g2_action(&EnvSet::from([a]), &pair), BTreeSet::from([pair]));
    }

    #[test]
    fn g2_examples() {
        same_ccs(&g2(&ccs("(a.0 |_T 'a.0) \\ {a}")), "((a.0 + a_S.0) |_T ('a.0 + 'a_S.0)) \\ {a}");
        same_ccs(&g2(&ccs("(a.0 |_T 'a.0) \\_T {a}")), "((a.0 + a_S.0) |_T ('a.0 + 'a_S.0)) \\_T {a, a_S}");
        same_ccs(&g2(&ccs("(a.0 |_T 'a.0) \\_T {tau[a|'a]}")), "((a.0 + a_S.0) |_T ('a.0 + 'a_S.0)) \\_T {tau[a|'a]}");
    }

    #[test]
    fn conm_folds_co_sync() {
        same_ccs(&conm_rename(&ccs("'a_S.0")), "a_S.0");
        same_ccs(&conm_rename(&ccs("'a.0")), "'a.0");
        same_ccs(&conm_rename(&ccs("tau.0")), "tau.0");
    }

    #[test]
    fn tl3_examples() {
        let p = ccs("(a.0 + a_S.0) |_T ('a.0 + a_S.0)");
        same_csp(&tl3(&p).unwrap(), "(a -> STOP [] a_S -> STOP) [| {a_S#2} |] ('a -> STOP [] a_S -> STOP)");
        same_csp(&tl3(&ccs("(a.0) \\_T {tau[a|'a]}")).unwrap(), "a -> STOP");
        same_csp(&tl3(&ccs("tau.0")).unwrap(), "tau -> STOP");
        assert!(tl3(&ccs("'a_S.0")).is_err());
    }

    #[test]
    fn t2csp3_examples() {
        same_csp(&t2csp3(&ccs("0")).unwrap(), "STOP \\ {tau}");
        same_csp(&t2csp3(&ccs("tau.0")).unwrap(), "(tau -> STOP) \\ {tau}");
        same_csp(
            &t2csp3(&ccs("a.0 |_T 'a.0")).unwrap(),
            "((a -> STOP [] a_S -> STOP) [| {a_S#2} |] ('a -> STOP [] a_S -> STOP)) \\ {tau}",
        );
    }

    #[test]
    fn ccs2csp3_examples() {
        same_csp(
            &ccs2csp3(&ccs("a.0 | 'a.0")).unwrap(),
            "((a -> STOP [] a_S -> STOP) [| {a_S#2} |] ('a -> STOP [] a_S -> STOP)) \\ {tau, a_S}",
        );
        same_csp(&ccs2csp3(&ccs("0")).unwrap(), "STOP \\ {tau}");
        let rec = ccs2csp3(&ccs("rec X. (a.0 | 'a.X)")).unwrap();
        same_csp(&rec, "(rec X. ((a -> STOP [] a_S -> STOP) [| {a_S#2} |] ('a -> X [] a_S -> X))) \\ {tau, a_S}");
    }
}
