//! Elaboration of CSPmn `a#m` clauses into plain CSP: every prefix gets a
//! fresh index, and each event under a clause is replaced by the choice of
//! all `m`-party combination names it can take part in.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{complement_closure, CspProc, EventKind, Interface, Label, Multiplicity, Name, SyncClause};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Mn2CspError {
    #[error("parallel composition under recursion cannot be elaborated")]
    ParallelUnderRecursion,
    #[error("term already contains indexed event `{0}`")]
    AlreadyIndexed(Label),
    #[error("unsupported construct: {0}")]
    Unsupported(String),
    #[error("clause `{event}#{m}` governs only {arity} components")]
    MultiplicityExceedsArity { event: Label, m: u32, arity: usize },
}

/// Fresh-index supply for [`ix_csp`].
#[derive(Debug, Clone, Default)]
pub struct IndexScheme {
    pub next: u32,
    pub excluded: BTreeSet<u32>,
}

impl IndexScheme {
    pub fn new() -> Self {
        IndexScheme { next: 1, excluded: BTreeSet::new() }
    }

    fn fresh(&mut self) -> u32 {
        while self.excluded.contains(&self.next) {
            self.next += 1;
        }
        let i = self.next;
        self.next += 1;
        i
    }
}

/// Clause multiplicities of single-indexed events, threaded downwards.
pub type ClauseContext = BTreeMap<Label, u32>;

fn same_family(l: &Label, kind: EventKind, base: &Name) -> bool {
    l.event_kind().is_some_and(|(k, b)| k == kind && b == base)
}

/// Every prefix event in the term, hidden or not.
fn prefix_events(p: &CspProc, out: &mut BTreeSet<Label>) {
    match p {
        CspProc::Stop | CspProc::Skip | CspProc::Var(_) => {}
        CspProc::Prefix(l, q) => {
            out.insert(l.clone());
            prefix_events(q, out);
        }
        CspProc::ExtChoice(a, b) | CspProc::IntChoice(a, b) | CspProc::Par(a, b, _) => {
            prefix_events(a, out);
            prefix_events(b, out);
        }
        CspProc::Hide(q, _) | CspProc::Rename(q, _) | CspProc::Restrict(q, _) | CspProc::Rec(_, q) => {
            prefix_events(q, out)
        }
    }
}

fn events_of(p: &CspProc) -> BTreeSet<Label> {
    let mut out = BTreeSet::new();
    prefix_events(p, &mut out);
    out
}

fn chain_arity(p: &CspProc, event: &Label) -> usize {
    match p {
        CspProc::Par(l, r, i) if i.contains(event) => chain_arity(l, event) + chain_arity(r, event),
        _ => 1,
    }
}

/// Replaces every default clause by an explicit one whose multiplicity is
/// the number of components of the clause's chain of parallel nodes.
fn resolve_defaults(p: &CspProc, chain: &BTreeMap<Label, u32>) -> CspProc {
    match p {
        CspProc::Par(l, r, iface) => {
            let arities: BTreeMap<Label, u32> = iface
                .events()
                .map(|e| (e.clone(), chain.get(e).copied().unwrap_or_else(|| chain_arity(p, e) as u32)))
                .collect();
            let resolved = iface.map_multiplicities(|e, m| match m {
                Multiplicity::Explicit(_) => m,
                Multiplicity::Default => Multiplicity::Explicit(arities[e]),
            });
            CspProc::par(resolve_defaults(l, &arities), resolve_defaults(r, &arities), resolved)
        }
        _ => p.map_children(&|c| resolve_defaults(c, &BTreeMap::new()), &|a, b, i| CspProc::par(a, b, i.clone())),
    }
}

/// Replaces every default clause by `e#n`, `n` the arity of its chain.
pub fn explicit_arity(p: &CspProc) -> CspProc {
    resolve_defaults(p, &BTreeMap::new())
}

fn ix_rec(p: &CspProc, scheme: &mut IndexScheme) -> Result<CspProc, Mn2CspError> {
    Ok(match p {
        CspProc::Stop | CspProc::Skip | CspProc::Var(_) => p.clone(),
        CspProc::Prefix(l, q) => {
            if l.indices().is_some() {
                return Err(Mn2CspError::AlreadyIndexed(l.clone()));
            }
            let l = match l.event_kind() {
                Some((kind, base)) => Label::with_indices(kind, base.clone(), vec![scheme.fresh()]),
                None => l.clone(),
            };
            CspProc::prefix(l, ix_rec(q, scheme)?)
        }
        CspProc::ExtChoice(a, b) => {
            let a = ix_rec(a, scheme)?;
            CspProc::ext(a, ix_rec(b, scheme)?)
        }
        CspProc::IntChoice(a, b) => {
            let a = ix_rec(a, scheme)?;
            CspProc::int(a, ix_rec(b, scheme)?)
        }
        CspProc::Par(a, b, iface) => {
            let a = ix_rec(a, scheme)?;
            let b = ix_rec(b, scheme)?;
            let mut alpha = a.alphabet();
            alpha.extend(b.alphabet());
            let mut out = Interface::new();
            for clause in iface.clauses() {
                let Some((kind, base)) = clause.event.event_kind() else {
                    return Err(Mn2CspError::Unsupported(format!("clause on `{}`", clause.event)));
                };
                for e in alpha.iter().filter(|e| same_family(e, kind, base)) {
                    out.insert(SyncClause { event: e.clone(), multiplicity: clause.multiplicity });
                }
            }
            CspProc::par(a, b, out)
        }
        CspProc::Hide(q, set) => {
            let q = ix_rec(q, scheme)?;
            let hidden = expand(set, &events_of(&q), false);
            CspProc::Hide(Box::new(q), hidden)
        }
        CspProc::Restrict(q, set) => {
            let q = ix_rec(q, scheme)?;
            let blocked = expand(set, &events_of(&q), true);
            CspProc::Restrict(Box::new(q), blocked)
        }
        CspProc::Rename(..) => return Err(Mn2CspError::Unsupported(format!("renaming in `{p}`"))),
        CspProc::Rec(x, q) => CspProc::rec(x.clone(), ix_rec(q, scheme)?),
    })
}

/// Indexed variants in `events` of the members of `set` (with complements
/// when `closed`); members without an index family are kept as they are.
fn expand(set: &BTreeSet<Label>, events: &BTreeSet<Label>, closed: bool) -> BTreeSet<Label> {
    let members = if closed { complement_closure(set) } else { set.clone() };
    let mut out = BTreeSet::new();
    for l in &members {
        match l.event_kind() {
            Some((kind, base)) => out.extend(events.iter().filter(|e| same_family(e, kind, base)).cloned()),
            None => {
                out.insert(l.clone());
            }
        }
    }
    out
}

/// Indexes every prefix and every clause event.
pub fn ix_csp(p: &CspProc, scheme: &mut IndexScheme) -> Result<CspProc, Mn2CspError> {
    if p.has_parallel_under_rec() {
        return Err(Mn2CspError::ParallelUnderRecursion);
    }
    ix_rec(p, scheme)
}

/// Sorted `k`-subsets of `pool` using each component at most once.
fn combinations(pool: &[(u32, Option<usize>)], k: usize, used: &mut Vec<usize>) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (n, &(x, leaf)) in pool.iter().enumerate() {
        if leaf.is_some_and(|c| used.contains(&c)) {
            continue;
        }
        used.extend(leaf);
        for mut rest in combinations(&pool[n + 1..], k - 1, used) {
            rest.insert(0, x);
            out.push(rest);
        }
        if leaf.is_some() {
            used.pop();
        }
    }
    out
}

/// Component (maximal parallel-free subterm) of every prefix index.
pub type Components = BTreeMap<u32, usize>;

pub fn components(p: &CspProc) -> Components {
    fn walk(p: &CspProc, out: &mut Components, next: &mut usize) {
        if p.has_parallel() {
            children(p).into_iter().for_each(|c| walk(c, out, next));
        } else {
            for i in indices_of(&events_of(p)) {
                out.insert(i, *next);
            }
            *next += 1;
        }
    }
    let mut out = Components::new();
    walk(p, &mut out, &mut 0);
    out
}

/// `g*_#(S, e)`: `{e}` when `e` carries no clause; otherwise one name per
/// `m`-set of indices containing `e`'s, drawn from same-family partners in
/// `S` that carry the same clause.
pub fn gsharp_event(ctx: &ClauseContext, env: &BTreeSet<Label>, e: &Label) -> BTreeSet<Label> {
    gsharp_event_in(ctx, env, e, &Components::new())
}

/// As [`gsharp_event`], drawing at most one index from each component and
/// none from `e`'s own: other tuples name synchronisations that never occur.
pub fn gsharp_event_in(ctx: &ClauseContext, env: &BTreeSet<Label>, e: &Label, comps: &Components) -> BTreeSet<Label> {
    let Some(&m) = ctx.get(e) else {
        return BTreeSet::from([e.clone()]);
    };
    let (Some((kind, base)), Some(&[i])) = (e.event_kind(), e.indices()) else {
        return BTreeSet::from([e.clone()]);
    };
    let own = comps.get(&i).copied();
    let partners: Vec<(u32, Option<usize>)> = env
        .iter()
        .filter(|l| same_family(l, kind, base) && ctx.get(*l) == Some(&m))
        .filter_map(|l| match l.indices() {
            Some(&[j]) if j != i => Some(j),
            _ => None,
        })
        .collect::<BTreeSet<u32>>()
        .into_iter()
        .map(|j| (j, comps.get(&j).copied()))
        .filter(|(_, c)| c.is_none() || *c != own)
        .collect();
    combinations(&partners, (m as usize).saturating_sub(1), &mut Vec::new())
        .into_iter()
        .map(|mut idx| {
            idx.push(i);
            Label::with_indices(kind, base.clone(), idx)
        })
        .collect()
}

fn indices_of(events: &BTreeSet<Label>) -> BTreeSet<u32> {
    events.iter().filter_map(|l| l.indices()).flatten().copied().collect()
}

fn families(set: &BTreeSet<Label>) -> BTreeSet<(EventKind, Name)> {
    set.iter().filter_map(|l| l.event_kind().map(|(k, b)| (k, b.clone()))).collect()
}

pub fn gsharp_proc(ctx: &ClauseContext, env: &BTreeSet<Label>, p: &CspProc) -> CspProc {
    gsharp_rec(ctx, env, p, &components(p))
}

fn gsharp_rec(ctx: &ClauseContext, env: &BTreeSet<Label>, p: &CspProc, comps: &Components) -> CspProc {
    match p {
        CspProc::Stop | CspProc::Skip | CspProc::Var(_) => p.clone(),
        CspProc::Prefix(l, q) => {
            let body = gsharp_rec(ctx, env, q, comps);
            CspProc::ext_of(
                gsharp_event_in(ctx, env, l, comps).into_iter().map(|b| CspProc::prefix(b, body.clone())).collect(),
            )
        }
        CspProc::ExtChoice(a, b) => CspProc::ext(gsharp_rec(ctx, env, a, comps), gsharp_rec(ctx, env, b, comps)),
        CspProc::IntChoice(a, b) => CspProc::int(gsharp_rec(ctx, env, a, comps), gsharp_rec(ctx, env, b, comps)),
        CspProc::Par(a, b, iface) => {
            let mut inner = ctx.clone();
            for (e, m) in iface.iter() {
                if let Multiplicity::Explicit(m) = m {
                    inner.insert(e.clone(), *m);
                }
            }
            let mut env_a = env.clone();
            env_a.extend(b.alphabet());
            let mut env_b = env.clone();
            env_b.extend(a.alphabet());
            let (a2, b2) = (gsharp_rec(&inner, &env_a, a, comps), gsharp_rec(&inner, &env_b, b, comps));
            let (ia, ib) = (indices_of(&events_of(a)), indices_of(&events_of(b)));
            let mut alpha = a2.alphabet();
            alpha.extend(b2.alphabet());
            let shared = alpha.into_iter().filter(|l| match l.indices() {
                Some(idx) if idx.len() >= 2 => idx.iter().any(|i| ia.contains(i)) && idx.iter().any(|i| ib.contains(i)),
                _ => false,
            });
            CspProc::par(a2, b2, Interface::plain(shared))
        }
        CspProc::Hide(q, set) => {
            let fams = families(set);
            let narrowed: BTreeSet<Label> = env
                .iter()
                .filter(|l| !l.event_kind().is_some_and(|(k, b)| fams.contains(&(k, b.clone()))))
                .cloned()
                .collect();
            let q2 = gsharp_rec(ctx, &narrowed, q, comps);
            let mut hidden: BTreeSet<Label> = set.iter().filter(|l| l.event_kind().is_none()).cloned().collect();
            hidden.extend(
                events_of(&q2)
                    .into_iter()
                    .filter(|l| l.event_kind().is_some_and(|(k, b)| fams.contains(&(k, b.clone())))),
            );
            CspProc::Hide(Box::new(q2), hidden)
        }
        CspProc::Restrict(q, set) => {
            let fams = families(set);
            let narrowed: BTreeSet<Label> = env
                .iter()
                .filter(|l| !l.event_kind().is_some_and(|(k, b)| fams.contains(&(k, b.clone()))))
                .cloned()
                .collect();
            let q2 = gsharp_rec(ctx, &narrowed, q, comps);
            let blocked = q2.alphabet().into_iter().filter(|l| {
                matches!(l.indices(), Some(i) if i.len() == 1)
                    && l.event_kind().is_some_and(|(k, b)| fams.contains(&(k, b.clone())))
            });
            CspProc::par(q2, CspProc::Stop, Interface::plain(blocked))
        }
        CspProc::Rename(q, m) => CspProc::Rename(Box::new(gsharp_rec(ctx, env, q, comps)), m.clone()),
        CspProc::Rec(x, q) => CspProc::rec(x.clone(), gsharp_rec(ctx, env, q, comps)),
    }
}

fn children(p: &CspProc) -> Vec<&CspProc> {
    match p {
        CspProc::Stop | CspProc::Skip | CspProc::Var(_) => vec![],
        CspProc::Prefix(_, q)
        | CspProc::Hide(q, _)
        | CspProc::Rename(q, _)
        | CspProc::Restrict(q, _)
        | CspProc::Rec(_, q) => {
            vec![q]
        }
        CspProc::ExtChoice(a, b) | CspProc::IntChoice(a, b) | CspProc::Par(a, b, _) => vec![a, b],
    }
}

fn check_arity(p: &CspProc, parent: Option<&Interface>) -> Result<(), Mn2CspError> {
    if let CspProc::Par(l, r, iface) = p {
        for (e, m) in iface.iter().filter(|(e, _)| !parent.is_some_and(|i| i.contains(e))) {
            if let Multiplicity::Explicit(m) = m {
                let arity = chain_arity(p, e);
                if *m as usize > arity {
                    return Err(Mn2CspError::MultiplicityExceedsArity { event: e.clone(), m: *m, arity });
                }
            }
        }
        check_arity(l, Some(iface))?;
        return check_arity(r, Some(iface));
    }
    children(p).into_iter().try_for_each(|c| check_arity(c, None))
}

/// `g*_# ∘ ix`: compiles every `a#m` clause into plain CSP.
pub fn mn2csp(p: &CspProc) -> Result<CspProc, Mn2CspError> {
    check_arity(p, None)?;
    let resolved = resolve_defaults(p, &BTreeMap::new());
    let indexed = ix_csp(&resolved, &mut IndexScheme::new())?;
    Ok(gsharp_proc(&ClauseContext::new(), &BTreeSet::new(), &indexed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_cspmn, print_csp};

    fn nary(n: usize, m: u32) -> CspProc {
        let leaf = || CspProc::prefix(Label::name("a"), CspProc::Stop);
        (1..n).fold(leaf(), |acc, _| CspProc::par(acc, leaf(), Interface::with_multiplicity([Label::name("a")], m)))
    }

    fn sync_names(p: &CspProc) -> BTreeSet<Label> {
        p.alphabet().into_iter().filter(|l| l.indices().is_some_and(|i| i.len() >= 2)).collect()
    }

    #[test]
    fn ix_numbers_prefixes_and_clauses() {
        let p = parse_cspmn("a -> STOP [| {a#2} |] a -> STOP").unwrap();
        let got = ix_csp(&p, &mut IndexScheme::new()).unwrap();
        assert_eq!(print_csp(&got), "a_{1} -> STOP [| {a_{1}#2, a_{2}#2} |] a_{2} -> STOP");
    }

    #[test]
    fn pair_becomes_one_plain_sync() {
        let p = parse_cspmn("a -> STOP [| {a#2} |] a -> STOP").unwrap();
        let got = mn2csp(&p).unwrap();
        assert_eq!(print_csp(&got), "a_{1,2} -> STOP [| {a_{1,2}} |] a_{1,2} -> STOP");
    }

    #[test]
    fn combination_counts() {
        for (n, m, expect) in [(3, 2, 3), (4, 3, 4), (4, 2, 6), (5, 2, 10), (3, 3, 1)] {
            let got = mn2csp(&nary(n, m)).unwrap();
            assert!(got.alphabet().iter().all(|l| l.indices().is_some_and(|i| i.len() == m as usize)));
            assert_eq!(sync_names(&got).len(), expect, "n={n} m={m}");
        }
    }

    #[test]
    fn default_clause_needs_everyone() {
        let p = parse_cspmn("a -> STOP [| {a} |] a -> STOP [| {a} |] a -> STOP").unwrap();
        let got = mn2csp(&p).unwrap();
        assert_eq!(sync_names(&got), BTreeSet::from([Label::indexed(Name::new("a").unwrap(), vec![1, 2, 3]).unwrap()]));
    }

    #[test]
    fn restriction_blocks_lonely_singles() {
        let p = parse_cspmn("(a -> STOP [| {a#2} |] a -> STOP) |> {a}").unwrap();
        let got = mn2csp(&p).unwrap();
        assert!(got.alphabet().iter().all(|l| l.indices().is_some_and(|i| i.len() == 2)));
    }

    #[test]
    fn rejections() {
        assert_eq!(
            mn2csp(&nary(2, 3)),
            Err(Mn2CspError::MultiplicityExceedsArity { event: Label::name("a"), m: 3, arity: 2 })
        );
        let pre = parse_cspmn("a_{1} -> STOP").unwrap();
        assert!(matches!(mn2csp(&pre), Err(Mn2CspError::AlreadyIndexed(_))));
        let ren = parse_cspmn("(a -> STOP)[[a <- b]]").unwrap();
        assert!(matches!(mn2csp(&ren), Err(Mn2CspError::Unsupported(_))));
        let rec = parse_cspmn("rec X. (a -> X ||| b -> STOP)").unwrap();
        assert_eq!(mn2csp(&rec), Err(Mn2CspError::ParallelUnderRecursion));
    }
}
