//! The index-based pipeline: `ix`, `g*`, indexed `conm`, `tl`, `ai2a`.

use std::collections::BTreeSet;

use super::{c2ccstau, csp_hide_set, hide_if_any, EnvSet, TranslateError};
use crate::syntax::{complement_closure, CcsProc, CspProc, Interface, Label, Multiplicity, SyncClause};

fn is_double(l: &Label) -> bool {
    matches!(l, Label::Indexed(_, i) | Label::CoIndexed(_, i) if i.len() >= 2)
}

fn is_single(l: &Label) -> bool {
    matches!(l, Label::Indexed(_, i) | Label::CoIndexed(_, i) if i.len() == 1)
}

/// Expands the plain names of a restriction or hiding set to every indexed
/// variant, of either polarity, occurring in `sort`.
fn expand_set(set: &BTreeSet<Label>, sort: &BTreeSet<Label>) -> BTreeSet<Label> {
    let plain = complement_closure(set);
    let mut out: BTreeSet<Label> =
        set.iter().filter(|l| !matches!(l, Label::Name(_) | Label::CoName(_))).cloned().collect();
    out.extend(sort.iter().filter(|l| l.indices().is_some() && plain.contains(&l.erase_indices())).cloned());
    out
}

fn ix_rec(p: &CcsProc, next: &mut u32) -> CcsProc {
    match p {
        CcsProc::Nil | CcsProc::Var(_) => p.clone(),
        CcsProc::Prefix(l, q) => {
            let l = match l {
                Label::Name(a) => Label::Indexed(a.clone(), vec![*next]),
                Label::CoName(a) => Label::CoIndexed(a.clone(), vec![*next]),
                other => other.clone(),
            };
            if l.indices().is_some() {
                *next += 1;
            }
            CcsProc::prefix(l, ix_rec(q, next))
        }
        CcsProc::Sum(a, b) => {
            let a = ix_rec(a, next);
            CcsProc::sum(a, ix_rec(b, next))
        }
        CcsProc::Par(a, b) => {
            let a = ix_rec(a, next);
            CcsProc::par(a, ix_rec(b, next))
        }
        CcsProc::TPar(a, b) => {
            let a = ix_rec(a, next);
            CcsProc::tpar(a, ix_rec(b, next))
        }
        CcsProc::Restrict(q, set) => {
            let q = ix_rec(q, next);
            let set = expand_set(set, &q.sort());
            CcsProc::Restrict(Box::new(q), set)
        }
        CcsProc::THide(q, set) => {
            let q = ix_rec(q, next);
            let set = expand_set(set, &q.sort());
            CcsProc::THide(Box::new(q), set)
        }
        CcsProc::Rec(x, q) => CcsProc::rec(x.clone(), ix_rec(q, next)),
    }
}

/// Gives every name prefix a fresh index, counting from 1 in depth-first
/// left-to-right order.
pub fn ix(p: &CcsProc) -> Result<CcsProc, TranslateError> {
    if p.has_parallel_under_rec() {
        return Err(TranslateError::ParallelUnderRecursion);
    }
    Ok(ix_rec(p, &mut 1))
}

fn pair(i: u32, j: u32) -> Vec<u32> {
    if i < j {
        vec![i, j]
    } else {
        vec![j, i]
    }
}

/// `g*(S, a_i)`: `a_i` plus one double-indexed name per complementary
/// single-indexed partner `'a_j` in `S`.
pub fn gstar_action(env: &EnvSet, l: &Label) -> BTreeSet<Label> {
    let mut out = BTreeSet::from([l.clone()]);
    let (base, i, co) = match l {
        Label::Indexed(a, i) if i.len() == 1 => (a, i[0], false),
        Label::CoIndexed(a, i) if i.len() == 1 => (a, i[0], true),
        _ => return out,
    };
    for partner in env {
        match partner {
            Label::CoIndexed(b, j) if !co && b == base && j.len() == 1 && j[0] != i => {
                out.insert(Label::Indexed(base.clone(), pair(i, j[0])));
            }
            Label::Indexed(b, j) if co && b == base && j.len() == 1 && j[0] != i => {
                out.insert(Label::CoIndexed(base.clone(), pair(i, j[0])));
            }
            _ => {}
        }
    }
    out
}

pub fn gstar_proc(env: &EnvSet, p: &CcsProc) -> CcsProc {
    match p {
        CcsProc::Nil | CcsProc::Var(_) => p.clone(),
        CcsProc::Prefix(l, q) => {
            let body = gstar_proc(env, q);
            CcsProc::sum_of(gstar_action(env, l).into_iter().map(|b| CcsProc::prefix(b, body.clone())).collect())
        }
        CcsProc::Sum(a, b) => CcsProc::sum(gstar_proc(env, a), gstar_proc(env, b)),
        CcsProc::TPar(a, b) | CcsProc::Par(a, b) => {
            let mut env_a = env.clone();
            env_a.extend(b.sort().into_iter().filter(is_single));
            let mut env_b = env.clone();
            env_b.extend(a.sort().into_iter().filter(is_single));
            let (a2, b2) = (gstar_proc(&env_a, a), gstar_proc(&env_b, b));
            if matches!(p, CcsProc::TPar(..)) {
                CcsProc::tpar(a2, b2)
            } else {
                CcsProc::par(a2, b2)
            }
        }
        CcsProc::Restrict(q, set) => {
            let body = gstar_proc(env, q);
            let sort = body.sort();
            let mut restricted = set.clone();
            for l in set {
                restricted.extend(gstar_action(env, l).into_iter().filter(|d| is_double(d) && sort.contains(d)));
            }
            CcsProc::Restrict(Box::new(body), restricted)
        }
        CcsProc::THide(q, set) => {
            let mut wider = env.clone();
            wider.extend(complement_closure(set));
            let hidden = set.iter().flat_map(|l| gstar_action(&wider, l)).collect();
            CcsProc::THide(Box::new(gstar_proc(env, q)), hidden)
        }
        CcsProc::Rec(x, q) => CcsProc::rec(x.clone(), gstar_proc(env, q)),
    }
}

fn conm_indexed_label(l: &Label) -> Label {
    match l {
        Label::CoIndexed(a, i) if i.len() >= 2 => Label::Indexed(a.clone(), i.clone()),
        other => other.clone(),
    }
}

/// Folds every double-indexed coname `'a_{i,j}` into `a_{i,j}`.
pub fn conm_indexed(p: &CcsProc) -> CcsProc {
    let set = |s: &BTreeSet<Label>| s.iter().map(conm_indexed_label).collect::<BTreeSet<_>>();
    match p {
        CcsProc::Nil | CcsProc::Var(_) => p.clone(),
        CcsProc::Prefix(l, q) => CcsProc::prefix(conm_indexed_label(l), conm_indexed(q)),
        CcsProc::Sum(a, b) => CcsProc::sum(conm_indexed(a), conm_indexed(b)),
        CcsProc::Par(a, b) => CcsProc::par(conm_indexed(a), conm_indexed(b)),
        CcsProc::TPar(a, b) => CcsProc::tpar(conm_indexed(a), conm_indexed(b)),
        CcsProc::Restrict(q, s) => CcsProc::Restrict(Box::new(conm_indexed(q)), set(s)),
        CcsProc::THide(q, s) => CcsProc::THide(Box::new(conm_indexed(q)), set(s)),
        CcsProc::Rec(x, q) => CcsProc::rec(x.clone(), conm_indexed(q)),
    }
}

/// Indexed CCSTau to CSP; `|_T` synchronises on the shared double-indexed
/// names.
pub fn tl(p: &CcsProc) -> Result<CspProc, TranslateError> {
    Ok(match p {
        CcsProc::Nil => CspProc::Stop,
        CcsProc::Var(x) => CspProc::var(x.clone()),
        CcsProc::Prefix(Label::Tau, q) => CspProc::prefix(Label::TauEvent, tl(q)?),
        CcsProc::Prefix(l, q) => CspProc::prefix(l.clone(), tl(q)?),
        CcsProc::Sum(a, b) => CspProc::ext(tl(a)?, tl(b)?),
        CcsProc::TPar(a, b) => {
            let (l, r) = (tl(a)?, tl(b)?);
            let (al, ar) = (l.alphabet(), r.alphabet());
            let shared = al.intersection(&ar).filter(|e| matches!(e, Label::Indexed(_, i) if i.len() >= 2)).cloned();
            CspProc::par(l, r, Interface::plain(shared))
        }
        CcsProc::Par(..) => {
            return Err(TranslateError::PipelineOrder("plain `|` reached tl; apply c2ccstau first".into()))
        }
        CcsProc::Restrict(q, s) => CspProc::Restrict(Box::new(tl(q)?), s.clone()),
        CcsProc::THide(q, s) => hide_if_any(tl(q)?, csp_hide_set(s)),
        CcsProc::Rec(x, q) => CspProc::rec(x.clone(), tl(q)?),
    })
}

/// Applies `f` to every label of a CSP term and `g` to every interface.
fn relabel(
    p: &CspProc,
    f: &impl Fn(&Label) -> Label,
    g: &impl Fn(&Interface) -> Interface,
) -> Result<CspProc, TranslateError> {
    let set = |s: &BTreeSet<Label>| s.iter().map(f).collect::<BTreeSet<_>>();
    Ok(match p {
        CspProc::Stop | CspProc::Skip | CspProc::Var(_) => p.clone(),
        CspProc::Prefix(l, q) => CspProc::prefix(f(l), relabel(q, f, g)?),
        CspProc::ExtChoice(a, b) => CspProc::ext(relabel(a, f, g)?, relabel(b, f, g)?),
        CspProc::IntChoice(a, b) => CspProc::int(relabel(a, f, g)?, relabel(b, f, g)?),
        CspProc::Par(a, b, i) => CspProc::par(relabel(a, f, g)?, relabel(b, f, g)?, g(i)),
        CspProc::Hide(q, s) => CspProc::Hide(Box::new(relabel(q, f, g)?), set(s)),
        CspProc::Restrict(q, s) => CspProc::Restrict(Box::new(relabel(q, f, g)?), set(s)),
        CspProc::Rename(..) => return Err(TranslateError::Unsupported(format!("renaming in `{p}`"))),
        CspProc::Rec(x, q) => CspProc::rec(x.clone(), relabel(q, f, g)?),
    })
}

fn ai2a_label(l: &Label) -> Label {
    match l {
        Label::Indexed(a, i) if i.len() == 1 => Label::Name(a.clone()),
        Label::CoIndexed(a, i) if i.len() == 1 => Label::CoName(a.clone()),
        other => other.clone(),
    }
}

/// Erases single indices: `a_i` becomes `a`.
pub fn ai2a(p: &CspProc) -> CspProc {
    let g = |i: &Interface| i.clauses().map(|c| SyncClause { event: ai2a_label(&c.event), ..c }).collect();
    relabel(p, &ai2a_label, &g).expect("tl output contains no renaming")
}

/// The index-based CCS to CSP translation. Rejects parallel composition
/// under recursion.
pub fn ccs2csp_legacy(p: &CcsProc) -> Result<CspProc, TranslateError> {
    if p.has_parallel_under_rec() {
        return Err(TranslateError::ParallelUnderRecursion);
    }
    let indexed = ix(&c2ccstau(p))?;
    let inner = CspProc::hide(tl(&conm_indexed(&gstar_proc(&EnvSet::new(), &indexed)))?, [Label::TauEvent]);
    let doubles: BTreeSet<Label> = inner.alphabet().into_iter().filter(is_double).collect();
    Ok(ai2a(&hide_if_any(inner, doubles)))
}

fn g_bridge_label(l: &Label) -> Label {
    match l {
        Label::Indexed(a, i) if i.len() >= 2 => Label::SyncName(a.clone()),
        other => other.clone(),
    }
}

/// Renames the double-indexed names of a legacy translation into sync
/// names; each plain interface event `a_{i,j}` becomes the clause `a_S#2`.
pub fn gstar2g2(p: &CspProc) -> Result<CspProc, TranslateError> {
    let g = |iface: &Interface| {
        iface
            .clauses()
            .map(|c| match (&c.event, c.multiplicity) {
                (Label::Indexed(_, i), Multiplicity::Default) if i.len() >= 2 => {
                    SyncClause { event: g_bridge_label(&c.event), multiplicity: Multiplicity::Explicit(2) }
                }
                _ => c,
            })
            .collect()
    };
    relabel(p, &g_bridge_label, &g)
}
