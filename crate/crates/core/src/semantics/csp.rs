use std::collections::BTreeSet;

use super::SemanticsError;
use crate::syntax::{complement_closure, CspProc, Interface, Label, Multiplicity};

/// Progress of a synchronisation on an `a#m` event while it travels up
/// through a chain of parallel nodes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Status {
    /// Ordinary move, not yet counted against any clause.
    Free,
    /// `count` parties have joined an `a#need` synchronisation so far.
    Pending { count: u32, need: u32 },
    /// Synchronisation complete; later nodes treat it as a single move.
    Done,
}

type Move = (Label, Status, CspProc);

/// One-step transitions of a CSPmn term.
///
/// An `a#m` clause lets exactly `m` of the components under a chain of
/// parallel nodes carrying that clause move together, one transition per
/// choice of `m` components. With `strict_premise`, every such node also
/// requires both of its sides to be able to perform `a`.
pub fn cspmn_step(p: &CspProc, strict_premise: bool) -> Result<Vec<(Label, CspProc)>, SemanticsError> {
    validate(p, None)?;
    let out: BTreeSet<(Label, CspProc)> = moves(p, strict_premise)
        .into_iter()
        .filter(|(_, st, _)| !matches!(st, Status::Pending { .. }))
        .map(|(l, _, q)| (l, q))
        .collect();
    Ok(out.into_iter().collect())
}

fn chain_leaves(p: &CspProc, event: &Label) -> usize {
    match p {
        CspProc::Par(l, r, i) if matches!(i.get(event), Some(Multiplicity::Explicit(_))) => {
            chain_leaves(l, event) + chain_leaves(r, event)
        }
        _ => 1,
    }
}

fn chain_max(p: &CspProc, event: &Label) -> u32 {
    match p {
        CspProc::Par(l, r, i) => match i.get(event) {
            Some(Multiplicity::Explicit(m)) => m.max(chain_max(l, event)).max(chain_max(r, event)),
            _ => 0,
        },
        _ => 0,
    }
}

fn validate(p: &CspProc, parent: Option<&Interface>) -> Result<(), SemanticsError> {
    match p {
        CspProc::Par(l, r, iface) => {
            for (e, m) in iface.iter() {
                if matches!(e, Label::Tau | Label::TauEvent | Label::Tick | Label::TauPair(_)) {
                    return Err(SemanticsError::UnsynchronisableEvent(e.clone()));
                }
                if let Multiplicity::Explicit(k) = m {
                    if *k < 2 {
                        return Err(SemanticsError::MultiplicityTooSmall(e.clone(), *k));
                    }
                    let is_root = !matches!(parent.and_then(|i| i.get(e)), Some(Multiplicity::Explicit(_)));
                    if is_root {
                        let arity = chain_leaves(p, e);
                        let need = chain_max(p, e);
                        if need as usize > arity {
                            return Err(SemanticsError::MultiplicityExceedsArity { event: e.clone(), m: need, arity });
                        }
                    }
                }
            }
            validate(l, Some(iface))?;
            validate(r, Some(iface))
        }
        CspProc::Stop | CspProc::Skip | CspProc::Var(_) => Ok(()),
        CspProc::Prefix(_, q) | CspProc::Rec(_, q) => validate(q, None),
        CspProc::Hide(q, _) | CspProc::Rename(q, _) | CspProc::Restrict(q, _) => validate(q, None),
        CspProc::ExtChoice(a, b) | CspProc::IntChoice(a, b) => {
            validate(a, None)?;
            validate(b, None)
        }
    }
}

fn joined(st: Status, m: u32) -> Option<u32> {
    match st {
        Status::Free => Some(1),
        Status::Pending { count, need } if need == m => Some(count),
        _ => None,
    }
}

fn counted(c: u32, m: u32) -> Option<Status> {
    match c.cmp(&m) {
        std::cmp::Ordering::Less => Some(Status::Pending { count: c, need: m }),
        std::cmp::Ordering::Equal => Some(Status::Done),
        std::cmp::Ordering::Greater => None,
    }
}

fn moves(p: &CspProc, strict: bool) -> Vec<Move> {
    match p {
        CspProc::Stop | CspProc::Var(_) => Vec::new(),
        CspProc::Skip => vec![(Label::Tick, Status::Free, CspProc::Stop)],
        CspProc::Prefix(l, q) => vec![(l.clone(), Status::Free, (**q).clone())],
        CspProc::IntChoice(a, b) => {
            vec![(Label::Tau, Status::Free, (**a).clone()), (Label::Tau, Status::Free, (**b).clone())]
        }
        CspProc::ExtChoice(a, b) => {
            let mut out = Vec::new();
            for (l, st, a2) in moves(a, strict) {
                let target = if l == Label::Tau { CspProc::ext(a2, (**b).clone()) } else { a2 };
                out.push((l, st, target));
            }
            for (l, st, b2) in moves(b, strict) {
                let target = if l == Label::Tau { CspProc::ext((**a).clone(), b2) } else { b2 };
                out.push((l, st, target));
            }
            out
        }
        CspProc::Hide(q, set) => moves(q, strict)
            .into_iter()
            .filter_map(|(l, st, q2)| {
                let target = CspProc::Hide(Box::new(q2), set.clone());
                if set.contains(&l) {
                    match st {
                        Status::Pending { .. } => None,
                        _ => Some((Label::Tau, Status::Free, target)),
                    }
                } else {
                    Some((l, st, target))
                }
            })
            .collect(),
        CspProc::Rename(q, map) => {
            let mut out = Vec::new();
            for (l, st, q2) in moves(q, strict) {
                let target = CspProc::Rename(Box::new(q2), map.clone());
                match map.get(&l) {
                    Some(images) => {
                        for img in images {
                            out.push((img.clone(), st, target.clone()));
                        }
                    }
                    None => out.push((l, st, target)),
                }
            }
            out
        }
        CspProc::Restrict(q, set) => {
            let blocked = complement_closure(set);
            moves(q, strict)
                .into_iter()
                .filter(|(l, st, _)| *st == Status::Done || !blocked.contains(l))
                .map(|(l, st, q2)| (l, st, CspProc::Restrict(Box::new(q2), set.clone())))
                .collect()
        }
        CspProc::Rec(..) => moves(&p.unfold(), strict),
        CspProc::Par(a, b, iface) => par_moves(a, b, iface, strict),
    }
}

fn par_moves(a: &CspProc, b: &CspProc, iface: &Interface, strict: bool) -> Vec<Move> {
    let left = moves(a, strict);
    let right = moves(b, strict);
    let node = |x: CspProc, y: CspProc| CspProc::par(x, y, iface.clone());
    let mut out = Vec::new();

    for (l, st, a2) in &left {
        if *l != Label::Tick && !iface.contains(l) {
            out.push((l.clone(), *st, node(a2.clone(), b.clone())));
        }
    }
    for (l, st, b2) in &right {
        if *l != Label::Tick && !iface.contains(l) {
            out.push((l.clone(), *st, node(a.clone(), b2.clone())));
        }
    }
    for (l, _, a2) in left.iter().filter(|m| m.0 == Label::Tick) {
        for (_, _, b2) in right.iter().filter(|m| m.0 == Label::Tick) {
            out.push((l.clone(), Status::Free, node(a2.clone(), b2.clone())));
        }
    }

    for (event, mult) in iface.iter() {
        let ls: Vec<&Move> = left.iter().filter(|m| &m.0 == event).collect();
        let rs: Vec<&Move> = right.iter().filter(|m| &m.0 == event).collect();
        if strict && (ls.is_empty() || rs.is_empty()) {
            continue;
        }
        match mult {
            Multiplicity::Default => {
                for (_, sl, a2) in &ls {
                    for (_, sr, b2) in &rs {
                        let ready = |s: &Status| matches!(s, Status::Free | Status::Done);
                        if ready(sl) && ready(sr) {
                            out.push((event.clone(), Status::Free, node(a2.clone(), b2.clone())));
                        }
                    }
                }
            }
            Multiplicity::Explicit(m) => {
                let m = *m;
                for (_, st, a2) in &ls {
                    let next = match st {
                        Status::Done => Some(Status::Done),
                        s => joined(*s, m).and_then(|c| counted(c, m)),
                    };
                    if let Some(s) = next {
                        out.push((event.clone(), s, node(a2.clone(), b.clone())));
                    }
                }
                for (_, st, b2) in &rs {
                    let next = match st {
                        Status::Done => Some(Status::Done),
                        s => joined(*s, m).and_then(|c| counted(c, m)),
                    };
                    if let Some(s) = next {
                        out.push((event.clone(), s, node(a.clone(), b2.clone())));
                    }
                }
                for (_, sl, a2) in &ls {
                    let Some(cl) = joined(*sl, m) else { continue };
                    for (_, sr, b2) in &rs {
                        let Some(cr) = joined(*sr, m) else { continue };
                        if let Some(s) = counted(cl + cr, m) {
                            out.push((event.clone(), s, node(a2.clone(), b2.clone())));
                        }
                    }
                }
            }
        }
    }
    out
}
