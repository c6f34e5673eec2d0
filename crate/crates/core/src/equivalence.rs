//! Strong bisimulation by partition refinement, and labelled operational
//! correspondence between a term and its translation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::semantics::{Lts, Semantics, SemanticsError};
use crate::syntax::{Label, Term};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelMap {
    #[default]
    Identity,
    /// `a_{I}` ↦ `a`, keeping polarity and the sync marker.
    EraseIndices,
    /// Listed labels are replaced; all others are kept.
    Table(BTreeMap<Label, Label>),
}

impl LabelMap {
    pub fn apply(&self, l: &Label) -> Label {
        match self {
            LabelMap::Identity => l.clone(),
            LabelMap::EraseIndices => l.erase_indices(),
            LabelMap::Table(t) => t.get(l).cloned().unwrap_or_else(|| l.clone()),
        }
    }

    /// What the right-hand LTS's labels go through: erasure is a quotient on
    /// both sides, every other map translates the left side only.
    pub fn apply_right(&self, l: &Label) -> Label {
        match self {
            LabelMap::EraseIndices => l.erase_indices(),
            _ => l.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivalenceError {
    #[error("{0:?} LTS is incomplete; raise the exploration budget")]
    IncompleteLts(Side),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// One split in a distinguishing trace: in the pair `(left, right)`, the
/// `side` state moves by `label` and no equally labelled move of the other
/// state reaches an equivalent state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitStep {
    pub left: usize,
    pub right: usize,
    pub side: Side,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BisimResult {
    pub verdict: bool,
    /// Related `(left, right)` state pairs, sorted; empty on failure.
    pub witness: Vec<(usize, usize)>,
    /// Empty on success.
    pub counterexample: Vec<SplitStep>,
    /// Refinement rounds the verdict rests on; bounded checks stop early.
    pub rounds: usize,
    pub bounded: bool,
}

struct Union {
    n1: usize,
    mapped: Vec<Label>,
}

fn union<P, Q>(l1: &Lts<P>, l2: &Lts<Q>, f: &LabelMap) -> (Union, Vec<Vec<(usize, usize)>>) {
    let n1 = l1.states.len();
    let total = n1 + l2.states.len();
    let mut mapped = Vec::new();
    let mut idx: BTreeMap<Label, usize> = BTreeMap::new();
    let mut edges = vec![Vec::new(); total];
    let mut intern = |l: Label| -> usize {
        *idx.entry(l.clone()).or_insert_with(|| {
            mapped.push(l);
            mapped.len() - 1
        })
    };
    for t in &l1.transitions {
        edges[t.source].push((intern(f.apply(&t.label)), t.target));
    }
    for t in &l2.transitions {
        edges[n1 + t.source].push((intern(f.apply_right(&t.label)), n1 + t.target));
    }
    (Union { n1, mapped }, edges)
}

/// Block assignment after each round; `history[0]` is the trivial partition.
fn refine(edges: &[Vec<(usize, usize)>], limit: Option<usize>) -> Vec<Vec<usize>> {
    let mut history = vec![vec![0; edges.len()]];
    loop {
        let cur = history.last().expect("non-empty");
        if limit.is_some_and(|k| history.len() > k) {
            return history;
        }
        let mut sigs: BTreeMap<(usize, BTreeSet<(usize, usize)>), usize> = BTreeMap::new();
        let mut next = Vec::with_capacity(edges.len());
        for (s, es) in edges.iter().enumerate() {
            let sig = (cur[s], es.iter().map(|&(l, t)| (l, cur[t])).collect());
            let fresh = sigs.len();
            next.push(*sigs.entry(sig).or_insert(fresh));
        }
        let stable = sigs.len() == cur.iter().collect::<BTreeSet<_>>().len();
        history.push(next);
        if stable {
            return history;
        }
    }
}

fn first_split(history: &[Vec<usize>], a: usize, b: usize) -> Option<usize> {
    history.iter().position(|blocks| blocks[a] != blocks[b])
}

fn distinguish(u: &Union, edges: &[Vec<(usize, usize)>], history: &[Vec<usize>], a: usize, b: usize) -> Vec<SplitStep> {
    let mut trace = Vec::new();
    let (mut x, mut y) = (a, b);
    while let Some(k) = first_split(history, x, y) {
        let prev = &history[k - 1];
        let mut found = None;
        'search: for (side, from, other) in [(Side::Left, x, y), (Side::Right, y, x)] {
            for &(l, t) in &edges[from] {
                let answers: Vec<usize> = edges[other].iter().filter(|e| e.0 == l).map(|e| e.1).collect();
                if answers.iter().all(|&t2| prev[t2] != prev[t]) {
                    found = Some((side, l, t, answers.first().copied()));
                    break 'search;
                }
            }
        }
        let Some((side, l, t, answer)) = found else { break };
        trace.push(SplitStep { left: x, right: y - u.n1, side, label: u.mapped[l].clone() });
        match answer {
            Some(t2) if side == Side::Left => (x, y) = (t, t2),
            Some(t2) => (x, y) = (t2, t),
            None => break,
        }
    }
    trace
}

fn decide<P, Q>(l1: &Lts<P>, l2: &Lts<Q>, f: &LabelMap, limit: Option<usize>) -> BisimResult {
    let (u, edges) = union(l1, l2, f);
    let history = refine(&edges, limit);
    let blocks = history.last().expect("non-empty");
    let (i1, i2) = (l1.initial, u.n1 + l2.initial);
    let verdict = blocks[i1] == blocks[i2];
    let rounds = history.len() - 1;
    let bounded = limit.is_some();
    if !verdict {
        let counterexample = distinguish(&u, &edges, &history, i1, i2);
        return BisimResult { verdict, witness: Vec::new(), counterexample, rounds, bounded };
    }
    let mut witness = Vec::new();
    for s in 0..u.n1 {
        for t in u.n1..edges.len() {
            if blocks[s] == blocks[t] {
                witness.push((s, t - u.n1));
            }
        }
    }
    BisimResult { verdict, witness, counterexample: Vec::new(), rounds, bounded }
}

/// Decides strong bisimilarity of the initial states, with `f` applied to
/// the left LTS's labels. τ is an ordinary label.
pub fn strong_bisim<P, Q>(l1: &Lts<P>, l2: &Lts<Q>, f: &LabelMap) -> Result<BisimResult, EquivalenceError> {
    if !l1.complete {
        return Err(EquivalenceError::IncompleteLts(Side::Left));
    }
    if !l2.complete {
        return Err(EquivalenceError::IncompleteLts(Side::Right));
    }
    Ok(decide(l1, l2, f, None))
}

/// Bisimulation up to depth `k`: only `k` refinement rounds. Exploratory;
/// incomplete LTSs are accepted as long as they were explored to depth `k`.
pub fn bounded_bisim<P, Q>(l1: &Lts<P>, l2: &Lts<Q>, f: &LabelMap, k: usize) -> BisimResult {
    decide(l1, l2, f, Some(k))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplayViolation {
    pub left: usize,
    pub right: usize,
    pub side: Side,
    /// `None` when the initial pair itself is missing from the witness.
    pub label: Option<Label>,
}

fn index_of<P: Term>(lts: &Lts<P>) -> BTreeMap<P, usize> {
    lts.states.iter().enumerate().map(|(i, p)| (p.canonicalise(), i)).collect()
}

/// Re-derives every move of every witness pair from the step functions and
/// checks that it is answered inside the witness.
pub fn replay_witness<A: Semantics, B: Semantics>(
    (sa, l1): (&A, &Lts<A::Proc>),
    (sb, l2): (&B, &Lts<B::Proc>),
    f: &LabelMap,
    witness: &[(usize, usize)],
) -> Result<Vec<ReplayViolation>, SemanticsError> {
    let rel: BTreeSet<(usize, usize)> = witness.iter().copied().collect();
    let (ix1, ix2) = (index_of(l1), index_of(l2));
    let moves1 = |s: usize| -> Result<Vec<(Label, Option<usize>)>, SemanticsError> {
        Ok(sa
            .step(&l1.states[s])?
            .into_iter()
            .map(|(l, p)| (f.apply(&l), ix1.get(&p.canonicalise()).copied()))
            .collect())
    };
    let moves2 = |s: usize| -> Result<Vec<(Label, Option<usize>)>, SemanticsError> {
        Ok(sb
            .step(&l2.states[s])?
            .into_iter()
            .map(|(l, p)| (f.apply_right(&l), ix2.get(&p.canonicalise()).copied()))
            .collect())
    };
    let mut out = Vec::new();
    for &(s, t) in &rel {
        let (m1, m2) = (moves1(s)?, moves2(t)?);
        for (l, s2) in &m1 {
            let ok =
                m2.iter().any(|(l2, t2)| l2 == l && matches!((s2, t2), (Some(a), Some(b)) if rel.contains(&(*a, *b))));
            if !ok {
                out.push(ReplayViolation { left: s, right: t, side: Side::Left, label: Some(l.clone()) });
            }
        }
        for (l, t2) in &m2 {
            let ok =
                m1.iter().any(|(l1, s2)| l1 == l && matches!((s2, t2), (Some(a), Some(b)) if rel.contains(&(*a, *b))));
            if !ok {
                out.push(ReplayViolation { left: s, right: t, side: Side::Right, label: Some(l.clone()) });
            }
        }
    }
    if !rel.contains(&(l1.initial, l2.initial)) {
        out.push(ReplayViolation { left: l1.initial, right: l2.initial, side: Side::Left, label: None });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub source: usize,
    pub target: usize,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    pub pass: bool,
    /// Source steps with no related target answer.
    pub soundness: Vec<Violation>,
    /// Target steps with no related source answer.
    pub completeness: Vec<Violation>,
    pub pairs_checked: usize,
}

/// Walks the pairs reachable by matched steps from the initial pair and
/// reports every unmatched move on either side.
pub fn check_correspondence<P, Q>(
    source: &Lts<P>,
    target: &Lts<Q>,
    f: &LabelMap,
) -> Result<CorrespondenceReport, EquivalenceError> {
    if !source.complete {
        return Err(EquivalenceError::IncompleteLts(Side::Left));
    }
    if !target.complete {
        return Err(EquivalenceError::IncompleteLts(Side::Right));
    }
    let (u, edges) = union(source, target, f);
    let blocks = refine(&edges, None).pop().expect("non-empty");
    let n1 = u.n1;
    let mut seen = BTreeSet::from([(source.initial, target.initial)]);
    let mut queue = VecDeque::from([(source.initial, target.initial)]);
    let (mut soundness, mut completeness) = (Vec::new(), Vec::new());
    while let Some((s, t)) = queue.pop_front() {
        for &(l, s2) in &edges[s] {
            let answers: Vec<usize> =
                edges[n1 + t].iter().filter(|e| e.0 == l && blocks[e.1] == blocks[s2]).map(|e| e.1 - n1).collect();
            if answers.is_empty() {
                soundness.push(Violation { source: s, target: t, label: u.mapped[l].clone() });
            }
            for t2 in answers {
                if seen.insert((s2, t2)) {
                    queue.push_back((s2, t2));
                }
            }
        }
        for &(l, t2) in &edges[n1 + t] {
            if !edges[s].iter().any(|e| e.0 == l && blocks[e.1] == blocks[t2]) {
                completeness.push(Violation { source: s, target: t, label: u.mapped[l].clone() });
            }
        }
    }
    Ok(CorrespondenceReport {
        pass: soundness.is_empty() && completeness.is_empty(),
        soundness,
        completeness,
        pairs_checked: seen.len(),
    })
}
